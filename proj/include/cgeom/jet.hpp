#pragma once

// Truncated multivariate Taylor polynomials ("jets") up to total degree 4.
// Coefficients are stored as f_alpha / alpha!, graded by total degree, so the
// first jet_size(D, p) entries hold everything up to order p.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace cgeom {

inline constexpr int kMaxJetOrder = 4;

constexpr int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

constexpr int jet_size(int dim, int order) { return binom(dim + order, dim); }

struct capability_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <int D>
struct JetLayout {
  static constexpr int N = jet_size(D, kMaxJetOrder);
  static constexpr int kCodes = D == 1 ? 5 : D == 2 ? 25 : D == 3 ? 125 : 625;

  struct Term {
    std::int16_t i, j, k;
  };

  std::array<std::array<std::int8_t, D>, N> exps{};
  std::array<int, N> degree{};
  std::array<int, kMaxJetOrder + 1> count{};
  std::array<std::int16_t, kCodes> index{};
  std::array<std::array<std::int16_t, N>, D> up{};  // alpha + e_k, or -1
  std::array<std::vector<Term>, kMaxJetOrder + 1> mul;

  static int code(const std::array<std::int8_t, D>& a) {
    int c = 0;
    for (int k = D - 1; k >= 0; --k) c = c * 5 + a[k];
    return c;
  }

  JetLayout() {
    index.fill(-1);
    int n = 0;
    for (int deg = 0; deg <= kMaxJetOrder; ++deg) {
      // graded, then lexicographic with the first axis varying slowest
      std::array<std::int8_t, D> a{};
      enumerate(deg, 0, a, n);
      count[deg] = n;
    }
    for (int k = 0; k < D; ++k) {
      for (int i = 0; i < N; ++i) {
        auto a = exps[i];
        if (degree[i] == kMaxJetOrder) {
          up[k][i] = -1;
          continue;
        }
        ++a[k];
        up[k][i] = index[code(a)];
      }
    }
    for (int p = 0; p <= kMaxJetOrder; ++p) {
      for (int i = 0; i < count[p]; ++i)
        for (int j = 0; j < count[p - degree[i]]; ++j) {
          std::array<std::int8_t, D> a{};
          for (int k = 0; k < D; ++k) a[k] = exps[i][k] + exps[j][k];
          mul[p].push_back({static_cast<std::int16_t>(i), static_cast<std::int16_t>(j),
                            index[code(a)]});
        }
    }
  }

  void enumerate(int remaining, int axis, std::array<std::int8_t, D>& a, int& n) {
    if (axis == D - 1) {
      a[axis] = static_cast<std::int8_t>(remaining);
      exps[n] = a;
      int deg = 0;
      for (auto e : a) deg += e;
      degree[n] = deg;
      index[code(a)] = static_cast<std::int16_t>(n);
      ++n;
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      a[axis] = static_cast<std::int8_t>(e);
      enumerate(remaining - e, axis + 1, a, n);
    }
  }

  static const JetLayout& get() {
    static const JetLayout layout;
    return layout;
  }
};

template <class T, int D>
class Jet {
 public:
  using Layout = JetLayout<D>;
  static constexpr int N = Layout::N;

  Jet() : order_(kMaxJetOrder) { c_.fill(T(0)); }
  Jet(T v, int order = kMaxJetOrder) : order_(order) {  // NOLINT: implicit by design
    c_.fill(T(0));
    c_[0] = v;
  }

  static Jet variable(T x0, int axis, int order) {
    Jet j(x0, order);
    if (order >= 1) j.c_[1 + axis] = T(1);  // degree-1 block is e_0..e_{D-1}
    return j;
  }

  int order() const { return order_; }
  int size() const { return Layout::get().count[order_]; }
  T value() const { return c_[0]; }
  T coef(int i) const { return c_[i]; }
  T& coef(int i) { return c_[i]; }

  // partial derivative d^alpha at the expansion point
  T derivative(const std::array<int, D>& alpha) const {
    int deg = 0;
    std::array<std::int8_t, D> a{};
    T fact(1);
    for (int k = 0; k < D; ++k) {
      deg += alpha[k];
      a[k] = static_cast<std::int8_t>(alpha[k]);
      for (int m = 2; m <= alpha[k]; ++m) fact *= T(m);
    }
    if (deg > order_) throw capability_error("derivative order exceeds jet order");
    return fact * c_[Layout::get().index[Layout::code(a)]];
  }

  void set_derivative(const std::array<int, D>& alpha, T v) {
    std::array<std::int8_t, D> a{};
    int deg = 0;
    T fact(1);
    for (int k = 0; k < D; ++k) {
      deg += alpha[k];
      a[k] = static_cast<std::int8_t>(alpha[k]);
      for (int m = 2; m <= alpha[k]; ++m) fact *= T(m);
    }
    if (deg > order_) throw capability_error("derivative order exceeds jet order");
    c_[Layout::get().index[Layout::code(a)]] = v / fact;
  }

  // first partial as a jet of one lower order
  Jet d(int k) const {
    if (order_ == 0) throw capability_error("cannot differentiate an order-0 jet");
    const auto& L = Layout::get();
    Jet r(T(0), order_ - 1);
    for (int i = 0; i < L.count[order_ - 1]; ++i)
      r.c_[i] = T(L.exps[i][k] + 1) * c_[L.up[k][i]];
    return r;
  }

  Jet truncated(int order) const {
    Jet r = *this;
    if (order < order_) {
      const auto& L = Layout::get();
      for (int i = L.count[order]; i < N; ++i) r.c_[i] = T(0);
      r.order_ = order;
    }
    return r;
  }

  Jet operator-() const {
    Jet r = *this;
    for (int i = 0; i < size(); ++i) r.c_[i] = -c_[i];
    return r;
  }
  Jet& operator+=(const Jet& o) {
    lower_to(o.order_);
    for (int i = 0; i < size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    lower_to(o.order_);
    for (int i = 0; i < size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator+=(T s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(T s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(T s) {
    for (int i = 0; i < size(); ++i) c_[i] *= s;
    return *this;
  }
  Jet& operator/=(T s) {
    for (int i = 0; i < size(); ++i) c_[i] /= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    *this = *this * o;
    return *this;
  }
  Jet& operator/=(const Jet& o) {
    *this = *this / o;
    return *this;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    const int p = a.order_ < b.order_ ? a.order_ : b.order_;
    Jet r(T(0), p);
    for (const auto& t : Layout::get().mul[p]) r.c_[t.k] += a.c_[t.i] * b.c_[t.j];
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, T s) { return a += s; }
  friend Jet operator+(T s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, T s) { return a -= s; }
  friend Jet operator-(T s, const Jet& a) { return (-a) += s; }
  friend Jet operator*(Jet a, T s) { return a *= s; }
  friend Jet operator*(T s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, T s) { return a /= s; }
  friend Jet operator/(T s, const Jet& a) { return inverse(a) *= s; }

  // f(a + h) = sum_n t[n] h^n with h nilpotent; t are Taylor coefficients of f at a.
  Jet compose(const std::array<T, kMaxJetOrder + 1>& t) const {
    Jet h = *this;
    h.c_[0] = T(0);
    Jet r(t[order_], order_);
    for (int n = order_ - 1; n >= 0; --n) {
      r = r * h;
      r.c_[0] += t[n];
    }
    return r;
  }

  friend Jet inverse(const Jet& x) {
    const T a = x.value();
    if (a == T(0)) throw std::domain_error("jet reciprocal of zero");
    std::array<T, kMaxJetOrder + 1> t{};
    T inv = T(1) / a, p = inv;
    for (int n = 0; n <= kMaxJetOrder; ++n) {
      t[n] = (n % 2 ? -p : p);
      p *= inv;
    }
    return x.compose(t);
  }

 private:
  void lower_to(int o) {
    if (o < order_) *this = truncated(o);
  }

  std::array<T, N> c_;
  int order_;
};

template <class T, int D>
Jet<T, D> exp(const Jet<T, D>& x) {
  using std::exp;
  const T e = exp(x.value());
  return x.compose({e, e, e / T(2), e / T(6), e / T(24)});
}

template <class T, int D>
Jet<T, D> log(const Jet<T, D>& x) {
  using std::log;
  const T a = x.value();
  if (!(a > T(0))) throw std::domain_error("jet log of non-positive value");
  const T i = T(1) / a;
  return x.compose({log(a), i, -i * i / T(2), i * i * i / T(3), -i * i * i * i / T(4)});
}

template <class T, int D>
Jet<T, D> pow(const Jet<T, D>& x, T s) {
  using std::pow;
  const T a = x.value();
  std::array<T, kMaxJetOrder + 1> t{};
  T coef(1);
  for (int n = 0; n <= kMaxJetOrder; ++n) {
    t[n] = coef * pow(a, s - T(n));
    coef *= (s - T(n)) / T(n + 1);
  }
  return x.compose(t);
}

template <class T, int D>
Jet<T, D> sqrt(const Jet<T, D>& x) {
  return pow(x, T(0.5));
}

template <class T, int D>
Jet<T, D> sin(const Jet<T, D>& x) {
  using std::cos;
  using std::sin;
  const T s = sin(x.value()), c = cos(x.value());
  return x.compose({s, c, -s / T(2), -c / T(6), s / T(24)});
}

template <class T, int D>
Jet<T, D> cos(const Jet<T, D>& x) {
  using std::cos;
  using std::sin;
  const T s = sin(x.value()), c = cos(x.value());
  return x.compose({c, -s, -c / T(2), s / T(6), c / T(24)});
}

template <class T, int D>
Jet<T, D> atan2(const Jet<T, D>& y, const Jet<T, D>& x) {
  // value from std::atan2, derivatives from d(atan2) = (x dy - y dx)/(x^2+y^2)
  using std::atan2;
  const T a = atan2(y.value(), x.value());
  const T x0 = x.value(), y0 = y.value(), r2 = x0 * x0 + y0 * y0;
  // rotate so that the argument is near the positive axis: atan(t) with t small
  const Jet<T, D> xr = (x * x0 + y * y0) / std::sqrt(r2);
  const Jet<T, D> yr = (y * x0 - x * y0) / std::sqrt(r2);
  const Jet<T, D> t = yr / xr;  // t(0) = 0
  // atan(t) = t - t^3/3 + ...
  return t.compose({a, T(1), T(0), T(-1) / T(3), T(0)});
}

template <class T, int D>
Jet<T, D> sq(const Jet<T, D>& x) {
  return x * x;
}

inline double sq(double x) { return x * x; }

template <class T, int D>
using JetVec = Eigen::Matrix<Jet<T, D>, D, 1>;
template <class T, int D>
using JetMat = Eigen::Matrix<Jet<T, D>, D, D>;

// Jet coordinates x0 + h, each variable carrying the given order.
template <class T, int D>
JetVec<T, D> seed(const Eigen::Matrix<T, D, 1>& x0, int order) {
  JetVec<T, D> x;
  for (int k = 0; k < D; ++k) x(k) = Jet<T, D>::variable(x0(k), k, order);
  return x;
}

}  // namespace cgeom

namespace Eigen {
template <class T, int D>
struct NumTraits<cgeom::Jet<T, D>> : NumTraits<T> {
  using Real = cgeom::Jet<T, D>;
  using NonInteger = cgeom::Jet<T, D>;
  using Nested = cgeom::Jet<T, D>;
  using Literal = cgeom::Jet<T, D>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = cgeom::Jet<T, D>::N,
    AddCost = cgeom::Jet<T, D>::N,
    MulCost = 8 * cgeom::Jet<T, D>::N
  };
};
template <class T, int D, typename BinaryOp>
struct ScalarBinaryOpTraits<cgeom::Jet<T, D>, T, BinaryOp> {
  using ReturnType = cgeom::Jet<T, D>;
};
template <class T, int D, typename BinaryOp>
struct ScalarBinaryOpTraits<T, cgeom::Jet<T, D>, BinaryOp> {
  using ReturnType = cgeom::Jet<T, D>;
};
}  // namespace Eigen
