#pragma once

// Chebyshev / Gauss / Fourier building blocks, templated on scalar so the
// radial gauge solver can run them in quad precision.

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/constants/constants.hpp>

#include "cgeom/jet.hpp"

namespace cgeom {

template <class S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
S pi_v() {
  return boost::math::constants::pi<S>();
}

// Chebyshev–Gauss–Lobatto nodes on [a, b], ascending: x_0 = a, x_N = b.
template <class S>
VecX<S> cheb_nodes(int N, S a, S b) {
  using std::cos;
  VecX<S> x(N + 1);
  for (int j = 0; j <= N; ++j) {
    const S t = -cos(pi_v<S>() * S(j) / S(N));
    x(j) = (a + b) / S(2) + (b - a) / S(2) * t;
  }
  x(0) = a;
  x(N) = b;
  return x;
}

// Differentiation matrix on the ascending CGL nodes (barycentric form,
// node differences from the sine identity, diagonal by negative row sums).
template <class S>
MatX<S> cheb_diff(int N, S a, S b) {
  using std::sin;
  const S pi = pi_v<S>();
  MatX<S> D(N + 1, N + 1);
  auto w = [&](int j) {
    S v = (j % 2 == 0) ? S(1) : S(-1);
    if (j == 0 || j == N) v /= S(2);
    return v;
  };
  const S scale = S(2) / (b - a);
  for (int i = 0; i <= N; ++i) {
    S diag(0);
    for (int j = 0; j <= N; ++j) {
      if (i == j) continue;
      const S dx = S(2) * sin(pi * S(i + j) / S(2 * N)) * sin(pi * S(i - j) / S(2 * N));
      D(i, j) = w(j) / w(i) / dx * scale;
      diag -= D(i, j);
    }
    D(i, i) = diag;
  }
  return D;
}

// Clenshaw–Curtis weights on the ascending CGL nodes.
template <class S>
VecX<S> clenshaw_curtis(int N, S a, S b) {
  using std::cos;
  const S pi = pi_v<S>();
  VecX<S> w = VecX<S>::Zero(N + 1);
  for (int j = 0; j <= N; ++j) {
    const S th = pi * S(j) / S(N);
    S s(0);
    for (int k = 0; k <= N / 2; ++k) {
      S bk = (k == 0 || 2 * k == N) ? S(1) : S(2);
      s += bk / S(1 - 4 * k * k) * cos(S(2 * k) * th);
    }
    S cj = (j == 0 || j == N) ? S(1) : S(2);
    w(j) = cj / S(N) * s;
  }
  return w * (b - a) / S(2);
}

// Chebyshev coefficients c_k of the interpolant through values on CGL nodes.
template <class S>
VecX<S> cheb_coefficients(const VecX<S>& values) {
  using std::cos;
  const int N = static_cast<int>(values.size()) - 1;
  const S pi = pi_v<S>();
  VecX<S> c(N + 1);
  for (int k = 0; k <= N; ++k) {
    S s(0);
    for (int j = 0; j <= N; ++j) {
      S f = values(j);
      if (j == 0 || j == N) f /= S(2);
      // ascending nodes: t_j = -cos(pi j/N) => T_k(t_j) = (-1)^k cos(pi j k/N)
      s += f * cos(pi * S(j * k) / S(N));
    }
    s *= S(2) / S(N);
    if (k % 2 == 1) s = -s;
    if (k == 0 || k == N) s /= S(2);
    c(k) = s;
  }
  return c;
}

// Clenshaw evaluation of sum c_k T_k(t), t = (2x - a - b)/(b - a); X may be a jet.
template <class S, class X>
X cheb_eval(const VecX<S>& c, S a, S b, const X& x) {
  const X t = (x * S(2) - (a + b)) / (b - a);
  X b1 = X(S(0)) * t, b2 = b1;
  for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
    X b0 = t * b1 * S(2) - b2 + c(k);
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c(0);
}

// Gauss–Legendre nodes/weights on [a, b] by Newton on P_n.
template <class S>
void gauss_legendre(int n, S a, S b, VecX<S>& x, VecX<S>& w) {
  using std::abs;
  using std::cos;
  x.resize(n);
  w.resize(n);
  const S pi = pi_v<S>();
  const S eps = Eigen::NumTraits<S>::epsilon();
  for (int i = 0; i < (n + 1) / 2; ++i) {
    S z = cos(pi * (S(i) + S(0.75)) / (S(n) + S(0.5)));
    S dp(0);
    for (int it = 0; it < 100; ++it) {
      S p0(1), p1 = z;
      for (int k = 2; k <= n; ++k) {
        S p2 = (S(2 * k - 1) * z * p1 - S(k - 1) * p0) / S(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = S(1), p1 = z;
      dp = S(n) * (z * p1 - p0) / (z * z - S(1));
      S dz = p1 / dp;
      z -= dz;
      if (abs(dz) < S(10) * eps) break;
    }
    {
      S p0(1), p1 = z;
      for (int k = 2; k <= n; ++k) {
        S p2 = (S(2 * k - 1) * z * p1 - S(k - 1) * p0) / S(k);
        p0 = p1;
        p1 = p2;
      }
      dp = S(n) * (z * p1 - p0) / (z * z - S(1));
    }
    const S wi = S(2) / ((S(1) - z * z) * dp * dp);
    x(i) = -z;
    x(n - 1 - i) = z;
    w(i) = wi;
    w(n - 1 - i) = wi;
  }
  for (int i = 0; i < n; ++i) {
    x(i) = (a + b) / S(2) + (b - a) / S(2) * x(i);
    w(i) *= (b - a) / S(2);
  }
}

// Barycentric interpolation from CGL nodes to arbitrary points.
template <class S>
S cheb_interp(const VecX<S>& nodes, const VecX<S>& values, S x) {
  const int N = static_cast<int>(nodes.size()) - 1;
  S num(0), den(0);
  for (int j = 0; j <= N; ++j) {
    const S dx = x - nodes(j);
    if (dx == S(0)) return values(j);
    S w = (j % 2 == 0) ? S(1) : S(-1);
    if (j == 0 || j == N) w /= S(2);
    num += w / dx * values(j);
    den += w / dx;
  }
  return num / den;
}

// Rows of barycentric weights: (P v)_i = cheb_interp(nodes, v, x_i).
template <class S>
MatX<S> cheb_interp_matrix(const VecX<S>& nodes, const VecX<S>& x) {
  const int N = static_cast<int>(nodes.size()) - 1;
  MatX<S> P = MatX<S>::Zero(x.size(), N + 1);
  for (int i = 0; i < x.size(); ++i) {
    S den(0);
    int hit = -1;
    for (int j = 0; j <= N; ++j) {
      const S dx = x(i) - nodes(j);
      if (dx == S(0)) {
        hit = j;
        break;
      }
      S w = (j % 2 == 0) ? S(1) : S(-1);
      if (j == 0 || j == N) w /= S(2);
      P(i, j) = w / dx;
      den += w / dx;
    }
    if (hit >= 0) {
      P.row(i).setZero();
      P(i, hit) = S(1);
    } else {
      P.row(i) /= den;
    }
  }
  return P;
}

// Fornberg finite-difference weights for derivative m at x0 on points xs.
std::vector<double> fornberg(double x0, const std::vector<double>& xs, int m);

// Periodic spectral derivative (even length, real data) along a sampled circle.
Eigen::VectorXd fourier_derivative(const Eigen::VectorXd& f, int order = 1);
// Antiderivative of a zero-mean periodic sample with value 0 at index 0.
Eigen::VectorXd fourier_antiderivative(const Eigen::VectorXd& f);

}  // namespace cgeom
