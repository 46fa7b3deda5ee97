#include "cgeom/frames2d.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Geometry>

#include "cgeom/curvature.hpp"
#include "cgeom/rng.hpp"
#include "cgeom/spectral.hpp"

namespace cgeom {

namespace {

using J2 = Jet<double, 2>;
using X2 = JetVec<double, 2>;

J2 r2_of(const X2& x) { return x(0) * x(0) + x(1) * x(1); }

double sup(const PolarField& f) { return f.size() ? f.cwiseAbs().maxCoeff() : 0.0; }
double sup(const PolarForm& w) { return std::max(sup(w.s), sup(w.t)); }

PolarForm operator-(const PolarForm& a, const PolarForm& b) { return {a.s - b.s, a.t - b.t}; }
PolarForm operator+(const PolarForm& a, const PolarForm& b) { return {a.s + b.s, a.t + b.t}; }
PolarForm scaled(const PolarField& f, const PolarForm& w) { return {f.cwiseProduct(w.s), f.cwiseProduct(w.t)}; }

// Euclidean star in the conformal (s, theta) chart: *ds = dtheta, *dtheta = -ds.
PolarForm star(const PolarForm& w) { return {-w.t, w.s}; }

double energy(const PolarGrid& G, const PolarTensor& A, const PolarForm& w) {
  const PolarForm Aw = apply(A, w);
  return G.integrate(Aw.s.cwiseProduct(w.s) + Aw.t.cwiseProduct(w.t));
}

// Least-squares slope of log y against log x over the last k points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, int k) {
  const int n = static_cast<int>(x.size());
  const int lo = std::max(0, n - k);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int c = 0;
  for (int i = lo; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::max(y[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++c;
  }
  if (c < 2) return 0;
  return (c * sxy - sx * sy) / (c * sxx - sx * sx);
}

json vec_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Coframes

Mat<2> Coframe2D::value(const Vec<2>& x) const {
  const JetMat<double, 2> W = fn(seed<double, 2>(x, 0));
  return values<2>(W);
}

MetricField<2> Coframe2D::metric() const {
  const CoframeFn f = fn;
  return MetricField<2>::closed(name,
                                [f](const X2& x) {
                                  const JetMat<double, 2> W = f(x);
                                  JetMat<double, 2> g;
                                  for (int a = 0; a < 2; ++a)
                                    for (int b = 0; b < 2; ++b) g(a, b) = W(0, a) * W(0, b) + W(1, a) * W(1, b);
                                  return g;
                                })
      .with_domain(r_min, 1e300);
}

Coframe2D conformal_coframe(const std::string& name, const ScalarJetFn<2>& lambda, double r_min) {
  return {name,
          [lambda](const X2& x) {
            const J2 e = exp(lambda(x));
            JetMat<double, 2> W;
            W(0, 0) = e;
            W(1, 1) = e;
            W(0, 1) = W(1, 0) = J2(0.0, e.order());
            return W;
          },
          r_min};
}

Coframe2D polar_coframe() {
  return {"flat2_polar",
          [](const X2& x) {
            const J2 r = sqrt(r2_of(x));
            JetMat<double, 2> W;
            W(0, 0) = x(0) / r;
            W(0, 1) = x(1) / r;
            W(1, 0) = -x(1) / r;
            W(1, 1) = x(0) / r;
            return W;
          },
          1e-12};
}

Coframe2D orthonormal_coframe(const MetricField<2>& g) {
  if (!g.closed_form()) throw capability_error("orthonormal_coframe: closed-form metric required");
  const MetricFn<2> f = g.fn();
  return {g.name(),
          [f](const X2& x) {
            const JetMat<double, 2> m = f(x);
            const J2 s = sqrt(m(0, 0));
            const J2 det = m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1);
            JetMat<double, 2> W;
            W(0, 0) = s;
            W(0, 1) = m(0, 1) / s;
            W(1, 0) = J2(0.0, s.order());
            W(1, 1) = sqrt(det / m(0, 0));
            return W;
          },
          g.r_min()};
}

Coframe2D rotate(const Coframe2D& c, const ScalarJetFn<2>& a, const ScalarJetFn<2>& f) {
  const CoframeFn base = c.fn;
  return {c.name,
          [base, a, f](const X2& x) {
            const JetMat<double, 2> W = base(x);
            const J2 ang = a ? a(x) : J2(0.0, x(0).order());
            const J2 sc = f ? exp(f(x)) : J2(1.0, x(0).order());
            const J2 ca = cos(ang) * sc, sa = sin(ang) * sc;
            JetMat<double, 2> R;
            for (int k = 0; k < 2; ++k) {
              R(0, k) = ca * W(0, k) - sa * W(1, k);
              R(1, k) = sa * W(0, k) + ca * W(1, k);
            }
            return R;
          },
          c.r_min};
}

ScalarJetFn<2> bump_angle(double amp, const Vec<2>& center, double width) {
  return [=](const X2& x) {
    const J2 dx = x(0) - center(0), dy = x(1) - center(1);
    return amp * exp(-(dx * dx + dy * dy) / (width * width));
  };
}

Coframe2D catalog_coframe(const std::string& metric, const Params& p) {
  Coframe2D c;
  if (metric == "flat2") {
    const std::string frame = param_str(p, "frame", "cartesian");
    if (frame == "polar")
      c = polar_coframe();
    else if (frame == "cartesian")
      c = conformal_coframe("flat2", [](const X2& x) { return J2(0.0, x(0).order()); });
    else
      throw std::invalid_argument("flat2: frame must be cartesian or polar");
  } else if (metric == "round_sphere2") {
    c = conformal_coframe("round_sphere2", [](const X2& x) { return std::log(2.0) - log(1.0 + r2_of(x)); });
  } else if (metric == "polar_singular") {
    const double n = param(p, "n", 2);
    c = conformal_coframe(
        "polar_singular", [n](const X2& x) { return std::log(n) + 0.5 * (n - 1) * log(r2_of(x)); }, 1e-12);
  } else if (metric == "essential") {
    const double q = param(p, "power", -2);
    c = conformal_coframe(
        "essential", [q](const X2& x) {
          const J2 r2 = r2_of(x);
          return 0.5 * q * log(r2) + x(0) / r2;
        },
        1.0 / 256);
  } else if (metric == "annulus_d") {
    c = {"annulus_d",
         [](const X2& x) {
           const J2 r2 = r2_of(x);
           const J2 r = sqrt(r2);
           const J2 rho = 0.5 + 0.5 * r;
           JetMat<double, 2> W;
           W(0, 0) = 0.5 * x(0) / r;
           W(0, 1) = 0.5 * x(1) / r;
           W(1, 0) = -rho * x(1) / r2;
           W(1, 1) = rho * x(0) / r2;
           return W;
         },
         1e-12};
  } else {
    c = orthonormal_coframe(catalog2(metric, p));
  }
  const double twist = param(p, "twist", 0);
  if (twist != 0) c = rotate(c, bump_angle(twist, Vec<2>(0.3, -0.2), 0.35));
  return c;
}

// ---------------------------------------------------------------------------
// Connection form

ConnectionPoint connection_at(const Coframe2D& c, const Vec<2>& x, bool curvature) {
  const int order = curvature ? 2 : 1;
  JetMat<double, 2> W = c.fn(seed<double, 2>(x, order));
  {
    // w12 is invariant under constant rescaling; keep det and its powers representable
    double big = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) big = std::max(big, std::abs(W(a, b).value()));
    if (big > 0 && std::isfinite(big))
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) W(a, b) = W(a, b) * (1 / big);
  }
  const J2 det = W(0, 0) * W(1, 1) - W(0, 1) * W(1, 0);
  const double scale = std::abs(W(0, 0).value()) + std::abs(W(0, 1).value()) + std::abs(W(1, 0).value()) +
                       std::abs(W(1, 1).value());
  if (!(std::abs(det.value()) > 1e-14 * scale * scale))
    throw std::domain_error("connection_form: degenerate coframe at (" + fmt(x(0)) + ", " + fmt(x(1)) + ")");
  J2 curl[2];
  for (int i = 0; i < 2; ++i) curl[i] = W(i, 1).d(0) - W(i, 0).d(1);
  J2 w12[2];
  for (int a = 0; a < 2; ++a) w12[a] = (curl[0] * W(0, a) + curl[1] * W(1, a)) / det;
  ConnectionPoint p;
  p.w12 = Vec<2>(w12[0].value(), w12[1].value());
  const Mat<2> Wv = values<2>(W);
  p.E = c.value(x).inverse();
  p.duality = (c.value(x) * p.E - Mat<2>::Identity()).cwiseAbs().maxCoeff();
  // dw1 - w12 ^ w2 and dw2 + w12 ^ w1 (dx ^ dy coefficients)
  const double s1 = curl[0].value() - (p.w12(0) * Wv(1, 1) - p.w12(1) * Wv(1, 0));
  const double s2 = curl[1].value() + (p.w12(0) * Wv(0, 1) - p.w12(1) * Wv(0, 0));
  const double n1 = std::abs(curl[0].value()) + p.w12.norm() * Wv.row(1).norm() + 1e-300;
  const double n2 = std::abs(curl[1].value()) + p.w12.norm() * Wv.row(0).norm() + 1e-300;
  p.structure = std::max(std::abs(s1) / std::max(n1, 1e-12), std::abs(s2) / std::max(n2, 1e-12));
  if (curvature) p.dw12 = (w12[1].d(0) - w12[0].d(1)).value();
  return p;
}

OneFormFn connection_fn(const Coframe2D& c) {
  return [c](const Vec<2>& x) { return connection_at(c, x).w12; };
}

ConnectionForm connection_form(const Coframe2D& c, const Chart& chart) {
  if (chart.dim() != 2) throw std::invalid_argument("connection_form: 2D chart required");
  ConnectionForm out{GridField(chart, 2)};
  out.w12.rank = 1;
  out.w12.comp_dim = 2;
  for (int q = 0; q < chart.num_nodes(); ++q) {
    const Vec<2> x = chart.cartesian(q);
    const ConnectionPoint p = connection_at(c, x);
    out.w12(q, 0) = p.w12(0);
    out.w12(q, 1) = p.w12(1);
    out.max_duality = std::max(out.max_duality, p.duality);
    out.max_structure = std::max(out.max_structure, p.structure);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Degrees and circulations

int frame_degree(const std::function<Vec<2>(double)>& E1, int samples) {
  double total = 0;
  Vec<2> prev = E1(0.0);
  if (!(prev.norm() > 1e-12)) throw std::domain_error("frame_degree: E1 vanishes on the circle");
  for (int j = 1; j <= samples; ++j) {
    const Vec<2> v = E1(2 * M_PI * j / samples);
    if (!(v.norm() > 1e-12)) throw std::domain_error("frame_degree: E1 vanishes on the circle");
    const double inc = std::atan2(prev(0) * v(1) - prev(1) * v(0), prev.dot(v));
    if (std::abs(inc) > M_PI / 2) throw std::domain_error("frame_degree: circle undersampled");
    total += inc;
    prev = v;
  }
  return static_cast<int>(std::lround(total / (2 * M_PI)));
}

int frame_degree(const Coframe2D& c, double radius, int samples) {
  return frame_degree(
      [&](double t) {
        const Vec<2> x(radius * std::cos(t), radius * std::sin(t));
        return Vec<2>(c.value(x).inverse().col(0));
      },
      samples);
}

std::vector<double> dyadic_radii(double r_start, double r_min, int max_count) {
  std::vector<double> r;
  for (double x = r_start; x >= r_min && static_cast<int>(r.size()) < max_count; x /= 2) r.push_back(x);
  return r;
}

SingularityData circulation(const OneFormFn& form, const std::vector<double>& radii, int degree, int samples,
                            double tol) {
  if (radii.size() < 2) throw std::invalid_argument("circulation: need at least two radii");
  for (size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1] && radii[i] > 0)) throw std::invalid_argument("circulation: radii must decrease");
  SingularityData d;
  d.radii = radii;
  d.degree = degree;
  const double h = 2 * M_PI / samples;
  for (double r : radii) {
    KahanSum c, a;
    for (int j = 0; j < samples; ++j) {
      const double t = j * h;
      const Vec<2> tangent(-r * std::sin(t), r * std::cos(t));
      const double v = form(Vec<2>(r * std::cos(t), r * std::sin(t))).dot(tangent);
      c.add(v * h);
      a.add(std::abs(v) * h);
    }
    d.circulation.push_back(c.value());
    d.abs_circulation.push_back(a.value());
  }
  const int n = static_cast<int>(radii.size());
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(d.circulation[i]) || !std::isfinite(d.abs_circulation[i]))
      throw std::domain_error("circulation: non-finite value at r = " + fmt(radii[i]));
  d.alpha = d.circulation.back();
  if (n >= 3) {
    const double d1 = d.circulation[n - 1] - d.circulation[n - 2], d0 = d.circulation[n - 2] - d.circulation[n - 3];
    if (std::abs(d1) > 0 && std::abs(d0) > 1.2 * std::abs(d1) && d0 * d1 > 0) d.alpha -= d1 * d1 / (d1 - d0);
  }
  d.tail = std::abs(d.circulation[n - 1] - d.circulation[n - 2]);
  for (double c : d.circulation) d.deviation = std::max(d.deviation, std::abs(c - d.alpha));
  d.m = degree - d.alpha / (2 * M_PI);
  d.convergent = d.tail <= tol * std::max(1.0, std::abs(d.alpha));
  const double amax = *std::max_element(d.abs_circulation.begin(), d.abs_circulation.end());
  d.abs_growth = amax > 1e-12 ? -loglog_slope(d.radii, d.abs_circulation, 4) : 0.0;
  d.divergent = d.abs_growth > 0.5;
  // ||form - (alpha/2pi) dtheta||^2 on D \ D_r, Gauss in log r between consecutive radii
  Eigen::VectorXd gx, gw;
  gauss_legendre<double>(16, 0.0, 1.0, gx, gw);
  const int na = std::max(64, samples / 4);
  double acc = 0;
  double outer = 1.0;
  for (double r : radii) {
    const double a = std::log(r), b = std::log(outer);
    for (int q = 0; q < gx.size(); ++q) {
      const double s = a + (b - a) * gx(q), rr = std::exp(s);
      for (int j = 0; j < na; ++j) {
        const double t = 2 * M_PI * j / na;
        const Vec<2> x(rr * std::cos(t), rr * std::sin(t));
        const Vec<2> rem = form(x) - d.alpha / (2 * M_PI) * Vec<2>(-x(1), x(0)) / (rr * rr);
        acc += rem.squaredNorm() * rr * rr * (b - a) * gw(q) * 2 * M_PI / na;
      }
    }
    d.remainder_L2.push_back(acc);
    outer = r;
  }
  if (!d.convergent) d.flags.push_back("circulation not convergent: tail " + fmt(d.tail));
  if (d.divergent)
    d.flags.push_back("circle masses diverge like r^-" + fmt(d.abs_growth) + ": not a measure at the puncture");
  return d;
}

SingularityData circulation(const Coframe2D& c, const std::vector<double>& radii, int samples, double tol) {
  return circulation(connection_fn(c), radii, frame_degree(c, 1.0, samples), samples, tol);
}

json SingularityData::to_json() const {
  json j;
  j["radii"] = vec_json(radii);
  j["circulation"] = vec_json(circulation);
  j["abs_circulation"] = vec_json(abs_circulation);
  j["remainder_L2"] = vec_json(remainder_L2);
  j["alpha"] = alpha;
  j["deviation"] = deviation;
  j["tail"] = tail;
  j["abs_growth"] = abs_growth;
  j["degree"] = degree;
  j["m"] = m;
  j["dirac_coefficient"] = 2 * M_PI * m;
  j["convergent"] = convergent;
  j["divergent"] = divergent;
  j["flags"] = flags;
  return j;
}

std::string SingularityData::csv() const {
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < radii.size(); ++i)
    rows.push_back({radii[i], circulation[i], abs_circulation[i], remainder_L2[i]});
  return table_csv({"radius", "circulation", "abs_circulation", "remainder_L2"}, rows);
}

double gauss_bonnet_disk(const Coframe2D& c, int samples) {
  const MetricField<2> g = c.metric();
  const double h = 2 * M_PI / samples;
  KahanSum kg, circ;
  for (int j = 0; j < samples; ++j) {
    const double t = j * h;
    const Vec<2> x(std::cos(t), std::sin(t)), v(-std::sin(t), std::cos(t)), acc0(-std::cos(t), -std::sin(t));
    const auto pt = curvature_at<2>(g, x, CurvatureLevel::riemann);
    Vec<2> acc = acc0;
    for (int k = 0; k < 2; ++k) acc(k) += v.dot(pt.gamma[k] * v);
    const Vec<2> nu(-v(1), v(0));
    Vec<2> N = pt.ginv * nu;
    N /= std::sqrt(nu.dot(N));
    const double speed2 = v.dot(pt.g * v);
    kg.add(acc.dot(pt.g * N) / std::sqrt(speed2) * h);
    circ.add(connection_at(c, x).w12.dot(v) * h);
  }
  return kg.value() - circ.value() + 2 * M_PI * frame_degree(c, 1.0, samples);
}

// ---------------------------------------------------------------------------
// Sampled pipeline

PolarCoframe sample_coframe(const PolarGrid& G, const Coframe2D& c) {
  PolarCoframe w{{G.zeros(), G.zeros()}, {G.zeros(), G.zeros()}};
  for (int i = 0; i < G.rows(); ++i)
    for (int k = 0; k < G.n_theta; ++k) {
      const Mat<2> W = c.value(G.point(i, k));
      const double cs = std::cos(G.theta(k)), sn = std::sin(G.theta(k)), r = G.r(i);
      PolarForm* f[2] = {&w.w1, &w.w2};
      for (int a = 0; a < 2; ++a) {
        f[a]->s(i, k) = r * (W(a, 0) * cs + W(a, 1) * sn);
        f[a]->t(i, k) = r * (-W(a, 0) * sn + W(a, 1) * cs);
      }
    }
  return w;
}

PolarForm connection_form(const PolarGrid& G, const PolarCoframe& w) {
  const PolarField det = w.w1.s.cwiseProduct(w.w2.t) - w.w1.t.cwiseProduct(w.w2.s);
  const double scale = std::max(sup(w.w1), sup(w.w2));
  if (!(det.cwiseAbs().minCoeff() > 1e-14 * scale * scale))
    throw std::domain_error("connection_form: degenerate sampled coframe");
  const PolarField c1 = G.curl(w.w1).cwiseQuotient(det), c2 = G.curl(w.w2).cwiseQuotient(det);
  return scaled(c1, w.w1) + scaled(c2, w.w2);
}

PolarCoframe rotate(const PolarCoframe& w, const PolarField& a, const PolarField& f) {
  const PolarField e = f.array().exp().matrix();
  const PolarField ca = a.array().cos().matrix().cwiseProduct(e), sa = a.array().sin().matrix().cwiseProduct(e);
  return {scaled(ca, w.w1) - scaled(sa, w.w2), scaled(sa, w.w1) + scaled(ca, w.w2)};
}

int frame_degree(const PolarGrid& G, const PolarCoframe& w, int ring) {
  const int n = G.n_theta;
  return frame_degree(
      [&](double t) {
        const int k = static_cast<int>(std::lround(t / (2 * M_PI) * n)) % n;
        Mat<2> W;
        W << w.w1.s(ring, k), w.w1.t(ring, k), w.w2.s(ring, k), w.w2.t(ring, k);
        const Vec<2> e = W.inverse().col(0);  // along d/ds, d/dtheta
        const Vec<2> x = G.point(ring, k);
        return Vec<2>(e(0) * x(0) - e(1) * x(1), e(0) * x(1) + e(1) * x(0));
      },
      n);
}

HodgeParts hodge_decompose(const PolarGrid& G, const PolarForm& w) {
  HodgeParts H;
  const PolarTensor I = identity_tensor(G);
  EllipticReport ra, rb;
  H.a = solve_elliptic(G, I, w, G.zeros(), {EndKind::flux, {}}, {EndKind::flux, {}}, &ra);
  const PolarForm zero{G.zeros(), G.zeros()};
  H.b = solve_elliptic(G, I, zero, G.curl(w), {EndKind::dirichlet, {}}, {EndKind::dirichlet, {}}, &rb);
  H.solver_residual = std::max(ra.residual, rb.residual);
  const PolarForm da = G.d(H.a), sdb = star(G.d(H.b));
  H.h = w - da - sdb;
  const double scale = 1 + sup(w);
  H.residual = sup(w - da - sdb - H.h) / scale;
  const int inner = G.n_s - 1;
  H.dh = sup(G.curl(H.h).middleRows(1, inner)) / scale;
  H.dstar_h = sup((G.d_s(H.h.s) + G.d_theta(H.h.t)).middleRows(1, inner)) / scale;
  return H;
}

GaugeRotation gauge_rotate(const PolarGrid& G, const PolarCoframe& omega, const PolarForm& omega12,
                           const PolarField& a, double m) {
  GaugeRotation R;
  const PolarField f = m * G.s.replicate(1, G.n_theta);
  R.w = rotate(omega, a, f);
  R.w12 = connection_form(G, R.w);
  const PolarTensor A = energy_tensor(G, omega.w1, omega.w2);
  const PolarForm star_dlogr{-A.st, A.ss};  // *_g ds
  const PolarForm da = G.d(a);
  const PolarForm expect{omega12.s - da.s + m * star_dlogr.s, omega12.t - da.t + m * star_dlogr.t};
  R.connection_residual = sup(R.w12 - expect) / (1 + sup(expect));
  double num = 0, den = 0;
  for (int i = 0; i < G.rows(); ++i)
    for (int k = 0; k < G.n_theta; ++k) {
      Eigen::Matrix2d Wo, Ww;
      Wo << omega.w1.s(i, k), omega.w1.t(i, k), omega.w2.s(i, k), omega.w2.t(i, k);
      Ww << R.w.w1.s(i, k), R.w.w1.t(i, k), R.w.w2.s(i, k), R.w.w2.t(i, k);
      const Eigen::Matrix2d h = std::pow(G.r(i), 2 * m) * Wo.transpose() * Wo;
      num = std::max(num, (Ww.transpose() * Ww - h).cwiseAbs().maxCoeff() / h.cwiseAbs().maxCoeff());
      den = 1;
    }
  R.metric_residual = num / den;
  R.w12_L2 = std::sqrt(G.integrate(R.w12.s.cwiseAbs2() + R.w12.t.cwiseAbs2()));
  return R;
}

CoulombFrame coulomb_minimize(const PolarGrid& G, const PolarCoframe& w, double m, std::uint64_t seed) {
  CoulombFrame C;
  C.w = w;
  C.m = m;
  C.w12 = connection_form(G, w);
  const PolarTensor A = energy_tensor(G, w.w1, w.w2);
  EllipticReport ru, rm;
  C.u = solve_elliptic(G, A, C.w12, G.zeros(), {EndKind::flux, {}}, {EndKind::flux, {}}, &ru);
  C.alpha = rotate(w, C.u, G.zeros());
  C.alpha12 = C.w12 - G.d(C.u);
  const PolarForm spectral = connection_form(G, C.alpha);
  C.connection_residual = sup(spectral - C.alpha12) / (1 + sup(C.alpha12));
  C.energy_before = energy(G, A, C.w12);
  C.energy_after = energy(G, A, C.alpha12);
  const PolarForm Aa = apply(A, C.alpha12);
  const double scale = 1 + std::max(sup(Aa), sup(C.w12));
  C.div_residual = sup((G.d_s(Aa.s) + G.d_theta(Aa.t)).middleRows(1, G.n_s - 1)) / scale;
  C.boundary_trace = std::max(Aa.s.row(0).cwiseAbs().maxCoeff(), Aa.s.row(G.n_s).cwiseAbs().maxCoeff()) / scale;
  // d mu = -*_h alpha12 = (A alpha)_theta ds - (A alpha)_s dtheta
  const PolarForm v{Aa.t, -Aa.s};
  C.mu = solve_elliptic(G, identity_tensor(G), v, G.zeros(), {EndKind::flux, {}}, {EndKind::dirichlet, {}}, &rm);
  C.mu_residual = sup(G.d(C.mu) - v) / (1 + sup(v));
  C.solver_residual = std::max(ru.residual, rm.residual);
  // <*_h alpha12, d chi> for random smooth chi (no boundary condition: the natural trace vanishes)
  std::mt19937_64 rng(seed);
  const double a = G.s(0);
  for (int t = 0; t < 10; ++t) {
    PolarField chi = G.zeros();
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        const double c1 = normal(rng), c2 = normal(rng);
        for (int i = 0; i < G.rows(); ++i) {
          const double x = 2 * (G.s(i) - a) / (0 - a) - 1;
          const double Tj = std::cos(j * std::acos(std::clamp(x, -1.0, 1.0)));
          for (int q = 0; q < G.n_theta; ++q)
            chi(i, q) += Tj * (c1 * std::cos(k * G.theta(q)) + c2 * std::sin(k * G.theta(q)));
        }
      }
    const PolarForm dchi = G.d(chi);
    const double pair = G.integrate(Aa.s.cwiseProduct(dchi.s) + Aa.t.cwiseProduct(dchi.t));
    const double norm = std::sqrt(energy(G, A, C.alpha12) * energy(G, A, dchi));
    C.weak_div = std::max(C.weak_div, std::abs(pair) / (1 + norm));
  }
  return C;
}

ConformalCoordinates conformal_coordinates(const PolarGrid& G, const CoulombFrame& cf, double r_check,
                                           double kappa_tol) {
  ConformalCoordinates K;
  K.r_check = r_check;
  const PolarField em = (-cf.mu).array().exp().matrix();
  const PolarForm b1 = scaled(em, cf.alpha.w1), b2 = scaled(em, cf.alpha.w2);
  K.closedness = std::max(sup(G.curl(b1)) / std::max(sup(b1), 1e-300), sup(G.curl(b2)) / std::max(sup(b2), 1e-300));
  K.phi1 = G.integrate_form(b1, &K.kappa1);
  K.phi2 = G.integrate_form(b2, &K.kappa2);
  K.kappa[0] = K.kappa1(G.n_s);
  K.kappa[1] = K.kappa2(G.n_s);
  K.kappa_spread = std::max((K.kappa1.array() - K.kappa[0]).abs().maxCoeff(),
                            (K.kappa2.array() - K.kappa[1]).abs().maxCoeff());
  const PolarForm d1 = G.d(K.phi1), d2 = G.d(K.phi2);
  for (int i = 0; i < G.rows(); ++i)
    for (int k = 0; k < G.n_theta; ++k) {
      Mat<2> W, Dp;
      W << cf.alpha.w1.s(i, k), cf.alpha.w1.t(i, k), cf.alpha.w2.s(i, k), cf.alpha.w2.t(i, k);
      Dp << d1.s(i, k), d1.t(i, k), d2.s(i, k), d2.t(i, k);
      const Mat<2> E = W.inverse() * std::exp(cf.mu(i, k));
      Mat<2> expect = Mat<2>::Identity();
      for (int j = 0; j < 2; ++j) {
        expect(0, j) -= K.kappa[0] * E(1, j);
        expect(1, j) -= K.kappa[1] * E(1, j);
      }
      K.frame_check = std::max(K.frame_check, (Dp * E - expect).cwiseAbs().maxCoeff());
      if (G.r(i) >= r_check) {
        const Mat<2> h = W.transpose() * W;
        const Mat<2> rec = std::exp(2 * cf.mu(i, k)) * Dp.transpose() * Dp;
        K.metric_error = std::max(K.metric_error, (rec - h).norm() / h.norm());
      }
    }
  const double mi = std::round(cf.m);
  K.branched = std::abs(cf.m - mi) < 1e-6 && mi != 0;
  PolarField X1 = K.phi1, X2 = K.phi2;
  if (K.branched) {
    // d Phi = z^{-m} d zeta, z^{-m} = e^{-m s} (cos m theta - i sin m theta)
    PolarField zr(G.rows(), G.n_theta), zi(G.rows(), G.n_theta);
    for (int i = 0; i < G.rows(); ++i)
      for (int k = 0; k < G.n_theta; ++k) {
        const double e = std::exp(-mi * G.s(i));
        zr(i, k) = e * std::cos(mi * G.theta(k));
        zi(i, k) = -e * std::sin(mi * G.theta(k));
      }
    const PolarForm zr_{b1.s, b1.t - PolarField::Constant(G.rows(), G.n_theta, K.kappa[0])};
    const PolarForm zi_{b2.s, b2.t - PolarField::Constant(G.rows(), G.n_theta, K.kappa[1])};
    const PolarForm P1 = scaled(zr, zr_) - scaled(zi, zi_), P2 = scaled(zr, zi_) + scaled(zi, zr_);
    Eigen::VectorXd m1, m2;
    K.Phi1 = G.integrate_form(P1, &m1);
    K.Phi2 = G.integrate_form(P2, &m2);
    K.branched_circulation = 2 * M_PI * std::max(m1.cwiseAbs().maxCoeff(), m2.cwiseAbs().maxCoeff());
    X1 = K.Phi1;
    X2 = K.Phi2;
  }
  // diameters of ring images, outer to inner
  for (int i = G.n_s; i >= 0; --i) {
    double dmax = 0;
    for (int k = 0; k < G.n_theta; ++k)
      for (int l = k + 1; l < G.n_theta; ++l)
        dmax = std::max(dmax, std::hypot(X1(i, k) - X1(i, l), X2(i, k) - X2(i, l)));
    K.ring_radii.push_back(G.r(i));
    K.diameters.push_back(dmax);
  }
  {
    // diameters ~ r^p near the puncture; shrinking when p is clearly positive
    std::vector<double> rr, dd;
    for (size_t i = 0; i < K.ring_radii.size(); ++i)
      if (K.ring_radii[i] <= 0.05) {
        rr.push_back(K.ring_radii[i]);
        dd.push_back(K.diameters[i]);
      }
    K.shrinking = K.diameters.back() < 1e-8 || (rr.size() >= 2 && loglog_slope(rr, dd, 1 << 20) >= 0.05);
  }
  if (std::abs(cf.m - mi) < 1e-6) {
    const int n = G.rows() * G.n_theta;
    Eigen::Matrix2Xd src(2, n), dst(2, n);
    const double p = 1 - mi;
    for (int i = 0; i < G.rows(); ++i)
      for (int k = 0; k < G.n_theta; ++k) {
        const int q = i * G.n_theta + k;
        const double rp = std::pow(G.r(i), p);
        src.col(q) << rp * std::cos(p * G.theta(k)), rp * std::sin(p * G.theta(k));
        dst.col(q) << X1(i, k), X2(i, k);
      }
    const Eigen::Matrix3d T = Eigen::umeyama(src, dst, false);
    K.model_rotation = T.topLeftCorner<2, 2>();
    K.model_shift = T.topRightCorner<2, 1>();
    const Eigen::Matrix2Xd fit = (K.model_rotation * src).colwise() + K.model_shift;
    K.model_error = (fit - dst).colwise().norm().maxCoeff();
  } else {
    K.model_error = std::numeric_limits<double>::quiet_NaN();
  }
  (void)kappa_tol;
  return K;
}

LiouvilleResult liouville_solve(const PolarGrid& G, const PolarField& K_regular, double m) {
  LiouvilleResult L;
  L.m = m;
  const PolarField r2 = G.radius().cwiseAbs2();
  const PolarField f = -r2.cwiseProduct(K_regular);
  // mode 0 at the puncture: r u_r = -(1/2pi) int_{D_r} K ~ -K(0) r^2 / 2
  const double flux0 = -0.5 * G.r_in * G.r_in * K_regular.row(0).mean();
  EndCondition inner{EndKind::regular, Eigen::VectorXd::Constant(G.n_theta, flux0)};
  EllipticReport rep;
  const PolarForm zero{G.zeros(), G.zeros()};
  L.u = solve_elliptic(G, identity_tensor(G), zero, f, inner, {EndKind::dirichlet, {}}, &rep);
  L.solver_residual = rep.residual;
  return L;
}

// ---------------------------------------------------------------------------
// Isoperimetric control

double measure_isoperimetric(const MetricField<2>& g, const Vec<2>& x) {
  const double r = x.norm();
  if (!(r > 0)) throw std::invalid_argument("measure_isoperimetric: x must avoid the puncture");
  Eigen::VectorXd gx, gw;
  gauss_legendre<double>(6, 0.0, 1.0, gx, gw);
  const int nu = 24, nl = 48;
  double best = 1 / (4 * M_PI);
  for (double size : {r / 4, r / 12})
    for (int o = 0; o < 4; ++o)
      for (double aspect : {1.0, 1.5, 2.5, 4.0}) {
        const double phi = o * M_PI / 4;
        const Vec<2> e1(std::cos(phi), std::sin(phi)), e2(-std::sin(phi), std::cos(phi));
        const double a = size, b = size / aspect;
        double vol = 0, len = 0;
        for (int q = 0; q < gx.size(); ++q)
          for (int j = 0; j < nu; ++j) {
            const double u = 2 * M_PI * j / nu, t = gx(q);
            const Mat<2> m = g.value(x + t * (a * std::cos(u) * e1 + b * std::sin(u) * e2));
            vol += std::sqrt(m.determinant()) * a * b * t * gw(q) * 2 * M_PI / nu;
          }
        for (int j = 0; j < nl; ++j) {
          const double u = 2 * M_PI * j / nl;
          const Vec<2> p = x + a * std::cos(u) * e1 + b * std::sin(u) * e2;
          const Vec<2> v = -a * std::sin(u) * e1 + b * std::cos(u) * e2;
          len += std::sqrt(v.dot(g.value(p) * v)) * 2 * M_PI / nl;
        }
        best = std::max(best, vol / (len * len));
      }
  return best;
}

EigenratioReport eigenratio_bound(const MetricField<2>& g, const std::function<double(const Vec<2>&)>& Lambda,
                                  double r_min, int n_angles) {
  EigenratioReport R;
  double total = 0;
  for (double r : dyadic_radii(0.75, r_min, 12)) {
    const double ring_area = M_PI * r * r * (2.0 - 0.5);  // annulus r/sqrt2 .. r sqrt2
    double part = 0;
    for (int k = 0; k < n_angles; ++k) {
      const double t = 2 * M_PI * (k + 0.5) / n_angles;
      const Vec<2> x(r * std::cos(t), r * std::sin(t));
      const Eigen::SelfAdjointEigenSolver<Mat<2>> es(g.value(x));
      const double ratio = es.eigenvalues()(1) / es.eigenvalues()(0);
      const double L = Lambda(x);
      const double bound = std::pow(4 * M_PI * L, 4);
      const bool ok = ratio <= bound * (1 + 1e-12);
      R.nodes.push_back(x);
      R.ratio.push_back(ratio);
      R.Lambda.push_back(L);
      R.required_Lambda.push_back(std::pow(ratio, 0.25) / (4 * M_PI));
      R.holds.push_back(ok);
      R.all_hold = R.all_hold && ok;
      const double q = std::pow(4 * M_PI * L, 2) - 1;
      part += q * q / (r * r) * ring_area / n_angles;
    }
    total += part;
    R.ring_radii.push_back(r);
    R.integral.push_back(total);
  }
  const int n = static_cast<int>(R.integral.size());
  if (n >= 3) {
    const double d1 = R.integral[n - 1] - R.integral[n - 2], d0 = R.integral[n - 2] - R.integral[n - 3];
    R.integral_finite = d1 <= 0.75 * d0 + 1e-12 * (1 + R.integral.back());
  }
  return R;
}

json EigenratioReport::to_json() const {
  json j;
  json nodes_j = json::array();
  for (size_t i = 0; i < nodes.size(); ++i)
    nodes_j.push_back({{"x", nodes[i](0)},
                       {"y", nodes[i](1)},
                       {"ratio", ratio[i]},
                       {"Lambda", Lambda[i]},
                       {"required_Lambda", required_Lambda[i]},
                       {"holds", static_cast<bool>(holds[i])}});
  j["nodes"] = nodes_j;
  j["all_hold"] = all_hold;
  j["ring_radii"] = vec_json(ring_radii);
  j["integral"] = vec_json(integral);
  j["integral_finite"] = integral_finite;
  return j;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

// Lorentz L^{2,inf} proxy of |w12| on D \ D_r for each r of the sequence.
std::vector<double> lorentz_sequence(const OneFormFn& w12, const std::vector<double>& radii) {
  Eigen::VectorXd gx, gw;
  gauss_legendre<double>(12, 0.0, 1.0, gx, gw);
  const int na = 128;
  std::vector<std::pair<double, double>> vals;  // |w12|, area
  std::vector<double> out;
  double outer = 1.0;
  for (double r : radii) {
    const double a = std::log(r), b = std::log(outer);
    for (int q = 0; q < gx.size(); ++q) {
      const double rr = std::exp(a + (b - a) * gx(q));
      for (int j = 0; j < na; ++j) {
        const double t = 2 * M_PI * j / na;
        const double v = w12(Vec<2>(rr * std::cos(t), rr * std::sin(t))).norm();
        vals.emplace_back(v, rr * rr * (b - a) * gw(q) * 2 * M_PI / na);
      }
    }
    auto sorted = vals;
    std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    double area = 0, best = 0;
    for (const auto& [v, w] : sorted) {
      area += w;
      best = std::max(best, v * std::sqrt(area));
    }
    out.push_back(best);
    outer = r;
  }
  return out;
}

// vol_g(D_2r \ D_r) for r = 0.25 * 2^{-k}
void volume_growth(const Coframe2D& c, double r_min, std::vector<double>& r, std::vector<double>& vol) {
  Eigen::VectorXd gx, gw;
  gauss_legendre<double>(16, 0.0, 1.0, gx, gw);
  const int na = 128;
  for (double x = 0.25; x >= r_min && r.size() < 8; x /= 2) {
    const double a = std::log(x), b = std::log(2 * x);
    double v = 0;
    for (int q = 0; q < gx.size(); ++q) {
      const double rr = std::exp(a + (b - a) * gx(q));
      for (int j = 0; j < na; ++j) {
        const double t = 2 * M_PI * j / na;
        v += std::abs(c.value(Vec<2>(rr * std::cos(t), rr * std::sin(t))).determinant()) * rr * rr * (b - a) *
             gw(q) * 2 * M_PI / na;
      }
    }
    r.push_back(x);
    vol.push_back(v);
  }
}

}  // namespace

Frames2DReport frames2d_pipeline(const Coframe2D& c, const Frames2DOptions& o) {
  Frames2DReport R;
  R.name = c.name;
  const double r_floor = std::max(c.r_min, o.r_in);
  const std::vector<double> radii = o.radii.empty() ? dyadic_radii(0.5, r_floor, 10) : o.radii;
  R.sing = circulation(c, radii, o.samples, o.tol_circ);
  for (const auto& f : R.sing.flags) R.flags.push_back(f);
  {
    const Chart ch = Chart::polar(std::max(radii.back(), 1e-3), 1.0, 24, 32);
    const ConnectionForm cf = connection_form(c, ch);
    R.structure_residual = cf.max_structure;
    R.duality_residual = cf.max_duality;
  }
  R.gauss_bonnet = gauss_bonnet_disk(c, o.samples);

  // hypotheses (1)-(3) from closed forms
  const OneFormFn w12 = connection_fn(c);
  const std::vector<double> lor = lorentz_sequence(w12, radii);
  const size_t mid = lor.size() / 2;
  const bool lor_bounded = lor.back() <= 1.25 * lor[mid] + 1e-12;
  R.hyp[0].holds = R.sing.degree == 0 && lor_bounded;
  R.hyp[0].evidence = {{"degree", R.sing.degree}, {"lorentz_proxy", vec_json(lor)}, {"lorentz_bounded", lor_bounded}};
  const auto& rem = R.sing.remainder_L2;
  const bool rem_bounded = rem.back() <= 1.1 * rem[rem.size() / 2] + 1e-10;
  R.hyp[1].holds = R.sing.convergent && !R.sing.divergent && rem_bounded;
  R.hyp[1].evidence = {{"m", R.sing.m},
                       {"convergent", R.sing.convergent},
                       {"divergent", R.sing.divergent},
                       {"remainder_L2", vec_json(rem)},
                       {"remainder_bounded", rem_bounded}};
  std::vector<double> vr, vv;
  volume_growth(c, r_floor, vr, vv);
  R.growth_exponent = loglog_slope(vr, vv, 4);
  const double need = 1 - 2 * R.sing.m + o.growth_margin;
  R.hyp[2].holds = R.growth_exponent >= need;
  R.hyp[2].evidence = {{"radii", vec_json(vr)},
                       {"volume", vec_json(vv)},
                       {"exponent", R.growth_exponent},
                       {"required_exponent", need}};
  const MetricField<2> g = c.metric();
  const EigenratioReport er = eigenratio_bound(
      g, [&](const Vec<2>& x) { return measure_isoperimetric(g, x); }, std::max(1e-2, 2 * c.r_min));
  R.hyp[3].holds = er.all_hold && er.integral_finite;
  R.hyp[3].evidence = er.to_json();

  if (R.sing.divergent || !R.sing.convergent) {
    R.flags.push_back(R.sing.divergent ? "pipeline stopped: circle masses of the connection diverge"
                                        : "pipeline stopped: circulations do not converge");
    return R;
  }
  if (c.r_min > o.r_in) {
    R.flags.push_back("pipeline stopped: coframe undefined below r = " + fmt(c.r_min));
    return R;
  }
  R.pipeline_run = true;
  R.grid = PolarGrid::make(o.r_in, o.n_s, o.n_theta);
  const PolarGrid& G = R.grid;
  // Unwind the frame first: rotating by deg * theta (single valued on the frame) gives a
  // degree-0 frame with connection w12 - deg dtheta. The connection is sampled from the
  // closed form; differentiating the sampled coframe would amplify round-off where it degenerates.
  const int deg = R.sing.degree;
  PolarField theta = G.zeros();
  for (int k = 0; k < G.n_theta; ++k) theta.col(k).setConstant(deg * G.theta(k));
  const PolarCoframe omega = rotate(sample_coframe(G, c), theta, G.zeros());
  PolarForm omega12 = G.sample_form(w12);
  omega12.t.array() -= deg;
  R.hodge = hodge_decompose(G, omega12);
  double m = R.sing.m;
  if (std::abs(m - std::round(m)) < 1e-6) m = std::round(m);
  R.gauge = gauge_rotate(G, omega, omega12, R.hodge.a, m);
  R.coulomb = coulomb_minimize(G, R.gauge.w, m, o.seed);
  R.coords = conformal_coordinates(G, R.coulomb, o.r_check, o.kappa_tol);
  // metric recovery against the closed form: r^{2m} g = e^{2 mu} |dphi|^2
  {
    const PolarForm d1 = G.d(R.coords.phi1), d2 = G.d(R.coords.phi2);
    double err = 0;
    for (int i = 0; i < G.rows(); ++i) {
      if (G.r(i) < o.r_check) continue;
      for (int k = 0; k < G.n_theta; ++k) {
        const Mat<2> gx = std::pow(G.r(i), 2 * m) * g.value(G.point(i, k));
        const Vec<2> p1 = G.cartesian(d1, i, k), p2 = G.cartesian(d2, i, k);
        const Mat<2> rec = std::exp(2 * R.coulomb.mu(i, k)) * (p1 * p1.transpose() + p2 * p2.transpose());
        err = std::max(err, (rec - gx).norm() / gx.norm());
      }
    }
    R.coords.metric_error = std::max(R.coords.metric_error, err);
  }
  const double kap = std::max(std::abs(R.coords.kappa[0]), std::abs(R.coords.kappa[1]));
  R.obstructed = kap > o.kappa_tol || !R.coords.shrinking || !R.hyp[2].holds;
  if (kap > o.kappa_tol) R.flags.push_back("obstructed: residual circulation kappa = " + fmt(kap));
  if (!R.coords.shrinking)
    R.flags.push_back("obstructed: image of the puncture has diameter " + fmt(R.coords.diameters.back()));
  if (!R.hyp[2].holds) R.flags.push_back("obstructed: volume growth exponent " + fmt(R.growth_exponent));

  // Liouville: -Delta u = K_g sqrt(det g) (regular part), compared with the direct
  // factor when g is conformal to the flat metric
  PolarField K(G.rows(), G.n_theta), lam(G.rows(), G.n_theta);
  bool conformal = true;
  for (int i = 0; i < G.rows(); ++i)
    for (int k = 0; k < G.n_theta; ++k) {
      const auto pt = curvature_at<2>(g, G.point(i, k), CurvatureLevel::riemann);
      K(i, k) = pt.gauss_curvature() * pt.sqrt_det;
      const Mat<2>& gv = pt.g;
      conformal = conformal && std::abs(gv(0, 1)) + std::abs(gv(0, 0) - gv(1, 1)) <= 1e-10 * gv.norm();
      lam(i, k) = 0.5 * std::log(gv(0, 0)) + m * G.s(i);
    }
  R.liouville = liouville_solve(G, K, m);
  if (conformal) {
    const PolarField h = lam - R.liouville.u;
    const PolarField lap = G.d_s(G.d_s(h)) + G.d_theta(G.d_theta(h));
    R.liouville_harmonic_residual = sup(lap.middleRows(1, G.n_s - 1)) / (1 + sup(h));
  } else {
    R.liouville_harmonic_residual = std::numeric_limits<double>::quiet_NaN();
    R.flags.push_back("metric not conformally flat in these coordinates: Liouville comparison skipped");
  }
  return R;
}

json Frames2DReport::to_json() const {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["coframe"] = name;
  j["singularity"] = sing.to_json();
  j["structure_residual"] = structure_residual;
  j["duality_residual"] = duality_residual;
  j["gauss_bonnet_total"] = gauss_bonnet;
  j["gauss_bonnet_expected"] = 2 * M_PI;
  j["pipeline_run"] = pipeline_run;
  if (pipeline_run) {
    j["grid"] = {{"r_in", grid.r_in}, {"n_s", grid.n_s}, {"n_theta", grid.n_theta}};
    j["hodge"] = {{"residual", hodge.residual},
                  {"dh", hodge.dh},
                  {"dstar_h", hodge.dstar_h},
                  {"solver_residual", hodge.solver_residual},
                  {"harmonic_circulation", grid.circulation(hodge.h)(grid.n_s)}};
    j["gauge_rotation"] = {{"m", coulomb.m},
                           {"metric_residual", gauge.metric_residual},
                           {"connection_residual", gauge.connection_residual},
                           {"w12_L2", gauge.w12_L2}};
    j["coulomb"] = {{"energy_before", coulomb.energy_before},
                    {"energy_after", coulomb.energy_after},
                    {"connection_residual", coulomb.connection_residual},
                    {"div_residual", coulomb.div_residual},
                    {"boundary_trace", coulomb.boundary_trace},
                    {"mu_residual", coulomb.mu_residual},
                    {"weak_div", coulomb.weak_div},
                    {"solver_residual", coulomb.solver_residual},
                    {"mu_min", coulomb.mu.minCoeff()},
                    {"mu_max", coulomb.mu.maxCoeff()}};
    j["coordinates"] = {{"kappa", {coords.kappa[0], coords.kappa[1]}},
                        {"kappa_spread", coords.kappa_spread},
                        {"closedness", coords.closedness},
                        {"frame_check", coords.frame_check},
                        {"metric_error", coords.metric_error},
                        {"r_check", coords.r_check},
                        {"diameter_outer", coords.diameters.front()},
                        {"diameter_inner", coords.diameters.back()},
                        {"shrinking", coords.shrinking},
                        {"branched", coords.branched},
                        {"branched_circulation", coords.branched_circulation},
                        {"model_exponent", 1 - std::round(coulomb.m)},
                        {"model_error", num(coords.model_error)}};
    j["liouville"] = {{"solver_residual", liouville.solver_residual},
                      {"harmonic_residual", num(liouville_harmonic_residual)},
                      {"u_min", liouville.u.minCoeff()},
                      {"u_max", liouville.u.maxCoeff()}};
  }
  j["volume_growth_exponent"] = growth_exponent;
  json h;
  for (int k = 0; k < 4; ++k) h["hypothesis_" + std::to_string(k + 1)] = {{"holds", hyp[k].holds}, {"evidence", hyp[k].evidence}};
  j["hypotheses"] = h;
  j["obstructed"] = obstructed;
  j["flags"] = flags;
  return j;
}

std::string Frames2DReport::fields_csv() const {
  if (!pipeline_run) return table_csv({"r", "theta"}, {});
  std::vector<std::string> head = {"r", "theta", "a", "b", "mu", "phi1", "phi2"};
  if (coords.branched) {
    head.push_back("Phi1");
    head.push_back("Phi2");
  }
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < grid.rows(); ++i)
    for (int k = 0; k < grid.n_theta; ++k) {
      std::vector<double> row = {grid.r(i),        grid.theta(k),       hodge.a(i, k),      hodge.b(i, k),
                                 coulomb.mu(i, k), coords.phi1(i, k), coords.phi2(i, k)};
      if (coords.branched) {
        row.push_back(coords.Phi1(i, k));
        row.push_back(coords.Phi2(i, k));
      }
      rows.push_back(row);
    }
  return table_csv(head, rows);
}

}  // namespace cgeom
