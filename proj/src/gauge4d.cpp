#include "cgeom/gauge4d.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include "cgeom/rng.hpp"
#include "cgeom/spectral.hpp"
#include "cgeom/verify.hpp"

namespace cgeom {

namespace {

// Quad precision: the EL residual differentiates the solution four times on
// Chebyshev nodes, which amplifies double round-off past the tolerance.
using Q = boost::multiprecision::float128;
using VQ = VecX<Q>;
using MQ = MatX<Q>;

constexpr double kTwoPi2 = 2.0 * M_PI * M_PI;  // |S^3|

Vec<4> axis_point(double r) { return Vec<4>(r, 0, 0, 0); }

// Reduced energy for O(4)-invariant g: Delta_g u = a u'' + b u', |du|^2 = a u'^2,
// dvol = rho dr with rho = |S^3| r^3 sqrt(det g).
// The energy is integrated on a Gauss grid (suffix q) fine enough for (J^u)^2 of a
// degree-N polynomial: on the CGL nodes alone the quadrature aliases against the
// high modes and the discrete critical point only solves the EL equation weakly.
struct RadialData {
  VQ r, a, b, J, rho, w;
  MQ D1, D2;
  VQ aq, bq, Jq, wq;  // wq includes rho
  int kept = 0;       // highest Chebyshev mode of the coefficients above round-off
  MQ P, P1, P2;       // node values -> u, u', u'' on the Gauss grid
};

struct Coefficients {
  double a, b, J, rho;
};

Coefficients radial_coefficients(const MetricField<4>& g, double r) {
  const auto p = curvature_from_jets<4>(g.jets(axis_point(r), 2), CurvatureLevel::riemann);
  // x = r e_0: x_i x_j / r^2 picks (0,0); Gamma^k_ij x_k / r picks k = 0
  double gam = 0;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) gam += p.ginv(i, k) * p.gamma[0](i, k);
  return {p.ginv(0, 0), (p.ginv.trace() - p.ginv(0, 0)) / r - gam, p.J, kTwoPi2 * r * r * r * p.sqrt_det};
}

// Coefficients come from double-precision jets; their node-to-node round-off is
// high-frequency and four Chebyshev derivatives would amplify it by ~N^8 at the
// ends. Truncate the Chebyshev series at the double noise floor.
VQ chebyshev_filter(const VQ& v, int* kept = nullptr) {
  VQ c = cheb_coefficients<Q>(v);
  const Q cap = c.cwiseAbs().maxCoeff();
  const Q floor = Q(64) * Q(std::numeric_limits<double>::epsilon()) * cap;
  int last = 0;
  for (int k = 0; k < c.size(); ++k)
    if (abs(c(k)) > floor) last = k;
  for (int k = last + 1; k < c.size(); ++k) c(k) = 0;
  if (kept) *kept = std::max(*kept, last);
  const int N = static_cast<int>(v.size()) - 1;
  VQ out(N + 1);
  for (int j = 0; j <= N; ++j) out(j) = cheb_eval<Q>(c, Q(-1), Q(1), Q(-cos(pi_v<Q>() * Q(j) / Q(N))));
  return out;
}

RadialData radial_setup(const MetricField<4>& g, double r_in, double r_out, int N) {
  RadialData s;
  s.r = cheb_nodes<Q>(N, Q(r_in), Q(r_out));
  s.D1 = cheb_diff<Q>(N, Q(r_in), Q(r_out));
  s.D2 = s.D1 * s.D1;
  s.w = clenshaw_curtis<Q>(N, Q(r_in), Q(r_out));
  s.a.resize(N + 1);
  s.b.resize(N + 1);
  s.J.resize(N + 1);
  s.rho.resize(N + 1);
  for (int j = 0; j <= N; ++j) {
    const auto c = radial_coefficients(g, static_cast<double>(s.r(j)));
    s.a(j) = c.a;
    s.b(j) = c.b;
    s.J(j) = c.J;
    s.rho(j) = c.rho;
  }
  s.a = chebyshev_filter(s.a, &s.kept);
  s.b = chebyshev_filter(s.b, &s.kept);
  s.J = chebyshev_filter(s.J, &s.kept);
  s.rho = chebyshev_filter(s.rho, &s.kept);
  // Gauss-grid coefficients from the filtered series, not fresh jets: the
  // energy must see the same smooth data the EL residual differentiates.
  VQ xq;
  gauss_legendre<Q>(2 * N + 8, Q(r_in), Q(r_out), xq, s.wq);
  s.P = cheb_interp_matrix<Q>(s.r, xq);
  s.aq = s.P * s.a;
  s.bq = s.P * s.b;
  s.Jq = s.P * s.J;
  s.wq = s.wq.cwiseProduct(s.P * s.rho);
  s.P1 = s.P * s.D1;
  s.P2 = s.P * s.D2;
  return s;
}

struct RadialState {
  VQ U, U1, U2, R;  // nodes
  VQ U1q, Rq;       // Gauss grid
  Q E;
};

RadialState radial_eval(const RadialData& s, const VQ& U) {
  RadialState st;
  st.U = U;
  st.U1 = s.D1 * U;
  st.U2 = s.D2 * U;
  st.R = s.J - s.a.cwiseProduct(st.U2) - s.b.cwiseProduct(st.U1) - s.a.cwiseProduct(st.U1.cwiseProduct(st.U1));
  st.U1q = s.P1 * U;
  st.Rq = s.Jq - s.aq.cwiseProduct(s.P2 * U) - s.bq.cwiseProduct(st.U1q) - s.aq.cwiseProduct(st.U1q.cwiseProduct(st.U1q));
  st.E = Q(0.5) * s.wq.dot(st.Rq.cwiseProduct(st.Rq));
  return st;
}

// dR/dU at the nodes (square) or on the Gauss grid
MQ radial_jacobian(const RadialData& s, const RadialState& st) {
  const int n = static_cast<int>(s.r.size());
  MQ M(n, n);
  const VQ c1 = s.b + Q(2) * s.a.cwiseProduct(st.U1);
  for (int i = 0; i < n; ++i) M.row(i) = -s.a(i) * s.D2.row(i) - c1(i) * s.D1.row(i);
  return M;
}

MQ energy_jacobian(const RadialData& s, const RadialState& st) {
  const VQ c1 = s.bq + Q(2) * s.aq.cwiseProduct(st.U1q);
  return -(s.aq.asDiagonal() * s.P2) - c1.asDiagonal() * s.P1;
}

// dE/dU
VQ energy_gradient(const RadialData& s, const RadialState& st) {
  return energy_jacobian(s, st).transpose() * s.wq.cwiseProduct(st.Rq);
}

// Basis of {U : U = U' = 0 at both ends} (orthonormal columns).
MQ clamped_basis(const RadialData& s) {
  const int n = static_cast<int>(s.r.size());
  MQ C = MQ::Zero(n, 4);
  C(0, 0) = 1;
  C(n - 1, 1) = 1;
  C.col(2) = s.D1.row(0).transpose();
  C.col(3) = s.D1.row(n - 1).transpose();
  Eigen::HouseholderQR<MQ> qr(C);
  MQ Qf = qr.householderQ() * MQ::Identity(n, n);
  return Qf.rightCols(n - 4);
}

struct Flux {
  VQ F, el, flux, e4u;  // F = J^{g_u}; el = Delta_{g_u} F; flux = div_g(e^{2u} grad F)
};

Flux radial_flux(const RadialData& s, const RadialState& st) {
  Flux f;
  const int n = static_cast<int>(s.r.size());
  VQ em2(n), e2(n);
  for (int j = 0; j < n; ++j) {
    em2(j) = exp(Q(-2) * st.U(j));
    e2(j) = exp(Q(2) * st.U(j));
  }
  f.F = em2.cwiseProduct(st.R);
  const VQ F1 = s.D1 * f.F, F2 = s.D2 * f.F;
  f.el = em2.cwiseProduct(s.a.cwiseProduct(F2) + s.b.cwiseProduct(F1) +
                          Q(2) * s.a.cwiseProduct(st.U1.cwiseProduct(F1)));
  const VQ flow = s.rho.cwiseProduct(s.a).cwiseProduct(e2).cwiseProduct(F1);
  f.flux = (s.D1 * flow).cwiseQuotient(s.rho);
  f.e4u = e2.cwiseProduct(e2);
  return f;
}

double to_d(const Q& q) { return static_cast<double>(q); }

// Newton on the strong form Delta_{g_u} J^{g_u} = 0 collocated at nodes 2..N-2,
// with u = u' = 0 at both ends. Started from the discrete minimizer; returns the
// number of Newton steps, or -1 if the iteration did not settle.
int strong_polish(const RadialData& s, RadialState& st) {
  const int n = static_cast<int>(s.r.size());
  for (int it = 0; it < 30; ++it) {
    const Flux fl = radial_flux(s, st);
    VQ em2(n);
    for (int j = 0; j < n; ++j) em2(j) = exp(Q(-2) * st.U(j));
    const VQ F1 = s.D1 * fl.F;
    const MQ M = radial_jacobian(s, st);
    // dF = e^{-2u} (M - 2 R) dU
    MQ dF = M;
    for (int j = 0; j < n; ++j) {
      dF.row(j) *= em2(j);
      dF(j, j) -= Q(2) * fl.F(j);
    }
    const MQ dF1 = s.D1 * dF, dF2 = s.D2 * dF;
    MQ A(n, n);
    VQ G(n);
    for (int j = 0; j < n; ++j) {
      A.row(j) = em2(j) * (s.a(j) * dF2.row(j) + (s.b(j) + Q(2) * s.a(j) * st.U1(j)) * dF1.row(j) +
                           Q(2) * s.a(j) * F1(j) * s.D1.row(j));
      A(j, j) -= Q(2) * fl.el(j);
      G(j) = fl.el(j);
    }
    A.row(0).setZero();
    A(0, 0) = 1;
    G(0) = st.U(0);
    A.row(n - 1).setZero();
    A(n - 1, n - 1) = 1;
    G(n - 1) = st.U(n - 1);
    A.row(1) = s.D1.row(0);
    G(1) = st.U1(0);
    A.row(n - 2) = s.D1.row(n - 1);
    G(n - 2) = st.U1(n - 1);
    const VQ dU = A.partialPivLu().solve(G);
    st = radial_eval(s, st.U - dU);
    const Q step = dU.cwiseAbs().maxCoeff();
    if (!(step == step)) return -1;
    if (step < Q(1e-30)) return it + 1;
  }
  return -1;
}

SobolevConstants default_constants(std::uint64_t seed) {
  static std::mutex m;
  static std::map<std::uint64_t, SobolevConstants> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(seed);
  if (it != cache.end()) return it->second;
  auto c = estimate_constants(catalog4("flat4", {}), 200, seed);
  cache.emplace(seed, c);
  return c;
}

void fill_constants(const GaugeProblem& p, GaugeReport& rep) {
  if (p.gamma_S > 0 && p.gamma_L > 0) {
    rep.gamma_S = p.gamma_S;
    rep.gamma_L = p.gamma_L;
    return;
  }
  const auto c = default_constants(p.seed);
  rep.gamma_S = p.gamma_S > 0 ? p.gamma_S : c.gamma_S;
  rep.gamma_L = p.gamma_L > 0 ? p.gamma_L : c.gamma_L;
}

// Radial integrals of the base metric in double (Gauss–Legendre).
struct BaseIntegrals {
  double vol_ball = 0, vol_inner = 0, E_ball = 0;
};

BaseIntegrals base_integrals(const MetricField<4>& g, double r_in, double r_out) {
  BaseIntegrals b;
  const double lo = std::max(g.r_min(), 1e-9);
  auto add = [&](double a, double c, double& vol, double& E) {
    if (c <= a) return;
    Eigen::VectorXd x, w;
    gauss_legendre<double>(96, a, c, x, w);
    for (int i = 0; i < x.size(); ++i) {
      const auto pt = curvature_from_jets<4>(g.jets(axis_point(x(i)), 2), CurvatureLevel::riemann);
      const double dv = kTwoPi2 * std::pow(x(i), 3) * pt.sqrt_det * w(i);
      vol += dv;
      E += 0.5 * pt.J * pt.J * dv;
    }
  };
  double vol_o = 0, E_o = 0;
  add(lo, r_in, b.vol_inner, b.E_ball);
  add(r_in, r_out, vol_o, E_o);
  b.vol_ball = b.vol_inner + vol_o;
  b.E_ball += E_o;
  return b;
}

void push(GaugeReport& rep, std::string name, double lhs, double rhs, bool strict, bool asserted,
          std::string note = {}) {
  LedgerEntry e;
  e.name = std::move(name);
  e.lhs = lhs;
  e.rhs = rhs;
  e.holds = strict ? lhs < rhs : lhs <= rhs * (1 + 1e-12);
  e.asserted = asserted;
  e.note = std::move(note);
  rep.ledger.push_back(e);
}

// Radial bumps supported in (r_in, r_out) for the Sobolev check of g_u.
struct RadialBump {
  double c, s;
  double f(double r) const {
    const double t = (r - c) / s;
    return std::abs(t) >= 1 ? 0 : std::pow(1 - t * t, 4);
  }
  double df(double r) const {
    const double t = (r - c) / s;
    return std::abs(t) >= 1 ? 0 : -8 * t * std::pow(1 - t * t, 3) / s;
  }
};

void radial_ledger(const GaugeProblem& p, const RadialData& s, const RadialState& st, GaugeReport& rep) {
  const double gS = rep.gamma_S, gL = rep.gamma_L;
  const BaseIntegrals base = base_integrals(p.g, p.r_in, p.r_out);
  const double E0 = rep.E0;
  rep.above_threshold = !(base.E_ball < 1.0 / (std::pow(4.0, 6) * std::pow(gL, 4)));
  if (rep.above_threshold) rep.flags.push_back("E_0(0) above the smallness threshold 1/(4^6 gamma_L^4)");
  const bool small_S = base.E_ball <= 9.0 / (std::pow(4.0, 5) * gS * gS);
  const bool small_SL = base.E_ball <= std::pow(3.0 / (8.0 * gL), 2) / (4.0 * gS * gS);

  push(rep, "est_du.L4", rep.du_L4, 8.0 / 3.0 * gL * std::sqrt(E0), true, !rep.above_threshold,
       "||du||_{L4(g)} < (8/3) gamma_L E_r(0)^{1/2}");
  push(rep, "est_du.lap", rep.lap_L2, rep.du_L4 * rep.du_L4 + 2 * std::sqrt(E0), false, !rep.above_threshold,
       "||Delta_g u||_{L2} <= ||du||_{L4}^2 + 2 E_r(0)^{1/2}");

  // e^{-u} on the ball with u = 0 on B_r
  const int n = static_cast<int>(s.r.size());
  double e4 = base.vol_inner, de2 = 0, vol_gu = base.vol_inner;
  for (int j = 0; j < n; ++j) {
    const double u = to_d(st.U(j)), u1 = to_d(st.U1(j)), a = to_d(s.a(j));
    const double dv = to_d(s.w(j) * s.rho(j));
    e4 += std::exp(-4 * u) * dv;
    de2 += std::exp(-2 * u) * a * u1 * u1 * dv;
    vol_gu += std::exp(4 * u) * dv;
  }
  const double volB = base.vol_ball;
  push(rep, "reg_eu.L4", std::sqrt(e4), 1 / (4 * gL * gL) + 8 * std::sqrt(volB), false, small_S,
       "||e^{-u}||_{L4(B,g)}^2 <= 1/(4 gamma_L^2) + 8 vol_g(B)^{1/2}");
  push(rep, "reg_eu.grad", de2, (1 / (8 * gS * gS)) * (1 / (2 * gL * gL) + 8 * std::sqrt(volB)), false, small_S,
       "||d e^{-u}||_{L2(B,g)}^2 <= (1/(8 gamma_S^2)) (1/(2 gamma_L^2) + 8 vol_g(B)^{1/2})");

  // Sobolev inequality for g_u with constant 4 gamma_S on radial test functions
  Eigen::VectorXd x, w;
  gauss_legendre<double>(200, p.r_in, p.r_out, x, w);
  std::vector<double> ux(x.size());
  const VQ cq = cheb_coefficients<Q>(st.U);
  VecX<double> c(cq.size());
  for (int k = 0; k < cq.size(); ++k) c(k) = to_d(cq(k));
  for (int i = 0; i < x.size(); ++i) ux[i] = cheb_eval<double>(c, p.r_in, p.r_out, x(i));
  double worst = 0, worst_rhs = 1;
  const double span = p.r_out - p.r_in;
  for (int k = 0; k < 12; ++k) {
    const double sw = span * (0.08 + 0.035 * k);
    const double cc = p.r_in + span / 2 + (k % 3 - 1) * (span / 2 - sw) * 0.9;
    const RadialBump b{cc, sw};
    double num = 0, den = 0;
    for (int i = 0; i < x.size(); ++i) {
      const Mat<4> gi = p.g.value(axis_point(x(i))).inverse();
      const double dv = kTwoPi2 * std::pow(x(i), 3) * std::sqrt(p.g.value(axis_point(x(i))).determinant()) * w(i);
      const double f = b.f(x(i)), df = b.df(x(i));
      num += std::pow(f, 4) * std::exp(4 * ux[i]) * dv;
      den += gi(0, 0) * df * df * std::exp(2 * ux[i]) * dv;
    }
    const double lhs = std::sqrt(num), rhs = 4 * gS * den;
    if (lhs / rhs > worst / worst_rhs) worst = lhs, worst_rhs = rhs;
  }
  push(rep, "Sobolev_gr", worst, worst_rhs, false, small_SL,
       "(int psi^4 dvol_{g_u})^{1/2} <= 4 gamma_S int |d psi|^2_{g_u} dvol_{g_u}, worst of 12 radial bumps");
  push(rep, "finite_volume", vol_gu, 2 * std::sqrt(2 * gS) * std::pow(volB, 0.25), false, small_SL,
       "vol_{g_u}(B) <= 2 (2 gamma_S)^{1/2} vol_g(B)^{1/4}");
  // O(4)-invariant metrics are conformally flat: B^g = B^{g_u} = 0 and the q = 2
  // inequality reads 0 <= 0; the norm is still computed from the curvature chain.
  double bg = 0, bgu = 0;
  for (int i = 0; i < x.size(); i += 10) {
    const auto pt = curvature_at<4>(p.g, axis_point(x(i)), CurvatureLevel::bach);
    bg = std::max(bg, pt.norm_bach());
    bgu = std::max(bgu, std::exp(-4 * ux[i]) * pt.norm_bach());
  }
  const double q = 2;
  push(rep, "integrability_Bach", bgu * std::pow(volB, 0.75),
       std::pow(1 / (4 * gL * gL) + 8 * std::sqrt(volB), (q - 1) / (4 * q)) * bg * std::sqrt(volB) + 1e-9, false,
       true, "q = 2, sup-norm proxy (B vanishes for O(4)-invariant metrics; 1e-9 round-off slack)");
  if (gL <= 1) rep.flags.push_back("gamma_L <= 1: the regularity lemma assumes gamma_L > 1");
}

}  // namespace

bool GaugeReport::trace_monotone() const {
  for (size_t k = 1; k < energy_trace.size(); ++k)
    if (energy_trace[k] > energy_trace[k - 1]) return false;
  return true;
}

bool GaugeReport::ledger_core_holds() const {
  int found = 0;
  for (const auto& e : ledger)
    if (e.name == "est_du.L4" || e.name == "est_du.lap" || e.name == "reg_eu.L4" || e.name == "reg_eu.grad") {
      ++found;
      if (!e.holds) return false;
    }
  return found == 4;
}

double GaugeReport::u_at(double rr) const {
  if (cheb.empty()) return 0;
  VecX<double> c = Eigen::Map<const VecX<double>>(cheb.data(), static_cast<Eigen::Index>(cheb.size()));
  return cheb_eval<double>(c, r_in, r.back(), rr);
}

json GaugeReport::to_json() const {
  json j;
  j["metric"] = metric;
  j["mode"] = mode == GaugeMode::radial ? "radial" : "full_grid";
  j["r_in"] = r_in;
  j["gamma_S"] = gamma_S;
  j["gamma_L"] = gamma_L;
  j["iterations"] = iterations;
  j["converged"] = converged;
  j["grad_norm"] = grad_norm;
  j["strong_form_polish"] = polished;
  j["E0"] = E0;
  j["E"] = E;
  j["trace_monotone"] = trace_monotone();
  j["du_L4"] = du_L4;
  j["lap_L2"] = lap_L2;
  j["el_L2"] = el_L2;
  j["el_sup"] = el_sup;
  j["J_sup"] = J_sup;
  j["el_ok"] = el_ok;
  j["flux_mismatch"] = flux_mismatch;
  j["energy_routes"] = {{"g_frame", energy_g}, {"gu_frame", energy_gu}, {"relative_gap", energy_rel}};
  j["el_consistency"] = el_consistency;
  j["above_threshold"] = above_threshold;
  j["l4_constraint_active"] = l4_active;
  json led = json::array();
  for (const auto& e : ledger)
    led.push_back({{"name", e.name},
                   {"lhs", e.lhs},
                   {"rhs", e.rhs},
                   {"holds", e.holds},
                   {"asserted", e.asserted},
                   {"note", e.note}});
  j["ledger"] = led;
  j["flags"] = flags;
  return j;
}

std::string GaugeReport::trace_csv() const {
  std::vector<std::vector<double>> rows;
  for (size_t k = 0; k < energy_trace.size(); ++k) rows.push_back({double(k), energy_trace[k]});
  return table_csv({"iteration", "energy"}, rows);
}

std::string GaugeReport::profile_csv() const {
  std::vector<std::vector<double>> rows;
  for (size_t k = 0; k < r.size(); ++k) rows.push_back({r[k], u[k]});
  return table_csv({"r", "u"}, rows);
}

ScalarJetFn<4> radial_solution(const GaugeReport& rep) {
  if (rep.cheb.empty()) throw std::invalid_argument("radial_solution: report has no radial profile");
  const VecX<double> c = Eigen::Map<const VecX<double>>(rep.cheb.data(), static_cast<Eigen::Index>(rep.cheb.size()));
  const double a = rep.r_in, b = rep.r.back();
  return [c, a, b](const JetVec<double, 4>& x) {
    Jet<double, 4> r2 = x(0) * x(0);
    for (int i = 1; i < 4; ++i) r2 += x(i) * x(i);
    return cheb_eval<double>(c, a, b, sqrt(r2));
  };
}

double energy(const GaugeProblem& p, const ScalarJetFn<4>& u, double* other_route) {
  // boundary spheres, a few directions
  for (double rb : {p.r_in, p.r_out})
    for (int k = 0; k < 4; ++k) {
      Vec<4> x = Vec<4>::Zero();
      x(k) = (k % 2 ? -rb : rb);
      if (std::abs(u(seed<double, 4>(x, 0)).value()) > 1e-10)
        throw std::domain_error("energy: u does not vanish on the boundary sphere |x| = " + fmt(rb));
    }
  auto integrand = [&](const Vec<4>& x, double& e_g, double& e_gu) {
    const JetMat<double, 4> m = p.g.jets(x, 2);
    const Jet<double, 4> uj = u(seed<double, 4>(x, 2));
    const JetMat<double, 4> ginv = jet_inverse<4>(m);
    const Christoffel<4> gam = christoffel<4>(m, ginv);
    const auto pg = curvature_from_jets<4>(m, CurvatureLevel::riemann);
    double du2 = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) du2 += pg.ginv(i, j) * uj.d(i).value() * uj.d(j).value();
    const double R = pg.J - laplacian<4>(ginv, gam, uj).value() - du2;
    e_g = 0.5 * R * R * pg.sqrt_det;
    JetMat<double, 4> mu;
    const Jet<double, 4> e2u = exp(2.0 * uj);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) mu(i, j) = e2u * m(i, j);
    const auto pu = curvature_from_jets<4>(mu, CurvatureLevel::riemann);
    e_gu = 0.5 * pu.J * pu.J * pu.sqrt_det;
  };
  double Eg = 0, Egu = 0;
  if (p.g.radial() && p.mode == GaugeMode::radial) {
    Eigen::VectorXd x, w;
    gauss_legendre<double>(160, p.r_in, p.r_out, x, w);
    for (int i = 0; i < x.size(); ++i) {
      double a, b;
      integrand(axis_point(x(i)), a, b);
      const double dv = kTwoPi2 * std::pow(x(i), 3) * w(i);
      Eg += a * dv;
      Egu += b * dv;
    }
  } else {
    const Chart c = Chart::radial4(p.r_in, p.r_out, 24, 6, 12, RadialRule::gauss);
    for (int k = 0; k < c.num_nodes(); ++k) {
      double a, b;
      integrand(Vec<4>(c.cartesian(k)), a, b);
      Eg += a * c.weight(k);
      Egu += b * c.weight(k);
    }
  }
  if (other_route) *other_route = Egu;
  return Eg;
}

GridField el_residual(const MetricField<4>& g, const ScalarJetFn<4>& u, const Chart& chart) {
  if (chart.dim() != 4) throw std::invalid_argument("el_residual: 4D chart required");
  if (!g.closed_form() || g.max_order() < 4)
    throw capability_error("el_residual: needs four derivatives of the metric (closed form)");
  GridField out(chart, 3);
  for (int k = 0; k < chart.num_nodes(); ++k) {
    const Vec<4> x(chart.cartesian(k));
    const JetMat<double, 4> m = g.jets(x, 4);
    const Jet<double, 4> uj = u(seed<double, 4>(x, 4));
    if (uj.order() < 4) throw capability_error("el_residual: u must provide 4 derivatives");
    const Jet<double, 4> e2u = exp(2.0 * uj);
    JetMat<double, 4> mu;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) mu(i, j) = e2u * m(i, j);
    const Jet<double, 4> Jgu = scalar_curvature_jet<4>(mu) / 6.0;  // order 2
    const JetMat<double, 4> muinv = jet_inverse<4>(mu);
    const double lap = laplacian<4>(muinv, christoffel<4>(mu, muinv), Jgu).value();
    // flux form in the base metric
    const JetMat<double, 4> ginv = jet_inverse<4>(m);
    const Jet<double, 4> sq = sqrt(jet_det<4>(m));
    double div = 0;
    for (int i = 0; i < 4; ++i) {
      Jet<double, 4> Vi(0.0, 1);
      for (int j = 0; j < 4; ++j) Vi += ginv(i, j) * Jgu.d(j);
      div += (sq * e2u * Vi).d(i).value();
    }
    div /= sq.value();
    out(k, 0) = lap;
    out(k, 1) = div;
    out(k, 2) = std::exp(4 * uj.value());
  }
  return out;
}

GaugeReport minimize(const GaugeProblem& p) {
  if (p.mode == GaugeMode::full_grid) return minimize_full_grid(p);
  if (!p.g.radial()) throw std::invalid_argument("minimize: radial mode needs an O(4)-invariant metric");
  if (!(p.r_in > 0 && p.r_in < p.r_out)) throw std::invalid_argument("minimize: need 0 < r_in < r_out");
  if (p.r_in < p.g.r_min() || p.r_out > p.g.r_max()) throw std::out_of_range("minimize: annulus outside metric domain");
  if (p.n_cheb < 8) throw std::invalid_argument("minimize: n_cheb must be >= 8");

  GaugeReport rep;
  rep.metric = p.g.name();
  rep.mode = GaugeMode::radial;
  rep.r_in = p.r_in;
  fill_constants(p, rep);
  const double tol = p.tol_grad > 0 ? p.tol_grad : 1e-9;

  const RadialData s = radial_setup(p.g, p.r_in, p.r_out, p.n_cheb);
  if (s.kept > p.n_cheb - 8)
    rep.flags.push_back("metric coefficients not resolved at n_cheb = " + std::to_string(p.n_cheb));
  const MQ Z = clamped_basis(s);
  const int n = static_cast<int>(s.r.size()), m = static_cast<int>(Z.cols());
  VQ c = VQ::Zero(m);
  RadialState st = radial_eval(s, Z * c);
  rep.E0 = to_d(st.E);
  rep.energy_trace.push_back(rep.E0);

  auto gradient = [&](const RadialState& x, MQ* Mout) {
    const MQ M = energy_jacobian(s, x);
    if (Mout) *Mout = M;
    return VQ(Z.transpose() * (M.transpose() * s.wq.cwiseProduct(x.Rq)));
  };

  int polish = 0;
  for (int it = 0; it < p.max_iter; ++it) {
    MQ M;
    const VQ gc = gradient(st, &M);
    const Q gmax = gc.cwiseAbs().maxCoeff();
    rep.grad_norm = to_d(gmax);
    // Newton is quadratic here: keep polishing past tol so the four derivatives
    // taken by the EL residual do not amplify the stopping error.
    if (rep.grad_norm <= tol) rep.converged = true;
    if (gmax <= Q(tol) * Q(1e-14) || (rep.converged && polish++ >= 3)) break;
    const MQ MZ = M * Z;
    const MQ GN = MZ.transpose() * s.wq.asDiagonal() * MZ;
    const VQ cw = Q(-2) * s.aq.cwiseProduct(s.wq).cwiseProduct(st.Rq);
    const MQ DZ = s.P1 * Z;
    const MQ H = GN + DZ.transpose() * cw.asDiagonal() * DZ;
    VQ step;
    Eigen::LLT<MQ> llt(H);
    if (llt.info() == Eigen::Success) step = -llt.solve(gc);
    if (step.size() == 0 || !(step.dot(gc) < 0)) {
      // indefinite: Gauss–Newton, then steepest descent
      Eigen::LLT<MQ> lgn(GN);
      if (lgn.info() == Eigen::Success) step = -lgn.solve(gc);
      if (step.size() == 0 || !(step.dot(gc) < 0)) step = -gc;
      rep.flags.push_back("indefinite Hessian at iteration " + std::to_string(it));
    }
    Q t(1);
    const Q slope = step.dot(gc);
    RadialState trial;
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      trial = radial_eval(s, Z * (c + t * step));
      if (trial.E <= st.E + Q(1e-4) * t * slope) {
        accepted = true;
        break;
      }
      t /= 2;
    }
    if (!accepted) {
      if (!rep.converged) rep.flags.push_back("line search stalled at gradient " + fmt(rep.grad_norm));
      break;
    }
    c += t * step;
    st = trial;
    rep.energy_trace.push_back(to_d(st.E));
    rep.iterations = it + 1;
  }
  if (!rep.converged) {
    rep.grad_norm = to_d(gradient(st, nullptr).cwiseAbs().maxCoeff());
    rep.converged = rep.grad_norm <= tol;
    if (!rep.converged) rep.flags.push_back("not converged: gradient " + fmt(rep.grad_norm));
  }
  // The discrete minimizer satisfies the EL equation only weakly (four boundary
  // modes stay free); settle the strong form by collocation from there.
  {
    RadialState pol = st;
    const int steps = strong_polish(s, pol);
    const VQ cpol = Z.transpose() * pol.U;
    const double gpol = to_d(gradient(pol, nullptr).cwiseAbs().maxCoeff());
    if (steps >= 0 && gpol <= tol && (Z * cpol - pol.U).cwiseAbs().maxCoeff() < Q(1e-28)) {
      st = pol;
      c = cpol;
      rep.grad_norm = gpol;
      rep.polished = true;
    } else {
      rep.flags.push_back("strong-form polish rejected (gradient " + fmt(gpol) + ")");
    }
  }
  rep.E = to_d(st.E);

  // norms of the solution
  double du4 = 0, lap2 = 0;
  for (int j = 0; j < n; ++j) {
    const Q dv = s.w(j) * s.rho(j);
    const Q du2 = s.a(j) * st.U1(j) * st.U1(j);
    const Q lap = s.a(j) * st.U2(j) + s.b(j) * st.U1(j);
    du4 += to_d(du2 * du2 * dv);
    lap2 += to_d(lap * lap * dv);
  }
  rep.du_L4 = std::pow(du4, 0.25);
  rep.lap_L2 = std::sqrt(lap2);
  rep.l4_active = rep.du_L4 >= (1 - 1e-6) / (4 * rep.gamma_L);
  if (rep.l4_active) rep.flags.push_back("L4 constraint ||du||_{L4} < 1/(4 gamma_L) active");

  const Flux fl = radial_flux(s, st);
  double el2 = 0, elsup = 0, Jsup = 0, mism = 0, fsup = 0;
  for (int j = 0; j < n; ++j) {
    const double e = to_d(fl.el(j));
    el2 += e * e * to_d(s.w(j) * s.rho(j));
    elsup = std::max(elsup, std::abs(e));
    Jsup = std::max(Jsup, std::abs(to_d(fl.F(j))));
    mism = std::max(mism, std::abs(to_d(fl.flux(j) - fl.e4u(j) * fl.el(j))));
    fsup = std::max(fsup, std::abs(to_d(fl.flux(j))));
  }
  rep.el_L2 = std::sqrt(el2);
  rep.el_sup = elsup;
  rep.J_sup = Jsup;
  rep.flux_mismatch = mism / (1 + fsup);
  rep.el_ok = rep.el_L2 <= p.tol_el && rep.el_sup <= p.tol_el * (1 + Jsup);
  if (!rep.el_ok) rep.flags.push_back("EL residual above tolerance");

  rep.r.resize(n);
  rep.u.resize(n);
  for (int j = 0; j < n; ++j) {
    rep.r[j] = to_d(s.r(j));
    rep.u[j] = to_d(st.U(j));
  }
  const VQ cq = cheb_coefficients<Q>(st.U);
  rep.cheb.resize(cq.size());
  for (int k = 0; k < cq.size(); ++k) rep.cheb[k] = to_d(cq(k));

  // Both energy routes on the closed-form interpolant.
  {
    GaugeProblem q = p;
    const auto uf = radial_solution(rep);
    rep.energy_g = energy(q, uf, &rep.energy_gu);
    rep.energy_rel = std::abs(rep.energy_g - rep.energy_gu) / std::max(1e-300, std::abs(rep.energy_g) + 1e-12);
  }

  // Integration by parts: dE(u)[v] = -int v div_g(e^{2u} grad J^{g_u}) dvol_g,
  // checked at the midpoint u/2 where the gradient is not small.
  {
    const RadialState half = radial_eval(s, st.U / Q(2));
    const VQ grad = energy_gradient(s, half);
    const Flux fh = radial_flux(s, half);
    std::mt19937_64 rng(p.seed);
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
      VQ v(n);
      std::vector<double> coef(6);
      for (auto& cc : coef) cc = normal(rng);
      for (int j = 0; j < n; ++j) {
        const double r = to_d(s.r(j)), t = (2 * r - p.r_in - p.r_out) / (p.r_out - p.r_in);
        double poly = 0, T0 = 1, T1 = t;
        for (int q = 0; q < 6; ++q) {
          const double Tq = q == 0 ? T0 : q == 1 ? T1 : 2 * t * T1 - T0;
          if (q >= 2) T0 = T1, T1 = Tq;
          poly += coef[q] * Tq;
        }
        v(j) = Q(std::pow(r - p.r_in, 2) * std::pow(p.r_out - r, 2) * poly);
      }
      const double lhs = to_d(grad.dot(v));
      const double rhs = -to_d((s.w.cwiseProduct(s.rho).cwiseProduct(v).cwiseProduct(fh.flux)).sum());
      worst = std::max(worst, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30}));
    }
    rep.el_consistency = worst;
  }

  radial_ledger(p, s, st, rep);
  return rep;
}

json LimitReport::to_json() const {
  json j;
  j["radii"] = radii;
  j["sup_diff"] = sup_diff;
  j["ratios"] = ratios;
  j["limit_vs_finest"] = limit_vs_finest;
  j["monotone"] = monotone;
  json s = json::array();
  for (const auto& r : solves)
    s.push_back({{"r_in", r.r_in}, {"E", r.E}, {"converged", r.converged}, {"el_sup", r.el_sup}});
  j["solves"] = s;
  j["flags"] = flags;
  return j;
}

LimitReport harmonic_J_limit(const GaugeProblem& p, const std::vector<double>& rs) {
  if (rs.size() < 4) throw std::invalid_argument("harmonic_J_limit: need at least 4 radii");
  for (size_t k = 1; k < rs.size(); ++k)
    if (!(rs[k] < rs[k - 1])) throw std::invalid_argument("harmonic_J_limit: radii must strictly decrease");
  LimitReport L;
  L.radii = rs;
  for (double r : rs) {
    GaugeProblem q = p;
    q.r_in = r;
    try {
      // small r_in steepens the 1/r coefficients: raise the degree until resolved
      GaugeReport rep = minimize(q);
      auto unresolved = [](const GaugeReport& x) {
        for (const auto& f : x.flags)
          if (f.rfind("metric coefficients not resolved", 0) == 0) return true;
        return false;
      };
      while (unresolved(rep) && q.n_cheb < 256) {
        q.n_cheb = std::min(256, q.n_cheb * 3 / 2);
        rep = minimize(q);
      }
      L.solves.push_back(std::move(rep));
      if (!L.solves.back().converged) L.flags.push_back("solve at r = " + fmt(r) + " not converged");
      if (!L.solves.back().el_ok) L.flags.push_back("solve at r = " + fmt(r) + ": EL residual above tolerance");
    } catch (const std::exception& e) {
      L.flags.push_back("solve at r = " + fmt(r) + " failed: " + e.what());
      return L;
    }
  }
  const int np = 401;
  for (int i = 0; i < np; ++i) L.probe_r.push_back(rs[0] + (p.r_out - rs[0]) * i / (np - 1));
  std::vector<std::vector<double>> prof;
  for (const auto& s : L.solves) {
    std::vector<double> v;
    for (double r : L.probe_r) v.push_back(s.u_at(r));
    prof.push_back(v);
  }
  for (size_t k = 0; k + 1 < prof.size(); ++k) {
    double d = 0;
    for (int i = 0; i < np; ++i) d = std::max(d, std::abs(prof[k + 1][i] - prof[k][i]));
    L.sup_diff.push_back(d);
  }
  L.monotone = true;
  for (size_t k = 0; k + 1 < L.sup_diff.size(); ++k) {
    const double a = L.sup_diff[k], b = L.sup_diff[k + 1];
    L.ratios.push_back(b > 0 ? a / b : (a > 0 ? INFINITY : 1.0));
    if (b > a && a > 1e-14) L.monotone = false;
  }
  if (!L.monotone) L.flags.push_back("successive sup-differences do not decrease");
  // geometric (Aitken-type) extrapolation from the last two differences
  const size_t K = prof.size() - 1;
  const double dK = L.sup_diff.back(), dK1 = L.sup_diff[L.sup_diff.size() - 2];
  const double qf = dK1 > 0 ? dK / dK1 : 0;
  L.limit_profile.resize(np);
  for (int i = 0; i < np; ++i) {
    const double step = prof[K][i] - prof[K - 1][i];
    L.limit_profile[i] = prof[K][i] + (qf < 1 ? step * qf / (1 - qf) : 0);
    L.limit_vs_finest = std::max(L.limit_vs_finest, std::abs(L.limit_profile[i] - prof[K][i]));
  }
  return L;
}

}  // namespace cgeom
