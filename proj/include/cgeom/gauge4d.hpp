#pragma once

#include <string>
#include <vector>

#include "cgeom/conformal.hpp"
#include "cgeom/io.hpp"

namespace cgeom {

enum class GaugeMode { radial, full_grid };

struct GaugeProblem {
  MetricField<4> g;
  double r_in = 0.25;  // Omega_r = {r_in < |x| < 1}
  double r_out = 1.0;
  double gamma_S = 0, gamma_L = 0;  // <= 0: estimate for g on the unit ball
  GaugeMode mode = GaugeMode::radial;
  int n_cheb = 80;  // radial: Chebyshev degree
  int grid_n = 12;  // full grid: nodes per axis on [-1,1]^4 (<= 24)
  double tol_grad = -1;  // <= 0: 1e-9 radial, 1e-6 full grid
  double tol_el = 1e-6;
  int max_iter = 200;
  std::uint64_t seed = 1;
};

struct LedgerEntry {
  std::string name;
  double lhs = 0, rhs = 0;
  bool holds = false;
  bool asserted = false;  // false: a hypothesis is not met, the entry is informational
  std::string note;
};

struct GaugeReport {
  std::string metric;
  GaugeMode mode = GaugeMode::radial;
  double r_in = 0, gamma_S = 0, gamma_L = 0;
  std::vector<double> energy_trace;
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0;
  bool polished = false;             // final Newton pass on the strong EL form
  double E0 = 0, E = 0;
  double du_L4 = 0, lap_L2 = 0;      // ||du||_{L4(g)}, ||Delta_g u||_{L2(g)}
  double el_L2 = 0, el_sup = 0;      // Delta_{g_u} J^{g_u}
  double J_sup = 0;                  // sup |J^{g_u}|
  double flux_mismatch = 0;          // sup |div_g(e^{2u} grad J) - e^{4u} Delta_{g_u} J| / (1 + sup)
  double energy_g = 0, energy_gu = 0, energy_rel = 0;  // both energy routes on the solution
  double el_consistency = 0;         // max relative gap over random test directions
  bool el_ok = false;
  bool above_threshold = false;      // E_r(0) >= 1/(4^6 gamma_L^4)
  bool l4_active = false;            // L4-ball constraint reached (anomaly)
  std::vector<std::string> flags;
  std::vector<LedgerEntry> ledger;
  std::vector<double> r, u;          // solution at the nodes (radial)
  std::vector<double> cheb;          // Chebyshev coefficients of u on [r_in, r_out]

  bool trace_monotone() const;
  // The four asserted inequalities: est_du (two lines) and reg_eu (two bounds).
  bool ledger_core_holds() const;
  double u_at(double r) const;
  json to_json() const;
  std::string trace_csv() const;
  std::string profile_csv() const;
};

// 1/2 int (J^g - Delta_g u - |du|^2_g)^2 dvol_g over Omega_r; the g_u-frame value
// 1/2 int (J^{g_u})^2 dvol_{g_u} goes to *other_route when given.
// Throws std::domain_error if u does not vanish on both boundary spheres.
double energy(const GaugeProblem& p, const ScalarJetFn<4>& u, double* other_route = nullptr);

GaugeReport minimize(const GaugeProblem& p);
GaugeReport minimize_full_grid(const GaugeProblem& p);

// Components: Delta_{g_u} J^{g_u}, div_g(e^{2u} grad_g J^{g_u}), e^{4u}.
GridField el_residual(const MetricField<4>& g, const ScalarJetFn<4>& u, const Chart& chart);

// u as a closed form (Clenshaw in |x|) from a radial report.
ScalarJetFn<4> radial_solution(const GaugeReport& rep);

struct LimitReport {
  std::vector<double> radii;
  std::vector<GaugeReport> solves;
  std::vector<double> sup_diff;   // sup over [r_0, 1] of |u_{k+1} - u_k|
  std::vector<double> ratios;     // sup_diff[k] / sup_diff[k+1]
  std::vector<double> probe_r, limit_profile;  // extrapolated limit on [r_0, 1]
  double limit_vs_finest = 0;     // sup |limit - u_{r_min}|
  bool monotone = false;          // sup differences decrease (or all vanish)
  std::vector<std::string> flags;
  json to_json() const;
};

LimitReport harmonic_J_limit(const GaugeProblem& p, const std::vector<double>& r_sequence);

}  // namespace cgeom
