#pragma once

#include <functional>

#include "cgeom/catalog.hpp"
#include "cgeom/curvature.hpp"

namespace cgeom {

template <int D>
using ScalarJetFn = std::function<Jet<double, D>(const JetVec<double, D>&)>;

// Conformal factor u with exact jets; g_u = e^{2u} g.
template <int D>
struct ConformalFactor {
  std::string name;
  ScalarJetFn<D> u;
};

struct ConformalReport {
  double schouten = 0, J = 0, bach = 0, hessian = 0;  // max node residual / (1 + |rhs|)
  double weyl_energy_g = 0, weyl_energy_gu = 0, weyl_energy_rel = 0;
  double du4_g = 0, du4_gu = 0, du4_rel = 0;
  json to_json() const;
};

MetricField<4> conformal_metric(const MetricField<4>& g, const ConformalFactor<4>& u);
MetricField<2> conformal_metric(const MetricField<2>& g, const ConformalFactor<2>& u);

// Both sides of each transformation law computed independently at chart nodes.
// The Hessian law is tested on f (defaults to a fixed smooth function).
std::pair<MetricField<4>, ConformalReport> conformal_change(const MetricField<4>& g, const ConformalFactor<4>& u,
                                                            const Chart& chart,
                                                            const ScalarJetFn<4>& f = nullptr);

struct DecayFit {
  std::vector<double> radii, deviation;  // max_ij |h_ij - delta_ij| on each sphere
  double exponent = 0;                   // least-squares slope of log dev vs log r
  bool exact_flat = false;
  bool ok = false;
  std::vector<double> sch_norm;  // |Sch^h|_h sup on each sphere
  json to_json() const;
};

// h = |x|^4 iota^* g with iota(z) = z/|z|^2, on 0 < |x| <= 1/R.
MetricField<4> invert_compactify(const MetricField<4>& g_ale);
DecayFit compactify_decay(const MetricField<4>& h, double tau, double r_max, int levels = 7);

struct ScalingReport {
  double s = 0;
  double riem = 0, vol = 0, sch = 0, J = 0, bach = 0;  // max residual of each identity
  double ball_lhs = 0, ball_rhs = 0, ball_rel = 0;      // ||Riem||_{L2} on matched balls
  double max() const;
  json to_json() const;
};

// h_s = s^{-2} g0(s .); in the rescaled chart, components h_ij(y) = g0_ij(s y).
MetricField<4> blowup_rescale(const MetricField<4>& g0, double s);
ScalingReport scaling_report(const MetricField<4>& g0, double s, const Chart& chart,
                             const Vec<4>& ball_center, double ball_radius);

// ||Riem||_{L2} over the coordinate ball B(c, t) (Gauss radial x product S^3 rule).
double riem_l2_ball(const MetricField<4>& g, const Vec<4>& c, double t, int n_r = 12, int n_ang = 8);

}  // namespace cgeom
