#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cgeom/conformal.hpp"
#include "cgeom/io.hpp"

namespace cgeom {

// ---- Chern–Gauss–Bonnet on a coordinate annulus -------------------------------

struct CGBReport {
  double r_in = 0, r_out = 0;
  double weyl = 0;        // int |W|^2
  double j_sch = 0;       // 8 int (J^2 - |Sch|^2)
  double outer = 0, inner = 0;  // 8 * boundary integrals (outward normals)
  double lhs = 0;         // 32 pi^2 chi = 0
  double rhs = 0;
  double residual = 0;    // |lhs - rhs| / largest term magnitude
  json to_json() const;
};

CGBReport cgb_boundary_check(const MetricField<4>& g, double r_in, double r_out, int n_r = 32, int n_eta = 8,
                             int n_xi = 16);

// Boundary integrand (without the factor 8) at x on the sphere |x| = const, with
// the given normal orientation (+1: d/dr outward, -1: -d/dr outward).
double cgb_boundary_integrand(const MetricField<4>& g, const Vec<4>& x, int orientation, double* area_factor = nullptr);

// ---- Gauss–Codazzi -------------------------------------------------------------

using JetPoint = std::vector<Jet<double, 4>>;

struct Immersion {
  std::string name;
  int d = 5;
  std::function<JetPoint(const JetVec<double, 4>&)> phi;
};

// flat_graph, sphere4 (inverse stereographic), graph_bump (eps, width).
Immersion immersion(const std::string& name, const Params& p = {});
Immersion rigid_motion(const Immersion& im, const Eigen::MatrixXd& Q, const Eigen::VectorXd& t);

struct GaussCodazziReport {
  double residual = 0;       // max |Riem - (II*II)| / (1 + max |Riem|)
  double max_riem = 0;
  double tangential_II = 0;  // max |P_T II|
  double sectional_min = 0, sectional_max = 0;  // coordinate-plane sectional curvatures
  int nodes = 0;
  json to_json() const;
};

GaussCodazziReport gauss_codazzi_check(const Immersion& im, const Chart& chart);

// ---- Geodesic balls (radial metrics, half-plane reduction) --------------------

struct BallStats {
  Vec<4> center = Vec<4>::Zero();
  double s = 0, volume = 0, theta = 0;
  bool truncated = false;
};

// Grid-Dijkstra distance from x in the plane spanned by x and a fixed orthogonal
// direction; the rest of R^4 is recovered from the O(3) symmetry around the axis.
class BallGrid {
 public:
  BallGrid(const MetricField<4>& g, const Vec<4>& x, double s_max, int n = 96);
  BallStats ball(double s) const;
  // Integral of f over the geodesic ball B(x, s) (f evaluated at grid points).
  double integrate(double s, const std::vector<double>& f) const;
  const std::vector<Vec<4>>& points() const { return pts_; }
  const std::vector<double>& dist() const { return dist_; }

 private:
  Vec<4> center_;
  double s_max_ = 0, h_ = 0;
  bool truncated_ = false;
  std::vector<Vec<4>> pts_;
  std::vector<double> dist_, weight_, speed_;
};

BallStats geodesic_ball(const MetricField<4>& g, const Vec<4>& x, double s, int n = 96);

struct GrowthTable {
  std::vector<BallStats> rows;
  bool bounded = false;         // max theta / min theta <= 2
  bool euclidean_like = false;  // small-s theta within 10% of pi^2/2
  std::vector<std::string> flags;
  json to_json() const;
  std::string csv() const;
};

GrowthTable volume_growth_scan(const MetricField<4>& g, const Vec<4>& x, const std::vector<double>& s_list,
                               int n = 96);

// ---- epsilon-regularity scan ---------------------------------------------------

struct EpsBall {
  Vec<4> center = Vec<4>::Zero();
  double s = 0;
};

struct EpsRow {
  EpsBall ball;
  double lhs = 0;       // ||Sch||_{L^{2p}(B(x,s))}
  double sch_term = 0;  // s^{-2/p} vol(B(x,2s))^{1/p-1/2} ||Sch||_{L2(B(x,2s))}
  double bach_term = 0; // ||B||_{L^{2p/(p+1)}(B(x,2s))}^{2/(p+1)}
  double ratio = 0;     // lhs / (sch_term + bach_term)
};

struct EpsTable {
  double p = 2;
  std::vector<EpsRow> rows;
  double C_fit = 0;  // smallest admissible constant over the scan
  json to_json() const;
  std::string csv() const;
};

EpsTable eps_regularity_scan(const MetricField<4>& g0, const std::vector<EpsBall>& balls, double p, int n = 64);

// ---- Sobolev / regularity constants -------------------------------------------

struct SobolevConstants {
  double gamma_S = 0, gamma_L = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> running_S, running_L;  // running maxima over the family
  std::string caveat = "lower bound of the true constant";
  json to_json() const;
};

// Rayleigh-quotient maxima over n_random bump combinations in the unit ball plus
// Aubin–Talenti-shaped radial profiles.
SobolevConstants estimate_constants(const MetricField<4>& g, int n_random = 200, std::uint64_t seed = 1);

// ---- Blow-up flatness ----------------------------------------------------------

struct FlatnessRow {
  double s = 0;
  double riem_L2 = 0;  // ||Riem^{h_s}||_{L2(1/2 < |y| < 1)}
  double sch_L2p = 0;  // ||Sch^{h_s}||_{L^{2p}(|y| < 1)}
};

struct FlatnessTable {
  std::vector<FlatnessRow> rows;
  double slope = 0;  // log-log slope of riem_L2 against s
  bool decays = false;
  std::vector<std::string> flags;
  json to_json() const;
  std::string csv() const;
};

FlatnessTable blowup_flatness(const MetricField<4>& g0, const std::vector<double>& s_list, double p = 2);

}  // namespace cgeom
