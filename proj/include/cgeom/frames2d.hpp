#pragma once

// Moving frames on the punctured unit disk: connection forms, circulations and
// the singular mass, Hodge / Coulomb gauges, the conformal factor mu and conformal
// coordinates, the Liouville equation, and the isoperimetric eigenvalue check.
//
// Conventions: orientation dx ^ dy, *dx = dy, *dy = -dx, circles counterclockwise.
// For a coframe (w1, w2) with dual frame (E1, E2),
//   w12 = dw1(E1, E2) w1 + dw2(E1, E2) w2,  dw1 = w12 ^ w2,  dw2 = -w12 ^ w1,
// rotating w1 + i w2 by e^{ia} turns w12 into w12 - da, and
//   K dvol = -d w12 + 2 pi deg(E1) delta_0,   m = deg(E1) - alpha / (2 pi),
// where alpha is the limit circulation of w12 around the puncture.

#include <functional>
#include <string>
#include <vector>

#include "cgeom/catalog.hpp"
#include "cgeom/chart.hpp"
#include "cgeom/conformal.hpp"
#include "cgeom/io.hpp"
#include "cgeom/polar.hpp"

namespace cgeom {

// Row i holds the Cartesian components of w^i.
using CoframeFn = std::function<JetMat<double, 2>(const JetVec<double, 2>&)>;
using OneFormFn = std::function<Vec<2>(const Vec<2>&)>;

struct Coframe2D {
  std::string name;
  CoframeFn fn;
  double r_min = 0;  // valid on |x| >= r_min

  Mat<2> value(const Vec<2>& x) const;
  MetricField<2> metric() const;  // w1 (x) w1 + w2 (x) w2
};

Coframe2D conformal_coframe(const std::string& name, const ScalarJetFn<2>& lambda, double r_min = 0);  // e^lambda (dx, dy)
Coframe2D polar_coframe();  // (dr, r dtheta)
Coframe2D orthonormal_coframe(const MetricField<2>& g);  // Gram–Schmidt of (dx, dy)
// e^{f + i a} (w1 + i w2); f may be null.
Coframe2D rotate(const Coframe2D& c, const ScalarJetFn<2>& a, const ScalarJetFn<2>& f = nullptr);
// Smooth rotation angle amp * exp(-|x - c|^2 / w^2).
ScalarJetFn<2> bump_angle(double amp, const Vec<2>& center, double width);

// flat2 (frame=cartesian|polar), round_sphere2, polar_singular (n), essential,
// annulus_d; twist=<amp> pre-rotates by bump_angle(amp, (0.3, -0.2), 0.35).
Coframe2D catalog_coframe(const std::string& metric, const Params& p = {});

// ---------------------------------------------------------------------------
// Connection form

struct ConnectionPoint {
  Vec<2> w12;
  Mat<2> E;           // columns E1, E2 (Cartesian)
  double duality = 0;   // max |w^i(E_j) - delta^i_j|
  double structure = 0; // max relative residual of the two structure equations
  double dw12 = 0;      // d w12 / dx ^ dy (needs curvature = true)
};

ConnectionPoint connection_at(const Coframe2D& c, const Vec<2>& x, bool curvature = false);
OneFormFn connection_fn(const Coframe2D& c);

struct ConnectionForm {
  GridField w12;  // Cartesian components on the chart
  double max_duality = 0, max_structure = 0;
};

// Throws std::domain_error at a degenerate node (w1 ^ w2 = 0).
ConnectionForm connection_form(const Coframe2D& c, const Chart& chart);

// ---------------------------------------------------------------------------
// Degrees and circulations

// Winding of E1 against (d/dx, d/dy) along the circle of the given radius.
int frame_degree(const std::function<Vec<2>(double theta)>& E1, int samples = 1024);
int frame_degree(const Coframe2D& c, double radius, int samples = 1024);

struct SingularityData {
  std::vector<double> radii;         // decreasing
  std::vector<double> circulation;   // oriented circulation of the form
  std::vector<double> abs_circulation;  // integral of |form(d/dtheta)| dtheta
  std::vector<double> remainder_L2;  // ||form - (alpha / 2 pi) dtheta||^2 on D \ D_r
  double alpha = 0;          // limit circulation: Aitken extrapolation of the last three values when
                             // they converge geometrically, else the value at the smallest radius
  double deviation = 0;      // max |circulation - alpha| over the sequence
  double tail = 0;           // |c_last - c_second_last|
  double abs_growth = 0;     // p in abs_circulation ~ r^{-p} over the last radii
  int degree = 0;
  double m = 0;              // degree - alpha / (2 pi)
  bool convergent = true;    // tail below tolerance
  bool divergent = false;    // circle masses blow up: not a measure at 0
  std::vector<std::string> flags;

  json to_json() const;
  std::string csv() const;
};

SingularityData circulation(const OneFormFn& form, const std::vector<double>& radii, int degree,
                            int samples = 1024, double tol = 1e-3);
SingularityData circulation(const Coframe2D& c, const std::vector<double>& radii, int samples = 1024,
                            double tol = 1e-3);
std::vector<double> dyadic_radii(double r_start, double r_min, int max_count = 10);

// Closed-form Gauss–Bonnet on the unit disk: returns
//   int_{dD} k_g ds - int_{dD} w12 + 2 pi deg(E1),
// which equals 2 pi when K dvol = -d w12 + 2 pi deg delta_0.
double gauss_bonnet_disk(const Coframe2D& c, int samples = 1024);

// ---------------------------------------------------------------------------
// Sampled pipeline on a PolarGrid

struct PolarCoframe {
  PolarForm w1, w2;
};

PolarCoframe sample_coframe(const PolarGrid& G, const Coframe2D& c);
// Spectral connection of a sampled coframe; throws on a degenerate node.
PolarForm connection_form(const PolarGrid& G, const PolarCoframe& w);
// e^{f + i a} (w1 + i w2)
PolarCoframe rotate(const PolarCoframe& w, const PolarField& a, const PolarField& f);
// Degree of E1 along ring i.
int frame_degree(const PolarGrid& G, const PolarCoframe& w, int ring);

// w = da + *d beta + h, with b = beta dx ^ dy (so d*b reads *d beta here).
struct HodgeParts {
  PolarField a, b;
  PolarForm h;
  double residual = 0;  // sup |w - da - *d beta - h| / sup |w|
  double dh = 0, dstar_h = 0;  // relative sup of d h and d*h (interior nodes)
  double solver_residual = 0;
};

// a: natural (Neumann) condition on both circles; beta: zero on both circles.
HodgeParts hodge_decompose(const PolarGrid& G, const PolarForm& w);

struct GaugeRotation {
  PolarCoframe w;
  PolarForm w12;              // spectral connection of w
  double metric_residual = 0;     // sup |w (x) w - r^{2m} (omega (x) omega)| / sup |r^{2m} omega (x) omega|
  double connection_residual = 0; // sup |w12 - (omega12 - da + m *_g d log r)| / (1 + sup)
  double w12_L2 = 0;          // ||w12||_{L2(D \ D_{r_in})}
};

GaugeRotation gauge_rotate(const PolarGrid& G, const PolarCoframe& omega, const PolarForm& omega12,
                           const PolarField& a, double m);

struct CoulombFrame {
  PolarCoframe w;        // input coframe
  PolarForm w12;
  PolarField u;          // minimizing rotation (alpha = e^{iu} w)
  PolarCoframe alpha;
  PolarForm alpha12;     // = w12 - du, spectral check below
  PolarField mu;         // d mu = -*_h alpha12, mu = 0 on the unit circle
  double m = 0;
  double energy_before = 0, energy_after = 0;  // int |.|_h^2 dvol_h
  double connection_residual = 0;  // |alpha12 (spectral) - (w12 - du)|
  double div_residual = 0;         // d *_h alpha12 (relative, interior)
  double boundary_trace = 0;       // (A alpha12)_s on both circles (relative)
  double mu_residual = 0;          // |d mu + *_h alpha12| / sup |alpha12|
  double weak_div = 0;             // max over test functions of |<*_h alpha12, d chi>| (relative)
  double solver_residual = 0;
};

CoulombFrame coulomb_minimize(const PolarGrid& G, const PolarCoframe& w, double m, std::uint64_t seed = 1);

struct ConformalCoordinates {
  PolarField phi1, phi2;     // dphi^i = e^{-mu} alpha^i - kappa^i dtheta
  Eigen::VectorXd kappa1, kappa2;  // per ring
  double kappa[2] = {0, 0};  // at the outer ring
  double kappa_spread = 0;   // max deviation across rings
  double closedness = 0;     // sup |d(e^{-mu} alpha^i)| / sup |e^{-mu} alpha^i|
  double frame_check = 0;    // sup |dphi^i(e^{mu} E_j) - delta^i_j|
  double metric_error = 0;   // sup on r >= r_check of |r^{2m} g - e^{2 mu} |dphi|^2| / |r^{2m} g|
  double r_check = 0.05;
  std::vector<double> ring_radii, diameters;  // diameter of the image of each ring
  bool shrinking = false;
  // Integer m != 0: Phi = int z^{-m} d(phi1 + i phi2), model map z^{1-m}.
  bool branched = false;
  PolarField Phi1, Phi2;
  double branched_circulation = 0;
  double model_error = 0;    // sup |Phi - (R z^{1-m} + t)|, fitted rigid motion
  Mat<2> model_rotation = Mat<2>::Identity();
  Vec<2> model_shift = Vec<2>::Zero();
};

ConformalCoordinates conformal_coordinates(const PolarGrid& G, const CoulombFrame& cf, double r_check = 0.05,
                                           double kappa_tol = 1e-4);

// -Delta u = f on the unit disk, u = 0 on the circle, u regular at 0. f is
// K_g sqrt(det g) of the regular part (per dx dy).
struct LiouvilleResult {
  PolarField u;
  double m = 0;
  double solver_residual = 0;
};
LiouvilleResult liouville_solve(const PolarGrid& G, const PolarField& K_regular, double m);

// ---------------------------------------------------------------------------
// Isoperimetric control

// sup over a family of ellipses centred at x (inside D_{|x|/2}(x)) of vol_g / len_g^2,
// floored by the infinitesimal value 1/(4 pi).
double measure_isoperimetric(const MetricField<2>& g, const Vec<2>& x);

struct EigenratioReport {
  std::vector<Vec<2>> nodes;
  std::vector<double> ratio, Lambda, required_Lambda;  // lambda2/lambda1, given, (ratio)^{1/4} / (4 pi)
  std::vector<bool> holds;
  bool all_hold = true;
  std::vector<double> ring_radii, integral;  // int_{|x| > r} ((4 pi Lambda)^2 - 1)^2 / |x|^2 dx
  bool integral_finite = true;
  json to_json() const;
};

// Checks lambda2/lambda1 <= (4 pi Lambda)^4 at ring nodes r = 0.75 * 2^{-k} >= r_min.
EigenratioReport eigenratio_bound(const MetricField<2>& g, const std::function<double(const Vec<2>&)>& Lambda,
                                  double r_min = 1e-2, int n_angles = 8);

// ---------------------------------------------------------------------------
// Pipeline

struct Frames2DOptions {
  double r_in = 1e-3;
  int n_s = 64, n_theta = 64;
  std::vector<double> radii;  // empty: dyadic from 0.5
  int samples = 1024;
  double tol_circ = 1e-3;
  double kappa_tol = 1e-4;
  double r_check = 0.05;
  double growth_margin = 0.05;
  std::uint64_t seed = 1;
};

struct HypothesisVerdict {
  bool holds = false;
  json evidence;
};

struct Frames2DReport {
  std::string name;
  SingularityData sing;
  double structure_residual = 0, duality_residual = 0;
  double gauss_bonnet = 0;
  bool pipeline_run = false;
  PolarGrid grid;
  HodgeParts hodge;
  GaugeRotation gauge;
  CoulombFrame coulomb;
  ConformalCoordinates coords;
  LiouvilleResult liouville;
  double liouville_harmonic_residual = 0;  // Delta (log conformal factor + m log r - u)
  double growth_exponent = 0;  // vol_g(D_2r \ D_r) ~ r^p
  HypothesisVerdict hyp[4];
  bool obstructed = false;
  std::vector<std::string> flags;

  json to_json() const;
  std::string circulation_csv() const { return sing.csv(); }
  std::string fields_csv() const;  // r, theta, a, b, mu, phi1, phi2 (+ Phi1, Phi2)
};

Frames2DReport frames2d_pipeline(const Coframe2D& c, const Frames2DOptions& o = {});

}  // namespace cgeom
