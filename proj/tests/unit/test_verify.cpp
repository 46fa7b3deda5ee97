#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cgeom/verify.hpp"

using namespace cgeom;
using std::numbers::pi;

TEST_CASE("Chern-Gauss-Bonnet on annuli") {
  const CGBReport f = cgb_boundary_check(catalog4("flat4"), 0.5, 1.0);
  CHECK(std::abs(f.outer) > 1.0);
  CHECK(std::abs(f.outer + f.inner) < 1e-8);
  CHECK(f.residual < 1e-8);
  CHECK(std::abs(f.weyl) + std::abs(f.j_sch) < 1e-12);

  const CGBReport s = cgb_boundary_check(catalog4("round_sphere4"), 0.5, 1.0);
  CHECK(s.residual < 1e-5);
  CHECK(std::abs(s.j_sch) > 1.0);
}

TEST_CASE("Gauss equation for immersed hypersurfaces") {
  const Chart ch = Chart::radial4(0.3, 0.9, 8, 4, 8, RadialRule::gauss);
  const auto flat = gauss_codazzi_check(immersion("flat_graph"), ch);
  CHECK(flat.residual < 1e-7);
  CHECK(flat.max_riem < 1e-12);

  const auto sph = gauss_codazzi_check(immersion("sphere4"), ch);
  CHECK(sph.residual < 1e-7);
  CHECK(sph.sectional_min == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sph.sectional_max == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sph.tangential_II < 1e-10);

  const auto bump = gauss_codazzi_check(immersion("graph_bump"), ch);
  CHECK(bump.residual < 1e-6);
  CHECK(bump.max_riem > 1e-3);

  // invariance under a rigid motion of R^5
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(5, 5);
  const double c = std::cos(0.7), s = std::sin(0.7);
  Q(0, 0) = c, Q(0, 4) = -s, Q(4, 0) = s, Q(4, 4) = c;
  Eigen::VectorXd t(5);
  t << 1, -2, 0.5, 0, 3;
  const auto moved = gauss_codazzi_check(rigid_motion(immersion("graph_bump"), Q, t), ch);
  CHECK(moved.max_riem == doctest::Approx(bump.max_riem).epsilon(1e-10));
}

TEST_CASE("geodesic balls of the flat metric are Euclidean") {
  const GrowthTable t = volume_growth_scan(catalog4("flat4"), Vec<4>::Zero(), {0.1, 0.2, 0.3}, 64);
  CHECK(t.bounded);
  CHECK(t.euclidean_like);
  for (const auto& r : t.rows) CHECK(r.theta == doctest::Approx(pi * pi / 2).epsilon(0.1));
}

TEST_CASE("epsilon-regularity table of a flat metric is trivial") {
  const EpsTable t = eps_regularity_scan(catalog4("flat4"), {{Vec<4>(0.3, 0, 0, 0), 0.1}}, 2.0, 24);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].lhs < 1e-12);
}

TEST_CASE("Sobolev constant estimates: seeded and monotone") {
  const auto g = catalog4("flat4");
  const SobolevConstants a = estimate_constants(g, 20, 5), b = estimate_constants(g, 20, 5);
  CHECK(a.gamma_S == b.gamma_S);
  CHECK(a.gamma_L == b.gamma_L);
  for (size_t i = 1; i < a.running_S.size(); ++i) CHECK(a.running_S[i] >= a.running_S[i - 1]);
  CHECK(a.gamma_S > 0);
}
