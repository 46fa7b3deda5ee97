#include <doctest.h>

#include <cmath>

#include "cgeom/conformal.hpp"

using namespace cgeom;

namespace {

Jet<double, 4> r2(const JetVec<double, 4>& x) { return x(0) * x(0) + x(1) * x(1) + x(2) * x(2) + x(3) * x(3); }

const ConformalFactor<4> kSphere{"sphere", [](const JetVec<double, 4>& x) { return log(2.0 / (1.0 + r2(x))); }};

Chart small_chart() { return Chart::radial4(0.3, 0.9, 8, 3, 8, RadialRule::gauss); }

}  // namespace

TEST_CASE("e^{2u} flat with u = log(2/(1+|x|^2)) is the round sphere") {
  const auto gu = conformal_metric(catalog4("flat4"), kSphere);
  const auto s4 = catalog4("round_sphere4");
  for (const Vec<4>& x : {Vec<4>(0.1, 0.2, -0.3, 0.4), Vec<4>(1.5, 0, 0, -0.7)}) {
    CHECK((gu.value(x) - s4.value(x)).cwiseAbs().maxCoeff() < 1e-15);
    const auto c = curvature_at<4>(gu, x);
    CHECK(c.J == doctest::Approx(2.0).epsilon(1e-11));
  }
  const auto [g2, rep] = conformal_change(catalog4("flat4"), kSphere, small_chart());
  CHECK(rep.schouten < 1e-9);
  CHECK(rep.J < 1e-9);
  CHECK(rep.bach < 1e-9);
  CHECK(rep.hessian < 1e-9);
  CHECK(rep.weyl_energy_g < 1e-20);
}

TEST_CASE("transformation laws on a metric with Weyl curvature") {
  const ConformalFactor<4> u{"mixed", [](const JetVec<double, 4>& x) { return 0.3 * sin(x(0)) * x(1) + 0.2 * x(2); }};
  const auto [gu, rep] = conformal_change(catalog4("perturbed", {{"eps", "0.2"}}), u, small_chart());
  CHECK(rep.schouten < 1e-7);
  CHECK(rep.J < 1e-7);
  CHECK(rep.bach < 1e-7);
  CHECK(rep.hessian < 1e-7);
  CHECK(rep.weyl_energy_g > 1e-6);
  CHECK(rep.weyl_energy_rel < 1e-6);
  CHECK(rep.du4_g > 0);
}

TEST_CASE("inversion of an ALE metric") {
  // g = (1 + a/|y|^2) delta, iota(x) = x/|x|^2  =>  h = (1 + a |x|^2) delta
  const auto h = invert_compactify(catalog4("ale", {{"a", "0.7"}, {"R", "1"}}));
  for (const Vec<4>& x : {Vec<4>(0.1, 0.2, -0.3, 0.4), Vec<4>(0.02, 0, 0.05, -0.01)}) {
    const Mat<4> want = (1 + 0.7 * x.squaredNorm()) * Mat<4>::Identity();
    CHECK((h.value(x) - want).cwiseAbs().maxCoeff() < 1e-13);
  }
  const DecayFit fit = compactify_decay(h, 2.0, 0.5);
  CHECK(fit.ok);
  CHECK(fit.exponent == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("blow-up rescaling identities") {
  const auto g0 = catalog4("anisotropic", {{"eps", "0.3"}});
  const auto h = blowup_rescale(g0, 0.25);
  const Vec<4> y(0.4, -0.2, 0.8, 0.1);
  CHECK((h.value(y) - g0.value(0.25 * y)).cwiseAbs().maxCoeff() == 0.0);
  // J scales by s^2 (independent: compare point curvature)
  CHECK(curvature_at<4>(h, y).J == doctest::Approx(0.0625 * curvature_at<4>(g0, Vec<4>(0.25 * y)).J).epsilon(1e-11));
  const ScalingReport sr = scaling_report(g0, 0.5, small_chart(), Vec<4>(0.5, 0, 0, 0), 0.25);
  CHECK(sr.max() < 1e-10);
  CHECK(sr.ball_lhs > 0);
  CHECK_THROWS_AS(blowup_rescale(g0, 1.5), std::invalid_argument);
}
