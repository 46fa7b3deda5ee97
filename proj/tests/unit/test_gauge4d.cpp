#include <doctest.h>

#include <cmath>

#include "cgeom/gauge4d.hpp"
#include "oracles/shooting.hpp"

using namespace cgeom;

TEST_CASE("radial minimizer reproduces the shooting oracle on the bump metric") {
  const auto sol = oracle::shoot_radial_el({}, 0.25, 1.0);
  REQUIRE(sol.mismatch < 1e-9);
  GaugeProblem p{catalog4("conformal_bump")};
  p.gamma_S = 0.21;
  p.gamma_L = 0.34;
  const GaugeReport rep = minimize(p);
  double d = 0;
  for (size_t i = 0; i < sol.r.size(); ++i) d = std::max(d, std::abs(sol.u[i] - rep.u_at(sol.r[i])));
  CHECK(d < 1e-5);
  CHECK(rep.el_sup < 1e-6);
  CHECK(rep.trace_monotone());
  CHECK(rep.ledger_core_holds());
  CHECK(rep.E < rep.E0);
  CHECK(rep.el_consistency < 1e-8);
  CHECK(rep.energy_rel < 1e-8);

  // closed-form export agrees with the node values
  const ScalarJetFn<4> u = radial_solution(rep);
  const Vec<4> x(0.3, 0.2, -0.1, 0.4);
  CHECK(u(seed<double, 4>(x, 0)).value() == doctest::Approx(rep.u_at(x.norm())).epsilon(1e-12));
  CHECK(rep.to_json().contains("ledger"));
}

TEST_CASE("energy of u = 0 is the Schouten energy; flat metric is a critical point") {
  GaugeProblem p{catalog4("flat4")};
  const ScalarJetFn<4> zero = [](const JetVec<double, 4>& x) { return Jet<double, 4>(0.0, x(0).order()); };
  double other = -1;
  CHECK(energy(p, zero, &other) == 0.0);
  CHECK(other == 0.0);
  // sphere: J = 2, volume of the annulus 0.25 < |x| < 1 in g = 4/(1+r^2)^2 delta
  GaugeProblem s{catalog4("round_sphere4")};
  const double vol = integrate_radial(Chart::radial4(0.25, 1.0, 64, 8, 8, RadialRule::gauss),
                                      [](double r) { return 16 / std::pow(1 + r * r, 4); });
  CHECK(energy(s, zero) == doctest::Approx(0.5 * 4 * vol).epsilon(1e-8));
}

TEST_CASE("energy rejects u that does not vanish on the boundary") {
  GaugeProblem p{catalog4("flat4")};
  const ScalarJetFn<4> one = [](const JetVec<double, 4>& x) { return Jet<double, 4>(1.0, x(0).order()) + 0.0 * x(0); };
  CHECK_THROWS_AS(energy(p, one), std::domain_error);
}
