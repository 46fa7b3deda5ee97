#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cgeom/frames2d.hpp"
#include "cgeom/rng.hpp"

using namespace cgeom;
using std::numbers::pi;

namespace {

double sup(const PolarField& f) { return f.cwiseAbs().maxCoeff(); }
// remove the mean over nodes
PolarField centred(const PolarField& f) { return f.array() - f.mean(); }

}  // namespace

TEST_CASE("connection forms of the flat Cartesian and polar frames") {
  const Coframe2D cart = catalog_coframe("flat2", {{"frame", "cartesian"}});
  const Coframe2D pol = catalog_coframe("flat2", {{"frame", "polar"}});
  for (const Vec<2>& x : {Vec<2>(0.3, 0.4), Vec<2>(-0.6, 0.1), Vec<2>(0.05, -0.02)}) {
    CHECK(connection_at(cart, x).w12.norm() < 1e-15);
    // d theta = (-y dx + x dy) / r^2
    const Vec<2> dtheta = Vec<2>(-x(1), x(0)) / x.squaredNorm();
    const auto cp = connection_at(pol, x, true);
    CHECK((cp.w12 - dtheta).norm() < 1e-12 * dtheta.norm());
    CHECK(cp.structure < 1e-12);
    CHECK(cp.duality < 1e-14);
    CHECK(std::abs(cp.dw12) < 1e-9 / x.squaredNorm());
  }
  CHECK(frame_degree(cart, 0.5) == 0);
  CHECK(frame_degree(pol, 0.5) == 1);
  CHECK(frame_degree([](double t) { return Vec<2>(std::cos(2 * t), std::sin(2 * t)); }) == 2);
  CHECK(frame_degree([](double t) { return Vec<2>(std::cos(-3 * t), std::sin(-3 * t)); }) == -3);
}

TEST_CASE("pullback by z^n: circulation 2 pi (n - 1) at every radius") {
  for (int n : {2, 3, 4}) {
    const Coframe2D c = catalog_coframe("polar_singular", {{"n", std::to_string(n)}});
    const SingularityData s = circulation(c, dyadic_radii(0.5, 1e-3));
    CHECK(s.degree == 0);
    for (double v : s.circulation) CHECK(std::abs(v - 2 * pi * (n - 1)) < 1e-3);
    CHECK(s.m == doctest::Approx(-(n - 1)).epsilon(1e-9));
    CHECK(s.convergent);
    CHECK_FALSE(s.divergent);
    CHECK(gauss_bonnet_disk(c) == doctest::Approx(2 * pi).epsilon(1e-9));
  }
}

TEST_CASE("alpha is invariant under smooth rotations of the frame") {
  const Coframe2D c = catalog_coframe("polar_singular", {{"n", "2"}});
  const double a0 = circulation(c, dyadic_radii(0.5, 1e-3)).alpha;
  std::mt19937_64 rng(7);
  for (int k = 0; k < 3; ++k) {
    const Vec<2> ctr(uniform(rng, -0.4, 0.4), uniform(rng, -0.4, 0.4));
    const Coframe2D r = rotate(c, bump_angle(uniform(rng, -2, 2), ctr, uniform(rng, 0.2, 0.5)));
    CHECK(circulation(r, dyadic_radii(0.5, 1e-3)).alpha == doctest::Approx(a0).epsilon(1e-9));
  }
}

TEST_CASE("essential singularity is flagged divergent") {
  const Coframe2D c = catalog_coframe("essential");
  const SingularityData s = circulation(c, dyadic_radii(0.5, c.r_min));
  CHECK(s.divergent);
  CHECK(s.abs_growth > 0.5);
}

TEST_CASE("Hodge decomposition of exact, harmonic and mixed forms") {
  const PolarGrid G = PolarGrid::make(0.05, 32, 32);
  const auto f = [](const Vec<2>& x) { return x(0) * x(0) * x(1) + 0.5 * x(1); };
  const PolarField F = G.sample(f);

  const HodgeParts e = hodge_decompose(G, G.d(F));
  CHECK(sup(centred(e.a) - centred(F)) < 1e-10);
  CHECK(sup(e.b) < 1e-10);
  CHECK(sup(e.h.s) + sup(e.h.t) < 1e-10);
  CHECK(e.residual < 1e-10);

  // d theta = (0, 1) in (s, theta) components
  PolarForm dth{G.zeros(), PolarField::Ones(G.rows(), G.n_theta)};
  const HodgeParts h = hodge_decompose(G, dth);
  CHECK(sup(h.h.t.array() - 1.0) < 1e-10);
  CHECK(sup(h.h.s) < 1e-10);

  const PolarField R2 = G.sample([](const Vec<2>& x) { return x.squaredNorm(); });
  PolarForm mixed = G.d(R2);
  mixed.t.array() += 1.0;
  const HodgeParts m = hodge_decompose(G, mixed);
  CHECK(sup(centred(m.a) - centred(R2)) < 1e-10);
  CHECK(sup(m.h.t.array() - 1.0) < 1e-10);
  CHECK(m.dh < 1e-9);
  CHECK(m.dstar_h < 1e-9);
}

TEST_CASE("Coulomb gauge undoes a smooth rotation of the flat frame") {
  const ScalarJetFn<2> psi = bump_angle(0.8, Vec<2>(0.2, -0.1), 0.4);
  const Coframe2D c = rotate(catalog_coframe("flat2"), psi);
  const PolarGrid G = PolarGrid::make(0.05, 48, 48);
  const PolarCoframe w = sample_coframe(G, c);
  const CoulombFrame cf = coulomb_minimize(G, w, 0.0);
  const PolarField P = G.sample([&](const Vec<2>& x) { return psi(seed<double, 2>(x, 0)).value(); });
  // u = -psi + const
  CHECK(sup(centred(cf.u + P)) < 1e-8);
  CHECK(cf.energy_after < 1e-14 + 1e-10 * cf.energy_before);
  CHECK(cf.div_residual < 1e-8);
  CHECK(sup(cf.mu) < 1e-8);
}

TEST_CASE("eigenratio bound: flat holds, diag(1,4) reports the required Lambda") {
  const auto flat = catalog2("flat2");
  const EigenratioReport rf = eigenratio_bound(flat, [](const Vec<2>&) { return 1 / (4 * pi); });
  CHECK(rf.all_hold);
  for (double r : rf.ratio) CHECK(r == doctest::Approx(1.0));

  const auto aniso = MetricField<2>::closed("diag14", [](const JetVec<double, 2>& x) {
    JetMat<double, 2> g;
    g(0, 0) = Jet<double, 2>(1.0, x(0).order());
    g(1, 1) = Jet<double, 2>(4.0, x(0).order());
    g(0, 1) = g(1, 0) = Jet<double, 2>(0.0, x(0).order());
    return g;
  });
  const EigenratioReport ra = eigenratio_bound(aniso, [&](const Vec<2>& x) { return measure_isoperimetric(aniso, x); });
  for (size_t i = 0; i < ra.ratio.size(); ++i) {
    CHECK(ra.ratio[i] == doctest::Approx(4.0));
    CHECK(ra.required_Lambda[i] == doctest::Approx(std::sqrt(2.0) / (4 * pi)));
    CHECK(ra.Lambda[i] == doctest::Approx(1 / (4 * pi)).epsilon(1e-3));
  }
  CHECK_FALSE(ra.all_hold);
  const EigenratioReport rb = eigenratio_bound(aniso, [](const Vec<2>&) { return std::sqrt(2.0) / (4 * pi) + 1e-12; });
  CHECK(rb.all_hold);
}

TEST_CASE("Liouville on the round sphere recovers log(2 / (1 + r^2))") {
  const PolarGrid G = PolarGrid::make(1e-3, 48, 32);
  const PolarField f = G.sample([](const Vec<2>& x) { return 4 / sq(1 + x.squaredNorm()); });
  const LiouvilleResult L = liouville_solve(G, f, 0.0);
  const PolarField want = G.sample([](const Vec<2>& x) { return std::log(2 / (1 + x.squaredNorm())); });
  CHECK(sup(L.u - want) < 1e-6);
}

TEST_CASE("pipeline on the z^2 pullback: metric recovery and z^2 coordinates") {
  const Frames2DReport R = frames2d_pipeline(catalog_coframe("polar_singular", {{"n", "2"}}));
  REQUIRE(R.pipeline_run);
  CHECK_FALSE(R.obstructed);
  CHECK(R.sing.m == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(R.coords.metric_error < 1e-4);
  CHECK(R.coords.branched);
  CHECK(R.coords.model_error < 1e-3);
  CHECK(R.hyp[0].holds);
  CHECK(R.hyp[1].holds);
  CHECK(R.hyp[2].holds);
  CHECK(R.hyp[3].holds);
}

TEST_CASE("annulus_d metric is obstructed") {
  const Frames2DReport R = frames2d_pipeline(catalog_coframe("annulus_d"));
  CHECK(R.obstructed);
}
