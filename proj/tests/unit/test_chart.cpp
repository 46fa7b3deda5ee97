#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cgeom/chart.hpp"

using namespace cgeom;
using std::numbers::pi;

TEST_CASE("polar chart quadrature integrates polynomials in r exactly (gauss rule)") {
  const Chart c = Chart::polar(0.2, 1.0, 12, 16, RadialRule::gauss);
  GridField one = GridField::scalar(c), r2 = GridField::scalar(c);
  for (int n = 0; n < c.num_nodes(); ++n) {
    one(n) = 1;
    r2(n) = c.cartesian(n).squaredNorm();
  }
  CHECK(integrate(one) == doctest::Approx(pi * (1 - 0.04)).epsilon(1e-13));
  // int r^2 r dr dtheta = pi/2 (1 - r_in^4)
  CHECK(integrate(r2) == doctest::Approx(pi / 2 * (1 - std::pow(0.2, 4))).epsilon(1e-13));
}

TEST_CASE("radial4 chart volume of the annulus") {
  const Chart c = Chart::radial4(0.3, 0.9, 10, 8, 8, RadialRule::gauss);
  GridField one = GridField::scalar(c);
  one.data.setOnes();
  const double exact = pi * pi / 2 * (std::pow(0.9, 4) - std::pow(0.3, 4));
  CHECK(integrate(one) == doctest::Approx(exact).epsilon(1e-12));
  CHECK(integrate_radial(c, [](double) { return 1.0; }) == doctest::Approx(exact).epsilon(1e-12));
  // cartesian nodes lie on the sphere of their radial coordinate
  for (int n = 0; n < c.num_nodes(); n += 37)
    CHECK(c.cartesian(n).norm() == doctest::Approx(c.coords(n)[0]).epsilon(1e-14));
}

TEST_CASE("closed-form derive returns exact partials at the nodes") {
  const Chart c = Chart::polar(0.1, 1.0, 8, 8);
  const ScalarFn<2> f = [](const JetVec<double, 2>& x) { return x(0) * x(0) * x(1) + sin(x(1)); };
  const GridField fxy = derive<2>(c, f, {0, 1});
  const GridField fyy = derive<2>(c, f, {1, 1});
  for (int n = 0; n < c.num_nodes(); ++n) {
    const auto p = c.cartesian(n);
    CHECK(fxy(n) == doctest::Approx(2 * p(0)).epsilon(1e-14));
    CHECK(fyy(n) == doctest::Approx(-std::sin(p(1))).epsilon(1e-13));
  }
  CHECK_THROWS_AS(derive<2>(c, f, {0, 0, 1, 1, 0}), capability_error);
}

TEST_CASE("sampled derivatives on a box converge at second order") {
  auto err = [](int n) {
    Eigen::VectorXd lo(2), hi(2);
    lo << -1, -1;
    hi << 1, 1;
    const Chart c = Chart::box(lo, hi, {n, n});
    GridField f = GridField::scalar(c);
    for (int k = 0; k < c.num_nodes(); ++k) {
      const auto p = c.cartesian(k);
      f(k) = std::sin(p(0)) * std::exp(p(1));
    }
    const GridField fx = derive(f, {0});
    double e = 0;
    for (int k = 0; k < c.num_nodes(); ++k) {
      const auto p = c.cartesian(k);
      e = std::max(e, std::abs(fx(k) - std::cos(p(0)) * std::exp(p(1))));
    }
    return e;
  };
  const double e1 = err(17), e2 = err(33);
  CHECK(e1 / e2 > 3.0);
}

TEST_CASE("chart validation") {
  CHECK_THROWS_AS(Chart::polar(0.5, 0.2, 16, 16), std::invalid_argument);
  CHECK_THROWS_AS(Chart::polar(0.1, 1.0, 4, 16), std::invalid_argument);
  CHECK_THROWS_AS(Chart::radial4(0.1, 1.0, 6, 8, 8), std::invalid_argument);
  const Chart c = Chart::radial4(0.1, 1.0, 8, 8, 8);
  CHECK(c.flat(c.multi(123)) == 123);
}
