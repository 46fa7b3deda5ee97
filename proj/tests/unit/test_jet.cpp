#include <doctest.h>

#include <cmath>

#include "cgeom/jet.hpp"

using namespace cgeom;
using J2 = Jet<double, 2>;

TEST_CASE("jet derivatives of exp(x) sin(y) match hand-computed partials") {
  const Eigen::Vector2d p(0.3, -0.7);
  const auto x = seed<double, 2>(p, 4);
  const J2 f = exp(x(0)) * sin(x(1));
  const double e = std::exp(p(0)), s = std::sin(p(1)), c = std::cos(p(1));
  CHECK(f.value() == doctest::Approx(e * s).epsilon(1e-15));
  CHECK(f.derivative({1, 0}) == doctest::Approx(e * s).epsilon(1e-14));
  CHECK(f.derivative({0, 1}) == doctest::Approx(e * c).epsilon(1e-14));
  CHECK(f.derivative({2, 2}) == doctest::Approx(-e * s).epsilon(1e-13));
  CHECK(f.derivative({1, 3}) == doctest::Approx(-e * c).epsilon(1e-13));
  CHECK(f.derivative({0, 4}) == doctest::Approx(e * s).epsilon(1e-13));
}

TEST_CASE("quotient, log, sqrt and pow agree with finite differences") {
  const Eigen::Vector2d p(0.4, 0.9);
  auto F = [](double a, double b) { return std::log(1 + a * a + b) / std::sqrt(2 + a * b) + std::pow(1.5 + a, 0.7); };
  const auto x = seed<double, 2>(p, 2);
  const J2 f = log(1.0 + x(0) * x(0) + x(1)) / sqrt(2.0 + x(0) * x(1)) + pow(1.5 + x(0), 0.7);
  const double h = 1e-4;
  const double fxy = (F(p(0) + h, p(1) + h) - F(p(0) + h, p(1) - h) - F(p(0) - h, p(1) + h) +
                      F(p(0) - h, p(1) - h)) / (4 * h * h);
  const double fx = (F(p(0) + h, p(1)) - F(p(0) - h, p(1))) / (2 * h);
  CHECK(f.value() == doctest::Approx(F(p(0), p(1))).epsilon(1e-14));
  CHECK(f.derivative({1, 0}) == doctest::Approx(fx).epsilon(1e-7));
  CHECK(f.derivative({1, 1}) == doctest::Approx(fxy).epsilon(1e-6));
}

TEST_CASE("d() lowers the order and matches derivative()") {
  const auto x = seed<double, 2>(Eigen::Vector2d(0.2, 0.1), 4);
  const J2 f = cos(x(0) * x(1)) + atan2(x(1), 1.0 + x(0));
  const J2 fy = f.d(1);
  CHECK(fy.order() == 3);
  CHECK(fy.derivative({2, 1}) == doctest::Approx(f.derivative({2, 2})).epsilon(1e-12));
  CHECK_THROWS_AS(f.derivative({3, 2}), capability_error);
  CHECK(f.truncated(2).order() == 2);
}

TEST_CASE("polynomial jets are exact") {
  const auto x = seed<double, 2>(Eigen::Vector2d(1.5, -2.0), 4);
  const J2 f = x(0) * x(0) * x(0) * x(1) - 3.0 * x(1) * x(1);
  CHECK(f.derivative({3, 1}) == 6.0);
  CHECK(f.derivative({2, 1}) == 6.0 * 1.5);
  CHECK(f.derivative({0, 2}) == -6.0);
  CHECK(f.derivative({0, 3}) == 0.0);
}
