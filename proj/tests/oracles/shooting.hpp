#pragma once
// Independent oracle for the radial gauge problem on g = e^{2 phi} xi.
//
// With w = u + phi the gauged metric is e^{2w} xi, so in flat radial terms
//   F  = J^{g_u} = -e^{-2w} (w'' + 3 w'/r + w'^2)
//   0  = Delta_{g_u} F  <=>  F'' + 3 F'/r + 2 w' F' = 0
// and u = u' = 0 at both ends becomes w = phi, w' = phi' there. Shooting from the
// inner radius on (F, F') with Newton on the two outer mismatches, continued in
// the bump amplitude from the trivial solution.
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/numeric/odeint.hpp>

namespace oracle {

struct GaussBump {
  double amp = 0.1, center = 0.6, width = 0.02;
  double phi(double r) const { return amp * std::exp(-(r - center) * (r - center) / width); }
  double dphi(double r) const { return -2 * (r - center) / width * phi(r); }
};

struct ShootingSolution {
  std::vector<double> r, u;  // dense samples
  double mismatch = 0;       // final |w(1) - phi(1)| + |w'(1) - phi'(1)|
  double u_at(double x) const {
    // samples are uniform; cubic Lagrange on the nearest four
    const double h = r[1] - r[0];
    int k = static_cast<int>((x - r[0]) / h) - 1;
    k = std::max(0, std::min(k, static_cast<int>(r.size()) - 4));
    double s = 0;
    for (int i = 0; i < 4; ++i) {
      double l = 1;
      for (int j = 0; j < 4; ++j)
        if (j != i) l *= (x - r[k + j]) / (r[k + i] - r[k + j]);
      s += l * u[k + i];
    }
    return s;
  }
};

inline ShootingSolution shoot_radial_el(GaussBump bump, double r_in, double r_out, int samples = 4001) {
  using State = std::array<double, 4>;  // w, w', F, F'
  namespace ode = boost::numeric::odeint;
  auto rhs = [](const State& y, State& dy, double r) {
    const double w = y[0], w1 = y[1], F = y[2], F1 = y[3];
    dy[0] = w1;
    dy[1] = -3 * w1 / r - w1 * w1 - std::exp(2 * w) * F;
    dy[2] = F1;
    dy[3] = -(3 / r + 2 * w1) * F1;
  };
  auto integrate = [&](const GaussBump& b, double F0, double F10, std::vector<State>* path) {
    State y{b.phi(r_in), b.dphi(r_in), F0, F10};
    auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    if (path) {
      const int n = samples;
      std::vector<double> grid(n);
      for (int i = 0; i < n; ++i) grid[i] = r_in + (r_out - r_in) * i / (n - 1);
      grid.back() = r_out;
      path->clear();
      ode::integrate_times(stepper, rhs, y, grid.begin(), grid.end(), 1e-4,
                           [&](const State& s, double) { path->push_back(s); });
    } else {
      ode::integrate_adaptive(stepper, rhs, y, r_in, r_out, 1e-4);
    }
    return std::array<double, 2>{y[0] - b.phi(r_out), y[1] - b.dphi(r_out)};
  };

  double F0 = 0, F10 = 0;
  const int steps = 20;
  GaussBump b = bump;
  double last = 0;
  for (int k = 1; k <= steps; ++k) {
    b.amp = bump.amp * k / steps;
    for (int it = 0; it < 50; ++it) {
      const auto m = integrate(b, F0, F10, nullptr);
      last = std::abs(m[0]) + std::abs(m[1]);
      if (last < 1e-12) break;
      const double h0 = 1e-6 * (1 + std::abs(F0)), h1 = 1e-6 * (1 + std::abs(F10));
      const auto a = integrate(b, F0 + h0, F10, nullptr);
      const auto c = integrate(b, F0, F10 + h1, nullptr);
      const double j00 = (a[0] - m[0]) / h0, j10 = (a[1] - m[1]) / h0;
      const double j01 = (c[0] - m[0]) / h1, j11 = (c[1] - m[1]) / h1;
      const double det = j00 * j11 - j01 * j10;
      if (det == 0) throw std::runtime_error("shooting: singular Jacobian");
      F0 -= (j11 * m[0] - j01 * m[1]) / det;
      F10 -= (-j10 * m[0] + j00 * m[1]) / det;
    }
  }
  if (!(last < 1e-9)) throw std::runtime_error("shooting: Newton did not converge");

  std::vector<State> path;
  ShootingSolution sol;
  const auto m = integrate(bump, F0, F10, &path);
  sol.mismatch = std::abs(m[0]) + std::abs(m[1]);
  for (int i = 0; i < samples; ++i) {
    const double r = r_in + (r_out - r_in) * i / (samples - 1);
    sol.r.push_back(r);
    sol.u.push_back(path[i][0] - bump.phi(r));
  }
  return sol;
}

}  // namespace oracle
