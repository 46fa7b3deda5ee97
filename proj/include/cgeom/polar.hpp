#pragma once

// Spectral grid on the punctured disk {r_in <= |x| <= 1}: Chebyshev in s = log r,
// Fourier in theta. The (s, theta) chart is conformal to the Euclidean one
// (dx^2 + dy^2 = r^2 (ds^2 + dtheta^2)), so Dirichlet energies of 1-forms and the
// Hodge star on 1-forms read the same in both.
//
// Fields are (n_s + 1) x n_theta matrices: row = s node (ascending, row 0 = inner
// circle), column = theta node theta_k = 2 pi k / n_theta.

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "cgeom/metric.hpp"

namespace cgeom {

using PolarField = Eigen::MatrixXd;

// Components along ds and dtheta.
struct PolarForm {
  PolarField s, t;
};

struct PolarGrid {
  int n_s = 0, n_theta = 0;
  double r_in = 0;
  Eigen::VectorXd s, r, theta;
  Eigen::MatrixXd D;   // d/ds on the Chebyshev nodes
  Eigen::VectorXd ws;  // Clenshaw–Curtis weights in s

  static PolarGrid make(double r_in, int n_s, int n_theta);

  int rows() const { return n_s + 1; }
  Vec<2> point(int i, int k) const;
  PolarField zeros() const { return PolarField::Zero(rows(), n_theta); }
  PolarField radius() const;  // r at every node

  PolarField d_s(const PolarField& f) const { return D * f; }
  PolarField d_theta(const PolarField& f) const;
  PolarForm d(const PolarField& f) const { return {d_s(f), d_theta(f)}; }
  // coefficient of ds ^ dtheta in d(form)
  PolarField curl(const PolarForm& w) const { return d_s(w.t) - d_theta(w.s); }

  double integrate(const PolarField& f) const;  // int f ds dtheta
  // One value per ring: the counterclockwise circulation of w.
  Eigen::VectorXd circulation(const PolarForm& w) const;
  // Path integral of an exact form: along theta = 0 from the outer circle, then
  // counterclockwise along each ring. Ring means of w.t are removed first and
  // returned in *ring_means (2 pi * mean = circulation).
  PolarField integrate_form(const PolarForm& w, Eigen::VectorXd* ring_means = nullptr) const;

  PolarField sample(const std::function<double(const Vec<2>&)>& f) const;
  // Cartesian covector field -> (s, theta) components.
  PolarForm sample_form(const std::function<Vec<2>(const Vec<2>&)>& f) const;
  // ... and back, at one node.
  Vec<2> cartesian(const PolarForm& w, int i, int k) const;
};

// Symmetric coefficient field A (per node) in (s, theta) components.
struct PolarTensor {
  PolarField ss, st, tt;
};

// sqrt(det G) G^{-1} for the metric G = sum_i w^i (x) w^i of a coframe; conformally
// invariant, so the same for g and r^{2m} g.
PolarTensor energy_tensor(const PolarGrid& G, const PolarForm& w1, const PolarForm& w2);
PolarTensor identity_tensor(const PolarGrid& G);
PolarForm apply(const PolarTensor& A, const PolarForm& w);

enum class EndKind {
  dirichlet,  // u = value
  flux,       // (A (du - w))_s = value
  regular     // puncture of a smooth solution (A = id): mode 0 takes the flux value, mode k has u_s = |k| u
};

struct EndCondition {
  EndKind kind = EndKind::flux;
  Eigen::VectorXd value;  // per theta node; empty = 0
};

struct EllipticReport {
  bool decoupled = false;  // solved mode by mode (theta-independent A)
  double residual = 0;     // sup residual of the PDE and the end conditions, relative once the data exceed 1
};

// div(A (du - w)) = f (densities in ds dtheta). With flux conditions at both ends the
// solution is normalized to zero mean.
PolarField solve_elliptic(const PolarGrid& G, const PolarTensor& A, const PolarForm& w, const PolarField& f,
                          const EndCondition& inner, const EndCondition& outer, EllipticReport* rep = nullptr);

}  // namespace cgeom
