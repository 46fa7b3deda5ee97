#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "cgeom/chart.hpp"
#include "cgeom/jet.hpp"

namespace cgeom {

template <int D>
using Vec = Eigen::Matrix<double, D, 1>;
template <int D>
using Mat = Eigen::Matrix<double, D, D>;

// Closed-form metric: Cartesian components as a function of jet coordinates.
template <int D>
using MetricFn = std::function<JetMat<double, D>(const JetVec<double, D>&)>;

// A metric on one chart, closed-form (exact jets) or sampled on a Cartesian box
// (finite-difference jets, order 2: enough for Riemann, not for Bach).
template <int D>
class MetricField {
 public:
  static MetricField closed(std::string name, MetricFn<D> fn, int max_order = kMaxJetOrder);
  static MetricField sampled(std::string name, const GridField& g);
  // Sample a closed-form metric onto a box chart.
  static MetricField sampled_from(const MetricField& closed_form, const Chart& box);

  const std::string& name() const { return name_; }
  bool closed_form() const { return static_cast<bool>(fn_); }
  int max_order() const { return max_order_; }
  const MetricFn<D>& fn() const { return fn_; }
  const GridField& samples() const { return *samples_; }

  // Metric jets of the requested order at x (closed form) ...
  JetMat<double, D> jets(const Vec<D>& x, int order) const;
  // ... or at a node of the sample chart (sampled: order <= 2).
  JetMat<double, D> node_jets(int node, int order) const;

  Mat<D> value(const Vec<D>& x) const;

  // Euclidean radius range on which the closed form is valid.
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  MetricField& with_domain(double r_min, double r_max) {
    r_min_ = r_min;
    r_max_ = r_max;
    return *this;
  }
  // O(D)-invariant: components depend on |x| only through an equivariant form.
  bool radial() const { return radial_; }
  MetricField& set_radial(bool r = true) {
    radial_ = r;
    return *this;
  }

 private:
  std::string name_;
  MetricFn<D> fn_;
  int max_order_ = kMaxJetOrder;
  double r_min_ = 0, r_max_ = 1e300;
  bool radial_ = false;
  std::shared_ptr<const GridField> samples_;
  std::shared_ptr<const std::vector<GridField>> d1_, d2_;  // d2 indexed by a*D+b, a<=b
};

// Positive-definiteness + inverse sanity at one point; throws std::domain_error.
template <int D>
void check_metric(const Mat<D>& g, double inverse_tol);

// Values of a jet matrix / vector at the expansion point.
template <int D>
Mat<D> values(const JetMat<double, D>& m) {
  Mat<D> r;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) r(i, j) = m(i, j).value();
  return r;
}

// Inverse of a symmetric positive-definite jet matrix (Gauss–Jordan, no pivoting).
template <int D>
JetMat<double, D> jet_inverse(const JetMat<double, D>& g);

template <int D>
Jet<double, D> jet_det(const JetMat<double, D>& g);

}  // namespace cgeom
