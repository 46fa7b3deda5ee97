#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cgeom/jet.hpp"

namespace cgeom {

enum class ChartKind { polar_disk, radial_annulus4, box };
enum class RadialRule { trapezoid, gauss };

std::string to_string(ChartKind k);

// One coordinate chart with a tensor-product grid. Node index = row-major over
// axes (last axis fastest). Axes: polar (r, theta); radial4 (r, eta, xi1, xi2)
// with S^3 point (cos eta cos xi1, cos eta sin xi1, sin eta cos xi2, sin eta sin xi2);
// box: Cartesian.
class Chart {
 public:
  static Chart polar(double r_in, double r_out, int n_r, int n_theta,
                     RadialRule rule = RadialRule::trapezoid);
  static Chart radial4(double r_in, double r_out, int n_r, int n_eta, int n_xi,
                       RadialRule rule = RadialRule::trapezoid);
  static Chart box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const std::vector<int>& n);

  int dim() const { return dim_; }
  ChartKind kind() const { return kind_; }
  double r_in() const { return r_in_; }
  double r_out() const { return r_out_; }
  RadialRule rule() const { return rule_; }
  const std::vector<int>& res() const { return res_; }
  int num_axes() const { return static_cast<int>(axes_.size()); }
  int num_nodes() const { return n_nodes_; }

  const std::vector<double>& axis(int a) const { return axes_[a]; }
  const std::vector<double>& axis_weights(int a) const { return axis_w_[a]; }
  bool periodic(int a) const;
  bool uniform(int a) const;

  std::vector<int> multi(int node) const;
  int flat(const std::vector<int>& idx) const;
  std::vector<double> coords(int node) const;  // chart-axis coordinates
  Eigen::VectorXd cartesian(int node) const;
  double weight(int node) const;  // Euclidean quadrature weight dx (Jacobian included)

  // Nodes sharing all but the given axis, as flat indices in axis order.
  std::vector<int> line(int node, int a) const;

  bool operator==(const Chart& o) const;

 private:
  Chart() = default;
  void finish();

  int dim_ = 0;
  ChartKind kind_ = ChartKind::box;
  double r_in_ = 0, r_out_ = 1;
  RadialRule rule_ = RadialRule::trapezoid;
  std::vector<int> res_;
  std::vector<std::vector<double>> axes_, axis_w_;
  std::vector<int> stride_;
  int n_nodes_ = 0;
};

// Sampled field: one row per node, one column per component.
struct GridField {
  enum class Symmetry { none, symmetric2 };

  Chart chart;
  Eigen::MatrixXd data;
  int rank = 0;  // 0 scalar, 1 covector, 2 two-tensor
  Symmetry sym = Symmetry::none;
  int comp_dim = 1;  // index range of each tensor slot

  GridField(const Chart& c, int components) : chart(c), data(Eigen::MatrixXd::Zero(c.num_nodes(), components)) {}
  static GridField scalar(const Chart& c) { return GridField(c, 1); }
  static GridField tensor2(const Chart& c, int d, bool symmetric);

  int num_nodes() const { return static_cast<int>(data.rows()); }
  int components() const { return static_cast<int>(data.cols()); }
  double operator()(int node, int comp = 0) const { return data(node, comp); }
  double& operator()(int node, int comp = 0) { return data(node, comp); }
  void set2(int node, int i, int j, double v);  // enforces declared symmetry
  double get2(int node, int i, int j) const { return data(node, i * comp_dim + j); }
};

// Closed-form scalar field evaluated on jets.
template <int D>
using ScalarFn = std::function<Jet<double, D>(const JetVec<double, D>&)>;

// Exact-jet partials at every node (closed-form path, |multi| <= 4).
template <int D>
GridField derive(const Chart& chart, const ScalarFn<D>& f, const std::vector<int>& multi_index);
// Finite-difference partials along grid axes (sampled path, |multi| <= 2).
GridField derive(const GridField& field, const std::vector<int>& multi_index);

template <int D>
GridField sample(const Chart& chart, const ScalarFn<D>& f);

double integrate(const GridField& field, const GridField& weight);
double integrate(const GridField& field);  // weight 1
// Radial integrand f(r) over a radial4 chart: 2 pi^2 int f r^3 dr with the chart's radial rule.
double integrate_radial(const Chart& chart, const std::function<double(double)>& f);

// sup over dyadic lambda of lambda * sqrt(area{|f| > lambda}); a diagnostic only.
double lorentz_weak_l2_proxy(const GridField& field);

// Fixed-order compensated sum.
class KahanSum {
 public:
  void add(double v) {
    double t = s_ + v;
    if (std::abs(s_) >= std::abs(v))
      c_ += (s_ - t) + v;
    else
      c_ += (v - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0, c_ = 0;
};

}  // namespace cgeom
