#include "cgeom/metric.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace cgeom {

template <int D>
MetricField<D> MetricField<D>::closed(std::string name, MetricFn<D> fn, int max_order) {
  MetricField m;
  m.name_ = std::move(name);
  m.fn_ = std::move(fn);
  m.max_order_ = max_order;
  return m;
}

template <int D>
MetricField<D> MetricField<D>::sampled(std::string name, const GridField& g) {
  if (g.chart.kind() != ChartKind::box || g.chart.dim() != D || g.components() != D * D)
    throw std::invalid_argument("sampled metric: needs a D x D field on a Cartesian box");
  MetricField m;
  m.name_ = std::move(name);
  m.max_order_ = 2;
  for (int n = 0; n < g.num_nodes(); ++n) {
    Mat<D> v;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) v(i, j) = g.get2(n, i, j);
    check_metric<D>(v, 1e-8);
  }
  m.samples_ = std::make_shared<GridField>(g);
  auto d1 = std::make_shared<std::vector<GridField>>();
  auto d2 = std::make_shared<std::vector<GridField>>();
  for (int a = 0; a < D; ++a) d1->push_back(derive(g, {a}));
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) d2->push_back(b >= a ? derive(g, {a, b}) : GridField(g.chart, 0));
  m.d1_ = d1;
  m.d2_ = d2;
  return m;
}

template <int D>
MetricField<D> MetricField<D>::sampled_from(const MetricField& cf, const Chart& box) {
  GridField g = GridField::tensor2(box, D, true);
  for (int n = 0; n < box.num_nodes(); ++n) {
    Vec<D> x = box.cartesian(n);
    Mat<D> v = cf.value(x);
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j) g.set2(n, i, j, v(i, j));
  }
  return sampled(cf.name() + "/sampled", g);
}

template <int D>
JetMat<double, D> MetricField<D>::jets(const Vec<D>& x, int order) const {
  if (!fn_) throw capability_error("metric: closed-form jets requested from a sampled metric");
  if (order > max_order_) throw capability_error("metric: requested jet order exceeds capability");
  return fn_(seed<double, D>(x, order));
}

template <int D>
JetMat<double, D> MetricField<D>::node_jets(int node, int order) const {
  if (!samples_) throw std::logic_error("metric: node jets need a sampled metric");
  if (order > 2) throw capability_error("metric: sampled metrics carry 2 derivatives");
  JetMat<double, D> m;
  const GridField& g = *samples_;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      const int c = i * D + j;
      Jet<double, D> v(g(node, c), order);
      if (order >= 1)
        for (int a = 0; a < D; ++a) {
          std::array<int, D> al{};
          al[a] = 1;
          v.set_derivative(al, (*d1_)[a](node, c));
        }
      if (order >= 2)
        for (int a = 0; a < D; ++a)
          for (int b = a; b < D; ++b) {
            std::array<int, D> al{};
            ++al[a];
            ++al[b];
            v.set_derivative(al, (*d2_)[a * D + b](node, c));
          }
      m(i, j) = v;
    }
  return m;
}

template <int D>
Mat<D> MetricField<D>::value(const Vec<D>& x) const {
  return values<D>(jets(x, 0));
}

template <int D>
void check_metric(const Mat<D>& g, double tol) {
  if (!g.allFinite()) throw std::domain_error("metric: non-finite component");
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > tol * (1 + g.cwiseAbs().maxCoeff()))
    throw std::domain_error("metric: not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat<D>> es(g);
  if (es.eigenvalues().minCoeff() <= 0) throw std::domain_error("metric: not positive definite");
  const Mat<D> inv = g.inverse();
  if ((g * inv - Mat<D>::Identity()).cwiseAbs().maxCoeff() > tol)
    throw std::domain_error("metric: inverse check failed");
}

template <int D>
JetMat<double, D> jet_inverse(const JetMat<double, D>& g) {
  JetMat<double, D> a = g;
  JetMat<double, D> inv;
  const int o = g(0, 0).order();
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) inv(i, j) = Jet<double, D>(i == j ? 1.0 : 0.0, o);
  for (int c = 0; c < D; ++c) {
    const Jet<double, D> p = inverse(a(c, c));
    for (int j = 0; j < D; ++j) {
      a(c, j) = a(c, j) * p;
      inv(c, j) = inv(c, j) * p;
    }
    for (int r = 0; r < D; ++r) {
      if (r == c) continue;
      const Jet<double, D> f = a(r, c);
      for (int j = 0; j < D; ++j) {
        a(r, j) -= f * a(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

template <int D>
Jet<double, D> jet_det(const JetMat<double, D>& g) {
  JetMat<double, D> a = g;
  Jet<double, D> det(1.0, g(0, 0).order());
  for (int c = 0; c < D; ++c) {
    det *= a(c, c);
    const Jet<double, D> p = inverse(a(c, c));
    for (int r = c + 1; r < D; ++r) {
      const Jet<double, D> f = a(r, c) * p;
      for (int j = c; j < D; ++j) a(r, j) -= f * a(c, j);
    }
  }
  return det;
}

template class MetricField<2>;
template class MetricField<4>;
template void check_metric<2>(const Mat<2>&, double);
template void check_metric<4>(const Mat<4>&, double);
template JetMat<double, 2> jet_inverse<2>(const JetMat<double, 2>&);
template JetMat<double, 4> jet_inverse<4>(const JetMat<double, 4>&);
template Jet<double, 2> jet_det<2>(const JetMat<double, 2>&);
template Jet<double, 4> jet_det<4>(const JetMat<double, 4>&);

}  // namespace cgeom
