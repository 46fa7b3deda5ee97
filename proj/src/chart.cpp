#include "cgeom/chart.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "cgeom/spectral.hpp"

namespace cgeom {

std::string to_string(ChartKind k) {
  switch (k) {
    case ChartKind::polar_disk:
      return "punctured-disk-polar";
    case ChartKind::radial_annulus4:
      return "annulus-radial-4d";
    case ChartKind::box:
      return "cartesian-box";
  }
  return "?";
}

namespace {

void radial_axis(double a, double b, int n, RadialRule rule, std::vector<double>& x,
                 std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  if (rule == RadialRule::gauss) {
    Eigen::VectorXd gx, gw;
    gauss_legendre<double>(n, a, b, gx, gw);
    for (int i = 0; i < n; ++i) x[i] = gx(i), w[i] = gw(i);
    return;
  }
  const double h = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) {
    x[i] = a + h * i;
    w[i] = (i == 0 || i == n - 1) ? h / 2 : h;
  }
  x[n - 1] = b;
}

void periodic_axis(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.assign(n, 2 * std::numbers::pi / n);
  for (int i = 0; i < n; ++i) x[i] = 2 * std::numbers::pi * i / n;
}

}  // namespace

Chart Chart::polar(double r_in, double r_out, int n_r, int n_theta, RadialRule rule) {
  if (!(r_in < r_out) || r_in < 0) throw std::invalid_argument("chart: need 0 <= r_in < r_out");
  if (n_r < 8 || n_theta < 8) throw std::invalid_argument("chart: resolution must be >= 8");
  Chart c;
  c.dim_ = 2;
  c.kind_ = ChartKind::polar_disk;
  c.r_in_ = r_in;
  c.r_out_ = r_out;
  c.rule_ = rule;
  c.res_ = {n_r, n_theta};
  c.axes_.resize(2);
  c.axis_w_.resize(2);
  radial_axis(r_in, r_out, n_r, rule, c.axes_[0], c.axis_w_[0]);
  periodic_axis(n_theta, c.axes_[1], c.axis_w_[1]);
  c.finish();
  return c;
}

Chart Chart::radial4(double r_in, double r_out, int n_r, int n_eta, int n_xi, RadialRule rule) {
  if (!(r_in < r_out) || r_in < 0) throw std::invalid_argument("chart: need 0 <= r_in < r_out");
  if (n_r < 8 || n_xi < 8 || n_eta < 2)
    throw std::invalid_argument("chart: resolution must be >= 8 (eta Gauss order >= 2)");
  Chart c;
  c.dim_ = 4;
  c.kind_ = ChartKind::radial_annulus4;
  c.r_in_ = r_in;
  c.r_out_ = r_out;
  c.rule_ = rule;
  c.res_ = {n_r, n_eta, n_xi, n_xi};
  c.axes_.resize(4);
  c.axis_w_.resize(4);
  radial_axis(r_in, r_out, n_r, rule, c.axes_[0], c.axis_w_[0]);
  Eigen::VectorXd ex, ew;
  gauss_legendre<double>(n_eta, 0.0, std::numbers::pi / 2, ex, ew);
  c.axes_[1].resize(n_eta);
  c.axis_w_[1].resize(n_eta);
  for (int i = 0; i < n_eta; ++i) {
    c.axes_[1][i] = ex(i);
    c.axis_w_[1][i] = ew(i) * std::sin(ex(i)) * std::cos(ex(i));
  }
  periodic_axis(n_xi, c.axes_[2], c.axis_w_[2]);
  periodic_axis(n_xi, c.axes_[3], c.axis_w_[3]);
  c.finish();
  return c;
}

Chart Chart::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const std::vector<int>& n) {
  const int d = static_cast<int>(lo.size());
  if (d != static_cast<int>(hi.size()) || d != static_cast<int>(n.size()))
    throw std::invalid_argument("chart: box bounds/resolution size mismatch");
  Chart c;
  c.dim_ = d;
  c.kind_ = ChartKind::box;
  c.res_ = n;
  c.axes_.resize(d);
  c.axis_w_.resize(d);
  double rmax = 0;
  for (int a = 0; a < d; ++a) {
    if (n[a] < 8) throw std::invalid_argument("chart: resolution must be >= 8");
    if (!(lo(a) < hi(a))) throw std::invalid_argument("chart: empty box");
    radial_axis(lo(a), hi(a), n[a], RadialRule::trapezoid, c.axes_[a], c.axis_w_[a]);
    rmax = std::max(rmax, std::max(std::abs(lo(a)), std::abs(hi(a))));
  }
  c.r_in_ = 0;
  c.r_out_ = rmax;
  c.finish();
  return c;
}

void Chart::finish() {
  const int na = num_axes();
  stride_.assign(na, 1);
  for (int a = na - 2; a >= 0; --a) stride_[a] = stride_[a + 1] * res_[a + 1];
  n_nodes_ = stride_[0] * res_[0];
}

bool Chart::periodic(int a) const {
  if (kind_ == ChartKind::polar_disk) return a == 1;
  if (kind_ == ChartKind::radial_annulus4) return a >= 2;
  return false;
}

bool Chart::uniform(int a) const {
  if (kind_ == ChartKind::box) return true;
  if (a == 0) return rule_ == RadialRule::trapezoid;
  if (kind_ == ChartKind::radial_annulus4 && a == 1) return false;
  return true;
}

std::vector<int> Chart::multi(int node) const {
  std::vector<int> idx(num_axes());
  for (int a = 0; a < num_axes(); ++a) {
    idx[a] = node / stride_[a];
    node %= stride_[a];
  }
  return idx;
}

int Chart::flat(const std::vector<int>& idx) const {
  int n = 0;
  for (int a = 0; a < num_axes(); ++a) n += idx[a] * stride_[a];
  return n;
}

std::vector<double> Chart::coords(int node) const {
  auto idx = multi(node);
  std::vector<double> c(num_axes());
  for (int a = 0; a < num_axes(); ++a) c[a] = axes_[a][idx[a]];
  return c;
}

Eigen::VectorXd Chart::cartesian(int node) const {
  auto c = coords(node);
  Eigen::VectorXd x(dim_);
  switch (kind_) {
    case ChartKind::polar_disk:
      x << c[0] * std::cos(c[1]), c[0] * std::sin(c[1]);
      break;
    case ChartKind::radial_annulus4: {
      const double r = c[0], e = c[1];
      x << r * std::cos(e) * std::cos(c[2]), r * std::cos(e) * std::sin(c[2]),
          r * std::sin(e) * std::cos(c[3]), r * std::sin(e) * std::sin(c[3]);
      break;
    }
    case ChartKind::box:
      for (int a = 0; a < dim_; ++a) x(a) = c[a];
      break;
  }
  return x;
}

double Chart::weight(int node) const {
  auto idx = multi(node);
  double w = 1;
  for (int a = 0; a < num_axes(); ++a) w *= axis_w_[a][idx[a]];
  const double r = axes_[0][idx[0]];
  if (kind_ == ChartKind::polar_disk) w *= r;
  if (kind_ == ChartKind::radial_annulus4) w *= r * r * r;
  return w;
}

std::vector<int> Chart::line(int node, int a) const {
  auto idx = multi(node);
  std::vector<int> out(res_[a]);
  for (int i = 0; i < res_[a]; ++i) {
    idx[a] = i;
    out[i] = flat(idx);
  }
  return out;
}

bool Chart::operator==(const Chart& o) const {
  return dim_ == o.dim_ && kind_ == o.kind_ && r_in_ == o.r_in_ && r_out_ == o.r_out_ &&
         rule_ == o.rule_ && res_ == o.res_ && axes_ == o.axes_;
}

GridField GridField::tensor2(const Chart& c, int d, bool symmetric) {
  GridField f(c, d * d);
  f.rank = 2;
  f.comp_dim = d;
  f.sym = symmetric ? Symmetry::symmetric2 : Symmetry::none;
  return f;
}

void GridField::set2(int node, int i, int j, double v) {
  data(node, i * comp_dim + j) = v;
  if (sym == Symmetry::symmetric2) data(node, j * comp_dim + i) = v;
}

template <int D>
GridField derive(const Chart& chart, const ScalarFn<D>& f, const std::vector<int>& multi_index) {
  if (chart.dim() != D) throw std::invalid_argument("derive: chart dimension mismatch");
  const int order = static_cast<int>(multi_index.size());
  if (order > kMaxJetOrder) throw capability_error("derive: closed-form order capped at 4");
  std::array<int, D> alpha{};
  for (int k : multi_index) {
    if (k < 0 || k >= D) throw std::invalid_argument("derive: axis out of range");
    ++alpha[k];
  }
  GridField out = GridField::scalar(chart);
  for (int n = 0; n < chart.num_nodes(); ++n) {
    Eigen::Matrix<double, D, 1> x = chart.cartesian(n);
    out(n) = f(seed<double, D>(x, order)).derivative(alpha);
  }
  return out;
}

template <int D>
GridField sample(const Chart& chart, const ScalarFn<D>& f) {
  return derive<D>(chart, f, {});
}

template GridField derive<2>(const Chart&, const ScalarFn<2>&, const std::vector<int>&);
template GridField derive<4>(const Chart&, const ScalarFn<4>&, const std::vector<int>&);
template GridField sample<2>(const Chart&, const ScalarFn<2>&);
template GridField sample<4>(const Chart&, const ScalarFn<4>&);

namespace {

// 4th-order stencil for derivative m at position i of an n-point uniform line.
struct Stencil {
  int start;
  std::vector<double> w;
};

Stencil line_stencil(int i, int n, int m, double h, bool periodic) {
  const int half = 2;
  Stencil s;
  if (periodic) {
    s.start = i - half;
    std::vector<double> xs;
    for (int k = -half; k <= half; ++k) xs.push_back(k * h);
    s.w = fornberg(0.0, xs, m);
    return s;
  }
  const bool interior = i >= half && i < n - half;
  const int npts = (m == 1 || interior) ? 5 : 6;
  int start = i - npts / 2;
  if (interior) start = i - half;
  start = std::clamp(start, 0, n - npts);
  std::vector<double> xs;
  for (int k = 0; k < npts; ++k) xs.push_back((start + k - i) * h);
  s.start = start;
  s.w = fornberg(0.0, xs, m);
  return s;
}

Eigen::MatrixXd axis_derivative(const Chart& chart, const Eigen::MatrixXd& data, int a, int m) {
  if (!chart.uniform(a)) throw capability_error("derive: sampled path needs a uniform axis");
  const auto& ax = chart.axis(a);
  const int n = static_cast<int>(ax.size());
  const bool per = chart.periodic(a);
  const double h = per ? 2 * std::numbers::pi / n : ax[1] - ax[0];
  std::vector<Stencil> st(n);
  for (int i = 0; i < n; ++i) st[i] = line_stencil(i, n, m, h, per);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(data.rows(), data.cols());
  for (int node = 0; node < chart.num_nodes(); ++node) {
    const int i = chart.multi(node)[a];
    if (i != 0) continue;
    auto line = chart.line(node, a);
    for (int p = 0; p < n; ++p) {
      const auto& s = st[p];
      for (size_t k = 0; k < s.w.size(); ++k) {
        int q = s.start + static_cast<int>(k);
        if (per) q = ((q % n) + n) % n;
        out.row(line[p]) += s.w[k] * data.row(line[q]);
      }
    }
  }
  return out;
}

}  // namespace

GridField derive(const GridField& field, const std::vector<int>& multi_index) {
  if (multi_index.size() > 2) throw capability_error("derive: sampled path supports order <= 2");
  GridField out = field;
  if (multi_index.size() == 2 && multi_index[0] == multi_index[1]) {
    out.data = axis_derivative(field.chart, field.data, multi_index[0], 2);
    return out;
  }
  for (int a : multi_index) {
    if (a < 0 || a >= field.chart.num_axes()) throw std::invalid_argument("derive: axis out of range");
    out.data = axis_derivative(field.chart, out.data, a, 1);
  }
  return out;
}

double integrate(const GridField& field, const GridField& weight) {
  if (!(field.chart == weight.chart)) throw std::invalid_argument("integrate: chart mismatch");
  KahanSum s;
  for (int n = 0; n < field.num_nodes(); ++n) s.add(field.chart.weight(n) * field(n) * weight(n));
  return s.value();
}

double integrate(const GridField& field) {
  KahanSum s;
  for (int n = 0; n < field.num_nodes(); ++n) s.add(field.chart.weight(n) * field(n));
  return s.value();
}

double integrate_radial(const Chart& chart, const std::function<double(double)>& f) {
  if (chart.kind() != ChartKind::radial_annulus4)
    throw std::invalid_argument("integrate_radial: needs a radial4 chart");
  const auto& r = chart.axis(0);
  const auto& w = chart.axis_weights(0);
  KahanSum s;
  for (size_t i = 0; i < r.size(); ++i) s.add(w[i] * r[i] * r[i] * r[i] * f(r[i]));
  return 2 * std::numbers::pi * std::numbers::pi * s.value();
}

double lorentz_weak_l2_proxy(const GridField& field) {
  if (field.chart.dim() != 2) throw std::invalid_argument("lorentz proxy: 2D chart required");
  const int n = field.num_nodes();
  std::vector<std::pair<double, double>> vals(n);  // (|f|, weight)
  double fmax = 0, fmin = INFINITY;
  for (int i = 0; i < n; ++i) {
    const double v = field.data.row(i).norm();
    vals[i] = {v, field.chart.weight(i)};
    fmax = std::max(fmax, v);
    if (v > 0) fmin = std::min(fmin, v);
  }
  if (fmax == 0) return 0.0;
  double best = 0;
  for (int k = static_cast<int>(std::floor(std::log2(fmin))) - 1;
       k <= static_cast<int>(std::ceil(std::log2(fmax))); ++k) {
    const double lam = std::ldexp(1.0, k);
    KahanSum area;
    for (const auto& [v, w] : vals)
      if (v > lam) area.add(w);
    best = std::max(best, lam * std::sqrt(area.value()));
  }
  return best;
}

}  // namespace cgeom
