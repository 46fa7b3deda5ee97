#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "cgeom/verify.hpp"

namespace cgeom {

namespace {

// Stencil: all primitive offsets with |di|, |dj| <= 3 (32 directions); the
// angular defect is a few tenths of a percent in length.
std::vector<std::pair<int, int>> stencil() {
  std::vector<std::pair<int, int>> s;
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j)
      if ((i || j) && std::gcd(std::abs(i), std::abs(j)) == 1) s.emplace_back(i, j);
  return s;
}

}  // namespace

// Half-plane (z, w) = (x_0, |(x_1, x_2, x_3)|) after rotating the centre onto the
// x_0 axis; cell-centred in w so the axis carries no node. Volume element 4 pi w^2.
BallGrid::BallGrid(const MetricField<4>& g, const Vec<4>& x, double s_max, int n) : center_(x), s_max_(s_max) {
  if (!g.radial()) throw capability_error("geodesic balls need an O(4)-invariant metric (half-plane reduction)");
  if (!(s_max > 0)) throw std::invalid_argument("geodesic_ball: radius must be positive");
  if (n < 16) throw std::invalid_argument("geodesic_ball: resolution must be >= 16");
  const double z0 = x.norm();
  const auto st = stencil();
  const Mat<4> gc = g.value(Vec<4>(std::max(z0, 1e-9), 0, 0, 0));
  double L = 1.6 * s_max / std::sqrt(Eigen::SelfAdjointEigenSolver<Mat<4>>(gc).eigenvalues().minCoeff());
  for (int attempt = 0; attempt < 6; ++attempt) {
    const int nz = 2 * n + 1, nw = n;
    h_ = L / n;
    const int N = nz * nw;
    pts_.assign(N, Vec<4>::Zero());
    std::vector<Eigen::Matrix2d> G(N);
    std::vector<char> ok(N, 1);
    weight_.assign(N, 0);
    speed_.assign(N, 0);
    for (int i = 0; i < nz; ++i)
      for (int j = 0; j < nw; ++j) {
        const int k = i * nw + j;
        const double z = z0 + (i - n) * h_, w = (j + 0.5) * h_;
        pts_[k] = Vec<4>(z, w, 0, 0);
        const double rr = std::hypot(z, w);
        if (rr < g.r_min() || rr > g.r_max()) {
          ok[k] = 0;
          continue;
        }
        const Mat<4> m = g.value(pts_[k]);
        G[k] << m(0, 0), m(0, 1), m(1, 0), m(1, 1);
        weight_[k] = 4 * M_PI * w * w * std::sqrt(m.determinant()) * h_ * h_;
        speed_[k] = std::sqrt(0.5 * (m(0, 0) + m(1, 1)));
      }
    dist_.assign(N, INFINITY);
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
    Eigen::Matrix2d Gc;
    Gc << gc(0, 0), gc(0, 1), gc(1, 0), gc(1, 1);
    for (int i = n - 2; i <= n + 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const int k = i * nw + j;
        if (!ok[k]) continue;
        const Eigen::Vector2d d((i - n) * h_, (j + 0.5) * h_);
        dist_[k] = std::sqrt(d.dot(0.5 * (Gc + G[k]) * d));
        pq.emplace(dist_[k], k);
      }
    while (!pq.empty()) {
      auto [d, k] = pq.top();
      pq.pop();
      if (d > dist_[k]) continue;
      const int i = k / nw, j = k % nw;
      for (auto [di, dj] : st) {
        const int a = i + di, b = j + dj;
        if (a < 0 || a >= nz || b < 0 || b >= nw) continue;
        const int q = a * nw + b;
        if (!ok[q]) continue;
        const Eigen::Vector2d v(di * h_, dj * h_);
        const double len = std::sqrt(v.dot(0.5 * (G[k] + G[q]) * v));
        if (d + len < dist_[q]) {
          dist_[q] = d + len;
          pq.emplace(dist_[q], q);
        }
      }
    }
    // the ball must stay clear of the outer grid edges (w = 0 is the symmetry axis)
    double edge = INFINITY;
    bool blocked = false;
    for (int i = 0; i < nz; ++i)
      for (int j = 0; j < nw; ++j) {
        const int k = i * nw + j;
        if (i == 0 || i == nz - 1 || j == nw - 1) edge = std::min(edge, dist_[k]);
        if (!ok[k]) {
          for (auto [di, dj] : st) {
            const int a = i + di, b = j + dj;
            if (a >= 0 && a < nz && b >= 0 && b < nw && ok[a * nw + b] && dist_[a * nw + b] <= s_max) blocked = true;
          }
        }
      }
    truncated_ = blocked;
    if (edge > s_max * 1.02 + 2 * h_ * speed_[n * nw]) return;
    L *= 1.5;
  }
  truncated_ = true;
}

double BallGrid::integrate(double s, const std::vector<double>& f) const {
  if (s > s_max_ * (1 + 1e-12)) throw std::out_of_range("geodesic_ball: radius beyond the prepared grid");
  double sum = 0;
  for (size_t k = 0; k < dist_.size(); ++k) {
    if (weight_[k] == 0) continue;
    const double frac = std::clamp(0.5 + (s - dist_[k]) / (h_ * speed_[k]), 0.0, 1.0);
    if (frac > 0) sum += frac * weight_[k] * f[k];
  }
  return sum;
}

BallStats BallGrid::ball(double s) const {
  BallStats b;
  b.center = center_;
  b.s = s;
  b.volume = integrate(s, std::vector<double>(dist_.size(), 1.0));
  b.theta = b.volume / std::pow(s, 4);
  b.truncated = truncated_;
  return b;
}

BallStats geodesic_ball(const MetricField<4>& g, const Vec<4>& x, double s, int n) {
  const BallGrid grid(g, x, s, n);
  const BallStats b = grid.ball(s);
  if (b.truncated) throw std::out_of_range("geodesic_ball: ball truncated by the chart");
  return b;
}

json GrowthTable::to_json() const {
  json r = json::array();
  for (const auto& b : rows) r.push_back({{"s", b.s}, {"volume", b.volume}, {"theta", b.theta}});
  return {{"rows", r}, {"bounded", bounded}, {"euclidean_like", euclidean_like}, {"flags", flags}};
}

std::string GrowthTable::csv() const {
  std::vector<std::vector<double>> r;
  for (const auto& b : rows) r.push_back({b.s, b.volume, b.theta});
  return table_csv({"s", "volume", "theta"}, r);
}

GrowthTable volume_growth_scan(const MetricField<4>& g, const Vec<4>& x, const std::vector<double>& s_list, int n) {
  if (s_list.empty()) throw std::invalid_argument("volume_growth_scan: empty radius list");
  GrowthTable t;
  for (double s : s_list) {
    // resolve each radius on its own grid so small balls are not under-sampled
    const BallGrid grid(g, x, s, n);
    BallStats b = grid.ball(s);
    if (b.truncated) t.flags.push_back("ball of radius " + fmt(s) + " truncated");
    t.rows.push_back(b);
  }
  double lo = INFINITY, hi = 0;
  for (const auto& b : t.rows) lo = std::min(lo, b.theta), hi = std::max(hi, b.theta);
  t.bounded = lo > 0 && hi / lo <= 2;
  const double e = M_PI * M_PI / 2;
  size_t smallest = 0;
  for (size_t k = 0; k < t.rows.size(); ++k)
    if (t.rows[k].s < t.rows[smallest].s) smallest = k;
  t.euclidean_like = std::abs(t.rows[smallest].theta / e - 1) <= 0.1;
  if (!t.bounded) t.flags.push_back("theta not bounded across the scan (growth)");
  if (!t.euclidean_like) t.flags.push_back("theta deviates from pi^2/2 at the smallest radius");
  return t;
}

// ---- epsilon-regularity ------------------------------------------------------------

json EpsTable::to_json() const {
  json r = json::array();
  for (const auto& x : rows)
    r.push_back({{"center", {x.ball.center(0), x.ball.center(1), x.ball.center(2), x.ball.center(3)}},
                 {"s", x.ball.s},
                 {"lhs", x.lhs},
                 {"sch_term", x.sch_term},
                 {"bach_term", x.bach_term},
                 {"ratio", x.ratio}});
  return {{"p", p}, {"rows", r}, {"C_fit", C_fit}};
}

std::string EpsTable::csv() const {
  std::vector<std::vector<double>> r;
  for (const auto& x : rows) r.push_back({x.ball.center.norm(), x.ball.s, x.lhs, x.sch_term, x.bach_term, x.ratio});
  return table_csv({"center_r", "s", "lhs", "sch_term", "bach_term", "ratio"}, r);
}

EpsTable eps_regularity_scan(const MetricField<4>& g0, const std::vector<EpsBall>& balls, double p, int n) {
  if (!(p > 1 && p <= 2)) throw std::invalid_argument("eps_regularity_scan: p must lie in (1, 2]");
  EpsTable t;
  t.p = p;
  const double q = 2 * p / (p + 1);
  for (const auto& b : balls) {
    const BallGrid grid(g0, b.center, 2 * b.s, n);
    const BallStats outer = grid.ball(2 * b.s);
    if (outer.truncated) throw std::out_of_range("eps_regularity_scan: ball exits the chart");
    const auto& pts = grid.points();
    const auto& dist = grid.dist();
    std::vector<double> sch2p(pts.size(), 0), sch2(pts.size(), 0), bq(pts.size(), 0);
    for (size_t k = 0; k < pts.size(); ++k) {
      if (!(dist[k] <= 2 * b.s * 1.05)) continue;
      const auto c = curvature_at<4>(g0, pts[k], CurvatureLevel::bach);
      const double ns = c.norm_sch();
      sch2p[k] = std::pow(ns, 2 * p);
      sch2[k] = ns * ns;
      bq[k] = std::pow(c.norm_bach(), q);
    }
    EpsRow row;
    row.ball = b;
    row.lhs = std::pow(grid.integrate(b.s, sch2p), 1 / (2 * p));
    row.sch_term = std::pow(b.s, -2 / p) * std::pow(outer.volume, 1 / p - 0.5) * std::sqrt(grid.integrate(2 * b.s, sch2));
    row.bach_term = std::pow(std::pow(grid.integrate(2 * b.s, bq), 1 / q), 2 / (p + 1));
    const double rhs = row.sch_term + row.bach_term;
    row.ratio = rhs > 0 ? row.lhs / rhs : 0;
    t.C_fit = std::max(t.C_fit, row.ratio);
    t.rows.push_back(row);
  }
  return t;
}

}  // namespace cgeom
