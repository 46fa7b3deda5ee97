#include "cgeom/verify.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "cgeom/rng.hpp"
#include "cgeom/spectral.hpp"

namespace cgeom {

namespace {

constexpr double kTwoPi2 = 2.0 * M_PI * M_PI;

// Euclidean orthonormal basis of x^perp (columns).
Eigen::Matrix<double, 4, 3> tangent_basis(const Vec<4>& x) {
  Eigen::Matrix<double, 4, 4> A = Eigen::Matrix<double, 4, 4>::Identity();
  A.col(0) = x.normalized();
  Eigen::HouseholderQR<Eigen::Matrix<double, 4, 4>> qr(A);
  const Eigen::Matrix<double, 4, 4> Qm = qr.householderQ();
  return Qm.rightCols<3>();
}

// Angular rule on S^3: (eta Gauss on [0, pi/2]) x (xi1, xi2 uniform); weights sum to 2 pi^2.
struct SphereRule {
  std::vector<Vec<4>> dir;
  std::vector<double> w;
};

SphereRule sphere_rule(int n_eta, int n_xi) {
  SphereRule s;
  Eigen::VectorXd e, we;
  gauss_legendre<double>(n_eta, 0.0, M_PI / 2, e, we);
  const double dxi = 2 * M_PI / n_xi;
  for (int a = 0; a < n_eta; ++a)
    for (int i = 0; i < n_xi; ++i)
      for (int k = 0; k < n_xi; ++k) {
        const double x1 = i * dxi, x2 = k * dxi;
        s.dir.emplace_back(std::cos(e(a)) * std::cos(x1), std::cos(e(a)) * std::sin(x1), std::sin(e(a)) * std::cos(x2),
                           std::sin(e(a)) * std::sin(x2));
        s.w.push_back(we(a) * std::sin(e(a)) * std::cos(e(a)) * dxi * dxi);
      }
  return s;
}

}  // namespace

// ---- CGB ----------------------------------------------------------------------

json CGBReport::to_json() const {
  return {{"r_in", r_in},   {"r_out", r_out}, {"int_W2", weyl}, {"int_8_J2_minus_Sch2", j_sch},
          {"boundary_outer", outer}, {"boundary_inner", inner}, {"lhs_32pi2_chi", lhs},
          {"rhs", rhs}, {"residual", residual}};
}

double cgb_boundary_integrand(const MetricField<4>& g, const Vec<4>& x, int orientation, double* area_factor) {
  const JetMat<double, 4> m = g.jets(x, 2);
  const auto p = curvature_from_jets<4>(m, CurvatureLevel::riemann);
  const JetMat<double, 4> ginv = jet_inverse<4>(m);
  const Christoffel<4> gam = christoffel<4>(m, ginv);
  const JetVec<double, 4> xs = seed<double, 4>(x, 2);
  Jet<double, 4> r2 = xs(0) * xs(0);
  for (int i = 1; i < 4; ++i) r2 += xs(i) * xs(i);
  const Jet<double, 4> r = sqrt(r2);
  const Mat<4> hr = values<4>(hessian<4>(gam, r));
  const Vec<4> dr = x / x.norm();
  const double nr = std::sqrt(dr.dot(p.ginv * dr));
  const double sgn = orientation >= 0 ? 1.0 : -1.0;
  const Vec<4> nu = sgn * p.ginv * dr / nr;

  const Eigen::Matrix<double, 4, 3> T = tangent_basis(x);
  const Eigen::Matrix3d G = T.transpose() * p.g * T;
  if (area_factor) *area_factor = std::sqrt(G.determinant());
  const Eigen::Matrix3d L = G.llt().matrixL();
  const Eigen::Matrix<double, 4, 3> E = T * L.inverse().transpose();  // g-orthonormal tangent frame

  const Eigen::Matrix3d II = sgn * E.transpose() * hr * E / nr;
  const double H = II.trace();
  const double II2 = II.squaredNorm();
  const double II3 = (II * II * II).trace();
  const double ricnn = nu.dot(p.ric * nu);
  // sum_gamma R(e_gamma, e_alpha, e_gamma, e_beta) II^{alpha beta}
  double tang = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (II(a, b) == 0) continue;
      double s = 0;
      for (int c = 0; c < 3; ++c)
        for (int l = 0; l < 4; ++l)
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
              for (int k = 0; k < 4; ++k)
                s += riem_at<4>(p.riem, l, i, j, k) * E(l, c) * E(i, a) * E(j, c) * E(k, b);
      tang += s * II(a, b);
    }
  return 0.5 * p.scal * H - ricnn * H - tang + H * H * H / 3 - H * II2 + 2.0 / 3.0 * II3;
}

CGBReport cgb_boundary_check(const MetricField<4>& g, double r_in, double r_out, int n_r, int n_eta, int n_xi) {
  if (!(0 < r_in && r_in < r_out)) throw std::invalid_argument("cgb_boundary_check: need 0 < r_in < r_out");
  if (!g.closed_form()) throw capability_error("cgb_boundary_check: needs a closed-form metric");
  if (r_in < g.r_min() || r_out > g.r_max()) throw std::out_of_range("cgb_boundary_check: annulus outside domain");
  CGBReport rep;
  rep.r_in = r_in;
  rep.r_out = r_out;
  Eigen::VectorXd x, w;
  gauss_legendre<double>(n_r, r_in, r_out, x, w);
  const SphereRule sr = g.radial() ? SphereRule{{Vec<4>(1, 0, 0, 0)}, {kTwoPi2}} : sphere_rule(n_eta, n_xi);
  KahanSum W, JS;
  for (int i = 0; i < x.size(); ++i)
    for (size_t a = 0; a < sr.dir.size(); ++a) {
      const auto p = curvature_at<4>(g, Vec<4>(x(i) * sr.dir[a]), CurvatureLevel::riemann);
      const double dv = p.sqrt_det * std::pow(x(i), 3) * w(i) * sr.w[a];
      W.add(std::pow(p.norm_weyl(), 2) * dv);
      JS.add(8 * (p.J * p.J - std::pow(p.norm_sch(), 2)) * dv);
    }
  rep.weyl = W.value();
  rep.j_sch = JS.value();
  auto sphere = [&](double rho, int orient) {
    KahanSum s;
    for (size_t a = 0; a < sr.dir.size(); ++a) {
      double area = 0;
      const double f = cgb_boundary_integrand(g, Vec<4>(rho * sr.dir[a]), orient, &area);
      s.add(f * area * std::pow(rho, 3) * sr.w[a]);
    }
    return 8 * s.value();
  };
  rep.outer = sphere(r_out, +1);
  rep.inner = sphere(r_in, -1);
  rep.lhs = 0;  // chi(annulus) = 0
  rep.rhs = rep.weyl + rep.j_sch + rep.outer + rep.inner;
  const double scale = std::max({std::abs(rep.weyl), std::abs(rep.j_sch), std::abs(rep.outer), std::abs(rep.inner)});
  rep.residual = std::abs(rep.rhs - rep.lhs) / (scale > 0 ? scale : 1);
  return rep;
}

// ---- Gauss–Codazzi ----------------------------------------------------------------

Immersion immersion(const std::string& name, const Params& p) {
  using J4 = Jet<double, 4>;
  using X = JetVec<double, 4>;
  Immersion im;
  im.name = name;
  im.d = 5;
  if (name == "flat_graph") {
    im.phi = [](const X& x) { return JetPoint{x(0), x(1), x(2), x(3), J4(0.0, x(0).order())}; };
  } else if (name == "sphere4") {
    im.phi = [](const X& x) {
      J4 r2 = x(0) * x(0);
      for (int i = 1; i < 4; ++i) r2 += x(i) * x(i);
      const J4 inv = 1.0 / (1.0 + r2);
      return JetPoint{2.0 * x(0) * inv, 2.0 * x(1) * inv, 2.0 * x(2) * inv, 2.0 * x(3) * inv, (r2 - 1.0) * inv};
    };
  } else if (name == "graph_bump") {
    const double eps = param(p, "eps", 0.1), width = param(p, "width", 0.3);
    const Vec<4> c(0.1, 0.0, -0.1, 0.05);
    im.phi = [=](const X& x) {
      J4 d2(0.0, x(0).order());
      for (int i = 0; i < 4; ++i) d2 += (x(i) - c(i)) * (x(i) - c(i));
      return JetPoint{x(0), x(1), x(2), x(3), eps * exp(-d2 / width)};
    };
  } else {
    throw std::invalid_argument("unknown immersion: " + name);
  }
  return im;
}

Immersion rigid_motion(const Immersion& im, const Eigen::MatrixXd& Q, const Eigen::VectorXd& t) {
  if (Q.rows() != im.d || Q.cols() != im.d || t.size() != im.d)
    throw std::invalid_argument("rigid_motion: dimension mismatch");
  Immersion out = im;
  out.name = im.name + "+rigid";
  auto f = im.phi;
  out.phi = [f, Q, t](const JetVec<double, 4>& x) {
    const JetPoint p = f(x);
    JetPoint q;
    for (int a = 0; a < Q.rows(); ++a) {
      Jet<double, 4> s(t(a), x(0).order());
      for (int b = 0; b < Q.cols(); ++b) s += Q(a, b) * p[b];
      q.push_back(s);
    }
    return q;
  };
  return out;
}

json GaussCodazziReport::to_json() const {
  return {{"residual", residual},           {"max_riem", max_riem},
          {"tangential_II", tangential_II}, {"sectional_min", sectional_min},
          {"sectional_max", sectional_max}, {"nodes", nodes}};
}

GaussCodazziReport gauss_codazzi_check(const Immersion& im, const Chart& chart) {
  if (chart.dim() != 4) throw std::invalid_argument("gauss_codazzi_check: 4D chart required");
  GaussCodazziReport rep;
  rep.sectional_min = INFINITY;
  rep.sectional_max = -INFINITY;
  double maxdiff = 0;
  const int d = im.d;
  for (int n = 0; n < chart.num_nodes(); ++n) {
    const Vec<4> x(chart.cartesian(n));
    const JetPoint ph = im.phi(seed<double, 4>(x, 3));
    if (static_cast<int>(ph.size()) != d) throw std::invalid_argument("immersion dimension mismatch");
    Eigen::MatrixXd Dp(d, 4);
    std::vector<JetPoint> dph(4);
    for (int i = 0; i < 4; ++i)
      for (int a = 0; a < d; ++a) {
        dph[i].push_back(ph[a].d(i));
        Dp(a, i) = dph[i][a].value();
      }
    JetMat<double, 4> gm;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        Jet<double, 4> s(0.0, 2);
        for (int a = 0; a < d; ++a) s += dph[i][a] * dph[j][a];
        gm(i, j) = gm(j, i) = s;
      }
    const Mat<4> gv = values<4>(gm);
    if (Eigen::SelfAdjointEigenSolver<Mat<4>>(gv).eigenvalues().minCoeff() <= 1e-12)
      throw std::domain_error("gauss_codazzi_check: degenerate immersion at node " + std::to_string(n));
    const auto p = curvature_from_jets<4>(gm, CurvatureLevel::riemann);
    const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d) - Dp * p.ginv * Dp.transpose();
    std::array<std::array<Eigen::VectorXd, 4>, 4> II;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        Eigen::VectorXd h(d);
        for (int a = 0; a < d; ++a) h(a) = dph[i][a].d(j).value();
        II[i][j] = P * h;
        rep.tangential_II = std::max(rep.tangential_II, (Dp.transpose() * II[i][j]).cwiseAbs().maxCoeff());
      }
    for (int l = 0; l < 4; ++l)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k) {
            const double R = riem_at<4>(p.riem, l, i, j, k);
            const double G = II[l][j].dot(II[i][k]) - II[l][k].dot(II[i][j]);
            maxdiff = std::max(maxdiff, std::abs(R - G));
            rep.max_riem = std::max(rep.max_riem, std::abs(R));
          }
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        const double K = riem_at<4>(p.riem, i, j, i, j) / (gv(i, i) * gv(j, j) - gv(i, j) * gv(i, j));
        rep.sectional_min = std::min(rep.sectional_min, K);
        rep.sectional_max = std::max(rep.sectional_max, K);
      }
  }
  rep.nodes = chart.num_nodes();
  rep.residual = maxdiff / (1 + rep.max_riem);
  return rep;
}

// ---- Sobolev / regularity constants ----------------------------------------------

json SobolevConstants::to_json() const {
  return {{"gamma_S", gamma_S}, {"gamma_L", gamma_L}, {"samples", samples}, {"seed", seed}, {"caveat", caveat}};
}

namespace {

struct NodeGeom {
  Vec<4> x;
  double w;        // quadrature weight times sqrt(det g)
  Mat<4> ginv;
  Vec<4> gam;      // g^{ij} Gamma^k_ij
};

struct Sample {
  double psi;
  Vec<4> grad;
  Mat<4> hess;
};

}  // namespace

SobolevConstants estimate_constants(const MetricField<4>& g, int n_random, std::uint64_t seed) {
  if (n_random < 0) throw std::invalid_argument("estimate_constants: n_random must be >= 0");
  const Chart ch = Chart::radial4(0.0, 1.0, 32, 8, 16, RadialRule::gauss);
  std::vector<NodeGeom> nodes;
  nodes.reserve(ch.num_nodes());
  for (int n = 0; n < ch.num_nodes(); ++n) {
    NodeGeom ng;
    ng.x = Vec<4>(ch.cartesian(n));
    const JetMat<double, 4> m = g.jets(ng.x, 1);
    const JetMat<double, 4> gi = jet_inverse<4>(m);
    const Christoffel<4> gam = christoffel<4>(m, gi);
    ng.ginv = values<4>(gi);
    ng.w = ch.weight(n) * std::sqrt(values<4>(m).determinant());
    for (int k = 0; k < 4; ++k) ng.gam(k) = ng.ginv.cwiseProduct(values<4>(gam[k])).sum();
    nodes.push_back(ng);
  }
  auto quotients = [&](const std::function<Sample(const Vec<4>&)>& f, double& qS, double& qL) {
    double p4 = 0, d2 = 0, d4 = 0, l2 = 0;
    for (const auto& ng : nodes) {
      const Sample s = f(ng.x);
      const double du2 = s.grad.dot(ng.ginv * s.grad);
      const double lap = ng.ginv.cwiseProduct(s.hess).sum() - ng.gam.dot(s.grad);
      p4 += std::pow(s.psi, 4) * ng.w;
      d2 += du2 * ng.w;
      d4 += du2 * du2 * ng.w;
      l2 += lap * lap * ng.w;
    }
    qS = d2 > 0 ? std::sqrt(p4) / d2 : 0;
    qL = l2 > 0 ? std::pow(d4, 0.25) / std::sqrt(l2) : 0;
  };
  auto radial = [](std::function<Jet<double, 1>(const Jet<double, 1>&)> prof) {
    return [prof](const Vec<4>& x) {
      const double r = x.norm();
      Sample s;
      const Jet<double, 1> v = prof(Jet<double, 1>::variable(r, 0, 2));
      const double f0 = v.value(), f1 = v.derivative({1}), f2 = v.derivative({2});
      s.psi = f0;
      if (r < 1e-14) {
        s.grad.setZero();
        s.hess = f2 * Mat<4>::Identity();
        return s;
      }
      const Vec<4> e = x / r;
      s.grad = f1 * e;
      s.hess = f2 * e * e.transpose() + (f1 / r) * (Mat<4>::Identity() - e * e.transpose());
      return s;
    };
  };
  SobolevConstants out;
  out.seed = seed;
  auto record = [&](double qS, double qL) {
    out.gamma_S = std::max(out.gamma_S, qS);
    out.gamma_L = std::max(out.gamma_L, qL);
    out.running_S.push_back(out.gamma_S);
    out.running_L.push_back(out.gamma_L);
    ++out.samples;
  };
  // Aubin–Talenti-shaped profiles: (eps^2 + r^2)^{-1} truncated to vanish at r = 1
  // (first order for the Sobolev quotient, second order for the Laplacian one).
  for (double eps : {0.15, 0.2, 0.3, 0.5, 0.8}) {
    double qS, qL, dummy;
    const double e2 = eps * eps;
    quotients(radial([e2](const Jet<double, 1>& r) { return 1.0 / (e2 + r * r) - 1.0 / (e2 + 1.0); }), qS, dummy);
    quotients(radial([e2](const Jet<double, 1>& r) {
                const Jet<double, 1> t = 1.0 - r * r;
                return t * t / (e2 + r * r);
              }),
              dummy, qL);
    record(qS, qL);
  }
  std::mt19937_64 rng(seed);
  for (int k = 0; k < n_random; ++k) {
    const int nb = 1 + static_cast<int>(uniform01(rng) * 3);
    std::vector<Vec<4>> c(nb);
    std::vector<double> rad(nb), amp(nb);
    for (int b = 0; b < nb; ++b) {
      Vec<4> v(normal(rng), normal(rng), normal(rng), normal(rng));
      v.normalize();
      const double rc = 0.6 * std::pow(uniform01(rng), 0.25);
      c[b] = rc * v;
      rad[b] = uniform(rng, 0.15, std::max(0.16, 1.0 - rc));
      amp[b] = normal(rng);
    }
    double qS, qL;
    quotients(
        [&](const Vec<4>& x) {
          Sample s{0, Vec<4>::Zero(), Mat<4>::Zero()};
          for (int b = 0; b < nb; ++b) {
            const Vec<4> d = x - c[b];
            const double q = 1 - d.squaredNorm() / (rad[b] * rad[b]);
            if (q <= 0) continue;
            const Vec<4> dq = -2 * d / (rad[b] * rad[b]);
            s.psi += amp[b] * std::pow(q, 4);
            s.grad += amp[b] * 4 * std::pow(q, 3) * dq;
            s.hess += amp[b] * (12 * q * q * dq * dq.transpose() -
                                8 * std::pow(q, 3) / (rad[b] * rad[b]) * Mat<4>::Identity());
          }
          return s;
        },
        qS, qL);
    record(qS, qL);
  }
  return out;
}

// ---- blow-up flatness -----------------------------------------------------------

json FlatnessTable::to_json() const {
  json r = json::array();
  for (const auto& x : rows) r.push_back({{"s", x.s}, {"riem_L2", x.riem_L2}, {"sch_L2p", x.sch_L2p}});
  return {{"rows", r}, {"slope", slope}, {"decays", decays}, {"flags", flags}};
}

std::string FlatnessTable::csv() const {
  std::vector<std::vector<double>> r;
  for (const auto& x : rows) r.push_back({x.s, x.riem_L2, x.sch_L2p});
  return table_csv({"s", "riem_L2", "sch_L2p"}, r);
}

FlatnessTable blowup_flatness(const MetricField<4>& g0, const std::vector<double>& s_list, double p) {
  if (s_list.empty()) throw std::invalid_argument("blowup_flatness: empty s list");
  for (size_t k = 1; k < s_list.size(); ++k)
    if (!(s_list[k] < s_list[k - 1])) throw std::invalid_argument("blowup_flatness: s list must decrease");
  FlatnessTable t;
  auto integrate_shell = [&](const MetricField<4>& h, double a, double b, auto&& f) {
    Eigen::VectorXd x, w;
    gauss_legendre<double>(24, a, b, x, w);
    const SphereRule sr = h.radial() ? SphereRule{{Vec<4>(1, 0, 0, 0)}, {kTwoPi2}} : sphere_rule(4, 8);
    double s = 0;
    for (int i = 0; i < x.size(); ++i)
      for (size_t k = 0; k < sr.dir.size(); ++k) {
        const auto pt = curvature_at<4>(h, Vec<4>(x(i) * sr.dir[k]), CurvatureLevel::riemann);
        s += f(pt) * pt.sqrt_det * std::pow(x(i), 3) * w(i) * sr.w[k];
      }
    return s;
  };
  for (double s : s_list) {
    const MetricField<4> h = blowup_rescale(g0, s);
    if (0.05 < h.r_min() || 1.0 > h.r_max()) throw std::out_of_range("blowup_flatness: chart coverage");
    FlatnessRow row;
    row.s = s;
    row.riem_L2 = std::sqrt(integrate_shell(h, 0.5, 1.0, [](const auto& pt) { return std::pow(pt.norm_riem(), 2); }));
    row.sch_L2p = std::pow(
        integrate_shell(h, 0.05, 1.0, [p](const auto& pt) { return std::pow(pt.norm_sch(), 2 * p); }), 1 / (2 * p));
    t.rows.push_back(row);
  }
  bool all_zero = true, decreasing = true;
  for (size_t k = 0; k < t.rows.size(); ++k) {
    if (t.rows[k].riem_L2 > 1e-13) all_zero = false;
    if (k && t.rows[k].riem_L2 >= t.rows[k - 1].riem_L2 && t.rows[k - 1].riem_L2 > 1e-13) decreasing = false;
  }
  if (!all_zero && t.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& r : t.rows) {
      if (r.riem_L2 <= 0) continue;
      const double lx = std::log(r.s), ly = std::log(r.riem_L2);
      sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, ++n;
    }
    if (n >= 2) t.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  t.decays = all_zero || (decreasing && t.slope > 0.5);
  if (!t.decays) t.flags.push_back("no decay of ||Riem^{h_s}||_{L2} as s -> 0");
  return t;
}

}  // namespace cgeom
