#include "cgeom/conformal.hpp"

#include <cmath>
#include <stdexcept>

namespace cgeom {

namespace {

template <int D>
MetricField<D> scale_by_exp(const MetricField<D>& g, const ConformalFactor<D>& u) {
  auto gf = g.fn();
  auto uf = u.u;
  if (!gf) throw capability_error("conformal_change: needs a closed-form metric");
  MetricField<D> m = MetricField<D>::closed(
      g.name() + "*e^2u", [gf, uf](const JetVec<double, D>& x) -> JetMat<double, D> {
        const Jet<double, D> e = exp(2.0 * uf(x));
        JetMat<double, D> r = gf(x);
        for (int i = 0; i < D; ++i)
          for (int j = 0; j < D; ++j) r(i, j) = e * r(i, j);
        return r;
      },
      g.max_order());
  m.with_domain(g.r_min(), g.r_max());
  return m;
}

double rel(double num, double den) { return num / (1.0 + den); }

Jet<double, 4> default_test_function(const JetVec<double, 4>& x) {
  return sin(x(0)) + 0.5 * x(1) * x(1) + x(2) * x(3) + 0.3 * exp(0.5 * x(3));
}

}  // namespace

MetricField<4> conformal_metric(const MetricField<4>& g, const ConformalFactor<4>& u) { return scale_by_exp<4>(g, u); }
MetricField<2> conformal_metric(const MetricField<2>& g, const ConformalFactor<2>& u) { return scale_by_exp<2>(g, u); }

json ConformalReport::to_json() const {
  json j;
  j["residual"] = {{"schouten", schouten}, {"J", J}, {"bach", bach}, {"hessian", hessian}};
  j["weyl_energy"] = {{"g", weyl_energy_g}, {"g_u", weyl_energy_gu}, {"relative_difference", weyl_energy_rel}};
  j["du4_energy"] = {{"g", du4_g}, {"g_u", du4_gu}, {"relative_difference", du4_rel}};
  return j;
}

std::pair<MetricField<4>, ConformalReport> conformal_change(const MetricField<4>& g, const ConformalFactor<4>& u,
                                                            const Chart& chart, const ScalarJetFn<4>& f_in) {
  const ScalarJetFn<4> f = f_in ? f_in : ScalarJetFn<4>(default_test_function);
  MetricField<4> gu = conformal_metric(g, u);
  ConformalReport rep;
  double dS = 0, sS = 0, dJ = 0, sJ = 0, dB = 0, sB = 0, dH = 0, sH = 0;
  KahanSum wg, wgu, ug, ugu;
  for (int n = 0; n < chart.num_nodes(); ++n) {
    const Vec<4> x = chart.cartesian(n);
    const JetVec<double, 4> X = seed<double, 4>(x, 4);
    const JetMat<double, 4> gj = g.jets(x, 4);
    const JetMat<double, 4> guj = gu.jets(x, 4);
    const Jet<double, 4> uj = u.u(X);
    const auto cg = curvature_from_jets<4>(gj, CurvatureLevel::bach);
    const auto cu = curvature_from_jets<4>(guj, CurvatureLevel::bach);

    const Christoffel<4> gam = christoffel<4>(gj, jet_inverse<4>(gj));
    const Mat<4> hu = values<4>(hessian<4>(gam, uj));
    Vec<4> du;
    for (int a = 0; a < 4; ++a) du(a) = uj.d(a).value();
    const double du2 = du.dot(cg.ginv * du);
    const double lapu = cg.ginv.cwiseProduct(hu).sum();
    const double e2u = std::exp(-2 * uj.value());

    const Mat<4> sch_rhs = cg.sch - hu + du * du.transpose() - 0.5 * du2 * cg.g;
    dS = std::max(dS, (cu.sch - sch_rhs).cwiseAbs().maxCoeff());
    sS = std::max(sS, sch_rhs.cwiseAbs().maxCoeff());
    const double J_rhs = e2u * (cg.J - lapu - du2);
    dJ = std::max(dJ, std::abs(cu.J - J_rhs));
    sJ = std::max(sJ, std::abs(J_rhs));
    const Mat<4> B_rhs = e2u * cg.bach;
    dB = std::max(dB, (cu.bach - B_rhs).cwiseAbs().maxCoeff());
    sB = std::max(sB, B_rhs.cwiseAbs().maxCoeff());

    const JetVec<double, 4> X2 = seed<double, 4>(x, 2);
    const Jet<double, 4> fj = f(X2);
    Vec<4> df;
    for (int a = 0; a < 4; ++a) df(a) = fj.d(a).value();
    const JetMat<double, 4> gu2 = gu.jets(x, 2), g2 = g.jets(x, 2);
    const Mat<4> hf_u = values<4>(hessian<4>(christoffel<4>(gu2, jet_inverse<4>(gu2)), fj));
    const Mat<4> hf = values<4>(hessian<4>(christoffel<4>(g2, jet_inverse<4>(g2)), fj));
    const Mat<4> H_rhs = hf - du * df.transpose() - df * du.transpose() + du.dot(cg.ginv * df) * cg.g;
    dH = std::max(dH, (hf_u - H_rhs).cwiseAbs().maxCoeff());
    sH = std::max(sH, H_rhs.cwiseAbs().maxCoeff());

    const double w = chart.weight(n);
    wg.add(w * cg.sqrt_det * norm2_riem<4>(cg.ginv, cg.weyl));
    wgu.add(w * cu.sqrt_det * norm2_riem<4>(cu.ginv, cu.weyl));
    const double du2u = du.dot(cu.ginv * du);
    ug.add(w * cg.sqrt_det * du2 * du2);
    ugu.add(w * cu.sqrt_det * du2u * du2u);
  }
  rep.schouten = rel(dS, sS);
  rep.J = rel(dJ, sJ);
  rep.bach = rel(dB, sB);
  rep.hessian = rel(dH, sH);
  rep.weyl_energy_g = wg.value();
  rep.weyl_energy_gu = wgu.value();
  // floored: conformally flat pairs give round-off on both sides
  rep.weyl_energy_rel =
      std::abs(wg.value() - wgu.value()) / std::max({std::abs(wg.value()), std::abs(wgu.value()), 1e-12});
  rep.du4_g = ug.value();
  rep.du4_gu = ugu.value();
  rep.du4_rel = ug.value() == 0 && ugu.value() == 0 ? 0 : std::abs(ug.value() - ugu.value()) / std::abs(ug.value());
  return {gu, rep};
}

MetricField<4> invert_compactify(const MetricField<4>& g_ale) {
  auto gf = g_ale.fn();
  if (!gf) throw capability_error("invert_compactify: needs a closed-form metric");
  const double R = g_ale.r_min();
  MetricField<4> h = MetricField<4>::closed(
      "compactified(" + g_ale.name() + ")",
      [gf](const JetVec<double, 4>& x) -> JetMat<double, 4> {
        Jet<double, 4> r2 = x(0) * x(0);
        for (int i = 1; i < 4; ++i) r2 += x(i) * x(i);
        const Jet<double, 4> ir2 = 1.0 / r2;
        JetVec<double, 4> z;
        for (int i = 0; i < 4; ++i) z(i) = x(i) * ir2;
        const JetMat<double, 4> g = gf(z);
        // |x|^4 Di^T g Di with Di = A/|x|^2, A = I - 2 x x^T/|x|^2
        JetMat<double, 4> A;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) A(i, j) = (i == j ? 1.0 : 0.0) - 2.0 * x(i) * x(j) * ir2;
        JetMat<double, 4> AG;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            Jet<double, 4> s = A(i, 0) * g(0, j);
            for (int k = 1; k < 4; ++k) s += A(i, k) * g(k, j);
            AG(i, j) = s;
          }
        JetMat<double, 4> h;
        for (int i = 0; i < 4; ++i)
          for (int j = i; j < 4; ++j) {
            Jet<double, 4> s = AG(i, 0) * A(0, j);
            for (int k = 1; k < 4; ++k) s += AG(i, k) * A(k, j);
            h(i, j) = h(j, i) = s;
          }
        return h;
      },
      g_ale.max_order());
  h.with_domain(1e-12, R > 0 ? 1.0 / R : 1e300);
  if (g_ale.radial()) h.set_radial();
  return h;
}

json DecayFit::to_json() const {
  json j;
  j["radii"] = radii;
  j["deviation"] = deviation;
  j["fitted_exponent"] = exponent;
  j["exact_flat"] = exact_flat;
  j["sup_abs_Sch"] = sch_norm;
  j["ok"] = ok;
  return j;
}

DecayFit compactify_decay(const MetricField<4>& h, double tau, double r_max, int levels) {
  DecayFit fit;
  static const double dirs[6][4] = {{1, 0, 0, 0},       {0, 1, 0, 0},         {0.5, 0.5, 0.5, 0.5},
                                    {0.6, 0, -0.8, 0}, {0, 0.28, 0, -0.96}, {-0.5, 0.5, -0.5, 0.5}};
  for (int k = 1; k <= levels; ++k) {
    const double r = r_max * std::ldexp(1.0, -k);
    double dev = 0, sch = 0;
    for (const auto& d : dirs) {
      const Vec<4> x = r * Vec<4>(d[0], d[1], d[2], d[3]);
      dev = std::max(dev, (h.value(x) - Mat<4>::Identity()).cwiseAbs().maxCoeff());
      sch = std::max(sch, curvature_at<4>(h, x, CurvatureLevel::riemann).norm_sch());
    }
    fit.radii.push_back(r);
    fit.deviation.push_back(dev);
    fit.sch_norm.push_back(sch);
  }
  double maxdev = 0;
  for (double d : fit.deviation) maxdev = std::max(maxdev, d);
  if (maxdev < 1e-14) {
    fit.exact_flat = true;
    fit.ok = true;
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(fit.radii.size());
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(fit.radii[i]), ly = std::log(fit.deviation[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.ok = std::abs(fit.exponent - tau) <= 0.2;
  return fit;
}

MetricField<4> blowup_rescale(const MetricField<4>& g0, double s) {
  if (!(s > 0 && s <= 1)) throw std::invalid_argument("blowup_rescale: s must lie in (0, 1]");
  auto gf = g0.fn();
  if (!gf) throw capability_error("blowup_rescale: needs a closed-form metric");
  MetricField<4> h = MetricField<4>::closed(
      "blowup(" + g0.name() + ")", [gf, s](const JetVec<double, 4>& y) { return gf(JetVec<double, 4>(y * s)); },
      g0.max_order());
  h.with_domain(g0.r_min() / s, g0.r_max() / s);
  if (g0.radial()) h.set_radial();
  return h;
}

double ScalingReport::max() const { return std::max({riem, vol, sch, J, bach, ball_rel}); }

json ScalingReport::to_json() const {
  json j;
  j["s"] = s;
  j["residual"] = {{"riem", riem}, {"dvol", vol}, {"schouten", sch}, {"J", J}, {"bach", bach}};
  j["ball_riem_L2"] = {{"h_s", ball_lhs}, {"g0", ball_rhs}, {"relative_difference", ball_rel}};
  return j;
}

double riem_l2_ball(const MetricField<4>& g, const Vec<4>& c, double t, int n_r, int n_ang) {
  const Chart ball = Chart::radial4(0.0, t, n_r, n_ang, std::max(8, 2 * n_ang), RadialRule::gauss);
  KahanSum s;
  for (int n = 0; n < ball.num_nodes(); ++n) {
    const Vec<4> x = c + Vec<4>(ball.cartesian(n));
    const auto p = curvature_at<4>(g, x, CurvatureLevel::riemann);
    s.add(ball.weight(n) * p.sqrt_det * norm2_riem<4>(p.ginv, p.riem));
  }
  return std::sqrt(s.value());
}

ScalingReport scaling_report(const MetricField<4>& g0, double s, const Chart& chart, const Vec<4>& bc, double bt) {
  const MetricField<4> h = blowup_rescale(g0, s);
  ScalingReport rep;
  rep.s = s;
  const double rin = chart.kind() == ChartKind::box ? 0.0 : chart.r_in();
  if (s * chart.r_out() > g0.r_max() || s * rin < g0.r_min())
    throw std::out_of_range("blowup_rescale: rescaled chart leaves the domain of g0");
  const double s2 = s * s, s4 = s2 * s2;
  for (int n = 0; n < chart.num_nodes(); ++n) {
    const Vec<4> y = chart.cartesian(n);
    const auto ch = curvature_at<4>(h, y, CurvatureLevel::bach);
    const auto cg = curvature_at<4>(g0, Vec<4>(s * y), CurvatureLevel::bach);
    auto upd = [](double& r, double d, double m) { r = std::max(r, d / (1.0 + m)); };
    upd(rep.riem, (s2 * ch.riem - s4 * cg.riem).cwiseAbs().maxCoeff(), s4 * cg.riem.cwiseAbs().maxCoeff());
    upd(rep.vol, std::abs(ch.sqrt_det - cg.sqrt_det), cg.sqrt_det);
    upd(rep.sch, (ch.sch - s2 * cg.sch).cwiseAbs().maxCoeff(), s2 * cg.sch.cwiseAbs().maxCoeff());
    upd(rep.J, std::abs(ch.J / s2 - cg.J), std::abs(cg.J));
    upd(rep.bach, (ch.bach / s2 - s2 * cg.bach).cwiseAbs().maxCoeff(), s2 * cg.bach.cwiseAbs().maxCoeff());
  }
  if (bt > 0) {
    rep.ball_lhs = riem_l2_ball(h, bc, bt);
    rep.ball_rhs = riem_l2_ball(g0, Vec<4>(s * bc), s * bt);
    const double m = std::max(rep.ball_lhs, rep.ball_rhs);
    rep.ball_rel = m == 0 ? 0 : std::abs(rep.ball_lhs - rep.ball_rhs) / m;
  }
  return rep;
}

}  // namespace cgeom
