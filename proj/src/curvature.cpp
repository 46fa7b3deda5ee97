#include "cgeom/curvature.hpp"

#include <cmath>
#include <sstream>

namespace cgeom {

namespace {

template <int D>
using J = Jet<double, D>;

template <int D>
std::array<Mat<D>, D> values3(const std::array<JetMat<double, D>, D>& a) {
  std::array<Mat<D>, D> r;
  for (int k = 0; k < D; ++k) r[k] = values<D>(a[k]);
  return r;
}

// Riemann tensor, all indices down, as jets (flattened l,i,j,k).
template <int D>
std::vector<J<D>> riemann_jets(const JetMat<double, D>& g, const Christoffel<D>& gam) {
  const int o = gam[0](0, 0).order() - 1;
  std::vector<J<D>> up(D * D * D * D, J<D>(0.0, o));
  auto id = [](int l, int i, int j, int k) { return ((l * D + i) * D + j) * D + k; };
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = j + 1; k < D; ++k) {
          J<D> r = gam[l](i, k).d(j) - gam[l](i, j).d(k);
          for (int m = 0; m < D; ++m) r += gam[l](j, m) * gam[m](i, k) - gam[l](k, m) * gam[m](i, j);
          up[id(l, i, j, k)] = r;
          up[id(l, i, k, j)] = -r;
        }
  std::vector<J<D>> down(D * D * D * D, J<D>(0.0, o));
  for (int l = 0; l < D; ++l)
    for (int i = l + 1; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = j + 1; k < D; ++k) {
          J<D> r(0.0, o);
          for (int m = 0; m < D; ++m) r += g(l, m) * up[id(m, i, j, k)];
          down[id(l, i, j, k)] = r;
          down[id(i, l, j, k)] = -r;
          down[id(l, i, k, j)] = -r;
          down[id(i, l, k, j)] = r;
        }
  return down;
}

}  // namespace

template <int D>
Christoffel<D> christoffel(const JetMat<double, D>& g, const JetMat<double, D>& ginv) {
  std::array<JetMat<double, D>, D> dg;
  for (int a = 0; a < D; ++a)
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j) dg[a](i, j) = dg[a](j, i) = g(i, j).d(a);
  std::array<JetMat<double, D>, D> first;  // [l](i,j) = Gamma_{l,ij}
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j) first[l](i, j) = first[l](j, i) = (dg[i](l, j) + dg[j](l, i) - dg[l](i, j)) * 0.5;
  Christoffel<D> gam;
  const int o = dg[0](0, 0).order();
  for (int k = 0; k < D; ++k)
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j) {
        J<D> s(0.0, o);
        for (int l = 0; l < D; ++l) s += ginv(k, l) * first[l](i, j);
        gam[k](i, j) = gam[k](j, i) = s;
      }
  return gam;
}

template <int D>
JetMat<double, D> hessian(const Christoffel<D>& gam, const J<D>& f) {
  JetMat<double, D> h;
  std::array<J<D>, D> df;
  for (int a = 0; a < D; ++a) df[a] = f.d(a);
  for (int a = 0; a < D; ++a)
    for (int b = a; b < D; ++b) {
      J<D> s = df[a].d(b);
      for (int c = 0; c < D; ++c) s -= gam[c](a, b) * df[c];
      h(a, b) = h(b, a) = s;
    }
  return h;
}

template <int D>
J<D> laplacian(const JetMat<double, D>& ginv, const Christoffel<D>& gam, const J<D>& f) {
  const JetMat<double, D> h = hessian<D>(gam, f);
  J<D> s(0.0, h(0, 0).order());
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) s += ginv(a, b) * h(a, b);
  return s;
}

template <int D>
std::array<JetMat<double, D>, D> covariant_derivative(const Christoffel<D>& gam, const JetMat<double, D>& T) {
  std::array<JetMat<double, D>, D> out;
  for (int m = 0; m < D; ++m)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        J<D> s = T(i, j).d(m);
        for (int a = 0; a < D; ++a) s -= gam[a](m, i) * T(a, j) + gam[a](m, j) * T(i, a);
        out[m](i, j) = s;
      }
  return out;
}

template <int D>
JetMat<double, D> rough_laplacian(const JetMat<double, D>& ginv, const Christoffel<D>& gam,
                                  const JetMat<double, D>& T) {
  const auto nT = covariant_derivative<D>(gam, T);
  const int o = nT[0](0, 0).order() - 1;
  JetMat<double, D> out;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      J<D> s(0.0, o);
      for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) {
          // nabla_a (nabla T)_{b i j}
          J<D> t = nT[b](i, j).d(a);
          for (int c = 0; c < D; ++c)
            t -= gam[c](a, b) * nT[c](i, j) + gam[c](a, i) * nT[b](c, j) + gam[c](a, j) * nT[b](i, c);
          s += ginv(a, b) * t;
        }
      out(i, j) = s;
    }
  return out;
}

template <int D>
Riem<D> kulkarni_nomizu(const Mat<D>& A, const Mat<D>& B) {
  Riem<D> r;
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k)
          r(l * D + i, j * D + k) = A(l, j) * B(i, k) + A(i, k) * B(l, j) - A(l, k) * B(i, j) - A(i, j) * B(l, k);
  return r;
}

template <int D>
double norm2_tensor(const Mat<D>& ginv, const Mat<D>& T) {
  return (ginv * T * ginv * T.transpose()).trace();
}

template <int D>
double norm2_riem(const Mat<D>& ginv, const Riem<D>& R) {
  Riem<D> G;
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) G(l * D + i, a * D + b) = ginv(l, a) * ginv(i, b);
  return R.cwiseProduct(G * R * G).sum();
}

template <int D>
CurvaturePoint<D> curvature_from_jets(const JetMat<double, D>& gj, CurvatureLevel level) {
  const int lev = static_cast<int>(level);
  const int q = gj(0, 0).order();
  if (q < lev) throw capability_error("curvature: metric jets too short for the requested level");
  CurvaturePoint<D> p;
  p.level = lev;
  const JetMat<double, D> g = gj;
  const JetMat<double, D> ginv = jet_inverse<D>(g);
  p.g = values<D>(g);
  p.ginv = values<D>(ginv);
  check_metric<D>(p.g, 1e-8);
  p.sqrt_det = std::sqrt(p.g.determinant());
  const Christoffel<D> gam = christoffel<D>(g, ginv);
  p.gamma = values3<D>(gam);
  const std::vector<J<D>> R = riemann_jets<D>(g, gam);
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k) p.riem(l * D + i, j * D + k) = R[((l * D + i) * D + j) * D + k].value();
  const int oR = q - 2;
  JetMat<double, D> ric;
  for (int i = 0; i < D; ++i)
    for (int k = i; k < D; ++k) {
      J<D> s(0.0, oR);
      for (int l = 0; l < D; ++l)
        for (int j = 0; j < D; ++j)
          if (l != i && j != k) s += ginv(l, j) * R[((l * D + i) * D + j) * D + k];
      ric(i, k) = ric(k, i) = s;
    }
  J<D> scal(0.0, oR);
  for (int i = 0; i < D; ++i)
    for (int k = 0; k < D; ++k) scal += ginv(i, k) * ric(i, k);
  p.ric = values<D>(ric);
  p.scal = scal.value();
  if constexpr (D != 4) {
    return p;
  } else {
    JetMat<double, D> P;
    const J<D> Jj = scal / 6.0;
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j) P(i, j) = P(j, i) = (ric(i, j) - Jj * g(i, j)) * 0.5;
    p.sch = values<D>(P);
    p.J = Jj.value();
    p.weyl = p.riem - kulkarni_nomizu<D>(p.sch, p.g);
    if (lev < 3) return p;

    const auto nP = covariant_derivative<D>(gam, P);
    p.nabla_sch = values3<D>(nP);
    for (int a = 0; a < D; ++a) p.grad_J(a) = Jj.d(a).value();
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k) p.cot[i](j, k) = p.nabla_sch[i](j, k) - p.nabla_sch[j](i, k);
    if (lev < 4) return p;

    // Lap Sch and Hess J from the jets; algebraic terms on values.
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j) {
        double s = 0;
        for (int a = 0; a < D; ++a)
          for (int b = 0; b < D; ++b) {
            J<D> t = nP[b](i, j).d(a);
            for (int c = 0; c < D; ++c)
              t -= gam[c](a, b) * nP[c](i, j) + gam[c](a, i) * nP[b](c, j) + gam[c](a, j) * nP[b](i, c);
            s += p.ginv(a, b) * t.value();
          }
        p.lap_sch(i, j) = p.lap_sch(j, i) = s;
      }
    p.hess_J = values<D>(hessian<D>(gam, Jj));
    p.lap_J = (p.ginv.cwiseProduct(p.hess_J)).sum();
    const Mat<D> Pu = p.ginv * p.sch * p.ginv;  // Sch^{pk}
    Mat<D> wterm;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        double s = 0;
        for (int pp = 0; pp < D; ++pp)
          for (int k = 0; k < D; ++k) s += Pu(pp, k) * riem_at<D>(p.weyl, k, i, pp, j);
        wterm(i, j) = s;
      }
    const double nP2 = norm2_tensor<D>(p.ginv, p.sch);
    p.bach = p.lap_sch - p.hess_J - 4.0 * p.sch * p.ginv * p.sch + nP2 * p.g + 2.0 * wterm;
    return p;
  }
}

template <int D>
J<D> scalar_curvature_jet(const JetMat<double, D>& g) {
  const JetMat<double, D> ginv = jet_inverse<D>(g);
  const Christoffel<D> gam = christoffel<D>(g, ginv);
  const std::vector<J<D>> R = riemann_jets<D>(g, gam);
  J<D> s(0.0, g(0, 0).order() - 2);
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k)
          if (l != i && j != k) s += ginv(l, j) * ginv(i, k) * R[((l * D + i) * D + j) * D + k];
  return s;
}

template <int D>
CurvaturePoint<D> curvature_at(const MetricField<D>& g, const Vec<D>& x, CurvatureLevel level) {
  return curvature_from_jets<D>(g.jets(x, static_cast<int>(level)), level);
}

template <int D>
double CurvaturePoint<D>::norm_riem() const {
  return std::sqrt(std::max(0.0, norm2_riem<D>(ginv, riem)));
}
template <int D>
double CurvaturePoint<D>::norm_ric() const {
  return std::sqrt(std::max(0.0, norm2_tensor<D>(ginv, ric)));
}
template <int D>
double CurvaturePoint<D>::norm_sch() const {
  return std::sqrt(std::max(0.0, norm2_tensor<D>(ginv, sch)));
}
template <int D>
double CurvaturePoint<D>::norm_weyl() const {
  return std::sqrt(std::max(0.0, norm2_riem<D>(ginv, weyl)));
}
template <int D>
double CurvaturePoint<D>::norm_bach() const {
  return std::sqrt(std::max(0.0, norm2_tensor<D>(ginv, bach)));
}
template <int D>
double CurvaturePoint<D>::norm_cot() const {
  double s = 0;
  for (int i = 0; i < D; ++i)
    for (int a = 0; a < D; ++a)
      s += ginv(i, a) * (ginv * cot[i] * ginv * cot[a].transpose()).trace();
  return std::sqrt(std::max(0.0, s));
}

template <int D>
CurvaturePack<D> curvature_pack(const MetricField<D>& g, const Chart& chart, CurvatureLevel level) {
  if (chart.dim() != D) throw std::invalid_argument("curvature_pack: chart dimension mismatch");
  CurvaturePack<D> pack{chart, level, {}};
  pack.pts.resize(chart.num_nodes());
  const bool sampled = !g.closed_form();
  if (sampled && !(g.samples().chart == chart))
    throw std::invalid_argument("curvature_pack: sampled metric lives on a different chart");
  for (int n = 0; n < chart.num_nodes(); ++n) {
    const JetMat<double, D> jets =
        sampled ? g.node_jets(n, static_cast<int>(level)) : g.jets(Vec<D>(chart.cartesian(n)), static_cast<int>(level));
    pack.pts[n] = curvature_from_jets<D>(jets, level);
  }
  return pack;
}

template <int D>
CurvaturePack<D> curvature_pack(const MetricField<D>& g, CurvatureLevel level) {
  return curvature_pack<D>(g, g.samples().chart, level);
}

template <int D>
json CurvaturePack<D>::summary() const {
  struct Acc {
    KahanSum l2, l4;
    double sup = 0;
  };
  const char* names[] = {"Riem", "Ric", "Sch", "W", "Cot", "B", "J", "Scal"};
  std::array<Acc, 8> acc;
  KahanSum vol;
  double max_trace_b = 0;
  for (int n = 0; n < chart.num_nodes(); ++n) {
    const auto& p = pts[n];
    const double w = chart.weight(n) * p.sqrt_det;
    const double v[8] = {p.norm_riem(), p.norm_ric(), p.norm_sch(), p.norm_weyl(),
                         p.norm_cot(),  p.norm_bach(), std::abs(p.J), std::abs(p.scal)};
    for (int k = 0; k < 8; ++k) {
      acc[k].l2.add(w * v[k] * v[k]);
      acc[k].l4.add(w * std::pow(v[k], 4));
      acc[k].sup = std::max(acc[k].sup, v[k]);
    }
    vol.add(w);
    max_trace_b = std::max(max_trace_b, std::abs(p.ginv.cwiseProduct(p.bach).sum()));
  }
  json j;
  j["chart"] = chart_header(chart);
  j["level"] = static_cast<int>(level);
  j["volume"] = vol.value();
  for (int k = 0; k < 8; ++k) {
    if (D != 4 && k >= 2 && k <= 6) continue;
    if (static_cast<int>(level) < 3 && k == 4) continue;
    if (static_cast<int>(level) < 4 && k == 5) continue;
    j["norms"][names[k]] = {{"L2", std::sqrt(acc[k].l2.value())},
                            {"L4", std::pow(acc[k].l4.value(), 0.25)},
                            {"sup", acc[k].sup}};
  }
  if (static_cast<int>(level) >= 4) j["max_abs_trace_B"] = max_trace_b;
  return j;
}

template <int D>
std::string CurvaturePack<D>::csv() const {
  std::vector<std::string> head;
  for (int a = 0; a < chart.num_axes(); ++a) head.push_back("q" + std::to_string(a));
  for (const char* h : {"sqrt_det", "Scal", "J", "abs_Riem", "abs_Ric", "abs_Sch", "abs_W", "abs_Cot", "abs_B", "trace_B"})
    head.push_back(h);
  std::vector<std::vector<double>> rows;
  for (int n = 0; n < chart.num_nodes(); ++n) {
    const auto& p = pts[n];
    std::vector<double> r = chart.coords(n);
    for (double v : {p.sqrt_det, p.scal, p.J, p.norm_riem(), p.norm_ric(), p.norm_sch(), p.norm_weyl(), p.norm_cot(),
                     p.norm_bach(), p.ginv.cwiseProduct(p.bach).sum()})
      r.push_back(v);
    rows.push_back(std::move(r));
  }
  return table_csv(head, rows);
}

template <int D>
Mat<D> hessian(const MetricField<D>& g, const std::function<J<D>(const JetVec<double, D>&)>& f, const Vec<D>& x) {
  const JetMat<double, D> gj = g.jets(x, 2);
  const auto gam = christoffel<D>(gj, jet_inverse<D>(gj));
  return values<D>(hessian<D>(gam, f(seed<double, D>(x, 2))));
}

template <int D>
double laplacian(const MetricField<D>& g, const std::function<J<D>(const JetVec<double, D>&)>& f, const Vec<D>& x) {
  const JetMat<double, D> gj = g.jets(x, 2);
  const JetMat<double, D> gi = jet_inverse<D>(gj);
  return laplacian<D>(gi, christoffel<D>(gj, gi), f(seed<double, D>(x, 2))).value();
}

Mat<4> rough_laplacian(const MetricField<4>& g, const std::function<JetMat<double, 4>(const JetVec<double, 4>&)>& T,
                       const Vec<4>& x) {
  const JetMat<double, 4> gj = g.jets(x, 2);
  const JetMat<double, 4> gi = jet_inverse<4>(gj);
  return values<4>(rough_laplacian<4>(gi, christoffel<4>(gj, gi), T(seed<double, 4>(x, 2))));
}

// ---- second route -----------------------------------------------------------

Mat<4> bach_via_cotton(const JetMat<double, 4>& g) {
  constexpr int D = 4;
  using JJ = J<4>;
  if (g(0, 0).order() < 4) throw capability_error("bach: needs metric jets of order 4");
  const int q = 4;
  // inverse by cofactor expansion through Eigen's generic path
  JetMat<double, D> gi = g.inverse();
  // first and second partials of the metric
  JJ dg[D][D][D], ddg[D][D][D][D];
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j)
      for (int a = 0; a < D; ++a) {
        dg[i][j][a] = g(i, j).d(a);
        for (int b = 0; b < D; ++b) ddg[i][j][a][b] = dg[i][j][a].d(b);
      }
  JJ G1[D][D][D], G2[D][D][D];  // G1[m][i][j] = Gamma_{m,ij}, G2[m][i][j] = Gamma^m_ij
  for (int m = 0; m < D; ++m)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) G1[m][i][j] = (dg[m][i][j] + dg[m][j][i] - dg[i][j][m]) * 0.5;
  for (int m = 0; m < D; ++m)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        JJ s(0.0, q - 1);
        for (int n = 0; n < D; ++n) s += gi(m, n) * G1[n][i][j];
        G2[m][i][j] = s;
      }
  JJ R[D][D][D][D];
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k) {
          JJ s = (ddg[l][k][i][j] + ddg[i][j][l][k] - ddg[l][j][i][k] - ddg[i][k][l][j]) * 0.5;
          for (int m = 0; m < D; ++m)
            for (int n = 0; n < D; ++n) s += g(m, n) * (G2[m][i][j] * G2[n][l][k] - G2[m][i][k] * G2[n][l][j]);
          R[l][i][j][k] = s;
        }
  JJ Ric[D][D];
  for (int i = 0; i < D; ++i)
    for (int k = 0; k < D; ++k) {
      JJ s(0.0, q - 2);
      for (int l = 0; l < D; ++l)
        for (int j = 0; j < D; ++j) s += gi(l, j) * R[l][i][j][k];
      Ric[i][k] = s;
    }
  JJ S(0.0, q - 2);
  for (int i = 0; i < D; ++i)
    for (int k = 0; k < D; ++k) S += gi(i, k) * Ric[i][k];
  JJ P[D][D];
  for (int i = 0; i < D; ++i)
    for (int k = 0; k < D; ++k) P[i][k] = (Ric[i][k] - S * g(i, k) / 6.0) * 0.5;
  // Weyl through the Ricci decomposition (values suffice)
  double W[D][D][D][D];
  auto gv = [&](int a, int b) { return g(a, b).value(); };
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k) {
          const double ricKN = Ric[l][j].value() * gv(i, k) + Ric[i][k].value() * gv(l, j) -
                               Ric[l][k].value() * gv(i, j) - Ric[i][j].value() * gv(l, k);
          const double ggKN = 2 * (gv(l, j) * gv(i, k) - gv(l, k) * gv(i, j));
          W[l][i][j][k] = R[l][i][j][k].value() - ricKN / 2.0 + S.value() / 12.0 * ggKN;
        }
  // nabla_k P_ij, Cotton C_kij = nabla_k P_ij - nabla_i P_kj
  JJ NP[D][D][D];
  for (int k = 0; k < D; ++k)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        JJ s = P[i][j].d(k);
        for (int a = 0; a < D; ++a) s -= G2[a][k][i] * P[a][j] + G2[a][k][j] * P[i][a];
        NP[k][i][j] = s;
      }
  JJ C[D][D][D];
  for (int k = 0; k < D; ++k)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) C[k][i][j] = NP[k][i][j] - NP[i][k][j];
  Mat<4> B;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      double div = 0;
      for (int a = 0; a < D; ++a)
        for (int k = 0; k < D; ++k) {
          // nabla_a C_kij
          JJ t = C[k][i][j].d(a);
          for (int c = 0; c < D; ++c)
            t -= G2[c][a][k] * C[c][i][j] + G2[c][a][i] * C[k][c][j] + G2[c][a][j] * C[k][i][c];
          div += gi(a, k).value() * t.value();
        }
      double wt = 0;
      for (int k = 0; k < D; ++k)
        for (int l = 0; l < D; ++l) {
          double Pkl = 0;
          for (int a = 0; a < D; ++a)
            for (int b = 0; b < D; ++b) Pkl += gi(k, a).value() * gi(l, b).value() * P[a][b].value();
          wt += Pkl * W[k][i][l][j];
        }
      B(i, j) = div + wt;
    }
  return B;
}

double bach_cross_check(const MetricField<4>& g, const Chart& chart) {
  if (!g.closed_form()) throw capability_error("bach_cross_check: needs a closed-form metric");
  double dev = 0, scale = 0;
  for (int n = 0; n < chart.num_nodes(); ++n) {
    const Vec<4> x = chart.cartesian(n);
    const JetMat<double, 4> gj = g.jets(x, 4);
    const Mat<4> b1 = curvature_from_jets<4>(gj, CurvatureLevel::bach).bach;
    const Mat<4> b2 = bach_via_cotton(gj);
    dev = std::max(dev, (b1 - b2).cwiseAbs().maxCoeff());
    scale = std::max(scale, b1.cwiseAbs().maxCoeff());
  }
  return dev / (1 + scale);
}

#define CGEOM_INST(D)                                                                                          \
  template struct CurvaturePoint<D>;                                                                           \
  template struct CurvaturePack<D>;                                                                            \
  template CurvaturePoint<D> curvature_from_jets<D>(const JetMat<double, D>&, CurvatureLevel);                \
  template CurvaturePoint<D> curvature_at<D>(const MetricField<D>&, const Vec<D>&, CurvatureLevel);           \
  template CurvaturePack<D> curvature_pack<D>(const MetricField<D>&, const Chart&, CurvatureLevel);           \
  template CurvaturePack<D> curvature_pack<D>(const MetricField<D>&, CurvatureLevel);                         \
  template Christoffel<D> christoffel<D>(const JetMat<double, D>&, const JetMat<double, D>&);                 \
  template JetMat<double, D> hessian<D>(const Christoffel<D>&, const J<D>&);                                  \
  template J<D> laplacian<D>(const JetMat<double, D>&, const Christoffel<D>&, const J<D>&);                   \
  template std::array<JetMat<double, D>, D> covariant_derivative<D>(const Christoffel<D>&,                    \
                                                                    const JetMat<double, D>&);                \
  template JetMat<double, D> rough_laplacian<D>(const JetMat<double, D>&, const Christoffel<D>&,              \
                                                const JetMat<double, D>&);                                    \
  template Mat<D> hessian<D>(const MetricField<D>&, const std::function<J<D>(const JetVec<double, D>&)>&,     \
                             const Vec<D>&);                                                                  \
  template double laplacian<D>(const MetricField<D>&, const std::function<J<D>(const JetVec<double, D>&)>&,   \
                               const Vec<D>&);                                                                \
  template J<D> scalar_curvature_jet<D>(const JetMat<double, D>&);                                             \
  template Riem<D> kulkarni_nomizu<D>(const Mat<D>&, const Mat<D>&);                                          \
  template double norm2_tensor<D>(const Mat<D>&, const Mat<D>&);                                              \
  template double norm2_riem<D>(const Mat<D>&, const Riem<D>&);

CGEOM_INST(2)
CGEOM_INST(4)

}  // namespace cgeom
