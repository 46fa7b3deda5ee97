#include <doctest.h>

#include <cmath>

#include "cgeom/catalog.hpp"
#include "cgeom/curvature.hpp"

using namespace cgeom;

namespace {

// Riemann by nested central differences of the metric values only.
struct FdRiemann {
  const MetricField<4>& g;
  double h = 2e-3;

  Mat<4> dg(const Vec<4>& x, int a) const {
    Vec<4> e = Vec<4>::Zero();
    e(a) = h;
    return (g.value(x + e) - g.value(x - e)) / (2 * h);
  }
  // Gamma^k_ij
  std::array<Mat<4>, 4> gamma(const Vec<4>& x) const {
    const Mat<4> gi = g.value(x).inverse();
    std::array<Mat<4>, 4> d;
    for (int a = 0; a < 4; ++a) d[a] = dg(x, a);
    std::array<Mat<4>, 4> G;
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double s = 0;
          for (int l = 0; l < 4; ++l) s += 0.5 * gi(k, l) * (d[i](l, j) + d[j](l, i) - d[l](i, j));
          G[k](i, j) = s;
        }
    return G;
  }
  // R^l_ijk = d_j G^l_ik - d_k G^l_ij + G^l_jm G^m_ik - G^l_km G^m_ij
  double R_up(const Vec<4>& x, int l, int i, int j, int k) const {
    auto dG = [&](int a) {
      Vec<4> e = Vec<4>::Zero();
      e(a) = h;
      const auto p = gamma(x + e), m = gamma(x - e);
      std::array<Mat<4>, 4> r;
      for (int q = 0; q < 4; ++q) r[q] = (p[q] - m[q]) / (2 * h);
      return r;
    };
    const auto G = gamma(x);
    const auto dj = dG(j), dk = dG(k);
    double s = dj[l](i, k) - dk[l](i, j);
    for (int m = 0; m < 4; ++m) s += G[l](j, m) * G[m](i, k) - G[l](k, m) * G[m](i, j);
    return s;
  }
};

}  // namespace

TEST_CASE("2D conformal metric: K = -e^{-2 lambda} Delta lambda") {
  // lambda = 0.3 x y + 0.1 x^2, Delta lambda = 0.2
  const auto g = MetricField<2>::closed("conf2", [](const JetVec<double, 2>& x) {
    const auto lam = 0.3 * x(0) * x(1) + 0.1 * x(0) * x(0);
    JetMat<double, 2> m;
    m(0, 0) = m(1, 1) = exp(2.0 * lam);
    m(0, 1) = m(1, 0) = Jet<double, 2>(0.0, x(0).order());
    return m;
  });
  for (const Vec<2>& p : {Vec<2>(0.1, 0.2), Vec<2>(-0.5, 0.4), Vec<2>(0.7, -0.3)}) {
    const double lam = 0.3 * p(0) * p(1) + 0.1 * p(0) * p(0);
    const auto c = curvature_at<2>(g, p, CurvatureLevel::riemann);
    CHECK(c.gauss_curvature() == doctest::Approx(-0.2 * std::exp(-2 * lam)).epsilon(1e-12));
  }
}

TEST_CASE("round spheres: constant curvature closed forms") {
  const auto s2 = catalog2("round_sphere2");
  CHECK(curvature_at<2>(s2, Vec<2>(0.3, -0.8), CurvatureLevel::riemann).gauss_curvature() ==
        doctest::Approx(1.0).epsilon(1e-12));

  const auto s4 = catalog4("round_sphere4");
  const auto c = curvature_at<4>(s4, Vec<4>(0.2, -0.4, 0.1, 0.5));
  CHECK(c.scal == doctest::Approx(12.0).epsilon(1e-11));
  CHECK((c.ric - 3 * c.g).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((c.sch - 0.5 * c.g).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(c.J == doctest::Approx(2.0).epsilon(1e-11));
  CHECK(c.norm_weyl() < 1e-10);
  CHECK(c.norm_cot() < 1e-9);
  CHECK(c.norm_bach() < 1e-8);
  // R_lijk = g_lj g_ik - g_lk g_ij
  double e = 0;
  for (int l = 0; l < 4; ++l)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          e = std::max(e, std::abs(riem_at<4>(c.riem, l, i, j, k) - (c.g(l, j) * c.g(i, k) - c.g(l, k) * c.g(i, j))));
  CHECK(e < 1e-10);
}

TEST_CASE("4D conformally flat: Scal = -6 e^{-2u} (Delta u + |du|^2), Weyl = 0") {
  // u = 0.1 x0 x1 + 0.05 x2^2 - 0.08 x3
  const auto g = MetricField<4>::closed("conf4", [](const JetVec<double, 4>& x) {
    const auto u = 0.1 * x(0) * x(1) + 0.05 * x(2) * x(2) - 0.08 * x(3);
    JetMat<double, 4> m;
    const auto e = exp(2.0 * u);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = i == j ? e : Jet<double, 4>(0.0, x(0).order());
    return m;
  });
  const Vec<4> p(0.3, -0.2, 0.5, 0.1);
  const double u = 0.1 * p(0) * p(1) + 0.05 * p(2) * p(2) - 0.08 * p(3);
  const double lap = 0.1, du2 = sq(0.1 * p(1)) + sq(0.1 * p(0)) + sq(0.1 * p(2)) + sq(0.08);
  const auto c = curvature_at<4>(g, p);
  CHECK(c.scal == doctest::Approx(-6 * std::exp(-2 * u) * (lap + du2)).epsilon(1e-11));
  CHECK(c.norm_weyl() < 1e-11);
  CHECK(std::abs(c.ginv.cwiseProduct(c.bach).sum()) < 1e-11);
}

TEST_CASE("Riemann matches an independent finite-difference oracle on a non-conformally-flat metric") {
  const auto g = catalog4("anisotropic", {{"eps", "0.3"}});
  const Vec<4> p(0.4, -0.3, 0.6, 0.2);
  const auto c = curvature_at<4>(g, p, CurvatureLevel::riemann);
  const FdRiemann fd{g};
  double err = 0, mx = 0;
  for (int l = 0; l < 4; ++l)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = j + 1; k < 4; ++k) {
          double lowered = 0;
          for (int m = 0; m < 4; ++m) lowered += c.g(l, m) * fd.R_up(p, m, i, j, k);
          err = std::max(err, std::abs(riem_at<4>(c.riem, l, i, j, k) - lowered));
          mx = std::max(mx, std::abs(lowered));
        }
  CHECK(mx > 0.05);
  CHECK(err < 1e-5);
}

TEST_CASE("algebraic symmetries, Bianchi identity and trace-free Bach") {
  const auto g = catalog4("perturbed", {{"eps", "0.2"}});
  const auto c = curvature_at<4>(g, Vec<4>(0.1, 0.05, 0.0, 0.2));
  double sym = 0, bianchi = 0;
  for (int l = 0; l < 4; ++l)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          const double R = riem_at<4>(c.riem, l, i, j, k);
          sym = std::max({sym, std::abs(R + riem_at<4>(c.riem, i, l, j, k)), std::abs(R + riem_at<4>(c.riem, l, i, k, j)),
                          std::abs(R - riem_at<4>(c.riem, j, k, l, i))});
          bianchi = std::max(bianchi, std::abs(R + riem_at<4>(c.riem, l, j, k, i) + riem_at<4>(c.riem, l, k, i, j)));
        }
  CHECK(sym < 1e-12);
  CHECK(bianchi < 1e-12);
  CHECK(c.norm_bach() > 1e-3);
  CHECK(std::abs(c.ginv.cwiseProduct(c.bach).sum()) < 1e-9);
  CHECK((c.bach - c.bach.transpose()).cwiseAbs().maxCoeff() < 1e-9);
  // second route
  const auto jets = g.jets(Vec<4>(0.1, 0.05, 0.0, 0.2), 4);
  CHECK((bach_via_cotton(jets) - c.bach).cwiseAbs().maxCoeff() < 1e-8 * (1 + c.bach.cwiseAbs().maxCoeff()));
}

TEST_CASE("curvature pack summary and csv") {
  const auto g = catalog4("flat4");
  const auto pack = curvature_pack<4>(g, Chart::radial4(0.3, 1.0, 8, 8, 8, RadialRule::gauss));
  const json s = pack.summary();
  CHECK(s["max_abs_trace_B"].get<double>() < 1e-14);
  CHECK(static_cast<int>(pack.pts.size()) == pack.chart.num_nodes());
  CHECK(pack.csv().find("\n") != std::string::npos);
}
