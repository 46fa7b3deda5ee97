// One PASS/FAIL line per acceptance criterion. argv[1]: path of the cgeom CLI.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "cgeom/frames2d.hpp"
#include "cgeom/gauge4d.hpp"
#include "cgeom/io.hpp"
#include "cgeom/verify.hpp"
#include "oracles/shooting.hpp"

using namespace cgeom;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (ok ? "" : "!") << what << "; ";
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string e(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2e", v);
  return b;
}

Jet<double, 4> r2(const JetVec<double, 4>& x) { return x(0) * x(0) + x(1) * x(1) + x(2) * x(2) + x(3) * x(3); }

const Chart kChart = Chart::radial4(0.3, 1.0, 8, 8, 8, RadialRule::gauss);

// ---------------------------------------------------------------------------

void c1(Verdict& v) {
  // flat4: every tensor vanishes; round_sphere4: R_lijk = g_lj g_ik - g_lk g_ij, Ric = 3g, Sch = g/2, J = 2,
  // W = Cot = B = 0; round_sphere2: K = 1
  const auto t0 = std::chrono::steady_clock::now();
  const auto flat = curvature_pack<4>(catalog4("flat4"), kChart);
  const double t_flat = seconds_since(t0);
  double ef = 0;
  for (const auto& p : flat.pts)
    ef = std::max({ef, p.riem.cwiseAbs().maxCoeff(), p.ric.cwiseAbs().maxCoeff(), std::abs(p.scal),
                   p.sch.cwiseAbs().maxCoeff(), p.weyl.cwiseAbs().maxCoeff(), p.bach.cwiseAbs().maxCoeff(),
                   p.norm_cot()});
  const auto t1 = std::chrono::steady_clock::now();
  const auto sph = curvature_pack<4>(catalog4("round_sphere4"), kChart);
  const double t_sph = seconds_since(t1);
  double es = 0;
  for (const auto& p : sph.pts) {
    double er = 0;
    for (int l = 0; l < 4; ++l)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k)
            er = std::max(er, std::abs(riem_at<4>(p.riem, l, i, j, k) - (p.g(l, j) * p.g(i, k) - p.g(l, k) * p.g(i, j))));
    es = std::max({es, er, (p.ric - 3 * p.g).cwiseAbs().maxCoeff(), std::abs(p.scal - 12),
                   (p.sch - 0.5 * p.g).cwiseAbs().maxCoeff(), std::abs(p.J - 2), p.weyl.cwiseAbs().maxCoeff(),
                   p.norm_cot(), p.bach.cwiseAbs().maxCoeff()});
  }
  const auto s2 = curvature_pack<2>(catalog2("round_sphere2"), Chart::polar(0.05, 1.0, 16, 32, RadialRule::gauss),
                                    CurvatureLevel::riemann);
  double e2 = 0;
  for (const auto& p : s2.pts) e2 = std::max(e2, std::abs(p.gauss_curvature() - 1));
  v.require(ef <= 1e-8, "flat4 max " + e(ef));
  v.require(es <= 1e-8, "sphere4 max " + e(es));
  v.require(e2 <= 1e-8, "sphere2 |K-1| " + e(e2));
  v.require(t_flat < 10 && t_sph < 10, "pack time " + e(t_flat) + "s/" + e(t_sph) + "s");
}

void c2(Verdict& v) {
  const Chart ch = Chart::radial4(0.3, 1.0, 8, 4, 8, RadialRule::gauss);
  for (const auto& [name, p] : std::vector<std::pair<std::string, Params>>{
           {"perturbed", {{"eps", "0.2"}}}, {"anisotropic", {{"eps", "0.3"}}}, {"conformal_bump", {}}}) {
    const auto g = catalog4(name, p);
    const double d = bach_cross_check(g, ch);
    const double tr = curvature_pack<4>(g, ch).summary()["max_abs_trace_B"].get<double>();
    v.require(d <= 1e-6, name + " routes " + e(d));
    v.require(tr <= 1e-9, name + " trace " + e(tr));
  }
}

void c3(Verdict& v) {
  using U = ConformalFactor<4>;
  const std::vector<std::pair<MetricField<4>, U>> pairs = {
      {catalog4("flat4"), U{"sphere_from_flat", [](const JetVec<double, 4>& x) { return log(2.0 / (1.0 + r2(x))); }}},
      {catalog4("perturbed", {{"eps", "0.2"}}),
       U{"mixed", [](const JetVec<double, 4>& x) { return 0.3 * sin(x(0)) * x(1) + 0.2 * x(2); }}},
      {catalog4("anisotropic", {{"eps", "0.3"}}), U{"gaussian", [](const JetVec<double, 4>& x) { return 0.2 * exp(-r2(x)); }}},
      {catalog4("round_sphere4"), U{"bilinear", [](const JetVec<double, 4>& x) { return 0.1 * x(0) * x(3); }}},
      {catalog4("conformal_bump"), U{"cosine", [](const JetVec<double, 4>& x) { return 0.15 * cos(x(1)); }}},
  };
  const Chart ch = Chart::radial4(0.3, 0.9, 8, 4, 8, RadialRule::gauss);
  double worst = 0, weyl = 0;
  for (const auto& [g, u] : pairs) {
    const auto [gu, rep] = conformal_change(g, u, ch);
    const double m = std::max({rep.schouten, rep.J, rep.bach, rep.hessian});
    worst = std::max(worst, m);
    weyl = std::max(weyl, rep.weyl_energy_rel);
    v.require(m <= 1e-7, g.name() + "/" + u.name + " " + e(m));
  }
  // sphere-from-flat yields the catalog sphere
  const auto gu = conformal_metric(pairs[0].first, pairs[0].second);
  const double dm = (gu.value(Vec<4>(0.2, 0.1, -0.4, 0.3)) - catalog4("round_sphere4").value(Vec<4>(0.2, 0.1, -0.4, 0.3)))
                        .cwiseAbs()
                        .maxCoeff();
  v.require(dm < 1e-14, "sphere match " + e(dm));
  v.require(weyl <= 1e-6, "weyl energy rel " + e(weyl));
}

void c4(Verdict& v) {
  const auto sol = oracle::shoot_radial_el({}, 0.25, 1.0);
  const auto t0 = std::chrono::steady_clock::now();
  GaugeProblem p{catalog4("conformal_bump")};  // constants estimated inside
  const GaugeReport rep = minimize(p);
  const double t = seconds_since(t0);
  double d = 0;
  for (size_t i = 0; i < sol.r.size(); ++i) d = std::max(d, std::abs(sol.u[i] - rep.u_at(sol.r[i])));
  v.require(d <= 1e-5, "oracle sup " + e(d));
  v.require(rep.el_sup <= 1e-6, "EL " + e(rep.el_sup));
  v.require(rep.trace_monotone(), "trace monotone");
  v.require(rep.ledger_core_holds(), "ledger core");
  v.require(t < 60, "time " + e(t) + "s");
}

void c5(Verdict& v) {
  for (int n : {2, 3, 4}) {
    const auto s = circulation(catalog_coframe("polar_singular", {{"n", std::to_string(n)}}), dyadic_radii(0.5, 1e-3));
    double dev = 0;
    for (double c : s.circulation) dev = std::max(dev, std::abs(c - 2 * pi * (n - 1)));
    v.require(dev <= 1e-3, "n=" + std::to_string(n) + " dev " + e(dev));
    v.require(s.degree == 0, "n=" + std::to_string(n) + " degree 0");
  }
  const Frames2DReport rc = frames2d_pipeline(catalog_coframe("essential"));
  v.require(rc.sing.divergent && !rc.pipeline_run, "essential divergent");
  const Frames2DReport rd = frames2d_pipeline(catalog_coframe("annulus_d"));
  v.require(rd.obstructed, "annulus_d obstructed");
  // degrees: integer windings of explicit frames
  const bool deg = frame_degree(catalog_coframe("flat2", {{"frame", "polar"}}), 0.3) == 1 &&
                   frame_degree([](double t) { return Vec<2>(std::cos(2 * t), std::sin(2 * t)); }) == 2 &&
                   frame_degree(catalog_coframe("flat2"), 0.7) == 0;
  v.require(deg, "frame degrees");
}

void c6(Verdict& v) {
  for (int n : {2, 3, 4}) {
    const Frames2DReport R = frames2d_pipeline(catalog_coframe("polar_singular", {{"n", std::to_string(n)}}));
    v.require(R.pipeline_run && R.coords.metric_error <= 1e-4,
              "n=" + std::to_string(n) + " metric " + e(R.coords.metric_error));
    if (n == 2) v.require(R.coords.branched && R.coords.model_error <= 1e-3, "z^2 fit " + e(R.coords.model_error));
  }
}

void c7(Verdict& v) {
  const CGBReport f = cgb_boundary_check(catalog4("flat4"), 0.5, 1.0);
  v.require(f.residual <= 1e-8 && std::abs(f.lhs - f.rhs) <= 1e-8, "flat " + e(f.residual));
  const CGBReport s = cgb_boundary_check(catalog4("round_sphere4"), 0.5, 1.0);
  v.require(s.residual <= 1e-5, "sphere " + e(s.residual));
  const CGBReport b = cgb_boundary_check(catalog4("conformal_bump"), 0.5, 1.0);
  v.require(b.residual <= 1e-5, "bump " + e(b.residual));
}

void c8(Verdict& v) {
  const Chart ch = Chart::radial4(0.25, 1.0, 8, 4, 8, RadialRule::gauss);
  double worst = 0;
  for (const char* name : {"perturbed", "anisotropic", "conformal_bump", "round_sphere4"})
    for (double s : {0.5, 0.25, 0.125}) {
      const auto g = name == std::string("perturbed") ? catalog4(name, {{"eps", "0.2"}}) : catalog4(name);
      worst = std::max(worst, scaling_report(g, s, ch, Vec<4>(0.5, 0, 0, 0), 0.25).max());
    }
  v.require(worst <= 1e-10, "identities " + e(worst));
  const auto g = catalog4("conformal_bump");
  const double sb = 0.5;
  std::vector<EpsBall> balls, scaled;
  for (const Vec<4>& c : {Vec<4>(0.3, 0, 0, 0), Vec<4>(0, 0.25, 0.1, 0)})
    for (double s : {0.08, 0.12}) {
      balls.push_back({c, s});
      scaled.push_back({c / sb, s / sb});
    }
  const double C0 = eps_regularity_scan(g, balls, 2, 48).C_fit;
  const double C1 = eps_regularity_scan(blowup_rescale(g, sb), scaled, 2, 48).C_fit;
  v.require(C0 > 0 && std::abs(C1 / C0 - 1) <= 0.01, "C_fit " + e(C0) + " -> " + e(C1));
}

void c9(Verdict& v) {
  const Chart ch = Chart::radial4(0.3, 0.9, 8, 8, 8, RadialRule::gauss);
  const double f = gauss_codazzi_check(immersion("flat_graph"), ch).residual;
  const double s = gauss_codazzi_check(immersion("sphere4"), ch).residual;
  const double b = gauss_codazzi_check(immersion("graph_bump"), ch).residual;
  v.require(f <= 1e-7, "flat " + e(f));
  v.require(s <= 1e-7, "sphere " + e(s));
  v.require(b <= 1e-6, "bump " + e(b));
}

void c10(Verdict& v, const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "cgeom_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::vector<std::pair<std::string, std::string>> cfgs = {
      {"frames", "verb = frames2d\nmetric = polar_singular\nmetric.n = 3\nseed = 11\n"},
      {"constants", "verb = verify\nverify.task = constants\nmetric = conformal_bump\nverify.samples = 60\nseed = 11\n"},
      {"gauge", "verb = gauge4d\nmetric = conformal_bump\ngauge.gamma_S = 0.21\ngauge.gamma_L = 0.34\nseed = 11\n"},
  };
  for (const auto& [name, text] : cfgs) {
    const fs::path cfg = root / (name + ".cfg");
    write_file(cfg.string(), text);
    for (const char* run : {"a", "b"}) {
      const std::string cmd = cli + " --config " + cfg.string() + " --out " + (root / (name + run)).string() +
                              " > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      v.require(WIFEXITED(rc) && WEXITSTATUS(rc) == 0, name + " run " + run + " exit 0");
    }
    int files = 0;
    bool same = true;
    for (const auto& ent : fs::directory_iterator(root / (name + "a"))) {
      const std::string fn = ent.path().filename().string();
      if (fn == "MANIFEST") continue;
      ++files;
      const fs::path other = root / (name + "b") / fn;
      same = same && fs::exists(other) && read_file(ent.path().string()) == read_file(other.string());
    }
    v.require(same && files >= 1, name + " byte-identical (" + std::to_string(files) + " files)");
  }
  fs::remove_all(root);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-cgeom>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria = {
      {"curvature closed forms", c1},
      {"Bach two routes, trace-free", c2},
      {"conformal covariance", c3},
      {"gauge solver vs shooting oracle", c4},
      {"2D circulations and flags", c5},
      {"Coulomb frame metric recovery", c6},
      {"Chern-Gauss-Bonnet with boundary", c7},
      {"blow-up scaling, eps-regularity invariance", c8},
      {"Gauss-Codazzi", c9},
      {"determinism", [&](Verdict& v) { c10(v, cli); }},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& ex) {
      v.require(false, std::string("exception: ") + ex.what());
    }
    if (!v.pass) ++failed;
    std::cout << "criterion " << i + 1 << ": " << (v.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << "  ["
              << v.detail.str() << e(seconds_since(t0)) << "s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
