#include "cgeom/run.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "cgeom/frames2d.hpp"
#include "cgeom/gauge4d.hpp"
#include "cgeom/verify.hpp"

namespace cgeom {

namespace {

struct Ctx {
  const RunConfig& c;
  RunResult& r;
  json report;

  void check(const std::string& name, double lhs, double rhs) {
    r.assertions.push_back({name, lhs, rhs, lhs <= rhs});
  }
  void check_true(const std::string& name, bool v) { check(name, v ? 0.0 : 1.0, 0.0); }
};

Vec<4> vec4(const std::vector<double>& v, const std::string& key) {
  if (v.size() != 4) throw ConfigError("config: '" + key + "' needs 4 components");
  return Vec<4>(v[0], v[1], v[2], v[3]);
}

Chart chart4(const RunConfig& c, const MetricField<4>& g, double r_in, double r_out) {
  r_in = c.num("chart.r_in", std::max(r_in, 2 * g.r_min()));
  r_out = c.num("chart.r_out", std::max(r_out, 2 * r_in));
  if (!(r_in > 0 && r_in < r_out)) throw ConfigError("config: chart needs 0 < r_in < r_out");
  if (r_in < g.r_min() || r_out > g.r_max())
    throw ConfigError("config: chart [" + fmt(r_in) + ", " + fmt(r_out) + "] leaves the domain of '" + g.name() + "'");
  return Chart::radial4(r_in, r_out, c.integer("chart.n_r", 8), c.integer("chart.n_eta", 8), c.integer("chart.n_xi", 8),
                        RadialRule::gauss);
}

void run_curvature(Ctx& x) {
  const RunConfig& c = x.c;
  const double tol_zero = c.num("tol.zero", 1e-10), tol_cf = c.num("tol.closed_form", 1e-8);
  if (catalog_dim(c.metric) == 2) {
    const MetricField<2> g = catalog2(c.metric, c.metric_params);
    const double r_in = c.num("chart.r_in", std::max(0.05, 2 * g.r_min()));
    const Chart ch = Chart::polar(r_in, c.num("chart.r_out", 1.0), c.integer("chart.n_r", 16),
                                  c.integer("chart.n_theta", 32), RadialRule::gauss);
    const auto pack = curvature_pack<2>(g, ch, CurvatureLevel::riemann);
    x.report = pack.summary();
    double kmax = 0, kdev_sphere = 0;
    for (const auto& p : pack.pts) {
      kmax = std::max(kmax, std::abs(p.gauss_curvature()));
      kdev_sphere = std::max(kdev_sphere, std::abs(p.gauss_curvature() - 1));
    }
    x.report["gauss_curvature_sup"] = kmax;
    if (c.metric == "flat2") x.check("gauss_curvature_zero", kmax, tol_zero);
    if (c.metric == "round_sphere2") x.check("gauss_curvature_one", kdev_sphere, tol_cf);
    x.r.files["curvature.csv"] = pack.csv();
    return;
  }
  const MetricField<4> g = catalog4(c.metric, c.metric_params);
  const Chart ch = chart4(c, g, 0.3, 1.0);
  const auto pack = curvature_pack<4>(g, ch, CurvatureLevel::bach);
  x.report = pack.summary();
  x.check("max_abs_trace_B", x.report["max_abs_trace_B"].get<double>(), c.num("tol.trace", 1e-9));
  if (c.flag("curvature.bach_check", true)) {
    const double d = bach_cross_check(g, ch);
    x.report["bach_routes_relative_difference"] = d;
    x.check("bach_two_routes", d, c.num("tol.bach", 1e-6));
  }
  if (c.metric == "flat4") {
    double m = 0;
    for (const auto& p : pack.pts)
      m = std::max({m, p.norm_riem(), p.norm_ric(), p.norm_sch(), p.norm_weyl(), p.norm_cot(), p.norm_bach(),
                    std::abs(p.scal)});
    x.check("flat_all_norms_zero", m, tol_zero);
  }
  if (c.metric == "round_sphere4") {
    double s = 0, w = 0, ric = 0;
    for (const auto& p : pack.pts) {
      s = std::max(s, std::abs(p.scal - 12));
      w = std::max(w, p.norm_weyl());
      ric = std::max(ric, (p.ric - 3 * p.g).cwiseAbs().maxCoeff());
    }
    x.check("sphere_scal_12", s, tol_cf);
    x.check("sphere_weyl_zero", w, tol_cf);
    x.check("sphere_ric_3g", ric, tol_cf);
  }
  x.r.files["curvature.csv"] = pack.csv();
}

void run_gauge4d(Ctx& x) {
  const RunConfig& c = x.c;
  GaugeProblem p{catalog4(c.metric, c.metric_params)};
  p.r_in = c.num("gauge.r_in", p.r_in);
  p.r_out = c.num("gauge.r_out", p.r_out);
  p.gamma_S = c.num("gauge.gamma_S", 0);
  p.gamma_L = c.num("gauge.gamma_L", 0);
  p.n_cheb = c.integer("gauge.n_cheb", p.n_cheb);
  p.grid_n = c.integer("gauge.grid_n", p.grid_n);
  p.max_iter = c.integer("gauge.max_iter", p.max_iter);
  p.tol_grad = c.num("tol.grad", -1);
  p.tol_el = c.num("tol.el", p.tol_el);
  p.seed = c.seed;
  const std::string mode = c.str("gauge.mode", "radial");
  if (mode != "radial" && mode != "full_grid") throw ConfigError("config: gauge.mode must be radial or full_grid");
  p.mode = mode == "radial" ? GaugeMode::radial : GaugeMode::full_grid;
  const GaugeReport rep = p.mode == GaugeMode::radial ? minimize(p) : minimize_full_grid(p);
  x.report = rep.to_json();
  if (p.mode == GaugeMode::radial) x.check("el_residual_sup", rep.el_sup, p.tol_el);
  x.check_true("energy_trace_non_increasing", rep.trace_monotone());
  x.check_true("ledger_core_inequalities", rep.ledger_core_holds());
  x.r.files["energy_trace.csv"] = rep.trace_csv();
  if (p.mode == GaugeMode::radial) x.r.files["profile.csv"] = rep.profile_csv();
}

void run_frames2d(Ctx& x) {
  const RunConfig& c = x.c;
  const Coframe2D cf = catalog_coframe(c.metric, c.metric_params);
  Frames2DOptions o;
  o.r_in = c.num("frames.r_in", o.r_in);
  o.n_s = c.integer("frames.n_s", o.n_s);
  o.n_theta = c.integer("frames.n_theta", o.n_theta);
  o.samples = c.integer("frames.samples", o.samples);
  o.r_check = c.num("frames.r_check", o.r_check);
  o.radii = c.list("frames.radii", {});
  o.tol_circ = c.num("tol.circulation", o.tol_circ);
  o.kappa_tol = c.num("tol.kappa", o.kappa_tol);
  o.seed = c.seed;
  const Frames2DReport R = frames2d_pipeline(cf, o);
  x.report = R.to_json();
  x.check("structure_equations", R.structure_residual, c.num("tol.structure", 1e-9));
  x.check("frame_duality", R.duality_residual, 1e-10);
  x.check("gauss_bonnet_total", std::abs(R.gauss_bonnet - 2 * M_PI), c.num("tol.gauss_bonnet", 1e-8));
  if (R.pipeline_run) {
    const double th = c.num("tol.hodge", 1e-6), tg = c.num("tol.gauge", 1e-6), tc = c.num("tol.coulomb", 1e-6);
    x.check("hodge_dh", R.hodge.dh, th);
    x.check("hodge_dstar_h", R.hodge.dstar_h, th);
    x.check("gauge_metric_identity", R.gauge.metric_residual, tg);
    x.check("gauge_connection_identity", R.gauge.connection_residual, tg);
    x.check("coulomb_divergence", R.coulomb.div_residual, tc);
    x.check("coulomb_weak_divergence", R.coulomb.weak_div, tc);
    x.check("coulomb_boundary_trace", R.coulomb.boundary_trace, tc);
    x.check("conformal_factor_equation", R.coulomb.mu_residual, tc);
    x.check("closedness", R.coords.closedness, tc);
    if (!R.obstructed) x.check("metric_recovery", R.coords.metric_error, c.num("tol.metric", 1e-4));
    if (std::isfinite(R.liouville_harmonic_residual))
      x.check("liouville_harmonic_difference", R.liouville_harmonic_residual, c.num("tol.liouville", 1e-6));
  }
  x.r.files["circulation.csv"] = R.sing.csv();
  if (R.pipeline_run) x.r.files["fields.csv"] = R.fields_csv();
}

void run_verify(Ctx& x) {
  const RunConfig& c = x.c;
  const std::string task = c.str("verify.task", "cgb");
  x.report["task"] = task;
  if (task == "gauss_codazzi") {
    Params ip;
    for (const auto& [k, v] : c.values)
      if (k.rfind("immersion.", 0) == 0) ip[k.substr(10)] = v;
    const Immersion im = immersion(c.str("verify.immersion", "sphere4"), ip);
    const Chart ch = Chart::radial4(c.num("chart.r_in", 0.3), c.num("chart.r_out", 0.9), c.integer("chart.n_r", 8),
                                    c.integer("chart.n_eta", 8), c.integer("chart.n_xi", 8), RadialRule::gauss);
    const GaussCodazziReport g = gauss_codazzi_check(im, ch);
    x.report["immersion"] = im.name;
    x.report["result"] = g.to_json();
    x.check("gauss_codazzi_residual", g.residual, c.num("tol.gauss_codazzi", 1e-7));
    return;
  }
  const MetricField<4> g = catalog4(c.metric, c.metric_params);
  if (task == "cgb") {
    const double r_in = c.num("chart.r_in", std::max(0.5, 2 * g.r_min()));
    const CGBReport cg = cgb_boundary_check(g, r_in, c.num("chart.r_out", std::max(1.0, 2 * r_in)),
                                            c.integer("chart.n_r", 32), c.integer("chart.n_eta", 8),
                                            c.integer("chart.n_xi", 16));
    x.report["result"] = cg.to_json();
    x.check("cgb_residual", cg.residual, c.num("tol.cgb", 1e-5));
  } else if (task == "eps_regularity") {
    const double p = c.num("verify.p", 2), sb = c.num("verify.rescale", 0.5);
    const int n = c.integer("verify.n", 48);
    const std::vector<double> radii = c.list("verify.s", {0.08, 0.12});
    std::vector<EpsBall> balls, scaled;
    for (const Vec<4>& ctr : {Vec<4>(0.3, 0, 0, 0), Vec<4>(0, 0.25, 0.1, 0)})
      for (double s : radii) {
        balls.push_back({ctr, s});
        scaled.push_back({ctr / sb, s / sb});
      }
    const EpsTable t0 = eps_regularity_scan(g, balls, p, n);
    const EpsTable t1 = eps_regularity_scan(blowup_rescale(g, sb), scaled, p, n);
    const double rel = t0.C_fit > 0 ? std::abs(t1.C_fit / t0.C_fit - 1) : std::abs(t1.C_fit);
    x.report["result"] = {{"original", t0.to_json()}, {"rescaled", t1.to_json()}, {"rescale", sb},
                          {"C_fit_relative_change", rel}};
    x.check("eps_C_fit_rescale_invariance", rel, c.num("tol.eps", 1e-2));
    x.r.files["eps_regularity.csv"] = t0.csv();
  } else if (task == "volume_growth") {
    const GrowthTable t =
        volume_growth_scan(g, vec4(c.list("verify.center", {0, 0, 0, 0}), "verify.center"),
                           c.list("verify.s", {0.1, 0.2, 0.3}), c.integer("verify.n", 96));
    x.report["result"] = t.to_json();
    x.check_true("theta_bounded", t.bounded);
    x.r.files["volume_growth.csv"] = t.csv();
  } else if (task == "constants") {
    const SobolevConstants k = estimate_constants(g, c.integer("verify.samples", 200), c.seed);
    x.report["result"] = k.to_json();
    bool mono = true;
    for (size_t i = 1; i < k.running_S.size(); ++i)
      mono = mono && k.running_S[i] >= k.running_S[i - 1] && k.running_L[i] >= k.running_L[i - 1];
    x.check_true("running_maxima_monotone", mono);
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < k.running_S.size(); ++i) rows.push_back({double(i + 1), k.running_S[i], k.running_L[i]});
    x.r.files["constants.csv"] = table_csv({"sample", "running_gamma_S", "running_gamma_L"}, rows);
  } else if (task == "blowup_flatness") {
    const FlatnessTable t = blowup_flatness(g, c.list("verify.s", {0.5, 0.25, 0.125}), c.num("verify.p", 2));
    x.report["result"] = t.to_json();
    if (c.flag("verify.expect_decay", c.metric != "cone")) x.check_true("riem_decays", t.decays);
    x.r.files["blowup_flatness.csv"] = t.csv();
  }
}

void run_blowup(Ctx& x) {
  const RunConfig& c = x.c;
  const MetricField<4> g = catalog4(c.metric, c.metric_params);
  const Chart ch = chart4(c, g, 0.25, 1.0);
  const Vec<4> ctr = vec4(c.list("blowup.center", {0.5, 0, 0, 0}), "blowup.center");
  const double rad = c.num("blowup.radius", 0.25);
  json rows = json::array();
  std::vector<std::vector<double>> table;
  double worst = 0;
  for (double s : c.list("blowup.s", {0.5, 0.25, 0.125})) {
    const ScalingReport sr = scaling_report(g, s, ch, ctr, rad);
    rows.push_back(sr.to_json());
    table.push_back({s, sr.riem, sr.vol, sr.sch, sr.J, sr.bach, sr.ball_rel});
    worst = std::max(worst, sr.max());
  }
  x.report["chart"] = chart_header(ch);
  x.report["rows"] = rows;
  x.check("scaling_identities_max_residual", worst, c.num("tol.scaling", 1e-10));
  x.r.files["scaling.csv"] = table_csv({"s", "riem", "dvol", "schouten", "J", "bach", "ball_riem_L2"}, table);
}

void run_compactify(Ctx& x) {
  const RunConfig& c = x.c;
  if (c.metric != "ale" && c.metric != "compactified")
    throw ConfigError("config: compactify needs metric ale or compactified");
  const MetricField<4> g = catalog4(c.metric, c.metric_params);
  const MetricField<4> h = c.metric == "ale" ? invert_compactify(g) : g;
  const double R = param(c.metric_params, "R", 1.0);
  const DecayFit fit = compactify_decay(h, c.num("compactify.tau", 2), c.num("compactify.r_max", std::min(0.5, 1 / R)),
                                        c.integer("compactify.levels", 7));
  x.report = fit.to_json();
  x.check_true("decay_fit_ok", fit.ok);
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < fit.radii.size(); ++i)
    rows.push_back({fit.radii[i], fit.deviation[i], i < fit.sch_norm.size() ? fit.sch_norm[i] : 0.0});
  x.r.files["decay.csv"] = table_csv({"radius", "deviation", "sch_norm"}, rows);
}

const char* status_name(int s) {
  switch (s) {
    case exit_ok: return "ok";
    case exit_config: return "config_error";
    case exit_numerical: return "numerical_failure";
    default: return "assertion_failure";
  }
}

}  // namespace

RunResult run(const RunConfig& c) {
  RunResult r;
  Ctx x{c, r, json::object()};
  try {
    validate(c);
    if (c.verb == "curvature") run_curvature(x);
    else if (c.verb == "gauge4d") run_gauge4d(x);
    else if (c.verb == "frames2d") run_frames2d(x);
    else if (c.verb == "verify") run_verify(x);
    else if (c.verb == "blowup") run_blowup(x);
    else run_compactify(x);
    r.status = exit_ok;
    for (const auto& a : r.assertions)
      if (!a.verdict) r.status = exit_assertion;
  } catch (const ConfigError& e) {
    r.status = exit_config;
    r.error = e.what();
  } catch (const std::invalid_argument& e) {
    r.status = exit_config;
    r.error = e.what();
  } catch (const std::out_of_range& e) {
    r.status = exit_config;
    r.error = e.what();
  } catch (const std::exception& e) {
    r.status = exit_numerical;
    r.error = e.what();
  }
  json& s = r.summary;
  s["verb"] = c.verb;
  s["metric"] = c.metric;
  s["metric_params"] = json::object();
  for (const auto& [k, v] : c.metric_params) s["metric_params"][k] = v;
  s["seed"] = c.seed;
  s["config"] = json::object();
  for (const auto& [k, v] : c.values) s["config"][k] = v;
  s["status"] = status_name(r.status);
  s["exit_code"] = r.status;
  if (!r.error.empty()) s["error"] = r.error;
  json a = json::array();
  for (const auto& e : r.assertions)
    a.push_back({{"name", e.name}, {"lhs", e.lhs}, {"relation", "<="}, {"rhs", e.rhs}, {"verdict", e.verdict}});
  s["assertions"] = a;
  s["report"] = x.report;
  r.files["summary.json"] = s.dump(2) + "\n";
  return r;
}

void write_bundle(const RunResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream man;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  man << "# created " << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << "\n";
  man << "# sha256  bytes  file\n";
  for (const auto& [name, payload] : r.files) {
    write_file((std::filesystem::path(dir) / name).string(), payload);
    man << sha256_hex(payload) << "  " << payload.size() << "  " << name << "\n";
  }
  write_file((std::filesystem::path(dir) / "MANIFEST").string(), man.str());
}

}  // namespace cgeom
