#include "cgeom/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cgeom/io.hpp"

namespace cgeom {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0;
  const char* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError("config: '" + key + "' is not a number: '" + v + "'");
  return x;
}

// Keys each verb understands (besides the common ones and metric.*).
const std::map<std::string, std::set<std::string>>& verb_keys() {
  static const std::map<std::string, std::set<std::string>> k = {
      {"curvature", {"chart.r_in", "chart.r_out", "chart.n_r", "chart.n_theta", "chart.n_eta", "chart.n_xi",
                     "tol.zero", "tol.trace", "tol.bach", "tol.closed_form", "curvature.bach_check"}},
      {"gauge4d", {"gauge.r_in", "gauge.r_out", "gauge.mode", "gauge.n_cheb", "gauge.grid_n", "gauge.gamma_S",
                   "gauge.gamma_L", "gauge.max_iter", "tol.grad", "tol.el"}},
      {"frames2d", {"frames.r_in", "frames.n_s", "frames.n_theta", "frames.samples", "frames.r_check",
                    "frames.radii", "tol.circulation", "tol.kappa", "tol.structure", "tol.gauss_bonnet", "tol.hodge",
                    "tol.gauge", "tol.coulomb", "tol.metric", "tol.liouville"}},
      {"verify", {"verify.task", "verify.immersion", "verify.p", "verify.rescale", "verify.center", "verify.s",
                  "verify.samples", "verify.expect_decay", "verify.n", "chart.r_in", "chart.r_out", "chart.n_r",
                  "chart.n_eta", "chart.n_xi", "tol.cgb", "tol.gauss_codazzi", "tol.eps", "immersion.eps",
                  "immersion.width"}},
      {"blowup", {"blowup.s", "blowup.center", "blowup.radius", "chart.r_in", "chart.r_out", "chart.n_r",
                  "chart.n_eta", "chart.n_xi", "tol.scaling"}},
      {"compactify", {"compactify.tau", "compactify.r_max", "compactify.levels"}},
  };
  return k;
}

const std::set<std::string> kCommon = {"verb", "metric", "seed", "out"};

}  // namespace

const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v = {"curvature", "gauge4d", "frames2d", "verify", "blowup", "compactify"};
  return v;
}

std::string RunConfig::str(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double RunConfig::num(const std::string& key, double fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : to_double(key, it->second);
}

int RunConfig::integer(const std::string& key, int fallback) const {
  const double x = num(key, fallback);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError("config: '" + key + "' must be an integer");
  return static_cast<int>(x);
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config: '" + key + "' must be true or false");
}

std::vector<double> RunConfig::list(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError("config: '" + key + "' is an empty list");
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::stringstream ss(text);
  std::string line;
  int no = 0;
  while (std::getline(ss, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || !std::all_of(key.begin(), key.end(), [](char ch) {
          return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.';
        }))
      throw ConfigError("config line " + std::to_string(no) + ": bad key '" + key + "'");
    if (value.empty()) throw ConfigError("config line " + std::to_string(no) + ": empty value for '" + key + "'");
    if (!c.values.emplace(key, value).second)
      throw ConfigError("config line " + std::to_string(no) + ": duplicate key '" + key + "'");
    if (key.rfind("metric.", 0) == 0) c.metric_params[key.substr(7)] = value;
  }
  c.verb = c.str("verb", "");
  c.metric = c.str("metric", "");
  c.out_dir = c.str("out", c.out_dir);
  const double seed = c.num("seed", 1);
  if (seed < 0 || seed != std::floor(seed) || seed > 9.0e15) throw ConfigError("config: seed must be a non-negative integer");
  c.seed = static_cast<std::uint64_t>(seed);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const RunConfig& c) {
  if (c.verb.empty()) throw ConfigError("config: missing 'verb'");
  const auto& vk = verb_keys();
  const auto it = vk.find(c.verb);
  if (it == vk.end()) throw ConfigError("config: unknown verb '" + c.verb + "'");
  for (const auto& [key, value] : c.values) {
    if (kCommon.count(key) || key.rfind("metric.", 0) == 0 || it->second.count(key)) continue;
    throw ConfigError("config: key '" + key + "' is not used by verb '" + c.verb + "'");
  }
  for (const auto& [key, value] : c.values)
    if (key.rfind("tol.", 0) == 0 && !(to_double(key, value) > 0))
      throw ConfigError("config: tolerance '" + key + "' must be positive");
  for (const auto& [key, value] : c.metric_params) {
    const bool textual = key == "frame";
    if (!textual) to_double("metric." + key, value);
  }

  const std::string task = c.str("verify.task", "cgb");
  const bool needs_metric = !(c.verb == "verify" && task == "gauss_codazzi");
  if (c.verb == "verify") {
    static const std::set<std::string> tasks = {"cgb", "gauss_codazzi", "eps_regularity", "volume_growth",
                                                "constants", "blowup_flatness"};
    if (!tasks.count(task)) throw ConfigError("config: unknown verify.task '" + task + "'");
  }
  if (!needs_metric) return;
  if (c.metric.empty()) throw ConfigError("config: missing 'metric'");
  const int dim = catalog_dim(c.metric);
  if (dim == 0) throw ConfigError("config: unknown metric '" + c.metric + "'");
  const int want = c.verb == "frames2d" ? 2 : c.verb == "curvature" ? dim : 4;
  if (dim != want)
    throw ConfigError("config: verb '" + c.verb + "' needs a " + std::to_string(want) + "D metric, '" + c.metric +
                      "' is " + std::to_string(dim) + "D");
}

}  // namespace cgeom
