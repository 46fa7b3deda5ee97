#pragma once

// Flat run configuration: one "key = value" per line, dotted keys, '#' comments.
//
//   verb = frames2d
//   metric = polar_singular
//   metric.n = 3
//   frames.n_s = 64
//   tol.metric = 1e-4

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgeom/catalog.hpp"

namespace cgeom {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string verb;
  std::string metric;
  Params metric_params;                       // metric.<key> entries, prefix stripped
  std::map<std::string, std::string> values;  // every entry as written
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  bool verbose = false;

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string str(const std::string& key, const std::string& fallback) const;
  double num(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const;
};

const std::vector<std::string>& verbs();

// Syntax only; throws ConfigError with the offending line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Recognized verb, known metric of the right dimension, known keys, positive tolerances.
void validate(const RunConfig& c);

}  // namespace cgeom
