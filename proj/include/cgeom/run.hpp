#pragma once

#include <map>
#include <string>
#include <vector>

#include "cgeom/config.hpp"
#include "cgeom/io.hpp"

namespace cgeom {

enum ExitStatus { exit_ok = 0, exit_config = 2, exit_numerical = 3, exit_assertion = 4 };

// lhs <= rhs
struct Assertion {
  std::string name;
  double lhs = 0, rhs = 0;
  bool verdict = false;
};

struct RunResult {
  int status = exit_ok;
  std::string error;
  std::vector<Assertion> assertions;
  std::map<std::string, std::string> files;  // name -> payload; summary.json always present
  json summary;
};

// Pure: no file-system access, no clock. Identical config and seed give identical payloads.
RunResult run(const RunConfig& c);

// Writes every payload plus MANIFEST (sha256, size, name; the only place with a timestamp).
void write_bundle(const RunResult& r, const std::string& dir);

}  // namespace cgeom
