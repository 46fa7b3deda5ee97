// cgeom --config run.cfg [--out DIR] [--seed N] [--verbose]
#include <iostream>

#include <CLI11.hpp>

#include "cgeom/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Conformal-geometry batch runner"};
  std::string config_path, out_dir;
  std::int64_t seed = -1;
  bool verbose = false;
  app.add_option("--config", config_path, "run configuration (key = value lines)")->required();
  app.add_option("--out", out_dir, "output directory (overrides 'out')");
  app.add_option("--seed", seed, "random seed (overrides 'seed')");
  app.add_flag("--verbose", verbose, "print every assertion");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cgeom::exit_config;
  }

  cgeom::RunConfig cfg;
  try {
    cfg = cgeom::load_config(config_path);
  } catch (const cgeom::ConfigError& e) {
    std::cerr << "cgeom: " << e.what() << "\n";
    return cgeom::exit_config;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (seed >= 0) {
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.values["seed"] = std::to_string(seed);
  } else if (seed != -1) {
    std::cerr << "cgeom: --seed must be non-negative\n";
    return cgeom::exit_config;
  }
  cfg.verbose = verbose;

  const cgeom::RunResult r = cgeom::run(cfg);
  try {
    cgeom::write_bundle(r, cfg.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "cgeom: cannot write outputs: " << e.what() << "\n";
    return cgeom::exit_numerical;
  }

  int failed = 0;
  for (const auto& a : r.assertions) {
    if (!a.verdict) ++failed;
    if (verbose || !a.verdict)
      std::cout << (a.verdict ? "  ok    " : "  FAIL  ") << a.name << ": " << cgeom::fmt(a.lhs)
                << " <= " << cgeom::fmt(a.rhs) << "\n";
  }
  if (!r.error.empty()) std::cerr << "cgeom: " << r.error << "\n";
  std::cout << cfg.verb << " " << cfg.metric << ": " << r.summary["status"].get<std::string>() << " ("
            << r.assertions.size() << " assertions, " << failed << " failed) -> " << cfg.out_dir << "\n";
  return r.status;
}
