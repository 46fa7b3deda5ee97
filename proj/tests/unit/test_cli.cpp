#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "cgeom/io.hpp"
#include "cgeom/run.hpp"

using namespace cgeom;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& cfg_text, const fs::path& dir, const std::string& extra = "") {
  fs::create_directories(dir);
  write_file((dir / "run.cfg").string(), cfg_text);
  const char* cli = std::getenv("CGEOM_CLI");
  REQUIRE(cli != nullptr);
  const std::string cmd = std::string(cli) + " --config " + (dir / "run.cfg").string() + " --out " +
                          (dir / "out").string() + " " + extra + " > " + (dir / "log.txt").string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("cgeom_cli_test_" + name); }

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config("verb = frames2d\n# comment\nmetric = polar_singular  # trailing\nmetric.n = 3\n");
  CHECK(c.verb == "frames2d");
  CHECK(c.metric_params.at("n") == "3");
  CHECK_NOTHROW(validate(c));
  CHECK_THROWS_AS(parse_config("verb = a\nverb = b\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
  CHECK_THROWS_AS(validate(parse_config("verb = frames2d\nmetric = flat4\n")), ConfigError);
  CHECK_THROWS_AS(validate(parse_config("verb = curvature\nmetric = flat4\nchart.nr = 8\n")), ConfigError);
  CHECK_THROWS_AS(validate(parse_config("verb = curvature\nmetric = flat4\ntol.zero = -1\n")), ConfigError);
  CHECK_THROWS_AS(validate(parse_config("verb = fly\n")), ConfigError);
}

TEST_CASE("run is pure: identical payloads for identical config") {
  const RunConfig c = parse_config("verb = curvature\nmetric = round_sphere2\n");
  const RunResult a = run(c), b = run(c);
  CHECK(a.status == exit_ok);
  CHECK(a.files == b.files);
  CHECK(a.files.count("summary.json") == 1);
}

TEST_CASE("CLI exit codes and bundle") {
  const auto d = scratch("ok");
  CHECK(run_cli("verb = curvature\nmetric = round_sphere2\n", d) == exit_ok);
  CHECK(fs::exists(d / "out" / "summary.json"));
  CHECK(fs::exists(d / "out" / "curvature.csv"));
  const std::string manifest = read_file((d / "out" / "MANIFEST").string());
  CHECK(manifest.find(sha256_hex(read_file((d / "out" / "summary.json").string()))) != std::string::npos);

  CHECK(run_cli("verb = curvature\nmetric = nowhere\n", scratch("bad_metric")) == exit_config);
  CHECK(run_cli("verb = curvature\nmetric = round_sphere2\nchart.n_r = 3\n", scratch("bad_res")) == exit_config);
  // an assertion that cannot hold: tolerance far below round-off
  CHECK(run_cli("verb = curvature\nmetric = round_sphere2\ntol.closed_form = 1e-300\n", scratch("assert")) ==
        exit_assertion);
  // failure inside the numerics: essential singularity sampled below its domain
  CHECK(run_cli("verb = frames2d\nmetric = essential\nframes.radii = 0.5, 1e-9\n", scratch("numeric")) ==
        exit_numerical);
  fs::remove_all(d);
}
