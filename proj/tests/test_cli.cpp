#include "catch_amalgamated.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "lsl/lsl.hpp"

using namespace lsl;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(LSL_CLI) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lsl_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("number syntax") {
  CHECK(parse_number("0.75") == 0.75);
  CHECK(parse_number("1/8") == 0.125);
  CHECK(parse_number("2pi") == Approx(2 * pi));
  CHECK(parse_number("7pi/4") == Approx(7 * pi / 4));
  CHECK(parse_number("pi") == Approx(pi));
  CHECK(parse_number(" 3 ") == 3.0);
  CHECK_THROWS_AS(parse_number("abc"), UsageError);
  CHECK_THROWS_AS(parse_number("1/0"), UsageError);
  CHECK_THROWS_AS(parse_number(""), UsageError);
  CHECK(parse_list("1/8, 1/16,1/32") == std::vector<double>{0.125, 0.0625, 0.03125});
  CHECK(parse_list("").empty());
}

TEST_CASE("config files") {
  ExperimentConfig c;
  parse_config_text(c,
                    "# comment\n[grid]\nn = 64\nbox = 7pi/4\n[family]\neps = 1/8, 1/16\nalpha = 0.5 # trailing\n"
                    "profile = resolved\nwidth = 2.9\n[constants]\nc_tl = 2\nc_fp@0.25 = 3\n[run]\nseed = 17\n");
  CHECK(c.n == 64);
  CHECK(c.box == Approx(7 * pi / 4));
  CHECK(c.eps.size() == 2);
  CHECK(c.alpha == 0.5);
  CHECK(c.constants.c_tl == 2.0);
  CHECK(c.constants.c_fp_for(0.25) == 3.0);
  CHECK(c.seed == 17);
  CHECK_NOTHROW(c.validate());

  ExperimentConfig d;
  CHECK_THROWS_AS(parse_config_text(d, "[grid]\nsize = 3\n"), UsageError);
  CHECK_THROWS_AS(parse_config_text(d, "n = 3\n"), UsageError);
  CHECK_THROWS_AS(parse_config_text(d, "[grid\nn = 3\n"), UsageError);
  CHECK_THROWS_AS(parse_config_text(d, "[grid]\nn 3\n"), UsageError);
  CHECK_THROWS_AS(parse_config_text(d, "[grid]\nn = 2.5\n"), UsageError);
  ExperimentConfig e;
  parse_config_text(e, "[grid]\nn = 12\n");
  CHECK_THROWS_AS(e.validate(), UsageError);
  ExperimentConfig f;
  parse_config_text(f, "[family]\ngamma = 0.7\n");
  CHECK_THROWS_AS(f.validate(), UsageError);
  CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), UsageError);
  CHECK_NOTHROW(load_config(std::string(LSL_SOURCE_DIR) + "/configs/sweep.cfg").validate());
  CHECK_NOTHROW(load_config(std::string(LSL_SOURCE_DIR) + "/configs/smoke.cfg").validate());
}

TEST_CASE("norm tokens") {
  const Grid g(8);
  const auto u = fixture_flow(g);
  const TimeGrid tg = TimeGrid::for_grid(g);
  CHECK(compute_norms(u, {}, tg, 2).entries.empty());
  CHECK_THROWS_AS(compute_norms(u, {"besov:1:inf"}, tg, 2), UsageError);
  CHECK_THROWS_AS(compute_norms(u, {"besov:1:inf:inf:foo"}, tg, 2), UsageError);
  CHECK_THROWS_AS(compute_norms(u, {"holder:1"}, tg, 2), UsageError);
  CHECK_THROWS_AS(compute_norms(u, {"mixed:2:2"}, tg, 2), UsageError);
  const auto r = compute_norms(u, {"lebesgue:2", "sobolev:0"}, tg, 2);
  REQUIRE(r.entries.size() == 3);
  CHECK(r.entries[0].value == Approx(r.entries[1].value));
}

TEST_CASE("gnuplot twin") {
  CHECK(detail::dat_twin("a,b,c\n1,,3\n") == "# a b c\n1 ? 3\n");
}

TEST_CASE("exit codes") {
  const auto out = scratch("codes");
  const std::string o = " --out " + out.string();
  CHECK(run("norms --grid 8 --norms lebesgue:2" + o) == 0);
  CHECK(run("norms --grid 8 --norms nosuchnorm" + o) == 2);
  CHECK(run("norms --grid 12" + o) == 2);
  CHECK(run("bounds --grid 8 --gamma 0.7" + o) == 2);
  CHECK(run("bounds --config /nonexistent.cfg" + o) == 2);
  CHECK(run("frobnicate" + o) == 2);
  CHECK(run("" + o) == 2);
  CHECK(run("--help") == 0);
  // a run that loses resolution
  CHECK(run("solve --grid 8 --generator random --seed 1 --t-end 0.5 --dt 1e-3" + o +
            " --config " + std::string(LSL_SOURCE_DIR) + "/configs/blowup.cfg") == 3);
  fs::remove_all(out);
}

TEST_CASE("empty norm list gives a header-only CSV") {
  const auto out = scratch("empty");
  REQUIRE(run("norms --grid 8 --norms \"\" --out " + out.string()) == 0);
  CHECK(slurp(out / "norms.csv") == "space,sigma,p,q,variant,value,residual\n");
  fs::remove_all(out);
}

TEST_CASE("shear bounds are flagged") {
  const auto out = scratch("shear");
  REQUIRE(run("bounds --grid 8 --generator shear --out " + out.string()) == 0);
  const auto csv = slurp(out / "bounds.csv");
  CHECK(csv.find(",inf,inf,") != std::string::npos);
  CHECK(slurp(out / "bounds_meta.txt").find("linear-flow regime") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("commands are byte-for-byte deterministic") {
  const std::string cfg = " --config " + std::string(LSL_SOURCE_DIR) + "/configs/smoke.cfg";
  const std::vector<std::pair<std::string, std::vector<std::string>>> cmds = {
      {"norms --generator random --seed 4 --norms besov:1:inf:inf,besov:1:inf:2,lebesgue:inf", {"norms.csv"}},
      {"bounds --generator random --seed 4", {"bounds.csv", "bounds_meta.txt"}},
      {"solve --generator fixture --t-end 0.1 --dt 0.01", {"ledger.csv", "ledger.dat", "solve_summary.csv", "final.lsl"}},
      {"check", {"check.csv"}},
  };
  for (const auto& [args, files] : cmds) {
    const auto a = scratch("det_a"), b = scratch("det_b");
    REQUIRE(run(args + cfg + " --out " + a.string()) == 0);
    REQUIRE(run(args + cfg + " --out " + b.string()) == 0);
    for (const auto& f : files) {
      INFO(args << " -> " << f);
      const auto x = slurp(a / f);
      CHECK_FALSE(x.empty());
      CHECK(x == slurp(b / f));
    }
    fs::remove_all(a);
    fs::remove_all(b);
  }
}
