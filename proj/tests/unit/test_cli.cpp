#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli/commands.hpp"
#include "mwg/rng.hpp"

using namespace mwg::cli;

namespace {

std::string file(const CommandOutput& out, const std::string& name) {
  for (const auto& [n, body] : out.files)
    if (n == name) return body;
  FAIL("missing output " << name);
  return {};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("key = value parsing with comments and defaults") {
  const auto cfg = RunConfig::parse_text("# header\n kernel.kind = mala  # inline\n\ntarget.d=8\n");
  CHECK(cfg.kernel_kind() == mwg::Algorithm::mala);
  CHECK(cfg.target().d == 8);
  CHECK(cfg.kernel_c() == 1.0);
  CHECK(cfg.get_size_list("mixing.ds") == std::vector<std::size_t>{10, 20, 40});
  CHECK_FALSE(cfg.find_double("cost.a").has_value());
}

TEST_CASE("errors name the offending key") {
  CHECK_THROWS_WITH_AS(RunConfig::parse_text("kernel.speed = 2\n"), doctest::Contains("kernel.speed"), ConfigError);
  CHECK_THROWS_WITH_AS(RunConfig::parse_text("kernel.c = 1.5\n").kernel_c(), doctest::Contains("kernel.c"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(RunConfig::parse_text("target.d = abc\n").target(), doctest::Contains("target.d"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(RunConfig::parse_text("target.rho = 0.5\n").target(), doctest::Contains("target.rho"),
                       ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_text("no equals sign\n"), ConfigError);
  CHECK_THROWS_WITH_AS(tune_command(RunConfig::parse_text("tune.budget = 99\n")), doctest::Contains("budget"),
                       ConfigError);
}

TEST_CASE("resolved config omits the thread count") {
  auto cfg = RunConfig::parse_text("run.threads = 3\n");
  CHECK(cfg.threads() == 3);
  const auto r = cfg.resolved();
  CHECK_FALSE(r.contains("run.threads"));
  CHECK(r.at("target.kind") == "normal_iid");
}

TEST_CASE("numbers use 17 significant digits and round-trip") {
  mwg::RandomStream rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.uniform(), static_cast<int>(rng.below(200)) - 100);
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("theory-curve output") {
  auto out = theory_curve_command(RunConfig::parse_text("theory.l_values = 0\ntheory.I = 1\n"));
  CHECK(file(out, "theory_curve.csv") == "l,sigma2,accept,speed\n0,0,1,0\n");

  mwg::RandomStream rng(2);
  for (int i = 0; i < 5; ++i) {
    const double c = 0.05 + 0.95 * rng.uniform();
    const double k = 0.1 + 2.0 * rng.uniform();
    std::ostringstream rwm, mala;
    rwm << "kernel.c = " << c << "\ntheory.I = " << k << "\n";
    mala << "kernel.kind = mala\nkernel.c = " << c << "\ntheory.K = " << k << "\n";
    const auto jr = nlohmann::json::parse(file(theory_curve_command(RunConfig::parse_text(rwm.str())), "theory_curve.json"));
    const auto jm = nlohmann::json::parse(file(theory_curve_command(RunConfig::parse_text(mala.str())), "theory_curve.json"));
    CHECK(std::round(jr["accept_at_l_hat"].get<double>() * 1000.0) == 234.0);
    CHECK(std::round(jm["accept_at_l_hat"].get<double>() * 1000.0) == 574.0);
    CHECK_FALSE(jr.contains("cost_optimal_c"));
  }
  const auto cost = nlohmann::json::parse(
      file(theory_curve_command(RunConfig::parse_text("cost.a = 1\ncost.b = 4\n")), "theory_curve.json"));
  CHECK(cost["cost_optimal_c"].get<double>() == 0.5);
  CHECK_THROWS_WITH_AS(theory_curve_command(RunConfig::parse_text(
                           "target.kind = exchangeable_normal\ntarget.rho = 0.5\ntheory.I = 1\n")),
                       doctest::Contains("theory.I"), ConfigError);
  CHECK_THROWS_WITH_AS(theory_curve_command(RunConfig::parse_text("target.kind = laplace_iid\nkernel.kind = mala\n")),
                       doctest::Contains("theory.K"), ConfigError);
}

TEST_CASE("sweep output schema and config round trip") {
  const auto cfg = RunConfig::parse_text(
      "target.kind = exchangeable_normal\ntarget.d = 8\ntarget.rho = 0.4\nkernel.c = 0.5\n"
      "sweep.points = 4\nsweep.iterations = 2000\nrun.seed = 17\n");
  const auto out = sweep_command(cfg);
  const auto csv = file(out, "sweep.csv");
  CHECK(first_line(csv) == "sigma2,l,accept_hat,accept_se,fose_raw,fose_norm");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  const auto summary = file(out, "sweep.json");
  const auto j = nlohmann::json::parse(summary);
  for (const char* key : {"accept_star", "fose_star", "theory_accept_star", "theory_speed", "config"})
    CHECK(j.contains(key));

  auto replay = RunConfig::parse_text(summary);
  replay.set("run.threads", "3");
  const auto again = sweep_command(replay);
  CHECK(file(again, "sweep.csv") == csv);
  CHECK(file(again, "sweep.json") == summary);
}

TEST_CASE("tune and mixing outputs") {
  const auto tune = nlohmann::json::parse(
      file(tune_command(RunConfig::parse_text("tune.budget = 20000\ntarget.d = 10\n")), "tune.json"));
  for (const char* key : {"l_tuned", "sigma2", "accept_final", "converged"}) CHECK(tune.contains(key));
  CHECK(tune["config"]["tune.target_accept"] == "0.234");

  const auto cfg = RunConfig::parse_text(
      "target.kind = exchangeable_normal\ntarget.rho = 0.5\nmixing.ds = 6, 8\nmixing.steps_per_d = 200\n");
  const auto out = mixing_command(cfg);
  const auto csv = file(out, "mixing.csv");
  CHECK(first_line(csv) == "d,iat,stderr");
  CHECK(csv.substr(csv.find('\n') + 1, 2) == "6,");
  const auto j = nlohmann::json::parse(file(out, "mixing.json"));
  CHECK(j.contains("slope"));
  CHECK(j.contains("slope_se"));
  CHECK_THROWS_WITH_AS(mixing_command(RunConfig::parse_text("target.d = 10\n")), doctest::Contains("target.kind"),
                       ConfigError);
}

TEST_CASE("outputs are written under the requested directory") {
  const auto dir = std::filesystem::temp_directory_path() / "mwg_cli_write_test";
  std::filesystem::remove_all(dir);
  CommandOutput out;
  out.files.emplace_back("a.csv", "x\n1\n");
  write_outputs(out, dir);
  std::ifstream in(dir / "a.csv", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "x\n1\n");
  std::filesystem::remove_all(dir);
}

}
