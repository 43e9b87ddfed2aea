#include "cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mwg/error.hpp"
#include "mwg/experiments.hpp"
#include "mwg/selftest.hpp"
#include "mwg/theory.hpp"

namespace mwg::cli {

namespace {

using nlohmann::json;

json config_json(const RunConfig& cfg) {
  json out = json::object();
  for (const auto& [k, v] : cfg.resolved()) out[k] = v;
  return out;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::uint64_t positive_u64(const RunConfig& cfg, const std::string& key) {
  const auto v = cfg.get_u64(key);
  if (v == 0) throw ConfigError(key, "must be positive");
  return v;
}

// I for RWM or K for MALA: explicit override, else derived from the target.
double curve_constant(const RunConfig& cfg, const TargetSpec& spec, Algorithm kind) {
  const std::string key = kind == Algorithm::rwm ? "theory.I" : "theory.K";
  const std::string other = kind == Algorithm::rwm ? "theory.K" : "theory.I";
  if (cfg.has(other)) throw ConfigError(other, "does not apply to kernel.kind=" + std::string(to_string(kind)));
  if (auto v = cfg.find_double(key)) {
    if (spec.kind == TargetKind::exchangeable_normal && spec.rho > 0.0)
      throw ConfigError(key, "conflicts with the constant implied by target.rho > 0");
    if (!(*v > 0.0)) throw ConfigError(key, "must be positive");
    return *v;
  }
  const Target target = make_target(spec);
  if (auto v = theory_constant(target, kind)) return *v;
  if (kind == Algorithm::rwm) return roughness_I(target).value;
  throw ConfigError(key, "required: no closed form for target.kind=" + std::string(to_string(spec.kind)));
}

std::vector<double> l_grid(const RunConfig& cfg) {
  if (cfg.has("theory.l_values")) {
    auto ls = cfg.get_double_list("theory.l_values");
    for (double l : ls)
      if (!(l >= 0.0)) throw ConfigError("theory.l_values", "entries must be non-negative");
    return ls;
  }
  const double lo = cfg.get_double("theory.l_min");
  const double hi = cfg.get_double("theory.l_max");
  const auto n = positive_u64(cfg, "theory.l_points");
  if (!(lo >= 0.0)) throw ConfigError("theory.l_min", "must be non-negative");
  if (!(hi >= lo)) throw ConfigError("theory.l_max", "must be at least theory.l_min");
  std::vector<double> ls(n);
  for (std::size_t i = 0; i < n; ++i)
    ls[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return ls;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CommandOutput theory_curve_command(const RunConfig& cfg) {
  const TargetSpec spec = cfg.target();
  const Algorithm kind = cfg.kernel_kind();
  const double c = cfg.kernel_c();
  const double constant = curve_constant(cfg, spec, kind);
  const auto ls = l_grid(cfg);

  std::ostringstream csv;
  csv << "l,sigma2,accept,speed\n";
  for (const auto& p : theory::theory_curve(kind, c, constant, ls, spec.d))
    csv << format_double(p.l) << ',' << format_double(p.sigma2) << ',' << format_double(p.accept) << ','
        << format_double(p.speed) << '\n';

  const auto opt = theory::optimal_l(kind, c, constant);
  json summary;
  summary["l_hat"] = opt.l_hat;
  summary["accept_at_l_hat"] = opt.accept;
  summary["speed_at_l_hat"] = opt.speed;
  const auto a = cfg.find_double("cost.a");
  const auto b = cfg.find_double("cost.b");
  if (a.has_value() != b.has_value()) throw ConfigError(a ? "cost.b" : "cost.a", "cost.a and cost.b must be given together");
  if (a) {
    if (!(*a >= 0.0)) throw ConfigError("cost.a", "must be non-negative");
    if (!(*b >= 0.0)) throw ConfigError("cost.b", "must be non-negative");
    if (*a == 0.0 && *b == 0.0) throw ConfigError("cost.a", "cost.a and cost.b cannot both be zero");
    summary["cost_optimal_c"] = theory::cost_optimal_c(*a, *b);
  }
  summary["config"] = config_json(cfg);

  CommandOutput out;
  out.files.emplace_back("theory_curve.csv", csv.str());
  out.files.emplace_back("theory_curve.json", dump(summary));
  out.message = "l_hat=" + format_double(opt.l_hat) + " accept=" + format_double(opt.accept);
  return out;
}

CommandOutput sweep_command(const RunConfig& cfg) {
  SweepSpec spec;
  spec.target = cfg.target();
  spec.kind = cfg.kernel_kind();
  spec.c = cfg.kernel_c();
  spec.grid_points = positive_u64(cfg, "sweep.points");
  spec.iterations = positive_u64(cfg, "sweep.iterations");
  spec.replicates = positive_u64(cfg, "sweep.replicates");
  spec.seed = cfg.get_u64("run.seed");
  spec.threads = cfg.threads();
  const auto lo = cfg.find_double("sweep.sigma2_min");
  const auto hi = cfg.find_double("sweep.sigma2_max");
  if (lo.has_value() != hi.has_value())
    throw ConfigError(lo ? "sweep.sigma2_max" : "sweep.sigma2_min", "sigma2 bounds must be given together");
  if (lo) spec.sigma2_bounds = std::make_pair(*lo, *hi);

  const auto result = run_sweep(spec);

  std::ostringstream csv;
  csv << "sigma2,l,accept_hat,accept_se,fose_raw,fose_norm\n";
  for (const auto& r : result.records)
    csv << format_double(r.sigma2) << ',' << format_double(r.l) << ',' << format_double(r.accept_hat) << ','
        << format_double(r.accept_se) << ',' << format_double(r.fose_raw) << ',' << format_double(r.fose_norm)
        << '\n';

  json summary;
  summary["accept_star"] = result.optimum.accept_star;
  summary["fose_star"] = result.optimum.fose_star;
  summary["theory_accept_star"] = optional_json(result.theory_accept_star);
  summary["theory_speed"] = optional_json(result.theory_speed);
  summary["config"] = config_json(cfg);

  CommandOutput out;
  out.files.emplace_back("sweep.csv", csv.str());
  out.files.emplace_back("sweep.json", dump(summary));
  out.message = "accept_star=" + format_double(result.optimum.accept_star) +
                " fose_star=" + format_double(result.optimum.fose_star);
  return out;
}

CommandOutput tune_command(const RunConfig& cfg) {
  RunConfig resolved = cfg;
  TuneSpec spec;
  spec.target = cfg.target();
  spec.kind = cfg.kernel_kind();
  spec.c = cfg.kernel_c();
  if (!cfg.has("tune.target_accept")) resolved.set("tune.target_accept", spec.kind == Algorithm::rwm ? "0.234" : "0.574");
  spec.target_accept = resolved.get_double("tune.target_accept");
  spec.budget = cfg.get_u64("tune.budget");
  spec.initial_l = cfg.get_double("tune.initial_l");
  spec.seed = cfg.get_u64("run.seed");
  if (spec.budget < kMinTuneBudget)
    throw ConfigError("tune.budget", "budget must be at least " + std::to_string(kMinTuneBudget));

  const auto result = tune_scale(spec);
  json summary;
  summary["l_tuned"] = result.l_tuned;
  summary["sigma2"] = result.sigma2;
  summary["accept_final"] = result.accept_final;
  summary["converged"] = result.converged;
  summary["config"] = config_json(resolved);

  CommandOutput out;
  out.files.emplace_back("tune.json", dump(summary));
  out.message = "l_tuned=" + format_double(result.l_tuned) + " accept_final=" + format_double(result.accept_final) +
                (result.converged ? "" : " (not converged)");
  return out;
}

CommandOutput mixing_command(const RunConfig& cfg) {
  const TargetSpec target = cfg.target();
  if (target.kind != TargetKind::exchangeable_normal)
    throw ConfigError("target.kind", "mixing requires exchangeable_normal");
  if (!(target.rho > 0.0)) throw ConfigError("target.rho", "mixing requires target.rho > 0");
  MixingSpec spec;
  spec.kind = cfg.kernel_kind();
  spec.rho = target.rho;
  spec.c = cfg.kernel_c();
  spec.ds = cfg.get_size_list("mixing.ds");
  if (auto s = cfg.find_double("mixing.steps_per_d")) {
    if (!(*s > 0.0)) throw ConfigError("mixing.steps_per_d", "must be positive");
    spec.steps_per_d = *s;
  }
  spec.seed = cfg.get_u64("run.seed");
  spec.threads = cfg.threads();

  const auto result = mean_mixing_experiment(spec);

  std::ostringstream csv;
  csv << "d,iat,stderr\n";
  for (const auto& p : result.points)
    csv << p.d << ',' << format_double(p.iat) << ',' << format_double(p.std_error) << '\n';

  json summary;
  summary["slope"] = result.slope;
  summary["slope_se"] = result.slope_se;
  json points = json::array();
  for (const auto& p : result.points) {
    points.push_back({{"d", p.d},
                      {"iat", p.iat},
                      {"stderr", p.std_error},
                      {"expected_iat", p.expected_iat},
                      {"mean_var", p.mean_var},
                      {"mean_var_se", p.mean_var_se},
                      {"accept", p.accept},
                      {"steps", p.steps},
                      {"thin", p.thin},
                      {"flagged", p.flagged}});
  }
  summary["points"] = points;
  summary["config"] = config_json(cfg);

  CommandOutput out;
  out.files.emplace_back("mixing.csv", csv.str());
  out.files.emplace_back("mixing.json", dump(summary));
  out.message = "slope=" + format_double(result.slope) + " slope_se=" + format_double(result.slope_se);
  return out;
}

CommandOutput selftest_command() {
  CommandOutput out;
  std::ostringstream msg;
  bool ok = true;
  for (const auto& r : run_selftest()) {
    ok = ok && r.passed;
    msg << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) msg << ": " << r.detail;
    msg << '\n';
  }
  out.message = msg.str();
  out.exit_code = ok ? kExitOk : kExitSelftest;
  return out;
}

void write_outputs(const CommandOutput& out, const std::filesystem::path& dir) {
  if (out.files.empty()) return;
  std::filesystem::create_directories(dir);
  for (const auto& [name, contents] : out.files) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << contents;
  }
}

}  // namespace mwg::cli
