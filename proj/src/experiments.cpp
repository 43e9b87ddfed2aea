#include "mwg/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>
#include <tuple>

#include "mwg/error.hpp"
#include "mwg/stats.hpp"
#include "mwg/theory.hpp"

namespace mwg {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            f(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

ChainStats run_chain_stats(const Target& target, Algorithm kind, double c, double sigma2,
                           std::uint64_t iterations, RandomStream rng) {
  KernelConfig cfg{kind, c, sigma2, rng.seed()};
  cfg.validate();
  require(iterations >= 1, "iterations must be positive");
  ChainState state(exact_sample(target, rng));
  run_steps(state, cfg, target, rng, iterations);
  const auto n = static_cast<double>(iterations);
  return {static_cast<double>(state.n_accepts) / n, state.sq_jump_coord1 / n, iterations};
}

double normalize_fose(double fose_raw, Algorithm kind, std::size_t d, double c, double rho) {
  require(std::isfinite(rho) && rho >= 0.0 && rho < 1.0, "rho must lie in [0, 1)");
  require(c > 0.0 && c <= 1.0, "c must lie in (0, 1]");
  const double dd = static_cast<double>(d);
  if (kind == Algorithm::rwm) return dd / (1.0 - rho) * fose_raw;
  return std::pow(c, -2.0 / 3.0) * std::cbrt(dd) / (1.0 - rho) * fose_raw;
}

std::optional<double> theory_constant(const Target& target, Algorithm kind) {
  if (const auto* iid = std::get_if<IidProductTarget>(&target)) {
    if (kind == Algorithm::rwm) return iid->roughness();
    if (auto k2 = iid->mala_k2()) return std::sqrt(*k2);
    return std::nullopt;
  }
  if (const auto* ex = std::get_if<ExchangeableNormalTarget>(&target)) {
    return theory::exchangeable_constant(kind, ex->rho());
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sweeps

void SweepSpec::validate() const {
  require(c > 0.0 && c <= 1.0, "kernel.c must lie in (0, 1]");
  require(grid_points >= 1, "sweep.points must be at least 1");
  require(iterations >= 1000, "sweep.iterations must be at least 1000");
  require(replicates >= 1, "sweep.replicates must be at least 1");
  if (sigma2_bounds) {
    const auto [lo, hi] = *sigma2_bounds;
    require(std::isfinite(lo) && std::isfinite(hi) && lo > 0.0 && hi >= lo,
            "sweep.sigma2_min/sigma2_max must satisfy 0 < min <= max");
    require(grid_points == 1 || hi > lo, "a multi-point grid needs sigma2_max > sigma2_min");
  }
}

std::vector<double> sweep_grid(const SweepSpec& spec, const Target& target) {
  double lo = 0.0;
  double hi = 0.0;
  if (spec.sigma2_bounds) {
    std::tie(lo, hi) = *spec.sigma2_bounds;
  } else {
    std::optional<double> constant = theory_constant(target, spec.kind);
    if (!constant && spec.kind == Algorithm::rwm) constant = roughness_I(target).value;
    require(constant.has_value(),
            "no closed-form scale for this target/kernel; supply sweep.sigma2_min and sweep.sigma2_max");
    const double l_hat = theory::optimal_l(spec.kind, spec.c, *constant).l_hat;
    const double center = sigma2_from_l(spec.kind, l_hat, dim(target));
    lo = center / 16.0;
    hi = center * 16.0;
  }
  const std::size_t n = spec.grid_points;
  std::vector<double> grid(n);
  if (n == 1) {
    grid[0] = std::sqrt(lo * hi);
    return grid;
  }
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = std::exp(log_lo + step * static_cast<double>(i));
  grid.back() = hi;
  grid.front() = lo;
  return grid;
}

SweepOptimum smoothed_optimum(std::span<const SweepRecord> records, std::size_t top) {
  require(!records.empty(), "no records to summarize");
  SweepOptimum opt;
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].fose_norm > records[opt.best_index].fose_norm) opt.best_index = i;
  opt.accept_star = records[opt.best_index].accept_hat;
  opt.fose_star = records[opt.best_index].fose_norm;

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return records[a].fose_norm > records[b].fose_norm; });
  order.resize(std::min(top, order.size()));
  if (order.size() < 3) return opt;

  std::vector<double> logs;
  std::vector<double> eff;
  for (std::size_t i : order) {
    logs.push_back(std::log(records[i].sigma2));
    eff.push_back(records[i].fose_norm);
  }
  std::array<double, 3> q{};
  if (!stats::fit_quadratic(logs, eff, q) || !(q[2] < 0.0)) return opt;
  const double vertex = -q[1] / (2.0 * q[2]);
  const auto [lo, hi] = std::minmax_element(logs.begin(), logs.end());
  if (vertex < *lo || vertex > *hi) return opt;

  // Acceptance at the vertex, interpolated linearly in log sigma^2.
  std::vector<std::size_t> by_scale(records.size());
  std::iota(by_scale.begin(), by_scale.end(), std::size_t{0});
  std::sort(by_scale.begin(), by_scale.end(),
            [&](std::size_t a, std::size_t b) { return records[a].sigma2 < records[b].sigma2; });
  for (std::size_t j = 1; j < by_scale.size(); ++j) {
    const auto& left = records[by_scale[j - 1]];
    const auto& right = records[by_scale[j]];
    const double x0 = std::log(left.sigma2);
    const double x1 = std::log(right.sigma2);
    if (vertex > x1) continue;
    const double w = x1 > x0 ? (vertex - x0) / (x1 - x0) : 0.0;
    opt.accept_star = left.accept_hat + w * (right.accept_hat - left.accept_hat);
    break;
  }
  opt.fose_star = q[0] + q[1] * vertex + q[2] * vertex * vertex;
  opt.smoothed = true;
  return opt;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const Target target = make_target(spec.target);
  const std::size_t d = dim(target);
  const double rho = correlation(target);
  const auto grid = sweep_grid(spec, target);

  const std::size_t jobs = grid.size() * spec.replicates;
  std::vector<ChainStats> runs(jobs);
  const RandomStream base(spec.seed);
  parallel_for(jobs, spec.threads, [&](std::size_t job) {
    const std::size_t g = job / spec.replicates;
    const std::size_t r = job % spec.replicates;
    runs[job] = run_chain_stats(target, spec.kind, spec.c, grid[g], spec.iterations,
                                base.substream(g).substream(r));
  });

  SweepResult result;
  result.records.reserve(grid.size());
  const double total = static_cast<double>(spec.iterations * spec.replicates);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    double fose = 0.0;
    for (std::size_t r = 0; r < spec.replicates; ++r) {
      acc += runs[g * spec.replicates + r].accept_hat;
      fose += runs[g * spec.replicates + r].fose_raw;
    }
    acc /= static_cast<double>(spec.replicates);
    fose /= static_cast<double>(spec.replicates);
    SweepRecord rec;
    rec.sigma2 = grid[g];
    rec.l = l_from_sigma2(spec.kind, grid[g], d);
    rec.accept_hat = acc;
    rec.accept_se = std::sqrt(acc * (1.0 - acc) / total);
    rec.fose_raw = fose;
    rec.fose_norm = normalize_fose(fose, spec.kind, d, spec.c, rho);
    result.records.push_back(rec);
  }
  result.optimum = smoothed_optimum(result.records);

  if (const auto constant = theory_constant(target, spec.kind)) {
    const auto opt = theory::optimal_l(spec.kind, spec.c, *constant);
    result.theory_accept_star = opt.accept;
    double norm = 1.0 / (1.0 - rho);
    if (spec.kind == Algorithm::mala) norm *= std::pow(spec.c, -2.0 / 3.0);
    result.theory_speed = opt.speed * norm;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Acceptance-rate tuning

void TuneSpec::validate() const {
  require(c > 0.0 && c <= 1.0, "kernel.c must lie in (0, 1]");
  require(target_accept > 0.0 && target_accept < 1.0, "tune.target_accept must lie in (0, 1)");
  require(budget >= kMinTuneBudget, "tune.budget must be at least " + std::to_string(kMinTuneBudget));
  require(std::isfinite(initial_l) && initial_l > 0.0, "tune.initial_l must be positive");
}

double robbins_monro_update(double log_sigma, double batch_accept, double target_accept, std::size_t n) {
  const double gain = std::pow(static_cast<double>(n), -0.6);
  return log_sigma + gain * (batch_accept - target_accept);
}

TuneResult tune_scale(const TuneSpec& spec) {
  spec.validate();
  const Target target = make_target(spec.target);
  const std::size_t d = dim(target);
  const RandomStream base(spec.seed);

  RandomStream rng = base.substream(0);
  ChainState state(exact_sample(target, rng));
  KernelConfig cfg{spec.kind, spec.c, sigma2_from_l(spec.kind, spec.initial_l, d), spec.seed};
  double log_sigma = 0.5 * std::log(cfg.sigma2);

  TuneResult out;
  out.batches = spec.budget / kTuneBatch;
  for (std::size_t n = 1; n <= out.batches; ++n) {
    cfg.sigma2 = std::exp(2.0 * log_sigma);
    const auto before = state.n_accepts;
    run_steps(state, cfg, target, rng, kTuneBatch);
    const double batch_accept = static_cast<double>(state.n_accepts - before) / static_cast<double>(kTuneBatch);
    log_sigma = robbins_monro_update(log_sigma, batch_accept, spec.target_accept, n);
  }

  out.sigma2 = std::exp(2.0 * log_sigma);
  out.l_tuned = l_from_sigma2(spec.kind, out.sigma2, d);
  const std::uint64_t fresh = std::max(kMinTuneBudget, spec.budget / 2);
  out.accept_final = run_chain_stats(target, spec.kind, spec.c, out.sigma2, fresh, base.substream(1)).accept_hat;
  out.converged = std::abs(out.accept_final - spec.target_accept) <= kTuneTolerance;
  return out;
}

// ---------------------------------------------------------------------------
// Coordinate-mean mixing

void MixingSpec::validate() const {
  require(rho > 0.0 && rho < 1.0, "mixing.rho must lie in (0, 1)");
  require(c > 0.0 && c <= 1.0, "kernel.c must lie in (0, 1]");
  require(ds.size() >= 2, "mixing.ds needs at least two dimensions");
  for (auto d : ds) require(d >= 5, "every mixing dimension must be at least 5");
  if (steps_per_d) require(*steps_per_d > 0.0, "mixing.steps_per_d must be positive");
}

double expected_mean_iat(Algorithm kind, double c, double rho, std::size_t d) {
  const double constant = theory::exchangeable_constant(kind, rho);
  const auto opt = theory::optimal_l(kind, c, constant);
  const double exponent = kind == Algorithm::rwm ? 2.0 : 4.0 / 3.0;
  // OU relaxation rate h / (2 rho) per unit time; IAT = 2 / rate.
  return 4.0 * rho / opt.speed * std::pow(static_cast<double>(d), exponent);
}

MixingResult mean_mixing_experiment(const MixingSpec& spec) {
  spec.validate();
  const double exponent = spec.kind == Algorithm::rwm ? 2.0 : 4.0 / 3.0;
  const double constant = theory::exchangeable_constant(spec.kind, spec.rho);
  const double l_hat = theory::optimal_l(spec.kind, spec.c, constant).l_hat;
  const RandomStream base(spec.seed);

  MixingResult result;
  result.points.resize(spec.ds.size());
  parallel_for(spec.ds.size(), spec.threads, [&](std::size_t j) {
    const std::size_t d = spec.ds[j];
    const ExchangeableNormalTarget target(d, spec.rho);
    MixingPoint& pt = result.points[j];
    pt.d = d;
    pt.expected_iat = expected_mean_iat(spec.kind, spec.c, spec.rho, d);
    const double scale = std::pow(static_cast<double>(d), exponent);
    pt.steps = static_cast<std::uint64_t>(
        std::ceil(spec.steps_per_d ? *spec.steps_per_d * scale : 2000.0 * pt.expected_iat));
    pt.thin = std::max<std::size_t>(1, static_cast<std::size_t>(pt.expected_iat / 20.0));

    RandomStream rng = base.substream(d);
    ChainState state(target.exact_sample(rng));
    const KernelConfig cfg{spec.kind, spec.c, sigma2_from_l(spec.kind, l_hat, d), spec.seed};
    cfg.validate();
    const std::size_t n = std::max<std::size_t>(4, pt.steps / pt.thin);
    pt.steps = static_cast<std::uint64_t>(n) * pt.thin;
    std::vector<double> series(n);
    const double inv_d = 1.0 / static_cast<double>(d);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t s = 0; s < pt.thin; ++s) detail::step_impl(state, cfg, target, rng);
      series[t] = state.moments.sum * inv_d;
    }
    pt.accept = state.acceptance_rate();

    const auto iat = stats::integrated_autocorrelation_time(series);
    const double thin = static_cast<double>(pt.thin);
    pt.iat = iat.tau * thin;
    pt.std_error = iat.std_error * thin;
    const double needed = 2000.0 * pt.iat;
    if (!iat.converged || static_cast<double>(pt.steps) < needed) {
      pt.flagged = true;
      pt.std_error *= std::sqrt(std::max(1.0, needed / static_cast<double>(pt.steps)));
    }

    pt.mean_var = stats::variance(series);
    const double m = stats::mean(series);
    std::vector<double> sq(n);
    for (std::size_t t = 0; t < n; ++t) sq[t] = (series[t] - m) * (series[t] - m);
    const double tau_sq = stats::integrated_autocorrelation_time(sq).tau;
    pt.mean_var_se = std::sqrt(stats::variance(sq) * std::max(1.0, tau_sq) / static_cast<double>(n));
  });

  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_se;
  for (const auto& pt : result.points) {
    x.push_back(std::log(static_cast<double>(pt.d)));
    y.push_back(std::log(pt.iat));
    y_se.push_back(pt.std_error / pt.iat);
  }
  const auto fit = stats::fit_line(x, y, y_se);
  result.slope = fit.slope;
  result.intercept = fit.intercept;
  result.slope_se = fit.slope_se;
  return result;
}

// ---------------------------------------------------------------------------
// Stationarity audit

AuditReport stationarity_audit(const AuditSpec& spec) {
  require(spec.chains >= 50, "audit needs at least 50 chains");
  const Target target = make_target(spec.target);
  const std::size_t d = dim(target);

  AuditReport report;
  if (spec.sigma2) {
    report.sigma2 = *spec.sigma2;
  } else if (const auto constant = theory_constant(target, spec.kind)) {
    report.sigma2 = sigma2_from_l(spec.kind, theory::optimal_l(spec.kind, spec.c, *constant).l_hat, d);
  } else {
    report.sigma2 = sigma2_from_l(spec.kind, 1.0, d);
  }
  KernelConfig cfg{spec.kind, spec.c, report.sigma2, spec.seed, spec.metropolis_correction};
  cfg.validate();

  std::vector<double> first(spec.chains);
  std::vector<double> second(spec.chains);
  const RandomStream base(spec.seed);
  parallel_for(spec.chains, spec.threads, [&](std::size_t j) {
    RandomStream rng = base.substream(j);
    ChainState state(exact_sample(target, rng));
    run_steps(state, cfg, target, rng, spec.steps);
    const auto m = Moments::of(state.x);
    first[j] = m.sum / static_cast<double>(d);
    second[j] = m.sum_sq / static_cast<double>(d);
  });

  const double n = static_cast<double>(spec.chains);
  report.mean = stats::mean(first);
  report.mean_z = report.mean / std::sqrt(stats::variance(first) / n);
  report.second_moment = stats::mean(second);
  report.expected_second_moment = marginal_variance(target);
  report.var_z = (report.second_moment - report.expected_second_moment) / std::sqrt(stats::variance(second) / n);
  report.pass = std::isfinite(report.mean_z) && std::isfinite(report.var_z) && std::abs(report.mean_z) < 4.0 &&
                std::abs(report.var_z) < 4.0;
  return report;
}

}  // namespace mwg
