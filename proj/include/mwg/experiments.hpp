#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mwg/kernels.hpp"
#include "mwg/targets.hpp"

namespace mwg {

/// Runs f(0..n-1) on up to `threads` workers (0 = hardware concurrency).
/// Results must be written to per-index slots; scheduling never affects them.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f);

struct ChainStats {
  double accept_hat = 0.0;
  double fose_raw = 0.0;  // (1/N) sum (X^1_i - X^1_{i-1})^2
  std::uint64_t iterations = 0;
};

/// Stationary start from an exact draw, then `iterations` kernel steps.
/// The start consumes the head of `rng`; the chain continues on the same stream.
ChainStats run_chain_stats(const Target& target, Algorithm kind, double c, double sigma2,
                           std::uint64_t iterations, RandomStream rng);

/// RWM: d/(1-rho) fose_raw. MALA: c^{-2/3} d^{1/3}/(1-rho) fose_raw.
double normalize_fose(double fose_raw, Algorithm kind, std::size_t d, double c, double rho);

/// I (RWM) or K (MALA) when known in closed form for this target.
std::optional<double> theory_constant(const Target& target, Algorithm kind);

struct SweepSpec {
  TargetSpec target;
  Algorithm kind = Algorithm::rwm;
  double c = 1.0;
  std::size_t grid_points = 50;
  std::optional<std::pair<double, double>> sigma2_bounds;
  std::uint64_t iterations = 100'000;
  std::uint64_t seed = 1;
  std::size_t replicates = 1;
  unsigned threads = 0;

  void validate() const;
};

struct SweepRecord {
  double sigma2 = 0.0;
  double l = 0.0;
  double accept_hat = 0.0;
  double accept_se = 0.0;
  double fose_raw = 0.0;
  double fose_norm = 0.0;
};

struct SweepOptimum {
  std::size_t best_index = 0;  // record with the largest fose_norm
  double accept_star = 0.0;
  double fose_star = 0.0;
  bool smoothed = false;       // false when the quadratic fit was unusable
};

struct SweepResult {
  std::vector<SweepRecord> records;
  SweepOptimum optimum;
  std::optional<double> theory_accept_star;
  std::optional<double> theory_speed;  // peak speed on the fose_norm scale
};

/// Geometric grid: user bounds, or [s*/16, 16 s*] around the theory-optimal
/// variance s*. For the t target s* uses the Monte Carlo roughness estimate.
std::vector<double> sweep_grid(const SweepSpec& spec, const Target& target);

/// Argmax record plus the vertex of a quadratic fit of fose_norm against
/// log sigma^2 over the `top` best records; the acceptance at the vertex is
/// interpolated from the neighbouring grid points.
SweepOptimum smoothed_optimum(std::span<const SweepRecord> records, std::size_t top = 5);

SweepResult run_sweep(const SweepSpec& spec);

struct TuneSpec {
  TargetSpec target;
  Algorithm kind = Algorithm::rwm;
  double c = 1.0;
  double target_accept = 0.234;
  std::uint64_t budget = 200'000;
  std::uint64_t seed = 1;
  double initial_l = 1.0;

  void validate() const;
};

inline constexpr std::uint64_t kMinTuneBudget = 10'000;
inline constexpr std::uint64_t kTuneBatch = 200;
inline constexpr double kTuneTolerance = 0.03;

struct TuneResult {
  double l_tuned = 0.0;
  double sigma2 = 0.0;
  double accept_final = 0.0;
  bool converged = false;
  std::size_t batches = 0;
};

/// log sigma + n^{-0.6} (batch_accept - target).
double robbins_monro_update(double log_sigma, double batch_accept, double target_accept, std::size_t n);

TuneResult tune_scale(const TuneSpec& spec);

struct MixingSpec {
  Algorithm kind = Algorithm::rwm;
  double rho = 0.5;
  double c = 1.0;
  std::vector<std::size_t> ds{10, 20, 40};
  /// Chain length per unit of the d^{exponent} time scale; default gives
  /// 2000 theoretical autocorrelation times.
  std::optional<double> steps_per_d;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  void validate() const;
};

struct MixingPoint {
  std::size_t d = 0;
  double iat = 0.0;        // in iterations
  double std_error = 0.0;  // widened when flagged
  double expected_iat = 0.0;
  double mean_var = 0.0;   // sample variance of the coordinate-mean series
  double mean_var_se = 0.0;
  double accept = 0.0;
  std::uint64_t steps = 0;
  std::size_t thin = 1;
  bool flagged = false;    // chain too short for the estimated IAT
};

struct MixingResult {
  std::vector<MixingPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

/// Theory IAT of the coordinate mean, 4 rho d^e / h_{c,rho}(l_hat).
double expected_mean_iat(Algorithm kind, double c, double rho, std::size_t d);

MixingResult mean_mixing_experiment(const MixingSpec& spec);

struct AuditSpec {
  TargetSpec target;
  Algorithm kind = Algorithm::rwm;
  double c = 1.0;
  std::size_t chains = 200;
  std::uint64_t steps = 10'000;
  std::optional<double> sigma2;
  std::uint64_t seed = 1;
  bool metropolis_correction = true;
  unsigned threads = 0;
};

struct AuditReport {
  double sigma2 = 0.0;
  double mean = 0.0;          // pooled coordinate mean
  double mean_z = 0.0;
  double second_moment = 0.0; // pooled mean of x_i^2
  double expected_second_moment = 0.0;
  double var_z = 0.0;
  bool pass = false;          // both |z| < 4
};

AuditReport stationarity_audit(const AuditSpec& spec);

}  // namespace mwg
