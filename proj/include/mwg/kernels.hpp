#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mwg/rng.hpp"
#include "mwg/targets.hpp"

namespace mwg {

enum class Algorithm { rwm, mala };

std::string_view to_string(Algorithm kind) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

/// Exponent s in sigma^2 = l^2 d^{-s}: 1 for RWM, 1/3 for MALA.
constexpr double scale_exponent(Algorithm kind) noexcept {
  return kind == Algorithm::rwm ? 1.0 : 1.0 / 3.0;
}

double sigma2_from_l(Algorithm kind, double l, std::size_t d) noexcept;
double l_from_sigma2(Algorithm kind, double sigma2, std::size_t d) noexcept;

/// k = max(1, round-half-away-from-zero(c d)), never above d.
std::size_t subset_size(std::size_t d, double c) noexcept;

struct KernelConfig {
  Algorithm kind = Algorithm::rwm;
  double c = 1.0;       // update fraction in (0, 1]
  double sigma2 = 1.0;  // per-coordinate proposal variance
  std::uint64_t seed = 0;
  /// Only negative controls switch this off (every valid proposal accepted).
  bool metropolis_correction = true;

  void validate() const;
};

struct SubsetMask {
  std::vector<std::size_t> indices;  // sorted, distinct
};

/// Uniform size-k subsets by partial Fisher-Yates over a persistent
/// permutation. Full updates (k == d) consume no randomness.
class SubsetSampler {
public:
  explicit SubsetSampler(std::size_t d);

  std::span<const std::size_t> draw(RandomStream& rng, std::size_t k);

private:
  std::vector<std::size_t> perm_;
  std::vector<std::size_t> chosen_;
  std::vector<std::size_t> all_;
};

SubsetMask select_subset(RandomStream& rng, std::size_t d, double c);

struct ChainState {
  explicit ChainState(std::vector<double> start);

  std::vector<double> x;
  Moments moments;
  std::uint64_t n_steps = 0;
  std::uint64_t n_accepts = 0;
  double sq_jump_coord1 = 0.0;

  std::size_t dim() const noexcept { return x.size(); }
  double acceptance_rate() const noexcept {
    return n_steps == 0 ? 0.0 : static_cast<double>(n_accepts) / static_cast<double>(n_steps);
  }

  // Workspace reused across steps.
  SubsetSampler subsets;
  std::vector<double> proposal;
  std::vector<double> grad_at_x;
  std::uint64_t accepts_since_resync = 0;
};

/// Accepted moves between full recomputations of the cached sums.
inline constexpr std::uint64_t kResyncInterval = 10'000;

struct Proposal {
  SubsetMask mask;
  std::vector<double> values;  // y_i for i in mask, same order
  double log_q_ratio = 0.0;    // log q(y, x) - log q(x, y)
  bool valid = true;

  std::vector<double> apply_to(std::span<const double> x) const;
};

/// Sum over A of log N(x_i; y_i + s2/2 d_i log pi(y), s2) - log N(y_i; x_i + s2/2 d_i log pi(x), s2).
double mala_log_q_ratio(const Target& target, std::span<const double> x, std::span<const double> y,
                        std::span<const std::size_t> subset, double sigma2);

double log_accept_ratio(const Target& target, std::span<const double> x, std::span<const double> y,
                        double q_diff);

Proposal propose(const ChainState& state, const SubsetMask& mask, const KernelConfig& config,
                 const Target& target, RandomStream& rng);

bool step(ChainState& state, const KernelConfig& config, const Target& target, RandomStream& rng);

namespace detail {

/// One Metropolis-within-Gibbs transition for a concrete target type.
/// Draw order: subset, Gaussian increments, uniform.
template <class T>
bool step_impl(ChainState& s, const KernelConfig& cfg, const T& target, RandomStream& rng) {
  const std::size_t d = s.x.size();
  const auto idx = s.subsets.draw(rng, subset_size(d, cfg.c));
  const std::size_t k = idx.size();
  const bool mala = cfg.kind == Algorithm::mala;
  const double sigma = std::sqrt(cfg.sigma2);
  const double half = 0.5 * cfg.sigma2;

  s.proposal.resize(k);
  if (mala) s.grad_at_x.resize(k);
  Moments delta;
  for (std::size_t a = 0; a < k; ++a) {
    const double xi = s.x[idx[a]];
    double yi = xi + sigma * rng.normal();
    if (mala) {
      const double gx = target.grad_coord(xi, s.moments);
      s.grad_at_x[a] = gx;
      yi += half * gx;
    }
    s.proposal[a] = yi;
    delta.sum += yi - xi;
    delta.sum_sq += yi * yi - xi * xi;
  }
  const Moments next = s.moments + delta;

  double ratio = target.log_density_delta(s.moments, delta, idx, s.x, s.proposal);
  if (mala) {
    double fwd = 0.0;
    double bwd = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      const double xi = s.x[idx[a]];
      const double yi = s.proposal[a];
      const double f = yi - xi - half * s.grad_at_x[a];
      const double b = xi - yi - half * target.grad_coord(yi, next);
      fwd += f * f;
      bwd += b * b;
    }
    ratio += (fwd - bwd) / (2.0 * cfg.sigma2);
  }

  const double u = rng.uniform();
  const bool valid = std::isfinite(ratio);
  const bool accept = valid && (!cfg.metropolis_correction || std::log(u) < ratio);

  ++s.n_steps;
  if (!accept) return false;

  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t i = idx[a];
    if (i == 0) {
      const double jump = s.proposal[a] - s.x[0];
      s.sq_jump_coord1 += jump * jump;
    }
    s.x[i] = s.proposal[a];
  }
  s.moments = next;
  ++s.n_accepts;
  if (++s.accepts_since_resync >= kResyncInterval) {
    s.moments = Moments::of(s.x);
    s.accepts_since_resync = 0;
  }
  return true;
}

}  // namespace detail

/// Runs `steps` transitions with the target dispatched once.
void run_steps(ChainState& state, const KernelConfig& config, const Target& target, RandomStream& rng,
               std::uint64_t steps);

}  // namespace mwg
