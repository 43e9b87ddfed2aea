#include "mwg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mwg/error.hpp"

namespace mwg {

std::string_view to_string(Algorithm kind) noexcept {
  return kind == Algorithm::rwm ? "rwm" : "mala";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
  if (name == "rwm" || name == "RWM") return Algorithm::rwm;
  if (name == "mala" || name == "MALA") return Algorithm::mala;
  return std::nullopt;
}

double sigma2_from_l(Algorithm kind, double l, std::size_t d) noexcept {
  return l * l * std::pow(static_cast<double>(d), -scale_exponent(kind));
}

double l_from_sigma2(Algorithm kind, double sigma2, std::size_t d) noexcept {
  return std::sqrt(sigma2 * std::pow(static_cast<double>(d), scale_exponent(kind)));
}

std::size_t subset_size(std::size_t d, double c) noexcept {
  const double k = std::round(c * static_cast<double>(d));  // half away from zero
  if (!(k >= 1.0)) return 1;
  return std::min(d, static_cast<std::size_t>(k));
}

void KernelConfig::validate() const {
  require(std::isfinite(c) && c > 0.0 && c <= 1.0, "kernel.c must lie in (0, 1]");
  require(std::isfinite(sigma2) && sigma2 > 0.0, "sigma2 must be positive and finite");
}

SubsetSampler::SubsetSampler(std::size_t d) : perm_(d), all_(d) {
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  std::iota(all_.begin(), all_.end(), std::size_t{0});
  chosen_.reserve(d);
}

std::span<const std::size_t> SubsetSampler::draw(RandomStream& rng, std::size_t k) {
  const std::size_t d = perm_.size();
  if (k >= d) return all_;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(d - i));
    std::swap(perm_[i], perm_[j]);
  }
  chosen_.assign(perm_.begin(), perm_.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(chosen_.begin(), chosen_.end());
  return chosen_;
}

SubsetMask select_subset(RandomStream& rng, std::size_t d, double c) {
  require(d >= 1, "dimension must be positive");
  require(c > 0.0 && c <= 1.0, "c must lie in (0, 1]");
  SubsetSampler sampler(d);
  const auto idx = sampler.draw(rng, subset_size(d, c));
  return {{idx.begin(), idx.end()}};
}

ChainState::ChainState(std::vector<double> start)
    : x(std::move(start)), moments(Moments::of(x)), subsets(x.size()) {}

std::vector<double> Proposal::apply_to(std::span<const double> x) const {
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t a = 0; a < mask.indices.size(); ++a) y[mask.indices[a]] = values[a];
  return y;
}

double mala_log_q_ratio(const Target& target, std::span<const double> x, std::span<const double> y,
                        std::span<const std::size_t> subset, double sigma2) {
  const auto gx = grad_log_density(target, x);
  const auto gy = grad_log_density(target, y);
  const double half = 0.5 * sigma2;
  double fwd = 0.0;
  double bwd = 0.0;
  for (std::size_t i : subset) {
    const double f = y[i] - x[i] - half * gx[i];
    const double b = x[i] - y[i] - half * gy[i];
    fwd += f * f;
    bwd += b * b;
  }
  return (fwd - bwd) / (2.0 * sigma2);
}

double log_accept_ratio(const Target& target, std::span<const double> x, std::span<const double> y,
                        double q_diff) {
  if (x.size() != y.size()) throw DimensionMismatch(x.size(), y.size());
  return log_density(target, y) - log_density(target, x) + q_diff;
}

Proposal propose(const ChainState& state, const SubsetMask& mask, const KernelConfig& config,
                 const Target& target, RandomStream& rng) {
  config.validate();
  const auto& x = state.x;
  if (x.size() != dim(target)) throw DimensionMismatch(dim(target), x.size());
  Proposal p;
  p.mask = mask;
  p.values.resize(mask.indices.size());
  const double sigma = std::sqrt(config.sigma2);
  if (config.kind == Algorithm::rwm) {
    for (std::size_t a = 0; a < mask.indices.size(); ++a) p.values[a] = x[mask.indices[a]] + sigma * rng.normal();
    return p;
  }
  const auto gx = grad_log_density(target, x);
  for (std::size_t a = 0; a < mask.indices.size(); ++a) {
    const std::size_t i = mask.indices[a];
    p.values[a] = x[i] + sigma * rng.normal() + 0.5 * config.sigma2 * gx[i];
  }
  const auto y = p.apply_to(x);
  p.log_q_ratio = mala_log_q_ratio(target, x, y, mask.indices, config.sigma2);
  p.valid = std::isfinite(p.log_q_ratio);
  return p;
}

bool step(ChainState& state, const KernelConfig& config, const Target& target, RandomStream& rng) {
  if (state.dim() != dim(target)) throw DimensionMismatch(dim(target), state.dim());
  return std::visit([&](const auto& t) { return detail::step_impl(state, config, t, rng); }, target);
}

void run_steps(ChainState& state, const KernelConfig& config, const Target& target, RandomStream& rng,
               std::uint64_t steps) {
  if (state.dim() != dim(target)) throw DimensionMismatch(dim(target), state.dim());
  std::visit(
      [&](const auto& t) {
        for (std::uint64_t n = 0; n < steps; ++n) detail::step_impl(state, config, t, rng);
      },
      target);
}

}  // namespace mwg
