#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "mwg/rng.hpp"

namespace mwg {

/// Running sums a chain keeps so that density and gradient changes of a
/// subset move cost O(|A|) rather than O(d).
///
/// Every target exposes the same incremental pair:
///   grad_coord(x_i, m)   -- d/dx_i log pi at a point whose sums are m;
///   log_density_delta(m, dm, A, x, y_A) -- log pi(y) - log pi(x) where y
///     differs from x on A only and dm holds the sum changes.
struct Moments {
  double sum = 0.0;     // sum_j x_j
  double sum_sq = 0.0;  // sum_j x_j^2

  static Moments of(std::span<const double> x) noexcept;

  Moments operator+(const Moments& o) const noexcept { return {sum + o.sum, sum_sq + o.sum_sq}; }
};

enum class ComponentKind { standard_normal, double_exponential };

/// pi(x) = prod_i exp(g(x_i)).
class IidProductTarget {
public:
  IidProductTarget(std::size_t d, ComponentKind kind);

  std::size_t dim() const noexcept { return d_; }
  ComponentKind component() const noexcept { return kind_; }

  double g(double x) const noexcept;
  double g_prime(double x) const noexcept;

  double log_density(std::span<const double> x) const;
  std::vector<double> grad_log_density(std::span<const double> x) const;
  std::vector<double> exact_sample(RandomStream& rng) const;

  /// E[g'(X)^2].
  double roughness() const noexcept { return 1.0; }
  /// E[(5 g'''^2 - 3 g''^3) / 48]; empty where g''' does not exist.
  std::optional<double> mala_k2() const noexcept;
  double marginal_variance() const noexcept;
  double correlation() const noexcept { return 0.0; }

  double grad_coord(double xi, const Moments&) const noexcept { return g_prime(xi); }
  double log_density_delta(const Moments& from, const Moments& delta, std::span<const std::size_t> idx,
                           std::span<const double> x, std::span<const double> y_sub) const noexcept;

private:
  std::size_t d_;
  ComponentKind kind_;
};

/// N(0, Sigma_rho): unit variances, constant pairwise correlation rho.
///
/// Evaluated through the precision form
///   j_d(x) = sum x_i^2 / (1 - rho) + theta_d (sum x_i)^2,
///   theta_d = -rho / (1 + (d-2) rho - (d-1) rho^2),
/// so Sigma_rho is never formed.
class ExchangeableNormalTarget {
public:
  ExchangeableNormalTarget(std::size_t d, double rho);

  std::size_t dim() const noexcept { return d_; }
  double rho() const noexcept { return rho_; }
  double theta() const noexcept { return theta_; }

  /// j_d evaluated from the running sums.
  double quadratic_form(const Moments& m) const noexcept;
  double quadratic_form(std::span<const double> x) const;

  double log_density(std::span<const double> x) const;
  std::vector<double> grad_log_density(std::span<const double> x) const;
  std::vector<double> exact_sample(RandomStream& rng) const;

  double roughness() const noexcept { return 1.0 / (1.0 - rho_); }
  std::optional<double> mala_k2() const noexcept;
  double marginal_variance() const noexcept { return 1.0; }
  double correlation() const noexcept { return rho_; }

  double grad_coord(double xi, const Moments& m) const noexcept {
    return -inv_one_minus_rho_ * xi - theta_ * m.sum;
  }
  double log_density_delta(const Moments& from, const Moments& delta, std::span<const std::size_t> idx,
                           std::span<const double> x, std::span<const double> y_sub) const noexcept;

  /// Fills `out` with one exact draw by sequential conditioning.
  void fill_sample(RandomStream& rng, std::span<double> out) const;

private:
  std::size_t d_;
  double rho_;
  double theta_;
  double inv_one_minus_rho_;
};

/// Multivariate t_nu(0, Sigma_rho); log-density -(nu + d)/2 log(1 + j_d(x)/nu).
class MultivariateTTarget {
public:
  MultivariateTTarget(std::size_t d, double nu, double rho);

  std::size_t dim() const noexcept { return normal_.dim(); }
  double nu() const noexcept { return nu_; }
  double rho() const noexcept { return normal_.rho(); }

  double log_density(std::span<const double> x) const;
  std::vector<double> grad_log_density(std::span<const double> x) const;
  std::vector<double> exact_sample(RandomStream& rng) const;

  std::optional<double> mala_k2() const noexcept { return std::nullopt; }
  double marginal_variance() const noexcept;
  double correlation() const noexcept { return normal_.rho(); }

  double grad_coord(double xi, const Moments& m) const noexcept;
  double log_density_delta(const Moments& from, const Moments& delta, std::span<const std::size_t> idx,
                           std::span<const double> x, std::span<const double> y_sub) const noexcept;

private:
  ExchangeableNormalTarget normal_;
  double nu_;
};

using Target = std::variant<IidProductTarget, ExchangeableNormalTarget, MultivariateTTarget>;

enum class TargetKind { normal_iid, laplace_iid, exchangeable_normal, student_t };

std::string_view to_string(TargetKind kind) noexcept;
std::optional<TargetKind> parse_target_kind(std::string_view name) noexcept;

/// Plain description of a target as it appears in run configs.
struct TargetSpec {
  TargetKind kind = TargetKind::normal_iid;
  std::size_t d = 20;
  double rho = 0.0;
  double nu = 50.0;
};

Target make_target(const TargetSpec& spec);

std::size_t dim(const Target& target) noexcept;
double log_density(const Target& target, std::span<const double> x);
std::vector<double> grad_log_density(const Target& target, std::span<const double> x);
std::vector<double> exact_sample(const Target& target, RandomStream& rng);
double marginal_variance(const Target& target) noexcept;
/// rho for correlated targets, 0 for product targets.
double correlation(const Target& target) noexcept;

struct RoughnessEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 when analytic
  std::size_t samples = 0; // 0 when analytic
  bool analytic() const noexcept { return samples == 0; }
};

/// E[(d/dx_1 log pi(X))^2]. Analytic for the Gaussian and product targets;
/// Monte Carlo with the given sample count and seed for the t target.
RoughnessEstimate roughness_I(const Target& target, std::size_t mc_samples = 1'000'000,
                              std::uint64_t mc_seed = 0x7a11);

/// MALA constant K^2; empty ("not applicable") where g''' does not exist or
/// no closed form is known.
std::optional<double> mala_K2(const Target& target) noexcept;

}  // namespace mwg
