#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace mwg::stats {

double mean(std::span<const double> v) noexcept;
/// Unbiased sample variance.
double variance(std::span<const double> v) noexcept;

/// Integrated autocorrelation time tau = 1 + 2 sum_{k>=1} rho_k by Geyer's
/// initial positive sequence: pair sums gamma_{2m} + gamma_{2m+1} are added
/// while positive, and forced non-increasing.
struct IatEstimate {
  double tau = 1.0;
  double std_error = 0.0;  // Sokal: tau sqrt(2 (2W + 1) / n), W the last lag used
  std::size_t window = 0;
  bool converged = true;   // false when the sequence ran past n/2 lags
};

IatEstimate integrated_autocorrelation_time(std::span<const double> series);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

/// Ordinary least squares; slope_se propagates the per-point y standard errors.
LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> y_se);

/// y = c[0] + c[1] x + c[2] x^2 by least squares. Returns false if singular.
bool fit_quadratic(std::span<const double> x, std::span<const double> y, std::array<double, 3>& coeffs);

}  // namespace mwg::stats
