#include "mwg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mwg/error.hpp"

namespace mwg::stats {

double mean(std::span<const double> v) noexcept {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) noexcept {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

IatEstimate integrated_autocorrelation_time(std::span<const double> series) {
  const std::size_t n = series.size();
  require(n >= 4, "IAT needs at least four observations");
  const double m = mean(series);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = series[i] - m;

  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += centered[i] * centered[i + lag];
    return s / static_cast<double>(n);
  };

  const double gamma0 = autocov(0);
  IatEstimate est;
  if (gamma0 <= 0.0) return est;

  const std::size_t max_lag = n / 2;
  double sum_pairs = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  std::size_t lag = 0;
  est.converged = false;
  while (2 * lag + 1 <= max_lag) {
    const double g0 = lag == 0 ? gamma0 : autocov(2 * lag);
    double pair = g0 + autocov(2 * lag + 1);
    if (pair <= 0.0) {
      est.converged = true;
      break;
    }
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    sum_pairs += pair;
    ++lag;
  }
  est.window = 2 * lag + 1;
  est.tau = (2.0 * sum_pairs - gamma0) / gamma0;
  est.std_error = est.tau * std::sqrt(2.0 * (2.0 * static_cast<double>(est.window) + 1.0) / static_cast<double>(n));
  return est;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> y_se) {
  const std::size_t n = x.size();
  require(n >= 2 && y.size() == n, "line fit needs matching inputs of length >= 2");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "line fit needs distinct x values");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (y_se.size() == n) {
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = (x[i] - mx) / sxx;
      var += w * w * y_se[i] * y_se[i];
    }
    fit.slope_se = std::sqrt(var);
  }
  return fit;
}

bool fit_quadratic(std::span<const double> x, std::span<const double> y, std::array<double, 3>& coeffs) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n) return false;
  // Center and scale x for conditioning, then solve the 3x3 normal equations.
  const double mx = mean(x);
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v - mx));
  if (scale == 0.0) return false;
  double a[3][4] = {};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (x[i] - mx) / scale;
    const double p[3] = {1.0, t, t * t};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] += p[r] * p[c];
      a[r][3] += p[r] * y[i];
    }
  }
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-14) return false;
    if (pivot != col)
      for (int c = 0; c < 4; ++c) std::swap(a[col][c], a[pivot][c]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
    }
  }
  const double b0 = a[0][3] / a[0][0];
  const double b1 = a[1][3] / a[1][1];
  const double b2 = a[2][3] / a[2][2];
  // back to the original x: y = b0 + b1 t + b2 t^2, t = (x - mx) / scale
  const double s2 = scale * scale;
  coeffs[2] = b2 / s2;
  coeffs[1] = b1 / scale - 2.0 * b2 * mx / s2;
  coeffs[0] = b0 - b1 * mx / scale + b2 * mx * mx / s2;
  return true;
}

}  // namespace mwg::stats
