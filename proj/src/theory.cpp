#include "mwg/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mwg/error.hpp"

namespace mwg::theory {

namespace {

void check_c(double c) { require(std::isfinite(c) && c > 0.0 && c <= 1.0, "c must lie in (0, 1]"); }
void check_l(double l) { require(std::isfinite(l) && l >= 0.0, "l must be non-negative"); }

void check_rho(double rho) {
  require(std::isfinite(rho) && rho >= 0.0 && rho < 1.0, "rho must lie in [0, 1)");
}

}  // namespace

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_normal_cdf(double x) noexcept {
  if (x > -20.0) return std::log(normal_cdf(x));
  // Mills-ratio asymptotic series.
  const double x2 = x * x;
  const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double rwm_accept(double c, double l, double I) {
  check_c(c);
  check_l(l);
  require(std::isfinite(I) && I > 0.0, "I must be positive");
  return 2.0 * normal_cdf(-l * std::sqrt(c * I) / 2.0);
}

double rwm_speed(double c, double l, double I) { return c * l * l * rwm_accept(c, l, I); }

double mala_accept(double c, double l, double K) {
  check_c(c);
  check_l(l);
  require(std::isfinite(K) && K >= 0.0, "K must be non-negative");
  return 2.0 * normal_cdf(-std::sqrt(c) * K * l * l * l / 2.0);
}

double mala_speed(double c, double l, double K) { return c * l * l * mala_accept(c, l, K); }

double accept(Algorithm kind, double c, double l, double constant) {
  return kind == Algorithm::rwm ? rwm_accept(c, l, constant) : mala_accept(c, l, constant);
}

double speed(Algorithm kind, double c, double l, double constant) {
  return kind == Algorithm::rwm ? rwm_speed(c, l, constant) : mala_speed(c, l, constant);
}

double golden_section_argmax(const std::function<double(double)>& f, double tol) {
  double hi = 1.0;
  while (f(hi) >= f(0.5 * hi)) {
    hi *= 2.0;
    if (hi > 1e12) return hi;
  }
  constexpr double inv_phi = 0.6180339887498949;
  double a = 0.0;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

Optimum optimal_l(Algorithm kind, double c, double constant) {
  check_c(c);
  require(std::isfinite(constant) && constant > 0.0, "I or K must be positive");
  const double l_hat = golden_section_argmax([&](double l) { return speed(kind, c, l, constant); });
  return {l_hat, speed(kind, c, l_hat, constant), accept(kind, c, l_hat, constant)};
}

double cost_optimal_c(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b) && a >= 0.0 && b >= 0.0, "costs must be non-negative");
  require(a > 0.0 || b > 0.0, "a and b cannot both be zero");
  if (b == 0.0) return 1.0;
  return std::min(1.0, 2.0 * a / b);
}

double expected_accept_gaussian(double mu, double s) {
  require(std::isfinite(s) && s >= 0.0, "s must be non-negative");
  if (s == 0.0) return mu >= 0.0 ? 1.0 : std::exp(mu);
  const double r = mu / s;
  // exp(mu + s^2/2) Phi(-s - mu/s), in the log domain to survive large exponents.
  const double tail = std::exp(mu + 0.5 * s * s + log_normal_cdf(-s - r));
  return normal_cdf(r) + tail;
}

double exchangeable_I(double rho) {
  check_rho(rho);
  return 1.0 / (1.0 - rho);
}

double exchangeable_K(double rho) {
  check_rho(rho);
  const double r = 1.0 / (1.0 - rho);
  return std::sqrt(r * r * r / 16.0);
}

AcceptSpeed exchangeable_overlay(Algorithm kind, double c, double rho, double l) {
  const double k = exchangeable_constant(kind, rho);
  return {accept(kind, c, l, k), speed(kind, c, l, k)};
}

MeanProcess mean_process_params(Algorithm kind, double c, double rho, double l) {
  check_rho(rho);
  require(rho > 0.0, "the coordinate-mean process degenerates at rho = 0");
  const double h = exchangeable_overlay(kind, c, rho, l).speed;
  return {-h / (2.0 * rho), rho, kind == Algorithm::rwm ? 2.0 : 4.0 / 3.0};
}

std::vector<CurvePoint> theory_curve(Algorithm kind, double c, double constant, std::span<const double> ls,
                                     std::size_t d) {
  require(d >= 1, "dimension must be positive");
  std::vector<CurvePoint> out;
  out.reserve(ls.size());
  for (double l : ls) {
    out.push_back({l, sigma2_from_l(kind, l, d), accept(kind, c, l, constant), speed(kind, c, l, constant)});
  }
  return out;
}

}  // namespace mwg::theory
