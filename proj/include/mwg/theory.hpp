#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mwg/kernels.hpp"

namespace mwg::theory {

/// Standard normal CDF via erfc.
double normal_cdf(double x) noexcept;
/// log Phi(x), accurate far into the lower tail.
double log_normal_cdf(double x) noexcept;

/// Limiting acceptance of RWM-within-Gibbs: 2 Phi(-l sqrt(c I) / 2).
double rwm_accept(double c, double l, double I);
/// Diffusion speed h_c(l) = 2 c l^2 Phi(-l sqrt(c I) / 2).
double rwm_speed(double c, double l, double I);

/// Limiting acceptance of MALA-within-Gibbs: 2 Phi(-sqrt(c) K l^3 / 2).
double mala_accept(double c, double l, double K);
double mala_speed(double c, double l, double K);

/// `constant` is I for RWM and K (not K^2) for MALA.
double accept(Algorithm kind, double c, double l, double constant);
double speed(Algorithm kind, double c, double l, double constant);

struct Optimum {
  double l_hat = 0.0;
  double speed = 0.0;
  double accept = 0.0;
};

/// Maximizes t on [0, inf) for a unimodal f: bracket [0, L] with L doubled
/// until f stops increasing, then golden-section search to `tol` in t.
double golden_section_argmax(const std::function<double(double)>& f, double tol = 1e-9);

/// Speed-maximizing scale for the given kind, c and constant (I or K).
Optimum optimal_l(Algorithm kind, double c, double constant);

/// argmax of c^{2/3} / (a + b c) on (0, 1]: min(1, 2a/b).
double cost_optimal_c(double a, double b);

/// E[1 ^ e^A] for A ~ N(mu, s^2).
double expected_accept_gaussian(double mu, double s);

/// Constants induced by the exchangeable normal: I = 1/(1-rho), K^2 = (1/16)(1/(1-rho))^3.
double exchangeable_I(double rho);
double exchangeable_K(double rho);
inline double exchangeable_constant(Algorithm kind, double rho) {
  return kind == Algorithm::rwm ? exchangeable_I(rho) : exchangeable_K(rho);
}

struct AcceptSpeed {
  double accept = 0.0;
  double speed = 0.0;
};

AcceptSpeed exchangeable_overlay(Algorithm kind, double c, double rho, double l);

/// Limiting Ornstein-Uhlenbeck law of the coordinate mean:
/// dU = h^{1/2} dB - h U / (2 rho) dt on the time scale d^exponent.
struct MeanProcess {
  double drift_coeff = 0.0;  // -h_{c,rho}(l) / (2 rho)
  double stationary_var = 0.0;
  double time_scale_exponent = 0.0;
};

MeanProcess mean_process_params(Algorithm kind, double c, double rho, double l);

struct CurvePoint {
  double l = 0.0;
  double sigma2 = 0.0;
  double accept = 0.0;
  double speed = 0.0;
};

std::vector<CurvePoint> theory_curve(Algorithm kind, double c, double constant, std::span<const double> ls,
                                     std::size_t d);

}  // namespace mwg::theory
