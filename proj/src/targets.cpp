#include "mwg/targets.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mwg/error.hpp"

namespace mwg {

namespace {

void check_dim(std::size_t expected, std::size_t got) {
  if (expected != got) throw DimensionMismatch(expected, got);
}

void check_rho(double rho) {
  require(std::isfinite(rho) && rho >= 0.0 && rho < 1.0,
          "rho must lie in [0, 1), got " + std::to_string(rho));
}

}  // namespace

Moments Moments::of(std::span<const double> x) noexcept {
  Moments m;
  for (double v : x) {
    m.sum += v;
    m.sum_sq += v * v;
  }
  return m;
}

// ---------------------------------------------------------------------------
// IID product

IidProductTarget::IidProductTarget(std::size_t d, ComponentKind kind) : d_(d), kind_(kind) {
  require(d >= 1, "dimension must be positive");
}

double IidProductTarget::g(double x) const noexcept {
  switch (kind_) {
    case ComponentKind::standard_normal:
      return -0.5 * x * x;
    case ComponentKind::double_exponential:
      return -std::abs(x);
  }
  return 0.0;
}

double IidProductTarget::g_prime(double x) const noexcept {
  switch (kind_) {
    case ComponentKind::standard_normal:
      return -x;
    case ComponentKind::double_exponential:
      // kink at 0: return 0 there
      return x > 0.0 ? -1.0 : (x < 0.0 ? 1.0 : 0.0);
  }
  return 0.0;
}

double IidProductTarget::log_density(std::span<const double> x) const {
  check_dim(d_, x.size());
  double acc = 0.0;
  for (double v : x) acc += g(v);
  return acc;
}

std::vector<double> IidProductTarget::grad_log_density(std::span<const double> x) const {
  check_dim(d_, x.size());
  std::vector<double> out(d_);
  for (std::size_t i = 0; i < d_; ++i) out[i] = g_prime(x[i]);
  return out;
}

std::vector<double> IidProductTarget::exact_sample(RandomStream& rng) const {
  std::vector<double> out(d_);
  for (auto& v : out) {
    if (kind_ == ComponentKind::standard_normal) {
      v = rng.normal();
    } else {
      const double e = -std::log(rng.uniform());
      v = rng.uniform() < 0.5 ? -e : e;
    }
  }
  return out;
}

std::optional<double> IidProductTarget::mala_k2() const noexcept {
  // g'' = -1, g''' = 0 for the standard normal: E[-3 (-1)^3 / 48] = 1/16.
  if (kind_ == ComponentKind::standard_normal) return 1.0 / 16.0;
  return std::nullopt;
}

double IidProductTarget::marginal_variance() const noexcept {
  return kind_ == ComponentKind::standard_normal ? 1.0 : 2.0;
}

double IidProductTarget::log_density_delta(const Moments&, const Moments& delta,
                                           std::span<const std::size_t> idx,
                                           std::span<const double> x,
                                           std::span<const double> y_sub) const noexcept {
  if (kind_ == ComponentKind::standard_normal) return -0.5 * delta.sum_sq;
  double acc = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a) acc += std::abs(x[idx[a]]) - std::abs(y_sub[a]);
  return acc;
}

// ---------------------------------------------------------------------------
// Exchangeable normal

ExchangeableNormalTarget::ExchangeableNormalTarget(std::size_t d, double rho) : d_(d), rho_(rho) {
  require(d >= 1, "dimension must be positive");
  check_rho(rho);
  const double dd = static_cast<double>(d);
  theta_ = -rho / (1.0 + (dd - 2.0) * rho - (dd - 1.0) * rho * rho);
  inv_one_minus_rho_ = 1.0 / (1.0 - rho);
}

double ExchangeableNormalTarget::quadratic_form(const Moments& m) const noexcept {
  return inv_one_minus_rho_ * m.sum_sq + theta_ * m.sum * m.sum;
}

double ExchangeableNormalTarget::quadratic_form(std::span<const double> x) const {
  check_dim(d_, x.size());
  return quadratic_form(Moments::of(x));
}

double ExchangeableNormalTarget::log_density(std::span<const double> x) const {
  return -0.5 * quadratic_form(x);
}

std::vector<double> ExchangeableNormalTarget::grad_log_density(std::span<const double> x) const {
  check_dim(d_, x.size());
  const Moments m = Moments::of(x);
  std::vector<double> out(d_);
  for (std::size_t i = 0; i < d_; ++i) out[i] = grad_coord(x[i], m);
  return out;
}

void ExchangeableNormalTarget::fill_sample(RandomStream& rng, std::span<double> out) const {
  check_dim(d_, out.size());
  // X_k | X_0..X_{k-1} ~ N(rho S_k / (1 + (k-1) rho), (1-rho)(1 + k rho) / (1 + (k-1) rho)),
  // with S_k the sum of the k earlier coordinates.
  double s = 0.0;
  for (std::size_t k = 0; k < d_; ++k) {
    const double kk = static_cast<double>(k);
    const double denom = 1.0 + (kk - 1.0) * rho_;
    const double mean = rho_ * s / denom;
    const double var = (1.0 - rho_) * (1.0 + kk * rho_) / denom;
    out[k] = mean + std::sqrt(var) * rng.normal();
    s += out[k];
  }
}

std::vector<double> ExchangeableNormalTarget::exact_sample(RandomStream& rng) const {
  std::vector<double> out(d_);
  fill_sample(rng, out);
  return out;
}

std::optional<double> ExchangeableNormalTarget::mala_k2() const noexcept {
  const double r = inv_one_minus_rho_;
  return r * r * r / 16.0;
}

double ExchangeableNormalTarget::log_density_delta(const Moments& from, const Moments& delta,
                                                   std::span<const std::size_t>, std::span<const double>,
                                                   std::span<const double>) const noexcept {
  // (S + dS)^2 - S^2 = dS (2S + dS)
  return -0.5 * (inv_one_minus_rho_ * delta.sum_sq + theta_ * delta.sum * (2.0 * from.sum + delta.sum));
}

// ---------------------------------------------------------------------------
// Multivariate t

MultivariateTTarget::MultivariateTTarget(std::size_t d, double nu, double rho) : normal_(d, rho), nu_(nu) {
  require(std::isfinite(nu) && nu > 0.0, "nu must be positive");
}

double MultivariateTTarget::log_density(std::span<const double> x) const {
  const double q = normal_.quadratic_form(x);
  return -0.5 * (nu_ + static_cast<double>(dim())) * std::log1p(q / nu_);
}

double MultivariateTTarget::grad_coord(double xi, const Moments& m) const noexcept {
  const double q = normal_.quadratic_form(m);
  const double scale = (nu_ + static_cast<double>(dim())) / (nu_ + q);
  return scale * normal_.grad_coord(xi, m);
}

std::vector<double> MultivariateTTarget::grad_log_density(std::span<const double> x) const {
  check_dim(dim(), x.size());
  const Moments m = Moments::of(x);
  std::vector<double> out(dim());
  for (std::size_t i = 0; i < dim(); ++i) out[i] = grad_coord(x[i], m);
  return out;
}

std::vector<double> MultivariateTTarget::exact_sample(RandomStream& rng) const {
  std::vector<double> out(dim());
  normal_.fill_sample(rng, out);
  const double w = std::sqrt(rng.chi_squared(nu_) / nu_);
  for (auto& v : out) v /= w;
  return out;
}

double MultivariateTTarget::marginal_variance() const noexcept {
  return nu_ > 2.0 ? nu_ / (nu_ - 2.0) : std::numeric_limits<double>::infinity();
}

double MultivariateTTarget::log_density_delta(const Moments& from, const Moments& delta,
                                              std::span<const std::size_t>, std::span<const double>,
                                              std::span<const double>) const noexcept {
  const double q = normal_.quadratic_form(from);
  const double dq = -2.0 * normal_.log_density_delta(from, delta, {}, {}, {});
  return -0.5 * (nu_ + static_cast<double>(dim())) * std::log1p(dq / (nu_ + q));
}

// ---------------------------------------------------------------------------
// Variant front end

std::string_view to_string(TargetKind kind) noexcept {
  switch (kind) {
    case TargetKind::normal_iid: return "normal_iid";
    case TargetKind::laplace_iid: return "laplace_iid";
    case TargetKind::exchangeable_normal: return "exchangeable_normal";
    case TargetKind::student_t: return "student_t";
  }
  return "?";
}

std::optional<TargetKind> parse_target_kind(std::string_view name) noexcept {
  for (auto k : {TargetKind::normal_iid, TargetKind::laplace_iid, TargetKind::exchangeable_normal,
                 TargetKind::student_t}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Target make_target(const TargetSpec& spec) {
  switch (spec.kind) {
    case TargetKind::normal_iid:
      return IidProductTarget(spec.d, ComponentKind::standard_normal);
    case TargetKind::laplace_iid:
      return IidProductTarget(spec.d, ComponentKind::double_exponential);
    case TargetKind::exchangeable_normal:
      return ExchangeableNormalTarget(spec.d, spec.rho);
    case TargetKind::student_t:
      return MultivariateTTarget(spec.d, spec.nu, spec.rho);
  }
  throw InvalidParameter("unknown target kind");
}

std::size_t dim(const Target& target) noexcept {
  return std::visit([](const auto& t) { return t.dim(); }, target);
}

double log_density(const Target& target, std::span<const double> x) {
  return std::visit([&](const auto& t) { return t.log_density(x); }, target);
}

std::vector<double> grad_log_density(const Target& target, std::span<const double> x) {
  return std::visit([&](const auto& t) { return t.grad_log_density(x); }, target);
}

std::vector<double> exact_sample(const Target& target, RandomStream& rng) {
  return std::visit([&](const auto& t) { return t.exact_sample(rng); }, target);
}

double marginal_variance(const Target& target) noexcept {
  return std::visit([](const auto& t) { return t.marginal_variance(); }, target);
}

double correlation(const Target& target) noexcept {
  return std::visit([](const auto& t) { return t.correlation(); }, target);
}

RoughnessEstimate roughness_I(const Target& target, std::size_t mc_samples, std::uint64_t mc_seed) {
  if (const auto* t = std::get_if<MultivariateTTarget>(&target)) {
    require(mc_samples >= 2, "Monte Carlo roughness needs at least two samples");
    RandomStream rng(mc_seed);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t n = 1; n <= mc_samples; ++n) {
      const auto x = t->exact_sample(rng);
      const double g = t->grad_coord(x[0], Moments::of(x));
      const double v = g * g;
      const double delta = v - mean;
      mean += delta / static_cast<double>(n);
      m2 += delta * (v - mean);
    }
    const double var = m2 / static_cast<double>(mc_samples - 1);
    return {mean, std::sqrt(var / static_cast<double>(mc_samples)), mc_samples};
  }
  return std::visit(
      [](const auto& t) -> RoughnessEstimate {
        if constexpr (requires { t.roughness(); }) {
          return {t.roughness(), 0.0, 0};
        } else {
          return {};
        }
      },
      target);
}

std::optional<double> mala_K2(const Target& target) noexcept {
  return std::visit([](const auto& t) { return t.mala_k2(); }, target);
}

}  // namespace mwg
