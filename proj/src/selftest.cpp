#include "mwg/selftest.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "mwg/experiments.hpp"
#include "mwg/kernels.hpp"
#include "mwg/targets.hpp"
#include "mwg/theory.hpp"

namespace mwg {

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

SelfTestResult check(std::string name, const std::function<std::string()>& body) {
  std::string failure = body();
  return {std::move(name), failure.empty(), std::move(failure)};
}

std::string theory_scaling() {
  RandomStream rng(11);
  for (int i = 0; i < 100; ++i) {
    const double c = 0.01 + 0.99 * rng.uniform();
    const double l = 5.0 * rng.uniform();
    const double rwm = theory::rwm_speed(c, l / std::sqrt(c), 1.0);
    if (rel_err(rwm, theory::rwm_speed(1.0, l, 1.0)) > 1e-12) return "RWM c-scaling identity";
    const double mala = theory::mala_speed(c, std::pow(c, -1.0 / 6.0) * l, 0.25);
    if (rel_err(mala, std::pow(c, 2.0 / 3.0) * theory::mala_speed(1.0, l, 0.25)) > 1e-12)
      return "MALA c^{2/3} identity";
  }
  return {};
}

std::string optimal_acceptance() {
  for (double c : {0.1, 0.5, 1.0}) {
    for (double rho : {0.0, 0.5, 0.9}) {
      const double rwm = theory::optimal_l(Algorithm::rwm, c, theory::exchangeable_I(rho)).accept;
      const double mala = theory::optimal_l(Algorithm::mala, c, theory::exchangeable_K(rho)).accept;
      if (std::round(rwm * 1000.0) != 234.0 || std::round(mala * 1000.0) != 574.0) {
        std::ostringstream os;
        os << "c=" << c << " rho=" << rho << " rwm=" << rwm << " mala=" << mala;
        return os.str();
      }
    }
  }
  return {};
}

std::string gaussian_oracle() {
  RandomStream rng(5);
  const double mu = -2.0;
  const double s = 1.0;
  const std::size_t n = 1'000'000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::min(1.0, std::exp(mu + s * rng.normal()));
    sum += v;
    sum_sq += v * v;
  }
  const double m = sum / static_cast<double>(n);
  const double se = std::sqrt((sum_sq / static_cast<double>(n) - m * m) / static_cast<double>(n));
  const double exact = theory::expected_accept_gaussian(mu, s);
  if (std::abs(m - exact) > 3.0 * se) return "MC " + std::to_string(m) + " vs " + std::to_string(exact);
  return {};
}

std::string gradients() {
  RandomStream rng(3);
  const std::vector<TargetSpec> specs{{TargetKind::normal_iid, 6},
                                      {TargetKind::laplace_iid, 6},
                                      {TargetKind::exchangeable_normal, 6, 0.7},
                                      {TargetKind::student_t, 6, 0.4, 50.0}};
  const double h = 1e-5;
  for (const auto& spec : specs) {
    const Target t = make_target(spec);
    for (int rep = 0; rep < 100; ++rep) {
      auto x = exact_sample(t, rng);
      for (auto& v : x)
        if (std::abs(v) < 1e-3) v = 0.5;
      const auto g = grad_log_density(t, x);
      for (std::size_t i = 0; i < x.size(); ++i) {
        auto xp = x;
        auto xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (log_density(t, xp) - log_density(t, xm)) / (2.0 * h);
        if (std::abs(fd - g[i]) > 1e-5 * std::max(1.0, std::abs(g[i])))
          return std::string(to_string(spec.kind)) + " coordinate " + std::to_string(i);
      }
    }
  }
  return {};
}

std::string precision_form() {
  // For y = Sigma w, y' Sigma^{-1} y = w' Sigma w, computed without inversion.
  RandomStream rng(9);
  for (std::size_t d : {2u, 3u, 5u}) {
    for (double rho : {0.0, 0.3, 0.8}) {
      const ExchangeableNormalTarget t(d, rho);
      for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> w(d);
        for (auto& v : w) v = rng.normal();
        double sw = 0.0;
        for (double v : w) sw += v;
        std::vector<double> y(d);
        double quad = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          y[i] = (1.0 - rho) * w[i] + rho * sw;
          quad += w[i] * y[i];
        }
        if (rel_err(t.quadratic_form(y), quad) > 1e-10) return "d=" + std::to_string(d);
      }
    }
  }
  return {};
}

std::string kernel_symmetries() {
  const Target t = make_target({TargetKind::exchangeable_normal, 8, 0.4});
  RandomStream rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    const auto x = exact_sample(t, rng);
    const auto mask = select_subset(rng, 8, 0.5);
    ChainState state(x);
    const KernelConfig rwm{Algorithm::rwm, 0.5, 0.3};
    if (propose(state, mask, rwm, t, rng).log_q_ratio != 0.0) return "RWM q-difference not zero";
    const KernelConfig mala{Algorithm::mala, 0.5, 0.3};
    const auto p = propose(state, mask, mala, t, rng);
    const auto y = p.apply_to(x);
    const double fwd = mala_log_q_ratio(t, x, y, mask.indices, 0.3);
    const double bwd = mala_log_q_ratio(t, y, x, mask.indices, 0.3);
    if (std::abs(fwd + bwd) > 1e-12) return "MALA reversal";
  }
  return {};
}

std::string determinism_and_rejection() {
  const Target t = make_target({TargetKind::exchangeable_normal, 12, 0.5});
  const KernelConfig cfg{Algorithm::mala, 0.5, 0.8};
  auto run = [&] {
    RandomStream rng(77);
    ChainState s(exact_sample(t, rng));
    for (int i = 0; i < 2000; ++i) {
      const auto x = s.x;
      const auto m = s.moments;
      if (!step(s, cfg, t, rng) && (s.x != x || s.moments.sum != m.sum)) return std::vector<double>{};
    }
    return s.x;
  };
  const auto a = run();
  if (a.empty()) return "rejected step changed the state";
  if (a != run()) return "trajectories differ for identical seeds";
  return {};
}

std::string audit(Algorithm kind, double c) {
  AuditSpec spec;
  spec.target = {TargetKind::normal_iid, 10};
  spec.kind = kind;
  spec.c = c;
  spec.chains = 100;
  spec.steps = 2000;
  spec.seed = 404;
  spec.threads = 1;
  const auto r = stationarity_audit(spec);
  if (!r.pass) return "z(mean)=" + std::to_string(r.mean_z) + " z(var)=" + std::to_string(r.var_z);
  return {};
}

}  // namespace

std::vector<SelfTestResult> run_selftest() {
  std::vector<SelfTestResult> out;
  out.push_back(check("theory c-scaling identities", theory_scaling));
  out.push_back(check("optimal acceptance 0.234 / 0.574", optimal_acceptance));
  out.push_back(check("gaussian expected-acceptance oracle", gaussian_oracle));
  out.push_back(check("gradient vs finite differences", gradients));
  out.push_back(check("exchangeable precision form", precision_form));
  out.push_back(check("RWM symmetry and MALA reversal", kernel_symmetries));
  out.push_back(check("determinism and rejection identity", determinism_and_rejection));
  out.push_back(check("stationarity audit RWM c=0.3", [] { return audit(Algorithm::rwm, 0.3); }));
  out.push_back(check("stationarity audit MALA c=1", [] { return audit(Algorithm::mala, 1.0); }));
  return out;
}

}  // namespace mwg
