#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "mwg/error.hpp"
#include "mwg/targets.hpp"

using namespace mwg;

namespace {

Eigen::MatrixXd exchangeable_cov(std::size_t d, double rho) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(d, d, rho);
  s.diagonal().setOnes();
  return s;
}

}  // namespace

TEST_SUITE("targets") {

TEST_CASE("log density worked values") {
  CHECK(log_density(make_target({TargetKind::normal_iid, 2}), std::vector<double>{0.0, 0.0}) == 0.0);
  const ExchangeableNormalTarget ex(2, 0.5);
  CHECK(ex.theta() == doctest::Approx(-2.0 / 3.0));
  CHECK(ex.quadratic_form(std::vector<double>{1.0, 1.0}) == doctest::Approx(4.0 / 3.0));
  CHECK(ex.log_density(std::vector<double>{1.0, 1.0}) == doctest::Approx(-2.0 / 3.0));
  CHECK(log_density(make_target({TargetKind::laplace_iid, 3}), std::vector<double>{1.0, -2.0, 0.5}) ==
        doctest::Approx(-3.5));
}

TEST_CASE("gradient worked values") {
  const auto g1 = grad_log_density(make_target({TargetKind::normal_iid, 2}), std::vector<double>{2.0, -1.0});
  CHECK(g1 == std::vector<double>{-2.0, 1.0});
  const auto g2 = grad_log_density(make_target({TargetKind::exchangeable_normal, 2, 0.5}), std::vector<double>{1.0, 1.0});
  CHECK(g2[0] == doctest::Approx(-2.0 / 3.0));
  CHECK(g2[1] == doctest::Approx(-2.0 / 3.0));
  const auto g3 = grad_log_density(make_target({TargetKind::laplace_iid, 2}), std::vector<double>{3.0, -2.0});
  CHECK(g3 == std::vector<double>{-1.0, 1.0});
}

TEST_CASE("precision form equals x' Sigma^-1 x from direct inversion") {
  RandomStream rng(31);
  for (std::size_t d : {2u, 3u, 5u}) {
    for (double rho : {0.0, 0.2, 0.5, 0.9}) {
      const ExchangeableNormalTarget t(d, rho);
      const Eigen::MatrixXd inv = exchangeable_cov(d, rho).inverse();
      for (int rep = 0; rep < 50; ++rep) {
        Eigen::VectorXd x(d);
        for (std::size_t i = 0; i < d; ++i) x[i] = 3.0 * rng.normal();
        const double direct = x.dot(inv * x);
        const std::vector<double> xs(x.data(), x.data() + d);
        CHECK(std::abs(t.quadratic_form(xs) - direct) <= 1e-10 * std::abs(direct));
      }
    }
  }
}

TEST_CASE("multivariate t log density against a Cholesky evaluation") {
  const std::size_t d = 4;
  const double rho = 0.3, nu = 7.0;
  const MultivariateTTarget t(d, nu, rho);
  const Eigen::LLT<Eigen::MatrixXd> llt(exchangeable_cov(d, rho));
  RandomStream rng(5);
  const std::vector<double> zero(d, 0.0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = 2.0 * rng.normal();
    const double q = llt.matrixL().solve(x).squaredNorm();
    const double expected = -0.5 * (nu + d) * std::log1p(q / nu);
    const std::vector<double> xs(x.data(), x.data() + d);
    CHECK(t.log_density(xs) - t.log_density(zero) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("gradients match central finite differences") {
  RandomStream rng(6);
  const std::vector<TargetSpec> specs{{TargetKind::normal_iid, 7},
                                      {TargetKind::laplace_iid, 7},
                                      {TargetKind::exchangeable_normal, 7, 0.6},
                                      {TargetKind::student_t, 7, 0.3, 5.0}};
  const double h = 1e-5;
  for (const auto& spec : specs) {
    const Target t = make_target(spec);
    for (int rep = 0; rep < 100; ++rep) {
      auto x = exact_sample(t, rng);
      for (auto& v : x)
        if (std::abs(v) < 1e-3) v = -0.7;
      const auto g = grad_log_density(t, x);
      for (std::size_t i = 0; i < x.size(); ++i) {
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (log_density(t, xp) - log_density(t, xm)) / (2.0 * h);
        CHECK(std::abs(fd - g[i]) <= 1e-5 * std::max(1.0, std::abs(g[i])));
      }
    }
  }
}

TEST_CASE("exchangeable sampler covariance") {
  const auto t = make_target({TargetKind::exchangeable_normal, 10, 0.5});
  RandomStream rng(7);
  const int n = 100000;
  double s00 = 0.0, s01 = 0.0, s0 = 0.0, s1 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto x = exact_sample(t, rng);
    s0 += x[0];
    s1 += x[7];
    s00 += x[0] * x[0];
    s01 += x[0] * x[7];
  }
  const double var = s00 / n - (s0 / n) * (s0 / n);
  const double cov = s01 / n - (s0 / n) * (s1 / n);
  CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(cov - 0.5) < 3.0 * std::sqrt(1.25 / n));
}

TEST_CASE("exchangeable sampler: variance of the coordinate mean") {
  const std::size_t d = 50;
  const double rho = 0.9;
  const auto t = make_target({TargetKind::exchangeable_normal, d, rho});
  RandomStream rng(8);
  const int n = 40000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto x = exact_sample(t, rng);
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(d);
    s += m;
    s2 += m * m;
  }
  const double v = s2 / n - (s / n) * (s / n);
  const double expected = rho + (1.0 - rho) / static_cast<double>(d);
  CHECK(std::abs(v - expected) < 3.0 * expected * std::sqrt(2.0 / n));
}

TEST_CASE("laplace sampler: mean absolute value is one") {
  const auto t = make_target({TargetKind::laplace_iid, 1});
  RandomStream rng(9);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = std::abs(exact_sample(t, rng)[0]);
    s += a;
    s2 += a * a;
  }
  CHECK(std::abs(s / n - 1.0) < 3.0 * std::sqrt((s2 / n - 1.0) / n));
}

TEST_CASE("student t marginal variance") {
  const auto t = make_target({TargetKind::student_t, 5, 0.4, 12.0});
  CHECK(marginal_variance(t) == doctest::Approx(12.0 / 10.0));
  RandomStream rng(10);
  const int n = 100000;
  double s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = exact_sample(t, rng)[2];
    s2 += x * x;
    s4 += x * x * x * x;
  }
  const double m2 = s2 / n;
  CHECK(std::abs(m2 - 1.2) < 4.0 * std::sqrt((s4 / n - m2 * m2) / n));
}

TEST_CASE("rho = 0 reduces to the iid normal target exactly") {
  const auto iid = make_target({TargetKind::normal_iid, 6});
  const auto ex = make_target({TargetKind::exchangeable_normal, 6, 0.0});
  RandomStream a(11), b(11);
  for (int rep = 0; rep < 50; ++rep) {
    const auto xa = exact_sample(iid, a);
    const auto xb = exact_sample(ex, b);
    CHECK(xa == xb);
    CHECK(log_density(iid, xa) == log_density(ex, xa));
    CHECK(grad_log_density(iid, xa) == grad_log_density(ex, xa));
  }
}

TEST_CASE("roughness and MALA constants") {
  CHECK(roughness_I(make_target({TargetKind::normal_iid, 3})).value == 1.0);
  CHECK(roughness_I(make_target({TargetKind::exchangeable_normal, 3, 0.5})).value == doctest::Approx(2.0));
  CHECK(roughness_I(make_target({TargetKind::laplace_iid, 3})).value == 1.0);
  CHECK(*mala_K2(make_target({TargetKind::normal_iid, 3})) == doctest::Approx(1.0 / 16.0));
  CHECK(*mala_K2(make_target({TargetKind::exchangeable_normal, 3, 0.5})) == doctest::Approx(0.5));
  CHECK_FALSE(mala_K2(make_target({TargetKind::laplace_iid, 3})).has_value());
  // Score second moment of the t marginal: I = (nu+1)/(nu+3) for unit scale.
  const auto est = roughness_I(make_target({TargetKind::student_t, 1, 0.0, 9.0}), 400000);
  CHECK_FALSE(est.analytic());
  CHECK(std::abs(est.value - 10.0 / 12.0) < 4.0 * est.std_error);
}

TEST_CASE("invalid parameters and dimension mismatch") {
  CHECK_THROWS_AS(ExchangeableNormalTarget(3, 1.0), InvalidParameter);
  CHECK_THROWS_AS(ExchangeableNormalTarget(3, -0.1), InvalidParameter);
  CHECK_THROWS_AS(MultivariateTTarget(3, 0.0, 0.2), InvalidParameter);
  CHECK_THROWS_AS(IidProductTarget(0, ComponentKind::standard_normal), InvalidParameter);
  const auto t = make_target({TargetKind::normal_iid, 3});
  CHECK_THROWS_AS(log_density(t, std::vector<double>{1.0}), DimensionMismatch);
}

}
