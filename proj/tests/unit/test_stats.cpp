#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "mwg/rng.hpp"
#include "mwg/stats.hpp"

using namespace mwg;

TEST_SUITE("stats") {

TEST_CASE("mean and unbiased variance") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(stats::mean(v) == 2.5);
  CHECK(stats::variance(v) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("autocorrelation time of AR(1) series") {
  for (double phi : {0.0, 0.5, 0.9}) {
    RandomStream rng(17);
    const std::size_t n = 400000;
    std::vector<double> x(n);
    double v = rng.normal() / std::sqrt(1.0 - phi * phi);
    for (auto& e : x) {
      e = v;
      v = phi * v + rng.normal();
    }
    const auto est = stats::integrated_autocorrelation_time(x);
    const double exact = (1.0 + phi) / (1.0 - phi);
    CHECK(est.converged);
    CHECK(std::abs(est.tau - exact) < 4.0 * est.std_error + 0.02);
    CHECK(est.std_error > 0.0);
  }
}

TEST_CASE("line fit recovers an exact line and propagates errors") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{3.0, 5.0, 7.0, 9.0};
  const std::vector<double> se{0.1, 0.1, 0.1, 0.1};
  const auto f = stats::fit_line(x, y, se);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  // Var(slope) = sum w_i^2 se_i^2 with w_i = (x_i - xbar) / Sxx.
  CHECK(f.slope_se == doctest::Approx(0.1 / std::sqrt(5.0)));
}

TEST_CASE("quadratic fit recovers an exact parabola") {
  std::vector<double> x, y;
  for (int i = 0; i < 7; ++i) {
    const double t = 0.1 + 0.05 * i;
    x.push_back(t);
    y.push_back(-3.0 * t * t + 2.0 * t + 0.5);
  }
  std::array<double, 3> co{};
  REQUIRE(stats::fit_quadratic(x, y, co));
  CHECK(co[0] == doctest::Approx(0.5));
  CHECK(co[1] == doctest::Approx(2.0));
  CHECK(co[2] == doctest::Approx(-3.0));
  std::vector<double> same{1.0, 1.0, 1.0};
  CHECK_FALSE(stats::fit_quadratic(same, same, co));
}

}
