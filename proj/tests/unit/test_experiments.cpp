#include <doctest.h>

#include <cmath>
#include <vector>

#include "mwg/error.hpp"
#include "mwg/experiments.hpp"
#include "mwg/theory.hpp"

using namespace mwg;

TEST_SUITE("experiments") {

TEST_CASE("first-order efficiency normalization") {
  CHECK(normalize_fose(0.05, Algorithm::rwm, 20, 0.5, 0.0) == doctest::Approx(1.0));
  CHECK(normalize_fose(0.033, Algorithm::rwm, 20, 1.0, 0.5) == doctest::Approx(1.32));
  CHECK(normalize_fose(0.1, Algorithm::mala, 20, 0.25, 0.0) ==
        doctest::Approx(std::pow(0.25, -2.0 / 3.0) * std::cbrt(20.0) * 0.1));
}

TEST_CASE("chain statistics at the degenerate scales") {
  const auto t = make_target({TargetKind::normal_iid, 20});
  const auto tiny = run_chain_stats(t, Algorithm::rwm, 1.0, 1e-14, 5000, RandomStream(1));
  CHECK(tiny.accept_hat > 0.999);
  CHECK(tiny.fose_raw < 1e-12);
  const auto huge = run_chain_stats(t, Algorithm::rwm, 1.0, 1e12, 5000, RandomStream(1));
  CHECK(huge.accept_hat == 0.0);
  CHECK(huge.fose_raw == 0.0);
}

TEST_CASE("chain statistics at the theory optimum") {
  const auto t = make_target({TargetKind::normal_iid, 20});
  const double l = theory::optimal_l(Algorithm::rwm, 1.0, 1.0).l_hat;
  const auto st = run_chain_stats(t, Algorithm::rwm, 1.0, l * l / 20.0, 100000, RandomStream(2));
  CHECK(std::abs(st.accept_hat - 0.234) < 0.08);
  CHECK(20.0 * st.fose_raw >= 0.9);
  CHECK(20.0 * st.fose_raw <= 1.6);
}

TEST_CASE("theory constants per target") {
  CHECK(*theory_constant(make_target({TargetKind::normal_iid, 5}), Algorithm::rwm) == 1.0);
  CHECK(*theory_constant(make_target({TargetKind::normal_iid, 5}), Algorithm::mala) == doctest::Approx(0.25));
  CHECK(*theory_constant(make_target({TargetKind::exchangeable_normal, 5, 0.5}), Algorithm::rwm) ==
        doctest::Approx(2.0));
  CHECK_FALSE(theory_constant(make_target({TargetKind::laplace_iid, 5}), Algorithm::mala).has_value());
}

TEST_CASE("sweep grid and optimum selection") {
  SweepSpec spec;
  spec.target = {TargetKind::normal_iid, 20};
  spec.grid_points = 5;
  spec.sigma2_bounds = std::make_pair(0.01, 1.0);
  const auto grid = sweep_grid(spec, make_target(spec.target));
  REQUIRE(grid.size() == 5);
  CHECK(grid.front() == doctest::Approx(0.01));
  CHECK(grid.back() == doctest::Approx(1.0));
  CHECK(grid[2] == doctest::Approx(0.1));

  spec.sigma2_bounds.reset();
  spec.grid_points = 50;
  const auto centred = sweep_grid(spec, make_target(spec.target));
  const double star = std::pow(theory::optimal_l(Algorithm::rwm, 1.0, 1.0).l_hat, 2) / 20.0;
  CHECK(centred.front() == doctest::Approx(star / 16.0));
  CHECK(centred.back() == doctest::Approx(star * 16.0));

  const std::vector<SweepRecord> one{{0.1, 1.0, 0.4, 0.01, 0.02, 0.4}};
  const auto o = smoothed_optimum(one);
  CHECK(o.best_index == 0);
  CHECK(o.accept_star == 0.4);
  CHECK(o.fose_star == 0.4);
}

TEST_CASE("smoothed optimum finds the vertex of a clean parabola") {
  // fose_norm quadratic in log sigma^2 with its peak at sigma^2 = 0.3;
  // acceptance linear in log sigma^2, so interpolation is exact.
  std::vector<SweepRecord> recs;
  const double peak = std::log(0.3);
  for (int i = 0; i < 20; ++i) {
    const double x = std::log(0.01) + 0.3 * i;
    recs.push_back({std::exp(x), 0.0, 0.8 - 0.1 * x, 0.0, 0.0, 1.0 - 0.2 * (x - peak) * (x - peak)});
  }
  const auto o = smoothed_optimum(recs);
  CHECK(o.smoothed);
  CHECK(o.accept_star == doctest::Approx(0.8 - 0.1 * peak));
  CHECK(o.fose_star == doctest::Approx(1.0));

  // A monotone curve has no interior vertex: fall back to the argmax record.
  std::vector<SweepRecord> rising;
  for (int i = 0; i < 10; ++i) rising.push_back({0.1 * (i + 1), 0.0, 0.5, 0.0, 0.0, 0.1 * i});
  const auto m = smoothed_optimum(rising);
  CHECK_FALSE(m.smoothed);
  CHECK(m.best_index == 9);
}

TEST_CASE("sweep is deterministic and independent of thread count") {
  SweepSpec spec;
  spec.target = {TargetKind::exchangeable_normal, 10, 0.3};
  spec.kind = Algorithm::mala;
  spec.c = 0.5;
  spec.grid_points = 6;
  spec.iterations = 3000;
  spec.replicates = 2;
  spec.seed = 99;
  spec.threads = 1;
  const auto a = run_sweep(spec);
  spec.threads = 4;
  const auto b = run_sweep(spec);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].accept_hat == b.records[i].accept_hat);
    CHECK(a.records[i].fose_raw == b.records[i].fose_raw);
  }
  spec.seed = 100;
  CHECK(run_sweep(spec).records[0].fose_raw != a.records[0].fose_raw);
}

TEST_CASE("sweep validation") {
  SweepSpec spec;
  spec.grid_points = 0;
  CHECK_THROWS_AS(spec.validate(), InvalidParameter);
  spec.grid_points = 5;
  spec.sigma2_bounds = std::make_pair(1.0, 0.5);
  CHECK_THROWS_AS(spec.validate(), InvalidParameter);
  spec.sigma2_bounds.reset();
  spec.target = {TargetKind::student_t, 5, 0.0, 10.0};
  spec.kind = Algorithm::mala;
  CHECK_THROWS_AS(run_sweep(spec), InvalidParameter);
}

TEST_CASE("measured acceptance follows the limiting curve") {
  SweepSpec spec;
  spec.target = {TargetKind::normal_iid, 50};
  spec.iterations = 20000;
  spec.seed = 5;
  spec.threads = 1;
  const auto r = run_sweep(spec);
  for (const auto& rec : r.records) CHECK(std::abs(rec.accept_hat - theory::rwm_accept(1.0, rec.l, 1.0)) < 0.04);
}

TEST_CASE("Robbins-Monro update") {
  CHECK(robbins_monro_update(0.3, 0.234, 0.234, 7) == 0.3);
  CHECK(robbins_monro_update(0.0, 0.5, 0.234, 1) == doctest::Approx(0.266));
  CHECK(robbins_monro_update(0.0, 0.1, 0.234, 32) < 0.0);
}

TEST_CASE("tuning reaches the theory-optimal scale") {
  TuneSpec spec;
  spec.target = {TargetKind::normal_iid, 20};
  spec.seed = 3;
  const auto rwm = tune_scale(spec);
  CHECK(rwm.converged);
  CHECK(std::abs(rwm.l_tuned / 2.381 - 1.0) < 0.15);
  spec.kind = Algorithm::mala;
  spec.target_accept = 0.574;
  const auto mala = tune_scale(spec);
  CHECK(mala.converged);
  CHECK(std::abs(mala.l_tuned / 1.651 - 1.0) < 0.15);
  spec.budget = kMinTuneBudget - 1;
  CHECK_THROWS_WITH_AS(tune_scale(spec), doctest::Contains("budget"), InvalidParameter);
}

TEST_CASE("mixing experiment bookkeeping") {
  CHECK(expected_mean_iat(Algorithm::rwm, 1.0, 0.5, 20) ==
        doctest::Approx(4.0 * 0.5 * 400.0 / theory::optimal_l(Algorithm::rwm, 1.0, 2.0).speed));
  MixingSpec spec;
  spec.rho = 0.5;
  spec.ds = {6, 12};
  spec.steps_per_d = 300.0;
  spec.threads = 1;
  const auto r = mean_mixing_experiment(spec);
  REQUIRE(r.points.size() == 2);
  // Chain length is rounded down to a whole number of thinning intervals.
  CHECK(r.points[0].steps <= 300 * 36);
  CHECK(r.points[0].steps + r.points[0].thin > 300 * 36);
  CHECK(r.points[1].steps <= 300 * 144);
  CHECK(r.points[1].steps + r.points[1].thin > 300 * 144);
  for (const auto& p : r.points) {
    CHECK(p.iat > 0.0);
    CHECK(p.std_error > 0.0);
  }
  spec.rho = 0.0;
  CHECK_THROWS_AS(spec.validate(), InvalidParameter);
  spec.rho = 0.5;
  spec.ds = {10};
  CHECK_THROWS_AS(spec.validate(), InvalidParameter);
}

TEST_CASE("parallel_for propagates exceptions") {
  std::vector<int> out(100, 0);
  parallel_for(100, 3, [&](std::size_t i) { out[i] = static_cast<int>(i); });
  for (int i = 0; i < 100; ++i) CHECK(out[i] == i);
  CHECK_THROWS_AS(parallel_for(10, 2, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }),
                  std::runtime_error);
}

}
