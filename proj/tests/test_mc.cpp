#include <cmath>

#include "doctest.h"
#include "gwcp/mc.hpp"
#include "test_util.hpp"

using namespace gwcp;
using test::thrown_code;

namespace {

TrialPlan brw_plan(double mu, std::uint64_t trials, std::uint64_t horizon, std::uint64_t cap,
                   std::uint64_t seed) {
  TrialPlan plan;
  plan.process = Process::Brw;
  plan.tree_law = OffspringDistribution::degenerate(4);
  plan.tree_mode = TreeMode::AGW;
  plan.reproduction = OffspringDistribution::geometric_from_rate(mu);
  plan.horizon = horizon;
  plan.pop_cap = cap;
  plan.trials = trials;
  plan.seed = seed;
  return plan;
}

TrialPlan cp_plan(double lambda, std::uint64_t trials, double t_max, std::uint64_t seed) {
  TrialPlan plan;
  plan.process = Process::Cp;
  plan.tree_law = OffspringDistribution::degenerate(4);
  plan.tree_mode = TreeMode::AGW;
  plan.lambda = lambda;
  plan.t_max = t_max;
  plan.trials = trials;
  plan.seed = seed;
  plan.cp_caps = CpCaps{20'000, 60};
  return plan;
}

}  // namespace

TEST_CASE("wilson interval values") {
  auto ci = wilson95(50, 100);
  CHECK(ci.low == doctest::Approx(0.403832).epsilon(1e-3));
  CHECK(ci.high == doctest::Approx(0.596168).epsilon(1e-3));
  auto zero = wilson95(0, 1000);
  CHECK(zero.low == 0.0);
  CHECK(zero.high < 0.005);
  auto full = wilson95(1000, 1000);
  CHECK(full.high == 1.0);
  CHECK(full.low > 0.995);
  CHECK(thrown_code([] { wilson95(5, 0); }) == Errc::BadInput);
  CHECK(thrown_code([] { wilson95(5, 4); }) == Errc::BadInput);
}

TEST_CASE("wilson interval coverage for Bernoulli(0.3)") {
  const int reps = 1000, n = 200;
  const double p = 0.3;
  Rng rng(1234);
  int covered = 0;
  for (int r = 0; r < reps; ++r) {
    std::uint64_t hits = 0;
    for (int i = 0; i < n; ++i)
      if (rng.uniform() < p) ++hits;
    auto ci = wilson95(hits, n);
    if (ci.low <= p && p <= ci.high) ++covered;
  }
  CHECK(covered >= 930);
}

TEST_CASE("pure-death CP estimate is near zero") {
  auto plan = cp_plan(1e-6, 1000, 20.0, 9);
  auto est = estimate_survival(plan, SurvivalMode::Global);
  CHECK(est.p_hat < 0.005);
  CHECK(est.ci_high < 0.01);
}

TEST_CASE("BRW global survival matches the extinction oracle") {
  auto plan = brw_plan(1.5, 2000, 60, 20'000, 17);
  auto est = estimate_survival(plan, SurvivalMode::Global);
  const double target = 1.0 / 3.0;  // 1 - extinction probability
  CHECK(est.ci_low <= target);
  CHECK(target <= est.ci_high);
}

TEST_CASE("global proxy tightens toward the oracle as the horizon grows") {
  const double target = 1.0 / 3.0;
  double prev = 1.0;
  for (std::uint64_t horizon : {25, 50, 100}) {
    auto est = estimate_survival(brw_plan(1.5, 1500, horizon, 20'000, 23),
                                 SurvivalMode::Global);
    // longer horizons can only remove doomed lines from the proxy
    CHECK(est.p_hat <= prev + 0.02);
    prev = est.p_hat;
    CHECK(est.p_hat >= target - 0.05);
  }
  CHECK(std::abs(prev - target) < 0.05);
}

TEST_CASE("estimates are bitwise identical across thread counts") {
  auto plan = cp_plan(1.4, 400, 10.0, 31);
  auto rows1 = run_cp_trials(plan, 1);
  auto rows2 = run_cp_trials(plan, 2);
  REQUIRE(rows1.size() == rows2.size());
  for (std::size_t i = 0; i < rows1.size(); ++i) {
    CHECK(rows1[i].seed == rows2[i].seed);
    CHECK(rows1[i].summary.t_end == rows2[i].summary.t_end);
    CHECK(rows1[i].summary.births == rows2[i].summary.births);
    CHECK(rows1[i].summary.suppressed_births == rows2[i].summary.suppressed_births);
    CHECK(rows1[i].summary.last_root_time == rows2[i].summary.last_root_time);
  }

  auto bplan = brw_plan(1.3, 400, 40, 10'000, 37);
  auto b1 = run_brw_trials(bplan, 1);
  auto b2 = run_brw_trials(bplan, 2);
  REQUIRE(b1.size() == b2.size());
  for (std::size_t i = 0; i < b1.size(); ++i) {
    CHECK(b1[i].generations_survived == b2[i].generations_survived);
    CHECK(b1[i].root_returns == b2[i].root_returns);
    CHECK(b1[i].extinct == b2[i].extinct);
  }

  auto e1 = estimate_survival(plan, SurvivalMode::Local, 1);
  auto e2 = estimate_survival(plan, SurvivalMode::Local, 2);
  CHECK(e1.successes == e2.successes);
  CHECK(e1.p_hat == e2.p_hat);
}

TEST_CASE("coupled survival estimates are monotone with shared seeds") {
  TrialPlan plan = cp_plan(1.0, 300, 12.0, 41);
  plan.lambdas = {1.0, 1.5, 2.0};
  auto rows = run_cp_trials(plan);
  REQUIRE(rows.size() == 300 * 3);
  for (std::size_t t = 0; t < 300; ++t) {
    bool prev = false;
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& s = rows[t * 3 + j].summary;
      const bool alive = !s.died_out || s.capped || s.frontier_exit;
      if (j > 0) CHECK(prev <= alive);
      prev = alive;
    }
  }
}

TEST_CASE("bisect input validation") {
  auto plan = cp_plan(1.0, 100, 10.0, 3);
  CHECK(thrown_code([&] {
          bisect_critical(plan, SurvivalMode::Global, 1.2, 1.2, 0.1, 100);
        }) == Errc::BracketNotSeparating);
  // both endpoints deep in the supercritical phase cannot separate
  CHECK(thrown_code([&] {
          bisect_critical(plan, SurvivalMode::Global, 4.0, 6.0, 0.5, 200);
        }) == Errc::BracketNotSeparating);
  CHECK(thrown_code([&] {
          bisect_critical(plan, SurvivalMode::Global, 0.8, 2.5, 0.0, 100);
        }) == Errc::BadInput);
}

TEST_SUITE("slow") {

TEST_CASE("CP global bisection lands below 1.7") {
  auto plan = cp_plan(1.0, 600, 25.0, 47);
  auto res = bisect_critical(plan, SurvivalMode::Global, 0.8, 2.5, 0.1, 600);
  CHECK(res.high <= 1.7);
  CHECK(res.low >= 0.8);
  CHECK(res.high - res.low <= 0.1 + 1e-12);
  for (const auto& p : res.probes) CHECK(p.estimate.n_trials == 600);
}

TEST_CASE("BRW local bisection brackets the strong-survival threshold") {
  auto plan = brw_plan(1.0, 800, 120, 100'000, 53);
  auto res = bisect_critical(plan, SurvivalMode::Local, 1.1, 1.5, 0.1, 800);
  // threshold (h+1)/(2*sqrt(h)) = 1.25 at h = 4; finite-horizon tolerance 0.1
  CHECK(res.low <= 1.35);
  CHECK(res.high >= 1.15);
}

}  // TEST_SUITE("slow")
