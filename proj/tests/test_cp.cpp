#include <cmath>
#include <queue>
#include <unordered_set>
#include <vector>

#include "doctest.h"
#include "gwcp/cp.hpp"
#include "test_util.hpp"

using namespace gwcp;
using test::thrown_code;

namespace {

TreeStore make_tree(std::uint64_t seed, int d = 4) {
  return TreeStore(OffspringDistribution::degenerate(d), TreeMode::AGW, seed);
}

}  // namespace

TEST_CASE("input validation") {
  auto store = make_tree(1);
  Rng rng(1);
  CHECK(thrown_code([&] { run_cp(store, 0.0, 10.0, rng); }) == Errc::BadInput);
  CHECK(thrown_code([&] { run_cp(store, 1.0, 0.0, rng); }) == Errc::BadInput);
  CHECK(thrown_code([&] { run_cp_coupled(store, {1.5, 1.0}, 10.0, rng); }) == Errc::BadInput);
  CHECK(thrown_code([&] { run_cp_coupled(store, {}, 10.0, rng); }) == Errc::BadInput);
}

TEST_CASE("pure-death limit has unit mean lifetime") {
  const int trials = 100'000;
  double sum = 0.0;
  for (int i = 0; i < trials; ++i) {
    auto store = make_tree(derive_stream(11, i));
    Rng rng(derive_stream(12, i));
    auto s = run_cp(store, 1e-6, 50.0, rng);
    CHECK(s.died_out);
    sum += s.t_end;
  }
  // exp(1) lifetime: sd of the mean is 1/sqrt(trials)
  CHECK(std::abs(sum / trials - 1.0) < 3.0 / std::sqrt(double(trials)));
}

TEST_CASE("summary counters are consistent") {
  for (int i = 0; i < 200; ++i) {
    auto store = make_tree(derive_stream(21, i));
    Rng rng(derive_stream(22, i));
    auto s = run_cp(store, 1.3, 8.0, rng, CpCaps{2000, 30});
    CHECK(s.births + 1 >= s.deaths);  // +1 for the initial root infection
    if (s.died_out) CHECK(s.births + 1 == s.deaths);
    CHECK(s.max_infected >= 1);
    CHECK(s.last_root_time <= s.t_end);
    CHECK(s.frontier_exit == (s.frontier_exits > 0));
    if (s.died_out) CHECK(s.t_end <= 8.0);
  }
}

TEST_CASE("trajectory replays to the same final state") {
  auto store = make_tree(31);
  Rng rng(31);
  CpTrajectory traj;
  auto s = run_cp(store, 1.5, 6.0, rng, CpCaps{5000, 40}, &traj);
  REQUIRE(!traj.empty());
  CHECK(traj.front().t == 0.0);
  CHECK(traj.front().v == store.root());
  CHECK(traj.front().infection);
  std::unordered_set<VertexId> infected;
  double prev_t = -1.0;
  for (const auto& e : traj) {
    CHECK(e.t >= prev_t);
    prev_t = e.t;
    if (e.infection) {
      CHECK(infected.insert(e.v).second);  // exclusion: no double-infection events
    } else {
      CHECK(infected.erase(e.v) == 1);
    }
  }
  CHECK(infected.empty() == s.died_out);
}

TEST_CASE("coupled runs are nested and degenerate coupling is an identity") {
  for (int i = 0; i < 100; ++i) {
    auto store = make_tree(derive_stream(41, i));
    Rng rng(derive_stream(42, i));
    auto res = run_cp_coupled(store, {1.0, 1.5}, 8.0, rng, CpCaps{3000, 40});
    REQUIRE(res.size() == 2);
    CHECK(res[0].max_infected <= res[1].max_infected);
    CHECK(res[0].births <= res[1].births);
    if (!res[0].died_out && !res[1].capped) CHECK_FALSE(res[1].died_out);
  }

  // identical rates, one stream: identical summaries
  auto store = make_tree(43);
  Rng rng(43);
  auto res = run_cp_coupled(store, {1.4, 1.4}, 8.0, rng, CpCaps{3000, 40});
  CHECK(res[0].births == res[1].births);
  CHECK(res[0].deaths == res[1].deaths);
  CHECK(res[0].t_end == res[1].t_end);
  CHECK(res[0].died_out == res[1].died_out);
  CHECK(res[0].root_reinfections == res[1].root_reinfections);
}

TEST_CASE("single run equals the one-level coupled run") {
  auto store_a = make_tree(51);
  auto store_b = make_tree(51);
  Rng rng_a(51), rng_b(51);
  auto one = run_cp(store_a, 1.5, 6.0, rng_a, CpCaps{2000, 40});
  auto coupled = run_cp_coupled(store_b, {1.5}, 6.0, rng_b, CpCaps{2000, 40});
  CHECK(one.births == coupled[0].births);
  CHECK(one.deaths == coupled[0].deaths);
  CHECK(one.t_end == coupled[0].t_end);
  CHECK(one.suppressed_births == coupled[0].suppressed_births);
}

TEST_CASE("survival proxy is pathwise monotone across coupled rates") {
  int survived_low = 0, survived_high = 0;
  for (int i = 0; i < 300; ++i) {
    auto store = make_tree(derive_stream(61, i));
    Rng rng(derive_stream(62, i));
    auto res = run_cp_coupled(store, {1.0, 1.6, 2.2}, 10.0, rng, CpCaps{2000, 40});
    std::vector<bool> alive;
    for (const auto& s : res)
      alive.push_back(!s.died_out || s.capped || s.frontier_exit);
    for (std::size_t j = 1; j < alive.size(); ++j) CHECK(alive[j - 1] <= alive[j]);
    survived_low += alive.front();
    survived_high += alive.back();
  }
  CHECK(survived_low <= survived_high);
}

TEST_CASE("weight of small configurations") {
  Certificate cert{0.3, 0.437, 0.256, 0.256 * 0.437, 1e-4, 4};

  auto store = make_tree(71);
  CpTrajectory traj{{0.0, store.root(), true}};
  auto w = weight_process(store, traj, cert);
  REQUIRE(w.size() == 1);
  CHECK(w[0].value == doctest::Approx(1.0).epsilon(1e-12));  // lone root, parent healthy

  // root plus one ordinary child: 1 + r*(1-b)
  VertexId child = store.children(store.root()).first;  // not the attachment
  CpTrajectory traj2{{0.0, store.root(), true}, {0.5, child, true}};
  auto w2 = weight_process(store, traj2, cert);
  REQUIRE(w2.size() == 2);
  CHECK(w2[1].value == doctest::Approx(1.0 + cert.r * (1.0 - cert.b)).epsilon(1e-12));

  // the attachment instead: it acts as the root's parent, so both see theta1=1
  VertexId attach = store.agw_root_attachment();
  CpTrajectory traj3{{0.0, store.root(), true}, {0.5, attach, true}};
  auto w3 = weight_process(store, traj3, cert);
  CHECK(w3[1].value ==
        doctest::Approx((1.0 - cert.b) + cert.r * (1.0 - cert.b)).epsilon(1e-12));

  Certificate bad = cert;
  bad.r = 1.5;
  CHECK(thrown_code([&] { weight_process(store, traj, bad); }) == Errc::BadCertificate);
}

TEST_CASE("certified weight is a supermartingale in the mean") {
  // At the certified rate the expected weight decays; compare W at t=2 vs t=6
  // by paired samples along each trajectory.
  Certificate cert{0.3, 0.437, 0.256, 0.256 * 0.437, 1e-4, 4};
  const double lambda = cert.lambda();  // 1.5
  const int trials = 2000;
  double sum_early = 0.0, sum_late = 0.0, sumsq_diff = 0.0;
  for (int i = 0; i < trials; ++i) {
    auto store = make_tree(derive_stream(81, i));
    Rng rng(derive_stream(82, i));
    CpTrajectory traj;
    run_cp(store, lambda, 6.0, rng, CpCaps{5000, 40}, &traj);
    auto samples = weight_process(store, traj, cert);
    auto value_at = [&](double t) {
      double w = samples.empty() ? 0.0 : samples.front().value;
      for (const auto& s : samples) {
        if (s.t > t) break;
        w = s.value;
      }
      return w;
    };
    const double early = value_at(2.0);
    const double late = value_at(6.0);
    sum_early += early;
    sum_late += late;
    const double d = late - early;
    sumsq_diff += d * d;
  }
  const double mean_diff = (sum_late - sum_early) / trials;
  const double var = sumsq_diff / trials - mean_diff * mean_diff;
  const double se = std::sqrt(var / trials);
  CHECK(mean_diff < 3.0 * se);  // decays (or at least cannot increase)
  CHECK(sum_late < sum_early);
}

TEST_CASE("unit rate dies out as the horizon grows") {
  // the continuous-time BRW with rate 1 is critical, and exclusion only hurts
  auto alive_fraction = [](double t_max, std::uint64_t tag) {
    const int trials = 500;
    int alive = 0;
    for (int i = 0; i < trials; ++i) {
      auto store = make_tree(derive_stream(tag, i));
      Rng rng(derive_stream(tag + 1, i));
      auto s = run_cp(store, 1.0, t_max, rng, CpCaps{10'000, 50});
      if (!s.died_out || s.capped || s.frontier_exit) ++alive;
    }
    return alive / 500.0;
  };
  const double at10 = alive_fraction(10.0, 120);
  const double at20 = alive_fraction(20.0, 120);
  const double at40 = alive_fraction(40.0, 120);
  CHECK(at20 <= at10 + 0.02);
  CHECK(at40 <= at20 + 0.02);
  CHECK(at40 <= 0.02);
}

TEST_CASE("reinfection epochs stabilize below the certified local bound") {
  // lambda = 1.3 < 1.50, so the root is vacated; doubling the horizon must
  // not keep adding reinfection epochs (paired seeds).
  const int trials = 800;
  auto epochs = [&](double t_max, int i) {
    auto store = make_tree(derive_stream(130, i));
    Rng rng(derive_stream(131, i));
    return static_cast<double>(
        run_cp(store, 1.3, t_max, rng, CpCaps{10'000, 50}).root_reinfections);
  };
  double mean = 0.0, var = 0.0;
  std::vector<double> diffs(trials);
  for (int i = 0; i < trials; ++i) {
    diffs[i] = epochs(30.0, i) - epochs(15.0, i);
    mean += diffs[i];
  }
  mean /= trials;
  for (int i = 0; i < trials; ++i) var += (diffs[i] - mean) * (diffs[i] - mean);
  var /= trials;
  CHECK(mean <= 3.0 * std::sqrt(var / trials) + 1e-9);
}

TEST_CASE("local survival statistics") {
  std::vector<CpSummary> summaries;
  for (int i = 0; i < 50; ++i) {
    auto store = make_tree(derive_stream(91, i));
    Rng rng(derive_stream(92, i));
    summaries.push_back(run_cp(store, 1.2, 5.0, rng, CpCaps{2000, 40}));
  }
  auto stat = local_survival_stat(summaries);
  CHECK(stat.last_root_times.size() == summaries.size());
  CHECK(stat.reinfection_counts.size() == summaries.size());
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    CHECK(stat.last_root_times[i] <= summaries[i].t_end);
    CHECK(stat.reinfection_counts[i] <= stat.max_reinfections);
  }
}

// Paired continuous-time BRW that carries the CP as a thinning: every CP
// particle is matched to a live BRW particle, so the infected-vertex count
// can never exceed the BRW population.
TEST_CASE("BRW dominates CP under shared randomness") {
  struct Particle {
    VertexId v;
    bool matched;  // carries a CP infection
  };
  for (int trial = 0; trial < 200; ++trial) {
    auto store = make_tree(derive_stream(101, trial));
    Rng rng(derive_stream(102, trial));
    const double lambda = 1.3;
    std::vector<Particle> brw{{store.root(), true}};
    std::unordered_set<VertexId> cp{store.root()};
    double t = 0.0;
    while (!brw.empty() && t < 4.0 && brw.size() < 4000) {
      t += rng.exponential(brw.size() * (1.0 + lambda));
      const std::size_t idx = rng.below(brw.size());
      const bool death = rng.uniform() < 1.0 / (1.0 + lambda);
      if (death) {
        if (brw[idx].matched) CHECK(cp.erase(brw[idx].v) == 1);
        brw[idx] = brw.back();
        brw.pop_back();
      } else {
        VertexId target = store.uniform_neighbor(brw[idx].v, rng);
        bool matched = false;
        if (brw[idx].matched && !cp.count(target)) {
          cp.insert(target);
          matched = true;
        }
        brw.push_back({target, matched});
      }
      CHECK(cp.size() <= brw.size());
    }
    if (brw.empty()) CHECK(cp.empty());
  }
}
