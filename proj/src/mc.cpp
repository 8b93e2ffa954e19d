#include "gwcp/mc.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "gwcp/error.hpp"

namespace gwcp {

namespace {

constexpr std::uint64_t kTreeStream = 1;
constexpr std::uint64_t kProcessStream = 2;

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Index-addressed parallel map: slot i is written by whichever worker claims
// trial i, so the assembled vector is independent of scheduling. Each worker
// keeps one TreeStore and resets it per trial, which avoids remapping
// hundreds of megabytes of node storage on population-capped runs.
template <typename Fn>
void parallel_trials(const TrialPlan& plan, int threads, Fn&& fn) {
  threads = resolve_threads(threads);
  const std::uint64_t trials = plan.trials;
  auto worker_loop = [&](auto claim) {
    TreeStore store(plan.tree_law, plan.tree_mode, 0);
    for (;;) {
      std::uint64_t i = claim();
      if (i >= trials) return;
      const std::uint64_t trial_seed = derive_stream(plan.seed, i);
      store.reset(derive_stream(trial_seed, kTreeStream));
      Rng rng(derive_stream(trial_seed, kProcessStream));
      fn(i, trial_seed, store, rng);
    }
  };
  if (threads == 1 || trials < 2) {
    std::uint64_t serial = 0;
    worker_loop([&] { return serial++; });
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] { worker_loop([&] { return next.fetch_add(1); }); });
  for (auto& th : pool) th.join();
}

bool brw_global_proxy(const BrwTrialRow& row) { return !row.extinct || row.capped; }

bool brw_local_proxy(const BrwTrialRow& row) {
  if (row.extinct) return false;
  const std::uint64_t span = row.generations_survived;
  if (span == 0) return false;
  const std::uint64_t window_start = span - span / 4;
  return row.last_root_generation >= window_start;
}

bool cp_global_proxy(const CpSummary& s) { return !s.died_out || s.capped || s.frontier_exit; }

bool cp_local_proxy(const CpSummary& s) {
  if (s.died_out) return false;
  return s.last_root_time >= 0.75 * s.t_end;
}

}  // namespace

std::vector<BrwTrialRow> run_brw_trials(const TrialPlan& plan, int threads) {
  if (plan.trials < 1) raise(Errc::BadInput, "trials must be >= 1");
  if (!plan.reproduction) raise(Errc::BadInput, "BRW plan needs a reproduction law");
  std::vector<BrwTrialRow> rows(plan.trials);
  parallel_trials(plan, threads,
                  [&](std::uint64_t i, std::uint64_t trial_seed, TreeStore& store, Rng& rng) {
                    BrwRunSummary s =
                        run_brw(store, *plan.reproduction, plan.horizon, plan.pop_cap, rng);
                    rows[i] = BrwTrialRow{i,
                                          trial_seed,
                                          s.extinct,
                                          s.capped,
                                          s.generations_survived,
                                          s.root_returns,
                                          s.last_root_generation};
                  });
  return rows;
}

std::vector<CpTrialRow> run_cp_trials(const TrialPlan& plan, int threads) {
  if (plan.trials < 1) raise(Errc::BadInput, "trials must be >= 1");
  const bool coupled = !plan.lambdas.empty();
  const std::size_t per_trial = coupled ? plan.lambdas.size() : 1;
  std::vector<CpTrialRow> rows(plan.trials * per_trial);
  parallel_trials(plan, threads,
                  [&](std::uint64_t i, std::uint64_t trial_seed, TreeStore& store, Rng& rng) {
                    if (coupled) {
                      auto summaries =
                          run_cp_coupled(store, plan.lambdas, plan.t_max, rng, plan.cp_caps);
                      for (std::size_t j = 0; j < summaries.size(); ++j)
                        rows[i * per_trial + j] = CpTrialRow{i, trial_seed, summaries[j]};
                    } else {
                      CpSummary s = run_cp(store, plan.lambda, plan.t_max, rng, plan.cp_caps);
                      rows[i] = CpTrialRow{i, trial_seed, s};
                    }
                  });
  return rows;
}

WilsonInterval wilson95(std::uint64_t successes, std::uint64_t n) {
  if (n == 0) raise(Errc::BadInput, "Wilson interval needs n >= 1");
  if (successes > n) raise(Errc::BadInput, "successes must be <= n");
  constexpr double z = 1.959963984540054;  // 97.5% normal quantile
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  WilsonInterval out{std::max(0.0, center - half), std::min(1.0, center + half)};
  // the score bound is exact at the extremes; keep it free of rounding dust
  if (successes == 0) out.low = 0.0;
  if (successes == n) out.high = 1.0;
  return out;
}

namespace {

SurvivalEstimate finalize_estimate(std::uint64_t hits, std::uint64_t n, std::string proxy) {
  SurvivalEstimate out;
  out.n_trials = n;
  out.successes = hits;
  out.p_hat = static_cast<double>(hits) / static_cast<double>(n);
  WilsonInterval ci = wilson95(hits, n);
  out.ci_low = ci.low;
  out.ci_high = ci.high;
  out.proxy = std::move(proxy);
  return out;
}

SurvivalEstimate estimate_from_rows(const std::vector<BrwTrialRow>& rows, SurvivalMode mode) {
  std::uint64_t hits = 0;
  for (const auto& r : rows)
    hits += (mode == SurvivalMode::Global ? brw_global_proxy(r) : brw_local_proxy(r)) ? 1 : 0;
  return finalize_estimate(
      hits, rows.size(),
      mode == SurvivalMode::Global
          ? "alive at horizon OR population cap reached"
          : "alive at realized end AND root occupied in its final quarter");
}

SurvivalEstimate estimate_from_rows(const std::vector<CpTrialRow>& rows, SurvivalMode mode) {
  std::uint64_t hits = 0;
  for (const auto& r : rows)
    hits +=
        (mode == SurvivalMode::Global ? cp_global_proxy(r.summary) : cp_local_proxy(r.summary))
            ? 1
            : 0;
  return finalize_estimate(
      hits, rows.size(),
      mode == SurvivalMode::Global
          ? "alive at t_max OR capped OR frontier exit"
          : "alive at realized end AND root occupied in its final quarter");
}

}  // namespace

SurvivalEstimate estimate_survival(const TrialPlan& plan, SurvivalMode mode, int threads) {
  if (plan.process == Process::Brw) return estimate_from_rows(run_brw_trials(plan, threads), mode);
  if (!plan.lambdas.empty())
    raise(Errc::BadInput, "estimate_survival expects a single-lambda CP plan");
  return estimate_from_rows(run_cp_trials(plan, threads), mode);
}

namespace {

TrialPlan probe_plan(const TrialPlan& tmpl, double value, std::uint64_t trials,
                     std::uint64_t probe_index) {
  TrialPlan plan = tmpl;
  plan.trials = trials;
  plan.lambdas.clear();
  // Fresh seed space per probe; probes are adaptive, so they must not share
  // streams with each other.
  plan.seed = derive_stream(tmpl.seed, 0xB15EC7 + probe_index);
  if (plan.process == Process::Cp) {
    plan.lambda = value;
  } else {
    plan.reproduction = OffspringDistribution::geometric_from_rate(value);
  }
  return plan;
}

}  // namespace

BisectResult bisect_critical(const TrialPlan& plan_template, SurvivalMode mode, double lo,
                             double hi, double tol, std::uint64_t trials_per_probe, int threads,
                             double theta, std::vector<ProbeTrialLog>* trial_log) {
  if (!(lo < hi)) raise(Errc::BracketNotSeparating, "bracket must satisfy lo < hi");
  if (!(tol > 0.0)) raise(Errc::BadInput, "tol must be > 0");
  if (trials_per_probe < 10) raise(Errc::BadInput, "trials_per_probe must be >= 10");

  BisectResult out;
  std::uint64_t probe_index = 0;
  auto run_probe = [&](double value) -> SurvivalEstimate {
    TrialPlan plan = probe_plan(plan_template, value, trials_per_probe, probe_index++);
    SurvivalEstimate e;
    if (plan.process == Process::Brw) {
      auto rows = run_brw_trials(plan, threads);
      e = estimate_from_rows(rows, mode);
      if (trial_log) trial_log->push_back(ProbeTrialLog{value, std::move(rows), {}});
    } else {
      auto rows = run_cp_trials(plan, threads);
      e = estimate_from_rows(rows, mode);
      if (trial_log) trial_log->push_back(ProbeTrialLog{value, {}, std::move(rows)});
    }
    out.probes.push_back(ProbeResult{value, e});
    return e;
  };

  const SurvivalEstimate at_lo = run_probe(lo);
  const SurvivalEstimate at_hi = run_probe(hi);
  const bool lo_dead = at_lo.ci_low <= theta;   // CI admits "essentially zero survival"
  const bool hi_alive = at_hi.ci_low > theta;   // CI excludes it
  if (!lo_dead || !hi_alive)
    raise(Errc::BracketNotSeparating,
          "endpoint estimates do not separate at theta=" + std::to_string(theta) +
              "; widen the bracket or raise trials_per_probe");

  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const SurvivalEstimate e = run_probe(mid);
    if (e.ci_low > theta)
      hi = mid;
    else
      lo = mid;
  }
  out.low = lo;
  out.high = hi;
  return out;
}

}  // namespace gwcp
