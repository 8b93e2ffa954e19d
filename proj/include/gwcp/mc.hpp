#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gwcp/brw.hpp"
#include "gwcp/cp.hpp"
#include "gwcp/dist.hpp"
#include "gwcp/tree.hpp"

namespace gwcp {

enum class Process { Brw, Cp };
enum class SurvivalMode { Global, Local };

/// A batch of independent trials. Trial i draws a fresh tree and its own
/// random stream, both derived from (seed, i), so outputs are bitwise
/// reproducible under any thread count.
struct TrialPlan {
  Process process = Process::Cp;
  OffspringDistribution tree_law = OffspringDistribution::degenerate(4);
  TreeMode tree_mode = TreeMode::AGW;

  // BRW parameters
  std::optional<OffspringDistribution> reproduction;
  std::uint64_t horizon = 100;
  std::uint64_t pop_cap = 1'000'000;

  // CP parameters; `lambdas` (ascending) switches to a coupled run
  double lambda = 1.0;
  std::vector<double> lambdas;
  double t_max = 25.0;
  CpCaps cp_caps;

  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
};

struct BrwTrialRow {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  bool extinct = false;
  bool capped = false;
  std::uint64_t generations_survived = 0;
  std::uint64_t root_returns = 0;
  std::uint64_t last_root_generation = 0;
};

struct CpTrialRow {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  CpSummary summary;
};

std::vector<BrwTrialRow> run_brw_trials(const TrialPlan& plan, int threads = 0);

/// One row per (trial, lambda); coupled plans emit them in ascending lambda.
std::vector<CpTrialRow> run_cp_trials(const TrialPlan& plan, int threads = 0);

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// 95% Wilson score interval for a binomial proportion.
WilsonInterval wilson95(std::uint64_t successes, std::uint64_t n);

struct SurvivalEstimate {
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t n_trials = 0;
  std::uint64_t successes = 0;
  std::string proxy;  // the finite-horizon event this estimate actually measures
};

/// Global proxy: alive at the horizon, or population-capped, or an infection
/// attempt left the depth ball. Local proxy: process alive (or capped) at its
/// realized end AND the root occupied during the final quarter of the
/// realized span. Both are biased finite-horizon stand-ins for the limit
/// events; the proxy string travels with every estimate.
SurvivalEstimate estimate_survival(const TrialPlan& plan, SurvivalMode mode, int threads = 0);

struct ProbeResult {
  double value = 0.0;  // lambda (CP) or mu (BRW) probed
  SurvivalEstimate estimate;
};

struct BisectResult {
  double low = 0.0;
  double high = 0.0;
  std::vector<ProbeResult> probes;
};

/// Per-probe trial rows, filled only when a sink is passed to bisect_critical.
struct ProbeTrialLog {
  double value = 0.0;
  std::vector<BrwTrialRow> brw_rows;
  std::vector<CpTrialRow> cp_rows;
};

/// Empirical critical-value bracket: shrinks [lo, hi] until width <= tol
/// keeping the invariant that the lower end's survival CI reaches below
/// theta and the upper end's CI stays above it. The endpoints must separate
/// statistically to begin with (BracketNotSeparating otherwise).
/// For BRW plans the probed value is the geometric reproduction mean.
BisectResult bisect_critical(const TrialPlan& plan_template, SurvivalMode mode, double lo,
                             double hi, double tol, std::uint64_t trials_per_probe,
                             int threads = 0, double theta = 0.02,
                             std::vector<ProbeTrialLog>* trial_log = nullptr);

}  // namespace gwcp
