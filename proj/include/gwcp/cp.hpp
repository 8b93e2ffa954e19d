#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gwcp/bounds.hpp"
#include "gwcp/tree.hpp"

namespace gwcp {

struct CpCaps {
  std::uint64_t max_infected = 1'000'000;  // freeze a level beyond this size
  std::uint32_t depth_cap = 60;            // births past this depth count as frontier exits
};

struct CpSummary {
  double lambda = 0.0;
  bool died_out = false;
  double t_end = 0.0;             // extinction time, else the stop time
  std::uint64_t max_infected = 1;
  std::uint64_t root_reinfections = 0;  // root re-entries at t > 0
  double last_root_time = 0.0;          // end of the last root-occupation interval
  std::uint64_t births = 0;
  std::uint64_t deaths = 0;
  std::uint64_t suppressed_births = 0;  // attempts onto occupied vertices
  std::uint64_t frontier_exits = 0;     // attempts past depth_cap
  bool frontier_exit = false;
  bool capped = false;
};

struct CpEvent {
  double t;
  VertexId v;
  bool infection;  // false = recovery
};
using CpTrajectory = std::vector<CpEvent>;

/// Event-driven contact process from an infected root: each infected vertex
/// carries an exp(1) death clock and an exp(lambda) birth clock whose firing
/// picks a uniform neighbor; births onto infected vertices are suppressed.
/// Optionally records the jump chain.
CpSummary run_cp(TreeStore& store, double lambda, double t_max, Rng& rng, const CpCaps& caps = {},
                 CpTrajectory* trajectory = nullptr);

/// All rates simulated off one shared graphical sample: birth marks fire at
/// rate max(lambdas) and carry a uniform thinning label, so the active-mark
/// sets (and hence the infected sets) are nested in lambda. Nestedness is
/// asserted at every event; a violation throws CouplingViolation. A level
/// that exceeds max_infected is frozen in place while smaller rates keep
/// running. lambdas must be ascending and positive.
std::vector<CpSummary> run_cp_coupled(TreeStore& store, const std::vector<double>& lambdas,
                                      double t_max, Rng& rng, const CpCaps& caps = {});

struct LocalSurvivalStat {
  std::vector<double> last_root_times;
  std::vector<std::uint64_t> reinfection_counts;
  double mean_last_root_time = 0.0;
  double mean_reinfections = 0.0;
  std::uint64_t max_reinfections = 0;
};

LocalSurvivalStat local_survival_stat(std::span<const CpSummary> summaries);

struct WeightSample {
  double t;
  double value;
};

/// W(xi) = sum over infected v of r^depth(v) * (1 - b*[parent of v infected]),
/// evaluated along a recorded jump chain. For the root the augmentation
/// subtree's top vertex stands in as the parent (AGW); a GW root has none.
std::vector<WeightSample> weight_process(TreeStore& store, const CpTrajectory& trajectory,
                                         const Certificate& cert);

}  // namespace gwcp
