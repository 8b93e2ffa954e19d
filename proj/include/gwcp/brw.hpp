#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "gwcp/dist.hpp"
#include "gwcp/tree.hpp"

namespace gwcp {

/// One generation of a branching random walk. On trees every occupied vertex
/// at generation n sits at a depth with the same parity as n; the engine
/// checks this per insertion.
struct BrwState {
  std::uint64_t generation = 0;
  std::map<VertexId, std::uint64_t> occupancy;  // N_n(v), ordered for determinism
  std::uint64_t total = 0;
  bool capped = false;
};

BrwState brw_initial();

/// Reproduction (each particle replaced by k ~ rep offspring) followed by
/// dispersal (each newborn takes one uniform-neighbor step). If the new total
/// exceeds pop_cap the step still completes in full but the state is flagged.
BrwState brw_step(const BrwState& state, TreeStore& store, const OffspringDistribution& rep,
                  Rng& rng, std::uint64_t pop_cap);

struct BrwRunSummary {
  std::vector<std::uint64_t> totals;       // totals[n] for n = 0..last generation run
  std::vector<std::uint64_t> root_counts;  // N_n(root)
  bool extinct = false;
  bool capped = false;
  std::uint64_t generations_survived = 0;   // last generation with a particle
  std::uint64_t root_returns = 0;           // #{n >= 1 : N_n(root) >= 1}
  std::uint64_t last_root_generation = 0;   // largest such n (0 if none)
};

/// Runs up to `horizon` generations from one particle at the root, stopping
/// early on extinction or once the population exceeds pop_cap.
BrwRunSummary run_brw(TreeStore& store, const OffspringDistribution& rep, std::uint64_t horizon,
                      std::uint64_t pop_cap, Rng& rng);

enum class Phase { Subcritical, WeakSurvival, StrongSurvival };

const char* phase_name(Phase p);

/// Phase of a BRW with reproduction mean mu on a GW tree with minimal
/// offspring h_min: subcritical for mu <= 1, strong survival iff
/// mu * r > 1 with r the spectral radius, weak survival in between
/// (empty when h_min = 1, where r = 1).
Phase brw_phase(int f_t_h_min, double mu);

/// Offspring law of the discrete-time skeleton of the continuous-time BRW
/// with birth rate lambda and death rate 1: geometric with mean lambda.
/// lambda plays the role of mu in every phase statement.
OffspringDistribution continuous_brw_reduction(double lambda);

}  // namespace gwcp
