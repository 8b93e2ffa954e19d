#pragma once

#include <vector>

#include "gwcp/tree.hpp"

namespace gwcp {

/// Distance-from-root process of SRW on the (d+1)-regular tree: from the root
/// every move increases the distance; elsewhere the walk steps down with
/// probability 1/(d+1) and up with probability d/(d+1).
struct DistanceChain {
  int d = 1;
};

/// Almost-sure spectral radius of SRW on a GW tree with minimal offspring
/// h_min: 1 when h_min = 1, else 2*sqrt(h_min)/(h_min+1).
double spectral_radius_formula(int h_min);

/// Exact distribution of the distance after n steps, states 0..n/2+1. Mass
/// beyond n/2+1 can never return to the root by step n, so the top state is
/// absorbing and the vector always sums to 1.
std::vector<double> distance_distribution(const DistanceChain& chain, int n);

/// Exact P(SRW_n = root) on the (d+1)-regular tree; O(n^2). Requires n even
/// (OddStep otherwise — at odd times the root carries mass exactly 0).
double return_probability_dp(const DistanceChain& chain, int n);

/// return_probability_dp(n_max)^(1/n_max); n_max must be even and >= 100.
double spectral_radius_dp_estimate(const DistanceChain& chain, int n_max);

/// One uniform-neighbor step on the tree, forcing exploration as needed.
VertexId srw_step(TreeStore& store, VertexId v, Rng& rng);

}  // namespace gwcp
