#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "gwcp/rng.hpp"

namespace gwcp {

/// Offspring law on {0,1,2,...} with finite support. Serves both as a tree law
/// F_T (must put no mass on 0) and as a particle reproduction law F_R (mass on
/// 0 allowed); `allows_zero()` tells which capability a given instance has.
/// Immutable after construction and safe to share across threads.
class OffspringDistribution {
 public:
  /// Tree-law constructor: keys >= 1, values must sum to 1 within 1e-12.
  /// Any entry for k=0 is rejected (ZeroMass), a nonzero-mass law on {1,2,...}
  /// is the standing assumption behind every tree-side result here.
  static OffspringDistribution from_map(const std::map<int, double>& probs);

  /// Point mass at d (tree law).
  static OffspringDistribution degenerate(int d);

  /// Geometric reproduction law with mean lambda: p_k = (l/(1+l))^k / (1+l),
  /// truncated once the tail mass drops below 1e-12 and renormalized.
  /// Has p_0 > 0, hence usable only as a reproduction law, never as a tree law.
  static OffspringDistribution geometric_from_rate(double lambda);

  int h_min() const noexcept { return h_min_; }
  double mean() const noexcept { return mean_; }
  bool allows_zero() const noexcept { return allows_zero_; }

  std::size_t support_size() const noexcept { return ks_.size(); }
  const std::vector<int>& support() const noexcept { return ks_; }
  const std::vector<double>& probabilities() const noexcept { return ps_; }
  double prob_at(int k) const;

  /// Probability generating function E s^K for s in [0,1].
  double pgf(double s) const;

  /// Smallest fixed point of the PGF in [0,1]: 1 exactly when mean <= 1,
  /// otherwise found by fixed-point iteration from 0 to tolerance 1e-12.
  double extinction_probability() const;

  int sample(Rng& rng) const { return sample_from_unit(rng.uniform()); }

  /// Inverse-CDF lookup; the tree store feeds counter-hash units through this.
  int sample_from_unit(double u) const;

 private:
  OffspringDistribution() = default;
  void finalize(bool allows_zero);

  std::vector<int> ks_;       // ascending support
  std::vector<double> ps_;    // normalized probabilities
  std::vector<double> cdf_;   // inclusive prefix sums, back() == 1
  int h_min_ = 0;
  double mean_ = 0.0;
  bool allows_zero_ = false;
  bool contiguous_ = false;   // support is k0, k0+1, ..., k0+m
};

}  // namespace gwcp
