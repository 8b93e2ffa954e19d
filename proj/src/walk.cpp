#include "gwcp/walk.hpp"

#include <cmath>

#include "gwcp/error.hpp"

namespace gwcp {

double spectral_radius_formula(int h_min) {
  if (h_min < 1) raise(Errc::BadInput, "h_min must be >= 1");
  if (h_min == 1) return 1.0;
  return 2.0 * std::sqrt(static_cast<double>(h_min)) / (h_min + 1.0);
}

std::vector<double> distance_distribution(const DistanceChain& chain, int n) {
  if (chain.d < 1) raise(Errc::BadInput, "branching number d must be >= 1");
  if (n < 0 || n > 10'000) raise(Errc::BadInput, "step count must lie in [0, 1e4]");
  const int top = n / 2 + 1;
  const double p_down = 1.0 / (chain.d + 1.0);
  const double p_up = 1.0 - p_down;
  std::vector<double> cur(static_cast<std::size_t>(top) + 1, 0.0);
  std::vector<double> next(cur.size(), 0.0);
  cur[0] = 1.0;
  for (int step = 0; step < n; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    next[1] += cur[0];
    for (int j = 1; j < top; ++j) {
      next[j - 1] += cur[j] * p_down;
      next[j + 1] += cur[j] * p_up;
    }
    next[top] += cur[top];  // absorbing: mass this far out cannot return by n
    cur.swap(next);
  }
  return cur;
}

double return_probability_dp(const DistanceChain& chain, int n) {
  if (n % 2 != 0) raise(Errc::OddStep, "return probability is 0 at odd steps");
  return distance_distribution(chain, n)[0];
}

double spectral_radius_dp_estimate(const DistanceChain& chain, int n_max) {
  if (n_max < 100) raise(Errc::BadInput, "n_max must be >= 100");
  double p = return_probability_dp(chain, n_max);
  return std::pow(p, 1.0 / n_max);
}

VertexId srw_step(TreeStore& store, VertexId v, Rng& rng) {
  return store.uniform_neighbor(v, rng);
}

}  // namespace gwcp
