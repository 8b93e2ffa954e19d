#include "gwcp/dist.hpp"

#include <algorithm>
#include <cmath>

#include "gwcp/error.hpp"

namespace gwcp {

namespace {
constexpr double kNormTol = 1e-12;
constexpr double kGeomTailMass = 1e-12;
constexpr double kFixedPointTol = 1e-12;
}  // namespace

void OffspringDistribution::finalize(bool allows_zero) {
  allows_zero_ = allows_zero;
  h_min_ = ks_.front();
  mean_ = 0.0;
  cdf_.resize(ps_.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < ks_.size(); ++i) {
    mean_ += static_cast<double>(ks_[i]) * ps_[i];
    cum += ps_[i];
    cdf_[i] = cum;
  }
  cdf_.back() = 1.0;  // exact top so sample_from_unit(u<1) always lands
  contiguous_ = true;
  for (std::size_t i = 1; i < ks_.size(); ++i)
    if (ks_[i] != ks_[i - 1] + 1) { contiguous_ = false; break; }
}

OffspringDistribution OffspringDistribution::from_map(const std::map<int, double>& probs) {
  OffspringDistribution d;
  double sum = 0.0;
  for (const auto& [k, p] : probs) {
    if (k == 0) raise(Errc::ZeroMass, "tree laws must place no mass on 0 offspring");
    if (k < 0) raise(Errc::BadInput, "offspring counts must be nonnegative");
    if (!(p >= 0.0) || !std::isfinite(p))
      raise(Errc::NotNormalized, "probabilities must be finite and >= 0");
    if (p == 0.0) continue;
    d.ks_.push_back(k);
    d.ps_.push_back(p);
    sum += p;
  }
  if (d.ks_.empty()) raise(Errc::EmptySupport, "no offspring count has positive probability");
  if (std::abs(sum - 1.0) > kNormTol)
    raise(Errc::NotNormalized, "probabilities sum to " + std::to_string(sum));
  for (double& p : d.ps_) p /= sum;
  d.finalize(/*allows_zero=*/false);
  return d;
}

OffspringDistribution OffspringDistribution::degenerate(int d) {
  return from_map({{d, 1.0}});
}

OffspringDistribution OffspringDistribution::geometric_from_rate(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    raise(Errc::NonPositiveRate, "geometric law needs rate > 0");
  OffspringDistribution d;
  const double ratio = lambda / (1.0 + lambda);
  double p = 1.0 / (1.0 + lambda);  // p_0
  double cum = 0.0;
  for (int k = 0;; ++k) {
    d.ks_.push_back(k);
    d.ps_.push_back(p);
    cum += p;
    if (1.0 - cum < kGeomTailMass) break;
    p *= ratio;
  }
  for (double& q : d.ps_) q /= cum;
  d.finalize(/*allows_zero=*/true);
  return d;
}

double OffspringDistribution::prob_at(int k) const {
  auto it = std::lower_bound(ks_.begin(), ks_.end(), k);
  if (it == ks_.end() || *it != k) return 0.0;
  return ps_[static_cast<std::size_t>(it - ks_.begin())];
}

double OffspringDistribution::pgf(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) raise(Errc::OutOfDomain, "pgf argument must lie in [0,1]");
  if (contiguous_) {
    // Horner over the contiguous block, then shift by s^k0.
    double acc = 0.0;
    for (std::size_t i = ps_.size(); i-- > 0;) acc = acc * s + ps_[i];
    return acc * std::pow(s, ks_.front());
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < ks_.size(); ++i) acc += ps_[i] * std::pow(s, ks_[i]);
  return acc;
}

double OffspringDistribution::extinction_probability() const {
  if (mean_ <= 1.0) return 1.0;
  // Monotone iteration s <- pgf(s) from 0 converges to the smallest fixed
  // point for any PGF; contraction rate is pgf'(s*), so laws very close to
  // critical take ~ 27/(mean-1) rounds. The cap covers mean-1 >= 3e-6.
  double s = 0.0;
  for (long iter = 0; iter < 10'000'000; ++iter) {
    double next = pgf(s);
    if (std::abs(next - s) < kFixedPointTol) return next;
    s = next;
  }
  return s;
}

int OffspringDistribution::sample_from_unit(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return ks_[static_cast<std::size_t>(it - cdf_.begin())];
}

}  // namespace gwcp
