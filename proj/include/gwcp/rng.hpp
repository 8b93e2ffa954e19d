#pragma once

#include <cmath>
#include <cstdint>

namespace gwcp {

// splitmix64 finalizer. Full avalanche, cheap, and stable across platforms,
// which is what the bitwise-reproducibility contract needs (std:: distributions
// are implementation-defined and therefore avoided everywhere).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent stream seed for sub-unit `index` of a master seed. Trial i of a
/// Monte Carlo plan always draws from derive_stream(master, i), so results do
/// not depend on thread count or execution order.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index));
}

/// 53-bit uniform in [0,1).
inline double unit_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// splitmix64 sequence generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  double uniform() { return unit_from_bits(next_u64()); }

  // Uniform in {0,..,n-1} by multiply-shift. Bias is < n/2^64, far below any
  // statistical tolerance used in this project.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  std::uint64_t state_;
};

}  // namespace gwcp
