#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace netavg {

// SplitMix64 finalizer (Steele, Lea & Flood 2014). Used only to derive seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic stream split. Replicate b of a run seeded with s always draws
// from derive_seed(s, b), so parallel execution order cannot change results.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ull));
}

// Fixed stream tags keeping the per-purpose substreams of a master seed apart.
namespace seed_stream {
constexpr std::uint64_t kBootstrap = 0x01;
constexpr std::uint64_t kPermutation = 0x02;
constexpr std::uint64_t kSample = 0x03;
constexpr std::uint64_t kRestart = 0x04;
constexpr std::uint64_t kExperimentCell = 0x05;
constexpr std::uint64_t kColumn = 0x06;
}  // namespace seed_stream

// Seedable portable generator. std::mt19937_64 output is fully specified by
// the standard, so streams are bit-reproducible across platforms; the bounded
// and unit-interval mappings below are pinned here for the same reason
// (std::uniform_*_distribution is implementation-defined and never used).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1): top 53 bits scaled by 2^-53.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n-1}, unbiased via rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace netavg
