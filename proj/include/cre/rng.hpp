#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cre/errors.hpp"
#include "cre/stats.hpp"

namespace cre {

// All randomness in the library flows through Rng, a mt19937_64 seeded via a
// splitmix64 chain. Every stochastic operation takes an explicit base seed and
// derives one sub-stream per task with derive_seed, so results are independent
// of evaluation order and identical across thread counts.
//
// Stream ids (one per pipeline stage):
//   split        sample splitting
//   tlearner     per-arm outcome-model fits (index = arm)
//   forest       random-forest trees (index = tree)
//   boost        boosting stages (index = stage)
//   stability    stability-selection subsamples (index = subsample)
//   sensitivity  sensitivity bootstrap (index = iterate, sub = redraw attempt)
//   simulation   simulated data draws (index = replicate)
namespace stream {
constexpr std::uint64_t split = 0x01;
constexpr std::uint64_t tlearner = 0x02;
constexpr std::uint64_t forest = 0x03;
constexpr std::uint64_t boost = 0x04;
constexpr std::uint64_t stability = 0x05;
constexpr std::uint64_t sensitivity = 0x06;
constexpr std::uint64_t simulation = 0x07;
}  // namespace stream

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream_id,
                                 std::uint64_t index = 0, std::uint64_t sub = 0) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  s ^= stream_id * 0xd1342543de82ef95ULL;
  h ^= splitmix64(s);
  s ^= index * 0xaf251af3b0f025b5ULL;
  h ^= splitmix64(s);
  s ^= sub * 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(s);
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform on (0,1): 53-bit mantissa, offset away from zero.
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw domain_error("Rng::below requires n > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Standard normal by inverse-CDF; deterministic across platforms.
  double normal() { return stats::normal_quantile(uniform01()); }

  std::vector<int> permutation(int n) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(below(static_cast<std::uint64_t>(i) + 1));
      std::swap(idx[i], idx[j]);
    }
    return idx;
  }

  // k draws from {0..n-1} without replacement (partial Fisher-Yates, draw order).
  std::vector<int> sample_without_replacement(int n, int k) {
    if (k > n) throw domain_error("sample_without_replacement: k > n");
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::vector<int> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
      std::swap(idx[i], idx[j]);
      out.push_back(idx[i]);
    }
    return out;
  }

  std::vector<int> sample_with_replacement(int n, int k) {
    std::vector<int> out(k);
    for (int i = 0; i < k; ++i) out[i] = static_cast<int>(below(n));
    return out;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace cre
