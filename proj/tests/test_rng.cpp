#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "cre/errors.hpp"
#include "cre/rng.hpp"

using namespace cre;

namespace {

// Independent re-statement of the splitmix64 step, used to cross-check
// derive_seed against a second implementation.
std::uint64_t mix_ref(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_ref(std::uint64_t base, std::uint64_t stream_id, std::uint64_t index, std::uint64_t sub) {
  std::uint64_t s = base;
  std::uint64_t h = mix_ref(s);
  s ^= stream_id * 0xd1342543de82ef95ULL;
  h ^= mix_ref(s);
  s ^= index * 0xaf251af3b0f025b5ULL;
  h ^= mix_ref(s);
  s ^= sub * 0x9e3779b97f4a7c15ULL;
  h ^= mix_ref(s);
  return h;
}

}  // namespace

TEST_CASE("derive_seed matches an independent splitmix64 chain") {
  const std::uint64_t bases[] = {0, 1, 42, 0xdeadbeefULL, UINT64_MAX};
  for (const std::uint64_t b : bases)
    for (std::uint64_t st = 1; st <= 7; ++st)
      for (std::uint64_t idx : {0ULL, 1ULL, 199ULL})
        for (std::uint64_t sub : {0ULL, 3ULL}) CHECK(derive_seed(b, st, idx, sub) == derive_ref(b, st, idx, sub));
}

TEST_CASE("derive_seed separates streams, indices and attempts") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t st = 1; st <= 7; ++st)
    for (std::uint64_t idx = 0; idx < 50; ++idx)
      for (std::uint64_t sub = 0; sub < 3; ++sub) seen.insert(derive_seed(99, st, idx, sub));
  CHECK(seen.size() == 7 * 50 * 3);  // no collisions across the whole block
  CHECK(derive_seed(99, stream::forest, 5) == derive_seed(99, stream::forest, 5));
}

TEST_CASE("Rng wraps mt19937_64 and is reproducible") {
  Rng a(123456789);
  Rng b(123456789);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  std::mt19937_64 ref(123456789);
  Rng c(123456789);
  for (int i = 0; i < 10; ++i) CHECK(c.next() == ref());
}

TEST_CASE("uniform01 stays strictly inside (0,1)") {
  Rng r(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("below is in range and roughly uniform") {
  Rng r(11);
  CHECK_THROWS_AS((void)r.below(0), Error);
  std::vector<int> counts(6, 0);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t v = r.below(6);
    REQUIRE(v < 6);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (const int c : counts) CHECK(std::fabs(c / static_cast<double>(draws) - 1.0 / 6) < 0.02);
}

TEST_CASE("bernoulli endpoints are deterministic") {
  Rng r(13);
  for (int i = 0; i < 1000; ++i) {
    CHECK_FALSE(r.bernoulli(0.0));
    CHECK(r.bernoulli(1.0));
  }
}

TEST_CASE("normal draws have standard moments") {
  Rng r(17);
  const int n = 200000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    const double v = r.normal();
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.01);
  CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("permutation is a uniform shuffle") {
  Rng r(19);
  const std::vector<int> p = r.permutation(100);
  std::vector<int> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);

  // all 6 orders of permutation(3) appear with frequency ~1/6
  std::map<std::vector<int>, int> freq;
  const int draws = 12000;
  for (int i = 0; i < draws; ++i) ++freq[r.permutation(3)];
  CHECK(freq.size() == 6);
  for (const auto& [perm, count] : freq) CHECK(std::fabs(count / static_cast<double>(draws) - 1.0 / 6) < 0.03);
}

TEST_CASE("sampling helpers respect range and distinctness") {
  Rng r(23);
  const std::vector<int> wo = r.sample_without_replacement(50, 20);
  CHECK(wo.size() == 20);
  CHECK(std::set<int>(wo.begin(), wo.end()).size() == 20);
  for (const int v : wo) {
    CHECK(v >= 0);
    CHECK(v < 50);
  }
  CHECK_THROWS_AS((void)r.sample_without_replacement(5, 6), Error);

  // k = n is a permutation
  const std::vector<int> all = r.sample_without_replacement(10, 10);
  std::vector<int> s = all;
  std::sort(s.begin(), s.end());
  for (int i = 0; i < 10; ++i) CHECK(s[static_cast<std::size_t>(i)] == i);

  const std::vector<int> wr = r.sample_with_replacement(5, 100);
  CHECK(wr.size() == 100);
  for (const int v : wr) {
    CHECK(v >= 0);
    CHECK(v < 5);
  }
}
