#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

#include "otbag/error.hpp"

namespace otbag {

// Deterministic random source. The engine (mt19937_64) is fully specified by
// the standard, and every derived draw below is computed with hand-rolled
// transforms rather than std distributions, so identical seeds give identical
// sequences on every platform. Single-owner: never share across threads.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n), exact (rejection sampling). n must be positive.
  std::uint64_t next_below(std::uint64_t n);

  // Standard normal via Box-Muller. Two engine draws per call, no cache.
  double next_gaussian();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// k ~ Poisson(1) by Knuth's product-of-uniforms method: multiply uniforms
// until the product drops below exp(-1).
unsigned poisson1_draw(SeededRng& rng);

// C(N,k) (1/N)^k (1 - 1/N)^(N-k), evaluated in log space.
double binomial_pmf(std::uint64_t n, std::uint64_t k);

// exp(-1) / k!
double poisson1_pmf(unsigned k);

// Fisher-Yates with SeededRng; deterministic for a given seed.
template <typename T>
void shuffle_span(std::span<T> items, SeededRng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace otbag
