#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "otbag/sampling.hpp"

using namespace otbag;
using testutil::error_code_of;

TEST_CASE("poisson1_pmf values") {
  CHECK(poisson1_pmf(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(poisson1_pmf(1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(poisson1_pmf(2) == doctest::Approx(std::exp(-1.0) / 2.0).epsilon(1e-12));
  double sum = 0.0;
  for (unsigned k = 0; k <= 20; ++k) sum += poisson1_pmf(k);
  CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("binomial_pmf endpoints and errors") {
  CHECK(binomial_pmf(1, 0) == 0.0);
  CHECK(binomial_pmf(1, 1) == 1.0);
  CHECK(error_code_of([] { binomial_pmf(4, 5); }) == "BadSupport");
  CHECK(error_code_of([] { binomial_pmf(0, 0); }) == "BadSupport");
}

TEST_CASE("binomial_pmf sums to one") {
  for (std::uint64_t n : {2ull, 5ull, 17ull, 100ull}) {
    double sum = 0.0;
    for (std::uint64_t k = 0; k <= n; ++k) sum += binomial_pmf(n, k);
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("binomial(N,1/N) approaches poisson1 for large N") {
  CHECK(std::abs(binomial_pmf(10000, 1) - std::exp(-1.0)) < 1e-4);
  for (unsigned k = 0; k <= 10; ++k) {
    CHECK(std::abs(binomial_pmf(10000, k) - poisson1_pmf(k)) < 1e-4);
  }
}

TEST_CASE("poisson1_draw determinism") {
  SeededRng a(9001), b(9001);
  for (int i = 0; i < 1000; ++i) CHECK(poisson1_draw(a) == poisson1_draw(b));
}

TEST_CASE("poisson1_draw empirical statistics") {
  constexpr std::size_t kDraws = 100000;
  SeededRng rng(42);
  std::vector<std::uint64_t> bins(5, 0);
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const unsigned k = poisson1_draw(rng);
    sum += k;
    ++bins[std::min<unsigned>(k, 4)];
  }
  const double mean = static_cast<double>(sum) / kDraws;
  CHECK(mean >= 0.99);
  CHECK(mean <= 1.01);
  const double freq0 = static_cast<double>(bins[0]) / kDraws;
  CHECK(freq0 >= 0.357);
  CHECK(freq0 <= 0.379);

  // Goodness of fit over {0,1,2,3,>=4} at significance 0.001 (4 df).
  double chi2 = 0.0, tail = 1.0;
  for (unsigned k = 0; k < 4; ++k) {
    const double expected = kDraws * poisson1_pmf(k);
    tail -= poisson1_pmf(k);
    chi2 += (bins[k] - expected) * (bins[k] - expected) / expected;
  }
  chi2 += (bins[4] - kDraws * tail) * (bins[4] - kDraws * tail) / (kDraws * tail);
  CHECK(chi2 < 18.4668);
}

TEST_CASE("next_below stays in range and covers values") {
  SeededRng rng(7);
  std::vector<int> seen(5, 0);
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t v = rng.next_below(5);
    REQUIRE(v < 5);
    ++seen[v];
  }
  for (int count : seen) CHECK(count > 0);
  CHECK(error_code_of([&] { rng.next_below(0); }) == "BadSupport");
}

TEST_CASE("shuffle_span is a seed-deterministic permutation") {
  std::vector<int> first = {1, 2, 3, 4, 5, 6, 7};
  std::vector<int> second = first;
  SeededRng a(3), b(3);
  shuffle_span(std::span<int>(first), a);
  shuffle_span(std::span<int>(second), b);
  CHECK(first == second);
  std::vector<int> sorted = first;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>({1, 2, 3, 4, 5, 6, 7}));
}
