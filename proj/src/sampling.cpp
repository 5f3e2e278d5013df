#include "otbag/sampling.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace otbag {

std::uint64_t SeededRng::next_below(std::uint64_t n) {
  if (n == 0) raise("BadSupport", "next_below requires n > 0");
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      (std::numeric_limits<std::uint64_t>::max() % n + 1) % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x > limit);
  return x % n;
}

double SeededRng::next_gaussian() {
  // Shift the first uniform into (0, 1] so log() stays finite.
  double u1 = 1.0 - next_unit();
  double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

unsigned poisson1_draw(SeededRng& rng) {
  static const double kThreshold = std::exp(-1.0);
  unsigned k = 0;
  double product = 1.0;
  do {
    ++k;
    product *= rng.next_unit();
  } while (product > kThreshold);
  return k - 1;
}

double binomial_pmf(std::uint64_t n, std::uint64_t k) {
  if (n == 0) raise("BadSupport", "binomial_pmf requires N >= 1");
  if (k > n) raise("BadSupport", "binomial_pmf requires k <= N");
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double log_choose = std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) -
                            std::lgamma(nd - kd + 1.0);
  const double p = 1.0 / nd;
  if (k == n) return std::exp(log_choose + kd * std::log(p));
  // log1p(-1) = -inf handles N = 1, k = 0 (probability 0) without a branch.
  return std::exp(log_choose + kd * std::log(p) +
                  (nd - kd) * std::log1p(-p));
}

double poisson1_pmf(unsigned k) {
  return std::exp(-1.0 - std::lgamma(static_cast<double>(k) + 1.0));
}

}  // namespace otbag
