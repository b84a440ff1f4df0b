#ifndef LFUNCLAB_ARITH_HPP
#define LFUNCLAB_ARITH_HPP

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "lfunclab/common.hpp"

namespace lfl::arith {

// Primes <= limit, ascending. limit >= 2 required.
std::vector<uint32_t> sieve_primes(uint64_t limit);

// Shared, process-wide prime list covering at least [2, limit]; grows on
// demand and is safe to request concurrently. The returned vector may extend
// past `limit`; callers must stop at their own bound.
std::shared_ptr<const std::vector<uint32_t>> primes_up_to_cached(uint64_t limit);

// p^k <-> (p, k) with multiplicity, factors ascending. n in [1, 10^12].
using Factorization = std::vector<std::pair<uint64_t, int>>;
Factorization factorize(uint64_t n);

// log p if n = p^k, else 0. n >= 1.
double von_mangoldt(uint64_t n);

// [B_2, B_4, ..., B_{2 count}] as the nearest binary64 to the exact
// rationals. count in [1, 30].
std::vector<double> bernoulli_even(int count);

struct QuadratureRule {
  std::vector<double> nodes;   // on (-1, 1), ascending
  std::vector<double> weights; // positive, sum = 2
};

// Gauss-Legendre rule of the given size (nodes are Newton-refined roots of
// the Legendre polynomial; exact for polynomials of degree 2n-1).
const QuadratureRule& gauss_legendre(int n);

// Integral of f over [a, b] split into `panels` equal panels, each handled
// by the size-32 Gauss-Legendre rule.
template <typename F>
auto integrate_gl32(F&& f, double a, double b, int panels) {
  const QuadratureRule& rule = gauss_legendre(32);
  using R = decltype(f(a));
  R total{};
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    double mid = lo + 0.5 * h;
    R acc{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    total += acc * (0.5 * h);
  }
  return total;
}

// Enumerates prime powers p^k <= limit as (p, k, p^k), ordered by prime then
// exponent. Used by Lambda-weighted sums; avoids factorizing every integer.
template <typename F>
void for_each_prime_power(uint64_t limit, F&& fn) {
  if (limit < 2) return;
  auto primes = primes_up_to_cached(limit);
  for (uint32_t p : *primes) {
    if (p > limit) break;
    uint64_t pk = p;
    int k = 1;
    for (;;) {
      fn(static_cast<uint64_t>(p), k, pk);
      if (pk > limit / p) break;
      pk *= p;
      ++k;
    }
  }
}

} // namespace lfl::arith

#endif
