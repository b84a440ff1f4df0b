#include "lfunclab/arith.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>

#include <boost/multiprecision/cpp_int.hpp>

namespace lfl::arith {

namespace {

constexpr uint64_t kFactorizeLimit = 1'000'000'000'000ULL; // 10^12
constexpr uint64_t kTrialDivisionBound = 1'000'000;        // covers sqrt(10^12)

} // namespace

std::vector<uint32_t> sieve_primes(uint64_t limit) {
  if (limit < 2) fail(Status::domain_error, "sieve_primes: limit must be >= 2");
  if (limit > 4'000'000'000ULL)
    fail(Status::resource_error, "sieve_primes: limit above 4e9 not supported");
  // Odd-only Eratosthenes; index i represents 2i+1.
  const uint64_t half = (limit - 1) / 2 + 1;
  std::vector<uint8_t> composite(half, 0);
  for (uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= limit; ++i) {
    if (composite[i]) continue;
    uint64_t p = 2 * i + 1;
    for (uint64_t j = (p * p - 1) / 2; j < half; j += p) composite[j] = 1;
  }
  std::vector<uint32_t> primes;
  primes.reserve(static_cast<std::size_t>(limit / (std::log(static_cast<double>(limit)) - 1.1)) + 16);
  primes.push_back(2);
  for (uint64_t i = 1; i < half; ++i)
    if (!composite[i]) primes.push_back(static_cast<uint32_t>(2 * i + 1));
  while (!primes.empty() && primes.back() > limit) primes.pop_back();
  return primes;
}

std::shared_ptr<const std::vector<uint32_t>> primes_up_to_cached(uint64_t limit) {
  static std::mutex mutex;
  static std::shared_ptr<const std::vector<uint32_t>> cache;
  static uint64_t cache_limit = 0;
  if (limit < 2) limit = 2;
  std::lock_guard<std::mutex> lock(mutex);
  if (!cache || cache_limit < limit) {
    // Grow in large steps so repeated slightly-larger requests do not resieve.
    uint64_t target = std::max<uint64_t>(limit, 2 * cache_limit);
    target = std::max<uint64_t>(target, 1 << 20);
    cache = std::make_shared<const std::vector<uint32_t>>(sieve_primes(target));
    cache_limit = target;
  }
  return cache;
}

Factorization factorize(uint64_t n) {
  if (n < 1) fail(Status::domain_error, "factorize: n must be >= 1");
  if (n > kFactorizeLimit) fail(Status::resource_error, "factorize: n exceeds 10^12");
  Factorization out;
  if (n == 1) return out;
  auto primes = primes_up_to_cached(kTrialDivisionBound);
  for (uint32_t p : *primes) {
    if (static_cast<uint64_t>(p) * p > n) break;
    if (n % p == 0) {
      int k = 0;
      while (n % p == 0) {
        n /= p;
        ++k;
      }
      out.emplace_back(p, k);
    }
  }
  // Any remainder has no factor <= 10^6, hence is prime for n <= 10^12.
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

double von_mangoldt(uint64_t n) {
  if (n < 1) fail(Status::domain_error, "von_mangoldt: n must be >= 1");
  if (n == 1) return 0.0;
  Factorization f = factorize(n);
  if (f.size() != 1) return 0.0;
  return std::log(static_cast<double>(f[0].first));
}

std::vector<double> bernoulli_even(int count) {
  if (count < 1) fail(Status::domain_error, "bernoulli_even: count must be >= 1");
  if (count > 30) fail(Status::unsupported, "bernoulli_even: precision beyond B_60 unsupported");
  using rational = boost::multiprecision::cpp_rational;
  using bigint = boost::multiprecision::cpp_int;
  const int m_max = 2 * count;
  // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j, exact over rationals.
  std::vector<rational> b(m_max + 1);
  b[0] = 1;
  for (int m = 1; m <= m_max; ++m) {
    rational acc = 0;
    bigint binom = 1; // C(m+1, 0)
    for (int j = 0; j < m; ++j) {
      acc += rational(binom) * b[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    b[m] = -acc / (m + 1);
  }
  std::vector<double> out;
  out.reserve(count);
  for (int k = 1; k <= count; ++k) out.push_back(b[2 * k].convert_to<double>());
  return out;
}

namespace {

QuadratureRule build_gauss_legendre(int n) {
  if (n < 1 || n > 256) fail(Status::domain_error, "gauss_legendre: size must be in [1, 256]");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pi = 3.14159265358979323846;
  int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

} // namespace

const QuadratureRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, QuadratureRule> rules;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = rules.find(n);
  if (it == rules.end()) it = rules.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

} // namespace lfl::arith
