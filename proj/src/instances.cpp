#include "lfunclab/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

namespace lfl::inst {

namespace {

using i128 = __int128;
using u128 = unsigned __int128;

// Both instance kinds cache coefficients, primes, and Satake data up to here.
constexpr uint64_t kCoefficientCacheMax = 1'000'000;

constexpr double kE = std::numbers::e;

double ell_kappa_of(int kappa) {
  return std::min(kappa * (1.0 - std::sqrt(2.0 / std::numbers::pi)), 1.0) + 1.0 / 1000.0;
}

// Linear sieve: smallest prime factor for every index <= n plus the ascending
// prime list, O(n).
void build_sieve(uint64_t n, std::vector<uint32_t>& spf, std::vector<uint32_t>& primes) {
  spf.assign(n + 1, 0);
  primes.clear();
  for (uint64_t i = 2; i <= n; ++i) {
    if (spf[i] == 0) {
      spf[i] = static_cast<uint32_t>(i);
      primes.push_back(static_cast<uint32_t>(i));
    }
    for (uint32_t p : primes) {
      if (p > spf[i] || i * p > n) break;
      spf[i * p] = p;
    }
  }
}

struct SparseTerm {
  uint32_t offset;
  int64_t coeff;
};

// The cube of prod (1 - q^n) as a series with O(sqrt(len)) terms:
// sum_{k>=0} (-1)^k (2k+1) q^{k(k+1)/2}.
std::vector<SparseTerm> cube_terms(std::size_t len) {
  std::vector<SparseTerm> terms;
  for (uint64_t k = 0;; ++k) {
    uint64_t off = k * (k + 1) / 2;
    if (off >= len) break;
    auto c = static_cast<int64_t>(2 * k + 1);
    terms.push_back({static_cast<uint32_t>(off), (k & 1) ? -c : c});
  }
  return terms;
}

template <typename T>
u128 max_abs(const std::vector<T>& v) {
  u128 m = 0;
  for (const T& x : v) {
    auto w = static_cast<i128>(x);
    u128 a = w < 0 ? static_cast<u128>(-w) : static_cast<u128>(w);
    if (a > m) m = a;
  }
  return m;
}

// out = terms * in, truncated to in.size(). Output blocks are disjoint, so
// the parallel schedule cannot affect the (exact integer) result.
template <typename In, typename Out>
std::vector<Out> sparse_multiply(const std::vector<SparseTerm>& terms, const std::vector<In>& in) {
  const std::size_t n = in.size();
  std::vector<Out> out(n, Out(0));
  constexpr std::size_t kBlock = std::size_t(1) << 14;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    for (const SparseTerm& t : terms) {
      if (t.offset >= hi) break; // offsets ascend
      const std::size_t start = std::max<std::size_t>(lo, t.offset);
      const In* src = in.data() + (start - t.offset);
      Out* dst = out.data() + start;
      const Out c = static_cast<Out>(t.coeff);
      for (std::size_t i = 0, m = hi - start; i < m; ++i) dst[i] += c * static_cast<Out>(src[i]);
    }
  });
  return out;
}

// [q^i] prod_{n>=1} (1 - q^n)^24 for i < len: square the sparse cube, then six
// more sparse passes. Every partial sum of a pass is bounded by
// (sum |coeff|) * max|input|, so checking that product against the container
// width before the pass certifies the whole pass against overflow.
std::vector<i128> eta24_coefficients(std::size_t len) {
  const std::vector<SparseTerm> terms = cube_terms(len);
  u128 sum_abs = 0;
  for (const SparseTerm& t : terms) sum_abs += static_cast<u128>(t.coeff < 0 ? -t.coeff : t.coeff);

  // sixth power of the eta-like factor via sparse x sparse; coefficients are
  // bounded by sum_abs^2 < 2^42.
  std::vector<int64_t> narrow(len, 0);
  for (const SparseTerm& a : terms) {
    for (const SparseTerm& b : terms) {
      uint64_t off = static_cast<uint64_t>(a.offset) + b.offset;
      if (off >= len) break;
      narrow[off] += a.coeff * b.coeff;
    }
  }

  std::vector<i128> wide;
  bool is_narrow = true;
  for (int pass = 0; pass < 6; ++pass) {
    const u128 in_max = is_narrow ? max_abs(narrow) : max_abs(wide);
    if (in_max != 0 && in_max > ~u128(0) / sum_abs)
      fail(Status::internal_error, "eta24_coefficients: pass bound not representable");
    const u128 bound = sum_abs * in_max;
    if (bound >> 126)
      fail(Status::internal_error, "eta24_coefficients: convolution exceeds 128-bit headroom");
    const bool out_narrow = !(bound >> 62);
    if (is_narrow && out_narrow) {
      narrow = sparse_multiply<int64_t, int64_t>(terms, narrow);
    } else if (is_narrow) {
      wide = sparse_multiply<int64_t, i128>(terms, narrow);
      narrow.clear();
      narrow.shrink_to_fit();
      is_narrow = false;
    } else {
      wide = sparse_multiply<i128, i128>(terms, wide);
    }
  }
  if (is_narrow) wide.assign(narrow.begin(), narrow.end());
  return wide;
}

} // namespace

cplx LFunctionInstance::coefficient(uint64_t n) const {
  if (n == 0) fail(Status::invalid_argument, "coefficient: n must be positive");
  if (n > cache_) fail(Status::resource_error, "coefficient: n exceeds the cache bound");
  if (kind_ == Kind::dirichlet) return chi_->value(static_cast<int64_t>(n));
  return {lambda_[n], 0.0};
}

cplx LFunctionInstance::a_coefficient(uint64_t n) const {
  if (n == 0) fail(Status::invalid_argument, "a_coefficient: n must be positive");
  if (n > cache_) fail(Status::resource_error, "a_coefficient: n exceeds the cache bound");
  if (n == 1) return {0.0, 0.0};
  const uint32_t p = spf_[n];
  uint64_t m = n;
  int k = 0;
  while (m % p == 0) {
    m /= p;
    ++k;
  }
  if (m != 1) return {0.0, 0.0};
  const cplx* al = satake(p);
  cplx acc{0.0, 0.0};
  for (int j = 0; j < degree_; ++j) {
    cplx pw{1.0, 0.0};
    for (int e = 0; e < k; ++e) pw *= al[j];
    acc += pw;
  }
  return acc;
}

const cplx* LFunctionInstance::satake(uint64_t p) const {
  if (p > cache_) fail(Status::resource_error, "satake: p exceeds the cache bound");
  if (p < 2 || spf_[p] != p) fail(Status::invalid_argument, "satake: p must be prime");
  auto it = std::lower_bound(primes_.begin(), primes_.end(), static_cast<uint32_t>(p));
  return satake_.data() + static_cast<std::size_t>(degree_) * (it - primes_.begin());
}

double LFunctionInstance::analytic_conductor(double t) const {
  double c = static_cast<double>(gamma_.conductor);
  for (const cplx& mu : gamma_.shifts) c *= std::abs(cplx(mu.real(), mu.imag() + t)) + 3.0;
  return c;
}

__int128 LFunctionInstance::delta_tau(uint64_t n) const {
  if (kind_ != Kind::delta) fail(Status::unsupported, "delta_tau: defined for delta instances only");
  if (n == 0) fail(Status::invalid_argument, "delta_tau: n must be positive");
  if (n > cache_) fail(Status::resource_error, "delta_tau: n exceeds the cache bound");
  return tau_[n];
}

std::string LFunctionInstance::descriptor_json() const {
  nlohmann::ordered_json j;
  j["kind"] = kind_ == Kind::dirichlet ? "dirichlet" : "delta";
  if (kind_ == Kind::dirichlet) {
    j["modulus"] = chi_->modulus();
    j["char_index"] = chi_->index();
  }
  j["degree"] = degree_;
  j["kappa"] = kappa_;
  j["a0"] = a0_;
  j["theta"] = theta_;
  auto mus = nlohmann::ordered_json::array();
  for (const cplx& mu : gamma_.shifts) mus.push_back({mu.real(), mu.imag()});
  j["mu"] = mus;
  j["root_number"] = {gamma_.root_number.real(), gamma_.root_number.imag()};
  j["cache_bound"] = cache_;
  return j.dump();
}

LFunctionInstance dirichlet_instance(const chars::DirichletCharacter& chi) {
  if (chi.is_principal())
    fail(Status::domain_error,
         "dirichlet_instance: the principal character is excluded (its L-function has a pole)");
  if (!chi.is_primitive())
    fail(Status::domain_error, "dirichlet_instance: character must be primitive");
  LFunctionInstance inst;
  inst.kind_ = Kind::dirichlet;
  inst.degree_ = 1;
  inst.kappa_ = 1;
  inst.theta_ = 0.0;
  inst.ell_kappa_ = ell_kappa_of(inst.kappa_);
  inst.cache_ = kCoefficientCacheMax;
  inst.chi_ = chi;
  build_sieve(inst.cache_, inst.spf_, inst.primes_);
  inst.satake_.resize(inst.primes_.size());
  for (std::size_t i = 0; i < inst.primes_.size(); ++i)
    inst.satake_[i] = chi.value(inst.primes_[i]);
  inst.gamma_.conductor = chi.modulus();
  inst.gamma_.shifts = {cplx(static_cast<double>(chi.parity()), 0.0)};
  const cplx ipar = chi.parity() ? cplx(0.0, 1.0) : cplx(1.0, 0.0);
  inst.gamma_.root_number = chars::gauss_sum(chi) / (ipar * std::sqrt(double(chi.modulus())));
  inst.gamma_.self_dual = chi.is_real();
  if (std::abs(std::abs(inst.gamma_.root_number) - 1.0) > 1e-10)
    fail(Status::internal_error, "dirichlet_instance: root number is off the unit circle");
  inst.a0_ = verify_weak_ramanujan(inst, static_cast<double>(inst.cache_) / kE).minimal_a0;
  return inst;
}

LFunctionInstance delta_instance(uint64_t n_cache) {
  if (n_cache == 0) fail(Status::invalid_argument, "delta_instance: n_cache must be positive");
  if (n_cache > kCoefficientCacheMax)
    fail(Status::resource_error, "delta_instance: n_cache exceeds the 10^6 table limit");
  LFunctionInstance inst;
  inst.kind_ = Kind::delta;
  inst.degree_ = 2;
  inst.kappa_ = 2;
  inst.theta_ = 0.0;
  inst.ell_kappa_ = ell_kappa_of(inst.kappa_);
  inst.cache_ = n_cache;

  const std::vector<i128> f = eta24_coefficients(static_cast<std::size_t>(n_cache));
  inst.tau_.assign(n_cache + 1, 0);
  inst.lambda_.assign(n_cache + 1, 0.0);
  for (uint64_t n = 1; n <= n_cache; ++n) {
    inst.tau_[n] = f[n - 1];
    inst.lambda_[n] = static_cast<double>(inst.tau_[n]) / std::pow(static_cast<double>(n), 5.5);
  }
  if (inst.tau_[1] != 1)
    fail(Status::internal_error, "delta_instance: expansion lost the normalization tau(1) = 1");

  build_sieve(n_cache, inst.spf_, inst.primes_);
  inst.satake_.resize(2 * inst.primes_.size());
  for (std::size_t i = 0; i < inst.primes_.size(); ++i) {
    const double h = 0.5 * inst.lambda_[inst.primes_[i]];
    if (std::abs(h) <= 1.0) {
      const double im = std::sqrt(std::max(0.0, 1.0 - h * h));
      inst.satake_[2 * i] = {h, im};
      inst.satake_[2 * i + 1] = {h, -im};
    } else {
      // Not reachable for the genuine table; kept so a corrupted lambda still
      // yields the root pair of X^2 - lambda X + 1.
      const double r = std::sqrt(h * h - 1.0);
      const double a = h > 0 ? h + r : h - r;
      inst.satake_[2 * i] = {a, 0.0};
      inst.satake_[2 * i + 1] = {1.0 / a, 0.0};
    }
  }

  inst.gamma_.conductor = 1;
  inst.gamma_.shifts = {cplx(5.5, 0.0), cplx(6.5, 0.0)};
  inst.gamma_.root_number = {1.0, 0.0};
  inst.gamma_.self_dual = true;
  inst.a0_ = verify_weak_ramanujan(inst, static_cast<double>(n_cache) / kE).minimal_a0;
  return inst;
}

std::string instance_label(const LFunctionInstance& inst) {
  if (inst.kind() == Kind::dirichlet) {
    return "dirichlet q=" + std::to_string(inst.character()->modulus()) +
           " index=" + std::to_string(inst.character()->index());
  }
  return "delta";
}

WeakRamanujanReport verify_weak_ramanujan(const LFunctionInstance& inst, double x_max) {
  if (!(x_max >= 0.0))
    fail(Status::invalid_argument, "verify_weak_ramanujan: x_max must be >= 0");
  const auto cache = static_cast<double>(inst.cache_bound());
  if (x_max > cache)
    fail(Status::resource_error, "verify_weak_ramanujan: x_max exceeds the coefficient cache");

  WeakRamanujanReport rep;
  const double k2 = static_cast<double>(inst.kappa()) * inst.kappa();
  const int m = inst.degree();
  std::vector<cplx> pw(static_cast<std::size_t>(m));
  // Windows (e^j, e^{j+1}] share their endpoint doubles, so consecutive rows
  // tile the integers with no gap or overlap.
  for (int j = 0; std::exp(static_cast<double>(j)) <= x_max; ++j) {
    const double x = std::exp(static_cast<double>(j));
    const double ex = std::exp(static_cast<double>(j + 1));
    if (ex > cache)
      fail(Status::resource_error,
           "verify_weak_ramanujan: window (x, e x] extends past the coefficient cache");
    Kahan d;
    for (uint32_t p : inst.primes()) {
      if (static_cast<double>(p) > ex) break;
      const cplx* al = inst.satake(p);
      const double logp = std::log(static_cast<double>(p));
      std::fill(pw.begin(), pw.end(), cplx(1.0, 0.0));
      for (uint64_t pk = p; static_cast<double>(pk) <= ex; pk *= p) {
        cplx a{0.0, 0.0};
        for (int t = 0; t < m; ++t) {
          pw[static_cast<std::size_t>(t)] *= al[t];
          a += pw[static_cast<std::size_t>(t)];
        }
        if (static_cast<double>(pk) > x) d.add(std::norm(a) * logp / static_cast<double>(pk));
      }
    }
    rep.rows.push_back({x, d.value(), (d.value() - k2) * (j + 1)});
  }

  if (!rep.rows.empty()) {
    double raw = rep.rows.front().demand;
    for (const WeakRamanujanRow& r : rep.rows) raw = std::max(raw, r.demand);
    rep.raw_a0 = raw;
  }
  rep.minimal_a0 = std::max(1.0, std::ceil(rep.raw_a0));
  return rep;
}

} // namespace lfl::inst
