#include "lfunclab/characters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lfl::chars {

namespace detail {

// One cyclic factor of (Z/q)^*: modulus p^e, generator order, and the
// discrete log of every unit mod p^e (UINT32_MAX off units).
struct Component {
  uint32_t pe = 1;
  uint32_t prime = 0;
  uint32_t order = 1;
  std::vector<uint32_t> dlog;
};

struct GroupData {
  uint32_t q = 1;
  std::vector<Component> comps;
  std::size_t character_count = 1;
};

namespace {

uint64_t mod_pow(uint64_t base, uint64_t exp, uint64_t mod) {
  uint64_t acc = 1 % mod;
  base %= mod;
  while (exp) {
    if (exp & 1) acc = acc * base % mod;
    base = base * base % mod;
    exp >>= 1;
  }
  return acc;
}

uint32_t primitive_root_mod_p(uint32_t p) {
  uint32_t phi = p - 1;
  std::vector<uint32_t> prime_factors;
  uint32_t m = phi;
  for (uint32_t d = 2; d * d <= m; ++d) {
    if (m % d == 0) {
      prime_factors.push_back(d);
      while (m % d == 0) m /= d;
    }
  }
  if (m > 1) prime_factors.push_back(m);
  for (uint32_t g = 2; g < p; ++g) {
    bool ok = true;
    for (uint32_t f : prime_factors)
      if (mod_pow(g, phi / f, p) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
  fail(Status::internal_error, "primitive_root_mod_p: none found");
}

Component make_cyclic_component(uint32_t pe, uint32_t prime, uint32_t gen, uint32_t order) {
  Component c;
  c.pe = pe;
  c.prime = prime;
  c.order = order;
  c.dlog.assign(pe, UINT32_MAX);
  uint64_t a = 1;
  for (uint32_t l = 0; l < order; ++l) {
    c.dlog[static_cast<std::size_t>(a)] = l;
    a = a * gen % pe;
  }
  return c;
}

std::shared_ptr<const GroupData> build_group(uint32_t q) {
  if (q < 1 || q > 10'000)
    fail(Status::unsupported, "characters: modulus must be in [1, 10^4]");
  auto g = std::make_shared<GroupData>();
  g->q = q;
  uint32_t m = q;
  int e2 = 0;
  while (m % 2 == 0) {
    m /= 2;
    ++e2;
  }
  // (Z/2)^* is trivial; (Z/4)^* = <3>; (Z/2^e)^* = <-1> x <5> for e >= 3.
  if (e2 == 2) {
    g->comps.push_back(make_cyclic_component(4, 2, 3, 2));
  } else if (e2 >= 3) {
    uint32_t pe = 1u << e2;
    Component sign;
    sign.pe = pe;
    sign.prime = 2;
    sign.order = 2;
    sign.dlog.assign(pe, UINT32_MAX);
    Component five;
    five.pe = pe;
    five.prime = 2;
    five.order = pe / 4;
    five.dlog.assign(pe, UINT32_MAX);
    uint64_t a = 1;
    for (uint32_t y = 0; y < pe / 4; ++y) {
      sign.dlog[static_cast<std::size_t>(a)] = 0;
      five.dlog[static_cast<std::size_t>(a)] = y;
      sign.dlog[static_cast<std::size_t>(pe - a)] = 1;
      five.dlog[static_cast<std::size_t>(pe - a)] = y;
      a = a * 5 % pe;
    }
    g->comps.push_back(std::move(sign));
    g->comps.push_back(std::move(five));
  }
  for (uint32_t p = 3; p <= m; p += 2) {
    if (m % p) continue;
    uint32_t pe = 1;
    while (m % p == 0) {
      m /= p;
      pe *= p;
    }
    uint32_t gen = primitive_root_mod_p(p);
    // Lift to a generator mod p^e; g or g+p works whenever g generates mod p.
    if (pe > p && mod_pow(gen, p - 1, static_cast<uint64_t>(p) * p) == 1) gen += p;
    uint32_t order = pe / p * (p - 1);
    g->comps.push_back(make_cyclic_component(pe, p, gen % pe, order));
  }
  g->character_count = 1;
  for (const Component& c : g->comps) g->character_count *= c.order;
  return g;
}

double snap(double v) {
  for (double target : {0.0, 0.5, -0.5, 1.0, -1.0})
    if (std::abs(v - target) < 1e-15) return target;
  return v;
}

// Index of the conjugate pair whose real part is solved for when the table
// needs the exact-cancellation adjustment; near k/4 so |sin| is close to 1
// and the adjustment barely moves the root's angle.
uint32_t adjusted_pair(uint32_t k) {
  uint32_t jmax = (k - 1) / 2;
  uint32_t j = (k + 2) / 4;
  return std::max<uint32_t>(1, std::min(j, jmax));
}

// Real part of the canonical table sum: r[0], r[k/2] for even k, conjugate
// pair brackets by ascending index, the adjusted pair last. The prefix is
// Neumaier-compensated so the adjusted pair only has to absorb the exact
// discrepancy of the stored cosines (~1e-15), not plain-summation rounding;
// the final addition is a single fl op the constructor can cancel exactly.
double canonical_real_sum(const std::vector<cplx>& r, double* prefix_out) {
  const uint32_t k = static_cast<uint32_t>(r.size());
  uint32_t js = k >= 3 ? adjusted_pair(k) : 0;
  double s = r[0].real(), comp = 0.0;
  auto add = [&](double x) {
    double t = s + x;
    comp += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  };
  if (k % 2 == 0 && k >= 2) add(r[k / 2].real());
  for (uint32_t j = 1; 2 * j < k; ++j)
    if (j != js) add(r[j].real() + r[k - j].real());
  double prefix = s + comp;
  if (prefix_out) *prefix_out = prefix;
  if (js == 0) return prefix;
  return prefix + (r[js].real() + r[k - js].real());
}

} // namespace
} // namespace detail

std::vector<cplx> roots_of_unity(uint32_t k) {
  if (k == 0) fail(Status::invalid_argument, "roots_of_unity: k must be positive");
  const double two_pi = 6.283185307179586476925286766559;
  std::vector<cplx> r(k);
  r[0] = {1.0, 0.0};
  if (k == 1) return r;
  if (k % 2 == 0) {
    // Direct values on [0, k/4], reflection across pi/2 up to k/2, conjugates
    // beyond; reflection copies bits, so cancelling pairs cancel exactly.
    uint32_t half = k / 2;
    for (uint32_t j = 1; 4 * j <= k; ++j)
      r[j] = {detail::snap(std::cos(two_pi * j / k)), detail::snap(std::sin(two_pi * j / k))};
    for (uint32_t j = k / 4 + 1; j <= half; ++j) r[j] = {-r[half - j].real(), r[half - j].imag()};
    for (uint32_t j = half + 1; j < k; ++j) r[j] = std::conj(r[k - j]);
  } else {
    for (uint32_t j = 1; 2 * j <= k; ++j)
      r[j] = {detail::snap(std::cos(two_pi * j / k)), detail::snap(std::sin(two_pi * j / k))};
    for (uint32_t j = k / 2 + 1; j < k; ++j) r[j] = std::conj(r[k - j]);
  }
  if (k < 3) return r;
  // Force the canonical sum to exactly zero: give the adjusted pair the real
  // part -prefix/2. Doubling and halving are exact, so the final addition is
  // prefix + (-prefix) = +0 bitwise. The sum of roots is zero in exact
  // arithmetic, so the solved value sits within ~1e-15 of the true cosine.
  uint32_t js = detail::adjusted_pair(k);
  double prefix = 0.0;
  if (detail::canonical_real_sum(r, &prefix) != 0.0) {
    double c = -prefix / 2;
    r[js] = {c, r[js].imag()};
    r[k - js] = {c, r[k - js].imag()};
  }
  return r;
}

cplx weighted_root_sum(const std::vector<uint64_t>& counts, const std::vector<cplx>& roots) {
  const uint32_t k = static_cast<uint32_t>(roots.size());
  if (k == 0 || counts.size() != roots.size())
    fail(Status::invalid_argument, "weighted_root_sum: size mismatch");
  uint64_t cmin = *std::min_element(counts.begin(), counts.end());
  // cmin * (canonical table sum) + residual weights in the same bracket
  // order. The table sum is exactly zero for k >= 2 and zero residual
  // weights contribute exact zeros, so full periods cancel exactly.
  uint32_t js = k >= 3 ? detail::adjusted_pair(k) : 0;
  double sre = detail::canonical_real_sum(roots, nullptr);
  double sim = roots[0].imag();
  double wre = static_cast<double>(counts[0] - cmin) * roots[0].real();
  double wim = static_cast<double>(counts[0] - cmin) * roots[0].imag();
  auto bracket = [&](uint32_t j) {
    sim += roots[j].imag() + roots[k - j].imag();
    double wa = static_cast<double>(counts[j] - cmin);
    double wb = static_cast<double>(counts[k - j] - cmin);
    wre += wa * roots[j].real() + wb * roots[k - j].real();
    wim += wa * roots[j].imag() + wb * roots[k - j].imag();
  };
  if (k % 2 == 0 && k >= 2) {
    sim += roots[k / 2].imag();
    double w = static_cast<double>(counts[k / 2] - cmin);
    wre += w * roots[k / 2].real();
    wim += w * roots[k / 2].imag();
  }
  for (uint32_t j = 1; 2 * j < k; ++j)
    if (j != js) bracket(j);
  if (js != 0) bracket(js);
  double c = static_cast<double>(cmin);
  return {c * sre + wre, c * sim + wim};
}

DirichletCharacter::DirichletCharacter(std::shared_ptr<const detail::GroupData> group,
                                       std::size_t index)
    : group_(std::move(group)), index_(index), q_(group_->q) {
  if (index_ >= group_->character_count)
    fail(Status::invalid_argument, "character index out of range");
  const auto& comps = group_->comps;
  // Lexicographic decode, leftmost component most significant; index 0 is
  // the principal character.
  std::vector<uint32_t> expo(comps.size(), 0);
  {
    std::size_t rest = index_;
    for (std::size_t i = comps.size(); i-- > 0;) {
      expo[i] = static_cast<uint32_t>(rest % comps[i].order);
      rest /= comps[i].order;
    }
  }
  uint64_t k = 1;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    uint64_t oi = comps[i].order / std::gcd<uint64_t>(expo[i], comps[i].order);
    k = std::lcm(k, oi);
  }
  order_ = static_cast<uint32_t>(k);
  roots_ = roots_of_unity(order_);

  // chi(n) = zeta_k^{sum_i m_i dlog_i(n)} with m_i = (k/o_i)(a_i/g_i) mod k,
  // g_i = gcd(a_i, d_i), o_i = d_i/g_i.
  std::vector<uint64_t> mult(comps.size(), 0);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (expo[i] == 0) continue;
    uint64_t gi = std::gcd<uint64_t>(expo[i], comps[i].order);
    uint64_t oi = comps[i].order / gi;
    mult[i] = (k / oi) % k * ((expo[i] / gi) % k) % k;
  }

  values_.assign(q_, -1);
  for (uint32_t n = 0; n < q_; ++n) {
    if (std::gcd(n, q_) != 1) continue;
    uint64_t j = 0;
    for (std::size_t i = 0; i < comps.size(); ++i)
      j = (j + mult[i] * comps[i].dlog[n % comps[i].pe]) % k;
    values_[n] = static_cast<int32_t>(j);
  }

  period_counts_.assign(order_, 0);
  for (int32_t v : values_)
    if (v >= 0) ++period_counts_[static_cast<std::size_t>(v)];

  // chi(-1) is a square root of 1, so its root index is 0 or k/2 exactly.
  parity_ = root_index(static_cast<int64_t>(q_) - 1) == 0 ? 0 : 1;

  // Conductor as a product of local conductors. For odd p the local value is
  // p^{j+1} with p^j the p-part of the local order; mod 2^e with e >= 3 the
  // <5> part of order 2^j forces 2^{j+2} regardless of the sign part.
  uint64_t cond = 1;
  std::size_t i = 0;
  while (i < comps.size()) {
    const detail::Component& c = comps[i];
    if (c.prime == 2 && c.pe >= 8) {
      uint32_t b = expo[i + 1];
      if (b != 0) {
        uint64_t o5 = comps[i + 1].order / std::gcd<uint64_t>(b, comps[i + 1].order);
        cond *= 4 * o5;
      } else if (expo[i] != 0) {
        cond *= 4;
      }
      i += 2;
      continue;
    }
    if (expo[i] != 0) {
      if (c.prime == 2) {
        cond *= 4;
      } else {
        uint64_t o = c.order / std::gcd<uint64_t>(expo[i], c.order);
        uint64_t f = c.prime;
        while (o % c.prime == 0) {
          o /= c.prime;
          f *= c.prime;
        }
        cond *= f;
      }
    }
    ++i;
  }
  conductor_ = static_cast<uint32_t>(cond);
}

cplx DirichletCharacter::partial_sum(double x) const {
  if (!(x >= 1.0)) return {0.0, 0.0};
  if (x >= 9007199254740992.0) // 2^53: counts must stay exact in binary64
    fail(Status::domain_error, "partial_sum: x too large for exact counting");
  uint64_t m = static_cast<uint64_t>(std::floor(x));
  uint64_t full = m / q_;
  uint64_t rem = m % q_;
  std::vector<uint64_t> counts(order_, 0);
  for (uint32_t j = 0; j < order_; ++j) counts[j] = full * period_counts_[j];
  for (uint64_t r = 1; r <= rem; ++r) {
    int32_t j = values_[static_cast<std::size_t>(r)];
    if (j >= 0) ++counts[static_cast<std::size_t>(j)];
  }
  return weighted_root_sum(counts, roots_);
}

std::vector<DirichletCharacter> enumerate_characters(uint32_t q) {
  auto group = detail::build_group(q);
  std::vector<DirichletCharacter> out;
  out.reserve(group->character_count);
  for (std::size_t i = 0; i < group->character_count; ++i)
    out.push_back(DirichletCharacter(group, i));
  return out;
}

DirichletCharacter character(uint32_t q, std::size_t index) {
  return DirichletCharacter(detail::build_group(q), index);
}

cplx gauss_sum(const DirichletCharacter& chi) {
  if (!chi.is_primitive())
    fail(Status::domain_error, "gauss_sum: character must be primitive");
  uint32_t q = chi.modulus();
  if (q == 1) return {1.0, 0.0};
  std::vector<cplx> e = roots_of_unity(q);
  KahanC acc;
  for (uint32_t a = 1; a < q; ++a) {
    int32_t j = chi.root_index(a);
    if (j >= 0) acc.add(chi.roots()[static_cast<std::size_t>(j)] * e[a]);
  }
  return acc.value();
}

} // namespace lfl::chars
