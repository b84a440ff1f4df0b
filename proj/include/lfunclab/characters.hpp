#ifndef LFUNCLAB_CHARACTERS_HPP
#define LFUNCLAB_CHARACTERS_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "lfunclab/common.hpp"

namespace lfl::chars {

namespace detail {
struct GroupData;
}

// A Dirichlet character mod q, materialized at construction: a residue ->
// root-of-unity-index table plus the table of k-th roots (k = order). Root
// tables satisfy weighted_root_sum(ones, roots) == 0 exactly for k >= 2, so
// full-period character sums vanish exactly in binary64.
class DirichletCharacter {
public:
  uint32_t modulus() const noexcept { return q_; }
  uint32_t order() const noexcept { return order_; }
  uint32_t conductor() const noexcept { return conductor_; }
  std::size_t index() const noexcept { return index_; }
  bool is_principal() const noexcept { return order_ == 1; }
  bool is_primitive() const noexcept { return conductor_ == q_; }
  bool is_real() const noexcept { return order_ <= 2; }
  int parity() const noexcept { return parity_; } // 0: chi(-1)=1, 1: chi(-1)=-1

  // chi(n); 0 when gcd(n, q) > 1. Defined for any integer n.
  cplx value(int64_t n) const noexcept {
    int32_t j = root_index(n);
    return j < 0 ? cplx{0.0, 0.0} : roots_[static_cast<std::size_t>(j)];
  }

  // j with chi(n) = zeta_order^j, or -1 when chi(n) = 0.
  int32_t root_index(int64_t n) const noexcept {
    int64_t r = n % static_cast<int64_t>(q_);
    if (r < 0) r += q_;
    return values_[static_cast<std::size_t>(r)];
  }

  const std::vector<cplx>& roots() const noexcept { return roots_; }

  // sum_{1 <= n <= x} chi(n) in O(q) time independent of x. Periodicity is
  // applied to integer root-index counts, so the result is bit-identical to
  // counting over 1..floor(x) directly.
  cplx partial_sum(double x) const;

private:
  friend std::vector<DirichletCharacter> enumerate_characters(uint32_t q);
  friend DirichletCharacter character(uint32_t q, std::size_t index);
  DirichletCharacter(std::shared_ptr<const detail::GroupData> group, std::size_t index);

  std::shared_ptr<const detail::GroupData> group_;
  std::size_t index_ = 0;
  uint32_t q_ = 1;
  uint32_t order_ = 1;
  uint32_t conductor_ = 1;
  int parity_ = 0;
  std::vector<int32_t> values_;         // residue -> root index, -1 for zero
  std::vector<cplx> roots_;             // zeta_order^j
  std::vector<uint64_t> period_counts_; // root index -> occurrences per period
};

// All phi(q) characters mod q, lexicographic in CRT exponent vectors;
// the principal character comes first. 1 <= q <= 10^4.
std::vector<DirichletCharacter> enumerate_characters(uint32_t q);

// Single character by its position in the enumeration order.
DirichletCharacter character(uint32_t q, std::size_t index);

// tau(chi) = sum_a chi(a) e^{2 pi i a / q}; requires a primitive character.
cplx gauss_sum(const DirichletCharacter& chi);

// Table of e^{2 pi i j / k} for j in [0, k), with the same symmetry/snap
// construction the character tables use. Each entry is within a few ulp of
// the true root, and the canonical pair-ordered sum of the table is exactly
// zero for k >= 2.
std::vector<cplx> roots_of_unity(uint32_t k);

// sum_j counts[j] * roots[j] evaluated in a fixed conjugate-pair order.
// When all counts are equal and k >= 2 the result is exactly (0, 0); equal
// integer counts give bitwise-equal results however they were derived.
cplx weighted_root_sum(const std::vector<uint64_t>& counts, const std::vector<cplx>& roots);

} // namespace lfl::chars

#endif
