#ifndef LFUNCLAB_INSTANCES_HPP
#define LFUNCLAB_INSTANCES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lfunclab/characters.hpp"
#include "lfunclab/common.hpp"

namespace lfl::inst {

// Archimedean data of the functional equation
// completed(s) = W * conj(completed(1 - conj(s))).
struct GammaData {
  uint64_t conductor = 1;       // q
  std::vector<cplx> shifts;     // mu_j, one per unit of degree; Re mu_j >= -theta
  cplx root_number{1.0, 0.0};   // W, |W| = 1 within 1e-10
  bool self_dual = false;
};

enum class Kind { dirichlet, delta };

// One window of the second-moment scan; the sum runs over n in (x, e x].
struct WeakRamanujanRow {
  double x = 1.0;
  double d = 0.0;      // sum of |a(n)|^2 Lambda(n)/n over the window
  double demand = 0.0; // (d - kappa^2) * log(e x): the A0 this window requires
};

struct WeakRamanujanReport {
  std::vector<WeakRamanujanRow> rows; // x = 1, e, e^2, ... <= x_max
  double raw_a0 = 0.0;                // max demand over rows; 0 when the grid is empty
  double minimal_a0 = 1.0;            // max(1, ceil(raw_a0)); integral by convention
};

// A concrete L-function the rest of the library operates on: either L(s, chi)
// for a primitive nonprincipal Dirichlet character (degree 1) or the L-function
// of the weight-12 level-1 cusp form in the normalization with lambda(1) = 1
// and |alpha_j(p)| = 1 (degree 2). Immutable after construction; coefficient,
// prime, and Satake tables are fully materialized, so every accessor is safe
// to call concurrently.
class LFunctionInstance {
public:
  Kind kind() const noexcept { return kind_; }
  int degree() const noexcept { return degree_; }
  const GammaData& gamma() const noexcept { return gamma_; }
  int kappa() const noexcept { return kappa_; }
  double theta() const noexcept { return theta_; }
  // Minimal integral A0 with d <= kappa^2 + A0/log(e x) on every window the
  // cache covers; measured at construction, never assumed.
  double a0() const noexcept { return a0_; }
  // min{kappa (1 - sqrt(2/pi)), 1} + 1/1000
  double ell_kappa() const noexcept { return ell_kappa_; }
  uint64_t cache_bound() const noexcept { return cache_; }
  // The underlying character; null for the cusp form instance.
  const chars::DirichletCharacter* character() const noexcept {
    return chi_ ? &*chi_ : nullptr;
  }

  // lambda(n). 1 <= n <= cache_bound().
  cplx coefficient(uint64_t n) const;

  // a(n) = sum_j alpha_j(p)^k when n = p^k, 0 when n is not a prime power.
  // 1 <= n <= cache_bound().
  cplx a_coefficient(uint64_t n) const;

  // The degree() Satake parameters at a prime p <= cache_bound().
  const cplx* satake(uint64_t p) const;

  // Primes <= cache_bound(), ascending.
  const std::vector<uint32_t>& primes() const noexcept { return primes_; }

  // Analytic conductor q * prod_j (|it + mu_j| + 3).
  double analytic_conductor(double t) const;

  // Exact integer coefficient tau(n) of the weight-12 form; delta only.
  __int128 delta_tau(uint64_t n) const;

  // {kind, modulus/char_index (dirichlet only), degree, kappa, a0, theta,
  //  mu[], root_number, cache_bound} as a compact JSON object.
  std::string descriptor_json() const;

private:
  LFunctionInstance() = default;
  friend LFunctionInstance dirichlet_instance(const chars::DirichletCharacter&);
  friend LFunctionInstance delta_instance(uint64_t);

  Kind kind_ = Kind::dirichlet;
  int degree_ = 1;
  int kappa_ = 1;
  double theta_ = 0.0;
  double a0_ = 1.0;
  double ell_kappa_ = 0.0;
  uint64_t cache_ = 0;
  GammaData gamma_;
  std::optional<chars::DirichletCharacter> chi_;
  std::vector<double> lambda_;   // delta: lambda(n) at index n
  std::vector<__int128> tau_;    // delta: tau(n) at index n
  std::vector<uint32_t> spf_;    // smallest prime factor, 0 at indices 0 and 1
  std::vector<uint32_t> primes_;
  std::vector<cplx> satake_;     // degree_ entries per prime, in primes_ order
};

// Degree-1 instance for a primitive nonprincipal character: lambda(n) = chi(n),
// mu = {parity}, W = tau(chi) / (i^parity sqrt(q)). The principal character is
// rejected: its L-function has a pole and falls outside the working class.
LFunctionInstance dirichlet_instance(const chars::DirichletCharacter& chi);

// Degree-2 instance for the discriminant form: lambda(n) = tau(n)/n^{11/2},
// mu = {11/2, 13/2}, W = 1, kappa = 2. tau is computed exactly by integer
// convolution up to n_cache <= 10^6.
LFunctionInstance delta_instance(uint64_t n_cache);

// Short identifying label for report inputs and filenames, e.g.
// "dirichlet q=4 index=1" or "delta".
std::string instance_label(const LFunctionInstance& inst);

// Measures D(x) = sum_{x < n <= e x} |a(n)|^2 Lambda(n)/n on the grid
// x = 1, e, e^2, ... <= x_max and returns the per-window table together with
// the minimal A0 satisfying D(x) <= kappa^2 + A0/log(e x) everywhere. Every
// window must lie inside the coefficient cache: e * x <= cache_bound().
WeakRamanujanReport verify_weak_ramanujan(const LFunctionInstance& inst, double x_max);

} // namespace lfl::inst

#endif
