#ifndef LFUNCLAB_MEANVALUE_HPP
#define LFUNCLAB_MEANVALUE_HPP

#include <string>
#include <vector>

#include "lfunclab/common.hpp"
#include "lfunclab/eval.hpp"
#include "lfunclab/instances.hpp"
#include "lfunclab/report.hpp"

// Mean-value machinery on the line Re s = 1 + 1/log x: partial coefficient
// sums, the line maximizer t1, the Halasz functional M, Lipschitz / factoring
// defect reports, the twist selection (phi, N), Mertens-type prime sums, and
// the |cos| prime sum.
//
// Every peak search scans the grid t = j/(4 log x) over |t| <= W with
// W = min((log x)^kappa, t_cap, 60) and breaks ties toward smaller |t|, then
// nonnegative t. The 60 is the evaluator's height ceiling; when it truncates
// the window the report carries the flag "window-clamped-to-height-cap".
// Grid panels are evaluated in parallel and merged in index order, so results
// are deterministic.
namespace lfl::mv {

// Argmax of |L(1 + 1/log x + it)| over the scanned window, after golden
// section refinement of the best grid cell down to 1e-6 in t. peak is the
// objective at t1. The refined point is kept only if its objective is >= the
// best grid value, so refinement never loses to the grid. For self-dual
// instances only t >= 0 is scanned (the objective is even) and t1 >= 0.
struct Maximizer {
  double t1 = 0.0;
  double peak = 0.0;
};

// Output of twist_phi. phi is the grid argmax of |L(1+1/y0+it)| / |1+1/y0+it|
// (no refinement: phi always lies exactly on the scan grid) and m_value
// satisfies objective(phi) = e^{-M} y0^kappa. defect is
// |sum_{n<=e^{y0}} lambda(n) n^{-i phi} - (1+i phi) e^{-i phi y0} S| with
// S the plain partial sum, and rhs_budget = e^{y0} y0^{kappa-1-1/5} is the
// envelope it is meant to be measured against. n_value is N in
// |S| = e^{y0} y0^{kappa-1} / N. phi_real_ratio = |phi| y0 / N^{6/kappa} for
// self-dual instances, 0 otherwise.
struct TwistSelection {
  double y0 = 0.0;
  double n_value = 0.0;
  double phi = 0.0;
  double m_value = 0.0;
  double scan_step = 0.0;
  double scan_cap = 0.0; // effective half-width actually scanned
  double defect = 0.0;
  double rhs_budget = 0.0;
  double phi_real_ratio = 0.0;
  // "n-hypothesis-violated" when N > y0^{1/10} (the twist lemma's smallness
  // hypothesis; at desk scale it usually fails and results are descriptive),
  // "window-clamped-to-height-cap" when the scan hit the evaluator ceiling.
  std::vector<std::string> hypothesis_flags;
};

// Lambda-weighted prime sums up to e^{y0} and their gaps against the
// logarithmic mainterms. gap_a2 = sum_a2 - kappa^2 log y0,
// gap_plain = sum_plain - log y0.
struct MertensSums {
  double sum_a2 = 0.0;    // sum |a(n)|^2 Lambda(n)/(n log n), 2 <= n <= e^{y0}
  double sum_plain = 0.0; // sum Lambda(n)/(n log n) over the same range
  double gap_a2 = 0.0;
  double gap_plain = 0.0;
};

// S(x, phi) = sum_{n<=x} lambda(n) n^{-i phi}, exact compensated summation in
// ascending n. x < 1 gives 0. x past the coefficient cache is a resource
// error.
cplx partial_sum_lambda(const inst::LFunctionInstance& inst, double x, double phi);

// Peak of |L(1 + 1/log x + it)| over the scanned window. Requires x >= 3.
// t_cap = 0 degenerates the window to {0} and forces t1 = 0.
Maximizer maximizer_t1(const inst::LFunctionInstance& inst, double x, double t_cap = 200.0);

// M defined by max_t |L(1+1/log x+it)| / |1+1/log x+it| = e^{-M} (log x)^kappa
// over the same window as maximizer_t1. Note the two argmaxes genuinely
// differ: the denominator pulls this peak toward t = 0 while |L| alone peaks
// wherever the Euler product resonates. Requires x >= 3.
double halasz_M(const inst::LFunctionInstance& inst, double x, double t_cap = 200.0);

// |S(x,0)| against the mean-value envelope
// (1+M) e^{-M} x (log x)^{kappa-1} + x (log log x)^2 / log x.
// residual = ratio, pass iff <= ceiling. constants_used carries m, t_cap, the
// effective window, the scan step, and trivial_ratio = |S| / (x (log x)^{kappa-1}).
report::IdentityReport halasz_ratio(const inst::LFunctionInstance& inst, double x,
                                    double ceiling = 20.0, double t_cap = 200.0);

// LHS |x^{-1} S(x,t1) - (omega/x) S(x/omega,t1)| with t1 from maximizer_t1,
// against the envelope
//   ((log omega + (log log x)^2)/log x)^e * (log x)^{kappa-1}
//     * log(log x / (1 + log omega)),
// e = min{1, kappa (1 - sqrt(2/pi))}. Requires x >= 3 and
// 1 <= omega <= x^{1/3}; omega = 1 makes the LHS exactly 0. The envelope's
// last factor must be positive (log x > 1 + log omega), else singular_error;
// only tiny x near the omega ceiling can trip this.
report::IdentityReport lipschitz_defect(const inst::LFunctionInstance& inst, double x,
                                        double omega, double ceiling = 10.0,
                                        double t_cap = 200.0);

// LHS |S(x,0) - x^{i phi}/(1+i phi) * S(x,phi)| against the envelope
// x (log log x)^kappa log log(e+|phi|) / log x * exp(sum over prime powers
// p^k <= x of |a(p^k) - p^{ik phi}| / (k p^k)). phi = 0 zeroes both sides
// exactly and reports residual 0. Requires 3 <= x <= cache.
report::IdentityReport factoring_defect(const inst::LFunctionInstance& inst, double x,
                                        double phi, double ceiling = 10.0);

// Selects the twist phi at height y0 (see TwistSelection). Requires y0 >= 1
// and e^{y0} <= cache. S(e^{y0}, 0) = 0 leaves N undefined: singular_error,
// unless allow_vanishing_sum is set, in which case the selection is returned
// with n_value = +inf and the flag "undefined-N" (phi and the scan fields do
// not depend on the partial sum, so they stay well defined).
TwistSelection twist_phi(const inst::LFunctionInstance& inst, double y0, double t_cap = 200.0,
                         bool allow_vanishing_sum = false);

// Lambda-weighted sums up to e^{y0}; see MertensSums. Requires y0 > 0 and
// e^{y0} <= cache. e^{y0} < 2 gives empty sums.
MertensSums mertens_sums(const inst::LFunctionInstance& inst, double y0);

// LHS sum_{p<=x} |cos(tau log p)| / p against the envelope
// (2/pi) log(log x / log y) + log log y with log y = max(c (log log x)^2,
// 1/|tau|). residual = LHS - RHS (a difference, not a ratio), pass iff
// <= slack. tau = 0 is degenerate: the sum is just sum 1/p; the report gets
// rhs = 0, residual = 0, and the flag "tau-zero-degenerate". Requires
// 10^3 <= x <= 5.1e8 (sieve ceiling).
report::IdentityReport cosine_sum(double tau, double x, double c = 1.0, double slack = 10.0);

} // namespace lfl::mv

#endif
