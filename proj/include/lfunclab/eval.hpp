#ifndef LFUNCLAB_EVAL_HPP
#define LFUNCLAB_EVAL_HPP

#include "lfunclab/common.hpp"
#include "lfunclab/instances.hpp"
#include "lfunclab/report.hpp"
#include "lfunclab/special.hpp"

namespace lfl::eval {

// Numerical knobs shared by the evaluators. Every field must be positive.
struct EvalConfig {
  // Absolute/relative accuracy goal for values of L and its completion.
  double target_accuracy = 1e-9;
  // Coefficient truncation: ceil(multiplier * sqrt(conductor(t)) / (2 pi))
  // terms of the Dirichlet series enter the smoothed degree-2 evaluation.
  double afe_cutoff_multiplier = 10.0;
  // Maximum horizontal step when continuing log L away from its anchor.
  double log_continuation_step = 0.05;
};

// L(s). Degree 1 uses the finite decomposition q^{-s} sum_a chi(a) zeta(s, a/q);
// the pole of each Hurwitz term is subtracted explicitly near s = 1 (the sum of
// the subtracted poles vanishes for nonprincipal chi), and at s = 1 exactly the
// value is the digamma closed form -(1/q) sum_a chi(a) psi(a/q).
// Degree 2 evaluates the completed function (see below) and divides by the
// archimedean factor.
//
// Preconditions: |Im s| <= 60; for degree 2 additionally Re s > -5 (further
// left the archimedean division hits its poles at the trivial zeros).
// Accuracy: target_accuracy away from s = 1; within |s - 1| < 0.05 of the
// degree-1 pole region the subtracted-pole cancellation costs roughly a digit
// per factor of 10 in |s - 1|.
cplx l_value(const inst::LFunctionInstance& inst, cplx s,
             const EvalConfig& cfg = {});

// Completed function q^{s/2} prod_j pi^{-(s+mu_j)/2} Gamma((s+mu_j)/2) L(s).
// Satisfies completed(s) = W * conj(completed(1 - conj s)) with the instance's
// root number W; the archimedean pi-powers are what make that reflection hold
// with a unit-modulus constant.
//
// Degree 2 is computed directly from the underlying cusp form: with
// G(x) = e^{6x} f(i e^x) (smooth, even, Schwartz on the real line),
//   completed(s) = 2 * integral G(x) e^{(s - 1/2) x} dx,
// and the integral is taken over the tilted line x + i c(t), c(t) < pi/2,
// which keeps every quadrature node at the scale of the answer; on the real
// line the integrand is larger than the result by e^{pi |t| / 2}, which is
// exactly the conditioning loss that breaks a naive term-by-term evaluation
// above moderate heights. Trapezoid steps are halved until two refinements
// agree to a tenth of the accuracy goal; the coefficient truncation respects
// the cutoff formula above and never exceeds the instance cache.
//
// Degree-1 arguments at the poles of the gamma factor (trivial zeros of L)
// raise a singular-point error.
cplx completed_l(const inst::LFunctionInstance& inst, cplx s,
                 const EvalConfig& cfg = {});

// Unit-modulus rotation 1/sqrt(W) that makes the completed function real on
// the critical line. Requires a self-dual instance.
cplx hardy_rotation(const inst::LFunctionInstance& inst);

// Real-valued critical-line profile: Re(hardy_rotation * completed(1/2 + it)).
// Sign changes locate critical-line zeros of odd order. Requires a self-dual
// instance and |t| <= 60.
double hardy_z(const inst::LFunctionInstance& inst, double t,
               const EvalConfig& cfg = {});

// Branch of log L(s) continued from the absolutely convergent region: the
// prime-power series is summed at the anchor (3, Im s), then the value is
// carried horizontally to s in steps of at most cfg.log_continuation_step,
// halving the step until each increment of the argument is below pi/4. A ray
// that passes within about 1e-6 of a zero exhausts the halving and raises a
// branch-ambiguity error.
cplx log_l(const inst::LFunctionInstance& inst, cplx s,
           const EvalConfig& cfg = {});

// sum_{n = p^k < X} a(n) Lambda(n) / (n^s log n) * v(n^{1 / log X}) with the
// smooth cutoff v of `kernel` (v == 1 below X^{1/e}, v == 0 at X), so the sum
// is finite and X <= 2 gives exactly zero. Degree 2 requires X to stay within
// the instance's coefficient cache; degree 1 evaluates the character directly
// and is limited only by the prime sieve (X <= 5.1e8).
cplx prime_sum_side(const inst::LFunctionInstance& inst, cplx s, double X,
                    const special::BumpKernel& kernel);

// Measures |L(sigma + it)| against the convexity-shaped envelope
//   C^{(1-sigma)/2} (log C)^{kappa (2 sigma - 1)} (1 + |t|)^{m (1-sigma)/2},
// C = analytic conductor at height 0, m = degree. residual is the ratio
// measured/envelope and pass <=> ratio <= ceiling. sigma in [1/2, 2]: the
// envelope interpolates the critical and edge exponents on [1/2, 1] and is
// dominated by the series bound to the right of 1, where the same report
// shape stays useful for monitoring.
report::IdentityReport convexity_check(const inst::LFunctionInstance& inst,
                                       double sigma, double t,
                                       double ceiling = 50.0,
                                       const EvalConfig& cfg = {});

} // namespace lfl::eval

#endif
