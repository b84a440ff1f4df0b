#ifndef LFUNCLAB_SPECIAL_HPP
#define LFUNCLAB_SPECIAL_HPP

#include <vector>

#include "lfunclab/common.hpp"

namespace lfl::special {

// Smooth bump supported on [1, e]: u(t) = C_u exp(-1/((t-1)(e-t))) inside the
// interval and 0 outside, with C_u fixed at construction so the total mass
// is 1. Immutable once built; every evaluation is pure.
class BumpKernel {
public:
  BumpKernel();

  // u(t). Zero outside (1, e), nonnegative everywhere.
  double u(double t) const;

  // v(x) = integral of u over [x, inf): 1 for x <= 1, 0 for x >= e,
  // nonincreasing in between. x >= 0 required.
  double v(double x) const;

  // u-hat(s) = integral of u(t) t^{s-1} over the support; entire in s.
  // Composite quadrature, 1e-11 absolute for the arguments used here.
  cplx mellin_u_hat(cplx s) const;

  double normalizer() const { return normalizer_; }

  // sup |u^(k)| for k = 0..6, measured on a 10^4-point interior grid. The
  // derivatives come from the recurrence u^(k+1) = sum_j C(k,j) u^(j) g^(k+1-j)
  // with g = log(u/C_u), whose derivatives are closed-form rationals.
  const std::vector<double>& u_max_deriv() const { return u_max_deriv_; }

  // Endpoints of the composite Gauss-Legendre subdivision of [1, e].
  const std::vector<double>& panels() const { return panels_; }

private:
  double normalizer_ = 0.0;
  std::vector<double> u_max_deriv_;
  std::vector<double> panels_;
  std::vector<double> tail_; // v at each panel endpoint; tail_.back() = 0
};

// Principal-branch exponential integral E_1(z). Power series for |z| <= 4,
// modified-Lentz continued fraction beyond; 1e-11 for |z| <= 50. z = 0 is a
// pole of the integrand; the closed negative real axis is the branch cut.
cplx exp_integral_e1(cplx z);

namespace detail {
// The two E_1 evaluation branches, exposed so the switchover annulus can be
// cross-checked. Preconditions as for exp_integral_e1.
cplx e1_series(cplx z);
cplx e1_contfrac(cplx z);
} // namespace detail

// U(z) = integral of u(x) E_1(z log x) over the support of u, to 1e-9.
// Arguments must satisfy Re z > -branch_guard (the zero-sum hypothesis
// Re > -c / log X, already scaled by log X); negative real z lands z log x
// on the E_1 branch cut and is rejected, as is z = 0.
cplx capital_U(cplx z, const BumpKernel& kernel, double branch_guard = 0.5);

// Principal-branch log Gamma: Stirling after shifting to Re >= 1, |z| >= 12;
// reflection for real z < 1/2, where Im is 0 or pi by the sign of Gamma.
// 1e-10 absolute for |z| <= 100. Nonpositive integers are poles.
cplx log_gamma(cplx z);

// Hurwitz zeta for a in (0, 1], Euler-Maclaurin with shift
// M = max(15, ceil |Im s|) and 10 Bernoulli correction terms; 1e-10 relative
// for |Im s| <= 200. s = 1 is the pole.
cplx hurwitz_zeta(cplx s, double a);

} // namespace lfl::special

#endif
