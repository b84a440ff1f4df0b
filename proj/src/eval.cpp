#include "lfunclab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "lfunclab/arith.hpp"
#include "lfunclab/characters.hpp"

namespace lfl::eval {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLog2Pi = 1.83787706640934548356065947281123527;
constexpr double kHeightCeiling = 60.0;
constexpr double kDeg2LeftEdge = -5.0;
// Degree-1 prime sums evaluate the character directly, so they are limited by
// sieve memory rather than by the instance cache; 5.1e8 covers X = e^20.
constexpr double kSieveCeiling = 5.1e8;
constexpr uint64_t kAnchorLimit = 1000000;
constexpr uint64_t kAnchorFloor = 300000;
// Per-node relative noise of the tilted quadrature: the exponent's phase
// reaches ~200 at the height ceiling, so a node carries a couple hundred ulps,
// not one.
constexpr double kNodeNoise = 2.5e-14;

void require_config(const EvalConfig& cfg) {
  if (!(cfg.target_accuracy > 0.0) || !(cfg.afe_cutoff_multiplier > 0.0) ||
      !(cfg.log_continuation_step > 0.0))
    fail(Status::invalid_argument, "eval: config fields must be positive");
}

void require_height(cplx s) {
  if (!(std::abs(s.imag()) <= kHeightCeiling))
    fail(Status::domain_error, "eval: |Im s| exceeds the supported height 60");
}

// q^{-s} sum_a chi(a) zeta(s, a/q). The three branches keep the removable
// singularity at s = 1 under control: the per-term poles 1/(s-1) carry the
// coefficient sum_a chi(a) = 0, so they can be dropped before they cancel
// numerically, and at s = 1 exactly the regular parts are -psi(a/q).
cplx dirichlet_l(const inst::LFunctionInstance& in, cplx s) {
  const auto& chi = *in.character();
  const auto q = static_cast<int64_t>(chi.modulus());
  const double qd = static_cast<double>(q);
  if (s == cplx(1.0, 0.0)) {
    KahanC acc;
    for (int64_t a = 1; a < q; ++a) {
      cplx c = chi.value(a);
      if (c == cplx(0.0, 0.0)) continue;
      acc.add(c * -boost::math::digamma(static_cast<double>(a) / qd));
    }
    return acc.value() / qd;
  }
  const bool near_pole = std::abs(s - cplx(1.0, 0.0)) <= 0.05;
  const cplx pole = near_pole ? 1.0 / (s - cplx(1.0, 0.0)) : cplx(0.0, 0.0);
  KahanC acc;
  for (int64_t a = 1; a < q; ++a) {
    cplx c = chi.value(a);
    if (c == cplx(0.0, 0.0)) continue;
    acc.add(c * (special::hurwitz_zeta(s, static_cast<double>(a) / qd) - pole));
  }
  return std::exp(-s * std::log(qd)) * acc.value();
}

// log of q^{s/2} pi^{-(s+mu)/2} Gamma((s+mu)/2), mu = parity.
cplx dirichlet_gamma_log(const inst::LFunctionInstance& in, cplx s) {
  const double q = static_cast<double>(in.gamma().conductor);
  const cplx half_arg = 0.5 * (s + in.gamma().shifts[0]);
  return 0.5 * s * std::log(q) - half_arg * std::log(kPi) +
         special::log_gamma(half_arg);
}

// log of the degree-2 archimedean factor. By the Legendre duplication of the
// two half-integer gamma factors it collapses to 2 (2 pi)^{-w} Gamma(w) with
// w = s + 11/2, which is also the weight the Mellin integral carries.
cplx delta_gamma_log(cplx s) {
  const cplx w = s + cplx(5.5, 0.0);
  return cplx(std::numbers::ln2, 0.0) - w * kLog2Pi + special::log_gamma(w);
}

// Samples of G(x + ic) for x >= 0, where G(x) = e^{6x} f(i e^x) is the even
// Schwartz profile of the discriminant form. Values at x < 0 follow from
// G(-x + ic) = conj(G(x + ic)) (evenness plus realness on the axis), so the
// tau series is only ever summed where it converges fastest.
struct TiltedProfile {
  const std::vector<double>& taud; // tau(n) at index n
  double c = 0.0;                  // tilt of the integration line, |c| < pi/2
  double cos_c = 1.0;
  double sin_c = 0.0;

  cplx g(double x) const {
    const double ex = std::exp(x);
    const cplx z(ex * cos_c, ex * sin_c); // e^{x + ic}
    const cplx front(6.0 * x, 6.0 * c);
    KahanC acc;
    double peak = 0.0;
    int below = 0;
    for (std::size_t n = 1; n < taud.size(); ++n) {
      const cplx term = taud[n] * std::exp(front - (2.0 * kPi * static_cast<double>(n)) * z);
      acc.add(term);
      const double m = std::abs(term);
      peak = std::max(peak, m);
      if (m < 1e-22 * peak) {
        if (++below >= 3) break;
      } else {
        below = 0;
      }
    }
    return acc.value();
  }
};

struct TrapSums {
  cplx sum{0.0, 0.0};
  double abs_sum = 0.0; // h * sum of node magnitudes; the roundoff scale
};

// Trapezoid sum of G(x + ic) e^{(w-6)(x + ic)} over the tilted line at step h,
// marching outward until the nodes are negligible. The integrand is entire in
// the strip |Im| < pi/2, so the error decays like e^{-2 pi (pi/2 - |c|) / h}.
TrapSums tilted_trapezoid(const TiltedProfile& pr, cplx w, double h) {
  const cplx wm6 = w - cplx(6.0, 0.0);
  const cplx ic(0.0, pr.c);
  KahanC acc;
  Kahan mags;
  const cplx v0 = pr.g(0.0) * std::exp(wm6 * ic);
  acc.add(v0);
  mags.add(std::abs(v0));
  double peak = std::abs(v0);
  int below = 0;
  for (int j = 1; j * h <= 14.0; ++j) {
    const double x = j * h;
    const cplx gj = pr.g(x);
    const cplx right = gj * std::exp(wm6 * (cplx(x, 0.0) + ic));
    const cplx left = std::conj(gj) * std::exp(wm6 * (cplx(-x, 0.0) + ic));
    acc.add(right);
    acc.add(left);
    const double m = std::max(std::abs(right), std::abs(left));
    mags.add(std::abs(right));
    mags.add(std::abs(left));
    peak = std::max(peak, m);
    if (m < 1e-18 * peak) {
      if (++below >= 3) break;
    } else {
      below = 0;
    }
  }
  return {h * acc.value(), h * mags.value()};
}

// Completed function of the discriminant form, 2 * integral of the tilted
// trapezoid integrand. The tilt c(t) shrinks the factor e^{(pi/2) |t|} by
// which the real-line integrand exceeds the answer down to e^{(pi/2 - c) |t|},
// which keeps binary64 roundoff at the scale of the result for |t| <= 60.
cplx delta_completed(const inst::LFunctionInstance& in, cplx s, const EvalConfig& cfg) {
  if (!(s.real() > kDeg2LeftEdge))
    fail(Status::domain_error, "eval: degree-2 values are supported for Re s > -5");
  const double t = s.imag();
  const cplx w = s + cplx(5.5, 0.0);

  const double n_formula =
      std::ceil(cfg.afe_cutoff_multiplier * std::sqrt(in.analytic_conductor(t)) / (2.0 * kPi));
  if (!(n_formula <= static_cast<double>(in.cache_bound())))
    fail(Status::resource_error, "eval: coefficient truncation length exceeds the cache");
  const auto n_cap = static_cast<std::size_t>(n_formula);
  std::vector<double> taud(n_cap + 1, 0.0);
  for (std::size_t n = 1; n <= n_cap; ++n)
    taud[n] = static_cast<double>(in.delta_tau(n));

  const double c =
      t == 0.0 ? 0.0 : std::copysign(std::min(1.42, 0.05 * std::max(0.0, std::abs(t) - 2.0)), t);
  const TiltedProfile pr{taud, c, std::cos(c), std::sin(c)};

  // Scale of the archimedean factor alone. Tolerances are taken relative to
  // max(|result|, 1e-3 * this), so accuracy is judged against the size of L
  // rather than against an accidental near-zero of the completed function.
  const double gamma_scale = 2.0 * std::exp(-w.real() * kLog2Pi + special::log_gamma(w).real());

  cplx prev{0.0, 0.0};
  bool have_prev = false;
  double h = 0.25;
  for (int level = 0; level < 9; ++level, h *= 0.5) {
    const TrapSums cur = tilted_trapezoid(pr, w, h);
    if (have_prev) {
      const double scale = std::max(std::abs(cur.sum), 1e-3 * gamma_scale);
      const double tol = std::max(0.1 * cfg.target_accuracy * scale, kNodeNoise * cur.abs_sum);
      if (std::abs(cur.sum - prev) <= tol) {
        if (kNodeNoise * cur.abs_sum > cfg.target_accuracy * scale)
          fail(Status::domain_error,
               "eval: requested accuracy is not achievable at this height in binary64");
        return 2.0 * cur.sum;
      }
    }
    prev = cur.sum;
    have_prev = true;
  }
  fail(Status::domain_error, "eval: quadrature for the completed function did not converge");
}

// a(n) at a prime power, with the character evaluated directly so degree 1
// never depends on the coefficient cache.
cplx prime_power_a(const inst::LFunctionInstance& in, uint64_t pk) {
  if (in.degree() == 1) return in.character()->value(static_cast<int64_t>(pk));
  return in.a_coefficient(pk);
}

} // namespace

cplx l_value(const inst::LFunctionInstance& in, cplx s, const EvalConfig& cfg) {
  require_config(cfg);
  require_height(s);
  if (in.degree() == 1) return dirichlet_l(in, s);
  return delta_completed(in, s, cfg) * std::exp(-delta_gamma_log(s));
}

cplx completed_l(const inst::LFunctionInstance& in, cplx s, const EvalConfig& cfg) {
  require_config(cfg);
  require_height(s);
  if (in.degree() == 1) return dirichlet_l(in, s) * std::exp(dirichlet_gamma_log(in, s));
  return delta_completed(in, s, cfg);
}

cplx hardy_rotation(const inst::LFunctionInstance& in) {
  if (!in.gamma().self_dual)
    fail(Status::unsupported, "eval: the critical-line profile needs a self-dual instance");
  return std::polar(1.0, -0.5 * std::arg(in.gamma().root_number));
}

double hardy_z(const inst::LFunctionInstance& in, double t, const EvalConfig& cfg) {
  const cplx rot = hardy_rotation(in);
  return (rot * completed_l(in, cplx(0.5, t), cfg)).real();
}

cplx log_l(const inst::LFunctionInstance& in, cplx s, const EvalConfig& cfg) {
  require_config(cfg);
  require_height(s);

  // Anchor on the line Re = 3, where the prime-power series converges
  // absolutely (the tail beyond 1e6 is below 1e-13).
  const cplx z0(3.0, s.imag());
  uint64_t limit = kAnchorLimit;
  if (in.degree() >= 2) {
    limit = std::min(limit, in.cache_bound());
    if (limit < kAnchorFloor)
      fail(Status::resource_error,
           "eval: log L needs a coefficient cache of at least 3e5 for its anchor series");
  }
  KahanC acc;
  arith::for_each_prime_power(limit, [&](uint64_t, int k, uint64_t pk) {
    const cplx a = prime_power_a(in, pk);
    if (a == cplx(0.0, 0.0)) return;
    acc.add(a / static_cast<double>(k) * std::exp(-z0 * std::log(static_cast<double>(pk))));
  });
  cplx lg = acc.value();

  double remaining = s.real() - 3.0;
  if (remaining == 0.0) return lg;
  const double sgn = remaining > 0.0 ? 1.0 : -1.0;
  remaining = std::abs(remaining);

  cplx z = z0;
  cplx lcur = l_value(in, z, cfg);
  while (remaining > 0.0) {
    double st = std::min(cfg.log_continuation_step, remaining);
    for (;;) {
      const cplx znext = z + cplx(sgn * st, 0.0);
      const cplx lnext = l_value(in, znext, cfg);
      if (lnext == cplx(0.0, 0.0))
        fail(Status::branch_error, "eval: continuation ray hits a zero of L");
      const cplx dl = std::log(lnext / lcur);
      if (std::abs(dl.imag()) < kPi / 4.0) {
        lg += dl;
        z = znext;
        lcur = lnext;
        remaining -= st;
        break;
      }
      st *= 0.5;
      if (st < 1e-6)
        fail(Status::branch_error,
             "eval: continuation ray passes within 1e-6 of a zero; the branch is ambiguous");
    }
  }
  return lg;
}

cplx prime_sum_side(const inst::LFunctionInstance& in, cplx s, double X,
                    const special::BumpKernel& kernel) {
  if (!(X > 1.0)) fail(Status::invalid_argument, "eval: prime sum cutoff must exceed 1");
  if (in.degree() >= 2) {
    if (!(X <= static_cast<double>(in.cache_bound())))
      fail(Status::resource_error, "eval: prime sum cutoff exceeds the coefficient cache");
  } else if (!(X <= kSieveCeiling)) {
    fail(Status::resource_error, "eval: prime sum cutoff exceeds the sieve ceiling 5.1e8");
  }
  const double logX = std::log(X);
  KahanC acc;
  arith::for_each_prime_power(static_cast<uint64_t>(X), [&](uint64_t, int k, uint64_t pk) {
    const double lpk = std::log(static_cast<double>(pk));
    if (!(lpk < logX)) return; // n < X strictly; v also vanishes at the edge
    const double v = kernel.v(std::exp(lpk / logX));
    if (v == 0.0) return;
    const cplx a = prime_power_a(in, pk);
    if (a == cplx(0.0, 0.0)) return;
    acc.add(a * (v / static_cast<double>(k)) * std::exp(-s * lpk));
  });
  return acc.value();
}

report::IdentityReport convexity_check(const inst::LFunctionInstance& in, double sigma, double t,
                                       double ceiling, const EvalConfig& cfg) {
  require_config(cfg);
  if (!(ceiling > 0.0)) fail(Status::invalid_argument, "eval: ceiling must be positive");
  if (!(sigma >= 0.5 && sigma <= 2.0))
    fail(Status::domain_error, "eval: convexity check covers sigma in [1/2, 2]");

  const double measured = std::abs(l_value(in, cplx(sigma, t), cfg));
  const double cond = in.analytic_conductor(0.0);
  const double m = in.degree();
  const double kap = in.kappa();
  const double envelope = std::pow(cond, 0.5 * (1.0 - sigma)) *
                          std::pow(std::log(cond), kap * (2.0 * sigma - 1.0)) *
                          std::pow(1.0 + std::abs(t), 0.5 * m * (1.0 - sigma));

  report::IdentityReport rep;
  rep.op = "convexity";
  std::ostringstream os;
  os << inst::instance_label(in) << " sigma=" << sigma << " t=" << t;
  rep.input = os.str();
  rep.lhs = measured;
  rep.rhs = envelope;
  rep.residual = measured / envelope;
  rep.bound_value = ceiling;
  rep.pass = rep.residual <= ceiling;
  rep.constants_used["ceiling"] = ceiling;
  rep.constants_used["conductor"] = cond;
  if (sigma > 1.0) rep.hypothesis_flags.push_back("sigma-right-of-one-series-regime");
  return rep;
}

} // namespace lfl::eval
