#include "lfunclab/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "lfunclab/arith.hpp"

namespace lfl::special {

namespace {

constexpr double kSupportEnd = std::numbers::e;
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr int kPanels = 64;

double bump_raw(double t) {
  double d = (t - 1.0) * (kSupportEnd - t);
  return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
}

} // namespace

BumpKernel::BumpKernel() {
  panels_.resize(kPanels + 1);
  for (int i = 0; i <= kPanels; ++i)
    panels_[i] = 1.0 + (kSupportEnd - 1.0) * i / kPanels;
  panels_.front() = 1.0;
  panels_.back() = kSupportEnd;

  std::vector<double> piece(kPanels);
  for (int p = 0; p < kPanels; ++p)
    piece[p] = arith::integrate_gl32(bump_raw, panels_[p], panels_[p + 1], 1);
  Kahan mass;
  for (double x : piece) mass.add(x);
  normalizer_ = 1.0 / mass.value();

  // Tail accumulated from the right so v never goes negative and matches the
  // per-panel quadrature exactly at the panel seams.
  tail_.assign(kPanels + 1, 0.0);
  Kahan t;
  for (int p = kPanels - 1; p >= 0; --p) {
    t.add(piece[p]);
    tail_[p] = normalizer_ * t.value();
  }

  // g(t) = -(1/(e-1)) (1/(t-1) + 1/(e-t)), so
  // g^(i)(t) = -(i!/(e-1)) ((-1)^i/(t-1)^{i+1} + 1/(e-t)^{i+1}).
  static constexpr double binom[6][6] = {
      {1, 0, 0, 0, 0, 0},  {1, 1, 0, 0, 0, 0},   {1, 2, 1, 0, 0, 0},
      {1, 3, 3, 1, 0, 0},  {1, 4, 6, 4, 1, 0},   {1, 5, 10, 10, 5, 1},
  };
  const double beta = 1.0 / (kSupportEnd - 1.0);
  const int grid = 10000;
  u_max_deriv_.assign(7, 0.0);
  for (int i = 0; i < grid; ++i) {
    double t0 = 1.0 + (kSupportEnd - 1.0) * (i + 0.5) / grid;
    double u0 = normalizer_ * bump_raw(t0);
    if (u0 == 0.0) continue;
    double a = t0 - 1.0, b = kSupportEnd - t0;
    std::array<double, 7> dg{};
    double fact = 1.0, pa = a * a, pb = b * b;
    for (int k = 1; k <= 6; ++k) {
      fact *= k;
      dg[k] = -beta * fact * ((k % 2 ? -1.0 : 1.0) / pa + 1.0 / pb);
      pa *= a;
      pb *= b;
    }
    std::array<double, 7> du{};
    du[0] = u0;
    for (int k = 0; k < 6; ++k) {
      double s = 0.0;
      for (int j = 0; j <= k; ++j) s += binom[k][j] * du[j] * dg[k - j + 1];
      du[k + 1] = s;
    }
    for (int k = 0; k <= 6; ++k)
      u_max_deriv_[k] = std::max(u_max_deriv_[k], std::abs(du[k]));
  }
}

double BumpKernel::u(double t) const { return normalizer_ * bump_raw(t); }

double BumpKernel::v(double x) const {
  if (!(x >= 0.0)) fail(Status::domain_error, "bump_v: x must be >= 0");
  if (x <= 1.0) return 1.0;
  if (x >= kSupportEnd) return 0.0;
  std::size_t j = static_cast<std::size_t>(
      std::upper_bound(panels_.begin(), panels_.end(), x) - panels_.begin() - 1);
  j = std::min(j, static_cast<std::size_t>(kPanels - 1));
  double part = arith::integrate_gl32(bump_raw, x, panels_[j + 1], 1);
  return std::min(1.0, normalizer_ * part + tail_[j + 1]);
}

cplx BumpKernel::mellin_u_hat(cplx s) const {
  cplx sm1 = s - 1.0;
  auto f = [&](double t) -> cplx {
    double w = bump_raw(t);
    if (w == 0.0) return {0.0, 0.0};
    return w * std::exp(sm1 * std::log(t));
  };
  KahanC acc;
  for (int p = 0; p < kPanels; ++p)
    acc.add(arith::integrate_gl32(f, panels_[p], panels_[p + 1], 1));
  return normalizer_ * acc.value();
}

namespace detail {

cplx e1_series(cplx z) {
  cplx term{1.0, 0.0}; // (-z)^k / k!
  KahanC acc;          // sum over k of (-z)^k / (k k!)
  for (int k = 1; k <= 250; ++k) {
    term *= -z / static_cast<double>(k);
    cplx add = term / static_cast<double>(k);
    acc.add(add);
    if (std::abs(add) < 1e-19 * (1.0 + std::abs(acc.value()))) break;
  }
  return -kEulerGamma - std::log(z) - acc.value();
}

cplx e1_contfrac(cplx z) {
  // E_1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/...))) via modified
  // Lentz with the usual tiny-pivot rescue.
  const double tiny = 1e-300;
  cplx b = z + 1.0;
  cplx c{1.0 / tiny, 0.0};
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i <= 4000; ++i) {
    double a = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    cplx dd = a * d + b;
    if (std::abs(dd) < tiny) dd = tiny;
    d = 1.0 / dd;
    cplx cc = b + a / c;
    if (std::abs(cc) < tiny) cc = tiny;
    c = cc;
    cplx del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) return h * std::exp(-z);
  }
  fail(Status::internal_error, "exp_integral_e1: continued fraction stalled");
}

} // namespace detail

cplx exp_integral_e1(cplx z) {
  if (z == cplx{0.0, 0.0})
    fail(Status::singular_error, "exp_integral_e1: z = 0");
  if (z.imag() == 0.0 && z.real() < 0.0)
    fail(Status::branch_error, "exp_integral_e1: z on the negative real axis");
  return std::abs(z) <= 4.0 ? detail::e1_series(z) : detail::e1_contfrac(z);
}

cplx capital_U(cplx z, const BumpKernel& kernel, double branch_guard) {
  if (!(branch_guard > 0.0))
    fail(Status::invalid_argument, "capital_U: branch guard must be positive");
  if (z == cplx{0.0, 0.0}) fail(Status::singular_error, "capital_U: z = 0");
  if (z.imag() == 0.0 && z.real() < 0.0)
    fail(Status::branch_error, "capital_U: z log x crosses the E_1 branch cut");
  if (!(z.real() > -branch_guard))
    fail(Status::branch_error, "capital_U: Re z <= -branch_guard");
  auto f = [&](double x) -> cplx {
    double w = kernel.u(x);
    if (w == 0.0) return {0.0, 0.0};
    return w * exp_integral_e1(z * std::log(x));
  };
  const std::vector<double>& pan = kernel.panels();
  KahanC acc;
  for (std::size_t p = 0; p + 1 < pan.size(); ++p)
    acc.add(arith::integrate_gl32(f, pan[p], pan[p + 1], 1));
  return acc.value();
}

namespace {

// Stirling at Re(w) >= 1, |w| >= 12: eight Bernoulli terms keep the
// truncation under 5e-16 even on the imaginary-axis side of that region.
cplx stirling_shifted(cplx z) {
  static const std::vector<double> b2 = arith::bernoulli_even(8);
  cplx w = z;
  cplx shift{0.0, 0.0};
  while (w.real() < 1.0 || std::abs(w) < 12.0) {
    shift += std::log(w);
    w += 1.0;
  }
  cplx res = (w - 0.5) * std::log(w) - w +
             0.5 * std::log(2.0 * std::numbers::pi);
  cplx w2 = w * w;
  cplx wp = w;
  for (int j = 1; j <= 8; ++j) {
    res += b2[j - 1] / (2.0 * j * (2.0 * j - 1.0)) / wp;
    wp *= w2;
  }
  return res - shift;
}

// sin(pi x) with the argument reduced first; exact sign at half-integers.
double sin_pi(double x) {
  double n = std::nearbyint(x);
  double r = x - n;
  double s = std::sin(std::numbers::pi * r);
  return std::fmod(n, 2.0) == 0.0 ? s : -s;
}

} // namespace

cplx log_gamma(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
    fail(Status::singular_error, "log_gamma: pole at a nonpositive integer");
  if (z.imag() == 0.0 && z.real() < 0.5) {
    // Gamma(x) Gamma(1-x) = pi / sin(pi x); the sign of Gamma(x) between
    // poles is the sign of sin(pi x), and log of a negative real gets +i pi.
    double s = sin_pi(z.real());
    double re = std::log(std::numbers::pi / std::abs(s)) -
                stirling_shifted(cplx{1.0 - z.real(), 0.0}).real();
    return {re, s < 0.0 ? std::numbers::pi : 0.0};
  }
  return stirling_shifted(z);
}

cplx hurwitz_zeta(cplx s, double a) {
  if (!(a > 0.0) || a > 1.0)
    fail(Status::domain_error, "hurwitz_zeta: a must lie in (0, 1]");
  if (s == cplx{1.0, 0.0})
    fail(Status::singular_error, "hurwitz_zeta: pole at s = 1");
  if (!(std::abs(s.imag()) <= 200.0))
    fail(Status::unsupported, "hurwitz_zeta: |Im s| must be <= 200");

  constexpr int J = 10;
  static const std::vector<double> b2 = arith::bernoulli_even(J);
  const int M = std::max(15, static_cast<int>(std::ceil(std::abs(s.imag()))));

  KahanC acc;
  for (int n = 0; n < M; ++n)
    acc.add(std::exp(-s * std::log(n + a)));
  const double ma = M + a;
  const cplx p = std::exp(-s * std::log(ma)); // (M+a)^{-s}
  acc.add(p * ma / (s - 1.0));                // integral term (M+a)^{1-s}/(s-1)
  acc.add(0.5 * p);
  cplx rising = s;   // s(s+1)...(s+2j-2)
  double fact = 2.0; // (2j)!
  double powma = ma; // (M+a)^{2j-1}
  for (int j = 1; j <= J; ++j) {
    if (j > 1) {
      rising *= (s + (2.0 * j - 3.0)) * (s + (2.0 * j - 2.0));
      fact *= (2.0 * j - 1.0) * (2.0 * j);
      powma *= ma * ma;
    }
    acc.add(p * (b2[j - 1] / fact) * rising / powma);
  }
  return acc.value();
}

} // namespace lfl::special
