#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "lfunclab/arith.hpp"
#include "lfunclab/characters.hpp"
#include "lfunclab/common.hpp"
#include "lfunclab/eval.hpp"
#include "lfunclab/instances.hpp"
#include "lfunclab/special.hpp"

using namespace lfl;
using namespace lfl::inst;
using lfl::eval::completed_l;
using lfl::eval::hardy_z;
using lfl::eval::l_value;
using lfl::eval::log_l;
using lfl::eval::prime_sum_side;

namespace {

constexpr double kPi = std::numbers::pi;

template <typename F>
void require_status(F&& thunk, Status want) {
  try {
    thunk();
    FAIL_CHECK("expected failure with status ", status_name(want));
  } catch (const Error& e) {
    CHECK(e.status() == want);
  }
}

const LFunctionInstance& chi4() {
  static const LFunctionInstance in = dirichlet_instance(chars::character(4, 1));
  return in;
}

const LFunctionInstance& delta6() {
  static const LFunctionInstance in = delta_instance(1000000);
  return in;
}

const LFunctionInstance& quartic5() {
  static const LFunctionInstance in = [] {
    for (const auto& c : chars::enumerate_characters(5))
      if (c.order() == 4) return dirichlet_instance(c);
    fail(Status::internal_error, "no quartic character mod 5");
  }();
  return in;
}

// Limit of an alternating series from its first partial sums by repeated
// pairwise averaging (one binary digit per sweep; 60 partials reach below
// binary64 resolution for totally monotone terms).
double alternating_limit(std::vector<double> partials) {
  while (partials.size() > 1) {
    for (std::size_t i = 0; i + 1 < partials.size(); ++i)
      partials[i] = 0.5 * (partials[i] + partials[i + 1]);
    partials.pop_back();
  }
  return partials[0];
}

std::vector<double> alternating_partials(int count, auto term) {
  std::vector<double> out;
  double s = 0.0;
  for (int k = 0; k < count; ++k) {
    s += (k % 2 == 0 ? 1.0 : -1.0) * term(k);
    out.push_back(s);
  }
  return out;
}

// The odd character mod 4, written out so the series oracles do not depend on
// the character tables under test.
double chi4_hand(uint64_t n) {
  if (n % 2 == 0) return 0.0;
  return n % 4 == 1 ? 1.0 : -1.0;
}

template <typename F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  REQUIRE(flo * f(hi) < 0.0);
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Straight-segment continuation of log L, independent of the one inside
// log_l; used to compare different paths to the same point.
cplx continue_log(const LFunctionInstance& in, cplx from, cplx to, cplx log_from) {
  cplx z = from;
  cplx lcur = l_value(in, z);
  cplx lg = log_from;
  double remaining = std::abs(to - from);
  if (remaining == 0.0) return lg;
  const cplx unit = (to - from) / remaining;
  while (remaining > 0.0) {
    double st = std::min(0.05, remaining);
    for (;;) {
      const cplx znext = z + unit * st;
      const cplx lnext = l_value(in, znext);
      REQUIRE(lnext != cplx(0.0, 0.0));
      const cplx dl = std::log(lnext / lcur);
      if (std::abs(dl.imag()) < kPi / 4.0) {
        lg += dl;
        z = znext;
        lcur = lnext;
        remaining -= st;
        break;
      }
      st *= 0.5;
      REQUIRE(st >= 1e-7);
    }
  }
  return lg;
}

double fe_defect(const LFunctionInstance& in, cplx s) {
  const cplx lhs = completed_l(in, s);
  const cplx rhs = in.gamma().root_number * std::conj(completed_l(in, 1.0 - std::conj(s)));
  return std::abs(lhs - rhs) / std::abs(lhs);
}

} // namespace

TEST_CASE("degree-one values at the classical anchor points") {
  const auto& in = chi4();

  const double catalan = alternating_limit(
      alternating_partials(60, [](int k) { return 1.0 / ((2.0 * k + 1) * (2.0 * k + 1)); }));
  const cplx l2 = l_value(in, {2.0, 0.0});
  CHECK(std::abs(l2.imag()) <= 1e-12);
  CHECK(std::abs(l2.real() - catalan) <= 1e-9);
  CHECK(std::abs(l2.real() - 0.915965594) <= 1e-9);

  const double leibniz =
      alternating_limit(alternating_partials(60, [](int k) { return 1.0 / (2.0 * k + 1); }));
  CHECK(std::abs(leibniz - kPi / 4.0) <= 1e-13); // the accelerator itself
  const cplx l1 = l_value(in, {1.0, 0.0});
  CHECK(std::abs(l1.imag()) <= 1e-12);
  CHECK(std::abs(l1.real() - kPi / 4.0) <= 1e-9);
  CHECK(std::abs(l1.real() - leibniz) <= 1e-9);

  // generic point against the plain Dirichlet series with the hand character
  Kahan series3;
  for (uint64_t n = 1; n <= 200000; ++n)
    series3.add(chi4_hand(n) / (static_cast<double>(n) * n * n));
  const cplx l3 = l_value(in, {3.0, 0.0});
  CHECK(std::abs(l3.real() - series3.value()) <= 1e-9);

  for (const cplx s : {cplx(0.7, 3.3), cplx(1.4, -11.0), cplx(0.5, 21.7)}) {
    const cplx a = l_value(in, std::conj(s));
    const cplx b = std::conj(l_value(in, s));
    CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)));
  }

  // smooth across the switch to the subtracted-pole branch at |s - 1| = 0.05
  const cplx second_diff = l_value(in, {1.03, 0.0}) - 2.0 * l_value(in, {1.05, 0.0}) +
                           l_value(in, {1.07, 0.0});
  CHECK(std::abs(second_diff) <= 1e-3);
}

TEST_CASE("functional equation defect stays below 1e-8 on a 100-point grid") {
  const double sigmas[] = {-0.2, 0.1, 0.4, 0.8, 1.2};
  const double heights[] = {0.7, 1.9, 4.2, 8.8, 13.5, 21.0, 29.0, 38.5, 47.5, 57.0};
  for (const LFunctionInstance* in : {&chi4(), &delta6()}) {
    double worst = 0.0;
    int points = 0;
    for (double sig : sigmas)
      for (double t : heights)
        for (double sign : {1.0, -1.0}) {
          worst = std::max(worst, fe_defect(*in, {sig, sign * t}));
          ++points;
        }
    CHECK(points == 100);
    CHECK(worst <= 1e-8);
    MESSAGE("degree ", in->degree(), " worst relative reflection defect: ", worst);
  }
}

TEST_CASE("hardy profile is real, even, and sees the first zeros") {
  for (const LFunctionInstance* in : {&chi4(), &delta6()}) {
    const cplx rot = eval::hardy_rotation(*in);
    CHECK(std::abs(std::abs(rot) - 1.0) <= 1e-12);
    for (double t : {0.3, 1.7, 5.9, 13.4, 26.0, 41.0, 55.0}) {
      const cplx z = rot * completed_l(*in, {0.5, t});
      CHECK(std::abs(z.imag()) <= 1e-8);
      const double zp = hardy_z(*in, t);
      const double zm = hardy_z(*in, -t);
      CHECK(std::abs(zp - zm) <= 1e-9 * std::max(1.0, std::abs(zp)));
      if (std::abs(zp) > 1e-12) CHECK(zp * zm > 0.0);
    }
  }

  CHECK(std::abs(hardy_z(chi4(), 0.0)) > 0.3);

  const double g1_chi = bisect([&](double t) { return hardy_z(chi4(), t); }, 5.5, 6.5);
  CHECK(std::abs(g1_chi - 6.0209) <= 5e-4);

  const double g1_delta = bisect([&](double t) { return hardy_z(delta6(), t); }, 8.8, 9.6);
  CHECK(std::abs(g1_delta - 9.2224) <= 5e-4);
  CHECK(std::abs(hardy_z(delta6(), 9.22)) < 0.05 * std::abs(hardy_z(delta6(), 8.0)));
}

TEST_CASE("degree-two values match the coefficient series where it converges") {
  const auto& d = delta6();

  Kahan s2_small, s2_large, s3;
  for (uint64_t n = 1; n <= 1000000; ++n) {
    const double lam = d.coefficient(n).real();
    const double nd = static_cast<double>(n);
    if (n <= 100000) s2_small.add(lam / (nd * nd));
    s2_large.add(lam / (nd * nd));
    s3.add(lam / (nd * nd * nd));
  }

  const cplx l2 = l_value(d, {2.0, 0.0});
  CHECK(std::abs(l2.imag()) <= 1e-12);
  const double gap_small = std::abs(l2.real() - s2_small.value());
  const double gap_large = std::abs(l2.real() - s2_large.value());
  MESSAGE("value minus series at s=2: n<=1e5 gap ", gap_small, ", n<=1e6 gap ", gap_large);
  CHECK(gap_small <= 1e-9);
  CHECK(gap_large <= 2e-10);

  const cplx l3 = l_value(d, {3.0, 0.0});
  CHECK(std::abs(l3.real() - s3.value()) <= 1e-10);

  const cplx s0(0.8, 7.3);
  CHECK(std::abs(l_value(d, std::conj(s0)) - std::conj(l_value(d, s0))) <=
        1e-10 * std::abs(l_value(d, s0)));
}

TEST_CASE("log of L is consistent with its exponential and its series") {
  struct Point {
    const LFunctionInstance* in;
    cplx s;
  };
  const Point points[] = {
      {&chi4(), {0.8, 2.0}},  {&chi4(), {1.2, 0.4}}, {&chi4(), {0.5, 14.1}},
      {&delta6(), {0.9, 3.0}}, {&delta6(), {1.5, 0.5}},
  };
  for (const auto& [in, s] : points) {
    const cplx lg = log_l(*in, s);
    const cplx lv = l_value(*in, s);
    CHECK(std::abs(std::exp(lg) - lv) <= 1e-8 * std::abs(lv));
    CHECK(std::abs(lg.real() - std::log(std::abs(lv))) <= 1e-9 * std::max(1.0, std::abs(lg)));
  }

  // prime-power series prefixes converge to the anchored value at s = 3
  const cplx anchor = log_l(chi4(), {3.0, 0.0});
  CHECK(std::abs(anchor.imag()) <= 1e-15);
  double prev_gap = 1e300;
  for (const uint64_t cut : {100ULL, 1000ULL, 10000ULL, 100000ULL}) {
    Kahan prefix;
    arith::for_each_prime_power(cut, [&](uint64_t, int k, uint64_t pk) {
      prefix.add(chi4_hand(pk) / (k * std::pow(static_cast<double>(pk), 3.0)));
    });
    const double gap = std::abs(prefix.value() - anchor.real());
    CHECK(gap <= prev_gap + 1e-15);
    prev_gap = gap;
  }
  CHECK(prev_gap <= 1e-9);

  // two different paths to the same point agree
  for (const auto& [in, s] : {Point{&chi4(), {0.8, 5.0}}, Point{&delta6(), {0.9, 4.0}}}) {
    const cplx lib = log_l(*in, s);
    cplx mine = log_l(*in, {3.0, 0.0});
    mine = continue_log(*in, {3.0, 0.0}, {s.real(), 0.0}, mine);
    mine = continue_log(*in, {s.real(), 0.0}, s, mine);
    CHECK(std::abs(mine - lib) <= 1e-7);
  }

  // a ray that runs into a critical-line zero cannot settle the branch
  const double g1 = bisect([&](double t) { return hardy_z(chi4(), t); }, 5.5, 6.5);
  require_status([&] { log_l(chi4(), {0.2, g1}); }, Status::branch_error);
}

TEST_CASE("prime sums with the smooth cutoff") {
  const special::BumpKernel ker;
  const cplx s(1.3, 0.4);

  // single surviving term below X = 2.2
  const auto& d = delta6();
  const cplx a2 = d.a_coefficient(2);
  const double v2 = ker.v(std::exp(std::log(2.0) / std::log(2.2)));
  const cplx expected = a2 * v2 * std::exp(-s * std::log(2.0));
  const cplx got = prime_sum_side(d, s, 2.2, ker);
  CHECK(std::abs(got - expected) <= 1e-15 * std::abs(expected));

  // chi mod 4 kills n = 2, so the first survivor is n = 3
  const cplx got4 = prime_sum_side(chi4(), s, 3.5, ker);
  const cplx expected4 = chi4().character()->value(3) *
                         ker.v(std::exp(std::log(3.0) / std::log(3.5))) *
                         std::exp(-s * std::log(3.0));
  CHECK(std::abs(got4 - expected4) <= 1e-15 * std::abs(expected4));

  CHECK(prime_sum_side(chi4(), s, 2.0, ker) == cplx(0.0, 0.0));
  CHECK(prime_sum_side(delta6(), s, 1.5, ker) == cplx(0.0, 0.0));

  // approximates log L at the edge of absolute convergence; the cutoff only
  // mutes the largest primes, so the gap is far below the 0.01 contract
  const cplx lg3 = log_l(chi4(), {3.0, 0.0});
  const cplx small_sum = prime_sum_side(chi4(), {3.0, 0.0}, std::exp(6.0), ker);
  CHECK(std::abs(small_sum - lg3) <= 0.01);
  const cplx big_sum = prime_sum_side(chi4(), {3.0, 0.0}, std::exp(20.0), ker);
  CHECK(std::abs(big_sum - lg3) <= 0.01);
  MESSAGE("prime sum vs log L at Re s = 3: X=e^6 gap ", std::abs(small_sum - lg3),
          ", X=e^20 gap ", std::abs(big_sum - lg3));

  // byte-identical reruns
  const cplx again = prime_sum_side(chi4(), s, 3.5, ker);
  CHECK(again == got4);

  require_status([&] { prime_sum_side(chi4(), s, 1.0, ker); }, Status::invalid_argument);
  require_status([&] { prime_sum_side(chi4(), s, 0.5, ker); }, Status::invalid_argument);
  require_status([&] { prime_sum_side(d, s, 2e6, ker); }, Status::resource_error);
  require_status([&] { prime_sum_side(chi4(), s, 6e8, ker); }, Status::resource_error);
}

TEST_CASE("convexity reports") {
  const auto rep = eval::convexity_check(chi4(), 0.5, 0.0);
  CHECK(rep.op == "convexity");
  // conductor 16 at t = 0, so the envelope degenerates to 16^{1/4} = 2
  CHECK(std::abs(rep.rhs.real() - 2.0) <= 1e-12);
  CHECK(std::abs(rep.lhs.real() - std::abs(l_value(chi4(), {0.5, 0.0}))) == 0.0);
  CHECK(rep.residual == doctest::Approx(rep.lhs.real() / rep.rhs.real()).epsilon(1e-12));
  CHECK(rep.bound_value == 50.0);
  CHECK(rep.pass == (rep.residual <= rep.bound_value));
  CHECK(rep.pass);
  CHECK(rep.constants_used.at("ceiling") == 50.0);
  CHECK(rep.hypothesis_flags.empty());

  const auto rep2 = eval::convexity_check(delta6(), 0.75, 2.0);
  const double cond = delta6().analytic_conductor(0.0);
  const double env = std::pow(cond, 0.125) * std::pow(std::log(cond), 2.0 * 0.5) *
                     std::pow(3.0, 2.0 * 0.125);
  CHECK(rep2.rhs.real() == doctest::Approx(env).epsilon(1e-12));
  CHECK(rep2.residual > 0.0);
  CHECK(std::isfinite(rep2.residual));
  CHECK(rep2.pass);

  const double sigma_right = 1.0 + 1.0 / std::log(16.0);
  const auto rep3 = eval::convexity_check(chi4(), sigma_right, 0.5);
  CHECK(rep3.pass);
  REQUIRE(rep3.hypothesis_flags.size() == 1);
  CHECK(rep3.hypothesis_flags[0] == "sigma-right-of-one-series-regime");

  require_status([&] { eval::convexity_check(chi4(), 0.3, 0.0); }, Status::domain_error);
  require_status([&] { eval::convexity_check(chi4(), 2.5, 0.0); }, Status::domain_error);
  require_status([&] { eval::convexity_check(chi4(), 0.8, 70.0); }, Status::domain_error);
  require_status([&] { eval::convexity_check(chi4(), 0.8, 0.0, -1.0); },
                 Status::invalid_argument);
}

TEST_CASE("series bound to the right of one stays under the ceiling") {
  double worst = 0.0;
  for (const LFunctionInstance* in : {&chi4(), &delta6()}) {
    const double kap = in->kappa();
    for (double sig : {1.02, 1.1, 1.3, 1.6, 2.0})
      for (double t : {0.0, 4.5, 11.0, 30.0, -17.0, -30.0}) {
        const double val =
            std::abs(l_value(*in, {sig, t})) * std::pow(sig - 1.0, kap);
        worst = std::max(worst, val);
      }
  }
  MESSAGE("largest |L(sigma+it)| (sigma-1)^kappa over the grid: ", worst);
  CHECK(worst <= 20.0);
}

TEST_CASE("error taxonomy") {
  require_status([&] { l_value(chi4(), {0.5, 61.0}); }, Status::domain_error);
  require_status([&] { completed_l(delta6(), {0.5, -60.5}); }, Status::domain_error);
  require_status([&] { log_l(chi4(), {0.5, -61.0}); }, Status::domain_error);
  require_status([&] { hardy_z(chi4(), 60.5); }, Status::domain_error);
  require_status([&] { l_value(delta6(), {-5.5, 1.0}); }, Status::domain_error);

  eval::EvalConfig bad;
  bad.target_accuracy = 0.0;
  require_status([&] { l_value(chi4(), {2.0, 0.0}, bad); }, Status::invalid_argument);
  bad = {};
  bad.log_continuation_step = -0.05;
  require_status([&] { log_l(chi4(), {2.0, 0.0}, bad); }, Status::invalid_argument);

  require_status([&] { eval::hardy_rotation(quartic5()); }, Status::unsupported);
  require_status([&] { hardy_z(quartic5(), 1.0); }, Status::unsupported);

  // degree-1 trivial zero sits on a pole of the gamma factor
  require_status([&] { completed_l(chi4(), {-1.0, 0.0}); }, Status::singular_error);

  const LFunctionInstance tiny = delta_instance(12);
  require_status([&] { l_value(tiny, {2.0, 0.0}); }, Status::resource_error);
  require_status([&] { log_l(tiny, {2.0, 0.0}); }, Status::resource_error);

  // deterministic reruns
  const cplx a = l_value(delta6(), {0.5, 17.3});
  const cplx b = l_value(delta6(), {0.5, 17.3});
  CHECK(a == b);
}
