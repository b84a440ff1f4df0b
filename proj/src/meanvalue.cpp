#include "lfunclab/meanvalue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lfunclab/arith.hpp"

namespace lfl::mv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;
constexpr double kScanHeightCap = 60.0; // the evaluator's |Im s| ceiling
constexpr double kRefineTol = 1e-6;     // golden-section bracket width target
constexpr double kInvGolden = 0.6180339887498949;
constexpr double kSieveCeiling = 5.1e8; // largest prime table we will build

void require_scan_x(double x) {
  if (!(x >= 3.0) || !std::isfinite(x))
    fail(Status::domain_error, "meanvalue: line scans require finite x >= 3");
}

void require_ceiling(double ceiling) {
  if (!(ceiling > 0.0) || !std::isfinite(ceiling))
    fail(Status::invalid_argument, "meanvalue: ceiling must be positive and finite");
}

struct ScanSetup {
  double width = 0.0; // effective half-window after caps
  double step = 0.0;
  bool clamped = false; // the height cap cut the requested window
};

ScanSetup make_window(double logx, double kappa, double t_cap) {
  if (!(t_cap >= 0.0) || !std::isfinite(t_cap))
    fail(Status::invalid_argument, "meanvalue: t_cap must be finite and nonnegative");
  ScanSetup w;
  w.step = 1.0 / (4.0 * logx);
  w.width = std::min(std::pow(logx, kappa), t_cap);
  if (w.width > kScanHeightCap) {
    w.width = kScanHeightCap;
    w.clamped = true;
  }
  return w;
}

// |L(sigma + it)|, divided by |sigma + it| when ratio is set. sigma is
// 1 + 1/log x, inside the evaluator's domain for every scanned t.
struct LineObjective {
  const inst::LFunctionInstance* in;
  double sigma;
  bool ratio;
  double operator()(double t) const {
    const cplx s(sigma, t);
    const double v = std::abs(eval::l_value(*in, s));
    return ratio ? v / std::abs(s) : v;
  }
};

struct Peak {
  double t = 0.0;
  double value = 0.0;
};

// Grid values are produced in parallel panels and merged in index order:
// ascending |t|, positive sign first, strict improvement only. That realizes
// the tie-break (smallest |t|, then nonnegative) deterministically.
Peak grid_argmax(const ScanSetup& w, bool two_sided, const LineObjective& obj) {
  const auto K = static_cast<std::size_t>(std::floor(w.width / w.step + 1e-9));
  std::vector<double> pos(K + 1);
  parallel_for(K + 1, [&](std::size_t j) { pos[j] = obj(static_cast<double>(j) * w.step); });
  std::vector<double> neg;
  if (two_sided && K > 0) {
    neg.assign(K + 1, 0.0);
    parallel_for(K, [&](std::size_t j) { neg[j + 1] = obj(-static_cast<double>(j + 1) * w.step); });
  }
  Peak best{0.0, pos[0]};
  for (std::size_t j = 1; j <= K; ++j) {
    const double t = static_cast<double>(j) * w.step;
    if (pos[j] > best.value) best = {t, pos[j]};
    if (two_sided && neg[j] > best.value) best = {-t, neg[j]};
  }
  return best;
}

// Golden-section ascent inside the winning grid cell's neighborhood. The
// bracket stays inside the scanned window, and inside t >= 0 when only the
// nonnegative half was scanned (even objective). The refined point is kept
// only when its measured objective is >= the grid peak, so refinement can
// never lose to the grid.
Peak refine_peak(const Peak& g, const ScanSetup& w, bool two_sided, const LineObjective& obj) {
  double a = std::max(g.t - w.step, two_sided ? -w.width : 0.0);
  double b = std::min(g.t + w.step, w.width);
  if (!(b - a > kRefineTol)) return g;
  double c1 = b - kInvGolden * (b - a);
  double c2 = a + kInvGolden * (b - a);
  double f1 = obj(c1);
  double f2 = obj(c2);
  while (b - a > kRefineTol) {
    if (f1 < f2) {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + kInvGolden * (b - a);
      f2 = obj(c2);
    } else {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - kInvGolden * (b - a);
      f1 = obj(c1);
    }
  }
  const Peak refined = (f1 >= f2) ? Peak{c1, f1} : Peak{c2, f2};
  return refined.value >= g.value ? refined : g;
}

Peak scan_line(const inst::LFunctionInstance& in, double logx, double t_cap, bool ratio,
               bool refine, ScanSetup& w_out) {
  const ScanSetup w = make_window(logx, in.kappa(), t_cap);
  const LineObjective obj{&in, 1.0 + 1.0 / logx, ratio};
  const bool two_sided = !in.gamma().self_dual;
  Peak p = grid_argmax(w, two_sided, obj);
  if (refine) p = refine_peak(p, w, two_sided, obj);
  w_out = w;
  return p;
}

std::string point_label(const inst::LFunctionInstance& in, const char* extra) {
  return inst::instance_label(in) + extra;
}

} // namespace

cplx partial_sum_lambda(const inst::LFunctionInstance& in, double x, double phi) {
  if (!std::isfinite(x) || !std::isfinite(phi))
    fail(Status::invalid_argument, "partial_sum_lambda: arguments must be finite");
  if (x < 1.0) return {0.0, 0.0};
  if (x > static_cast<double>(in.cache_bound()))
    fail(Status::resource_error, "partial_sum_lambda: x exceeds the coefficient cache");
  const auto n_max = static_cast<uint64_t>(std::floor(x));
  KahanC acc;
  for (uint64_t n = 1; n <= n_max; ++n) {
    const cplx lam = in.coefficient(n);
    if (lam == cplx(0.0, 0.0)) continue;
    acc.add(lam * std::polar(1.0, -phi * std::log(static_cast<double>(n))));
  }
  return acc.value();
}

Maximizer maximizer_t1(const inst::LFunctionInstance& in, double x, double t_cap) {
  require_scan_x(x);
  ScanSetup w;
  const Peak p = scan_line(in, std::log(x), t_cap, /*ratio=*/false, /*refine=*/true, w);
  return {p.t, p.value};
}

double halasz_M(const inst::LFunctionInstance& in, double x, double t_cap) {
  require_scan_x(x);
  const double lx = std::log(x);
  ScanSetup w;
  const Peak p = scan_line(in, lx, t_cap, /*ratio=*/true, /*refine=*/true, w);
  return in.kappa() * std::log(lx) - std::log(p.value);
}

report::IdentityReport halasz_ratio(const inst::LFunctionInstance& in, double x, double ceiling,
                                    double t_cap) {
  require_scan_x(x);
  require_ceiling(ceiling);
  const double lx = std::log(x);
  const double kap = in.kappa();
  ScanSetup w;
  const Peak p = scan_line(in, lx, t_cap, /*ratio=*/true, /*refine=*/true, w);
  const double m = kap * std::log(lx) - std::log(p.value);

  const double s_abs = std::abs(partial_sum_lambda(in, x, 0.0));
  const double trivial = x * std::pow(lx, kap - 1.0);
  const double llx = std::log(lx);
  const double envelope = (1.0 + m) * std::exp(-m) * trivial + x * llx * llx / lx;
  if (!(envelope > 0.0)) fail(Status::singular_error, "halasz_ratio: envelope is not positive");

  report::IdentityReport rep;
  rep.op = "halasz-ratio";
  std::ostringstream os;
  os << " x=" << x;
  rep.input = point_label(in, os.str().c_str());
  rep.lhs = s_abs;
  rep.rhs = envelope;
  rep.residual = s_abs / envelope;
  rep.bound_value = ceiling;
  rep.pass = rep.residual <= ceiling;
  rep.constants_used["m"] = m;
  rep.constants_used["t_cap"] = t_cap;
  rep.constants_used["window"] = w.width;
  rep.constants_used["scan_step"] = w.step;
  rep.constants_used["trivial_ratio"] = s_abs / trivial;
  if (w.clamped) rep.hypothesis_flags.push_back("window-clamped-to-height-cap");
  return rep;
}

report::IdentityReport lipschitz_defect(const inst::LFunctionInstance& in, double x, double omega,
                                        double ceiling, double t_cap) {
  require_scan_x(x);
  require_ceiling(ceiling);
  if (!(omega >= 1.0) || !(omega <= std::cbrt(x)))
    fail(Status::domain_error, "lipschitz_defect: omega must lie in [1, x^(1/3)]");

  const double lx = std::log(x);
  const double kap = in.kappa();
  ScanSetup w;
  const Peak p = scan_line(in, lx, t_cap, /*ratio=*/false, /*refine=*/true, w);

  const cplx s_full = partial_sum_lambda(in, x, p.t);
  const cplx s_cut = partial_sum_lambda(in, x / omega, p.t);
  const double lhs = std::abs(s_full - omega * s_cut) / x;

  const double logw = std::log(omega);
  const double llx = std::log(lx);
  const double expo = std::min(1.0, kap * (1.0 - std::sqrt(2.0 / kPi)));
  const double tail = std::log(lx / (1.0 + logw));
  if (!(tail > 0.0))
    fail(Status::singular_error, "lipschitz_defect: envelope needs log x > 1 + log omega");
  const double envelope = std::pow((logw + llx * llx) / lx, expo) * std::pow(lx, kap - 1.0) * tail;

  report::IdentityReport rep;
  rep.op = "lipschitz";
  std::ostringstream os;
  os << " x=" << x << " omega=" << omega;
  rep.input = point_label(in, os.str().c_str());
  rep.lhs = lhs;
  rep.rhs = envelope;
  rep.residual = lhs / envelope;
  rep.bound_value = ceiling;
  rep.pass = rep.residual <= ceiling;
  rep.constants_used["t1"] = p.t;
  rep.constants_used["exponent"] = expo;
  rep.constants_used["t_cap"] = t_cap;
  rep.constants_used["window"] = w.width;
  rep.constants_used["scan_step"] = w.step;
  if (w.clamped) rep.hypothesis_flags.push_back("window-clamped-to-height-cap");
  return rep;
}

report::IdentityReport factoring_defect(const inst::LFunctionInstance& in, double x, double phi,
                                        double ceiling) {
  require_scan_x(x);
  require_ceiling(ceiling);
  if (!std::isfinite(phi)) fail(Status::invalid_argument, "factoring_defect: phi must be finite");

  const cplx s_plain = partial_sum_lambda(in, x, 0.0);
  const cplx s_tw = partial_sum_lambda(in, x, phi);
  const cplx factor = std::polar(1.0, phi * std::log(x)) / cplx(1.0, phi);
  const double lhs = std::abs(s_plain - factor * s_tw);

  const double lx = std::log(x);
  const double llx = std::log(lx);
  const double loglog_factor = std::log(std::log(kE + std::abs(phi)));
  Kahan es;
  arith::for_each_prime_power(static_cast<uint64_t>(std::floor(x)),
                              [&](uint64_t, int k, uint64_t pk) {
                                const cplx a = in.a_coefficient(pk);
                                const cplx tw = std::polar(1.0, phi * std::log(static_cast<double>(pk)));
                                es.add(std::abs(a - tw) / (static_cast<double>(k) * static_cast<double>(pk)));
                              });
  const double envelope =
      x * std::pow(llx, in.kappa()) * loglog_factor / lx * std::exp(es.value());

  report::IdentityReport rep;
  rep.op = "factoring";
  std::ostringstream os;
  os << " x=" << x << " phi=" << phi;
  rep.input = point_label(in, os.str().c_str());
  rep.lhs = lhs;
  rep.rhs = envelope;
  rep.residual = envelope > 0.0 ? lhs / envelope : (lhs == 0.0 ? 0.0 : INFINITY);
  rep.bound_value = ceiling;
  rep.pass = rep.residual <= ceiling;
  rep.constants_used["phi"] = phi;
  rep.constants_used["loglog_factor"] = loglog_factor;
  rep.constants_used["exp_sum"] = es.value();
  return rep;
}

TwistSelection twist_phi(const inst::LFunctionInstance& in, double y0, double t_cap,
                         bool allow_vanishing_sum) {
  if (!(y0 >= 1.0) || !std::isfinite(y0))
    fail(Status::domain_error, "twist_phi: y0 must be at least 1");
  const double x = std::exp(y0);
  const double kap = in.kappa();

  const cplx s_plain = partial_sum_lambda(in, x, 0.0);
  const double s_abs = std::abs(s_plain);
  if (s_abs == 0.0 && !allow_vanishing_sum)
    fail(Status::singular_error, "twist_phi: the partial sum at e^{y0} vanishes, N is undefined");

  TwistSelection sel;
  sel.y0 = y0;
  sel.n_value = s_abs == 0.0 ? std::numeric_limits<double>::infinity()
                             : std::exp(y0) * std::pow(y0, kap - 1.0) / s_abs;
  if (s_abs == 0.0) sel.hypothesis_flags.push_back("undefined-N");

  // log(e^{y0}) is y0 exactly; the grid argmax is kept unrefined so phi lands
  // exactly on a grid node.
  ScanSetup w;
  const Peak p = scan_line(in, y0, t_cap, /*ratio=*/true, /*refine=*/false, w);
  sel.phi = p.t;
  sel.m_value = kap * std::log(y0) - std::log(p.value);
  sel.scan_step = w.step;
  sel.scan_cap = w.width;

  const cplx s_tw = partial_sum_lambda(in, x, sel.phi);
  const cplx factor = cplx(1.0, sel.phi) / std::polar(1.0, sel.phi * y0);
  sel.defect = std::abs(s_tw - factor * s_plain);
  sel.rhs_budget = std::exp(y0) * std::pow(y0, kap - 1.0 - 0.2);
  if (in.gamma().self_dual)
    sel.phi_real_ratio = std::abs(sel.phi) * y0 / std::pow(sel.n_value, 6.0 / kap);
  if (sel.n_value > std::pow(y0, 0.1)) sel.hypothesis_flags.push_back("n-hypothesis-violated");
  if (w.clamped) sel.hypothesis_flags.push_back("window-clamped-to-height-cap");
  return sel;
}

MertensSums mertens_sums(const inst::LFunctionInstance& in, double y0) {
  if (!(y0 > 0.0) || !std::isfinite(y0))
    fail(Status::domain_error, "mertens_sums: y0 must be positive");
  const double x = std::exp(y0);
  if (x > static_cast<double>(in.cache_bound()))
    fail(Status::resource_error, "mertens_sums: e^{y0} exceeds the coefficient cache");

  Kahan a2;
  Kahan plain;
  // Lambda(p^k) / (p^k log p^k) = 1 / (k p^k).
  arith::for_each_prime_power(static_cast<uint64_t>(std::floor(x)),
                              [&](uint64_t, int k, uint64_t pk) {
                                const double wgt = 1.0 / (static_cast<double>(k) * static_cast<double>(pk));
                                plain.add(wgt);
                                a2.add(std::norm(in.a_coefficient(pk)) * wgt);
                              });
  MertensSums ms;
  ms.sum_a2 = a2.value();
  ms.sum_plain = plain.value();
  ms.gap_a2 = ms.sum_a2 - in.kappa() * in.kappa() * std::log(y0);
  ms.gap_plain = ms.sum_plain - std::log(y0);
  return ms;
}

report::IdentityReport cosine_sum(double tau, double x, double c, double slack) {
  if (!std::isfinite(tau)) fail(Status::invalid_argument, "cosine_sum: tau must be finite");
  if (!(x >= 1e3) || !std::isfinite(x))
    fail(Status::domain_error, "cosine_sum: x must be at least 10^3");
  if (x > kSieveCeiling) fail(Status::resource_error, "cosine_sum: x exceeds the sieve ceiling");
  if (!(c > 0.0) || !std::isfinite(c))
    fail(Status::invalid_argument, "cosine_sum: c must be positive and finite");
  if (!std::isfinite(slack)) fail(Status::invalid_argument, "cosine_sum: slack must be finite");

  auto primes = arith::primes_up_to_cached(static_cast<uint64_t>(x));
  Kahan lhs;
  for (uint32_t p : *primes)
    lhs.add(std::abs(std::cos(tau * std::log(static_cast<double>(p)))) / static_cast<double>(p));

  report::IdentityReport rep;
  rep.op = "cosine-sum";
  std::ostringstream os;
  os << "tau=" << tau << " x=" << x << " c=" << c;
  rep.input = os.str();
  rep.lhs = lhs.value();
  rep.bound_value = slack;
  rep.constants_used["c"] = c;
  if (tau == 0.0) {
    // |cos| = 1 on every term: the sum degenerates to sum 1/p and the
    // envelope's y is undefined.
    rep.rhs = 0.0;
    rep.residual = 0.0;
    rep.pass = true;
    rep.hypothesis_flags.push_back("tau-zero-degenerate");
    return rep;
  }
  const double llx = std::log(std::log(x));
  // log y directly: y = exp(1/|tau|) overflows for tiny tau long before the
  // envelope itself misbehaves.
  const double logy = std::max(c * llx * llx, 1.0 / std::abs(tau));
  const double rhs = (2.0 / kPi) * std::log(std::log(x) / logy) + std::log(logy);
  rep.rhs = rhs;
  rep.residual = lhs.value() - rhs;
  rep.pass = rep.residual <= slack;
  rep.constants_used["log_y"] = logy;
  return rep;
}

} // namespace lfl::mv
