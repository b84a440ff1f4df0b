#include "lfunclab/identities.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "lfunclab/arith.hpp"

namespace lfl::idn {

namespace {

nlohmann::ordered_json num(double x) {
  if (std::isfinite(x)) return x;
  return report::number_token(x);
}

std::string cplx_token(cplx z) {
  std::string out = report::number_token(z.real());
  if (!(z.imag() < 0.0)) out += '+';
  out += report::number_token(z.imag());
  out += 'i';
  return out;
}

// Integration stops where the weight exp(lam y - T y^2/2) has decayed to
// 1e-15 of its peak at y = lam / T.
double gaussian_cutoff(double lam, double T) {
  return lam / T + std::sqrt(-2.0 * std::log(1e-15) / T);
}

// Cubic Hermite tabulation of kernel.v on [1, e]. The slopes are exact
// (v' = -u), which puts the interpolation error near h^4/384 * sup|u'''|,
// about 1e-13 at 4096 intervals. Direct kernel.v calls rerun the panel
// quadrature every time (~1 us) and would dominate the 2.5e7-term prime sums
// at X = e^20.
class VTable {
public:
  explicit VTable(const special::BumpKernel& kernel, int intervals = 4096)
      : h_((std::numbers::e - 1.0) / intervals) {
    val_.resize(intervals + 1);
    slope_.resize(intervals + 1);
    for (int i = 0; i <= intervals; ++i) {
      const double x = std::min(1.0 + i * h_, std::numbers::e);
      val_[i] = kernel.v(x);
      slope_[i] = -kernel.u(x);
    }
  }

  double operator()(double x) const {
    if (x <= 1.0) return 1.0;
    if (x >= std::numbers::e) return 0.0;
    const double pos = (x - 1.0) / h_;
    const auto i = std::min(static_cast<std::size_t>(pos), val_.size() - 2);
    const double t = pos - static_cast<double>(i);
    const double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * val_[i] + (t3 - 2.0 * t2 + t) * h_ * slope_[i] +
           (3.0 * t2 - 2.0 * t3) * val_[i + 1] + (t3 - t2) * h_ * slope_[i + 1];
  }

private:
  double h_;
  std::vector<double> val_, slope_;
};

// Same sum as eval::prime_sum_side with v read from the table; the two agree
// to the table's interpolation error (checked test-side).
cplx prime_log_sum(const inst::LFunctionInstance& in, cplx s, double X, const VTable& vt) {
  const double logX = std::log(X);
  KahanC acc;
  arith::for_each_prime_power(static_cast<uint64_t>(X), [&](uint64_t p, int k, uint64_t pk) {
    const double lpk = k * std::log(static_cast<double>(p));
    if (!(lpk < logX)) return;
    const cplx a = in.degree() == 1 ? in.character()->value(static_cast<int64_t>(pk))
                                    : in.a_coefficient(pk);
    if (a == cplx(0.0, 0.0)) return;
    const double w = vt(std::exp(lpk / logX));
    if (w == 0.0) return;
    acc.add(a * (w / k) * std::exp(-s * lpk));
  });
  return acc.value();
}

// Mirrors the eval-module prime-sum reach: degree 1 is sieve-limited, higher
// degrees are cache-limited.
void require_prime_reach(const inst::LFunctionInstance& in, double X, const char* who) {
  if (!(X > 1.0) || !std::isfinite(X))
    fail(Status::domain_error, std::string(who) + ": X must be finite and exceed 1");
  if (in.degree() >= 2) {
    if (!(X <= static_cast<double>(in.cache_bound())))
      fail(Status::resource_error, std::string(who) + ": X exceeds the coefficient cache");
  } else if (!(X <= 5.1e8)) {
    fail(Status::resource_error, std::string(who) + ": X exceeds the prime-sieve ceiling 5.1e8");
  }
}

void require_zeroset(const inst::LFunctionInstance& in, const zeros::ZeroSet& zs, cplx s,
                     const char* who) {
  if (!zs.certified)
    fail(Status::coverage_error, std::string(who) + ": the zero list is not certified complete");
  auto a = nlohmann::json::parse(zs.descriptor, nullptr, false);
  auto b = nlohmann::json::parse(in.descriptor_json(), nullptr, false);
  if (a.is_discarded() || a != b)
    fail(Status::invalid_argument,
         std::string(who) + ": the zero set was built for a different instance");
  if (!(std::abs(s.imag()) <= zs.t_max))
    fail(Status::coverage_error, std::string(who) + ": Im s lies outside the certified window");
}

void guard_not_on_zero(const zeros::ZeroSet& zs, cplx s, const char* who) {
  for (const auto& z : zs.zeros)
    for (double g : {z.gamma, -z.gamma}) {
      if (std::abs(s - cplx(z.beta, g)) < 1e-9)
        fail(Status::singular_error, std::string(who) + ": s coincides with a certified zero");
      if (z.gamma == 0.0) break;
    }
}

// One reflected zero with its kernel value. Consumers sum terms in collection
// order (zero-list order, +gamma before -gamma), so two windowed sums over
// the same subset are bitwise equal no matter which op produced them.
struct ZeroTerm {
  double gamma = 0.0;
  cplx u{0.0, 0.0};
};

// Golden-section maximization on [a, b] to absolute tolerance tol in the
// argument.
double golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    }
  }
  return 0.5 * (a + b);
}

void require_positive_constants(const RepulsionConstants& rc, const char* who) {
  for (double c : {rc.c_t, rc.c_l, rc.c_small, rc.c_b, rc.c_a})
    if (!(c > 0.0) || !std::isfinite(c))
      fail(Status::invalid_argument,
           std::string(who) + ": scale constants must be positive and finite");
}

nlohmann::ordered_json record_json(const RepulsionRecord& r) {
  nlohmann::ordered_json j;
  j["y0"] = num(r.y0);
  j["N"] = num(r.n_value);
  j["phi"] = num(r.phi);
  j["delta"] = num(r.delta);
  j["lambda"] = num(r.lambda);
  j["T"] = num(r.t_value);
  j["xi"] = num(r.xi);
  j["disc_center"] = {{"re", num(r.disc_center.real())}, {"im", num(r.disc_center.imag())}};
  j["disc_radius"] = num(r.disc_radius);
  j["disc_count"] = r.disc_count;
  j["disc_count_phi0"] = r.disc_count_phi0;
  j["slack"] = num(r.slack);
  auto cs = nlohmann::ordered_json::object();
  for (const auto& [name, value] : r.constants_used) cs[name] = num(value);
  j["constants_used"] = cs;
  j["hypothesis_flags"] = r.hypothesis_flags;
  return j;
}

} // namespace

report::IdentityReport plancherel_check(const inst::LFunctionInstance& inst, double phi,
                                        double lam, double T, double ceiling,
                                        const eval::EvalConfig& cfg) {
  const int m = inst.degree();
  if (!std::isfinite(phi) || !std::isfinite(lam) || !std::isfinite(T))
    fail(Status::domain_error, "plancherel_check: parameters must be finite");
  if (!(lam >= 0.0 && lam < 1.0 / (m + 15)))
    fail(Status::domain_error, "plancherel_check: lam must lie in [0, 1/(m+15))");
  if (!(T > 0.0)) fail(Status::domain_error, "plancherel_check: T must be positive");
  if (T < 1e-3)
    fail(Status::domain_error,
         "plancherel_check: T below 1e-3 is ill-conditioned, the Gaussian mass collapses "
         "onto the first coefficient jump");
  const double ycut = gaussian_cutoff(lam, T);
  const double n_cut = std::floor(std::exp(ycut));
  if (!(n_cut <= static_cast<double>(inst.cache_bound())))
    fail(Status::resource_error,
         "plancherel_check: the weight needs coefficients past the instance cache");
  const auto nmax = static_cast<uint64_t>(n_cut);

  // Left side. The integrand jumps at every y = log n, so each smooth piece
  // gets its own Gauss panel while the coefficient sum advances one term at a
  // time.
  const auto& lrule = arith::gauss_legendre(8);
  KahanC lhs_acc;
  KahanC running;
  for (uint64_t n = 1; n <= nmax; ++n) {
    running.add(inst.coefficient(n) * std::polar(1.0, -phi * std::log(static_cast<double>(n))));
    const cplx sum_n = running.value();
    const double lo = std::log(static_cast<double>(n));
    const double hi =
        std::min(n == nmax ? ycut : std::log(static_cast<double>(n) + 1.0), ycut);
    if (!(hi > lo) || sum_n == cplx(0.0, 0.0)) continue;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double piece = 0.0;
    for (std::size_t i = 0; i < lrule.nodes.size(); ++i) {
      const double y = mid + half * lrule.nodes[i];
      piece += lrule.weights[i] * std::exp((lam - 1.0) * y - 0.5 * T * y * y);
    }
    lhs_acc.add(sum_n * (piece * half));
  }
  const cplx lhs = std::sqrt(2.0 * std::numbers::pi * T) * lhs_acc.value();

  // Right side: smooth throughout, composite Gauss panels over the effective
  // support of the Gaussian.
  const double halfwidth = std::sqrt(72.0 * T);
  const int panels = static_cast<int>(std::ceil(2.0 * halfwidth / 0.5));
  const auto& rrule = arith::gauss_legendre(12);
  const double h = 2.0 * halfwidth / panels;
  KahanC rhs_acc;
  for (int p = 0; p < panels; ++p) {
    const double mid = -halfwidth + (p + 0.5) * h;
    cplx piece = 0.0;
    for (std::size_t i = 0; i < rrule.nodes.size(); ++i) {
      const double t = mid + 0.5 * h * rrule.nodes[i];
      piece += rrule.weights[i] * eval::l_value(inst, cplx(1.0 - lam, phi + t), cfg) /
               cplx(1.0 - lam, t) * std::exp(-t * t / (2.0 * T));
    }
    rhs_acc.add(piece * (0.5 * h));
  }
  const cplx rhs = rhs_acc.value();

  report::IdentityReport rep;
  rep.op = "plancherel_check";
  rep.input = inst::instance_label(inst) + " phi=" + report::number_token(phi) +
              " lam=" + report::number_token(lam) + " T=" + report::number_token(T);
  rep.lhs = lhs;
  rep.rhs = rhs;
  const double diff = std::abs(lhs - rhs);
  rep.residual = diff == 0.0 ? 0.0 : diff / std::abs(rhs);
  rep.bound_value = ceiling;
  rep.pass = rep.residual <= rep.bound_value;
  rep.constants_used = {{"T", T},
                        {"lambda", lam},
                        {"phi", phi},
                        {"ceiling", ceiling},
                        {"y_cut", ycut},
                        {"n_terms", static_cast<double>(nmax)},
                        {"lhs_gauss_points", 8.0},
                        {"rhs_halfwidth", halfwidth},
                        {"rhs_gauss_points", 12.0},
                        {"rhs_panel_width", h}};
  return rep;
}

std::vector<report::IdentityReport> euler_hadamard_ladder(const inst::LFunctionInstance& inst,
                                                          cplx s, double X,
                                                          const special::BumpKernel& kernel,
                                                          const zeros::ZeroSet& zeroset,
                                                          const std::vector<double>& tail_heights,
                                                          const EulerHadamardConfig& cfg) {
  const int m = inst.degree();
  if (tail_heights.empty())
    fail(Status::invalid_argument, "euler_hadamard_full: no tail heights given");
  for (double tail : tail_heights)
    if (!(tail > 0.0) || !std::isfinite(tail))
      fail(Status::domain_error, "euler_hadamard_full: tail heights must be positive");
  if (!(s.real() >= 1.0 - 1.0 / (2 * m)))
    fail(Status::domain_error, "euler_hadamard_full: Re s below 1 - 1/(2m)");
  if (!(cfg.budget_k >= 3.0))
    fail(Status::domain_error, "euler_hadamard_full: budget order k must be >= 3");
  require_prime_reach(inst, X, "euler_hadamard_full");
  require_zeroset(inst, zeroset, s, "euler_hadamard_full");
  guard_not_on_zero(zeroset, s, "euler_hadamard_full");

  const double logX = std::log(X);
  const double t = s.imag();
  const double head = zeroset.t_max - std::abs(t); // certified room around Im s
  double window = 0.0;
  for (double tail : tail_heights) window = std::max(window, std::min(tail, head));

  const VTable vt(kernel);
  const cplx psum = prime_log_sum(inst, s, X, vt);
  const cplx lhs = eval::log_l(inst, s, cfg.eval);

  std::vector<ZeroTerm> terms;
  for (const auto& z : zeroset.zeros)
    for (double g : {z.gamma, -z.gamma}) {
      if (std::abs(g - t) <= window)
        terms.push_back({g, special::capital_U((s - cplx(z.beta, g)) * logX, kernel)});
      if (z.gamma == 0.0) break;
    }

  const double k = cfg.budget_k;
  const double logc = std::log(inst.analytic_conductor(t));
  const bool small_x = X < std::exp(3.0 * std::pow(m, 4));
  std::vector<report::IdentityReport> out;
  out.reserve(tail_heights.size());
  for (double tail : tail_heights) {
    const double yeff = std::min(tail, head);
    KahanC zsum;
    int64_t used = 0;
    for (const auto& zt : terms)
      if (std::abs(zt.gamma - t) <= yeff) {
        zsum.add(zt.u);
        ++used;
      }
    const cplx rhs = psum - zsum.value();
    const double budget_main = std::exp(4.0 * k) / std::pow(logX, k);
    const double budget_tail =
        std::exp(4.0 * k) * logc / (std::pow(yeff * logX, k - 2.0) * logX);

    report::IdentityReport rep;
    rep.op = "euler_hadamard_full";
    rep.input = inst::instance_label(inst) + " s=" + cplx_token(s) +
                " X=" + report::number_token(X) + " tail=" + report::number_token(tail);
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.residual = std::abs(lhs - rhs);
    rep.bound_value = cfg.c_budget * (budget_main + budget_tail);
    rep.pass = rep.residual <= rep.bound_value;
    rep.constants_used = {{"log_x", logX},
                          {"tail_height", tail},
                          {"effective_tail", yeff},
                          {"budget_k", k},
                          {"c_budget", cfg.c_budget},
                          {"zero_terms", static_cast<double>(used)},
                          {"budget_main", budget_main},
                          {"budget_tail", budget_tail},
                          {"log_conductor", logc}};
    if (small_x) rep.hypothesis_flags.push_back("X-below-paper-threshold");
    if (tail > head) rep.hypothesis_flags.push_back("tail-window-clipped-by-certification");
    out.push_back(std::move(rep));
  }
  return out;
}

report::IdentityReport euler_hadamard_full(const inst::LFunctionInstance& inst, cplx s, double X,
                                           const special::BumpKernel& kernel,
                                           const zeros::ZeroSet& zeroset, double tail_height,
                                           const EulerHadamardConfig& cfg) {
  return euler_hadamard_ladder(inst, s, X, kernel, zeroset, {tail_height}, cfg).front();
}

report::IdentityReport euler_hadamard_truncated(const inst::LFunctionInstance& inst, cplx s,
                                                double X, double K, double k,
                                                const special::BumpKernel& kernel,
                                                const zeros::ZeroSet& zeroset,
                                                const EulerHadamardConfig& cfg) {
  const int m = inst.degree();
  if (!(k >= 3.0)) fail(Status::domain_error, "euler_hadamard_truncated: k must be >= 3");
  if (!(K > 0.0) || !std::isfinite(K))
    fail(Status::domain_error, "euler_hadamard_truncated: K must be positive");
  require_prime_reach(inst, X, "euler_hadamard_truncated");
  const double logX = std::log(X);
  if (!(std::abs(s.real() - 1.0) <= cfg.c_window / logX))
    fail(Status::domain_error,
         "euler_hadamard_truncated: Re s outside the |Re(s-1)| <= c_window/log X regime");
  if (!(s.real() >= 1.0 - 1.0 / (2 * m)))
    fail(Status::domain_error, "euler_hadamard_truncated: Re s below 1 - 1/(2m)");
  require_zeroset(inst, zeroset, s, "euler_hadamard_truncated");
  guard_not_on_zero(zeroset, s, "euler_hadamard_truncated");

  const double t = s.imag();
  const double radius = K / logX;
  const VTable vt(kernel);
  const cplx psum = prime_log_sum(inst, s, X, vt);
  const cplx lhs = eval::log_l(inst, s, cfg.eval);

  KahanC zsum;
  int64_t used = 0;
  for (const auto& z : zeroset.zeros)
    for (double g : {z.gamma, -z.gamma}) {
      if (std::abs(s - cplx(z.beta, g)) <= radius) {
        zsum.add(special::capital_U((s - cplx(z.beta, g)) * logX, kernel));
        ++used;
      }
      if (z.gamma == 0.0) break;
    }
  const cplx rhs = psum - zsum.value();
  const double logc = std::log(inst.analytic_conductor(t));

  report::IdentityReport rep;
  rep.op = "euler_hadamard_truncated";
  rep.input = inst::instance_label(inst) + " s=" + cplx_token(s) +
              " X=" + report::number_token(X) + " K=" + report::number_token(K) +
              " k=" + report::number_token(k);
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.residual = std::abs(lhs - rhs);
  rep.bound_value = cfg.c_budget * std::exp(4.0 * k) * logc / (std::pow(K, k - 2.0) * logX);
  rep.pass = rep.residual <= rep.bound_value;
  rep.constants_used = {{"log_x", logX},
                        {"window_k", K},
                        {"order_k", k},
                        {"c_budget", cfg.c_budget},
                        {"c_window", cfg.c_window},
                        {"zero_terms", static_cast<double>(used)},
                        {"window_radius", radius},
                        {"log_conductor", logc}};
  if (X < std::exp(3.0 * std::pow(m, 4)))
    rep.hypothesis_flags.push_back("X-below-paper-threshold");
  if (used == 0) rep.hypothesis_flags.push_back("zero-sum-empty");
  if (std::abs(t) + radius > zeroset.t_max)
    rep.hypothesis_flags.push_back("disc-clipped-by-certification");
  return rep;
}

report::IdentityReport power_saving_check(const inst::LFunctionInstance& inst, double x,
                                          double ceiling) {
  if (!(x >= 3.0) || !std::isfinite(x))
    fail(Status::domain_error, "power_saving_check: x must be finite and >= 3");
  const cplx sum = mv::partial_sum_lambda(inst, x, 0.0);
  const int m = inst.degree();
  const double kap = inst.kappa();
  const double cond = inst.analytic_conductor(0.0);
  const double exponent = 1.0 - 1.0 / (m + 14);
  const double envelope =
      std::pow(x, exponent) * (std::pow(std::log(x), kap * kap / 2.0) + std::pow(cond, 0.25));

  report::IdentityReport rep;
  rep.op = "power_saving_check";
  rep.input = inst::instance_label(inst) + " x=" + report::number_token(x);
  rep.lhs = sum;
  rep.rhs = envelope;
  rep.residual = std::abs(sum) / envelope;
  rep.bound_value = ceiling;
  rep.pass = rep.residual <= rep.bound_value;
  rep.constants_used = {{"ceiling", ceiling},
                        {"exponent", exponent},
                        {"kappa", kap},
                        {"conductor", cond},
                        {"envelope", envelope}};
  return rep;
}

RepulsionRecord repulsion_xi(const inst::LFunctionInstance& inst, double y0, double lam,
                             double delta, const mv::TwistSelection& twist,
                             const zeros::ZeroSet& zeroset, const RepulsionConstants& rc) {
  const int m = inst.degree();
  require_positive_constants(rc, "repulsion_xi");
  if (!(y0 > 0.0) || !std::isfinite(y0))
    fail(Status::domain_error, "repulsion_xi: y0 must be positive and finite");
  if (!(lam >= 0.0 && lam < 1.0 / (m + 15)))
    fail(Status::domain_error, "repulsion_xi: lam must lie in [0, 1/(m+15))");
  if (!(delta > 0.0 && delta <= 0.5))
    fail(Status::domain_error, "repulsion_xi: delta must lie in (0, 1/2]");
  if (twist.y0 != y0)
    fail(Status::invalid_argument, "repulsion_xi: the twist was computed at a different y0");

  const double kap = inst.kappa();
  const double ellk = inst.ell_kappa();
  const double logc = std::log(inst.analytic_conductor(0.0));
  const double n_value = twist.n_value;
  const double phi = twist.phi;
  const double t_value = rc.c_t * std::pow(n_value, 2.0 / ellk) / (y0 * y0);

  auto objective = [&](double xi) {
    const double mag = std::abs(eval::l_value(inst, cplx(1.0 - lam, phi + xi)));
    if (mag == 0.0)
      fail(Status::singular_error, "repulsion_xi: L vanishes at the evaluation point");
    return mag / std::abs(cplx(1.0 - lam, xi)) * std::exp(-xi * xi / (4.0 * t_value));
  };

  const double window = lam * std::pow(kap * logc / y0, delta);
  std::vector<std::string> flags;
  double xi = 0.0;
  double best;
  if (window == 0.0) {
    flags.push_back("xi-window-degenerate");
    best = objective(0.0);
  } else {
    // Grid pass at step lam/20, ties toward smaller |xi| then the nonnegative
    // side; golden refinement of the winning cell, kept only when it does not
    // lose to the grid.
    const double step = lam / 20.0;
    const auto span = static_cast<long>(std::floor(window / step + 1e-9));
    double best_xi = 0.0;
    best = -1.0;
    for (long j = -span; j <= span; ++j) {
      const double cand = static_cast<double>(j) * step;
      const double val = objective(cand);
      const bool better =
          val > best || (val == best && (std::abs(cand) < std::abs(best_xi) ||
                                         (std::abs(cand) == std::abs(best_xi) && cand > best_xi)));
      if (better) {
        best = val;
        best_xi = cand;
      }
    }
    const double lo = std::max(best_xi - step, -window);
    const double hi = std::min(best_xi + step, window);
    const double refined = golden_max(objective, lo, hi, 1e-6);
    const double refined_val = objective(refined);
    if (refined_val >= best) {
      xi = refined;
      best = refined_val;
    } else {
      xi = best_xi;
    }
  }

  const cplx lminus = eval::l_value(inst, cplx(1.0 - lam, phi + xi));
  const cplx lplus = eval::l_value(inst, cplx(1.0 + lam, phi + xi));
  if (std::abs(lminus) == 0.0 || std::abs(lplus) == 0.0)
    fail(Status::singular_error, "repulsion_xi: L vanishes at the evaluation point");
  const double slack = lam * y0 / 4.0 - std::log(std::abs(lminus) / std::abs(lplus));

  const double l_thm = rc.c_l * lam * y0 * std::pow(kap * logc / y0, delta);
  const double radius = l_thm / y0 * std::pow(logc / y0, delta);
  const cplx center(1.0, phi);

  RepulsionRecord rec;
  rec.y0 = y0;
  rec.n_value = n_value;
  rec.phi = phi;
  rec.delta = delta;
  rec.lambda = lam;
  rec.t_value = t_value;
  rec.xi = xi;
  rec.disc_center = center;
  rec.disc_radius = radius;
  rec.disc_count = zeros::count_in_disc(zeroset, center, radius);
  rec.disc_count_phi0 = inst.gamma().self_dual
                            ? zeros::count_in_disc(zeroset, cplx(1.0, 0.0), radius)
                            : int64_t{-1};
  rec.slack = slack;

  const double lam_floor =
      rc.c_a * std::pow(n_value, 2.0 / ellk) / y0 * std::pow(logc / y0, 1.0 - 2.0 * delta);
  if (!(lam >= lam_floor)) flags.push_back("lambda-below-paper-window");
  if (!(y0 >= std::pow(logc, 1.0 - 1.0 / (50.0 * m)) && y0 <= 0.5 * logc))
    flags.push_back("y0-outside-paper-window");
  if (!(n_value >= 1.0 && n_value <= std::pow(y0, 1.0 / (100.0 * m))))
    flags.push_back("n-outside-paper-window");
  for (const auto& f : twist.hypothesis_flags) flags.push_back(f);
  rec.hypothesis_flags = std::move(flags);

  const double k_order = 1.0 / delta + 2.0;
  rec.constants_used = {{"c_t", rc.c_t},
                        {"c_l", rc.c_l},
                        {"c_small", rc.c_small},
                        {"c_b", rc.c_b},
                        {"c_a", rc.c_a},
                        {"k", k_order},
                        {"b", rc.c_b * std::exp(4.0 * k_order)},
                        {"log_x", rc.c_small / lam},
                        {"k_window", std::exp((std::log(rc.c_b) + 4.0 * k_order +
                                               std::log(kap * logc) - std::log(rc.c_small * y0)) /
                                              (k_order - 2.0))},
                        {"xi_window", window},
                        {"scan_step", lam / 20.0},
                        {"lambda_floor", lam_floor},
                        {"log_conductor", logc},
                        {"ell_kappa", ellk},
                        {"kappa", kap},
                        {"lambda_y0", lam * y0},
                        {"objective", best}};
  return rec;
}

RepulsionScan repulsion_scan(const inst::LFunctionInstance& inst, double delta,
                             const std::vector<double>& y0_grid,
                             const std::vector<double>& lambda_grid,
                             const zeros::ZeroSet& zeroset, const RepulsionConstants& rc,
                             double t_cap) {
  if (y0_grid.empty() || lambda_grid.empty())
    fail(Status::invalid_argument, "repulsion_scan: empty grid");
  if (!(delta > 0.0 && delta <= 0.5))
    fail(Status::domain_error, "repulsion_scan: delta must lie in (0, 1/2]");
  require_positive_constants(rc, "repulsion_scan");

  std::vector<mv::TwistSelection> twists(y0_grid.size());
  for (std::size_t i = 0; i < y0_grid.size(); ++i)
    twists[i] = mv::twist_phi(inst, y0_grid[i], t_cap, /*allow_vanishing_sum=*/true);

  RepulsionScan scan;
  scan.instance = inst::instance_label(inst);
  scan.delta = delta;
  scan.constants = {{"c_t", rc.c_t},     {"c_l", rc.c_l}, {"c_small", rc.c_small},
                    {"c_b", rc.c_b},     {"c_a", rc.c_a}, {"t_cap", t_cap}};
  scan.records.resize(y0_grid.size() * lambda_grid.size());
  parallel_for(scan.records.size(), [&](std::size_t idx) {
    const std::size_t i = idx / lambda_grid.size();
    const std::size_t j = idx % lambda_grid.size();
    scan.records[idx] =
        repulsion_xi(inst, y0_grid[i], lambda_grid[j], delta, twists[i], zeroset, rc);
  });
  return scan;
}

std::string record_to_json(const RepulsionRecord& rec) { return record_json(rec).dump(); }

std::string scan_to_json(const RepulsionScan& scan) {
  nlohmann::ordered_json j;
  j["instance"] = scan.instance;
  j["delta"] = num(scan.delta);
  auto cs = nlohmann::ordered_json::object();
  for (const auto& [name, value] : scan.constants) cs[name] = num(value);
  j["constants"] = cs;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& rec : scan.records) arr.push_back(record_json(rec));
  j["records"] = arr;
  return j.dump(2) + "\n";
}

std::string scan_csv_header() {
  return "y0,N,phi,delta,lambda,T,xi,disc_center_re,disc_center_im,disc_radius,"
         "disc_count,disc_count_phi0,slack,constants_used,hypothesis_flags";
}

std::string record_to_csv_row(const RepulsionRecord& rec) {
  std::string out;
  for (double x : {rec.y0, rec.n_value, rec.phi, rec.delta, rec.lambda, rec.t_value, rec.xi,
                   rec.disc_center.real(), rec.disc_center.imag(), rec.disc_radius}) {
    out += report::number_token(x);
    out += ',';
  }
  out += std::to_string(rec.disc_count);
  out += ',';
  out += std::to_string(rec.disc_count_phi0);
  out += ',';
  out += report::number_token(rec.slack);
  out += ',';
  out += report::csv_quote(report::join_constants(rec.constants_used));
  out += ',';
  out += report::csv_quote(report::join_flags(rec.hypothesis_flags));
  return out;
}

std::string scan_to_csv(const RepulsionScan& scan) {
  std::string out = "# repulsion-scan v1 instance=\"" + scan.instance +
                    "\" delta=" + report::number_token(scan.delta);
  for (const auto& [name, value] : scan.constants)
    out += " " + name + "=" + report::number_token(value);
  out += '\n';
  out += scan_csv_header();
  out += '\n';
  for (const auto& rec : scan.records) {
    out += record_to_csv_row(rec);
    out += '\n';
  }
  return out;
}

} // namespace lfl::idn
