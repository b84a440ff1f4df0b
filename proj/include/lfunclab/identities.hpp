#ifndef LFUNCLAB_IDENTITIES_HPP
#define LFUNCLAB_IDENTITIES_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lfunclab/common.hpp"
#include "lfunclab/eval.hpp"
#include "lfunclab/instances.hpp"
#include "lfunclab/meanvalue.hpp"
#include "lfunclab/report.hpp"
#include "lfunclab/special.hpp"
#include "lfunclab/zeros.hpp"

// The headline checks: the weighted-Plancherel identity for partial sums, the
// hybrid Euler-Hadamard product (full and truncated zero windows), the
// power-saving partial-sum envelope, and the repulsion machinery (twisted
// xi search plus the disc-count scan).
//
// Every unnamed constant a check depends on is a named parameter with default
// 1 (or a documented guard value), and is copied into the emitted report's
// constants_used map. Out-of-hypothesis inputs run anyway and mark the report
// with hypothesis_flags; no check asserts a bound outside its hypotheses.
namespace lfl::idn {

// Weighted Plancherel check at twist phi, shift lam, Gaussian width T.
//
//   LHS = sqrt(2 pi T) Integral_0^inf (e^{-y} sum_{n<=e^y} lambda(n) n^{-i phi})
//         exp(lam y - T y^2 / 2) dy
//   RHS = Integral L(1 - lam + i(phi + t)) / (1 - lam + i t)
//         exp(-t^2 / (2T)) dt  over |t| <= sqrt(72 T).
//
// The LHS integrand jumps at every y = log n, so it is integrated piecewise
// between consecutive breakpoints (8-point Gauss per piece) with the running
// coefficient sum updated incrementally; the integral is truncated at the y
// where the Gaussian weight falls below 1e-15 of its peak. residual is the
// relative defect |LHS-RHS|/|RHS| and pass compares it to `ceiling`.
//
// Errors: lam outside [0, 1/(m+15)) or T <= 0 -> domain_error; T < 1e-3 is
// rejected as ill-conditioned (Gaussian mass collapses onto the first jump)
// -> domain_error; coefficients needed beyond the instance cache ->
// resource_error.
report::IdentityReport plancherel_check(const inst::LFunctionInstance& inst, double phi,
                                        double lam, double T, double ceiling = 1e-3,
                                        const eval::EvalConfig& cfg = {});

// Shared knobs for the Euler-Hadamard checks. budget_k is the k of the
// e^{4k} error envelopes (the truncated form takes its k explicitly instead);
// c_budget scales the whole envelope; c_window is the truncated form's
// |Re(s-1)| <= c_window / log X admission gate.
struct EulerHadamardConfig {
  double c_budget = 1.0;
  double budget_k = 4.0;
  double c_window = 2.0;
  eval::EvalConfig eval;
};

// Full-window hybrid product: checks
//
//   log L(s) = sum_{p^j <= X} a(p^j) log p / (j p^{j s} log p^j) v(e^{log p^j / log X})
//              - sum_{|gamma - Im s| <= tail_height} U((s - rho) log X) + err
//
// with rho running over the certified zeros and their reflections across the
// real axis. residual = |log_l(s) - RHS|; bound_value is the two-term budget
//   c_budget * (e^{4k}/(log X)^k + e^{4k} log c(Im s) / ((Y log X)^{k-2} log X))
// where Y is the effective tail and k = budget_k. When tail_height reaches
// past the zeroset's certified ceiling the window is clipped to what is
// certified and the report is flagged "tail-window-clipped-by-certification";
// coverage_error is raised only when Im s itself lies outside the ceiling.
//
// Errors: Re s < 1 - 1/(2m) -> domain_error; s within 1e-9 of a zero ->
// singular_error; uncertified zeroset, descriptor mismatch, or |Im s| beyond
// coverage -> coverage_error / invalid_argument.
report::IdentityReport euler_hadamard_full(const inst::LFunctionInstance& inst, cplx s, double X,
                                           const special::BumpKernel& kernel,
                                           const zeros::ZeroSet& zeroset, double tail_height,
                                           const EulerHadamardConfig& cfg = {});

// euler_hadamard_full at several tail heights with the prime sum and the
// per-zero U values computed once. Reports are returned in the order of
// tail_heights and each is bitwise identical to a fresh euler_hadamard_full
// call at that height (same inclusion order, same accumulator).
std::vector<report::IdentityReport> euler_hadamard_ladder(const inst::LFunctionInstance& inst,
                                                          cplx s, double X,
                                                          const special::BumpKernel& kernel,
                                                          const zeros::ZeroSet& zeroset,
                                                          const std::vector<double>& tail_heights,
                                                          const EulerHadamardConfig& cfg = {});

// Truncated hybrid product: the zero sum keeps only |s - rho| <= K / log X
// (complex distance, both reflections). k >= 3 is the budget order;
// bound_value = c_budget * e^{4k} log c(Im s) / (K^{k-2} log X). The zero
// window is a disc, so it can be empty; the report then carries the flag
// "zero-sum-empty". A disc poking past the certified ceiling flags
// "disc-clipped-by-certification".
//
// Errors: |Re(s-1)| > c_window / log X or k < 3 or K <= 0 -> domain_error;
// otherwise as the full form.
report::IdentityReport euler_hadamard_truncated(const inst::LFunctionInstance& inst, cplx s,
                                                double X, double K, double k,
                                                const special::BumpKernel& kernel,
                                                const zeros::ZeroSet& zeroset,
                                                const EulerHadamardConfig& cfg = {});

// Partial-sum envelope check: residual is the ratio
//   |sum_{n<=x} lambda(n)| / (x^{1 - 1/(m+14)} ((log x)^{kappa^2/2} + c^{1/4}))
// with c the analytic conductor at height 0; pass compares against `ceiling`.
// x >= 3 required (domain_error below); x beyond the coefficient reach ->
// resource_error.
report::IdentityReport power_saving_check(const inst::LFunctionInstance& inst, double x,
                                          double ceiling = 10.0);

// Named constants of the repulsion pipeline, all defaulted to 1:
//   c_t:     T = c_t y0^{-2} N^{2/ell_kappa}
//   c_l:     disc radius scale, L = c_l lam y0 (kappa log c / y0)^delta
//   c_small: X = exp(c_small / lam)
//   c_b:     B = c_b e^{4k} with k = 1/delta + 2
//   c_a:     lambda-window floor c_a N^{2/ell_kappa} / y0 (log c / y0)^{1-2 delta}
struct RepulsionConstants {
  double c_t = 1.0;
  double c_l = 1.0;
  double c_small = 1.0;
  double c_b = 1.0;
  double c_a = 1.0;
};

// One point of the repulsion scan. n_value and t_value are +inf when the
// partial sum at e^{y0} vanishes (flag "undefined-N" from the twist); the
// Gaussian factor exp(-xi^2/(4T)) is then 1 and everything else stays finite.
// disc_count_phi0 is the count for the companion disc at center 1 + 0i,
// recorded for self-dual instances and -1 otherwise.
struct RepulsionRecord {
  double y0 = 0.0;
  double n_value = 0.0;
  double phi = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
  double t_value = 0.0;
  double xi = 0.0;
  cplx disc_center{0.0, 0.0};
  double disc_radius = 0.0;
  int64_t disc_count = 0;
  int64_t disc_count_phi0 = -1;
  double slack = 0.0;
  std::map<std::string, double> constants_used;
  std::vector<std::string> hypothesis_flags;
};

// xi search at one (y0, lam, delta) against a precomputed twist selection.
// xi maximizes |L(1 - lam + i(phi + xi))| / |1 - lam + i xi| * exp(-xi^2/(4T))
// over the window |xi| <= lam (kappa log c / y0)^delta, scanned at step
// lam/20 (ties toward smaller |xi|, then nonnegative) and golden-section
// refined to 1e-6; the refined point is kept only if it does not lose to the
// grid. slack = lam y0 / 4 - log |L(1-lam+i(phi+xi)) / L(1+lam+i(phi+xi))|,
// recorded without being asserted. Hypothesis flags:
// "lambda-below-paper-window", "y0-outside-paper-window",
// "n-outside-paper-window", "xi-window-degenerate", plus any flags inherited
// from the twist.
//
// Errors: lam outside [0, 1/(m+15)) or delta outside (0, 1/2] -> domain_error;
// twist.y0 != y0 -> invalid_argument; |L| = 0 at an evaluation point ->
// singular_error; zeroset unusable for the disc count -> propagated.
RepulsionRecord repulsion_xi(const inst::LFunctionInstance& inst, double y0, double lam,
                             double delta, const mv::TwistSelection& twist,
                             const zeros::ZeroSet& zeroset, const RepulsionConstants& rc = {});

// Scan product: records in y0-major, lambda-minor input order plus the shared
// constants and the instance label.
struct RepulsionScan {
  std::vector<RepulsionRecord> records;
  std::string instance;
  double delta = 0.0;
  std::map<std::string, double> constants;
};

// Full scan: for each grid point computes the twist selection (tolerating a
// vanishing partial sum, which yields a flagged undefined-N record), the xi
// search, the disc of radius (L / y0) (log c / y0)^delta about 1 + i phi, and
// its exact zero count (plus the phi = 0 companion for self-dual instances).
// Records are computed in parallel and merged in input order.
RepulsionScan repulsion_scan(const inst::LFunctionInstance& inst, double delta,
                             const std::vector<double>& y0_grid,
                             const std::vector<double>& lambda_grid,
                             const zeros::ZeroSet& zeroset, const RepulsionConstants& rc = {},
                             double t_cap = 200.0);

// JSON (one object / one array) and CSV (flat rows, leading schema-version
// comment line) forms of the scan records. Numbers are shortest round-trip;
// infinities and NaNs appear as the strings "inf", "-inf", "nan" in JSON and
// as those bare tokens in CSV. Output depends only on the record values, so
// identical scans serialize byte-identically.
std::string record_to_json(const RepulsionRecord& rec);
std::string scan_to_json(const RepulsionScan& scan);
std::string scan_csv_header();
std::string record_to_csv_row(const RepulsionRecord& rec);
std::string scan_to_csv(const RepulsionScan& scan);

} // namespace lfl::idn

#endif
