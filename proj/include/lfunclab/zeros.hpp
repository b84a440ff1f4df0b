#ifndef LFUNCLAB_ZEROS_HPP
#define LFUNCLAB_ZEROS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "lfunclab/common.hpp"
#include "lfunclab/eval.hpp"
#include "lfunclab/instances.hpp"

namespace lfl::zeros {

// One nontrivial zero beta + i gamma. Located zeros carry beta = 1/2: the
// scan works on the critical line and the certification counts the whole
// strip, so a certified set with beta = 1/2 everywhere really is everything.
// The counting API below nonetheless reads (beta, gamma) as stored, so a
// hand-loaded off-line zero would be handled, not ignored.
struct Zero {
  double beta = 0.5;
  double gamma = 0.0;
  double refinement_width = 0.0; // final bisection bracket, in (0, 1e-9]
};

// Zeros of one instance with 0 <= gamma <= t_max, sorted by ordinate.
// certified means an argument-principle count over the same window agreed
// with the scan exactly; every consumer that answers counting questions
// demands it. Negative ordinates are covered by conjugate reflection, so a
// certified window [0, T] answers questions on [-T, T].
struct ZeroSet {
  std::string descriptor;     // descriptor_json() of the instance scanned
  double t_max = 0.0;         // window [0, t_max]
  std::vector<Zero> zeros;
  bool certified = false;
  int64_t argument_count = 0; // N(t_max) from the argument principle
};

// Sign-change scan of hardy_z on [0, t_max] with step 0.05, each bracket
// bisected to width <= 1e-9, then certified against
// count_argument_principle. A mismatch raises a certification error carrying
// both counts; a located zero within 1e-3 of t_max raises invalid_argument
// (move the window edge; the certification contour needs that clearance).
// Requires a self-dual instance and t_max <= 60.
ZeroSet find_zeros(const inst::LFunctionInstance& inst, double t_max,
                   const eval::EvalConfig& cfg = {});

// Number of zeros counted by the winding of the completed function around
// the rectangle [-1/2, 3/2] x [-T, T], halved for the window [0, T] when the
// instance is self-dual (conjugation pairs the halves; the halved path is
// what actually gets walked). Non-self-dual instances get the full
// rectangle's count over (-T, T). The walk subdivides until each segment
// turns the argument by at most 0.7, so the accumulated winding lands on an
// integer to machine accuracy; a raw value farther than 1e-3 from an integer
// (a zero on or hugging the contour) raises a certification error.
// Requires T <= 60; the caller keeps T at least 1e-3 away from any ordinate.
int64_t count_argument_principle(const inst::LFunctionInstance& inst, double T,
                                 const eval::EvalConfig& cfg = {});

// Exact count of stored zeros, conjugate reflections included, in the closed
// disc |s - center| <= radius. The set must be certified and the disc's
// ordinate range must fit in [-t_max, t_max]; the Re direction needs no
// coverage check because the certification rectangle spans the whole strip
// and the regions beyond it are zero-free.
int64_t count_in_disc(const ZeroSet& zs, cplx center, double radius);

struct StripCount {
  int64_t count = 0;
  double density_ratio = 0.0; // count / log of the analytic conductor at t
};

// Zeros with ordinate in [t, t+1], reflections included, plus the ratio
// against log conductor(it). [t, t+1] must lie inside [-t_max, t_max].
StripCount strip_count(const ZeroSet& zs, const inst::LFunctionInstance& inst,
                       double t);

struct LinnikRow {
  double t = 0.0;
  double r = 0.0;
  int64_t count = 0;
  double normalized = 0.0; // count / (r log conductor(it))
  // The density hypothesis window is 1/log conductor(it) <= r <= 3/4; rows
  // outside it are still computed but excluded from the headline constant.
  bool in_hypothesis = false;
};

struct LinnikProfile {
  std::vector<LinnikRow> rows; // t-major, r-minor, in grid order
  double max_normalized = 0.0; // over in-hypothesis rows; 0 when none
};

// Disc counts centered at 1 + it for every (t, r) in the grids, normalized
// by r log conductor(it). Radii must be positive and every disc must fit in
// the certified window.
LinnikProfile linnik_profile(const ZeroSet& zs,
                             const inst::LFunctionInstance& inst,
                             const std::vector<double>& t_grid,
                             const std::vector<double>& r_grid);

// JSON document with the instance descriptor, window, certificate, and zero
// list. Serialization is deterministic (sorted keys, shortest round-trip
// floats), so equal sets produce byte-identical text.
std::string zeroset_to_json(const ZeroSet& zs);

// Inverse of zeroset_to_json. Validates the schema and the set invariants
// (window starts at 0, ordinates strictly increasing inside the window,
// widths in (0, 1e-9], certified implies count match); any violation raises
// invalid_argument.
ZeroSet zeroset_from_json(const std::string& text);

} // namespace lfl::zeros

#endif
