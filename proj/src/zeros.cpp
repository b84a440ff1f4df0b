#include "lfunclab/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace lfl::zeros {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHeightCeiling = 60.0;
constexpr double kScanStep = 0.05;
constexpr double kRefineWidth = 1e-9;
constexpr double kEdgeClearance = 1e-3;
// Largest argument turn accepted per contour segment. Well below pi, so an
// accepted segment cannot hide a full extra turn.
constexpr double kMaxTurn = 0.7;

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

// Accumulates the change of arg completed_l along a polyline, bisecting any
// segment that turns faster than kMaxTurn. Segments shorter than 1e-9 that
// still turn too fast mean a zero is on (or hugging) the contour.
struct ArgWalker {
  const inst::LFunctionInstance& in;
  const eval::EvalConfig& cfg;
  long evals = 0;

  cplx value(cplx z) {
    if (++evals > 500000)
      fail(Status::certification_error,
           "argument principle: contour refinement exploded; a zero sits on or "
           "next to the contour");
    cplx w = eval::completed_l(in, z, cfg);
    if (w == cplx(0.0, 0.0))
      fail(Status::certification_error,
           fmt("argument principle: the contour passes through a zero near "
               "Im s = %.6f",
               z.imag()));
    return w;
  }

  double turn(cplx z0, cplx w0, cplx z1, cplx w1, int depth) {
    double d = std::arg(w1 / w0);
    if (std::abs(d) <= kMaxTurn) return d;
    if (depth >= 48 || std::abs(z1 - z0) <= 1e-9)
      fail(Status::certification_error,
           fmt("argument principle: winding unresolved near Im s = %.6f; a "
               "zero is within 1e-9 of the contour",
               (0.5 * (z0 + z1)).imag()));
    cplx zm = 0.5 * (z0 + z1);
    cplx wm = value(zm);
    return turn(z0, w0, zm, wm, depth + 1) + turn(zm, wm, z1, w1, depth + 1);
  }

  double along(const std::vector<cplx>& corners) {
    Kahan acc;
    cplx zp = corners.front();
    cplx wp = value(zp);
    for (std::size_t i = 1; i < corners.size(); ++i) {
      cplx za = corners[i - 1];
      cplx zb = corners[i];
      int n = std::max(1, (int)std::ceil(std::abs(zb - za) / 0.1));
      for (int k = 1; k <= n; ++k) {
        cplx z = (k == n) ? zb : za + (zb - za) * (double(k) / n);
        cplx w = value(z);
        acc.add(turn(zp, wp, z, w, 0));
        zp = z;
        wp = w;
      }
    }
    return acc.value();
  }
};

void require_window(double T, const char* who) {
  if (!(T >= 0.0))
    fail(Status::invalid_argument, std::string(who) + ": the window edge must be nonnegative");
  if (T > kHeightCeiling)
    fail(Status::domain_error, std::string(who) + ": the window edge exceeds the supported height 60");
}

void require_certified(const ZeroSet& zs, const char* who) {
  if (!zs.certified)
    fail(Status::coverage_error,
         std::string(who) + ": the zero set is not certified; counts over it would be unfounded");
}

// Counting ops must not silently mix a set with a different instance.
void require_same_instance(const ZeroSet& zs, const inst::LFunctionInstance& in,
                           const char* who) {
  auto a = nlohmann::json::parse(zs.descriptor, nullptr, false);
  auto b = nlohmann::json::parse(in.descriptor_json(), nullptr, false);
  if (a.is_discarded() || a != b)
    fail(Status::invalid_argument,
         std::string(who) + ": the zero set was built for a different instance");
}

int64_t disc_count_unchecked(const ZeroSet& zs, cplx center, double radius) {
  int64_t n = 0;
  for (const Zero& z : zs.zeros) {
    if (std::abs(cplx(z.beta, z.gamma) - center) <= radius) ++n;
    if (z.gamma > 0.0 && std::abs(cplx(z.beta, -z.gamma) - center) <= radius) ++n;
  }
  return n;
}

} // namespace

int64_t count_argument_principle(const inst::LFunctionInstance& in, double T,
                                 const eval::EvalConfig& cfg) {
  require_window(T, "count_argument_principle");
  if (T == 0.0) return 0;
  ArgWalker walker{in, cfg, 0};
  double raw;
  if (in.gamma().self_dual) {
    // Lambda(conj s) = conj(Lambda(s)) makes the lower half of the rectangle
    // mirror the upper half, so walking the upper half alone yields the full
    // winding halved, which is exactly the [0, T] count.
    raw = walker.along({{1.5, 0.0}, {1.5, T}, {-0.5, T}, {-0.5, 0.0}}) / (2.0 * kPi);
  } else {
    raw = walker.along({{1.5, -T}, {1.5, T}, {-0.5, T}, {-0.5, -T}, {1.5, -T}}) /
          (2.0 * kPi);
  }
  int64_t n = std::llround(raw);
  if (!(std::abs(raw - double(n)) <= 1e-3))
    fail(Status::certification_error,
         fmt("argument principle: raw winding %.6f does not land on an integer; "
             "the contour cannot resolve the count",
             raw));
  if (n < 0)
    fail(Status::certification_error,
         fmt("argument principle: negative winding %.6f around a region where "
             "the completed function is analytic",
             raw));
  return n;
}

ZeroSet find_zeros(const inst::LFunctionInstance& in, double t_max,
                   const eval::EvalConfig& cfg) {
  if (!in.gamma().self_dual)
    fail(Status::unsupported,
         "find_zeros: sign-change scanning needs the real critical-line "
         "profile of a self-dual instance");
  require_window(t_max, "find_zeros");

  // A node landing exactly on a zero has no usable sign; a nudge well below
  // the refinement width restores one without moving the bracket.
  auto z_at = [&](double t) {
    double z = eval::hardy_z(in, t, cfg);
    if (z == 0.0) z = eval::hardy_z(in, t > 0.0 ? t - 1e-12 : t + 1e-12, cfg);
    return z;
  };

  std::vector<Zero> found;
  double prev_t = 0.0;
  double prev_z = t_max > 0.0 ? z_at(0.0) : 1.0;
  for (long k = 1; prev_t < t_max; ++k) {
    double t = std::min(double(k) * kScanStep, t_max);
    double z = z_at(t);
    if ((prev_z < 0.0) != (z < 0.0)) {
      double lo = prev_t, hi = t, zlo = prev_z;
      while (hi - lo > kRefineWidth) {
        double mid = 0.5 * (lo + hi);
        double zm = eval::hardy_z(in, mid, cfg);
        if (zm == 0.0) {
          lo = mid - 0.5 * kRefineWidth;
          hi = mid + 0.5 * kRefineWidth;
          break;
        }
        if ((zm < 0.0) == (zlo < 0.0)) {
          lo = mid;
          zlo = zm;
        } else {
          hi = mid;
        }
      }
      found.push_back({0.5, 0.5 * (lo + hi), hi - lo});
    }
    prev_t = t;
    prev_z = z;
  }

  if (!found.empty() && t_max - found.back().gamma < kEdgeClearance)
    fail(Status::invalid_argument,
         fmt("find_zeros: t_max = %.6f is within 1e-3 of the zero at %.6f; "
             "move the window edge",
             t_max, found.back().gamma));
  // A zero just above the edge is invisible to the scan but still violates
  // the clearance the certification contour is entitled to; one probe above
  // t_max exposes it through a sign change.
  double probe = std::min(t_max + kEdgeClearance, kHeightCeiling);
  if (t_max > 0.0 && probe > t_max) {
    double za = z_at(probe);
    if ((prev_z < 0.0) != (za < 0.0))
      fail(Status::invalid_argument,
           fmt("find_zeros: a zero lies within 1e-3 above t_max = %.6f; move "
               "the window edge",
               t_max));
  }

  int64_t n = count_argument_principle(in, t_max, cfg);
  if (n != (int64_t)found.size())
    fail(Status::certification_error,
         fmt("incomplete scan: sign changes located %.0f zeros in the window "
             "but the argument principle counts %.0f",
             double(found.size()), double(n)));

  ZeroSet zs;
  zs.descriptor = in.descriptor_json();
  zs.t_max = t_max;
  zs.zeros = std::move(found);
  zs.certified = true;
  zs.argument_count = n;
  return zs;
}

int64_t count_in_disc(const ZeroSet& zs, cplx center, double radius) {
  if (!(radius >= 0.0))
    fail(Status::invalid_argument, "count_in_disc: radius must be nonnegative");
  require_certified(zs, "count_in_disc");
  if (std::abs(center.imag()) + radius > zs.t_max)
    fail(Status::coverage_error,
         fmt("count_in_disc: the disc reaches |Im s| = %.6f beyond the "
             "certified height %.6f",
             std::abs(center.imag()) + radius, zs.t_max));
  return disc_count_unchecked(zs, center, radius);
}

StripCount strip_count(const ZeroSet& zs, const inst::LFunctionInstance& in,
                       double t) {
  require_same_instance(zs, in, "strip_count");
  require_certified(zs, "strip_count");
  if (t < -zs.t_max || t + 1.0 > zs.t_max)
    fail(Status::coverage_error,
         fmt("strip_count: [%.6f, %.6f] leaves the certified window", t, t + 1.0));
  int64_t n = 0;
  for (const Zero& z : zs.zeros) {
    if (z.gamma >= t && z.gamma <= t + 1.0) ++n;
    if (z.gamma > 0.0 && -z.gamma >= t && -z.gamma <= t + 1.0) ++n;
  }
  return {n, double(n) / std::log(in.analytic_conductor(t))};
}

LinnikProfile linnik_profile(const ZeroSet& zs,
                             const inst::LFunctionInstance& in,
                             const std::vector<double>& t_grid,
                             const std::vector<double>& r_grid) {
  require_same_instance(zs, in, "linnik_profile");
  require_certified(zs, "linnik_profile");
  for (double r : r_grid)
    if (!(r > 0.0))
      fail(Status::invalid_argument, "linnik_profile: radii must be positive");
  for (double t : t_grid)
    for (double r : r_grid)
      if (std::abs(t) + r > zs.t_max)
        fail(Status::coverage_error,
             fmt("linnik_profile: the disc at t = %.6f, r = %.6f leaves the "
                 "certified window",
                 t, r));

  LinnikProfile out;
  out.rows.reserve(t_grid.size() * r_grid.size());
  for (double t : t_grid) {
    double lc = std::log(in.analytic_conductor(t));
    for (double r : r_grid) {
      LinnikRow row;
      row.t = t;
      row.r = r;
      row.count = disc_count_unchecked(zs, cplx(1.0, t), r);
      row.normalized = double(row.count) / (r * lc);
      row.in_hypothesis = r >= 1.0 / lc && r <= 0.75;
      if (row.in_hypothesis)
        out.max_normalized = std::max(out.max_normalized, row.normalized);
      out.rows.push_back(row);
    }
  }
  return out;
}

std::string zeroset_to_json(const ZeroSet& zs) {
  auto inst_obj = nlohmann::json::parse(zs.descriptor, nullptr, false);
  if (inst_obj.is_discarded())
    fail(Status::invalid_argument,
         "zeroset_to_json: the set's instance descriptor is not valid JSON");
  nlohmann::json j;
  j["format"] = "lfunclab-zeroset-v1";
  j["instance"] = inst_obj;
  j["window"] = {0.0, zs.t_max};
  j["certified"] = zs.certified;
  j["argument_count"] = zs.argument_count;
  auto arr = nlohmann::json::array();
  for (const Zero& z : zs.zeros)
    arr.push_back({{"beta", z.beta},
                   {"gamma", z.gamma},
                   {"refinement_width", z.refinement_width}});
  j["zeros"] = std::move(arr);
  return j.dump(2) + "\n";
}

ZeroSet zeroset_from_json(const std::string& text) {
  auto complain = [](const std::string& what) {
    fail(Status::invalid_argument, "zero set JSON: " + what);
  };
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) complain("not a JSON object");
  if (!j.contains("format") || !j["format"].is_string() ||
      j["format"].get<std::string>() != "lfunclab-zeroset-v1")
    complain("unknown format tag");
  if (!j.contains("instance") || !j["instance"].is_object())
    complain("missing instance descriptor");
  auto win = j.value("window", nlohmann::json());
  if (!win.is_array() || win.size() != 2 || !win[0].is_number() ||
      !win[1].is_number() || win[0].get<double>() != 0.0)
    complain("window must be [0, T]");
  double t_max = win[1].get<double>();
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) complain("window edge must be finite and nonnegative");
  if (!j.contains("certified") || !j["certified"].is_boolean())
    complain("missing certified flag");
  if (!j.contains("argument_count") || !j["argument_count"].is_number_integer())
    complain("missing argument_count");
  if (!j.contains("zeros") || !j["zeros"].is_array()) complain("missing zeros array");

  ZeroSet zs;
  zs.descriptor = j["instance"].dump();
  zs.t_max = t_max;
  zs.certified = j["certified"].get<bool>();
  zs.argument_count = j["argument_count"].get<int64_t>();
  double prev = -1.0;
  for (const auto& e : j["zeros"]) {
    if (!e.is_object() || !e.contains("beta") || !e.contains("gamma") ||
        !e.contains("refinement_width") || !e["beta"].is_number() ||
        !e["gamma"].is_number() || !e["refinement_width"].is_number())
      complain("each zero needs numeric beta, gamma, refinement_width");
    Zero z;
    z.beta = e["beta"].get<double>();
    z.gamma = e["gamma"].get<double>();
    z.refinement_width = e["refinement_width"].get<double>();
    if (!std::isfinite(z.beta) || !std::isfinite(z.gamma)) complain("zero coordinates must be finite");
    if (z.gamma < 0.0 || z.gamma > t_max)
      complain(fmt("ordinate %.6f outside the window [0, %.6f]", z.gamma, t_max));
    if (z.gamma <= prev) complain("ordinates must be strictly increasing");
    if (!(z.refinement_width > 0.0) || z.refinement_width > kRefineWidth)
      complain("refinement_width must lie in (0, 1e-9]");
    prev = z.gamma;
    zs.zeros.push_back(z);
  }
  if (zs.argument_count < 0) complain("argument_count must be nonnegative");
  if (zs.certified && zs.argument_count != (int64_t)zs.zeros.size())
    complain("certified set whose zero list disagrees with argument_count");
  return zs;
}

} // namespace lfl::zeros
