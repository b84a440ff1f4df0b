#ifndef LFUNCLAB_REPORT_HPP
#define LFUNCLAB_REPORT_HPP

#include <map>
#include <string>
#include <vector>

#include "lfunclab/common.hpp"

namespace lfl::report {

// Outcome of one quantitative check. residual is recomputable from the stored
// lhs/rhs (either |lhs - rhs| or the documented op-specific defect, e.g. a
// ratio against an envelope), and pass <=> residual <= bound_value. Real-valued
// checks store their numbers in the real parts.
struct IdentityReport {
  std::string op;
  std::string input; // one-line summary of the evaluation point
  cplx lhs{0.0, 0.0};
  cplx rhs{0.0, 0.0};
  double residual = 0.0;
  double bound_value = 0.0;
  bool pass = false;
  std::map<std::string, double> constants_used;
  std::vector<std::string> hypothesis_flags;
};

// JSON object and CSV row forms. Numbers are shortest round-trip; infinities
// and NaNs are the strings "inf" / "-inf" / "nan" in JSON (they have no JSON
// literal) and the same bare tokens in CSV. Serialization depends only on the
// field values, so equal reports serialize byte-identically.
std::string report_to_json(const IdentityReport& rep);
std::string report_csv_header();
std::string report_to_csv_row(const IdentityReport& rep);

// Shortest round-trip decimal form of x ("inf" / "-inf" / "nan" when not
// finite); the single number token used by every serializer here.
std::string number_token(double x);

// RFC-4180 field quoting: s unchanged unless it holds a comma, quote, or
// newline, in which case it is wrapped in quotes with inner quotes doubled.
std::string csv_quote(const std::string& s);

// Sub-encodings of the two structured CSV columns: "name=value" pairs joined
// by ';' in map (name) order, and flags joined by ';' in list order.
std::string join_constants(const std::map<std::string, double>& constants);
std::string join_flags(const std::vector<std::string>& flags);

} // namespace lfl::report

#endif
