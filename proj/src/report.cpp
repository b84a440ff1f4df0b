#include "lfunclab/report.hpp"

#include <charconv>
#include <cmath>

#include "json.hpp"

namespace lfl::report {

namespace {

// Non-finite doubles have no JSON literal, so they are stored as strings.
nlohmann::ordered_json num(double x) {
  if (std::isfinite(x)) return x;
  return number_token(x);
}

} // namespace

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) out += ';';
    out += flags[i];
  }
  return out;
}

std::string join_constants(const std::map<std::string, double>& constants) {
  std::string out;
  for (const auto& [name, value] : constants) {
    if (!out.empty()) out += ';';
    out += name;
    out += '=';
    out += number_token(value);
  }
  return out;
}

std::string number_token(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string report_to_json(const IdentityReport& rep) {
  nlohmann::ordered_json j;
  j["op"] = rep.op;
  j["input"] = rep.input;
  j["lhs"] = {{"re", num(rep.lhs.real())}, {"im", num(rep.lhs.imag())}};
  j["rhs"] = {{"re", num(rep.rhs.real())}, {"im", num(rep.rhs.imag())}};
  j["residual"] = num(rep.residual);
  j["bound_value"] = num(rep.bound_value);
  j["pass"] = rep.pass;
  auto cs = nlohmann::ordered_json::object();
  for (const auto& [name, value] : rep.constants_used) cs[name] = num(value);
  j["constants_used"] = cs;
  j["hypothesis_flags"] = rep.hypothesis_flags;
  return j.dump();
}

std::string report_csv_header() {
  return "op,input,lhs_re,lhs_im,rhs_re,rhs_im,residual,bound_value,pass,"
         "constants_used,hypothesis_flags";
}

std::string report_to_csv_row(const IdentityReport& rep) {
  std::string out = csv_quote(rep.op);
  out += ',';
  out += csv_quote(rep.input);
  for (double x : {rep.lhs.real(), rep.lhs.imag(), rep.rhs.real(), rep.rhs.imag(), rep.residual,
                   rep.bound_value}) {
    out += ',';
    out += number_token(x);
  }
  out += rep.pass ? ",1," : ",0,";
  out += csv_quote(join_constants(rep.constants_used));
  out += ',';
  out += csv_quote(join_flags(rep.hypothesis_flags));
  return out;
}

} // namespace lfl::report
