#include <cstdio>
#include <fstream>

#include "bianchi/cli.hpp"

namespace bianchi {

std::string regression_hash(const std::string& s) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a64(s));
  return buf;
}

Json cyc_json(const CycNum& x) {
  CycNum m = x.minimized();
  Json j;
  j["conductor"] = m.conductor();
  Json c = Json::array();
  for (auto& q : m.coeffs()) c.push_back(q.get_str());
  j["coeffs"] = c;
  return j;
}

Json padic_json(const PadicCyc& x) {
  Json j;
  j["p"] = x.prime();
  j["zeta_p_exponent"] = x.exponent();
  j["absprec"] = x.absprec();
  j["valuation"] = x.is_zero() ? x.absprec() : x.valuation();
  j["value"] = x.str();
  return j;
}

namespace {
Json char_json(const CharSpec& c) {
  Json j;
  j["label"] = c.label();
  j["t"] = c.t;
  j["s"] = c.s;
  j["j1"] = c.j1;
  j["j2"] = c.j2;
  return j;
}
}  // namespace

Json lvalue_json(const PadicLValue& v) {
  Json j;
  j["character"] = char_json(v.chr);
  j["q"] = v.q;
  j["r"] = v.r;
  j["disc_level"] = {v.level_t, v.level_s};
  j["value"] = padic_json(v.value);
  j["claimed_precision"] = v.claimed_precision;
  Json l;
  for (auto& [name, loss] : v.losses) l[name] = loss;
  j["precision_losses"] = l;
  return j;
}

Json interp_json(const InterpRecord& r) {
  Json j;
  j["character"] = char_json(r.chr);
  j["conductor_exponents"] = {r.chr.t, r.chr.s};
  j["q"] = r.lhs.q;
  j["r"] = r.lhs.r;
  j["lhs"] = padic_json(r.lhs.value);
  j["rhs_exact"] = cyc_json(r.rhs_exact);
  j["euler_factor"] = cyc_json(r.zfactor);
  j["rhs"] = padic_json(r.rhs);
  j["valuation"] = r.valuation;
  j["claimed_precision"] = r.lhs.claimed_precision;
  j["pass"] = r.pass;
  return j;
}

Json katz_json(const KatzRecord& r) {
  Json j;
  j["character"] = char_json(r.chr);
  j["conductor_exponents"] = {r.chr.t, r.chr.s};
  j["lhs"] = padic_json(r.lhs.value);
  j["recognized"] = r.recognized;
  if (r.recognized) {
    j["katz_product"] = cyc_json(r.product);
    j["rhs"] = padic_json(r.rhs);
  }
  char m[32];
  std::snprintf(m, sizeof m, "%.3e", r.margin);
  j["recognition_margin"] = m;
  j["gauss_identity"] = r.gauss_identity;
  j["valuation"] = r.valuation;
  j["claimed_precision"] = r.lhs.claimed_precision;
  if (!r.reason.empty()) j["reason"] = r.reason;
  j["pass"] = r.pass;
  return j;
}

void write_report(const Json& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MathError("report: cannot write " + path);
  out << report.dump(2) << '\n';
}

}  // namespace bianchi
