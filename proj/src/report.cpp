#include "congmod/report.hpp"

#include <json.hpp>

#include <sstream>

namespace congmod {
namespace {

using ojson = nlohmann::ordered_json;

const char* yn(bool b) { return b ? "yes" : "no"; }

ojson length_or_infinite(const std::optional<long>& v) {
  if (v) return *v;
  return "infinite";
}

std::string point_str(const Vec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += v[i].str();
  }
  return s + ")";
}

}  // namespace

std::string render_text(const AnalysisReport& rep) {
  std::ostringstream o;
  o << "ring: " << (rep.kind == RingKind::table ? "table" : "polynomial") << " over Z_("
    << rep.prime.get_str() << "), rank " << rep.model_dim << ", embedding dimension "
    << rep.edim << "\n";
  o << "point: " << point_str(rep.lambda) << "\n";
  if (rep.kind == RingKind::poly) o << "expected cuts: " << rep.expected_cuts << "\n";
  for (const auto& s : rep.chain)
    o << "cut " << s.cut << ": rank jump " << yn(s.rank_jump) << ", regular on generic fiber "
      << yn(s.regular_generic) << ", regular on special fiber " << yn(s.regular_special)
      << (s.module_regularity_assumed ? ", module regularity assumed" : "") << "\n";
  const Certificate& c = rep.cert;
  o << "mu: " << c.mu << "\n";
  o << "hypotheses: reduced isolated point " << yn(c.regular) << ", supported " << yn(c.supported)
    << ", depth ok " << yn(c.depth_ok) << ", free at point " << yn(c.free_at_point) << "\n";
  if (c.applicable) {
    o << "cotangent length: " << c.length_cotangent << "\n";
    o << "congruence module length: " << c.length_psi << "\n";
    o << "wiles defect: " << c.delta << "\n";
    o << "complete intersection: " << yn(c.complete_intersection) << "\n";
    o << "free summand: " << yn(c.free_summand) << "\n";
  } else {
    auto put = [&](const char* label, const std::optional<long>& v) {
      o << label << ": ";
      if (v)
        o << *v;
      else
        o << "infinite";
      o << "\n";
    };
    put("cotangent length", rep.raw_cotangent_length);
    put("congruence module length", rep.raw_psi_length);
    if (rep.raw_delta) o << "wiles defect: " << *rep.raw_delta << "\n";
  }
  if (rep.koszul_defect_length)
    o << "koszul defect length: " << *rep.koszul_defect_length << "\n";
  for (const auto& ck : rep.checks)
    o << "check " << (ck.pass ? "[ok]  " : "[FAIL] ") << ck.name << ": " << ck.detail << "\n";
  for (const auto& w : rep.warnings) o << "warning: " << w << "\n";
  o << "verdict: " << rep.verdict << "\n";
  return o.str();
}

std::string render_machine(const AnalysisReport& rep) {
  ojson j;
  j["ring"] = rep.kind == RingKind::table ? "table" : "poly";
  j["prime"] = rep.prime.get_str();
  j["rank"] = rep.model_dim;
  j["edim"] = rep.edim;
  ojson pt = ojson::array();
  for (const auto& x : rep.lambda) pt.push_back(x.str());
  j["point"] = pt;
  j["expected_cuts"] = rep.expected_cuts;
  ojson chain = ojson::array();
  for (const auto& s : rep.chain) {
    ojson e;
    e["cut"] = s.cut;
    e["rank_jump"] = s.rank_jump;
    e["regular_generic"] = s.regular_generic;
    e["regular_special"] = s.regular_special;
    e["module_regularity_assumed"] = s.module_regularity_assumed;
    chain.push_back(e);
  }
  j["chain"] = chain;
  const Certificate& c = rep.cert;
  ojson cert;
  cert["mu"] = c.mu;
  cert["regular"] = c.regular;
  cert["supported"] = c.supported;
  cert["depth_ok"] = c.depth_ok;
  cert["free_at_point"] = c.free_at_point;
  cert["applicable"] = c.applicable;
  cert["cotangent_length"] = c.length_cotangent;
  cert["congruence_length"] = c.length_psi;
  cert["delta"] = c.delta;
  cert["complete_intersection"] = c.complete_intersection;
  cert["free_summand"] = c.free_summand;
  j["certificate"] = cert;
  ojson raw;
  raw["cotangent_length"] = length_or_infinite(rep.raw_cotangent_length);
  raw["congruence_length"] = length_or_infinite(rep.raw_psi_length);
  if (rep.raw_delta)
    raw["delta"] = *rep.raw_delta;
  else
    raw["delta"] = nullptr;
  j["raw"] = raw;
  if (rep.koszul_defect_length) j["koszul_defect_length"] = *rep.koszul_defect_length;
  ojson checks = ojson::array();
  for (const auto& ck : rep.checks) {
    ojson e;
    e["name"] = ck.name;
    e["pass"] = ck.pass;
    e["detail"] = ck.detail;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["warnings"] = rep.warnings;
  j["verdict"] = rep.verdict;
  return j.dump(2) + "\n";
}

}  // namespace congmod
