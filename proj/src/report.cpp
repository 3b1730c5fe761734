#include "nbk/report.hpp"

#include "nbk/actions.hpp"
#include "nbk/crossed.hpp"
#include "nbk/ktheory.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#ifndef NBK_VERSION
#define NBK_VERSION "0.0.0"
#endif

namespace nbk {

const char* tool_version() { return NBK_VERSION; }

namespace {

Json integer_json(const Integer& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

Json group_json(const AbelianGroup& g) {
  Json t = Json::array();
  for (const auto& x : g.torsion()) t.push_back(integer_json(x));
  return Json{{"rank", g.free_rank()}, {"torsion", t}};
}

Json matrix_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(integer_json(m.at(i, j)));
    rows.push_back(r);
  }
  return rows;
}

Json check_json(const Check& c) {
  Json j{{"name", c.name}, {"status", to_string(c.status)}};
  if (!c.detail.empty()) j["detail"] = c.detail;
  if (c.counterexample) j["counterexample"] = *c.counterexample;
  return j;
}

std::string cell(std::string s) {
  std::string out;
  for (char ch : s) {
    if (ch == '|') out += "\\|";
    else if (ch == '\n') out += "<br>";
    else out += ch;
  }
  return out;
}

std::string md_matrix(const std::vector<std::string>& head, const IntMatrix& m,
                      const std::vector<std::string>& row_labels = {}) {
  std::string s = "|";
  if (!row_labels.empty()) s += " |";
  for (const auto& h : head) s += " " + cell(h) + " |";
  s += "\n|";
  if (!row_labels.empty()) s += "---|";
  for (std::size_t j = 0; j < head.size(); ++j) s += "---:|";
  s += "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s += "|";
    if (!row_labels.empty()) s += " " + cell(row_labels[i]) + " |";
    for (std::size_t j = 0; j < m.cols(); ++j) s += " " + m.at(i, j).get_str() + " |";
    s += "\n";
  }
  return s;
}

Json base_config(std::optional<Rational> theta) {
  Json c;
  c["cyclotomic_order"] = cyclotomic_session_order();
  c["theta_mode"] = theta ? "folded" : "symbolic";
  if (theta) c["theta"] = theta->get_str();
  return c;
}

/// Switches the session order for folded theta, keeping an explicit environment choice.
class FoldedSession {
 public:
  explicit FoldedSession(const std::optional<Rational>& theta) {
    if (theta) guard_.emplace(folded_session_order(*theta));
  }

 private:
  std::optional<SessionOrderGuard> guard_;
};

void require_family(const std::string& f, const std::vector<std::string>& known, const char* what) {
  if (std::find(known.begin(), known.end(), f) == known.end()) {
    std::string list;
    for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
    throw UsageError("unknown " + std::string(what) + " family '" + f + "' (expected one of " + list + ")");
  }
}

Json pattern_json(const CocyclePattern& p) {
  static const char* names[3] = {"theta_12", "theta_13", "theta_23"};
  Json j;
  j["family"] = p.family;
  j["free_slot"] = p.free_slot ? Json(std::string("theta_") + std::to_string(p.free_slot->first + 1) +
                                      std::to_string(p.free_slot->second + 1))
                               : Json(nullptr);
  j["summary"] = p.str();
  if (auto prod = p.as_product()) {
    Json sets;
    for (std::size_t s = 0; s < 3; ++s) {
      Json v = Json::array();
      for (const auto& e : (*prod)[s]) v.push_back(e.str());
      sets[names[s]] = v;
    }
    j["product"] = sets;
  }
  Json adm = Json::array();
  for (const auto& t : p.admissible) adm.push_back(Json::array({t[0].str(), t[1].str(), t[2].str()}));
  j["admissible"] = adm;
  return j;
}

/// Table rows for one pattern: a single row for a product set, else one per triple.
std::vector<std::string> pattern_rows(const CocyclePattern& p) {
  std::vector<std::string> rows;
  if (auto prod = p.as_product()) {
    std::string s;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& v = (*prod)[k];
      std::string c;
      if (v.size() == 1) c = v.front().str();
      else
        for (std::size_t i = 0; i < v.size(); ++i) c += (i ? ", " : "{") + v[i].str() + (i + 1 == v.size() ? "}" : "");
      s += " " + cell(c) + " |";
    }
    rows.push_back(s);
  } else if (p.admissible.empty()) {
    rows.push_back(" none | | |");
  } else {
    for (const auto& t : p.admissible) rows.push_back(" " + t[0].str() + " | " + t[1].str() + " | " + t[2].str() + " |");
  }
  return rows;
}

std::string set_difference_text(const CocyclePattern& a, const CocyclePattern& b) {
  std::string s;
  for (const auto& t : a.admissible)
    if (std::find(b.admissible.begin(), b.admissible.end(), t) == b.admissible.end())
      s += (s.empty() ? "" : "; ") + std::string("(") + t[0].str() + ", " + t[1].str() + ", " + t[2].str() + ")";
  return s.empty() ? "none" : s;
}

}  // namespace

int folded_session_order(const Rational& theta) {
  if (std::getenv("NBK_CYCLOTOMIC_ORDER")) return cyclotomic_session_order();
  const long den = theta.get_den().get_si();
  return static_cast<int>(std::lcm(24L, 12L * den));
}

// ---------------------------------------------------------------------------

Json Report::to_json() const {
  Json j;
  j["tool"] = "nbk";
  j["version"] = tool_version();
  j["schema"] = kReportSchema;
  j["command"] = command;
  j["config"] = config;
  for (const auto& [k, v] : payload.items()) j[k] = v;
  Json cs = Json::array();
  for (const auto& c : checks) cs.push_back(check_json(c));
  j["checks"] = cs;
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& c : checks) ++counts[static_cast<int>(c.status)];
  j["summary"] = Json{{"pass", counts[0]}, {"fail", counts[1]}, {"anomaly", counts[2]}};
  j["notes"] = notes;
  return j;
}

std::string Report::json() const { return to_json().dump(2) + "\n"; }

std::string Report::markdown() const {
  std::ostringstream o;
  o << "# nbk " << command << "\n\n";
  o << "version " << tool_version() << ", schema " << kReportSchema << "\n\n";
  o << "| setting | value |\n|---|---|\n";
  for (const auto& [k, v] : config.items()) o << "| " << k << " | " << cell(v.is_string() ? v.get<std::string>() : v.dump()) << " |\n";
  o << "\n";
  for (const auto& [title, body] : sections) o << "## " << title << "\n\n" << body << "\n";
  if (!checks.empty()) {
    o << "## Checks\n\n| check | status | detail |\n|---|---|---|\n";
    for (const auto& c : checks) {
      std::string d = c.detail;
      if (c.counterexample) d += (d.empty() ? "" : "; ") + std::string("counterexample: ") + *c.counterexample;
      o << "| " << cell(c.name) << " | " << to_string(c.status) << " | " << cell(d) << " |\n";
    }
    o << "\n";
  }
  if (!notes.empty()) {
    o << "## Notes\n\n";
    for (const auto& n : notes) o << "- " << n << "\n";
    o << "\n";
  }
  return o.str();
}

// ---------------------------------------------------------------------------

Report cmd_scan(const std::vector<std::string>& families, int denominator, int degree_bound) {
  if (denominator < 1) throw UsageError("denominator must be positive");
  if (degree_bound < 1) throw UsageError("degree bound must be positive");
  for (const auto& f : families) require_family(f, classical_families(), "action");
  Report r;
  r.command = "scan";
  r.config = base_config({});
  r.config["denominator"] = denominator;
  r.config["degree"] = degree_bound;

  Json pats = Json::array();
  std::string table = "| family | θ_12 | θ_13 | θ_23 | published |\n|---|---|---|---|---|\n";
  bool dup_n12 = false, dup_n34 = false;
  for (const auto& f : families) {
    const CocyclePattern got = scan_cocycles(f, denominator, degree_bound);
    const CocyclePattern want = published_cocycle_table(f, denominator);
    Json pj = pattern_json(got);
    pj["published"] = want.str();
    pj["matches_published"] = got == want;
    pats.push_back(pj);
    const auto rows = pattern_rows(got);
    for (std::size_t i = 0; i < rows.size(); ++i)
      table += "| " + (i ? std::string() : f) + " |" + rows[i] + " " + (i ? std::string() : cell(want.str())) + " |\n";
    const bool ok = got == want;
    r.checks.push_back(pass_or_fail(f + ": admissible cocycles match the published table", ok,
                                    std::to_string(got.admissible.size()) + " admissible at denominator " +
                                        std::to_string(denominator),
                                    "scan: " + got.str() + "; published: " + want.str() + "; only in scan: " +
                                        set_difference_text(got, want) + "; only published: " +
                                        set_difference_text(want, got)));
    dup_n12 = dup_n12 || f == "N1" || f == "N2";
    dup_n34 = dup_n34 || f == "N3" || f == "N4";
  }
  r.payload["patterns"] = pats;
  r.sections.emplace_back("Admissible cocycles", table);
  if (dup_n12) r.notes.push_back("the published rows for N1 and N2 are identical; each family is scanned on its own action");
  if (dup_n34) r.notes.push_back("the published rows for N3 and N4 are identical; each family is scanned on its own action");
  return r;
}

Report cmd_scan_file(const std::string& path, int denominator, int degree_bound) {
  if (denominator < 1) throw UsageError("denominator must be positive");
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read action file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  ActionSpec spec;
  try {
    spec = ActionSpec::parse(buf.str());
  } catch (const ActionFormatError& e) {
    throw UsageError(path + ": " + e.what());
  }
  Report r;
  r.command = "scan";
  r.config = base_config({});
  r.config["denominator"] = denominator;
  r.config["degree"] = degree_bound;
  r.config["action_file"] = path;
  const CocyclePattern got = scan_cocycles(spec, denominator, degree_bound);
  r.payload["patterns"] = Json::array({pattern_json(got)});
  r.sections.emplace_back("Admissible cocycles", [&] {
                       std::string t = "| action | θ_12 | θ_13 | θ_23 |\n|---|---|---|---|\n";
                       const auto rows = pattern_rows(got);
                       for (std::size_t i = 0; i < rows.size(); ++i)
                         t += "| " + (i ? std::string() : cell(spec.name())) + " |" + rows[i] + "\n";
                       return t;
                     }());
  r.notes.push_back("no published table for a user-supplied action; nothing to compare");
  return r;
}

Report cmd_ktheory(const std::string& family, int epsilon, const std::optional<Rational>& theta) {
  require_family(family, ktheory_families(), "K-theory");
  if (epsilon != 1 && epsilon != -1) throw UsageError("epsilon must be +1 or -1");
  const FoldedSession session(theta);
  if (theta && family == "B2" && epsilon_for(*theta) != epsilon)
    throw UsageError("epsilon " + std::to_string(epsilon) + " contradicts θ = " + theta->get_str());

  Report r;
  r.command = "ktheory";
  r.config = base_config(theta);
  r.config["family"] = family;
  if (family == "B2") r.config["epsilon"] = epsilon;

  const BetaStarData data = beta_star_matrix(family, epsilon);
  r.notes = data.notes;
  r.payload["family"] = family;
  r.payload["basis"] = data.basis;
  r.payload["matrix"] = matrix_json(data.m);
  r.sections.emplace_back("id - β_*", md_matrix(data.basis, data.m, data.basis));
  try {
    const KGroups k = pv_solve(data);
    r.payload["K0"] = group_json(k.k0);
    r.payload["K1"] = group_json(k.k1);
    Json cert;
    Json diag = Json::array();
    for (const auto& d : k.certificate.divisors()) diag.push_back(integer_json(d));
    cert["rank"] = k.certificate.rank;
    cert["divisors"] = diag;
    cert["U"] = matrix_json(k.certificate.U);
    cert["V"] = matrix_json(k.certificate.V);
    r.payload["certificate"] = cert;

    const auto& f = k.certificate;
    const Integer du = determinant(f.U), dv = determinant(f.V);
    r.checks.push_back(pass_or_fail(family + ": U (id - β_*) V = S with U, V unimodular",
                                    f.U * data.m * f.V == f.S && abs(du) == 1 && abs(dv) == 1, {},
                                    "det U = " + du.get_str() + ", det V = " + dv.get_str()));
    const KGroups pub = published_k_groups(family);
    r.checks.push_back(pass_or_fail(family + ": K-groups match the published ones",
                                    k.k0 == pub.k0 && k.k1 == pub.k1,
                                    "K_0 = " + k.k0.str() + ", K_1 = " + k.k1.str(),
                                    "computed K_0 = " + k.k0.str() + ", K_1 = " + k.k1.str() + "; published K_0 = " +
                                        pub.k0.str() + ", K_1 = " + pub.k1.str()));
    std::string groups = "| group | value |\n|---|---|\n| K_0 | " + k.k0.str() + " |\n| K_1 | " + k.k1.str() + " |\n";
    std::string dv_str;
    for (const auto& d : f.divisors()) dv_str += (dv_str.empty() ? "" : ", ") + d.get_str();
    groups += "\nSmith divisors of id - β_*: " + (dv_str.empty() ? std::string("none") : dv_str) + "\n";
    r.sections.emplace_back("K-groups", groups);
  } catch (const InconsistentData& e) {
    r.checks.push_back(pass_or_fail(family + ": β_* data consistent", false, {}, e.what()));
  }

  if (theta) {
    const auto proj = verify_projections(family, theta);
    r.checks.insert(r.checks.end(), proj.begin(), proj.end());
    const auto bs = verify_beta_star(family, epsilon, theta);
    r.checks.insert(r.checks.end(), bs.begin(), bs.end());
  }
  return r;
}

Report cmd_verify(const std::string& suite, const SuiteOptions& opt) {
  const auto& names = suite_names();
  if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end())
    throw UsageError("unknown suite '" + suite + "'");
  if (opt.degree < 1) throw UsageError("degree must be positive");
  if (opt.samples && *opt.samples < 1) throw UsageError("samples must be positive");
  const FoldedSession session(opt.theta);
  Report r;
  r.command = "verify";
  r.config = base_config(opt.theta);
  r.config["suite"] = suite;
  r.config["seed"] = opt.seed;
  r.config["samples"] = opt.samples ? Json(*opt.samples) : Json("default");
  r.config["degree"] = opt.degree;
  r.checks = run_suite(suite, opt);
  r.payload["suite"] = suite;
  for (const auto& c : r.checks)
    if (c.status == Status::anomaly) {
      std::string n = c.name + ": " + c.detail;
      if (std::find(r.notes.begin(), r.notes.end(), n) == r.notes.end()) r.notes.push_back(std::move(n));
    }
  return r;
}

Report cmd_homology(const std::vector<std::string>& families) {
  for (const auto& f : families) require_family(f, ktheory_families(), "K-theory");
  Report r;
  r.command = "homology";
  r.config = base_config({});
  Json fams = Json::array();
  std::string table = "| family | H_1 | Z ⊕ H_1 | K_0 |\n|---|---|---|---|\n";
  std::string hol;
  for (const auto& f : families) {
    const IntMatrix a = holonomy(f);
    const AbelianGroup h1 = bieberbach_h1(f);
    const AbelianGroup zh = AbelianGroup(1, {}) + h1;
    Json fj{{"family", f}, {"holonomy", matrix_json(a)}, {"H1", group_json(h1)}};
    AbelianGroup k0;
    bool ok = true;
    for (int eps : f == "B2" ? std::vector<int>{1, -1} : std::vector<int>{1}) {
      k0 = pv_solve(beta_star_matrix(f, eps)).k0;
      ok = ok && k0 == zh;
    }
    fj["K0"] = group_json(k0);
    fams.push_back(fj);
    table += "| " + f + " | " + h1.str() + " | " + zh.str() + " | " + k0.str() + " |\n";
    hol += "**" + f + "**\n\n" + md_matrix({"t1", "t2", "t3"}, a) + "\n";
    r.checks.push_back(pass_or_fail(f + ": K_0 = Z + H_1", ok, "H_1 = " + h1.str(),
                                    "Z + H_1 = " + zh.str() + ", K_0 = " + k0.str()));
  }
  r.payload["families"] = fams;
  r.sections.emplace_back("First homology", table);
  r.sections.emplace_back("Holonomy", hol);
  return r;
}

}  // namespace nbk
