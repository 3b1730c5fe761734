#include "nbk/ktheory.hpp"

#include "nbk/actions.hpp"
#include "nbk/crossed.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace nbk {

const std::vector<std::string>& ktheory_families() {
  static const std::vector<std::string> f{"B2", "B3", "B4", "B6"};
  return f;
}

int epsilon_for(const Rational& theta) {
  Rational t = theta;
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
  t -= fl;
  if (t == 0 || t * 2 == 1) throw std::invalid_argument("epsilon is undefined at theta = " + theta.get_str());
  return t * 2 < 1 ? 1 : -1;
}

std::size_t BetaStarData::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis[i] == label) return i;
  throw std::out_of_range("no generator " + std::string(label) + " in the " + family + " basis");
}

namespace {

using Image = std::vector<std::pair<std::string, int>>;

struct Rules {
  int order = 0;
  std::vector<std::string> basis;
  std::map<std::string, Image> images;
  std::vector<std::string> notes;
};

Rules lemma_rules(const std::string& family, int eps) {
  Rules r;
  auto q = [](int n, const std::string& x) { return "Q" + std::to_string(n) + "(" + x + ")"; };
  r.images["[1]"] = {{"[1]", 1}};
  if (family == "B2") {
    r.order = 2;
    r.basis = {"[1]", "e00", "e01", "e10", "e11", "M2"};
    for (const char* e : {"e00", "e01", "e10", "e11"}) r.images[e] = {{"[1]", 1}, {e, -1}};
    r.images["M2"] = {{"M2", 1}, {"e00", -1}, {"e11", 1}, {"e10", -eps}, {"e01", eps}};
  } else if (family == "B3") {
    r.order = 3;
    r.basis = {"[1]"};
    for (const char* x : {"p", "X", "Y"}) {
      r.basis.push_back(q(1, x));
      r.basis.push_back(q(0, x));
      r.images[q(1, x)] = {{q(0, x), 1}};
      r.images[q(0, x)] = {{"[1]", 1}, {q(0, x), -1}, {q(1, x), -1}};
    }
    r.basis.push_back("M3");
    r.images["M3"] = {{"M3", 1}, {q(0, "p"), -1}, {q(0, "X"), -1}, {q(0, "Y"), -1}, {"[1]", 1}};
  } else if (family == "B4") {
    r.order = 4;
    r.basis = {"[1]"};
    for (const char* x : {"p", "x"}) {
      for (int n = 2; n >= 0; --n) r.basis.push_back(q(n, x));
      r.images[q(2, x)] = {{q(1, x), 1}};
      r.images[q(1, x)] = {{q(0, x), 1}};
      r.images[q(0, x)] = {{"[1]", 1}, {q(0, x), -1}, {q(1, x), -1}, {q(2, x), -1}};
    }
    r.basis.push_back("Q0(Vp^2)");
    r.images["Q0(Vp^2)"] = {{"[1]", 1}, {"Q0(Vp^2)", -1}};
    r.basis.push_back("M4");
    r.images["M4"] = {{"M4", 1}, {"Q0(Vp^2)", -1}, {q(0, "p"), -1}, {q(0, "x"), -1}, {"[1]", 1}};
  } else if (family == "B6") {
    r.order = 6;
    r.basis = {"[1]"};
    for (int n = 4; n >= 0; --n) r.basis.push_back(q(n, "p"));
    // Q_{n+1}(p) -> Q_n(p) is stated for n = 1..4, which reaches Q_5(p) and
    // leaves Q_1(p) without an image; within the basis it is n = 0..3.
    for (int n = 0; n <= 3; ++n) r.images[q(n + 1, "p")] = {{q(n, "p"), 1}};
    r.notes.push_back("Q_{n+1}(p) -> Q_n(p) is stated for n = 1..4; Q_5(p) is not a generator, so n = 0..3 is used");
    Image q0{{"[1]", 1}};
    for (int k = 0; k <= 4; ++k) q0.emplace_back(q(k, "p"), -1);
    r.images[q(0, "p")] = q0;
    r.basis.insert(r.basis.end(), {"Q2(y)", "Q0(y)", "Q0(Vp^3)", "M6"});
    r.images["Q2(y)"] = {{"Q0(y)", 1}};
    r.images["Q0(y)"] = {{"[1]", 1}, {"Q0(y)", -1}, {"Q2(y)", -1}};
    r.images["Q0(Vp^3)"] = {{"[1]", 1}, {"Q0(Vp^3)", -1}};
    r.images["M6"] = {{"M6", 1}, {q(0, "p"), -1}, {"Q0(y)", -1}, {"Q0(Vp^3)", -1}, {"[1]", 1}};
  } else {
    throw std::invalid_argument("no beta_* data for family " + family);
  }
  return r;
}

}  // namespace

BetaStarData beta_star_matrix(const std::string& family, int epsilon) {
  if (epsilon != 1 && epsilon != -1) throw std::invalid_argument("epsilon must be +1 or -1");
  Rules r = lemma_rules(family, epsilon);
  BetaStarData d;
  d.family = family;
  d.order = r.order;
  d.basis = r.basis;
  if (family == "B2") d.epsilon = epsilon;
  d.notes = std::move(r.notes);
  const std::size_t n = d.basis.size();
  IntMatrix beta(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    auto it = r.images.find(d.basis[c]);
    if (it == r.images.end()) throw std::logic_error("no beta_* image for " + d.basis[c]);
    for (const auto& [label, coeff] : it->second) beta.at(d.index_of(label), c) += coeff;
  }
  d.m = IntMatrix::identity(n) - beta;
  return d;
}

KGroups pv_solve(const BetaStarData& data) {
  const IntMatrix b = data.beta();
  const std::size_t n = b.rows();
  if (!(b.pow(static_cast<unsigned>(data.order)) == IntMatrix::identity(n)))
    throw InconsistentData(data.family + ": beta_* does not have order " + std::to_string(data.order));
  const std::size_t one = data.index_of("[1]");
  for (std::size_t i = 0; i < n; ++i)
    if (b.at(i, one) != (i == one ? 1 : 0)) throw InconsistentData(data.family + ": beta_* moves [1]");
  auto kc = kernel_cokernel(data.m);
  return KGroups{kc.coker, kc.ker, smith_normal_form(data.m)};
}

KGroups published_k_groups(const std::string& family) {
  const AbelianGroup z2(2, {});
  if (family == "B2") return {AbelianGroup(2, {2, 2}), z2, {}};
  if (family == "B3") return {AbelianGroup(2, {3}), z2, {}};
  if (family == "B4") return {AbelianGroup(2, {2}), z2, {}};
  if (family == "B6") return {z2, z2, {}};
  throw std::invalid_argument("no published K-groups for family " + family);
}

// ---------------------------------------------------------------------------
// fixtures

DisplayedMatrix parse_beta_star_fixture(std::string_view text, int epsilon) {
  DisplayedMatrix d;
  std::vector<std::vector<Integer>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream h(line.substr(1));
      std::string word;
      h >> word;
      if (word == "basis:") {
        while (h >> word) d.basis.push_back(word);
      } else if (d.family.empty() && !word.empty() && word.back() == ':') {
        d.family = word.substr(0, word.size() - 1);
      }
      continue;
    }
    std::istringstream ls(line);
    std::vector<Integer> row;
    std::string tok;
    while (ls >> tok) {
      if (tok == "eps") row.emplace_back(epsilon);
      else if (tok == "-eps") row.emplace_back(-epsilon);
      else row.emplace_back(tok);
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  if (d.basis.size() != n) throw std::invalid_argument("fixture: basis header does not match the row count");
  d.m = IntMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw std::invalid_argument("fixture: row " + std::to_string(i + 1) + " has wrong length");
    for (std::size_t j = 0; j < n; ++j) d.m.at(i, j) = rows[i][j];
  }
  return d;
}

DisplayedMatrix beta_star_fixture(const std::string& family, int epsilon) {
  return parse_beta_star_fixture(beta_star_fixture_text(family), epsilon);
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

}  // namespace

FixtureComparison compare_with_fixture(const BetaStarData& data, const DisplayedMatrix& shown) {
  FixtureComparison out;
  const std::size_t n = data.basis.size();
  if (shown.m.rows() != n) {
    out.detail = "displayed matrix is " + std::to_string(shown.m.rows()) + "x" + std::to_string(shown.m.rows()) +
                 ", assembled is " + std::to_string(n) + "x" + std::to_string(n);
    return out;
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = std::find(data.basis.begin(), data.basis.end(), shown.basis[i]);
    if (it == data.basis.end()) {
      out.detail = "displayed basis label " + shown.basis[i] + " is not a generator";
      return out;
    }
    perm[i] = static_cast<std::size_t>(it - data.basis.begin());
  }
  auto matches = [&](const std::vector<std::size_t>& p) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (shown.m.at(i, j) != data.m.at(p[i], p[j])) return false;
    return true;
  };
  if (matches(perm)) {
    out.status = Status::pass;
    out.permutation = perm;
    out.detail = "displayed matrix equals the assembled one";
    return out;
  }
  // relabel the projector generators only: [1] first, the exotic module last
  std::vector<std::size_t> inner(perm.begin() + 1, perm.end() - 1);
  std::sort(inner.begin(), inner.end());
  do {
    std::vector<std::size_t> p{perm.front()};
    p.insert(p.end(), inner.begin(), inner.end());
    p.push_back(perm.back());
    if (matches(p)) {
      std::vector<std::string> order;
      for (std::size_t i : p) order.push_back(data.basis[i]);
      out.status = Status::anomaly;
      out.permutation = p;
      out.detail = "displayed matrix matches the assembled one in the basis order (" + join(order) +
                   "), not the stated (" + join(shown.basis) + ")";
      return out;
    }
  } while (std::next_permutation(inner.begin(), inner.end()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (shown.m.at(i, j) != data.m.at(perm[i], perm[j])) {
        out.detail = "entry (" + shown.basis[i] + ", " + shown.basis[j] + "): displayed " + shown.m.at(i, j).get_str() +
                     ", assembled " + data.m.at(perm[i], perm[j]).get_str() + "; no relabelling fits";
        return out;
      }
  return out;
}

// ---------------------------------------------------------------------------
// consistency

std::vector<TraceRow> z2_trace_table(int epsilon) {
  using V = std::pair<Rational, Rational>;
  const V zero{0, 0};
  std::vector<TraceRow> t;
  t.push_back({"[1]", {V{1, 0}, zero, zero, zero, zero, zero}});
  t.push_back({"M2", {V{0, Rational(1, 2)}, V{1, 0}, V{-epsilon, 0}, V{epsilon, 0}, V{-1, 0}, V{1, 0}}});
  const char* names[] = {"e00", "e01", "e10", "e11"};
  for (int r = 0; r < 4; ++r) {
    std::vector<V> v{V{Rational(1, 2), 0}, zero, zero, zero, zero, zero};
    v[static_cast<std::size_t>(r + 1)] = V{2, 0};
    t.push_back({names[r], v});
  }
  return t;
}

namespace {

std::optional<Rational> rational_value(const PhasedScalar& s) {
  if (s.is_zero()) return Rational(0);
  if (!s.is_single_term() || s.terms().front().first != 0) return std::nullopt;
  return s.terms().front().second.as_rational();
}

std::string affine_str(const std::pair<Rational, Rational>& v) {
  if (v.second == 0) return to_string(v.first);
  std::string s = v.first == 0 ? "" : to_string(v.first) + " + ";
  return s + to_string(v.second) + "θ";
}

std::vector<Check> trace_layer(const BetaStarData& data, const K0Data& k0) {
  std::vector<Check> out;
  const std::string tag = data.family + ": ";
  const int eps = data.epsilon.value_or(1);
  const auto table = z2_trace_table(eps);
  const char* names[] = {"tau", "tau_00", "tau_01", "tau_10", "tau_11", "C"};
  const int want_sign[] = {1, -1, -1, -1, -1, 1};
  std::map<std::string, const TraceRow*> row_of;
  for (const auto& r : table) row_of[r.generator] = &r;

  const IntMatrix b = data.beta();
  for (std::size_t f = 0; f < 6; ++f) {
    bool ok = true;
    std::string cex;
    for (std::size_t c = 0; c < data.basis.size() && ok; ++c) {
      std::pair<Rational, Rational> acc{0, 0};
      for (std::size_t h = 0; h < data.basis.size(); ++h) {
        if (b.at(h, c) == 0) continue;
        const auto& v = row_of.at(data.basis[h])->values[f];
        acc.first += v.first * b.at(h, c);
        acc.second += v.second * b.at(h, c);
      }
      const auto& self = row_of.at(data.basis[c])->values[f];
      const std::pair<Rational, Rational> want{self.first * want_sign[f], self.second * want_sign[f]};
      if (acc != want) {
        ok = false;
        cex = std::string(names[f]) + "(beta_*[" + data.basis[c] + "]) = " + affine_str(acc) + ", expected " +
              affine_str(want);
      }
    }
    out.push_back(pass_or_fail(tag + names[f] + " o beta_* = " + (want_sign[f] < 0 ? "-" : "") + names[f], ok,
                               "trace table rows, epsilon = " + std::to_string(eps), cex));
  }

  out.push_back(Check{tag + "trace table row labels", Status::anomaly,
                      "the four projector rows are labelled e01, e10, e01, e10; they are read as e00, e01, e10, e11 "
                      "in order, which is the only reading consistent with the M2 row",
                      std::nullopt});

  // closed-formula values on the explicit projections
  std::vector<std::string> direct;
  bool as_table = true, as_transpose = true;
  for (const char* e : {"e00", "e01", "e10", "e11"}) {
    const auto q = k0.element(*k0.index_of(e));
    const auto& row = row_of.at(e)->values;
    std::vector<Rational> got;
    for (int jk = 0; jk < 4; ++jk) {
      auto v = rational_value(trace_eval(TraceFunctional::walters(jk / 2, jk % 2), q));
      got.push_back(v.value_or(Rational(-999)));
    }
    for (int jk = 0; jk < 4; ++jk) {
      const int t = jk == 1 ? 2 : jk == 2 ? 1 : jk;
      as_table = as_table && got[static_cast<std::size_t>(jk)] == row[static_cast<std::size_t>(jk + 1)].first;
      as_transpose = as_transpose && got[static_cast<std::size_t>(t)] == row[static_cast<std::size_t>(jk + 1)].first;
    }
    std::string s = std::string(e) + ":";
    for (const auto& g : got) s += " " + to_string(g);
    direct.push_back(s);
  }
  const std::string values = "closed formula (tau_00, tau_01, tau_10, tau_11): " + join(direct);
  if (as_table) {
    out.push_back(pass_or_fail(tag + "trace formula on e_jk", true, values));
  } else if (as_transpose) {
    out.push_back(Check{tag + "trace formula on e_jk", Status::anomaly,
                        values + "; the table agrees after exchanging tau_01 and tau_10", std::nullopt});
  } else {
    out.push_back(pass_or_fail(tag + "trace formula on e_jk", false, {}, values));
  }
  return out;
}

}  // namespace

std::vector<Check> verify_beta_star(const std::string& family, int epsilon, const std::optional<Rational>& theta_value) {
  std::vector<Check> out;
  const BetaStarData data = beta_star_matrix(family, epsilon);
  const std::string tag = family + ": ";
  const std::size_t n = data.basis.size();
  const IntMatrix b = data.beta();

  // (i)
  const IntMatrix bn = b.pow(static_cast<unsigned>(data.order));
  out.push_back(pass_or_fail(tag + "beta_*^" + std::to_string(data.order) + " = I", bn == IntMatrix::identity(n), {},
                             "beta_*^N =\n" + bn.str()));
  const std::size_t one = data.index_of("[1]");
  bool fixed = true;
  for (std::size_t i = 0; i < n; ++i) fixed = fixed && b.at(i, one) == (i == one ? 1 : 0);
  out.push_back(pass_or_fail(tag + "beta_*[1] = [1]", fixed));
  for (const auto& note : data.notes) out.push_back(Check{tag + "beta_* rule index range", Status::anomaly, note, std::nullopt});
  const auto cmp = compare_with_fixture(data, beta_star_fixture(family, epsilon));
  out.push_back(Check{tag + "displayed matrix", cmp.status, cmp.detail,
                      cmp.status == Status::fail ? std::optional<std::string>(cmp.detail) : std::nullopt});

  // (ii)
  const K0Data k0 = k0_generators(family, theta_value);
  if (k0.basis.size() != n) throw std::logic_error(family + ": K_0 generator lists disagree");
  for (std::size_t c = 0; c < n; ++c) {
    const auto& g = k0.basis[c];
    if (g.label != data.basis[c]) throw std::logic_error(family + ": K_0 generator lists disagree at " + g.label);
    if (g.kind == K0Generator::Kind::exotic) continue;
    const std::string name = tag + "beta_* on " + g.label + " against beta-hat";
    CrossedElement rhs(k0.ctx);
    std::optional<std::string> problem;
    for (std::size_t h = 0; h < n; ++h) {
      if (b.at(h, c) == 0) continue;
      if (k0.basis[h].kind == K0Generator::Kind::exotic) {
        problem = "image involves the exotic generator " + k0.basis[h].label;
        break;
      }
      rhs += k0.element(h) * PhasedScalar(Rational(b.at(h, c)));
    }
    if (problem) {
      out.push_back(pass_or_fail(name, false, {}, *problem));
      continue;
    }
    const CrossedElement lhs = beta_hat(k0.element(c));
    out.push_back(pass_or_fail(name, lhs == rhs, {}, "beta-hat = " + lhs.str() + ", column gives " + rhs.str()));
  }

  // (iii)
  if (data.order == 2) {
    auto t = trace_layer(data, k0);
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// homology

IntMatrix holonomy(const std::string& family) {
  const FiniteAction a = classical_spec(family).materialize(ThetaMatrix(3));
  const auto& g = a.generator();
  IntMatrix h(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) h.at(j, i) = g.images[i].target[static_cast<int>(j)];
  return h;
}

AbelianGroup bieberbach_h1(const std::string& family) {
  const IntMatrix a = holonomy(family);
  const int n = classical_spec(family).generators().front().order;
  // generators t1, t2, t3, g; one column per relation
  IntMatrix rel(4, 4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) rel.at(j, i) = a.at(j, i) - (i == j ? 1 : 0);
  rel.at(0, 3) = -1;
  rel.at(3, 3) = n;
  return cokernel(rel);
}

bool compare_with_k0(const std::string& family, int epsilon) {
  const KGroups k = pv_solve(beta_star_matrix(family, epsilon));
  return k.k0 == AbelianGroup(1, {}) + bieberbach_h1(family);
}

}  // namespace nbk
