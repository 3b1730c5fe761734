// Acceptance checks: one pass/fail line per criterion.
//   nbk_acceptance            all criteria
//   nbk_acceptance 3 7        selected criteria

#include "nbk/actions.hpp"
#include "nbk/crossed.hpp"
#include "nbk/ktheory.hpp"
#include "nbk/report.hpp"
#include "nbk/suites.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

using namespace nbk;

namespace {

// Every comparison below is exact; the only pinned number is the wall-clock budget.
constexpr double kBudgetSeconds = 60.0;
constexpr std::uint64_t kSeed = 1;
constexpr int kMoritaPairs = 50;
constexpr int kDecompositions = 100;
constexpr int kTracePairs = 200;
constexpr int kSnfMatrices = 500;
const Rational kFoldedTheta = make_rational(1, 5);

struct Outcome {
  bool ok = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  o.ok = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += why;
}

/// Failures fail the criterion; anomalies are counted.
void absorb(Outcome& o, const std::vector<Check>& checks, int& anomalies) {
  for (const auto& c : checks) {
    if (c.status == Status::fail) fail(o, c.name + (c.counterexample ? " [" + *c.counterexample + "]" : ""));
    if (c.status == Status::anomaly) ++anomalies;
  }
}

Outcome k_groups() {
  const std::map<std::string, std::pair<std::string, std::string>> want{
      {"B2", {"Z^2 ⊕ Z_2 ⊕ Z_2", "Z^2"}},
      {"B3", {"Z^2 ⊕ Z_3", "Z^2"}},
      {"B4", {"Z^2 ⊕ Z_2", "Z^2"}},
      {"B6", {"Z^2", "Z^2"}},
  };
  Outcome o;
  for (const auto& [f, g] : want)
    for (int eps : f == "B2" ? std::vector<int>{1, -1} : std::vector<int>{1}) {
      const KGroups k = pv_solve(beta_star_matrix(f, eps));
      const std::string tag = f + (f == "B2" ? (eps > 0 ? "(+)" : "(-)") : "");
      if (k.k0.str() != g.first || k.k1.str() != g.second)
        fail(o, tag + ": K_0 = " + k.k0.str() + ", K_1 = " + k.k1.str());
    }
  if (o.ok) o.detail = "B2 (both signs), B3, B4, B6 exact";
  return o;
}

Outcome cocycle_scan() {
  Outcome o;
  int matched = 0;
  for (const auto& f : classical_families()) {
    const auto got = scan_cocycles(f, 6), want = published_cocycle_table(f, 6);
    if (got == want) ++matched;
    else fail(o, f + ": scan " + got.str() + " vs table " + want.str());
  }
  o.detail = std::to_string(matched) + "/9 families equal; " + o.detail;
  return o;
}

Outcome projections() {
  Outcome o;
  int anomalies = 0;
  for (const auto& f : ktheory_families()) absorb(o, verify_projections(f), anomalies);
  if (o.ok) o.detail = std::to_string(anomalies) + " anomalies reported";
  return o;
}

Outcome morita() {
  Outcome o;
  int anomalies = 0;
  for (const auto& f : ktheory_families()) absorb(o, verify_morita(f, kMoritaPairs, kDecompositions, kSeed), anomalies);
  if (o.ok) o.detail = "N = 2, 3, 4, 6; " + std::to_string(kMoritaPairs) + " pairs, " + std::to_string(kDecompositions) +
                       " decompositions each";
  return o;
}

Outcome traces() {
  SuiteOptions opt;
  opt.seed = kSeed;
  opt.samples = kTracePairs;
  Outcome o;
  int anomalies = 0;
  absorb(o, run_suite("traces", opt), anomalies);
  if (o.ok) o.detail = std::to_string(kTracePairs) + " pairs per law";
  return o;
}

Outcome beta_star() {
  Outcome o;
  int anomalies = 0;
  absorb(o, run_suite("betastar"), anomalies);
  if (o.ok) o.detail = std::to_string(anomalies) + " anomalies reported";
  return o;
}

Outcome snf_oracle() {
  Outcome o;
  std::mt19937_64 rng(kSeed);
  auto unimodular = [](const IntMatrix& m) {
    std::vector<std::vector<Integer>> a(m.rows(), std::vector<Integer>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = m.at(i, j);
    return abs(oracle::leibniz_det(a)) == 1;
  };
  for (int t = 0; t < kSnfMatrices && o.ok; ++t) {
    const std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
    const IntMatrix m = oracle::random_matrix(rng, r, c, 5);
    const SmithForm f = smith_normal_form(m);
    if (f.divisors() != oracle::invariant_factors(m)) fail(o, "divisor chain differs on\n" + m.str());
    if (!(f.U * m * f.V == f.S) || !unimodular(f.U) || !unimodular(f.V)) fail(o, "bad transforms on\n" + m.str());
  }
  if (o.ok) o.detail = std::to_string(kSnfMatrices) + " matrices";
  return o;
}

Outcome homology() {
  Outcome o;
  for (const auto& f : ktheory_families()) {
    const AbelianGroup h1 = bieberbach_h1(f);
    for (int eps : f == "B2" ? std::vector<int>{1, -1} : std::vector<int>{1}) {
      const AbelianGroup k0 = pv_solve(beta_star_matrix(f, eps)).k0;
      if (!(k0 == AbelianGroup(1, {}) + h1)) fail(o, f + ": K_0 = " + k0.str() + ", H_1 = " + h1.str());
    }
    if (o.ok) o.detail += (o.detail.empty() ? "" : ", ") + f + ": H_1 = " + h1.str();
  }
  return o;
}

Outcome theta_independence() {
  Outcome o;
  int anomalies = 0;
  const SessionOrderGuard guard(folded_session_order(kFoldedTheta));
  const int eps = epsilon_for(kFoldedTheta);
  for (const auto& f : ktheory_families()) {
    absorb(o, verify_projections(f, kFoldedTheta), anomalies);
    absorb(o, verify_beta_star(f, eps, kFoldedTheta), anomalies);
    const KGroups folded = pv_solve(beta_star_matrix(f, eps));
    SessionOrderGuard symbolic(24);
    const KGroups sym = pv_solve(beta_star_matrix(f, 1));
    if (!(folded.k0 == sym.k0 && folded.k1 == sym.k1))
      fail(o, f + ": folded " + folded.k0.str() + " vs symbolic " + sym.k0.str());
  }
  if (o.ok)
    o.detail = "θ = " + kFoldedTheta.get_str() + ", cyclotomic order " + std::to_string(folded_session_order(kFoldedTheta));
  return o;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "K-group reproduction", k_groups},
      {2, "cocycle scan reproduction", cocycle_scan},
      {3, "projection suite", projections},
      {4, "Morita identities", morita},
      {5, "trace laws", traces},
      {6, "beta_* consistency", beta_star},
      {7, "SNF oracle equivalence", snf_oracle},
      {8, "homology relation", homology},
      {9, "theta independence", theta_independence},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  bool ok = true;
  double total = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    total += secs;
    ok = ok && o.ok;
    std::printf("criterion %d: %s  %s (%.2f s)  %s\n", c.id, o.ok ? "PASS" : "FAIL", c.title, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  const bool in_budget = total < kBudgetSeconds;
  std::printf("total %.2f s, budget %.0f s: %s\n", total, kBudgetSeconds, in_budget ? "within" : "EXCEEDED");
  return ok && in_budget ? 0 : 1;
}
