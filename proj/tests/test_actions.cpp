#include "nbk/actions.hpp"
#include "nbk/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>

using namespace nbk;

namespace {

// Linear parts of the classical actions, columns are the images of e1, e2, e3.
using Lin = std::array<std::array<long, 3>, 3>;  // [row][col]

Lin from_columns(std::array<long, 3> c1, std::array<long, 3> c2, std::array<long, 3> c3) {
  Lin a{};
  for (int i = 0; i < 3; ++i) {
    a[i][0] = c1[i];
    a[i][1] = c2[i];
    a[i][2] = c3[i];
  }
  return a;
}

struct OracleFamily {
  std::vector<Lin> maps;
  std::optional<std::pair<int, int>> free;
};

const std::map<std::string, OracleFamily>& oracle_families() {
  static const std::map<std::string, OracleFamily> f{
      {"B2", {{from_columns({1, 0, 0}, {0, -1, 0}, {0, 0, -1})}, std::pair{1, 2}}},
      {"B3", {{from_columns({1, 0, 0}, {0, 0, -1}, {0, 1, -1})}, std::pair{1, 2}}},
      {"B4", {{from_columns({1, 0, 0}, {0, 0, 1}, {0, -1, 0})}, std::pair{1, 2}}},
      {"B5", {{from_columns({1, 0, 0}, {0, -1, 0}, {0, 0, -1}), from_columns({-1, 0, 0}, {0, 1, 0}, {0, 0, -1})}, {}}},
      {"B6", {{from_columns({1, 0, 0}, {0, 0, 1}, {0, -1, 1})}, std::pair{1, 2}}},
      {"N1", {{from_columns({1, 0, 0}, {0, 1, 0}, {0, 0, -1})}, std::pair{0, 1}}},
      {"N2", {{from_columns({1, 0, 0}, {0, 1, 1}, {0, 0, -1})}, std::pair{0, 1}}},
      {"N3", {{from_columns({1, 0, 0}, {0, -1, 0}, {0, 0, -1}), from_columns({1, 0, 0}, {0, 1, 0}, {0, 0, -1})}, {}}},
      {"N4", {{from_columns({1, 0, 0}, {0, -1, 0}, {0, 0, -1}), from_columns({1, 0, 0}, {0, 1, 0}, {0, 0, -1})}, {}}},
  };
  return f;
}

/// Admissible iff every image pair obeys the commutation relation of the
/// original pair: (A^T Theta A - Theta)_jk integral, with no theta part.
std::vector<ThetaTriple> oracle_scan(const std::string& family, int denominator) {
  const auto& of = oracle_families().at(family);
  static const std::pair<int, int> slots[3] = {{0, 1}, {0, 2}, {1, 2}};
  std::vector<ThetaTriple> out;
  std::vector<std::vector<ThetaEntry>> choices(3);
  for (int s = 0; s < 3; ++s) {
    if (of.free && *of.free == slots[s]) {
      choices[s] = {ThetaEntry{Rational(0), Rational(1)}};
    } else {
      for (int k = 0; k < denominator; ++k) choices[s].push_back({make_rational(k, denominator), Rational(0)});
    }
  }
  for (const auto& x : choices[0])
    for (const auto& y : choices[1])
      for (const auto& z : choices[2]) {
        ThetaEntry th[3][3];
        const ThetaTriple t{x, y, z};
        for (int s = 0; s < 3; ++s) {
          th[slots[s].first][slots[s].second] = t[s];
          th[slots[s].second][slots[s].first] = -t[s];
        }
        bool ok = true;
        for (const auto& a : of.maps)
          for (int s = 0; s < 3 && ok; ++s) {
            const auto [j, k] = slots[s];
            ThetaEntry d = -th[j][k];
            for (int p = 0; p < 3; ++p)
              for (int q = 0; q < 3; ++q) {
                const long c = a[p][j] * a[q][k];
                d.a += c * th[p][q].a;
                d.b += c * th[p][q].b;
              }
            ok = d.b == 0 && d.a.get_den() == 1;
          }
        if (ok) out.push_back(t);
      }
  std::sort(out.begin(), out.end(), theta_triple_less);
  return out;
}

}  // namespace

TEST_CASE("scan agrees with the commutation-relation oracle") {
  for (const auto& f : classical_families()) {
    for (int d : {2, 6}) {
      INFO(f << " at denominator " << d);
      CHECK(scan_cocycles(f, d).admissible == oracle_scan(f, d));
    }
    INFO(f << " at degree bound 3");
    CHECK(scan_cocycles(f, 6, 3).admissible == oracle_scan(f, 6));
  }
}

TEST_CASE("scan reproduces the published rows") {
  for (const std::string f : {"B2", "B3", "B4", "B5", "N1", "N3", "N4"}) {
    INFO(f);
    CHECK(scan_cocycles(f, 6) == published_cocycle_table(f, 6));
  }
  CHECK(scan_cocycles("B4", 6).str() == "(θ_12, θ_13, θ_23) ∈ {(0, 0, θ); (1/2, 1/2, θ)}");
  CHECK(scan_cocycles("N1", 6).str() == "θ_12 = θ, θ_13 ∈ {0, 1/2}, θ_23 ∈ {0, 1/2}");
  CHECK(scan_cocycles("B2", 2) == published_cocycle_table("B2", 2));
  CHECK(published_cocycle_table("B2", 2) == published_cocycle_table("B2", 6));
}

TEST_CASE("published B6 and N2 rows contain incompatible cocycles") {
  // B6 rows with theta_12 = 1/3 and N2 rows with theta_13 = 1/2 break compatibility.
  for (const auto& [family, extra] : std::vector<std::pair<std::string, ThetaTriple>>{
           {"B6", {ThetaEntry{make_rational(1, 3), Rational(0)}, ThetaEntry{make_rational(2, 3), Rational(0)},
                   ThetaEntry{Rational(0), Rational(1)}}},
           {"N2", {ThetaEntry{Rational(0), Rational(1)}, ThetaEntry{make_rational(1, 2), Rational(0)},
                   ThetaEntry{Rational(0), Rational(0)}}}}) {
    const auto pub = published_cocycle_table(family, 6).admissible;
    CHECK(std::find(pub.begin(), pub.end(), extra) != pub.end());
    ThetaMatrix t(3);
    t.set(0, 1, extra[0]);
    t.set(0, 2, extra[1]);
    t.set(1, 2, extra[2]);
    const auto v = find_compatibility_violation(classical_spec(family).materialize(t), t, 2);
    REQUIRE(v);
    CHECK(v->lhs != v->rhs);
  }
}

TEST_CASE("threaded and serial scans agree") {
  for (const std::string f : {"B3", "B5", "N2"})
    CHECK(scan_cocycles(classical_spec(f), 6) == reference::scan_cocycles(classical_spec(f), 6));
}

TEST_CASE("noncommutative actions") {
  const ThetaMatrix theta = standard_theta(3);
  for (const auto& f : noncommutative_families()) {
    INFO(f);
    const FiniteAction a = noncommutative_spec(f).materialize(theta);
    CHECK(check_order(a, theta));
    CHECK(check_compatibility(a, theta, 2));
    CHECK(reference::check_compatibility(a, theta, 2));
    CHECK(freeness_witness(a, theta).free);
    const std::map<std::string, int> orders{{"B2", 2}, {"B3", 3}, {"B4", 4}, {"B6", 6}, {"N1", 2}, {"N2", 2}};
    CHECK(a.order() == orders.at(f));
  }
}

TEST_CASE("homogeneous decomposition") {
  const ThetaMatrix theta = standard_theta(3);
  const FiniteAction a = noncommutative_spec("B4").materialize(theta);
  Sampler s(17);
  for (int i = 0; i < 20; ++i) {
    const TorusElement x = s.torus(theta, 2, 4);
    const auto comps = homogeneous_components(a, theta, x);
    REQUIRE(comps.size() == 4);
    TorusElement sum(3);
    for (std::size_t k = 0; k < comps.size(); ++k) {
      sum += comps[k];
      const auto lambda_k = PhasedScalar(Cyclotomic::root(4, static_cast<long>(k)));
      CHECK(apply(a, theta, comps[k]) == (comps[k] * lambda_k).normalized(theta));
    }
    CHECK(sum == x);
    CHECK(apply_power(a.generator(), theta, x, 4) == x);
  }
}

TEST_CASE("action text format") {
  const auto spec = ActionSpec::parse(
      "action toy   # comment\n"
      "generators U V\n"
      "group g 2\n"
      "free 1 2\n"
      "g: U -> -U\n"
      "g: V -> 1/2 * 2 V*\n");
  CHECK(spec.name() == "toy");
  CHECK(spec.labels() == std::vector<std::string>{"U", "V"});
  CHECK(spec.free_slot() == std::pair{0, 1});
  auto error_line = [](const char* text) {
    try {
      ActionSpec::parse(text);
    } catch (const ActionFormatError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(error_line("generators U\ngroup g 2\ng: U -> X\n") == 3);
  CHECK(error_line("generators U\ngroup g 2\nh: U -> U\n") == 3);
  CHECK(error_line("group g 2\n") == 1);
  CHECK(error_line("generators U V\ngroup g 2\ng: U -> U\n") == 0);
  CHECK(error_line("generators U\ngroup g 2\ng: U -> [1,2]\n") == 3);
  CHECK(error_line("generators U\nbogus\n") == 2);
  for (const auto& f : classical_families()) CHECK_NOTHROW(ActionSpec::parse(builtin_action_text(f, false)));
  CHECK_THROWS(classical_spec("B7"));
}
