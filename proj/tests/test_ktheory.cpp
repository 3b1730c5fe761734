#include "nbk/ktheory.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <map>

using namespace nbk;

namespace {

bool no_failures(const std::vector<Check>& cs) {
  for (const auto& c : cs)
    if (c.status == Status::fail) {
      MESSAGE(c.name << ": " << c.counterexample.value_or(c.detail));
      return false;
    }
  return true;
}

/// H_1 from the presentation <t, g | [t_i, t_j], g t g^-1 = A t, g^N = t1>,
/// reduced with the determinantal-divisor oracle.
AbelianGroup h1_oracle(const IntMatrix& a, int n) {
  IntMatrix rel(4, 4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) rel.at(i, j) = a.at(i, j) - (i == j ? 1 : 0);
  rel.at(0, 3) = -1;
  rel.at(3, 3) = n;
  const auto f = oracle::invariant_factors(rel);
  return AbelianGroup(4 - f.size(), f);
}

}  // namespace

TEST_CASE("K-groups") {
  const std::map<std::string, std::pair<std::string, std::string>> want{
      {"B2", {"Z^2 ⊕ Z_2 ⊕ Z_2", "Z^2"}},
      {"B3", {"Z^2 ⊕ Z_3", "Z^2"}},
      {"B4", {"Z^2 ⊕ Z_2", "Z^2"}},
      {"B6", {"Z^2", "Z^2"}},
  };
  for (const auto& [f, groups] : want)
    for (int eps : {1, -1}) {
      INFO(f << " eps " << eps);
      const BetaStarData d = beta_star_matrix(f, eps);
      const KGroups k = pv_solve(d);
      CHECK(k.k0.str() == groups.first);
      CHECK(k.k1.str() == groups.second);
      CHECK(k.k0 == published_k_groups(f).k0);
      CHECK(d.beta().pow(static_cast<unsigned>(d.order)) == IntMatrix::identity(d.m.rows()));
      CHECK(k.certificate.U * d.m * k.certificate.V == k.certificate.S);
    }
  CHECK(beta_star_matrix("B2", 1).m != beta_star_matrix("B2", -1).m);
  CHECK_THROWS_AS(beta_star_matrix("B5"), std::invalid_argument);
  CHECK_THROWS_AS(beta_star_matrix("B2", 0), std::invalid_argument);
}

TEST_CASE("inconsistent data is rejected") {
  BetaStarData d = beta_star_matrix("B3");
  d.m.at(1, 1) += 1;
  CHECK_THROWS_AS(pv_solve(d), InconsistentData);
  BetaStarData e = beta_star_matrix("B2");
  e.m = IntMatrix(6, 6);
  e.m.at(1, 0) = 1;
  CHECK_THROWS_AS(pv_solve(e), InconsistentData);
}

TEST_CASE("displayed matrices") {
  CHECK(compare_with_fixture(beta_star_matrix("B3"), beta_star_fixture("B3")).status == Status::pass);
  CHECK(compare_with_fixture(beta_star_matrix("B4"), beta_star_fixture("B4")).status == Status::pass);
  CHECK(compare_with_fixture(beta_star_matrix("B6"), beta_star_fixture("B6")).status == Status::pass);
  for (int eps : {1, -1}) {
    const auto cmp = compare_with_fixture(beta_star_matrix("B2", eps), beta_star_fixture("B2", eps));
    CHECK(cmp.status == Status::anomaly);
    CHECK(cmp.permutation == std::vector<std::size_t>{0, 1, 3, 2, 4, 5});
  }
  const auto shown = parse_beta_star_fixture("# basis: a b\n1 eps\n0 -eps\n", -1);
  CHECK(shown.basis == std::vector<std::string>{"a", "b"});
  CHECK(shown.m == IntMatrix{{1, -1}, {0, 1}});
  CHECK_THROWS(parse_beta_star_fixture("# basis: a b\n1 2 3\n0 1\n"));
}

TEST_CASE("beta_* against the crossed-product elements") {
  for (const auto& f : ktheory_families()) {
    INFO(f);
    CHECK(no_failures(verify_beta_star(f, 1)));
  }
  CHECK(no_failures(verify_beta_star("B2", -1)));
}

TEST_CASE("trace table") {
  for (int eps : {1, -1}) {
    const auto rows = z2_trace_table(eps);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].generator == "[1]");
    for (const auto& r : rows) CHECK(r.values.size() == 6);
  }
}

TEST_CASE("homology of the Bieberbach groups") {
  const std::map<std::string, std::pair<IntMatrix, int>> classical{
      {"B2", {IntMatrix{{1, 0, 0}, {0, -1, 0}, {0, 0, -1}}, 2}},
      {"B3", {IntMatrix{{1, 0, 0}, {0, 0, 1}, {0, -1, -1}}, 3}},
      {"B4", {IntMatrix{{1, 0, 0}, {0, 0, -1}, {0, 1, 0}}, 4}},
      {"B6", {IntMatrix{{1, 0, 0}, {0, 0, -1}, {0, 1, 1}}, 6}},
  };
  const std::map<std::string, std::string> h1{{"B2", "Z ⊕ Z_2 ⊕ Z_2"}, {"B3", "Z ⊕ Z_3"}, {"B4", "Z ⊕ Z_2"}, {"B6", "Z"}};
  for (const auto& [f, an] : classical) {
    INFO(f);
    CHECK(bieberbach_h1(f) == h1_oracle(an.first, an.second));
    CHECK(bieberbach_h1(f).str() == h1.at(f));
    CHECK(holonomy(f).pow(static_cast<unsigned>(an.second)) == IntMatrix::identity(3));
    CHECK(compare_with_k0(f, 1));
  }
  CHECK(compare_with_k0("B2", -1));
}

TEST_CASE("epsilon") {
  CHECK(epsilon_for(make_rational(1, 5)) == 1);
  CHECK(epsilon_for(make_rational(3, 5)) == -1);
  CHECK(epsilon_for(make_rational(6, 5)) == 1);
  CHECK_THROWS(epsilon_for(make_rational(1, 2)));
}
