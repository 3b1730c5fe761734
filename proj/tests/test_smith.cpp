#include "nbk/smith.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace nbk;

namespace {

std::vector<std::vector<Integer>> rows_of(const IntMatrix& m) {
  std::vector<std::vector<Integer>> a(m.rows(), std::vector<Integer>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = m.at(i, j);
  return a;
}

bool unimodular(const IntMatrix& m) { return abs(oracle::leibniz_det(rows_of(m))) == 1; }

}  // namespace

TEST_CASE("small Smith forms") {
  const auto f = smith_normal_form(IntMatrix{{2, 0}, {0, 3}});
  CHECK(f.divisors() == std::vector<Integer>{1, 6});
  CHECK(smith_normal_form(IntMatrix{{0, 0}, {0, 0}}).rank == 0);
  CHECK(smith_normal_form(IntMatrix{{4, 6}}).divisors() == std::vector<Integer>{2});
  const IntMatrix z6{{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}};
  CHECK(smith_normal_form(z6).divisors() == std::vector<Integer>{2, 6, 12});
}

TEST_CASE("divisor chains agree with determinantal divisors on random matrices") {
  std::mt19937_64 rng(20240601);
  for (int t = 0; t < 500; ++t) {
    const std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
    const IntMatrix m = oracle::random_matrix(rng, r, c, 5);
    const SmithForm f = smith_normal_form(m);
    INFO("matrix:\n" << m.str());
    CHECK(f.divisors() == oracle::invariant_factors(m));
    CHECK(f.U * m * f.V == f.S);
    CHECK(f.S.is_diagonal());
    CHECK(unimodular(f.U));
    CHECK(unimodular(f.V));
    const auto d = f.divisors();
    for (std::size_t i = 0; i + 1 < d.size(); ++i) CHECK(d[i + 1] % d[i] == 0);
  }
}

TEST_CASE("determinant matches the permutation expansion") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 5;
    const IntMatrix m = oracle::random_matrix(rng, n, n, 6);
    CHECK(determinant(m) == oracle::leibniz_det(rows_of(m)));
  }
}

TEST_CASE("abelian groups in canonical form") {
  CHECK(AbelianGroup(2, {2, 3}).str() == "Z^2 ⊕ Z_6");
  CHECK(AbelianGroup(0, {}).str() == "0");
  CHECK(AbelianGroup(1, {1, -1}).str() == "Z");
  CHECK(AbelianGroup(0, {4, 2}).str() == "Z_2 ⊕ Z_4");
  CHECK(AbelianGroup(1, {2}) + AbelianGroup(1, {3}) == AbelianGroup(2, {6}));
  CHECK(AbelianGroup(0, {2, 2}) != AbelianGroup(0, {4}));
}

TEST_CASE("kernel and cokernel") {
  const auto kc = kernel_cokernel(IntMatrix{{2, 0, 0}, {0, 0, 0}, {0, 0, 3}});
  CHECK(kc.ker == AbelianGroup(1, {}));
  CHECK(kc.coker == AbelianGroup(1, {6}));
  CHECK(cokernel(IntMatrix{{1, 1}, {1, -1}}) == AbelianGroup(0, {2}));
}

TEST_CASE("matrix helpers") {
  const IntMatrix a{{0, 1}, {-1, 0}};
  CHECK(a.pow(4) == IntMatrix::identity(2));
  CHECK(a.pow(0) == IntMatrix::identity(2));
  CHECK(a.transpose() == IntMatrix{{0, -1}, {1, 0}});
  CHECK(IntMatrix{{1, 2}, {3, 4}}.str() == "1 2\n3 4");
  CHECK_THROWS_AS(IntMatrix({{1, 2}, {3}}), std::invalid_argument);
  CHECK_THROWS_AS(IntMatrix(2, 3) * IntMatrix(2, 3), std::invalid_argument);
}
