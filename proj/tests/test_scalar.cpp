#include "nbk/scalar.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <numeric>

using namespace nbk;

namespace {

Cyclotomic random_cyclotomic(std::mt19937_64& rng, int m) {
  Cyclotomic c;
  const int terms = 1 + static_cast<int>(rng() % 4);
  for (int t = 0; t < terms; ++t) {
    const long num = static_cast<long>(rng() % 11) - 5, den = 1 + static_cast<long>(rng() % 4);
    c += Cyclotomic::root(m, static_cast<long>(rng() % static_cast<std::uint64_t>(m))) * make_rational(num, den);
  }
  return c;
}

std::vector<long> units_mod(int m) {
  std::vector<long> u;
  for (long j = 1; j < m; ++j)
    if (std::gcd(j, static_cast<long>(m)) == 1) u.push_back(j);
  return u;
}

}  // namespace

TEST_CASE("cyclotomic polynomials") {
  CHECK(CyclotomicField::get(24).modulus() == std::vector<std::int64_t>{1, 0, 0, 0, -1, 0, 0, 0, 1});
  CHECK(CyclotomicField::get(12).modulus() == std::vector<std::int64_t>{1, 0, -1, 0, 1});
  CHECK(CyclotomicField::get(5).modulus() == std::vector<std::int64_t>{1, 1, 1, 1, 1});
  CHECK(CyclotomicField::get(1).degree() == 1);
  for (int m : {2, 3, 7, 9, 15, 24, 60, 120}) CHECK(CyclotomicField::get(m).degree() == static_cast<int>(units_mod(m).size()));
}

TEST_CASE("roots of unity") {
  const Cyclotomic i = Cyclotomic::root(4, 1);
  CHECK(i * i == Cyclotomic(Rational(-1)));
  CHECK(Cyclotomic::root(3, 1) + Cyclotomic::root(3, 2) + Cyclotomic(Rational(1)) == Cyclotomic(Rational(0)));
  CHECK(Cyclotomic::root(24, 7).as_root_of_unity() == 7);
  CHECK(Cyclotomic::root(8, 3).as_root_of_unity() == 9);
  const Cyclotomic v = Cyclotomic::root(6, 1) * Rational(-3, 2);
  const auto sr = v.as_scaled_root();
  REQUIRE(sr);
  CHECK(Cyclotomic::root(24, sr->second) * sr->first == v);
  CHECK(abs(sr->first) == Rational(3, 2));
  CHECK_FALSE((Cyclotomic::root(4, 1) + Cyclotomic(Rational(1))).as_root_of_unity());
  CHECK_THROWS_AS(Cyclotomic::root(5, 1), OrderMismatch);
  CHECK(i.str() == "i");
  CHECK((-i).str() == "-i");
  CHECK(Cyclotomic::root(2, 1).str() == "-1");
  CHECK(Cyclotomic::root(3, 1).str() == "exp(2πi·1/3)");
}

TEST_CASE("field axioms and embeddings") {
  std::mt19937_64 rng(11);
  const auto units = units_mod(24);
  for (int t = 0; t < 300; ++t) {
    const Cyclotomic a = random_cyclotomic(rng, 24), b = random_cyclotomic(rng, 24), c = random_cyclotomic(rng, 24);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + b - b == a);
    CHECK(a.conj().conj() == a);
    CHECK((a * b).conj() == a.conj() * b.conj());
    for (long j : units) {
      CHECK(oracle::close(oracle::embed(a * b, j), oracle::embed(a, j) * oracle::embed(b, j)));
      CHECK(oracle::close(oracle::embed(a + c, j), oracle::embed(a, j) + oracle::embed(c, j)));
    }
    CHECK(oracle::close(oracle::embed(a.conj()), std::conj(oracle::embed(a))));
    CHECK(oracle::close(a.approx(), oracle::embed(a)));
    CHECK(oracle::close(oracle::embed(a.times_root(5)), oracle::embed(a) * oracle::embed(Cyclotomic::root(24, 5))));
  }
}

TEST_CASE("session order guard") {
  const int before = cyclotomic_session_order();
  {
    SessionOrderGuard g(120);
    CHECK(cyclotomic_session_order() == 120);
    CHECK(Cyclotomic::root(5, 1).field().order() == 120);
  }
  CHECK(cyclotomic_session_order() == before);
  SessionOrderGuard g(24);
  const Cyclotomic a = Cyclotomic::root(3, 1);
  SessionOrderGuard h(12);
  CHECK_THROWS_AS((void)(a + Cyclotomic::root(3, 1)), OrderMismatch);
}

TEST_CASE("phased scalars") {
  const PhasedScalar x = phased(Rational(1), Cyclotomic(Rational(1)));
  const PhasedScalar y = phased(Rational(-1), Cyclotomic(Rational(1)));
  CHECK(x * y == PhasedScalar::one());
  CHECK(x.conj() == y);
  CHECK((x + y).terms().size() == 2);
  CHECK_FALSE(x + y == PhasedScalar(2L));
  CHECK(x.is_unit_phase());
  CHECK_FALSE((x + y).is_unit_phase());
  CHECK(x.pow(-3) == y.pow(3));
  CHECK_THROWS_AS((x + y).pow(-1), std::domain_error);
  CHECK(x.times_unit(Rational(1, 2), 6) == phased(Rational(3, 2), Cyclotomic::root(4, 1)));
  CHECK((x - x).is_zero());
}

TEST_CASE("folding theta into the field") {
  SessionOrderGuard g(120);
  const Rational theta(1, 5);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    PhasedScalar s;
    std::complex<double> want = 0;
    for (int k = 0; k < 3; ++k) {
      const Rational b = make_rational(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 2));
      const Cyclotomic c = random_cyclotomic(rng, 24);
      s += phased(b, c);
      want += oracle::embed(c) * oracle::exp_pi_i(b.get_d() * theta.get_d());
    }
    const PhasedScalar f = s.fold(theta);
    CHECK(f.terms().size() <= 1);
    const std::complex<double> got = f.is_zero() ? 0 : oracle::embed(f.terms().front().second);
    CHECK(oracle::close(got, want));
  }
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3") == 3);
  CHECK(parse_rational("-1/2") == Rational(-1, 2));
  CHECK(parse_rational("+4/6") == Rational(2, 3));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("abc"));
  CHECK_THROWS(parse_rational(""));
}
