#include "nbk/nctorus.hpp"
#include "nbk/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <map>

using namespace nbk;

namespace {

ThetaMatrix mixed_theta() {
  ThetaMatrix t(3);
  t.set(0, 1, ThetaEntry{make_rational(1, 3), Rational(0)});
  t.set(0, 2, ThetaEntry{make_rational(1, 2), Rational(1)});
  t.set(1, 2, ThetaEntry{Rational(0), Rational(-1)});
  return t;
}

double entry_value(const ThetaEntry& e, double theta) { return e.a.get_d() + e.b.get_d() * theta; }

/// Twisted convolution evaluated in floating point, straight from the cocycle formula.
std::map<Monomial, std::complex<double>> numeric_product(const ThetaMatrix& t, double theta, const TorusElement& x,
                                                         const TorusElement& y) {
  auto value = [&](const PhasedScalar& s) {
    std::complex<double> z = 0;
    for (const auto& [b, c] : s.terms()) z += oracle::embed(c) * oracle::exp_pi_i(b.get_d() * theta);
    return z;
  };
  std::map<Monomial, std::complex<double>> out;
  for (const auto& [m, cm] : x.terms())
    for (const auto& [n, cn] : y.terms()) {
      double e = 0;
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) e += entry_value(t.at(j, k), theta) * static_cast<double>(m[j] * n[k]);
      out[m + n] += value(cm) * value(cn) * oracle::exp_pi_i(e);
    }
  return out;
}

}  // namespace

TEST_CASE("generator relation") {
  const auto p = generators("paper-3d");
  const auto &u = p.generators[0], &v = p.generators[1], &w = p.generators[2];
  CHECK(mul(p.theta, w, v) == mul(p.theta, v, w) * p.theta.phase(Rational(2)));
  CHECK(mul(p.theta, u, v) == mul(p.theta, v, u));
  CHECK(mul(p.theta, u, w) == mul(p.theta, w, u));
  const auto q = generators("paper-2d");
  CHECK(mul(q.theta, q.generators[1], q.generators[0]) ==
        mul(q.theta, q.generators[0], q.generators[1]) * q.theta.phase(Rational(2)));
  CHECK_NOTHROW(assert_sign_convention());
  CHECK_THROWS_AS(generators("paper-5d"), std::invalid_argument);
}

TEST_CASE("product against the floating-point cocycle formula") {
  SessionOrderGuard g(120);
  const ThetaMatrix t = mixed_theta().folded(make_rational(1, 5));
  Sampler s(5);
  for (int i = 0; i < 60; ++i) {
    const TorusElement x = s.torus(t, 2, 4), y = s.torus(t, 2, 4);
    const TorusElement xy = mul(t, x, y);
    const auto want = numeric_product(t, 0.2, x, y);
    for (const auto& [m, z] : want) {
      const PhasedScalar c = xy.coefficient(m);
      const std::complex<double> got = c.is_zero() ? 0 : oracle::embed(c.terms().front().second);
      CHECK(oracle::close(got, z));
    }
    for (const auto& [m, c] : xy.terms()) CHECK(want.count(m) == 1);
  }
}

TEST_CASE("algebra laws with symbolic theta") {
  const ThetaMatrix t = mixed_theta();
  Sampler s(9);
  for (int i = 0; i < 80; ++i) {
    const TorusElement x = s.torus(t, 2, 4), y = s.torus(t, 2, 4), z = s.torus(t, 2, 3);
    CHECK(mul(t, mul(t, x, y), z) == mul(t, x, mul(t, y, z)));
    CHECK(mul(t, x, y + z) == mul(t, x, y) + mul(t, x, z));
    CHECK(star(t, mul(t, x, y)) == mul(t, star(t, y), star(t, x)));
    CHECK(star(t, star(t, x)) == x);
    CHECK(mul(t, x, TorusElement::one(3)) == x);
    CHECK(mul(t, x, y) == reference::mul(t, x, y));
  }
}

TEST_CASE("cocycle") {
  const ThetaMatrix t = mixed_theta();
  Sampler s(13);
  for (int i = 0; i < 200; ++i) {
    const Monomial a = s.monomial(3, 4), b = s.monomial(3, 4), c = s.monomial(3, 4);
    CHECK(cocycle(t, a + b, c) == t.normalize(cocycle(t, a, c) * cocycle(t, b, c)));
    CHECK(cocycle(t, a, b + c) == t.normalize(cocycle(t, a, b) * cocycle(t, a, c)));
    CHECK(cocycle(t, a, -a) == PhasedScalar::one());
    CHECK(cocycle(t, a, b).conj() == cocycle(t, b, a));
    if (auto u = cocycle_unit(t, a, b))
      CHECK(phased(u->first, Cyclotomic::root(cyclotomic_session_order(), u->second)) == cocycle(t, a, b));
  }
  CHECK_THROWS_AS(cocycle(t, Monomial{1, 2}, Monomial{1, 2, 3}), DimensionMismatch);
}

TEST_CASE("powers and unitaries") {
  const auto p = generators("paper-3d");
  const auto& v = p.generators[1];
  const auto vw = mul(p.theta, v, p.generators[2]);
  CHECK(mul(p.theta, power(p.theta, vw, 3), power(p.theta, vw, -3)) == TorusElement::one(3));
  CHECK(mul(p.theta, vw, star(p.theta, vw)) == TorusElement::one(3));
  CHECK(power(p.theta, v, 0) == TorusElement::one(3));
}

TEST_CASE("theta matrices") {
  ThetaMatrix t(3);
  t.set(0, 1, ThetaEntry{make_rational(1, 2), Rational(0)});
  CHECK(t.at(1, 0) == ThetaEntry{make_rational(-1, 2), Rational(0)});
  CHECK(t.is_antisymmetric());
  CHECK_THROWS(t.set(1, 1, ThetaEntry{}));
  CHECK_THROWS_AS(ThetaMatrix(kMaxDim + 1), DimensionMismatch);
  CHECK(ThetaEntry{make_rational(1, 2), Rational(-1)}.str() == "1/2 - θ");
  CHECK(ThetaEntry{Rational(0), Rational(1)}.str() == "θ");
}

TEST_CASE("monomials and elements") {
  CHECK(Monomial{1, -2, 3}.max_abs() == 3);
  CHECK((Monomial{1, 2, 3} - Monomial{1, 2, 3}).is_zero());
  CHECK_THROWS_AS((Monomial{1, 2} + Monomial{1, 2, 3}), DimensionMismatch);
  TorusElement x(3);
  x.add_term(Monomial{1, 0, 0}, PhasedScalar(2L));
  x.add_term(Monomial{1, 0, 0}, PhasedScalar(-2L));
  CHECK(x.is_zero());
  CHECK_THROWS_AS(x + TorusElement(2), DimensionMismatch);
}
