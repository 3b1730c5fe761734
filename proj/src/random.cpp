#include "nbk/random.hpp"

namespace nbk {

std::int64_t Sampler::uniform(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(rng_() % span);
}

PhasedScalar Sampler::scalar(const ThetaMatrix& theta, bool with_phase) {
  static constexpr long kNum[] = {1, -1, 2, -2, 1, 3, -1};
  static constexpr long kDen[] = {1, 1, 1, 1, 2, 2, 3};
  const auto pick = static_cast<std::size_t>(uniform(0, 6));
  Cyclotomic c = Cyclotomic::root(12, uniform(0, 11));
  c *= make_rational(kNum[pick], kDen[pick]);
  Rational b = 0;
  if (with_phase) b = make_rational(uniform(-2, 2), 2);
  return theta.normalize(PhasedScalar::phased(b, c));
}

Monomial Sampler::monomial(int dim, int degree) {
  Monomial m(dim);
  for (int i = 0; i < dim; ++i) m[i] = uniform(-degree, degree);
  return m;
}

TorusElement Sampler::torus(const ThetaMatrix& theta, int degree, int terms) {
  TorusElement x(theta.dim());
  const auto n = uniform(1, terms);
  for (std::int64_t t = 0; t < n; ++t) x.add_term(monomial(theta.dim(), degree), scalar(theta));
  return x;
}

}  // namespace nbk
