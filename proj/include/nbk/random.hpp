#pragma once

// Seeded samplers for property checks. Draws use raw 64-bit outputs reduced
// modulo the range, so sequences are identical across standard libraries.

#include "nbk/nctorus.hpp"

#include <cstdint>
#include <random>

namespace nbk {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  /// Uniform in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);
  bool coin() { return uniform(0, 1) == 1; }

  /// A small rational times a 12th root of unity, optionally times a theta phase.
  PhasedScalar scalar(const ThetaMatrix& theta, bool with_phase = true);
  /// Exponents in [-degree, degree]^dim.
  Monomial monomial(int dim, int degree);
  /// Up to `terms` monomials of max-degree <= degree.
  TorusElement torus(const ThetaMatrix& theta, int degree, int terms);

 private:
  std::mt19937_64 rng_;
};

}  // namespace nbk
