#pragma once

// Independent oracles for the tests: nothing here calls into the code under test
// except for data accessors (matrix entries, power-basis coordinates).

#include "nbk/scalar.hpp"
#include "nbk/smith.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using nbk::Integer;
using nbk::IntMatrix;
using nbk::Rational;

// Numeric comparisons only ever touch values of modulus below ~1e3.
inline constexpr double kNumericTolerance = 1e-9;

/// Leibniz expansion over all permutations.
inline Integer leibniz_det(const std::vector<std::vector<Integer>>& a) {
  const std::size_t n = a.size();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Integer total = 0;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    Integer term = 1;
    for (std::size_t i = 0; i < n && term != 0; ++i) term *= a[i][perm[i]];
    total += inversions % 2 ? -term : term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
                    std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

/// Invariant factors d_k / d_{k-1}, d_k the gcd of all k x k minors.
inline std::vector<Integer> invariant_factors(const IntMatrix& m) {
  std::vector<Integer> out;
  Integer prev = 1;
  for (std::size_t k = 1; k <= std::min(m.rows(), m.cols()); ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    std::vector<std::size_t> cur;
    subsets(m.rows(), k, 0, cur, rs);
    subsets(m.cols(), k, 0, cur, cs);
    Integer g = 0;
    for (const auto& r : rs)
      for (const auto& c : cs) {
        std::vector<std::vector<Integer>> sub(k, std::vector<Integer>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) sub[i][j] = m.at(r[i], c[j]);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), leibniz_det(sub).get_mpz_t());
      }
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

/// Entries in [-range, range], a few rows forced dependent.
inline IntMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, long range) {
  IntMatrix m(rows, cols);
  auto draw = [&] { return static_cast<long>(rng() % static_cast<std::uint64_t>(2 * range + 1)) - range; };
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = draw();
  if (rows > 1 && rng() % 4 == 0) {
    const long f = draw();
    for (std::size_t j = 0; j < cols; ++j) m.at(rows - 1, j) = f * m.at(0, j);
  }
  return m;
}

/// Image of a cyclotomic number under zeta_M -> exp(2 pi i j / M).
inline std::complex<double> embed(const nbk::Cyclotomic& c, long j = 1) {
  const auto coeffs = c.coefficients();
  const int m = c.field().order();
  std::complex<double> z = 0;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    z += coeffs[i].get_d() * std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(j * static_cast<long>(i)) / m);
  return z;
}

inline bool close(std::complex<double> a, std::complex<double> b) { return std::abs(a - b) < kNumericTolerance; }

/// exp(pi i x).
inline std::complex<double> exp_pi_i(double x) { return std::polar(1.0, std::numbers::pi * x); }

}  // namespace oracle
