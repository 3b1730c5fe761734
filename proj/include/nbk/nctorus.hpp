#pragma once

// Twisted group algebra C*(Z^d, omega_theta) at the polynomial level.
// delta_m * delta_n = omega(m, n) delta_{m+n},
// omega(m, n) = exp(pi i sum_{jk} theta_jk m_j n_k).

#include "nbk/scalar.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nbk {

inline constexpr int kMaxDim = 4;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exponent vector m in Z^d, i.e. the basis element delta_m.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int dim);
  Monomial(std::initializer_list<std::int64_t> exps);
  static Monomial unit(int dim, int i);

  int dim() const { return dim_; }
  std::int64_t operator[](int i) const { return e_[static_cast<std::size_t>(i)]; }
  std::int64_t& operator[](int i) { return e_[static_cast<std::size_t>(i)]; }
  bool is_zero() const;
  std::int64_t max_abs() const;

  Monomial operator-() const;
  Monomial& operator+=(const Monomial& o);
  friend Monomial operator+(Monomial a, const Monomial& b) { return a += b; }
  friend Monomial operator-(const Monomial& a, const Monomial& b) { return a + (-b); }
  friend Monomial operator*(std::int64_t k, const Monomial& m);
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
  friend bool operator==(const Monomial&, const Monomial&) = default;

  std::string str() const;

 private:
  std::array<std::int64_t, kMaxDim> e_{};
  int dim_ = 0;
};

/// a + b*theta.
struct ThetaEntry {
  Rational a;
  Rational b;

  friend ThetaEntry operator-(const ThetaEntry& x) { return {-x.a, -x.b}; }
  friend bool operator==(const ThetaEntry&, const ThetaEntry&) = default;
  /// Equality with the rational parts compared modulo 2.
  bool same_phase(const ThetaEntry& o) const;
  std::string str() const;
};

/// Reduces q into [0, period).
Rational mod_rational(const Rational& q, const Rational& period);

/// Antisymmetric d x d matrix of ThetaEntry. When folded, theta is specialised
/// to a rational number and every scalar produced through this matrix carries
/// only the key b = 0.
class ThetaMatrix {
 public:
  explicit ThetaMatrix(int dim = 0);

  int dim() const { return dim_; }
  const ThetaEntry& at(int j, int k) const { return e_[idx(j, k)]; }
  /// Sets entry (j, k) and its antisymmetric partner.
  void set(int j, int k, ThetaEntry v);

  bool is_antisymmetric() const;

  ThetaMatrix folded(const Rational& theta) const;
  const std::optional<Rational>& folded_theta() const { return folded_; }
  /// Applies the theta specialisation, if any.
  PhasedScalar normalize(const PhasedScalar& s) const;
  /// exp(pi i b theta), normalised.
  PhasedScalar phase(const Rational& b) const;

  std::string str() const;
  friend bool operator==(const ThetaMatrix&, const ThetaMatrix&) = default;

 private:
  std::size_t idx(int j, int k) const { return static_cast<std::size_t>(j * dim_ + k); }
  int dim_;
  std::vector<ThetaEntry> e_;
  std::optional<Rational> folded_;
};

/// exp(pi i x) for rational x, as an element of the session cyclotomic field.
Cyclotomic exp_pi_i(const Rational& x);

/// omega_theta(m, n) as a single-term scalar.
PhasedScalar cocycle(const ThetaMatrix& theta, const Monomial& m, const Monomial& n);
/// The cocycle as (b, k) with value exp(pi i b theta) zeta_M^k in the session
/// field, when the constant part lies in it.
std::optional<std::pair<Rational, long>> cocycle_unit(const ThetaMatrix& theta, const Monomial& m, const Monomial& n);

class TorusElement {
 public:
  using Terms = std::map<Monomial, PhasedScalar>;

  TorusElement() = default;
  explicit TorusElement(int dim) : dim_(dim) {}
  static TorusElement monomial(const Monomial& m, PhasedScalar c = PhasedScalar::one());
  static TorusElement scalar(int dim, PhasedScalar c);
  static TorusElement one(int dim) { return scalar(dim, PhasedScalar::one()); }

  int dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  /// Coefficient of delta_m (zero if absent).
  PhasedScalar coefficient(const Monomial& m) const;
  /// Largest |exponent| over the support.
  std::int64_t degree() const;

  void add_term(const Monomial& m, const PhasedScalar& c);

  TorusElement operator-() const;
  TorusElement& operator+=(const TorusElement& o);
  TorusElement& operator-=(const TorusElement& o);
  TorusElement& operator*=(const PhasedScalar& c);
  friend TorusElement operator+(TorusElement a, const TorusElement& b) { return a += b; }
  friend TorusElement operator-(TorusElement a, const TorusElement& b) { return a -= b; }
  friend TorusElement operator*(TorusElement a, const PhasedScalar& c) { return a *= c; }
  friend TorusElement operator*(const PhasedScalar& c, TorusElement a) { return a *= c; }
  friend bool operator==(const TorusElement& a, const TorusElement& b);

  /// Applies the theta specialisation of `theta` to every coefficient.
  TorusElement normalized(const ThetaMatrix& theta) const;

  std::string str(const std::vector<std::string>& labels = {}) const;

 private:
  int dim_ = 0;
  Terms terms_;
};

/// Twisted convolution. Large products are split over OpenMP threads.
TorusElement mul(const ThetaMatrix& theta, const TorusElement& x, const TorusElement& y);
/// x^k for k >= 0; negative k for monomials with unit coefficients.
TorusElement power(const ThetaMatrix& theta, const TorusElement& x, long k);
/// Involution: delta_m -> delta_{-m}, coefficients conjugated.
TorusElement star(const ThetaMatrix& theta, const TorusElement& x);

namespace reference {
/// Single-threaded twisted convolution, kept as the oracle for `nbk::mul`.
TorusElement mul(const ThetaMatrix& theta, const TorusElement& x, const TorusElement& y);
}  // namespace reference

struct TorusPreset {
  ThetaMatrix theta;
  std::vector<std::string> labels;
  std::vector<TorusElement> generators;  // U, V, W (or V, W)
};

/// "paper-3d": theta_23 = -theta, all other entries zero, generators U, V, W.
/// "paper-2d": the V, W rotation subalgebra.
TorusPreset generators(const std::string& preset);

/// Throws std::logic_error unless W V = exp(2 pi i theta) V W holds for the
/// 3d preset. Run once on first use of `generators`.
void assert_sign_convention();

}  // namespace nbk
