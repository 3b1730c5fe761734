#pragma once

// Exact scalars for the twisted torus algebras: rationals, elements of a
// cyclotomic field Q(zeta_M), and finite sums c_b * exp(pi i b theta) with a
// formal (irrational) theta.

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nbk {

using Integer = mpz_class;
using Rational = mpq_class;

Rational make_rational(long num, long den = 1);
/// Parses "3", "-1/2", "+4/6" (result is canonical).
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

/// Raised when a root of unity is requested outside the active cyclotomic
/// field, or when values from two different fields are combined.
class OrderMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Q(zeta_M) with power basis zeta^0..zeta^{phi(M)-1}. Instances are interned
/// and live for the whole process.
class CyclotomicField {
 public:
  static const CyclotomicField& get(int order);

  int order() const { return order_; }
  int degree() const { return degree_; }
  /// Coefficients of the M-th cyclotomic polynomial, constant term first.
  const std::vector<std::int64_t>& modulus() const { return modulus_; }
  /// Reduced coordinates of zeta^k for k in [0, M).
  const std::vector<std::int64_t>& power(long k) const;

 private:
  explicit CyclotomicField(int order);

  int order_;
  int degree_;
  std::vector<std::int64_t> modulus_;
  std::vector<std::vector<std::int64_t>> powers_;
};

/// Order of the field used for newly created scalars. Initialised from the
/// NBK_CYCLOTOMIC_ORDER environment variable, default 24.
int cyclotomic_session_order();
void set_cyclotomic_session_order(int order);

/// Sets the session order for the lifetime of the guard.
class SessionOrderGuard {
 public:
  explicit SessionOrderGuard(int order);
  ~SessionOrderGuard();
  SessionOrderGuard(const SessionOrderGuard&) = delete;
  SessionOrderGuard& operator=(const SessionOrderGuard&) = delete;

 private:
  int previous_;
};

class Cyclotomic {
 public:
  /// Zero in the session field.
  Cyclotomic();
  explicit Cyclotomic(const Rational& q);
  Cyclotomic(const CyclotomicField& field, const Rational& q);

  /// exp(2 pi i k / M); M must divide the session order.
  static Cyclotomic root(int m, long k);

  const CyclotomicField& field() const { return *field_; }
  /// Power-basis coordinates.
  std::vector<Rational> coefficients() const;

  bool is_zero() const;
  std::optional<Rational> as_rational() const;
  /// k in [0, M) with *this == zeta_M^k, if any.
  std::optional<long> as_root_of_unity() const;
  /// (q, k) with *this == q * zeta_M^k, if the value has that form.
  std::optional<std::pair<Rational, long>> as_scaled_root() const;

  Cyclotomic conj() const;
  /// *this * zeta_M^k.
  Cyclotomic times_root(long k) const;
  Cyclotomic operator-() const;
  Cyclotomic& operator+=(const Cyclotomic& o);
  Cyclotomic& operator-=(const Cyclotomic& o);
  Cyclotomic& operator*=(const Cyclotomic& o);
  Cyclotomic& operator*=(const Rational& q);
  friend Cyclotomic operator+(Cyclotomic a, const Cyclotomic& b) { return a += b; }
  friend Cyclotomic operator-(Cyclotomic a, const Cyclotomic& b) { return a -= b; }
  friend Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b);
  friend Cyclotomic operator*(Cyclotomic a, const Rational& q) { return a *= q; }
  friend bool operator==(const Cyclotomic& a, const Cyclotomic& b);

  /// Approximate complex value. For report rendering only.
  std::complex<double> approx() const;
  std::string str() const;

 private:
  void check_same_field(const Cyclotomic& o) const;
  void normalize();

  // value = sum_j num_[j] zeta^j / den_, den_ > 0, gcd(num_, den_) = 1
  const CyclotomicField* field_;
  std::vector<Integer> num_;
  Integer den_;
};

Cyclotomic cyc_root(int m, long k);

/// sum_b c_b * exp(pi i b theta). Keys are sorted and no coefficient is zero.
/// Distinct keys are treated as linearly independent (theta irrational).
class PhasedScalar {
 public:
  using Term = std::pair<Rational, Cyclotomic>;

  PhasedScalar() = default;
  PhasedScalar(const Cyclotomic& c);  // NOLINT: implicit lift b = 0
  explicit PhasedScalar(const Rational& q);
  explicit PhasedScalar(long n);

  static PhasedScalar phased(const Rational& b, const Cyclotomic& c);
  static PhasedScalar one() { return PhasedScalar(1L); }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_single_term() const { return terms_.size() == 1; }
  /// True when the value is exp(pi i b theta) * zeta for a root of unity zeta.
  bool is_unit_phase() const;

  PhasedScalar conj() const;
  /// *this * exp(pi i b theta) * zeta_M^k.
  PhasedScalar times_unit(const Rational& b, long k) const;
  PhasedScalar operator-() const;
  PhasedScalar& operator+=(const PhasedScalar& o);
  PhasedScalar& operator-=(const PhasedScalar& o);
  PhasedScalar& operator*=(const Rational& q);
  friend PhasedScalar operator+(PhasedScalar a, const PhasedScalar& b) { return a += b; }
  friend PhasedScalar operator-(PhasedScalar a, const PhasedScalar& b) { return a -= b; }
  friend PhasedScalar operator*(const PhasedScalar& a, const PhasedScalar& b);
  friend PhasedScalar operator*(PhasedScalar a, const Rational& q) { return a *= q; }
  friend bool operator==(const PhasedScalar& a, const PhasedScalar& b) = default;

  /// Integer power; negative exponents are allowed for unit phases only.
  PhasedScalar pow(long e) const;

  /// Substitutes a rational value for theta.
  PhasedScalar fold(const Rational& theta) const;

  std::string str() const;

 private:
  std::vector<Term> terms_;
};

inline PhasedScalar phased(const Rational& b, const Cyclotomic& c) {
  return PhasedScalar::phased(b, c);
}

inline PhasedScalar rational_theta_fold(const PhasedScalar& s, const Rational& theta) {
  return s.fold(theta);
}

}  // namespace nbk
