#include "nbk/scalar.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace nbk {

Rational make_rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  if (s.empty()) throw std::invalid_argument("empty rational");
  const auto slash = s.find('/');
  auto check_digits = [](const std::string& part, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && i < part.size() && part[i] == '-') ++i;
    if (i == part.size()) return false;
    for (; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9') return false;
    return true;
  };
  const std::string num = s.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!check_digits(num, true) || !check_digits(den, false))
    throw std::invalid_argument("malformed rational: " + std::string(text));
  Integer n(num), d(den);
  if (d == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }
std::string to_string(const Integer& z) { return z.get_str(); }

// ---------------------------------------------------------------------------
// CyclotomicField

namespace {

using Poly = std::vector<std::int64_t>;

// Exact division of integer polynomials with monic divisor.
Poly divide_monic(Poly num, const Poly& den) {
  const std::size_t dn = den.size() - 1;
  if (num.size() < den.size()) return {0};
  Poly quot(num.size() - dn, 0);
  for (std::size_t i = num.size(); i-- > dn;) {
    const std::int64_t c = num[i];
    quot[i - dn] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j <= dn; ++j) num[i - dn + j] -= c * den[j];
  }
  return quot;
}

Poly cyclotomic_polynomial(int m) {
  static std::mutex mu;
  static std::map<int, Poly> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(m); it != cache.end()) return it->second;
  }
  Poly p(static_cast<std::size_t>(m) + 1, 0);
  p[0] = -1;
  p[static_cast<std::size_t>(m)] = 1;
  for (int d = 1; d < m; ++d)
    if (m % d == 0) p = divide_monic(p, cyclotomic_polynomial(d));
  std::lock_guard lock(mu);
  cache.emplace(m, p);
  return p;
}

}  // namespace

CyclotomicField::CyclotomicField(int order) : order_(order) {
  if (order <= 0) throw std::invalid_argument("cyclotomic order must be positive");
  modulus_ = cyclotomic_polynomial(order);
  degree_ = static_cast<int>(modulus_.size()) - 1;
  const auto phi = static_cast<std::size_t>(degree_);
  powers_.reserve(static_cast<std::size_t>(order));
  Poly cur(phi, 0);
  cur[0] = 1;
  for (int k = 0; k < order; ++k) {
    powers_.push_back(cur);
    // multiply by x and reduce by the monic modulus
    const std::int64_t top = cur[phi - 1];
    for (std::size_t j = phi - 1; j > 0; --j) cur[j] = cur[j - 1];
    cur[0] = 0;
    if (top != 0)
      for (std::size_t j = 0; j < phi; ++j) cur[j] -= top * modulus_[j];
  }
}

const CyclotomicField& CyclotomicField::get(int order) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<CyclotomicField>> fields;
  std::lock_guard lock(mu);
  auto& slot = fields[order];
  if (!slot) slot.reset(new CyclotomicField(order));
  return *slot;
}

const std::vector<std::int64_t>& CyclotomicField::power(long k) const {
  long r = k % order_;
  if (r < 0) r += order_;
  return powers_[static_cast<std::size_t>(r)];
}

namespace {

int initial_session_order() {
  if (const char* env = std::getenv("NBK_CYCLOTOMIC_ORDER")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 100000) return static_cast<int>(v);
    throw std::invalid_argument(std::string("invalid NBK_CYCLOTOMIC_ORDER: ") + env);
  }
  return 24;
}

std::atomic<int>& session_order_slot() {
  static std::atomic<int> order{initial_session_order()};
  return order;
}

}  // namespace

int cyclotomic_session_order() { return session_order_slot().load(); }

void set_cyclotomic_session_order(int order) {
  if (order <= 0) throw std::invalid_argument("cyclotomic order must be positive");
  session_order_slot().store(order);
}

SessionOrderGuard::SessionOrderGuard(int order) : previous_(cyclotomic_session_order()) {
  set_cyclotomic_session_order(order);
}

SessionOrderGuard::~SessionOrderGuard() { set_cyclotomic_session_order(previous_); }

// ---------------------------------------------------------------------------
// Cyclotomic

Cyclotomic::Cyclotomic() : Cyclotomic(CyclotomicField::get(cyclotomic_session_order()), Rational(0)) {}

Cyclotomic::Cyclotomic(const Rational& q)
    : Cyclotomic(CyclotomicField::get(cyclotomic_session_order()), q) {}

Cyclotomic::Cyclotomic(const CyclotomicField& field, const Rational& q)
    : field_(&field), num_(static_cast<std::size_t>(field.degree())), den_(q.get_den()) {
  num_[0] = q.get_num();
}

Cyclotomic Cyclotomic::root(int m, long k) {
  const int order = cyclotomic_session_order();
  if (m <= 0 || order % m != 0)
    throw OrderMismatch("root of unity of order " + std::to_string(m) +
                        " is not in the cyclotomic field of order " + std::to_string(order));
  const auto& field = CyclotomicField::get(order);
  Cyclotomic r(field, Rational(0));
  const auto& p = field.power(k * (order / m));
  for (std::size_t j = 0; j < p.size(); ++j) r.num_[j] = static_cast<long>(p[j]);
  return r;
}

Cyclotomic cyc_root(int m, long k) { return Cyclotomic::root(m, k); }

void Cyclotomic::check_same_field(const Cyclotomic& o) const {
  if (field_ != o.field_)
    throw OrderMismatch("mixing cyclotomic fields of order " + std::to_string(field_->order()) +
                        " and " + std::to_string(o.field_->order()));
}

void Cyclotomic::normalize() {
  if (den_ == 1) return;
  Integer g = den_;
  for (const auto& n : num_) {
    if (n == 0) continue;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    if (g == 1) return;
  }
  if (is_zero()) {
    den_ = 1;
    return;
  }
  for (auto& n : num_) mpz_divexact(n.get_mpz_t(), n.get_mpz_t(), g.get_mpz_t());
  mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
}

std::vector<Rational> Cyclotomic::coefficients() const {
  std::vector<Rational> out;
  out.reserve(num_.size());
  for (const auto& n : num_) {
    Rational q(n, den_);
    q.canonicalize();
    out.push_back(q);
  }
  return out;
}

bool Cyclotomic::is_zero() const {
  return std::all_of(num_.begin(), num_.end(), [](const Integer& n) { return n == 0; });
}

std::optional<Rational> Cyclotomic::as_rational() const {
  for (std::size_t j = 1; j < num_.size(); ++j)
    if (num_[j] != 0) return std::nullopt;
  Rational q(num_[0], den_);
  q.canonicalize();
  return q;
}

std::optional<std::pair<Rational, long>> Cyclotomic::as_scaled_root() const {
  if (is_zero()) return std::nullopt;
  const int m = field_->order();
  for (long k = 0; k < m; ++k) {
    const auto& p = field_->power(k);
    // num_ must equal s * p for one integer-ratio s
    std::size_t lead = 0;
    while (lead < p.size() && p[lead] == 0) ++lead;
    if (num_[lead] == 0) continue;
    bool ok = true;
    for (std::size_t j = 0; j < num_.size() && ok; ++j) {
      // num_[j] * p[lead] == num_[lead] * p[j]
      ok = num_[j] * static_cast<long>(p[lead]) == num_[lead] * static_cast<long>(p[j]);
    }
    if (ok) {
      Rational s(num_[lead], den_ * static_cast<long>(p[lead]));
      s.canonicalize();
      return std::make_pair(s, k);
    }
  }
  return std::nullopt;
}

std::optional<long> Cyclotomic::as_root_of_unity() const {
  auto sr = as_scaled_root();
  if (!sr) return std::nullopt;
  if (sr->first == 1) return sr->second;
  if (sr->first == -1) {
    // -zeta^k = zeta^{k + M/2} when M is even; otherwise -1 is not a power of zeta
    const int m = field_->order();
    if (m % 2 == 0) return (sr->second + m / 2) % m;
  }
  return std::nullopt;
}

Cyclotomic Cyclotomic::conj() const {
  Cyclotomic r(*field_, Rational(0));
  const long m = field_->order();
  for (std::size_t j = 0; j < num_.size(); ++j) {
    if (num_[j] == 0) continue;
    const auto& p = field_->power(m - static_cast<long>(j));
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] != 0) r.num_[i] += num_[j] * static_cast<long>(p[i]);
  }
  r.den_ = den_;
  return r;
}

Cyclotomic Cyclotomic::times_root(long k) const {
  const long m = field_->order();
  k %= m;
  if (k < 0) k += m;
  if (k == 0) return *this;
  Cyclotomic r(*field_, Rational(0));
  for (std::size_t j = 0; j < num_.size(); ++j) {
    if (num_[j] == 0) continue;
    const auto& p = field_->power(static_cast<long>(j) + k);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 1) r.num_[i] += num_[j];
      else if (p[i] == -1) r.num_[i] -= num_[j];
      else if (p[i] != 0) r.num_[i] += num_[j] * static_cast<long>(p[i]);
    }
  }
  r.den_ = den_;
  return r;
}

Cyclotomic Cyclotomic::operator-() const {
  Cyclotomic r = *this;
  for (auto& n : r.num_) n = -n;
  return r;
}

Cyclotomic& Cyclotomic::operator+=(const Cyclotomic& o) {
  check_same_field(o);
  if (den_ == o.den_) {
    for (std::size_t j = 0; j < num_.size(); ++j) num_[j] += o.num_[j];
  } else {
    for (std::size_t j = 0; j < num_.size(); ++j) num_[j] = num_[j] * o.den_ + o.num_[j] * den_;
    den_ *= o.den_;
  }
  normalize();
  return *this;
}

Cyclotomic& Cyclotomic::operator-=(const Cyclotomic& o) { return *this += -o; }

Cyclotomic& Cyclotomic::operator*=(const Rational& q) {
  for (auto& n : num_) n *= q.get_num();
  den_ *= q.get_den();
  if (q == 0) den_ = 1;
  normalize();
  return *this;
}

Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b) {
  a.check_same_field(b);
  const std::size_t phi = a.num_.size();
  std::vector<Integer> raw(2 * phi - 1);
  for (std::size_t i = 0; i < phi; ++i) {
    if (a.num_[i] == 0) continue;
    for (std::size_t j = 0; j < phi; ++j) {
      if (b.num_[j] == 0) continue;
      mpz_addmul(raw[i + j].get_mpz_t(), a.num_[i].get_mpz_t(), b.num_[j].get_mpz_t());
    }
  }
  Cyclotomic r(*a.field_, Rational(0));
  for (std::size_t i = 0; i < phi; ++i) r.num_[i] = std::move(raw[i]);
  for (std::size_t k = phi; k < raw.size(); ++k) {
    if (raw[k] == 0) continue;
    const auto& p = a.field_->power(static_cast<long>(k));
    for (std::size_t j = 0; j < phi; ++j)
      if (p[j] != 0) r.num_[j] += raw[k] * static_cast<long>(p[j]);
  }
  r.den_ = a.den_ * b.den_;
  r.normalize();
  return r;
}

Cyclotomic& Cyclotomic::operator*=(const Cyclotomic& o) { return *this = *this * o; }

bool operator==(const Cyclotomic& a, const Cyclotomic& b) {
  a.check_same_field(b);
  return a.den_ == b.den_ && a.num_ == b.num_;
}

std::complex<double> Cyclotomic::approx() const {
  std::complex<double> z{0.0, 0.0};
  const double m = field_->order();
  const double den = den_.get_d();
  for (std::size_t j = 0; j < num_.size(); ++j) {
    if (num_[j] == 0) continue;
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(j) / m;
    z += (num_[j].get_d() / den) * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return z;
}

namespace {

// Name of exp(2 pi i k / m) in lowest terms.
std::string root_name(long k, long m) {
  Rational f(k, m);
  f.canonicalize();
  if (f == 0) return "1";
  if (f == Rational(1, 2)) return "-1";
  if (f == Rational(1, 4)) return "i";
  if (f == Rational(3, 4)) return "-i";
  return "exp(2πi·" + f.get_str() + ")";
}

}  // namespace

std::string Cyclotomic::str() const {
  if (auto q = as_rational()) return q->get_str();
  if (auto sr = as_scaled_root()) {
    std::string root = root_name(sr->second, field_->order());
    const Rational& s = sr->first;
    if (s == 1) return root;
    if (s == -1) {
      if (root == "-1") return "1";
      if (root.front() == '-') return root.substr(1);
      return "-" + root;
    }
    return s.get_str() + "·" + root;
  }
  std::ostringstream os;
  os << "[";
  bool first = true;
  const auto c = coefficients();
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == 0) continue;
    if (!first) os << (c[j] > 0 ? " + " : " - ");
    else if (c[j] < 0) os << "-";
    first = false;
    Rational a = abs(c[j]);
    if (j == 0) os << a.get_str();
    else {
      if (a != 1) os << a.get_str() << "·";
      os << "z";
      if (j > 1) os << "^" << j;
    }
  }
  os << "]_" << field_->order();
  return os.str();
}

// ---------------------------------------------------------------------------
// PhasedScalar

PhasedScalar::PhasedScalar(const Cyclotomic& c) {
  if (!c.is_zero()) terms_.emplace_back(Rational(0), c);
}

PhasedScalar::PhasedScalar(const Rational& q) : PhasedScalar(Cyclotomic(q)) {}

PhasedScalar::PhasedScalar(long n) : PhasedScalar(Cyclotomic(Rational(n))) {}

PhasedScalar PhasedScalar::phased(const Rational& b, const Cyclotomic& c) {
  PhasedScalar r;
  if (!c.is_zero()) r.terms_.emplace_back(b, c);
  return r;
}

bool PhasedScalar::is_unit_phase() const {
  return is_single_term() && terms_.front().second.as_root_of_unity().has_value();
}

PhasedScalar PhasedScalar::conj() const {
  PhasedScalar r;
  r.terms_.reserve(terms_.size());
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it)
    r.terms_.emplace_back(-it->first, it->second.conj());
  return r;
}

PhasedScalar PhasedScalar::times_unit(const Rational& b, long k) const {
  PhasedScalar r;
  r.terms_.reserve(terms_.size());
  for (const auto& [bb, c] : terms_) r.terms_.emplace_back(bb + b, c.times_root(k));
  return r;
}

PhasedScalar PhasedScalar::operator-() const {
  PhasedScalar r = *this;
  for (auto& [b, c] : r.terms_) c = -c;
  return r;
}

namespace {

void merge_add(std::vector<PhasedScalar::Term>& dst, const std::vector<PhasedScalar::Term>& src,
               bool negate) {
  std::vector<PhasedScalar::Term> out;
  out.reserve(dst.size() + src.size());
  auto a = dst.begin();
  auto b = src.begin();
  while (a != dst.end() || b != src.end()) {
    if (b == src.end() || (a != dst.end() && a->first < b->first)) {
      out.push_back(std::move(*a++));
    } else if (a == dst.end() || b->first < a->first) {
      out.emplace_back(b->first, negate ? -b->second : b->second);
      ++b;
    } else {
      Cyclotomic c = std::move(a->second);
      if (negate) c -= b->second;
      else c += b->second;
      if (!c.is_zero()) out.emplace_back(a->first, std::move(c));
      ++a;
      ++b;
    }
  }
  dst = std::move(out);
}

}  // namespace

PhasedScalar& PhasedScalar::operator+=(const PhasedScalar& o) {
  merge_add(terms_, o.terms_, false);
  return *this;
}

PhasedScalar& PhasedScalar::operator-=(const PhasedScalar& o) {
  merge_add(terms_, o.terms_, true);
  return *this;
}

PhasedScalar& PhasedScalar::operator*=(const Rational& q) {
  if (q == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [b, c] : terms_) c *= q;
  return *this;
}

PhasedScalar operator*(const PhasedScalar& a, const PhasedScalar& b) {
  PhasedScalar r;
  if (a.is_zero() || b.is_zero()) return r;
  if (a.is_single_term() && b.is_single_term()) {
    Cyclotomic c = a.terms_[0].second * b.terms_[0].second;
    if (!c.is_zero()) r.terms_.emplace_back(a.terms_[0].first + b.terms_[0].first, std::move(c));
    return r;
  }
  std::map<Rational, Cyclotomic> acc;
  for (const auto& [ba, ca] : a.terms_) {
    for (const auto& [bb, cb] : b.terms_) {
      Rational key = ba + bb;
      auto it = acc.find(key);
      if (it == acc.end()) acc.emplace(std::move(key), ca * cb);
      else it->second += ca * cb;
    }
  }
  for (auto& [k, c] : acc)
    if (!c.is_zero()) r.terms_.emplace_back(k, std::move(c));
  return r;
}

PhasedScalar PhasedScalar::pow(long e) const {
  if (e < 0) {
    if (!is_unit_phase()) throw std::domain_error("negative power of a non-unit scalar");
    return conj().pow(-e);
  }
  PhasedScalar result = one();
  PhasedScalar base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

PhasedScalar PhasedScalar::fold(const Rational& theta) const {
  PhasedScalar r;
  for (const auto& [b, c] : terms_) {
    const Rational x = b * theta;  // exp(pi i x) = zeta_{2 den}^{num}
    const Integer den2 = 2 * x.get_den();
    if (!den2.fits_sint_p())
      throw OrderMismatch("root of unity of order " + den2.get_str() + " is out of range");
    const long num = mpz_class(x.get_num() % den2).get_si();
    r += PhasedScalar(Cyclotomic::root(static_cast<int>(den2.get_si()), num) * c);
  }
  return r;
}

std::string PhasedScalar::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& [b, c] = terms_[i];
    if (i) out += " + ";
    std::string cs = c.str();
    if (b == 0) {
      out += cs;
      continue;
    }
    const std::string ph = "exp(πi·" + (b == 1 ? std::string() : b == -1 ? std::string("-") : b.get_str()) + "θ)";
    if (cs == "1") out += ph;
    else if (cs == "-1") out += "-" + ph;
    else out += cs + "·" + ph;
  }
  return out;
}

}  // namespace nbk
