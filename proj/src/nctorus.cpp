#include "nbk/nctorus.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nbk {

// ---------------------------------------------------------------------------
// Monomial

Monomial::Monomial(int dim) : dim_(dim) {
  if (dim < 0 || dim > kMaxDim) throw DimensionMismatch("unsupported dimension " + std::to_string(dim));
}

Monomial::Monomial(std::initializer_list<std::int64_t> exps) : Monomial(static_cast<int>(exps.size())) {
  std::copy(exps.begin(), exps.end(), e_.begin());
}

Monomial Monomial::unit(int dim, int i) {
  Monomial m(dim);
  m[i] = 1;
  return m;
}

bool Monomial::is_zero() const {
  return std::all_of(e_.begin(), e_.begin() + dim_, [](std::int64_t v) { return v == 0; });
}

std::int64_t Monomial::max_abs() const {
  std::int64_t r = 0;
  for (int i = 0; i < dim_; ++i) r = std::max(r, e_[static_cast<std::size_t>(i)] < 0 ? -e_[static_cast<std::size_t>(i)] : e_[static_cast<std::size_t>(i)]);
  return r;
}

Monomial Monomial::operator-() const {
  Monomial r = *this;
  for (int i = 0; i < dim_; ++i) r[i] = -r[i];
  return r;
}

Monomial& Monomial::operator+=(const Monomial& o) {
  if (o.dim_ != dim_) throw DimensionMismatch("monomial dimensions differ");
  for (int i = 0; i < dim_; ++i) (*this)[i] += o[i];
  return *this;
}

Monomial operator*(std::int64_t k, const Monomial& m) {
  Monomial r = m;
  for (int i = 0; i < m.dim_; ++i) r[i] *= k;
  return r;
}

std::string Monomial::str() const {
  std::string s = "(";
  for (int i = 0; i < dim_; ++i) {
    if (i) s += ",";
    s += std::to_string((*this)[i]);
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// ThetaEntry / ThetaMatrix

Rational mod_rational(const Rational& q, const Rational& period) {
  Rational t = q / period;
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
  Rational r = q - Rational(fl) * period;
  r.canonicalize();
  return r;
}

bool ThetaEntry::same_phase(const ThetaEntry& o) const {
  return b == o.b && mod_rational(a - o.a, Rational(2)) == 0;
}

std::string ThetaEntry::str() const {
  if (b == 0) return a.get_str();
  std::string t = b == 1 ? "θ" : b == -1 ? "-θ" : b.get_str() + "θ";
  if (a == 0) return t;
  return a.get_str() + (t.front() == '-' ? " - " + t.substr(1) : " + " + t);
}

ThetaMatrix::ThetaMatrix(int dim) : dim_(dim), e_(static_cast<std::size_t>(dim * dim)) {
  if (dim < 0 || dim > kMaxDim) throw DimensionMismatch("unsupported dimension " + std::to_string(dim));
}

void ThetaMatrix::set(int j, int k, ThetaEntry v) {
  if (j == k) throw std::invalid_argument("diagonal theta entries are fixed to zero");
  e_[idx(k, j)] = -v;
  e_[idx(j, k)] = std::move(v);
}

bool ThetaMatrix::is_antisymmetric() const {
  for (int j = 0; j < dim_; ++j) {
    if (!at(j, j).same_phase(ThetaEntry{})) return false;
    for (int k = j + 1; k < dim_; ++k)
      if (!(at(j, k) == -at(k, j))) return false;
  }
  return true;
}

ThetaMatrix ThetaMatrix::folded(const Rational& theta) const {
  ThetaMatrix r = *this;
  r.folded_ = theta;
  return r;
}

PhasedScalar ThetaMatrix::normalize(const PhasedScalar& s) const {
  if (!folded_) return s;
  for (const auto& [b, c] : s.terms())
    if (b != 0) return s.fold(*folded_);
  return s;
}

PhasedScalar ThetaMatrix::phase(const Rational& b) const {
  return normalize(PhasedScalar::phased(b, Cyclotomic(Rational(1))));
}

std::string ThetaMatrix::str() const {
  std::string s = "[";
  for (int j = 0; j < dim_; ++j) {
    if (j) s += "; ";
    for (int k = 0; k < dim_; ++k) {
      if (k) s += ", ";
      s += at(j, k).str();
    }
  }
  s += "]";
  if (folded_) s += " at θ=" + folded_->get_str();
  return s;
}

Cyclotomic exp_pi_i(const Rational& x) {
  const Integer den2 = 2 * x.get_den();
  if (!den2.fits_sint_p()) throw OrderMismatch("phase denominator out of range: " + x.get_str());
  const Integer num = x.get_num() % den2;
  return Cyclotomic::root(static_cast<int>(den2.get_si()), num.get_si());
}

namespace {

// sum theta_jk m_j n_k split as a + b theta
std::pair<Rational, Rational> cocycle_exponents(const ThetaMatrix& theta, const Monomial& m, const Monomial& n) {
  const int d = theta.dim();
  if (m.dim() != d || n.dim() != d) throw DimensionMismatch("cocycle: dimension mismatch");
  Rational a(0), b(0);
  for (int j = 0; j < d; ++j) {
    if (m[j] == 0) continue;
    for (int k = 0; k < d; ++k) {
      if (n[k] == 0 || j == k) continue;
      const auto& t = theta.at(j, k);
      const long w = static_cast<long>(m[j] * n[k]);
      if (t.a != 0) a += t.a * w;
      if (t.b != 0) b += t.b * w;
    }
  }
  return {a, b};
}

}  // namespace

PhasedScalar cocycle(const ThetaMatrix& theta, const Monomial& m, const Monomial& n) {
  auto [a, b] = cocycle_exponents(theta, m, n);
  if (const auto& f = theta.folded_theta()) return PhasedScalar(exp_pi_i(a + b * *f));
  return PhasedScalar::phased(b, exp_pi_i(a));
}

std::optional<std::pair<Rational, long>> cocycle_unit(const ThetaMatrix& theta, const Monomial& m,
                                                      const Monomial& n) {
  auto [a, b] = cocycle_exponents(theta, m, n);
  if (const auto& f = theta.folded_theta()) {
    a += b * *f;
    b = 0;
  }
  // exp(pi i a) = zeta_M^{a M / 2}
  const long order = cyclotomic_session_order();
  const Rational k = a * order / 2;
  if (k.get_den() != 1) return std::nullopt;
  const Integer r = k.get_num() % order;
  return std::make_pair(b, r.get_si());
}

// ---------------------------------------------------------------------------
// TorusElement

TorusElement TorusElement::monomial(const Monomial& m, PhasedScalar c) {
  TorusElement r(m.dim());
  if (!c.is_zero()) r.terms_.emplace(m, std::move(c));
  return r;
}

TorusElement TorusElement::scalar(int dim, PhasedScalar c) { return monomial(Monomial(dim), std::move(c)); }

PhasedScalar TorusElement::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? PhasedScalar() : it->second;
}

std::int64_t TorusElement::degree() const {
  std::int64_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.max_abs());
  return d;
}

void TorusElement::add_term(const Monomial& m, const PhasedScalar& c) {
  if (c.is_zero()) return;
  if (m.dim() != dim_) throw DimensionMismatch("add_term: dimension mismatch");
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

TorusElement TorusElement::operator-() const {
  TorusElement r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

TorusElement& TorusElement::operator+=(const TorusElement& o) {
  if (o.dim_ != dim_) throw DimensionMismatch("torus elements of different dimension");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

TorusElement& TorusElement::operator-=(const TorusElement& o) {
  if (o.dim_ != dim_) throw DimensionMismatch("torus elements of different dimension");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

TorusElement& TorusElement::operator*=(const PhasedScalar& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second = it->second * c;
    if (it->second.is_zero()) it = terms_.erase(it);
    else ++it;
  }
  return *this;
}

bool operator==(const TorusElement& a, const TorusElement& b) {
  return a.dim_ == b.dim_ && a.terms_ == b.terms_;
}

TorusElement TorusElement::normalized(const ThetaMatrix& theta) const {
  if (!theta.folded_theta()) return *this;
  TorusElement r(dim_);
  for (const auto& [m, c] : terms_) r.add_term(m, theta.normalize(c));
  return r;
}

std::string TorusElement::str(const std::vector<std::string>& labels) const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    std::string mono;
    if (!m.is_zero()) {
      if (static_cast<int>(labels.size()) == dim_) {
        for (int i = 0; i < dim_; ++i) {
          if (m[i] == 0) continue;
          if (!mono.empty()) mono += "·";
          mono += labels[static_cast<std::size_t>(i)];
          if (m[i] != 1) mono += "^" + std::to_string(m[i]);
        }
        mono = "δ[" + mono + "]";
      } else {
        mono = "δ" + m.str();
      }
    }
    const std::string cs = c.str();
    if (mono.empty()) out += cs;
    else if (cs == "1") out += mono;
    else out += "(" + cs + ")·" + mono;
  }
  return out;
}

namespace {

void check_dims(const ThetaMatrix& theta, const TorusElement& x, const TorusElement& y) {
  if (x.dim() != theta.dim() || y.dim() != theta.dim())
    throw DimensionMismatch("mul: dimension mismatch");
}

// Products below this many term pairs stay on one thread.
constexpr std::size_t kParallelPairs = 4096;

}  // namespace

TorusElement reference::mul(const ThetaMatrix& theta, const TorusElement& x, const TorusElement& y) {
  check_dims(theta, x, y);
  TorusElement r(theta.dim());
  for (const auto& [m, a] : x.terms())
    for (const auto& [n, b] : y.terms()) r.add_term(m + n, a * b * cocycle(theta, m, n));
  return r;
}

TorusElement mul(const ThetaMatrix& theta, const TorusElement& x, const TorusElement& y) {
  check_dims(theta, x, y);
#ifdef _OPENMP
  if (x.size() * y.size() >= kParallelPairs && omp_get_max_threads() > 1) {
    std::vector<const TorusElement::Terms::value_type*> xs;
    xs.reserve(x.size());
    for (const auto& t : x.terms()) xs.push_back(&t);
    const int nthreads = omp_get_max_threads();
    std::vector<TorusElement> partial(static_cast<std::size_t>(nthreads), TorusElement(theta.dim()));
#pragma omp parallel num_threads(nthreads)
    {
      TorusElement& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(xs.size()); ++i) {
        const auto& [m, a] = *xs[static_cast<std::size_t>(i)];
        for (const auto& [n, b] : y.terms()) local.add_term(m + n, a * b * cocycle(theta, m, n));
      }
    }
    // exact arithmetic: the merge order does not affect the result
    TorusElement r(theta.dim());
    for (const auto& p : partial) r += p;
    return r;
  }
#endif
  return reference::mul(theta, x, y);
}

TorusElement power(const ThetaMatrix& theta, const TorusElement& x, long k) {
  if (k < 0) return power(theta, star(theta, x), -k);
  TorusElement r = TorusElement::one(theta.dim());
  for (long i = 0; i < k; ++i) r = mul(theta, r, x);
  return r;
}

TorusElement star(const ThetaMatrix& theta, const TorusElement& x) {
  if (x.dim() != theta.dim()) throw DimensionMismatch("star: dimension mismatch");
  TorusElement r(x.dim());
  for (const auto& [m, c] : x.terms()) r.add_term(-m, c.conj());
  return r;
}

// ---------------------------------------------------------------------------
// presets

void assert_sign_convention() {
  ThetaMatrix theta(3);
  theta.set(1, 2, ThetaEntry{Rational(0), Rational(-1)});
  const auto v = TorusElement::monomial(Monomial::unit(3, 1));
  const auto w = TorusElement::monomial(Monomial::unit(3, 2));
  const auto wv = mul(theta, w, v);
  const auto vw = mul(theta, v, w) * PhasedScalar::phased(Rational(2), Cyclotomic(Rational(1)));
  if (!(wv == vw))
    throw std::logic_error("cocycle sign convention broken: W V != exp(2 pi i theta) V W");
}

TorusPreset generators(const std::string& preset) {
  static std::once_flag once;
  std::call_once(once, assert_sign_convention);
  TorusPreset p;
  if (preset == "paper-3d") {
    p.theta = ThetaMatrix(3);
    p.theta.set(1, 2, ThetaEntry{Rational(0), Rational(-1)});
    p.labels = {"U", "V", "W"};
  } else if (preset == "paper-2d") {
    p.theta = ThetaMatrix(2);
    p.theta.set(0, 1, ThetaEntry{Rational(0), Rational(-1)});
    p.labels = {"V", "W"};
  } else {
    throw std::invalid_argument("unknown preset: " + preset);
  }
  const int d = p.theta.dim();
  for (int i = 0; i < d; ++i) p.generators.push_back(TorusElement::monomial(Monomial::unit(d, i)));
  return p;
}

}  // namespace nbk
