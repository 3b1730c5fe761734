#include "nbk/smith.hpp"

#include <algorithm>
#include <stdexcept>

namespace nbk {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  a_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ragged integer matrix");
    for (long v : r) a_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::diagonal(const std::vector<Integer>& d) {
  IntMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
  return m;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

IntMatrix IntMatrix::pow(unsigned n) const {
  if (rows_ != cols_) throw std::invalid_argument("power of a non-square matrix");
  IntMatrix r = identity(rows_), b = *this;
  while (n) {
    if (n & 1u) r = r * b;
    n >>= 1u;
    if (n) b = b * b;
  }
  return r;
}

bool IntMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (i != j && at(i, j) != 0) return false;
  return true;
}

void IntMatrix::swap_rows(std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t k = 0; k < cols_; ++k) std::swap(at(i, k), at(j, k));
}

void IntMatrix::swap_cols(std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t k = 0; k < rows_; ++k) std::swap(at(k, i), at(k, j));
}

void IntMatrix::add_row(std::size_t i, std::size_t j, const Integer& q) {
  if (q == 0) return;
  for (std::size_t k = 0; k < cols_; ++k)
    if (at(j, k) != 0) mpz_addmul(at(i, k).get_mpz_t(), q.get_mpz_t(), at(j, k).get_mpz_t());
}

void IntMatrix::add_col(std::size_t i, std::size_t j, const Integer& q) {
  if (q == 0) return;
  for (std::size_t k = 0; k < rows_; ++k)
    if (at(k, j) != 0) mpz_addmul(at(k, i).get_mpz_t(), q.get_mpz_t(), at(k, j).get_mpz_t());
}

void IntMatrix::negate_row(std::size_t i) {
  for (std::size_t k = 0; k < cols_; ++k) at(i, k) = -at(i, k);
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product: shape mismatch");
  IntMatrix r(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      if (a.at(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j)
        if (b.at(k, j) != 0) mpz_addmul(r.at(i, j).get_mpz_t(), a.at(i, k).get_mpz_t(), b.at(k, j).get_mpz_t());
    }
  return r;
}

IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("matrix difference: shape mismatch");
  IntMatrix r = a;
  for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] -= b.a_[k];
  return r;
}

std::string IntMatrix::str() const {
  std::string s;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) s += ' ';
      s += at(i, j).get_str();
    }
    if (i + 1 < rows_) s += '\n';
  }
  return s;
}

Integer determinant(const IntMatrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  if (n == 0) return 1;
  IntMatrix a = m;
  Integer sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a.at(k, k) == 0) {
      std::size_t r = k + 1;
      while (r < n && a.at(r, k) == 0) ++r;
      if (r == n) return 0;
      a.swap_rows(k, r);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
        mpz_divexact(a.at(i, j).get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
    prev = a.at(k, k);
  }
  return sign * a.at(n - 1, n - 1);
}

std::vector<Integer> SmithForm::divisors() const {
  std::vector<Integer> d;
  for (std::size_t i = 0; i < rank; ++i) d.push_back(S.at(i, i));
  return d;
}

namespace {

bool find_pivot(const IntMatrix& s, std::size_t t, std::size_t& pi, std::size_t& pj) {
  bool found = false;
  Integer best;
  for (std::size_t i = t; i < s.rows(); ++i)
    for (std::size_t j = t; j < s.cols(); ++j) {
      const Integer& v = s.at(i, j);
      if (v == 0) continue;
      if (!found || mpz_cmpabs(v.get_mpz_t(), best.get_mpz_t()) < 0) {
        best = abs(v);
        pi = i;
        pj = j;
        found = true;
      }
    }
  return found;
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& m) {
  SmithForm f{m, IntMatrix::identity(m.rows()), IntMatrix::identity(m.cols()), 0};
  IntMatrix& s = f.S;
  const std::size_t lim = std::min(s.rows(), s.cols());
  std::size_t t = 0;
  for (; t < lim; ++t) {
    std::size_t pi = 0, pj = 0;
    if (!find_pivot(s, t, pi, pj)) break;
    for (;;) {
      s.swap_rows(t, pi);
      f.U.swap_rows(t, pi);
      s.swap_cols(t, pj);
      f.V.swap_cols(t, pj);
      bool clean = true;
      Integer q;
      for (std::size_t i = t + 1; i < s.rows(); ++i) {
        if (s.at(i, t) == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), s.at(i, t).get_mpz_t(), s.at(t, t).get_mpz_t());
        s.add_row(i, t, -q);
        f.U.add_row(i, t, -q);
        clean = clean && s.at(i, t) == 0;
      }
      for (std::size_t j = t + 1; j < s.cols(); ++j) {
        if (s.at(t, j) == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), s.at(t, j).get_mpz_t(), s.at(t, t).get_mpz_t());
        s.add_col(j, t, -q);
        f.V.add_col(j, t, -q);
        clean = clean && s.at(t, j) == 0;
      }
      if (clean) {
        // the pivot must divide the rest of the block
        std::size_t bad = s.rows();
        for (std::size_t i = t + 1; i < s.rows() && bad == s.rows(); ++i)
          for (std::size_t j = t + 1; j < s.cols(); ++j)
            if (!mpz_divisible_p(s.at(i, j).get_mpz_t(), s.at(t, t).get_mpz_t())) {
              bad = i;
              break;
            }
        if (bad == s.rows()) break;
        s.add_row(t, bad, 1);
        f.U.add_row(t, bad, 1);
      }
      find_pivot(s, t, pi, pj);
    }
    if (s.at(t, t) < 0) {
      s.negate_row(t);
      f.U.negate_row(t);
    }
  }
  f.rank = t;
  return f;
}

AbelianGroup::AbelianGroup(std::size_t rank, const std::vector<Integer>& orders) : rank_(rank) {
  std::vector<Integer> d;
  for (const auto& o : orders)
    if (abs(o) > 1) d.push_back(abs(o));
  if (d.empty()) return;
  const SmithForm f = smith_normal_form(IntMatrix::diagonal(d));
  for (const auto& x : f.divisors())
    if (x > 1) torsion_.push_back(x);
}

AbelianGroup AbelianGroup::operator+(const AbelianGroup& o) const {
  std::vector<Integer> t = torsion_;
  t.insert(t.end(), o.torsion_.begin(), o.torsion_.end());
  return AbelianGroup(rank_ + o.rank_, t);
}

std::string AbelianGroup::str() const {
  if (is_trivial()) return "0";
  std::string s;
  if (rank_ == 1) s = "Z";
  else if (rank_ > 1) s = "Z^" + std::to_string(rank_);
  for (const auto& t : torsion_) {
    if (!s.empty()) s += " ⊕ ";
    s += "Z_" + t.get_str();
  }
  return s;
}

AbelianGroup cokernel(const IntMatrix& m) {
  const SmithForm f = smith_normal_form(m);
  return AbelianGroup(m.rows() - f.rank, f.divisors());
}

KernelCokernel kernel_cokernel(const IntMatrix& m) {
  const SmithForm f = smith_normal_form(m);
  return {AbelianGroup(m.cols() - f.rank, {}), AbelianGroup(m.rows() - f.rank, f.divisors())};
}

}  // namespace nbk
