#pragma once

// Integer matrices, Smith normal form with unimodular transforms, and finitely
// generated abelian groups in divisor-chain form.

#include "nbk/scalar.hpp"

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace nbk {

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);
  static IntMatrix identity(std::size_t n);
  static IntMatrix diagonal(const std::vector<Integer>& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Integer& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Integer& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  IntMatrix transpose() const;
  /// Square matrices only; n >= 0.
  IntMatrix pow(unsigned n) const;
  bool is_diagonal() const;

  void swap_rows(std::size_t i, std::size_t j);
  void swap_cols(std::size_t i, std::size_t j);
  /// row_i += q * row_j
  void add_row(std::size_t i, std::size_t j, const Integer& q);
  /// col_i += q * col_j
  void add_col(std::size_t i, std::size_t j, const Integer& q);
  void negate_row(std::size_t i);

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend IntMatrix operator-(const IntMatrix& a, const IntMatrix& b);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b) = default;

  /// Rows separated by newlines, entries by single spaces.
  std::string str() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Integer> a_;
};

/// Bareiss fraction-free elimination; square matrices only.
Integer determinant(const IntMatrix& m);

struct SmithForm {
  IntMatrix S, U, V;  // U * M * V = S
  std::size_t rank = 0;
  /// d_1 | d_2 | ... | d_rank, all positive.
  std::vector<Integer> divisors() const;
};

/// Pivot: smallest nonzero |entry| of the active block, ties broken by (row, col).
SmithForm smith_normal_form(const IntMatrix& m);

class AbelianGroup {
 public:
  AbelianGroup() = default;
  /// Z^rank plus cyclic factors of the given orders, in any form (orders 0 and
  /// 1 are dropped, 0 meaning nothing here); stored as a divisor chain.
  AbelianGroup(std::size_t rank, const std::vector<Integer>& orders);

  std::size_t free_rank() const { return rank_; }
  const std::vector<Integer>& torsion() const { return torsion_; }
  bool is_trivial() const { return rank_ == 0 && torsion_.empty(); }

  AbelianGroup operator+(const AbelianGroup& o) const;  // direct sum
  friend bool operator==(const AbelianGroup& a, const AbelianGroup& b) = default;

  /// "Z^2 ⊕ Z_2 ⊕ Z_2"; the trivial group prints as "0".
  std::string str() const;

 private:
  std::size_t rank_ = 0;
  std::vector<Integer> torsion_;
};

/// Z^rows / image, presented by the relation matrix m (columns = relations).
AbelianGroup cokernel(const IntMatrix& m);

struct KernelCokernel {
  AbelianGroup ker, coker;
};
KernelCokernel kernel_cokernel(const IntMatrix& m);

}  // namespace nbk
