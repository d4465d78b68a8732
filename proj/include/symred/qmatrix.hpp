#pragma once

// Exact rational scalars and dense matrices. Everything that the toolkit
// certifies exactly (group closure, invariant subspaces, Molien series,
// polynomial solves) goes through these types.

#include <gmpxx.h>

#include <Eigen/Dense>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace symred {

using Rational = mpq_class;

/// Parses "3", "-1/4", "2.5" or "1e-3" exactly (decimals become the exact
/// decimal fraction, not the nearest double).
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& r);

/// Exact binary value of a double.
Rational rational_from_double(double x);

/// Dense row-major matrix over the rationals.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols);
  QMatrix(std::initializer_list<std::initializer_list<Rational>> rows);

  static QMatrix identity(std::size_t n);
  static QMatrix from_eigen(const Eigen::MatrixXd& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<Rational>& flat() const { return data_; }

  QMatrix transpose() const;
  QMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  QMatrix column(std::size_t j) const { return block(0, j, rows_, 1); }
  bool is_zero() const;
  Eigen::MatrixXd to_eigen() const;

  /// Horizontal and vertical concatenation.
  static QMatrix hcat(const QMatrix& a, const QMatrix& b);
  static QMatrix vcat(const QMatrix& a, const QMatrix& b);

  friend QMatrix operator+(const QMatrix& a, const QMatrix& b);
  friend QMatrix operator-(const QMatrix& a, const QMatrix& b);
  friend QMatrix operator*(const QMatrix& a, const QMatrix& b);
  friend QMatrix operator*(const Rational& s, const QMatrix& a);
  friend bool operator==(const QMatrix& a, const QMatrix& b);
  /// Lexicographic on the flattened entries; the canonical element order.
  friend bool operator<(const QMatrix& a, const QMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

std::string to_string(const QMatrix& m);

struct RowEchelon {
  QMatrix reduced;                   // reduced row echelon form, zero rows trimmed
  std::vector<std::size_t> pivots;   // pivot column of each row
};

RowEchelon rref(QMatrix m);
std::size_t rank(const QMatrix& m);

/// Basis of {x : m x = 0} as columns. The basis is the canonical one read off
/// the reduced echelon form (one unit free variable per column).
QMatrix nullspace(const QMatrix& m);

/// Some solution of a x = b with all free variables zero, or nullopt.
std::optional<QMatrix> solve(const QMatrix& a, const QMatrix& b);

/// Throws DimensionError for non-square or singular input.
QMatrix inverse(const QMatrix& m);

/// Coefficients c_0..c_n of det(t I - m) (c_n = 1), Faddeev-LeVerrier.
std::vector<Rational> characteristic_polynomial(const QMatrix& m);

/// Standard symplectic matrix [[0, I], [-I, 0]] of size 2n.
QMatrix standard_omega_exact(std::size_t n);

}  // namespace symred
