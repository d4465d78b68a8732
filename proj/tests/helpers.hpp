#pragma once

#include <Eigen/Dense>
#include <random>

#include "symred/qmatrix.hpp"

namespace testing {

inline Eigen::MatrixXd unit_columns(std::size_t dim, std::initializer_list<std::size_t> idx) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(idx.size()));
  Eigen::Index c = 0;
  for (auto i : idx) m(static_cast<Eigen::Index>(i), c++) = 1.0;
  return m;
}

inline Eigen::MatrixXd random_spd(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(dim, dim);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(dim, dim);
}

// Product of rational shears [[I, A], [0, I]] and [[I, 0], [B, I]] with A, B symmetric.
inline symred::QMatrix random_rational_symplectic(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coeff(-2, 2);
  auto shear = [&](bool upper) {
    symred::QMatrix m = symred::QMatrix::identity(2 * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const symred::Rational c(coeff(rng), 1 + (i + j) % 2);
        if (upper) m(i, n + j) = m(j, n + i) = c;
        else m(n + i, j) = m(n + j, i) = c;
      }
    return m;
  };
  return shear(true) * shear(false) * shear(true);
}

}  // namespace testing
