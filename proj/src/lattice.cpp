#include "symred/lattice.hpp"

#include <algorithm>

#include "symred/errors.hpp"

namespace symred {

namespace {

mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

void axpy_row(IntVector& dst, const mpz_class& q, const IntVector& src) {
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] -= q * src[j];
}

// Integer row echelon on the leading `reduce_cols` columns, operating on whole
// rows. Returns the number of pivot rows; those come first.
std::size_t echelonize(IntMatrix& a, std::size_t reduce_cols) {
  std::size_t r = 0;
  for (std::size_t col = 0; col < reduce_cols && r < a.size(); ++col) {
    while (true) {
      std::size_t best = a.size();
      for (std::size_t i = r; i < a.size(); ++i)
        if (a[i][col] != 0 && (best == a.size() || abs(a[i][col]) < abs(a[best][col]))) best = i;
      if (best == a.size()) break;
      std::swap(a[r], a[best]);
      bool clean = true;
      for (std::size_t i = r + 1; i < a.size(); ++i) {
        if (a[i][col] == 0) continue;
        axpy_row(a[i], floor_div(a[i][col], a[r][col]), a[r]);
        if (a[i][col] != 0) clean = false;
      }
      if (clean) break;
    }
    if (a[r][col] == 0) continue;
    if (a[r][col] < 0)
      for (auto& x : a[r]) x = -x;
    for (std::size_t i = 0; i < r; ++i) axpy_row(a[i], floor_div(a[i][col], a[r][col]), a[r]);
    ++r;
  }
  return r;
}

void check_shape(const IntMatrix& m, std::size_t cols) {
  for (const auto& row : m)
    if (row.size() != cols) throw DimensionError("integer matrix row has wrong length");
}

}  // namespace

IntMatrix hermite_normal_form(const IntMatrix& m, std::size_t cols) {
  check_shape(m, cols);
  IntMatrix a = m;
  std::size_t r = echelonize(a, cols);
  a.resize(r);
  return a;
}

std::vector<mpz_class> smith_invariant_factors(const IntMatrix& m, std::size_t cols) {
  check_shape(m, cols);
  // Diagonalize by alternating row and column echelon passes.
  IntMatrix a = m;
  for (int pass = 0; pass < 256; ++pass) {
    a.resize(echelonize(a, cols));
    IntMatrix t(cols, IntVector(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < cols; ++j) t[j][i] = a[i][j];
    t.resize(echelonize(t, a.size()));
    bool diagonal = true;
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = 0; j < t[i].size(); ++j)
        if (i != j && t[i][j] != 0) diagonal = false;
    if (diagonal) {
      std::vector<mpz_class> d;
      for (std::size_t i = 0; i < t.size(); ++i)
        if (i < t[i].size() && t[i][i] != 0) d.push_back(abs(t[i][i]));
      // Enforce the divisibility chain.
      for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) {
          mpz_class g = gcd(d[i], d[j]);
          mpz_class l = d[i] / g * d[j];
          d[i] = g;
          d[j] = l;
        }
      return d;
    }
    const std::size_t tc = a.size();
    a.assign(tc, IntVector(t.size()));
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = 0; j < tc; ++j) a[j][i] = t[i][j];
    cols = t.size();
  }
  throw ConvergenceError("Smith normal form did not stabilize");
}

IntMatrix integer_kernel(const IntMatrix& m, std::size_t cols) {
  check_shape(m, cols);
  const std::size_t rows = m.size();
  // Rows (m^T row j | e_j); echelonizing the first block exposes the kernel.
  IntMatrix aug(cols, IntVector(rows + cols));
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < rows; ++i) aug[j][i] = m[i][j];
    aug[j][rows + j] = 1;
  }
  std::size_t r = echelonize(aug, rows);
  IntMatrix ker;
  for (std::size_t i = r; i < aug.size(); ++i) ker.emplace_back(aug[i].begin() + static_cast<long>(rows), aug[i].end());
  return hermite_normal_form(ker, cols);
}

}  // namespace symred
