#include "symred/qmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "symred/errors.hpp"

namespace symred {

namespace {

bool is_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Rational pow10(long e) {
  mpz_class p = 1;
  for (long i = 0; i < (e < 0 ? -e : e); ++i) p *= 10;
  return e < 0 ? Rational(mpz_class(1), p) : Rational(p);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s.push_back(c);
  if (s.empty()) throw ConfigError("empty rational literal");

  bool negative = false;
  std::size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') {
    negative = s[0] == '-';
    pos = 1;
  }
  std::string_view body(s);
  body.remove_prefix(pos);

  Rational value;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash), den = body.substr(slash + 1);
    if (!is_digits(num) || !is_digits(den)) throw ConfigError("bad rational literal '" + s + "'");
    mpz_class d{std::string(den)};
    if (d == 0) throw ConfigError("zero denominator in '" + s + "'");
    value = Rational(mpz_class{std::string(num)}, d);
    value.canonicalize();
  } else {
    long exponent = 0;
    std::string_view mant = body;
    if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
      auto es = body.substr(e + 1);
      bool eneg = false;
      if (!es.empty() && (es[0] == '+' || es[0] == '-')) {
        eneg = es[0] == '-';
        es.remove_prefix(1);
      }
      if (!is_digits(es)) throw ConfigError("bad exponent in '" + s + "'");
      exponent = std::stol(std::string(es)) * (eneg ? -1 : 1);
      mant = body.substr(0, e);
    }
    std::string digits;
    long frac = 0;
    if (auto dot = mant.find('.'); dot != std::string_view::npos) {
      auto ip = mant.substr(0, dot), fp = mant.substr(dot + 1);
      if ((!ip.empty() && !is_digits(ip)) || (!fp.empty() && !is_digits(fp)) || ip.size() + fp.size() == 0)
        throw ConfigError("bad decimal literal '" + s + "'");
      digits = std::string(ip) + std::string(fp);
      frac = static_cast<long>(fp.size());
    } else {
      if (!is_digits(mant)) throw ConfigError("bad numeric literal '" + s + "'");
      digits = std::string(mant);
    }
    value = Rational(mpz_class(digits)) * pow10(exponent - frac);
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& r) { return r.get_str(); }

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw ConfigError("non-finite value cannot be made rational");
  return Rational(x);
}

QMatrix::QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

QMatrix::QMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

QMatrix QMatrix::identity(std::size_t n) {
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

QMatrix QMatrix::from_eigen(const Eigen::MatrixXd& m) {
  QMatrix q(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) q(i, j) = rational_from_double(m(i, j));
  return q;
}

QMatrix QMatrix::transpose() const {
  QMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

QMatrix QMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("block out of range");
  QMatrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

bool QMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Rational& x) { return sgn(x) == 0; });
}

Eigen::MatrixXd QMatrix::to_eigen() const {
  Eigen::MatrixXd m(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).get_d();
  return m;
}

QMatrix QMatrix::hcat(const QMatrix& a, const QMatrix& b) {
  if (a.rows_ != b.rows_) throw DimensionError("hcat: row mismatch");
  QMatrix m(a.rows_, a.cols_ + b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t j = 0; j < a.cols_; ++j) m(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols_; ++j) m(i, a.cols_ + j) = b(i, j);
  }
  return m;
}

QMatrix QMatrix::vcat(const QMatrix& a, const QMatrix& b) {
  if (a.rows_ == 0) return b;
  if (b.rows_ == 0) return a;
  if (a.cols_ != b.cols_) throw DimensionError("vcat: column mismatch");
  QMatrix m(a.rows_ + b.rows_, a.cols_);
  std::copy(a.data_.begin(), a.data_.end(), m.data_.begin());
  std::copy(b.data_.begin(), b.data_.end(), m.data_.begin() + static_cast<long>(a.data_.size()));
  return m;
}

QMatrix operator+(const QMatrix& a, const QMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("matrix sum: shape mismatch");
  QMatrix c(a.rows_, a.cols_);
  for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = a.data_[i] + b.data_[i];
  return c;
}

QMatrix operator-(const QMatrix& a, const QMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("matrix difference: shape mismatch");
  QMatrix c(a.rows_, a.cols_);
  for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = a.data_[i] - b.data_[i];
  return c;
}

QMatrix operator*(const QMatrix& a, const QMatrix& b) {
  if (a.cols_ != b.rows_) throw DimensionError("matrix product: shape mismatch");
  QMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Rational& aik = a(i, k);
      if (sgn(aik) == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j)
        if (sgn(b(k, j)) != 0) c(i, j) += aik * b(k, j);
    }
  return c;
}

QMatrix operator*(const Rational& s, const QMatrix& a) {
  QMatrix c = a;
  for (auto& x : c.data_) x *= s;
  return c;
}

bool operator==(const QMatrix& a, const QMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

bool operator<(const QMatrix& a, const QMatrix& b) {
  if (a.rows_ != b.rows_) return a.rows_ < b.rows_;
  if (a.cols_ != b.cols_) return a.cols_ < b.cols_;
  return std::lexicographical_compare(a.data_.begin(), a.data_.end(), b.data_.begin(), b.data_.end());
}

std::string to_string(const QMatrix& m) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j).get_str();
    os << ']';
  }
  os << ']';
  return os.str();
}

RowEchelon rref(QMatrix m) {
  RowEchelon out;
  std::size_t row = 0;
  const std::size_t nr = m.rows(), nc = m.cols();
  for (std::size_t col = 0; col < nc && row < nr; ++col) {
    std::size_t piv = row;
    while (piv < nr && sgn(m(piv, col)) == 0) ++piv;
    if (piv == nr) continue;
    if (piv != row)
      for (std::size_t j = 0; j < nc; ++j) std::swap(m(piv, j), m(row, j));
    Rational inv = 1 / m(row, col);
    for (std::size_t j = col; j < nc; ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < nr; ++i) {
      if (i == row || sgn(m(i, col)) == 0) continue;
      Rational f = m(i, col);
      for (std::size_t j = col; j < nc; ++j)
        if (sgn(m(row, j)) != 0) m(i, j) -= f * m(row, j);
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = m.block(0, 0, row, nc);
  return out;
}

std::size_t rank(const QMatrix& m) { return rref(m).pivots.size(); }

QMatrix nullspace(const QMatrix& m) {
  auto e = rref(m);
  const std::size_t n = m.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < n; ++j)
    if (!is_pivot[j]) free.push_back(j);
  QMatrix basis(n, free.size());
  for (std::size_t f = 0; f < free.size(); ++f) {
    basis(free[f], f) = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) basis(e.pivots[r], f) = -e.reduced(r, free[f]);
  }
  return basis;
}

std::optional<QMatrix> solve(const QMatrix& a, const QMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("solve: row mismatch");
  const std::size_t n = a.cols();
  auto e = rref(QMatrix::hcat(a, b));
  QMatrix x(n, b.cols());
  for (std::size_t r = 0; r < e.pivots.size(); ++r) {
    if (e.pivots[r] >= n) return std::nullopt;  // inconsistent row
    for (std::size_t j = 0; j < b.cols(); ++j) x(e.pivots[r], j) = e.reduced(r, n + j);
  }
  return x;
}

QMatrix inverse(const QMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("inverse of non-square matrix");
  const std::size_t n = m.rows();
  auto e = rref(QMatrix::hcat(m, QMatrix::identity(n)));
  if (e.pivots.size() < n || e.pivots[n - 1] >= n) throw DimensionError("inverse of singular matrix");
  return e.reduced.block(0, n, n, n);
}

std::vector<Rational> characteristic_polynomial(const QMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("characteristic polynomial of non-square matrix");
  const std::size_t n = m.rows();
  // Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k.
  std::vector<Rational> c(n + 1);
  c[n] = 1;
  QMatrix mk(n, n);
  const QMatrix id = QMatrix::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    mk = m * mk + c[n - k + 1] * id;
    QMatrix am = m * mk;
    Rational tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
    c[n - k] = -tr / Rational(static_cast<long>(k));
  }
  return c;
}

QMatrix standard_omega_exact(std::size_t n) {
  QMatrix w(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    w(i, n + i) = 1;
    w(n + i, i) = -1;
  }
  return w;
}

}  // namespace symred
