#pragma once

// Exact multivariate polynomials over the rationals in a fixed graded
// lexicographic order. Phase-space polynomials use variables
// (q1..qn, p1..pn) in that order; polynomials on the Hilbert-map image use
// (y1..ym).

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "symred/qmatrix.hpp"

namespace symred {

using Exponents = std::vector<int>;

/// Graded lexicographic order, larger first: total degree decides, then the
/// exponent of the first variable, then the second, ...
struct GradedLexGreater {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

class Poly {
 public:
  using TermMap = std::map<Exponents, Rational, GradedLexGreater>;

  explicit Poly(std::size_t nvars = 0) : nvars_(nvars) {}

  static Poly constant(std::size_t nvars, const Rational& c);
  static Poly variable(std::size_t nvars, std::size_t i);
  static Poly monomial(const Exponents& e, const Rational& c = 1);

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// -1 for the zero polynomial.
  int degree() const;
  bool is_homogeneous() const;
  Poly homogeneous_component(int d) const;
  Rational coefficient(const Exponents& e) const;

  /// Adds c * x^e.
  void add_term(const Exponents& e, const Rational& c);

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Rational& s);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(const Rational& s, Poly a) { return a *= s; }
  friend Poly operator-(Poly a) { return a *= Rational(-1); }
  friend bool operator==(const Poly& a, const Poly& b) { return a.nvars_ == b.nvars_ && a.terms_ == b.terms_; }

  Poly pow(unsigned k) const;
  Poly derivative(std::size_t i) const;

  /// Composition x_i -> images[i]; every image must share one variable count.
  Poly substitute(const std::vector<Poly>& images) const;
  /// (f o g)(v) = f(g v) for a square matrix g.
  Poly compose_linear(const QMatrix& g) const;

  double evaluate(std::span<const double> x) const;
  Rational evaluate(std::span<const Rational> x) const;

  /// Reinterprets the polynomial in a larger variable set (new variables last).
  Poly extended(std::size_t nvars) const;

 private:
  void check_same(const Poly& o) const;

  std::size_t nvars_;
  TermMap terms_;
};

std::vector<std::string> phase_space_names(std::size_t n);
std::vector<std::string> generator_names(std::size_t m);

/// Canonical text: terms in descending graded-lex order, e.g.
/// "1/2*q1^2 - 1/2*q2^2 + p1*p2". The zero polynomial prints as "0".
std::string to_string(const Poly& p, const std::vector<std::string>& names);
Poly parse_poly(std::string_view text, const std::vector<std::string>& names);

/// JSON term list [{"coeff": "1/2", "exponents": [2, 0]}, ...].
nlohmann::json to_json(const Poly& p);
Poly poly_from_json(const nlohmann::json& j, std::size_t nvars);

/// All exponent vectors of total degree d in nvars variables, descending
/// graded-lex.
std::vector<Exponents> monomials_of_degree(std::size_t nvars, int d);

/// Poisson bracket for a constant Poisson tensor: {f, g} = grad(f)^T pi grad(g).
Poly bracket_with_tensor(const Poly& f, const Poly& g, const QMatrix& pi);

struct DivisionResult {
  std::vector<Poly> quotients;
  Poly remainder;
};

/// Multivariate division in graded-lex order.
DivisionResult divide(const Poly& f, const std::vector<Poly>& divisors);

/// Floating evaluator for a fixed polynomial and its gradient, used on hot
/// integration paths.
class PolyEvaluator {
 public:
  PolyEvaluator() = default;
  explicit PolyEvaluator(const Poly& p);

  std::size_t nvars() const { return nvars_; }
  double value(std::span<const double> x) const;

 private:
  std::size_t nvars_ = 0;
  int max_exp_ = 0;
  std::vector<double> coeffs_;
  std::vector<int> exps_;  // term-major
};

class GradientEvaluator {
 public:
  GradientEvaluator() = default;
  explicit GradientEvaluator(const Poly& p);

  double value(std::span<const double> x) const { return f_.value(x); }
  void gradient(std::span<const double> x, std::span<double> out) const;

 private:
  PolyEvaluator f_;
  std::vector<PolyEvaluator> partials_;
};

}  // namespace symred
