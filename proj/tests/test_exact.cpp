#include <doctest.h>

#include "symred/errors.hpp"
#include "symred/lattice.hpp"
#include "symred/poly.hpp"
#include "symred/qmatrix.hpp"

using namespace symred;

TEST_CASE("rational parsing is exact") {
  CHECK(parse_rational("-1/4") == Rational(-1, 4));
  CHECK(parse_rational("2.5") == Rational(5, 2));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("0.1") == Rational(1, 10));
  CHECK_THROWS(parse_rational("x"));
}

TEST_CASE("exact linear algebra") {
  QMatrix m{{1, 2, 3}, {2, 4, 6}, {1, 0, 1}};
  CHECK(rank(m) == 2);
  QMatrix k = nullspace(m);
  REQUIRE(k.cols() == 1);
  CHECK((m * k).is_zero());
  QMatrix a{{2, 1}, {1, 1}};
  CHECK(a * inverse(a) == QMatrix::identity(2));
  CHECK_THROWS_AS(inverse(QMatrix{{1, 2}, {2, 4}}), DimensionError);
  auto cp = characteristic_polynomial(a);  // t^2 - 3t + 1
  CHECK(cp == std::vector<Rational>{1, -3, 1});
}

TEST_CASE("integer normal forms") {
  IntMatrix m{{2, 4}, {6, 8}};
  auto h = hermite_normal_form(m, 2);
  CHECK(h == IntMatrix{{2, 0}, {0, 4}});
  CHECK(smith_invariant_factors(m, 2) == std::vector<mpz_class>{2, 4});
  auto k = integer_kernel(IntMatrix{{1, -1}}, 2);
  CHECK(k == IntMatrix{{1, 1}});
}

TEST_CASE("polynomial text round trip") {
  auto names = phase_space_names(2);
  for (const char* text : {"1/2*q1^2 - 1/2*q2^2 + p1*p2", "0", "q1*q2*p1*p2 - 3", "-p2^5"}) {
    Poly p = parse_poly(text, names);
    CHECK(to_string(p, names) == text);
    CHECK(poly_from_json(to_json(p), 4) == p);
  }
  CHECK_THROWS_AS(parse_poly("q3", names), ConfigError);
}

TEST_CASE("polynomial arithmetic") {
  auto names = phase_space_names(1);
  Poly x = parse_poly("q1", names), y = parse_poly("p1", names);
  CHECK((x + y).pow(2) == parse_poly("q1^2 + 2*q1*p1 + p1^2", names));
  CHECK(parse_poly("q1^3*p1", names).derivative(0) == parse_poly("3*q1^2*p1", names));
  CHECK(parse_poly("q1^2 + p1", names).substitute({y, x}) == parse_poly("p1^2 + q1", names));
  QMatrix g{{0, 1}, {-1, 0}};
  // (g v)_1 = p1, (g v)_2 = -q1
  CHECK(parse_poly("q1 + 2*p1", names).compose_linear(g) == parse_poly("p1 - 2*q1", names));
  const double pt[2] = {0.5, -2.0};
  CHECK(parse_poly("q1^2*p1 - 1", names).evaluate(pt) == doctest::Approx(-1.5));
  auto d = divide(parse_poly("q1^2 - p1^2", names), {x - y});
  CHECK(d.remainder.is_zero());
  CHECK(d.quotients[0] == x + y);
}

TEST_CASE("graded lex order") {
  GradedLexGreater gt;
  CHECK(gt({2, 0}, {1, 0}));
  CHECK(gt({2, 0}, {1, 1}));
  CHECK(gt({1, 1}, {0, 2}));
  CHECK(monomials_of_degree(2, 2) == std::vector<Exponents>{{2, 0}, {1, 1}, {0, 2}});
}

TEST_CASE("bracket with a constant tensor") {
  auto names = phase_space_names(2);
  QMatrix pi = standard_omega_exact(2);
  auto q1 = parse_poly("q1", names), p1 = parse_poly("p1", names), q2 = parse_poly("q2", names);
  CHECK(bracket_with_tensor(q1, p1, pi) == Poly::constant(4, 1));
  CHECK(bracket_with_tensor(q1, q2, pi).is_zero());
}

TEST_CASE("floating evaluators agree with exact evaluation") {
  auto names = phase_space_names(2);
  Poly p = parse_poly("1/3*q1^3*p2 - q2*p1^2 + 7", names);
  GradientEvaluator ev(p);
  const double x[4] = {0.3, -1.1, 0.7, 2.0};
  double g[4];
  ev.gradient(x, g);
  CHECK(ev.value(x) == doctest::Approx(p.evaluate(x)));
  for (std::size_t i = 0; i < 4; ++i) CHECK(g[i] == doctest::Approx(p.derivative(i).evaluate(x)));
}
