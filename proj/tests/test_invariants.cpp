#include <doctest.h>

#include <random>
#include <set>

#include "helpers.hpp"
#include "symred/builtins.hpp"
#include "symred/errors.hpp"
#include "symred/invariants.hpp"

using namespace symred;
using namespace symred::invariants;

namespace {

QMatrix diag(std::initializer_list<int> d) {
  QMatrix m(d.size(), d.size());
  std::size_t i = 0;
  for (int x : d) m(i, i) = x, ++i;
  return m;
}

Poly ph(const std::string& text, std::size_t n) { return parse_poly(text, phase_space_names(n)); }
Poly yp(const std::string& text, std::size_t m) { return parse_poly(text, generator_names(m)); }

groups::Group model_group(const Model& m) { return groups::Group(m.group, m.space); }

std::set<std::string> generator_set(const HilbertMap& h, std::size_t n) {
  std::set<std::string> out;
  for (const auto& g : h.generators) out.insert(to_string(g, phase_space_names(n)));
  return out;
}

// dimension of degree-d polynomials on R^4 even in (q1, p1) and even in (q2, p2)
std::size_t klein_count(int d) {
  std::size_t c = 0;
  for (int a = 0; a <= d; a += 2)
    if ((d - a) % 2 == 0) c += static_cast<std::size_t>((a + 1) * (d - a + 1));
  return c;
}

}  // namespace

TEST_CASE("canonical brackets") {
  auto s = symplin::SymplecticSpace::standard(2);
  CHECK(poisson_bracket(ph("q1", 2), ph("p1", 2), s) == Poly::constant(4, 1));
  CHECK(poisson_bracket(ph("q1", 2), ph("q2", 2), s).is_zero());
  auto s1 = symplin::SymplecticSpace::standard(1);
  auto u = ph("q1^2", 1), v = ph("q1*p1", 1), w = ph("p1^2", 1);
  CHECK(poisson_bracket(u, v, s1) == Rational(2) * u);
  CHECK(poisson_bracket(u, w, s1) == Rational(4) * v);
  CHECK(poisson_bracket(v, w, s1) == Rational(2) * w);
}

TEST_CASE("reynolds operator") {
  auto s = symplin::SymplecticSpace::standard(1);
  auto z2 = groups::close_group({{diag({-1, -1})}}, standard_omega_exact(1));
  CHECK(reynolds(ph("q1", 1), z2).is_zero());
  CHECK(reynolds(ph("q1^2", 1), z2) == ph("q1^2", 1));

  auto c4 = groups::close_group({{QMatrix{{0, 1}, {-1, 0}}}}, standard_omega_exact(1));
  // images of q1 under the four rotations: q1, p1, -q1, -p1
  const Poly avg = Rational(1, 4) * (ph("q1^4", 1) + ph("p1^4", 1) + ph("q1^4", 1) + ph("p1^4", 1));
  CHECK(reynolds(ph("q1^4", 1), c4) == avg);
  CHECK(reynolds(avg, c4) == avg);
}

TEST_CASE("molien series") {
  auto z2 = groups::close_group({{diag({-1, -1})}}, standard_omega_exact(1));
  CHECK(molien_dimension(z2, 2) == 3);
  CHECK(molien_dimension(z2, 0) == 1);
  CHECK(molien_dimension(z2, 3) == 0);
  auto trivial = groups::close_group({{QMatrix::identity(2)}}, standard_omega_exact(1));
  CHECK(molien_dimension(trivial, 1) == 2);
  auto klein = groups::close_group({{diag({-1, 1, -1, 1}), diag({1, -1, 1, -1})}}, standard_omega_exact(2));
  for (int d = 0; d <= 8; ++d) CHECK(molien_dimension(klein, d) == klein_count(d));
}

TEST_CASE("invariant generators of the builtins") {
  auto z2 = builtin_model("z2_cone");
  auto hz = invariant_generators(model_group(z2));
  CHECK(generator_set(hz, 1) == std::set<std::string>{"q1^2", "q1*p1", "p1^2"});
  CHECK(hz.degrees == std::vector<int>{2, 2, 2});
  CHECK(hz.complete);

  auto circle = builtin_model("circle_1_-1");
  auto hc = invariant_generators(model_group(circle));
  REQUIRE(hc.size() == 4);
  // |z1|^2, |z2|^2 and the real and imaginary parts of z1 z2, up to sign
  auto g = generator_set(hc, 2);
  CHECK(g.count("q1^2 + p1^2"));
  CHECK(g.count("q2^2 + p2^2"));
  CHECK((g.count("q1*q2 - p1*p2") + g.count("-q1*q2 + p1*p2")) == 1);
  CHECK((g.count("q1*p2 + q2*p1") + g.count("-q1*p2 - q2*p1")) == 1);
  CHECK(hc.relations.size() == 1);

  auto triv = invariant_generators(groups::Group(groups::FiniteMatrixGroup{{QMatrix::identity(2)}},
                                                 symplin::SymplecticSpace::standard(1)));
  CHECK(generator_set(triv, 1) == std::set<std::string>{"q1", "p1"});
}

TEST_CASE("generator counts match the Molien series up to degree 8") {
  auto klein = builtin_model("klein_r4");
  auto h = invariant_generators(model_group(klein), 8);
  CHECK(h.complete);
  for (const auto& c : h.counts) {
    REQUIRE(c.expected);
    CHECK(*c.expected == c.invariant_dim);
    CHECK(c.product_dim == c.invariant_dim);
  }
}

TEST_CASE("expressing invariants through the generators") {
  auto circle = builtin_model("circle_1_-1");
  auto g = model_group(circle);
  auto h = invariant_generators(g);
  auto f = groups::momentum_map(g, circle.space);
  Poly fy = express_in_generators(f.norm_squared(), h);
  CHECK(fy.substitute(h.generators) == f.norm_squared());

  auto z2 = builtin_model("z2_cone");
  auto hz = invariant_generators(model_group(z2));
  Poly sq = express_in_generators(ph("q1^4 + 2*q1^2*p1^2 + p1^4", 1), hz);
  CHECK(sq.substitute(hz.generators) == ph("q1^4 + 2*q1^2*p1^2 + p1^4", 1));
  CHECK(sq.degree() == 2);
  CHECK_THROWS_AS(express_in_generators(ph("q1", 1), hz), ExpressibilityError);
  Poly first = express_in_generators(hz.generators[0], hz);
  CHECK(first == Poly::variable(3, 0));
}

TEST_CASE("reduced Poisson structure") {
  auto z2 = builtin_model("z2_cone");
  auto g = model_group(z2);
  auto h = invariant_generators(g);
  auto lam = reduced_structure_matrix(h, z2.space);
  auto f = groups::momentum_map(g, z2.space);
  auto chk = check_structure(h, lam, g, f, z2.space);
  CHECK(chk.antisymmetric);
  CHECK(chk.substitution_exact);
  CHECK(chk.jacobi_exact);
  CHECK(chk.closure_invariant);
  CHECK(chk.noether_exact);
  // entries agree with the brackets of the generators
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(lam(i, j).substitute(h.generators) == poisson_bracket(h.generators[i], h.generators[j], z2.space));

  auto triv = groups::Group(groups::FiniteMatrixGroup{{QMatrix::identity(2)}}, symplin::SymplecticSpace::standard(1));
  auto ht = invariant_generators(triv);
  auto lt = reduced_structure_matrix(ht, symplin::SymplecticSpace::standard(1));
  CHECK(lt(0, 1) == Poly::constant(2, 1));
  CHECK(lt(1, 0) == Poly::constant(2, -1));

  for (const auto& name : builtin_names()) {
    auto m = builtin_model(name);
    auto gm = model_group(m);
    auto hm = invariant_generators(gm);
    auto c = check_structure(hm, reduced_structure_matrix(hm, m.space), gm, groups::momentum_map(gm, m.space), m.space);
    CHECK_MESSAGE((c.antisymmetric && c.jacobi_exact && c.noether_exact && c.substitution_exact), name);
  }
}

TEST_CASE("invariance under a random symplectic conjugation of the group") {
  std::mt19937_64 rng(9);
  QMatrix s = testing::random_rational_symplectic(2, rng);
  QMatrix si = inverse(s);
  auto klein = builtin_model("klein_r4");
  groups::FiniteMatrixGroup conj;
  for (const auto& x : std::get<groups::FiniteMatrixGroup>(klein.group).generators) conj.generators.push_back(s * x * si);
  groups::Group g(conj, klein.space);
  auto h = invariant_generators(g);
  for (const auto& p : h.generators) CHECK(is_invariant(p, g));
  auto lam = reduced_structure_matrix(h, klein.space);
  auto chk = check_structure(h, lam, g, groups::momentum_map(g, klein.space), klein.space);
  CHECK(chk.jacobi_exact);
  CHECK(chk.substitution_exact);
}

TEST_CASE("poisson ideal diagnostic") {
  auto circle = builtin_model("circle_1_-1");
  auto g = model_group(circle);
  auto f = groups::momentum_map(g, circle.space);
  std::vector<Eigen::VectorXd> samples;
  for (double t : {0.1, 0.7, 1.3}) {
    Eigen::VectorXd v(4);
    v << std::cos(t), std::cos(2 * t), std::sin(t), std::sin(2 * t);  // |z1| = |z2| = 1
    samples.push_back(v);
  }
  auto h = invariant_generators(g);
  for (const auto& p : h.generators) {
    auto d = poisson_ideal_diagnostic(p, f, samples, circle.space);
    CHECK(d.max_residual <= 1e-12);
    CHECK(d.exact_membership);
  }
  auto zero = poisson_ideal_diagnostic(Poly::constant(4, 3), f, samples, circle.space);
  CHECK(zero.max_residual == 0.0);

  auto triv = groups::Group(groups::FiniteMatrixGroup{{QMatrix::identity(2)}}, symplin::SymplecticSpace::standard(1));
  auto ft = groups::momentum_map(triv, symplin::SymplecticSpace::standard(1));
  std::vector<Eigen::VectorXd> pts{Eigen::Vector2d(0.5, 0.1)};
  CHECK_THROWS_AS(poisson_ideal_diagnostic(ph("q1", 1), ft, pts, symplin::SymplecticSpace::standard(1), ph("q1", 1)),
                  PreconditionError);
}
