#include <doctest.h>

#include <random>

#include "symred/builtins.hpp"
#include "symred/errors.hpp"
#include "symred/groups.hpp"

using namespace symred;
using namespace symred::groups;

namespace {

QMatrix diag(std::initializer_list<int> d) {
  QMatrix m(d.size(), d.size());
  std::size_t i = 0;
  for (int x : d) m(i, i) = x, ++i;
  return m;
}

Poly ph(const std::string& text, std::size_t n) { return parse_poly(text, phase_space_names(n)); }

}  // namespace

TEST_CASE("group closure") {
  CHECK(close_group({{diag({-1, -1})}}, standard_omega_exact(1)).order() == 2);

  QMatrix rot{{0, 1}, {-1, 0}};
  auto c4 = close_group({{rot}}, standard_omega_exact(1));
  CHECK(c4.order() == 4);
  for (std::size_t a = 0; a < 4; ++a) CHECK(c4.multiply(a, c4.inverse(a)) == c4.identity());

  CHECK(close_group({{diag({-1, 1, -1, 1}), diag({1, -1, 1, -1})}}, standard_omega_exact(2)).order() == 4);
}

TEST_CASE("closure guards") {
  CHECK_THROWS_AS(close_group({{diag({2, 1})}}, standard_omega_exact(1)), GroupError);
  QMatrix shear{{1, 1}, {0, 1}};
  CHECK_THROWS_AS(close_group({{shear}, 16}, standard_omega_exact(1)), GroupError);
}

TEST_CASE("momentum map of the circle with weights (1, -1)") {
  auto s = symplin::SymplecticSpace::standard(2);
  Group g(Torus{{{1, -1}}}, s);
  auto f = momentum_map(g, s);
  REQUIRE(f.algebra_dim() == 1);
  // F = 1/2 (|z1|^2 - |z2|^2)
  CHECK(f.components[0] == ph("1/2*q1^2 - 1/2*q2^2 + 1/2*p1^2 - 1/2*p2^2", 2));
  Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
  v(0) = 1;
  CHECK(f.evaluate(v)(0) == doctest::Approx(0.5));
  CHECK(f.evaluate(Eigen::VectorXd::Zero(4)).norm() == 0.0);
  for (const auto& r : check_equivariance(f, g.structure(), s)) CHECK(r.is_zero());
}

TEST_CASE("so3 momentum map is the angular momentum") {
  auto m = builtin_model("so3_central_force");
  Group g(m.group, m.space);
  auto f = momentum_map(g, m.space);
  REQUIRE(f.algebra_dim() == 3);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd v(6);
    for (int i = 0; i < 6; ++i) v(i) = nd(rng);
    Eigen::Vector3d q = v.head<3>(), p = v.tail<3>();
    Eigen::Vector3d l = q.cross(p);
    CHECK((f.evaluate(v) - Eigen::VectorXd(l)).norm() <= 1e-12);
  }
  auto res = check_equivariance(f, g.structure(), m.space);
  for (const auto& r : res) CHECK(r.is_zero());

  // doubling the basis doubles the structure constants and keeps residuals zero
  MatrixLieAlgebra twice;
  for (const auto& x : so3_basis()) twice.basis.push_back(Rational(2) * x);
  Group g2(twice, m.space);
  for (const auto& r : check_equivariance(momentum_map(g2, m.space), g2.structure(), m.space)) CHECK(r.is_zero());
  CHECK(g2.structure()[(0 * 3 + 1) * 3 + 2] == 2);
}

TEST_CASE("structure constants must close") {
  auto s = symplin::SymplecticSpace::standard(3);
  auto b = so3_basis();
  MatrixLieAlgebra partial{{b[0], b[1]}, {}};
  CHECK_THROWS_AS(Group(partial, s), GroupError);
}

TEST_CASE("isotropy") {
  auto s1 = symplin::SymplecticSpace::standard(1);
  Group z2(FiniteMatrixGroup{{diag({-1, -1})}}, s1);
  CHECK(std::get<Subgroup>(isotropy(z2, Eigen::VectorXd::Zero(2)).data).size() == 2);
  Eigen::Vector2d x(0.3, -1.2);
  CHECK(std::get<Subgroup>(isotropy(z2, x).data).size() == 1);

  auto s2 = symplin::SymplecticSpace::standard(2);
  Group circle(Torus{{{1, -1}}}, s2);
  CHECK(torus_isotropy(circle.torus(), Eigen::VectorXd::Zero(4)).dimension == 1);
  Eigen::Vector4d both(1, 0.5, 0, 0.5), one(1, 0, 0.2, 0);
  auto a = torus_isotropy(circle.torus(), both), b = torus_isotropy(circle.torus(), one);
  CHECK(a.dimension == 0);
  CHECK(a.finite_factors.empty());
  CHECK(b.dimension == 0);
  CHECK(b.finite_factors.empty());

  Group weight2(Torus{{{2, 1}}}, s2);
  auto c = torus_isotropy(weight2.torus(), Eigen::Vector4d(1, 0, 0, 0));
  REQUIRE(c.finite_factors.size() == 1);
  CHECK(c.finite_factors[0] == 2);
}

TEST_CASE("orbit types of the Klein group") {
  auto m = builtin_model("klein_r4");
  Group g(m.group, m.space);
  // (q1, q2, p1, p2)
  CHECK(orbit_type(g, Eigen::Vector4d(0.7, 0.4, -0.1, 0.3)) == orbit_type(g, Eigen::Vector4d(-2, 1, 0.5, 0.5)));
  const auto full = orbit_type(g, Eigen::Vector4d::Zero());
  const auto first = orbit_type(g, Eigen::Vector4d(0, 1, 0, 0.5));
  const auto second = orbit_type(g, Eigen::Vector4d(1, 0, 0.5, 0));
  const auto trivial = orbit_type(g, Eigen::Vector4d(1, 1, 0, 0));
  CHECK(full != first);
  CHECK(first != second);
  CHECK(second != trivial);
  CHECK(subgroup_classes(g.finite()).size() == 5);
}

TEST_CASE("conjugate subgroups share a canonical representative") {
  // swap of the two planes together with the Klein flips: dihedral of order 8
  QMatrix swap(4, 4);
  swap(0, 1) = swap(1, 0) = swap(2, 3) = swap(3, 2) = 1;
  auto d8 = close_group({{swap, diag({-1, 1, -1, 1})}}, standard_omega_exact(2));
  REQUIRE(d8.order() == 8);
  const auto f1 = d8.index_of(diag({-1, 1, -1, 1})), f2 = d8.index_of(diag({1, -1, 1, -1}));
  const auto h1 = generated_subgroup(d8, {f1}), h2 = generated_subgroup(d8, {f2});
  CHECK(h1 != h2);
  CHECK(canonical_conjugate(d8, h1) == canonical_conjugate(d8, h2));
  for (const auto& h : subgroup_classes(d8))
    for (std::size_t x = 0; x < d8.order(); ++x) CHECK(canonical_conjugate(d8, conjugate(d8, h, x)) == h);
  CHECK(normalizer(d8, h1).size() == 4);
}
