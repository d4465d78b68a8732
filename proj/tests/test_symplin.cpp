#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "symred/errors.hpp"
#include "symred/symplin.hpp"

using namespace symred;
using namespace symred::symplin;
using testing::unit_columns;

namespace {

// indices in (q1..qn, p1..pn) ordering
bool same_span(const Subspace& s, const Eigen::MatrixXd& cols) { return subspace_distance(s, Subspace::span(cols)) < 1e-12; }

}  // namespace

TEST_CASE("symplectic perp of coordinate subspaces") {
  auto s = SymplecticSpace::standard(2);
  // R^4 = (q1, q2, p1, p2)
  CHECK(same_span(symplectic_perp(Subspace::span(unit_columns(4, {0})), s), unit_columns(4, {0, 1, 3})));
  CHECK(symplectic_perp(Subspace::full(4), s).dim() == 0);
  CHECK(same_span(symplectic_perp(Subspace::span(unit_columns(4, {0, 2})), s), unit_columns(4, {1, 3})));
}

TEST_CASE("exact symplectic perp") {
  QMatrix w(4, 1);
  w(0, 0) = 1;
  QMatrix perp = symplectic_perp_exact(w, standard_omega_exact(2));
  CHECK(perp.cols() == 3);
  CHECK((w.transpose() * standard_omega_exact(2) * perp).is_zero());
}

TEST_CASE("perp dimension and double perp on random subspaces") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 5, k = static_cast<std::size_t>(trial) % (2 * n + 1);
    auto s = SymplecticSpace::standard(n);
    Eigen::MatrixXd cols(2 * n, k);
    for (Eigen::Index i = 0; i < cols.size(); ++i) cols.data()[i] = nd(rng);
    Subspace w = Subspace::span(cols);
    Subspace p = symplectic_perp(w, s);
    CHECK(w.dim() + p.dim() == 2 * n);
    CHECK(subspace_distance(symplectic_perp(p, s), w) <= 1e-9);
  }
}

TEST_CASE("adapted complex structure closed forms") {
  auto s = SymplecticSpace::standard(2);
  auto j = adapted_complex_structure(s, Eigen::MatrixXd::Identity(4, 4));
  CHECK((j.J - s.omega().transpose()).norm() <= 1e-12);

  auto s1 = SymplecticSpace::standard(1);
  Eigen::MatrixXd g(2, 2);
  g << 4, 0, 0, 1;
  auto a = adapted_complex_structure(s1, g);
  Eigen::MatrixXd A(2, 2), J(2, 2);
  A << 0, -0.25, 1, 0;
  J << 0, -0.5, 2, 0;
  CHECK((a.A - A).norm() <= 1e-12);
  CHECK((a.P - 0.5 * Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-12);
  CHECK((a.J - J).norm() <= 1e-12);
  Eigen::MatrixXd oj = s1.omega() * a.J;
  CHECK(oj(0, 0) == doctest::Approx(2.0));
  CHECK(oj(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("adapted complex structure invariants on random metrics") {
  std::mt19937_64 rng(11);
  for (std::size_t n = 1; n <= 6; ++n) {
    auto s = SymplecticSpace::standard(n);
    auto j = adapted_complex_structure(s, testing::random_spd(2 * n, rng));
    auto r = adapted_residuals(j.J, s);
    CHECK(r.square_residual <= 1e-9);
    CHECK(r.symplectic_residual <= 1e-9);
    CHECK(r.min_metric_eigenvalue > 0);
  }
}

TEST_CASE("group-averaged metric gives an equivariant J") {
  // rotation by pi/2 in the (q1, p1) plane and the identity on (q2, p2)
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(4, 4);
  r(0, 0) = r(2, 2) = 0;
  r(0, 2) = 1;
  r(2, 0) = -1;
  std::mt19937_64 rng(3);
  Eigen::MatrixXd g0 = testing::random_spd(4, rng), g = Eigen::MatrixXd::Zero(4, 4), p = Eigen::MatrixXd::Identity(4, 4);
  for (int k = 0; k < 4; ++k, p = r * p) g += p.transpose() * g0 * p;
  auto j = adapted_complex_structure(SymplecticSpace::standard(2), g);
  CHECK((j.J * r - r * j.J).norm() <= 1e-10);
}

TEST_CASE("non positive metric is rejected") {
  Eigen::MatrixXd g = -Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS(adapted_complex_structure(SymplecticSpace::standard(1), g));
}

TEST_CASE("constant rank split corner cases") {
  auto s2 = SymplecticSpace::standard(2);
  auto j2 = adapted_complex_structure(s2, Eigen::MatrixXd::Identity(4, 4));
  auto lag = constant_rank_split(Subspace::span(unit_columns(4, {0, 1})), s2, j2);
  CHECK(lag.nu.dim() == 2);
  CHECK(lag.E.dim() == 0);
  CHECK(lag.N.dim() == 0);
  CHECK(same_span(lag.Jnu, unit_columns(4, {2, 3})));

  auto sym = constant_rank_split(Subspace::span(unit_columns(4, {0, 2})), s2, j2);
  CHECK(sym.nu.dim() == 0);
  CHECK(same_span(sym.E, unit_columns(4, {0, 2})));
  CHECK(same_span(sym.N, unit_columns(4, {1, 3})));

  auto s3 = SymplecticSpace::standard(3);
  auto j3 = adapted_complex_structure(s3, Eigen::MatrixXd::Identity(6, 6));
  // span{q1, q2, p1} in (q1, q2, q3, p1, p2, p3)
  auto mixed = constant_rank_split(Subspace::span(unit_columns(6, {0, 1, 3})), s3, j3);
  CHECK(mixed.nu.dim() == 1);
  CHECK(same_span(mixed.nu, unit_columns(6, {1})));
  CHECK(mixed.E.dim() == 2);
  CHECK(mixed.N.dim() == 2);
  auto gram = gram_block_report(mixed, s3);
  CHECK(gram.forbidden_block_max <= 1e-12);
  CHECK(gram.pairing_min_sv > 0.5);
}

TEST_CASE("gram blocks on random subspaces under random forms") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 4, k = 1 + static_cast<std::size_t>(trial) % (2 * n - 1);
    auto s = SymplecticSpace::standard(n);
    auto j = adapted_complex_structure(s, testing::random_spd(2 * n, rng));
    Eigen::MatrixXd cols(2 * n, k);
    for (Eigen::Index i = 0; i < cols.size(); ++i) cols.data()[i] = nd(rng);
    auto d = constant_rank_split(Subspace::span(cols), s, j);
    CHECK(d.E.dim() + d.N.dim() + 2 * d.nu.dim() == 2 * n);
    CHECK(gram_block_report(d, s).forbidden_block_max <= 1e-9);
  }
}

TEST_CASE("rank ambiguity is reported, not guessed") {
  Eigen::VectorXd sv(2);
  sv << 1.0, 1e-9;
  CHECK_THROWS_AS(numerical_rank(sv), AmbiguityError);
  sv << 1.0, 1e-14;
  CHECK(numerical_rank(sv) == 1);
}

TEST_CASE("kks pairing") {
  StructureTensor abelian(2);
  Eigen::VectorXd a(2), x(2), y(2);
  a << 1, 2;
  x << 3, -1;
  y << 0.5, 4;
  CHECK(kks_pairing(abelian, a, x, y) == 0.0);

  StructureTensor so3(3);
  for (std::size_t i = 0; i < 3; ++i) {
    so3(i, (i + 1) % 3, (i + 2) % 3) = 1;
    so3((i + 1) % 3, i, (i + 2) % 3) = -1;
  }
  Eigen::VectorXd e3 = Eigen::VectorXd::Unit(3, 2);
  CHECK(kks_pairing(so3, e3, Eigen::VectorXd::Unit(3, 0), Eigen::VectorXd::Unit(3, 1)) == doctest::Approx(1.0));

  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd al(3), xi(3), eta(3);
    for (int i = 0; i < 3; ++i) al(i) = nd(rng), xi(i) = nd(rng), eta(i) = nd(rng);
    CHECK(kks_pairing(so3, al, xi, eta) == doctest::Approx(-kks_pairing(so3, al, eta, xi)));
  }
  CHECK(coadjoint_isotropy(so3, e3).dim() == 1);
}

TEST_CASE("orbit tangent null space is the coadjoint isotropy directions") {
  std::vector<Eigen::MatrixXd> gens;
  StructureTensor so3(3);
  for (std::size_t a = 0; a < 3; ++a) {
    const std::size_t b = (a + 1) % 3, c = (a + 2) % 3;
    so3(a, b, c) = 1;
    so3(b, a, c) = -1;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(6, 6);
    x(c, b) = x(3 + c, 3 + b) = 1;
    x(b, c) = x(3 + b, 3 + c) = -1;
    gens.push_back(x);
  }
  Eigen::VectorXd v(6);
  v << 1, 0.3, 0, -0.2, 1.1, 0;
  auto cmp = orbit_null_comparison(gens, so3, SymplecticSpace::standard(3), v);
  CHECK(cmp.orbit_tangent.dim() == 3);
  CHECK(cmp.null_of_form.dim() == 1);
  CHECK(cmp.distance <= 1e-9);
}
