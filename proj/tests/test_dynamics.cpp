#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "symred/builtins.hpp"
#include "symred/dynamics.hpp"
#include "symred/errors.hpp"

using namespace symred;
using namespace symred::dynamics;

namespace {

Poly ph(const std::string& text, std::size_t n) { return parse_poly(text, phase_space_names(n)); }

HamiltonianSystem builtin_system(const std::string& name, const std::string& h = "") {
  auto m = builtin_model(name);
  Poly hp = h.empty() ? *m.hamiltonian : ph(h, m.space.half_dim());
  return {m.space, groups::Group(m.group, m.space), hp};
}

struct Reduced {
  invariants::HilbertMap hilbert;
  invariants::PoissonStructure lambda;
};

Reduced reduced_data(const HamiltonianSystem& sys) {
  auto h = invariants::invariant_generators(sys.group());
  return {h, invariants::reduced_structure_matrix(h, sys.space())};
}

}  // namespace

TEST_CASE("harmonic oscillator period") {
  auto sys = builtin_system("z2_cone", "1/2*q1^2 + 1/2*p1^2");
  const double period = 2 * std::numbers::pi, dt = period / 6283;
  Eigen::Vector2d v0(0.8, -0.3);
  auto tr = integrate_full(sys, v0, period, dt);
  CHECK(tr.halvings == 0);
  CHECK(tr.times.back() == doctest::Approx(period));
  CHECK((tr.states.back() - v0).norm() <= 1e-6);
  // quarter period: (q, p) rotates clockwise in the (q1, p1) plane
  const std::size_t quarter = 6283 / 4;
  const double t = tr.times[quarter];
  Eigen::Vector2d exact(0.8 * std::cos(t) - 0.3 * std::sin(t), -0.3 * std::cos(t) - 0.8 * std::sin(t));
  CHECK((tr.states[quarter] - exact).norm() <= 1e-9);
  CHECK(tr.max_energy_drift() <= 1e-10);
}

TEST_CASE("constant Hamiltonian is stationary") {
  auto sys = builtin_system("z2_cone", "3");
  Eigen::Vector2d v0(0.2, 0.1);
  auto tr = integrate_full(sys, v0, 1.0, 1e-2);
  for (const auto& s : tr.states) CHECK(s == v0);
  Reduced r = reduced_data(sys);
  auto red = integrate_reduced(r.lambda, Poly::constant(3, 5), r.hilbert.evaluate(v0), 1.0, 1e-2);
  for (const auto& s : red.states) CHECK(s == red.states.front());
}

TEST_CASE("non-invariant Hamiltonian is rejected") {
  auto m = builtin_model("z2_cone");
  CHECK_THROWS_AS(HamiltonianSystem(m.space, groups::Group(m.group, m.space), ph("q1^3 + p1^2", 1)), PreconditionError);
  auto c = builtin_model("circle_1_-1");
  CHECK_THROWS_AS(HamiltonianSystem(c.space, groups::Group(c.group, c.space), ph("q1^2", 2)), PreconditionError);
}

TEST_CASE("noether conservation") {
  auto circle = builtin_system("circle_1_-1");
  Eigen::Vector4d v0(0.3, 0.5, 0.7, -0.2);
  auto tr = integrate_full(circle, v0, 10, 1e-3);
  CHECK(check_noether(tr, circle.momentum()) <= 1e-10);

  auto z2 = builtin_system("z2_cone");
  CHECK(check_noether(integrate_full(z2, Eigen::Vector2d(1, 0), 1, 1e-3), z2.momentum()) == 0.0);

  auto m = builtin_model("so3_central_force");
  HamiltonianSystem cf(m.space, groups::Group(m.group, m.space), central_force(3));
  Eigen::VectorXd w(6);
  w << 1, 0.2, -0.4, 0.1, 0.9, 0.3;
  auto tc = integrate_full(cf, w, 10, 1e-3);
  CHECK(check_noether(tc, cf.momentum()) <= 1e-8);
}

TEST_CASE("black-box central force matches its polynomial form") {
  auto m = builtin_model("so3_central_force");
  groups::Group g(m.group, m.space);
  HamiltonianSystem bb(m.space, g, central_force(3));
  HamiltonianSystem poly(m.space, g, *m.hamiltonian);
  Eigen::VectorXd w(6);
  w << 1, 0.2, -0.4, 0.1, 0.9, 0.3;
  CHECK(bb.energy(w) == doctest::Approx(poly.energy(w)));
  CHECK((bb.vector_field(w) - poly.vector_field(w)).norm() <= 1e-12);
  CHECK_FALSE(bb.is_polynomial());
}

TEST_CASE("stratum preservation") {
  auto circle = builtin_system("circle_1_-1");
  auto at_origin = integrate_full(circle, Eigen::Vector4d::Zero(), 2, 1e-3);
  CHECK(at_origin.max_stratum_distance() == 0.0);
  for (const auto& s : at_origin.states) CHECK(s.norm() == 0.0);

  auto z2 = builtin_system("z2_cone");
  CHECK(check_stratum_preservation(integrate_full(z2, Eigen::Vector2d::Zero(), 1, 1e-3), z2.group()) == 0.0);

  auto klein = builtin_system("klein_r4");
  // fixed space of the first factor: the (q2, p2) plane
  Eigen::Vector4d v0(0, 0.6, 0, -0.3);
  auto tr = integrate_full(klein, v0, 10, 1e-3);
  CHECK(tr.max_stratum_distance() <= 1e-9);
  CHECK(check_stratum_preservation(tr, klein.group()) <= 1e-9);
}

TEST_CASE("reduced equations on the cone") {
  auto sys = builtin_system("z2_cone");
  Reduced r = reduced_data(sys);
  Poly hred = invariants::express_in_generators(*sys.polynomial(), r.hilbert);
  // y' = Lambda grad h_red with h_red = u + w
  Eigen::Vector3d y(0.36, -0.48, 0.64);
  Eigen::MatrixXd lam = r.lambda.evaluate(y);
  Eigen::Vector3d grad(1, 0, 1), rate = lam * grad;
  CHECK(rate(0) == doctest::Approx(4 * y(1)));
  CHECK(rate(1) == doctest::Approx(2 * (y(2) - y(0))));
  CHECK(rate(2) == doctest::Approx(-4 * y(1)));

  // period pi on the quotient
  const double dt = std::numbers::pi / 3142;
  auto tr = integrate_reduced(r.lambda, hred, y, std::numbers::pi, dt);
  CHECK((tr.states.back() - Eigen::VectorXd(y)).norm() <= 1e-8);
  CHECK(tr.max_energy_drift() <= 1e-10);
}

TEST_CASE("reduced linear flow of the circle") {
  auto c = builtin_model("circle_1_-1");
  groups::Group g(c.group, c.space);
  auto h = invariants::invariant_generators(g);
  auto lam = invariants::reduced_structure_matrix(h, c.space);
  // y3 generates a linear flow: each entry of Lambda(y) grad y3 is linear in y
  Eigen::MatrixXd a(4, 4);
  for (int j = 0; j < 4; ++j) a.col(j) = lam.evaluate(Eigen::VectorXd::Unit(4, j)).col(2);
  Eigen::Vector4d y(0.2, -0.1, 0.5, 0.3);
  CHECK((lam.evaluate(y).col(2) - a * y).norm() <= 1e-14);
  CHECK(a.col(2).norm() == 0.0);
}

TEST_CASE("twin experiment") {
  auto sys = builtin_system("z2_cone");
  Reduced r = reduced_data(sys);
  auto tw = compare_full_vs_reduced(sys, r.hilbert, r.lambda, Eigen::Vector2d(0.6, -0.8), 5, 1e-3);
  CHECK(tw.max_deviation <= 1e-7);
  auto order = twin_order_test(sys, r.hilbert, r.lambda, Eigen::Vector2d(0.6, -0.8), 5, 1e-2);
  CHECK(order.ratio >= 12);
  CHECK(order.ratio <= 20);

  auto still = compare_full_vs_reduced(sys, r.hilbert, r.lambda, Eigen::Vector2d::Zero(), 1, 1e-3);
  CHECK(still.max_deviation == 0.0);

  auto circle = builtin_system("circle_1_-1");
  Reduced rc = reduced_data(circle);
  auto tc = compare_full_vs_reduced(circle, rc.hilbert, rc.lambda, Eigen::Vector4d(0.3, 0.5, 0.7, -0.2), 5, 1e-3);
  CHECK(tc.max_deviation <= 1e-7);
  CHECK(hamilton_residual(tc.full, rc.hilbert, rc.lambda, tc.reduced_hamiltonian) <= 1e-5);
}

TEST_CASE("reduced return test") {
  auto sys = builtin_system("klein_r4");
  Reduced r = reduced_data(sys);
  Poly hred = invariants::express_in_generators(*sys.polynomial(), r.hilbert);
  Eigen::Vector4d v0(0.4, 0.3, -0.2, 0.5);
  auto ret = reduced_return_test(r.lambda, hred, r.hilbert.evaluate(v0), 5, 1e-3);
  CHECK(ret.within_bound);
}

TEST_CASE("hilbert map separates orbits") {
  auto k = builtin_model("klein_r4");
  groups::Group g(k.group, k.space);
  auto rep = separation_check(g.finite(), invariants::invariant_generators(g), 200, 3);
  CHECK(rep.pairs > 0);
  CHECK(rep.same_orbit_pairs > 0);
  CHECK(rep.violations == 0);
}

TEST_CASE("cross section of the central force") {
  Eigen::VectorXd v0(6);
  v0 << 1, 0.3, 0, -0.2, 1.1, 0;
  auto r = cross_section_scenario({0.5, 5.0}, v0, 20, 1e-3);
  CHECK(r.max_out_of_plane <= 1e-9);
  CHECK(r.max_magnitude_drift <= 1e-8);
  CHECK(r.stays_in_section);

  auto circ = cross_section_scenario({0.1, 10.0}, circular_orbit_state(1.0), 10, 1e-3);
  REQUIRE(circ.period);
  CHECK(std::abs(*circ.period - circular_orbit_period()) <= 1e-5 * circular_orbit_period());
  CHECK(circ.max_magnitude_drift <= 1e-8);

  // ell = sqrt(2) sits on the boundary
  CHECK_THROWS_AS(cross_section_scenario({std::sqrt(2.0), 3.0}, circular_orbit_state(1.0), 1, 1e-3), PreconditionError);
  Eigen::VectorXd tilted(6);
  tilted << 1, 0, 0, 0, 1, 1;
  CHECK_THROWS_AS(cross_section_scenario({0.1, 10.0}, tilted, 1, 1e-3), PreconditionError);
}

TEST_CASE("trajectory csv") {
  auto sys = builtin_system("circle_1_-1");
  auto tr = integrate_full(sys, Eigen::Vector4d(0.3, 0.5, 0.7, -0.2), 0.01, 1e-3);
  std::istringstream in(to_csv(tr));
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x1,x2,x3,x4,h,F1,stratum_dist");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == tr.states.size());
}
