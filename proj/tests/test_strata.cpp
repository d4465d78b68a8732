#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "symred/builtins.hpp"
#include "symred/strata.hpp"

using namespace symred;
using namespace symred::strata;

namespace {

struct Setup {
  Model model;
  groups::Group group;
  groups::MomentumMap momentum;
  explicit Setup(const std::string& name)
      : model(builtin_model(name)), group(model.group, model.space), momentum(groups::momentum_map(group, model.space)) {}
};

std::vector<std::size_t> dims(const Stratification& st) {
  std::vector<std::size_t> d;
  for (const auto& s : st.strata) d.push_back(s.stratum_dim);
  std::sort(d.begin(), d.end());
  return d;
}

QMatrix diag(std::initializer_list<int> d) {
  QMatrix m(d.size(), d.size());
  std::size_t i = 0;
  for (int x : d) m(i, i) = x, ++i;
  return m;
}

}  // namespace

TEST_CASE("zero level sampler") {
  Setup z2("z2_cone");
  auto a = zero_level_sampler(z2.momentum, 50, 1.5, 4);
  CHECK(a.points.size() == 50);
  CHECK(a.shortfall == 0);
  for (const auto& p : a.points) CHECK(p.norm() <= 1.5);

  Setup circle("circle_1_-1");
  auto b = zero_level_sampler(circle.momentum, 50, 1.0, 4);
  CHECK(b.points.size() + b.shortfall == 50);
  CHECK(b.points.size() >= 45);
  for (const auto& p : b.points) {
    const double z1 = std::hypot(p(0), p(2)), z2m = std::hypot(p(1), p(3));
    CHECK(std::abs(z1 - z2m) <= 1e-12);
    CHECK(p.norm() <= 1.0 + 1e-12);
  }

  Setup so3("so3_central_force");
  auto c = zero_level_sampler(so3.momentum, 30, 1.0, 4);
  CHECK(c.points.size() >= 25);
  for (const auto& p : c.points) {
    Eigen::Vector3d q = p.head<3>(), m = p.tail<3>();
    CHECK(q.cross(m).norm() <= 1e-12);
  }

  auto again = zero_level_sampler(circle.momentum, 50, 1.0, 4);
  REQUIRE(again.points.size() == b.points.size());
  for (std::size_t i = 0; i < b.points.size(); ++i) CHECK(again.points[i] == b.points[i]);
}

TEST_CASE("positive support vectors") {
  std::vector<IntVector> cols{{1}, {-1}};
  auto r = positive_support_vector(cols, {0, 1});
  REQUIRE(r);
  CHECK((*r)[0] > 0);
  CHECK((*r)[0] == (*r)[1]);
  CHECK_FALSE(positive_support_vector(cols, {0}));
  std::vector<IntVector> same{{1}, {1}};
  CHECK_FALSE(positive_support_vector(same, {0, 1}));
}

TEST_CASE("strata of the builtins") {
  Setup z2("z2_cone");
  auto a = enumerate_strata(z2.group, z2.model.space, z2.momentum);
  CHECK(dims(a) == std::vector<std::size_t>{0, 2});
  CHECK(a.strata[0].stratum_dim == 0);
  CHECK(a.below[0][1]);
  CHECK_FALSE(a.below[1][0]);

  Setup circle("circle_1_-1");
  auto b = enumerate_strata(circle.group, circle.model.space, circle.momentum);
  CHECK(dims(b) == std::vector<std::size_t>{0, 2});
  CHECK(b.strata[0].fixed_dim == 0);

  Setup klein("klein_r4");
  auto c = enumerate_strata(klein.group, klein.model.space, klein.momentum);
  CHECK(c.classes.size() == 5);
  CHECK(std::count_if(c.classes.begin(), c.classes.end(), [](const ClassInfo& x) { return x.realized; }) == 4);
  CHECK(dims(c) == std::vector<std::size_t>{0, 2, 2, 4});
  // two middle strata are incomparable, both above the origin and below the principal stratum
  CHECK(c.hasse.size() == 4);
  for (const auto& s : c.strata) CHECK(s.fixed_space.cols() == s.fixed_dim);
}

TEST_CASE("strata are unchanged by a random symplectic change of coordinates") {
  std::mt19937_64 rng(21);
  QMatrix swap(4, 4);
  swap(0, 1) = swap(1, 0) = swap(2, 3) = swap(3, 2) = 1;
  const std::vector<groups::FiniteMatrixGroup> specs{
      {{diag({-1, -1, -1, -1})}},
      {{diag({-1, 1, -1, 1}), diag({1, -1, 1, -1})}},
      {{swap, diag({-1, 1, -1, 1})}},
  };
  auto space = symplin::SymplecticSpace::standard(2);
  for (const auto& spec : specs) {
    groups::Group g(spec, space);
    auto f = groups::momentum_map(g, space);
    auto base = enumerate_strata(g, space, f);
    for (int trial = 0; trial < 3; ++trial) {
      QMatrix s = testing::random_rational_symplectic(2, rng), si = inverse(s);
      groups::FiniteMatrixGroup conj;
      for (const auto& x : spec.generators) conj.generators.push_back(s * x * si);
      groups::Group gc(conj, space);
      auto st = enumerate_strata(gc, space, groups::momentum_map(gc, space));
      CHECK(dims(st) == dims(base));
      CHECK(st.classes.size() == base.classes.size());
      CHECK(st.hasse.size() == base.hasse.size());
    }
  }
}

TEST_CASE("frontier condition holds") {
  for (const char* name : {"z2_cone", "circle_1_-1", "klein_r4"}) {
    Setup m(name);
    auto st = enumerate_strata(m.group, m.model.space, m.momentum);
    auto fr = frontier_diagnostic(m.group, st, 3);
    CHECK_MESSAGE(fr.failures == 0, name);
    CHECK(fr.pairs_checked >= st.hasse.size());
  }
}

TEST_CASE("slice models") {
  Setup z2("z2_cone");
  Eigen::Vector2d x(0.4, -0.3);
  auto a = slice_model(x, z2.group, z2.model.space, z2.momentum);
  CHECK(a.slice.dim() == 2);
  CHECK(a.orbit_dim == 0);

  Setup circle("circle_1_-1");
  Eigen::Vector4d y(1, 1, 0, 0);
  y /= std::sqrt(2.0);
  auto b = slice_model(y, circle.group, circle.model.space, circle.momentum);
  CHECK(b.orbit_dim == 1);
  CHECK(b.nu_dim == 1);
  CHECK(b.slice.dim() == 2);
  CHECK(b.isotropy_algebra_dim == 0);
  CHECK(b.trivial_part_dim() == 2);

  Setup so3("so3_central_force");
  Eigen::VectorXd z(6);
  z << 0.3, 0.6, 0.6, 0.15, 0.3, 0.3;
  auto c = slice_model(z, so3.group, so3.model.space, so3.momentum);
  CHECK(c.isotropy_algebra_dim == 1);
  CHECK(c.orbit_dim == 2);
  CHECK(c.nu_dim == 2);
  CHECK(c.slice.dim() == 6 - c.orbit_dim - c.nu_dim);
  CHECK(c.trivial_part_dim() == 2);
  CHECK_THROWS(slice_model(Eigen::VectorXd::Unit(6, 0) + Eigen::VectorXd::Unit(6, 4), so3.group, so3.model.space,
                           so3.momentum));
}

TEST_CASE("local models match the global stratification") {
  Setup z2("z2_cone");
  auto sz = enumerate_strata(z2.group, z2.model.space, z2.momentum);
  CHECK(local_model_match(Eigen::Vector2d::Zero(), z2.group, z2.model.space, z2.momentum, &sz).match);
  CHECK(local_model_match(Eigen::Vector2d(1, 2), z2.group, z2.model.space, z2.momentum, &sz).match);

  Setup circle("circle_1_-1");
  auto sc = enumerate_strata(circle.group, circle.model.space, circle.momentum);
  Eigen::Vector4d y(0.6, 0.6, 0, 0);
  auto r = local_model_match(y, circle.group, circle.model.space, circle.momentum, &sc);
  CHECK(r.match);
  REQUIRE(r.slice_side.size() == 1);
  CHECK(r.slice_side[0].second == 2);
  CHECK(local_model_match(Eigen::Vector4d::Zero(), circle.group, circle.model.space, circle.momentum, &sc).match);

  Setup klein("klein_r4");
  auto sk = enumerate_strata(klein.group, klein.model.space, klein.momentum);
  for (auto& p : zero_level_sampler(klein.momentum, 5, 1.0, 8).points)
    CHECK(local_model_match(p, klein.group, klein.model.space, klein.momentum, &sk).match);
  CHECK(local_model_match(Eigen::Vector4d(0, 1, 0, 0), klein.group, klein.model.space, klein.momentum, &sk).match);
}

TEST_CASE("per-stratum reduction") {
  Setup klein("klein_r4");
  auto st = enumerate_strata(klein.group, klein.model.space, klein.momentum);
  bool saw_factor = false;
  for (std::size_t i = 0; i < st.strata.size(); ++i) {
    auto m = mwm_stratum(klein.group, klein.model.space, klein.momentum, st, i, 1);
    CHECK(m.matches_stratum);
    CHECK(m.free_action);
    CHECK(m.reduced_dim == st.strata[i].stratum_dim);
    if (st.strata[i].fixed_dim == 2) {
      saw_factor = true;
      CHECK(m.normalizer_order == 4);
      CHECK(m.reduced_dim == 2);
    }
  }
  CHECK(saw_factor);

  Setup z2("z2_cone");
  auto sz = enumerate_strata(z2.group, z2.model.space, z2.momentum);
  CHECK(mwm_stratum(z2.group, z2.model.space, z2.momentum, sz, 0, 1).reduced_dim == 0);
  CHECK(mwm_stratum(z2.group, z2.model.space, z2.momentum, sz, 1, 1).reduced_dim == 2);

  Setup circle("circle_1_-1");
  auto sc = enumerate_strata(circle.group, circle.model.space, circle.momentum);
  for (std::size_t i = 0; i < sc.strata.size(); ++i)
    CHECK(mwm_stratum(circle.group, circle.model.space, circle.momentum, sc, i, 1).matches_stratum);
}

TEST_CASE("abelian model level set") {
  Setup circle("circle_1_-1");
  auto cone = slice_model(Eigen::Vector4d::Zero(), circle.group, circle.model.space, circle.momentum);
  auto r = abelian_model_level_set(circle.group, cone, circle.model.space, 10000, 5);
  CHECK(r.samples == 10000);
  CHECK(r.counterexamples == 0);
  CHECK(r.shifted_zero_section_hits == 0);
  CHECK(r.max_lambda <= 1e-10);

  Eigen::Vector4d y(0.5, 0.5, 0, 0);
  auto principal = slice_model(y, circle.group, circle.model.space, circle.momentum);
  auto p = abelian_model_level_set(circle.group, principal, circle.model.space, 500, 5);
  CHECK(p.counterexamples == 0);
  CHECK(p.max_slice_momentum == 0.0);
}

TEST_CASE("stratification json") {
  Setup z2("z2_cone");
  auto j = to_json(enumerate_strata(z2.group, z2.model.space, z2.momentum));
  CHECK(j["strata"].size() == 2);
  CHECK(j.contains("hasse"));
  CHECK(j.contains("classes"));
}
