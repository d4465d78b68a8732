#include "symred/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "symred/dynamics.hpp"
#include "symred/errors.hpp"
#include "symred/groups.hpp"
#include "symred/invariants.hpp"
#include "symred/strata.hpp"
#include "symred/symplin.hpp"

namespace symred::verify {

namespace {

using Clock = std::chrono::steady_clock;

struct Loaded {
  Model model;
  groups::Group group;
  groups::MomentumMap momentum;
};

Loaded load(const std::string& name) {
  Model m = builtin_model(name);
  groups::Group g(m.group, m.space);
  auto f = groups::momentum_map(g, m.space);
  return {std::move(m), std::move(g), std::move(f)};
}

Check at_most(std::string name, double value, double tol, std::string note = {}) {
  return {std::move(name), std::isfinite(value) && value <= tol, value, tol, std::move(note)};
}

Check at_least(std::string name, double value, double tol, std::string note = {}) {
  return {std::move(name), std::isfinite(value) && value >= tol, value, tol, std::move(note)};
}

Check holds(std::string name, bool ok, std::string note = {}) {
  return {std::move(name), ok, ok ? 1.0 : 0.0, 0.0, std::move(note)};
}

Check equals(std::string name, double value, double expected, std::string note = {}) {
  return {std::move(name), value == expected, value, expected, std::move(note)};
}

Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal(rng);
  return m;
}

Eigen::MatrixXd standard_omega(Eigen::Index n) {
  Eigen::MatrixXd o = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  o.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  o.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return o;
}

// A random nonstandard form P^T Omega P together with P.
std::pair<symplin::SymplecticSpace, Eigen::MatrixXd> random_form(std::mt19937_64& rng, Eigen::Index n) {
  const Eigen::Index d = 2 * n;
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d, d) + 0.3 / std::sqrt(static_cast<double>(d)) * gaussian(rng, d, d);
  Eigen::MatrixXd o = p.transpose() * standard_omega(n) * p;
  o = 0.5 * (o - o.transpose()).eval();
  return {symplin::SymplecticSpace::from_matrix(o), p};
}

Eigen::MatrixXd random_metric(std::mt19937_64& rng, Eigen::Index d) {
  Eigen::MatrixXd a = gaussian(rng, d, d);
  return a.transpose() * a / static_cast<double>(d) + 0.5 * Eigen::MatrixXd::Identity(d, d);
}

Eigen::MatrixXd coordinate_span(Eigen::Index d, std::initializer_list<Eigen::Index> idx) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, static_cast<Eigen::Index>(idx.size()));
  Eigen::Index c = 0;
  for (auto i : idx) b(i, c++) = 1.0;
  return b;
}

Poly parse_y(const std::string& text, std::size_t m) { return parse_poly(text, generator_names(m)); }

bool proportional(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  const auto& [mono, cb] = *b.terms().begin();
  Rational ca = a.coefficient(mono);
  if (ca == 0) return false;
  return Rational(cb / ca) * a == b;
}

std::vector<Eigen::VectorXd> base_points(const Loaded& l, const strata::Stratification* st, std::size_t count,
                                         std::uint64_t seed) {
  std::vector<Eigen::VectorXd> pts;
  if (st) {
    for (std::size_t i = 0; i < st->strata.size(); ++i) {
      Eigen::VectorXd x = strata::stratum_point(l.group, st->strata[i], seed + i);
      if (x.norm() > 0) x /= x.norm();
      pts.push_back(x);
    }
  } else {
    pts.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(l.model.space.dim())));
  }
  auto s = strata::zero_level_sampler(l.momentum, count > pts.size() ? count - pts.size() : 0, 1.0, seed);
  for (auto& x : s.points) pts.push_back(x);
  return pts;
}

std::optional<strata::Stratification> stratify(const Loaded& l) {
  if (l.group.is_algebra()) return std::nullopt;
  return strata::enumerate_strata(l.group, l.model.space, l.momentum);
}

// ---- criteria --------------------------------------------------------------

std::vector<Check> adapted_j(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double sq = 0.0, sy = 0.0, min_eig = INFINITY;
  for (int i = 0; i < 200; ++i) {
    const Eigen::Index n = 1 + i % 10;
    auto [s, p] = random_form(rng, n);
    auto j = symplin::adapted_complex_structure(s, random_metric(rng, 2 * n));
    auto r = symplin::adapted_residuals(j.J, s);
    sq = std::max(sq, r.square_residual);
    sy = std::max(sy, r.symplectic_residual);
    min_eig = std::min(min_eig, r.min_metric_eigenvalue);
  }
  std::vector<Check> out{at_most("square_residual", sq, 1e-9, "max |J^2+I|/|J|^2 over 200 pairs"),
                         at_most("symplectic_residual", sy, 1e-9, "max |J^T W J - W|/|W| over 200 pairs"),
                         {"metric_positive", min_eig > 0.0, min_eig, 0.0, "min eigenvalue of sym(W J)"}};

  auto s3 = symplin::SymplecticSpace::standard(3);
  auto j3 = symplin::adapted_complex_structure(s3, Eigen::MatrixXd::Identity(6, 6));
  out.push_back(at_most("identity_metric_closed_form", (j3.J - standard_omega(3).transpose()).cwiseAbs().maxCoeff(),
                        1e-12, "J = W^T for g = I"));
  auto s1 = symplin::SymplecticSpace::standard(1);
  Eigen::MatrixXd g(2, 2);
  g << 4, 0, 0, 1;
  auto j1 = symplin::adapted_complex_structure(s1, g);
  Eigen::MatrixXd ej(2, 2), ea(2, 2);
  ej << 0, -0.5, 2, 0;
  ea << 0, -0.25, 1, 0;
  const double err = std::max({(j1.J - ej).cwiseAbs().maxCoeff(), (j1.A - ea).cwiseAbs().maxCoeff(),
                               (j1.P - 0.5 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff()});
  out.push_back(at_most("diagonal_metric_closed_form", err, 1e-12, "g = diag(4,1): A, P = I/2, J = [[0,-1/2],[2,0]]"));
  return out;
}

std::vector<Check> constant_rank(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double forbidden = 0.0, pairing = INFINITY, e_sv = INFINITY, n_sv = INFINITY;
  std::size_t dim_mismatch = 0;
  for (int i = 0; i < 200; ++i) {
    const Eigen::Index n = 1 + i % 6, d = 2 * n;
    std::uniform_int_distribution<Eigen::Index> pick_a(0, n);
    const Eigen::Index a = pick_a(rng);
    std::uniform_int_distribution<Eigen::Index> pick_b(0, n - a);
    const Eigen::Index b = pick_b(rng);
    if (a + b == 0) continue;
    auto [s, p] = random_form(rng, n);
    Eigen::MatrixXd sym = gaussian(rng, d, d);
    sym = 0.25 * (sym + sym.transpose()).eval();
    Eigen::MatrixXd m = (standard_omega(n) * sym).exp();
    Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(d, 2 * a + b);
    for (Eigen::Index c = 0; c < a; ++c) {
      cols(c, 2 * c) = 1.0;
      cols(n + c, 2 * c + 1) = 1.0;
    }
    for (Eigen::Index c = 0; c < b; ++c) cols(a + c, 2 * a + c) = 1.0;
    Eigen::MatrixXd mix = gaussian(rng, 2 * a + b, 2 * a + b) + 3.0 * Eigen::MatrixXd::Identity(2 * a + b, 2 * a + b);
    Eigen::MatrixXd basis = p.inverse() * m * cols * mix;
    auto w = symplin::Subspace::from_basis(basis);
    auto j = symplin::adapted_complex_structure(s, random_metric(rng, d));
    auto split = symplin::constant_rank_split(w, s, j);
    auto rep = symplin::gram_block_report(split, s);
    forbidden = std::max(forbidden, rep.forbidden_block_max);
    if (b > 0) pairing = std::min(pairing, rep.pairing_min_sv);
    if (a > 0) e_sv = std::min(e_sv, rep.e_min_sv);
    if (split.N.dim() > 0) n_sv = std::min(n_sv, rep.n_min_sv);
    if (split.nu.dim() != static_cast<std::size_t>(b) || split.E.dim() != static_cast<std::size_t>(2 * a) ||
        split.N.dim() != static_cast<std::size_t>(d - 2 * a - 2 * b) || split.Jnu.dim() != static_cast<std::size_t>(b))
      ++dim_mismatch;
  }
  std::vector<Check> out{at_most("forbidden_blocks", forbidden, 1e-9, "largest Gram entry outside the allowed blocks"),
                         at_least("nu_pairing_min_sv", pairing, 1e-9),
                         at_least("E_min_sv", e_sv, 1e-9),
                         at_least("N_min_sv", n_sv, 1e-9),
                         equals("dimension_mismatches", static_cast<double>(dim_mismatch), 0.0)};

  auto s2 = symplin::SymplecticSpace::standard(2);
  auto j2 = symplin::adapted_complex_structure(s2, Eigen::MatrixXd::Identity(4, 4));
  auto lag = symplin::constant_rank_split(symplin::Subspace::from_basis(coordinate_span(4, {0, 1})), s2, j2);
  const bool lag_ok = lag.nu.dim() == 2 && lag.E.dim() == 0 && lag.N.dim() == 0 &&
                      symplin::subspace_distance(lag.Jnu, symplin::Subspace::from_basis(coordinate_span(4, {2, 3}))) == 0.0;
  out.push_back(holds("lagrangian_corner", lag_ok, "span{q1,q2}: nu = W, E = N = 0, J nu = span{p1,p2}"));
  auto sym = constant_rank_split(symplin::Subspace::from_basis(coordinate_span(4, {0, 2})), s2, j2);
  const bool sym_ok = sym.nu.dim() == 0 && sym.Jnu.dim() == 0 &&
                      symplin::subspace_distance(sym.E, symplin::Subspace::from_basis(coordinate_span(4, {0, 2}))) == 0.0 &&
                      symplin::subspace_distance(sym.N, symplin::Subspace::from_basis(coordinate_span(4, {1, 3}))) == 0.0;
  out.push_back(holds("symplectic_corner", sym_ok, "span{q1,p1}: nu = 0, E = W, N = span{q2,p2}"));
  auto s3 = symplin::SymplecticSpace::standard(3);
  auto j3 = symplin::adapted_complex_structure(s3, Eigen::MatrixXd::Identity(6, 6));
  auto mixed = constant_rank_split(symplin::Subspace::from_basis(coordinate_span(6, {0, 1, 3})), s3, j3);
  const bool mixed_ok = mixed.nu.dim() == 1 && mixed.E.dim() == 2 && mixed.N.dim() == 2 &&
                        symplin::subspace_distance(mixed.nu, symplin::Subspace::from_basis(coordinate_span(6, {1}))) == 0.0;
  out.push_back(holds("mixed_corner", mixed_ok, "span{q1,q2,p1}: nu = span{q2}, dim E = dim N = 2"));
  return out;
}

std::vector<Check> equivariance(std::uint64_t) {
  std::vector<Check> out;
  for (std::string name : {"circle_1_-1", "so3_central_force"}) {
    auto l = load(name);
    auto table = groups::check_equivariance(l.momentum, l.group.structure(), l.model.space);
    std::size_t nonzero = 0;
    for (const auto& p : table)
      if (!p.is_zero()) ++nonzero;
    out.push_back(equals(name + ":nonzero_residuals", static_cast<double>(nonzero), 0.0,
                         "{F_a,F_b} - F_[a,b] as exact polynomials"));
  }
  return out;
}

std::vector<Check> generators(std::uint64_t) {
  std::vector<Check> out;
  auto same_set = [](std::vector<Poly> a, std::vector<Poly> b) {
    auto key = [](const Poly& p) { return to_json(p).dump(); };
    std::vector<std::string> ka, kb;
    for (auto& p : a) ka.push_back(key(p));
    for (auto& p : b) kb.push_back(key(p));
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    return ka == kb;
  };
  {
    auto l = load("z2_cone");
    auto h = invariants::invariant_generators(l.group);
    auto names = phase_space_names(1);
    out.push_back(holds("z2_cone:generators",
                        same_set(h.generators, {parse_poly("q1^2", names), parse_poly("q1*p1", names),
                                                parse_poly("p1^2", names)}),
                        "{x^2, xy, y^2}"));
  }
  {
    auto l = load("circle_1_-1");
    auto h = invariants::invariant_generators(l.group);
    auto names = phase_space_names(2);
    std::vector<Poly> expected{parse_poly("q1^2 + p1^2", names), parse_poly("q2^2 + p2^2", names),
                               parse_poly("q1*q2 - p1*p2", names), parse_poly("q1*p2 + p1*q2", names)};
    out.push_back(holds("circle_1_-1:generators", same_set(h.generators, expected), "four quadratics"));
    // the relation is stated in the order s1..s4 above; map it through the computed ordering
    std::vector<Poly> subst;
    for (const auto& e : expected) {
      auto it = std::find(h.generators.begin(), h.generators.end(), e);
      subst.push_back(it == h.generators.end() ? Poly(h.size())
                                               : Poly::variable(h.size(), static_cast<std::size_t>(it - h.generators.begin())));
    }
    Poly relation = parse_y("y3^2 + y4^2 - y1*y2", 4).substitute(subst);
    bool found = false;
    for (const auto& r : h.relations) found = found || proportional(r, relation);
    out.push_back(holds("circle_1_-1:relation", found, "s3^2 + s4^2 = s1 s2 among the reported relations"));
  }
  for (std::string name : {"z2_cone", "klein_r4"}) {
    auto l = load(name);
    auto h = invariants::invariant_generators(l.group, 8);
    std::size_t mismatches = 0;
    for (int d = 1; d <= 8; ++d) {
      const auto expected = invariants::molien_dimension(l.group.finite(), d);
      auto it = std::find_if(h.counts.begin(), h.counts.end(), [d](const auto& c) { return c.degree == d; });
      if (it == h.counts.end() || mpz_class(static_cast<unsigned long>(it->invariant_dim)) != expected ||
          mpz_class(static_cast<unsigned long>(it->product_dim)) != expected)
        ++mismatches;
    }
    out.push_back(equals(name + ":molien_mismatches_to_degree_8", static_cast<double>(mismatches), 0.0,
                         "invariant and generated dimensions equal the Molien coefficient"));
  }
  return out;
}

std::vector<Check> poisson_structure(std::uint64_t) {
  std::vector<Check> out;
  {
    auto l = load("z2_cone");
    auto h = invariants::invariant_generators(l.group);
    auto lambda = invariants::reduced_structure_matrix(h, l.model.space);
    const char* expected[3][3] = {{"0", "2*y1", "4*y2"}, {"-2*y1", "0", "2*y3"}, {"-4*y2", "-2*y3", "0"}};
    bool ok = lambda.m == 3 && to_string(h.generators[0], phase_space_names(1)) == "q1^2" &&
              to_string(h.generators[1], phase_space_names(1)) == "q1*p1" &&
              to_string(h.generators[2], phase_space_names(1)) == "p1^2";
    for (std::size_t i = 0; ok && i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) ok = ok && lambda(i, j) == parse_y(expected[i][j], 3);
    out.push_back(holds("z2_cone:lambda", ok, "[[0,2u,4v],[-2u,0,2w],[-4v,-2w,0]] with (u,v,w) = (x^2,xy,y^2)"));
  }
  for (const auto& name : builtin_names()) {
    auto l = load(name);
    auto h = invariants::invariant_generators(l.group);
    auto lambda = invariants::reduced_structure_matrix(h, l.model.space);
    auto c = invariants::check_structure(h, lambda, l.group, l.momentum, l.model.space);
    out.push_back(holds(name + ":antisymmetric", c.antisymmetric));
    out.push_back(holds(name + ":jacobi", c.jacobi_exact, "cyclic sum after y = p(v)"));
    out.push_back(holds(name + ":substitution", c.substitution_exact, "Lambda(p(v)) = {p_i,p_j}(v)"));
    out.push_back(holds(name + ":noether", c.noether_exact, "{p_i, F_a} = 0"));
  }
  return out;
}

std::vector<Check> norm_squared(std::uint64_t) {
  auto l = load("circle_1_-1");
  auto h = invariants::invariant_generators(l.group);
  Poly f = invariants::express_in_generators(l.momentum.norm_squared(), h);
  // generator order: s1 = |z1|^2, s2 = |z2|^2 first
  const bool ok = f == parse_y("1/4*(y1 - y2)^2", h.size());
  return {holds("circle_1_-1:norm_squared", ok, "|F|^2 = " + to_string(f, generator_names(h.size())))};
}

std::vector<Check> stratification(std::uint64_t seed) {
  std::vector<Check> out;
  struct Expect {
    const char* name;
    std::vector<std::size_t> dims;
    std::size_t classes;
  };
  for (const Expect& e : {Expect{"z2_cone", {0, 2}, 2}, Expect{"circle_1_-1", {0, 2}, 2}, Expect{"klein_r4", {0, 2, 2, 4}, 5}}) {
    auto l = load(e.name);
    auto st = strata::enumerate_strata(l.group, l.model.space, l.momentum);
    std::vector<std::size_t> dims;
    for (const auto& d : st.strata) dims.push_back(d.stratum_dim);
    std::sort(dims.begin(), dims.end());
    const std::string name = e.name;
    out.push_back(holds(name + ":stratum_dims", dims == e.dims));
    out.push_back(equals(name + ":classes", static_cast<double>(st.classes.size()), static_cast<double>(e.classes)));

    std::size_t order_mismatch = 0;
    const std::size_t m = st.strata.size();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        const auto& a = st.strata[i];
        const auto& b = st.strata[j];
        // fixed-space inclusion, floating
        bool inclusion = false;
        if (l.group.is_finite()) {
          const auto& fg = l.group.finite();
          Eigen::MatrixXd fb = b.fixed_space.to_eigen();
          auto vb = b.fixed_dim ? symplin::Subspace::span(fb) : symplin::Subspace(fb.rows());
          for (std::size_t x = 0; x < fg.order() && !inclusion; ++x) {
            Eigen::MatrixXd moved = fg.float_elements()[x] * a.fixed_space.to_eigen();
            double worst = 0.0;
            for (Eigen::Index c = 0; c < moved.cols(); ++c) worst = std::max(worst, vb.distance(moved.col(c)));
            inclusion = worst <= 1e-12 && a.fixed_dim < b.fixed_dim;
          }
        } else {
          Eigen::MatrixXd fb = b.fixed_space.to_eigen(), fa = a.fixed_space.to_eigen();
          auto vb = b.fixed_dim ? symplin::Subspace::span(fb) : symplin::Subspace(fb.rows());
          double worst = 0.0;
          for (Eigen::Index c = 0; c < fa.cols(); ++c) worst = std::max(worst, vb.distance(fa.col(c)));
          inclusion = worst <= 1e-12 && a.fixed_dim < b.fixed_dim;
        }
        // isotropy containment up to conjugacy
        bool containment = false;
        if (l.group.is_finite()) {
          const auto& fg = l.group.finite();
          for (std::size_t x = 0; x < fg.order() && !containment; ++x) {
            auto c = groups::conjugate(fg, b.subgroup, x);
            containment = groups::subgroup_contains(a.subgroup, c) && c.size() < a.subgroup.size();
          }
        } else {
          const auto& la = a.torus_isotropy.lattice;
          const auto& lb = b.torus_isotropy.lattice;
          bool inside = true;
          for (const auto& row : la) {
            IntMatrix rows = lb;
            rows.push_back(row);
            inside = inside && hermite_normal_form(rows, l.group.torus().rank()) == lb;
          }
          containment = inside && la != lb;
        }
        if (inclusion != st.below[i][j] || containment != st.below[i][j]) ++order_mismatch;
      }
    out.push_back(equals(name + ":closure_order_mismatches", static_cast<double>(order_mismatch), 0.0,
                         "closure order against fixed-space inclusion and isotropy containment"));
    auto fr = strata::frontier_diagnostic(l.group, st, seed);
    out.push_back(equals(name + ":frontier_failures", static_cast<double>(fr.failures), 0.0));
    std::size_t lift_mismatch = 0;
    for (std::size_t i = 0; i < m; ++i) {
      auto r = strata::mwm_stratum(l.group, l.model.space, l.momentum, st, i, seed + i);
      if (!r.matches_stratum || r.reduced_dim != st.strata[i].stratum_dim) ++lift_mismatch;
    }
    out.push_back(equals(name + ":lift_dim_mismatches", static_cast<double>(lift_mismatch), 0.0,
                         "dim of (V^H cap F_L^-1(0))/L against the stratum dimension"));
  }
  return out;
}

std::vector<Check> local_model(std::uint64_t seed) {
  std::vector<Check> out;
  for (const auto& name : builtin_names()) {
    auto l = load(name);
    auto st = stratify(l);
    auto pts = base_points(l, st ? &*st : nullptr, 20, seed);
    std::size_t failures = 0;
    for (const auto& x : pts)
      if (!strata::local_model_match(x, l.group, l.model.space, l.momentum, st ? &*st : nullptr).match) ++failures;
    out.push_back(equals(name + ":local_model_failures", static_cast<double>(failures), 0.0,
                         std::to_string(pts.size()) + " base points" + (l.group.is_algebra() ? ", dimensions only" : "")));
  }
  auto l = load("circle_1_-1");
  struct Site {
    const char* label;
    Eigen::VectorXd x;
    std::size_t samples;
  };
  Eigen::VectorXd principal(4);
  principal << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0, 0.0;
  for (const Site& site : {Site{"cone_point", Eigen::VectorXd::Zero(4), 10000}, Site{"principal_point", principal, 1000}}) {
    auto sm = strata::slice_model(site.x, l.group, l.model.space, l.momentum);
    auto rep = strata::abelian_model_level_set(l.group, sm, l.model.space, site.samples, seed);
    const std::string p = std::string("circle_1_-1:") + site.label;
    out.push_back(equals(p + ":counterexamples", static_cast<double>(rep.counterexamples), 0.0,
                         std::to_string(rep.solutions) + " solutions among " + std::to_string(rep.samples) + " samples"));
    out.push_back(at_least(p + ":solutions_found", static_cast<double>(rep.solutions), 1.0));
    out.push_back(equals(p + ":shifted_target_hits", static_cast<double>(rep.shifted_zero_section_hits), 0.0));
  }
  return out;
}

std::vector<Check> twin(std::uint64_t) {
  std::vector<Check> out;
  struct Case {
    const char* name;
    const char* reduced;
    std::vector<double> v0;
  };
  for (const Case& c : {Case{"z2_cone", "y1 + y3", {0.6, -0.8}}, Case{"circle_1_-1", "y1 + y2", {0.3, 0.5, 0.7, -0.2}}}) {
    auto l = load(c.name);
    auto h = invariants::invariant_generators(l.group);
    auto lambda = invariants::reduced_structure_matrix(h, l.model.space);
    dynamics::HamiltonianSystem sys(l.model.space, l.group, *l.model.hamiltonian);
    Eigen::VectorXd v0 = Eigen::Map<const Eigen::VectorXd>(c.v0.data(), static_cast<Eigen::Index>(c.v0.size()));
    auto rep = dynamics::compare_full_vs_reduced(sys, h, lambda, v0, 5.0, 1e-3);
    const std::string name = c.name;
    out.push_back(holds(name + ":reduced_hamiltonian", rep.reduced_hamiltonian == parse_y(c.reduced, h.size()),
                        to_string(rep.reduced_hamiltonian, generator_names(h.size()))));
    out.push_back(at_most(name + ":max_deviation", rep.max_deviation, 1e-6, "T = 5, dt = 1e-3"));
    auto order = dynamics::twin_order_test(sys, h, lambda, v0, 5.0, 1e-3);
    out.push_back({name + ":order_ratio", order.ratio >= 12.0 && order.ratio <= 20.0, order.ratio, 16.0,
                   "twin deviation at dt = 1e-3 over dt = 5e-4, required in [12, 20]"});
  }
  return out;
}

std::vector<Eigen::VectorXd> scenario_starts(const Loaded& l, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> starts;
  const auto d = static_cast<Eigen::Index>(l.model.space.dim());
  starts.push_back(Eigen::VectorXd::Zero(d));
  if (auto st = stratify(l)) {
    for (std::size_t i = 0; i < st->strata.size(); ++i) {
      Eigen::VectorXd x = strata::stratum_point(l.group, st->strata[i], seed + i);
      if (x.norm() > 0) starts.push_back(0.8 * x / x.norm());
    }
  } else {
    Eigen::Vector3d axis(1.0, 2.0, 2.0);
    axis /= 3.0;
    Eigen::VectorXd x(6);
    x << 0.7 * axis, 0.4 * axis;
    starts.push_back(x);
    Eigen::VectorXd g(6);
    g << 0.3, 0.5, -0.2, 0.1, 0.4, 0.6;
    starts.push_back(g);
  }
  return starts;
}

std::vector<Check> conservation(std::uint64_t seed) {
  std::vector<Check> out;
  for (const auto& name : builtin_names()) {
    auto l = load(name);
    dynamics::HamiltonianSystem sys(l.model.space, l.group, *l.model.hamiltonian);
    double noether = 0.0, escape = 0.0;
    auto starts = scenario_starts(l, seed);
    for (const auto& x : starts) {
      auto tr = dynamics::integrate_full(sys, x, 10.0, 1e-3);
      noether = std::max(noether, dynamics::check_noether(tr, l.momentum));
      escape = std::max(escape, tr.max_stratum_distance());
    }
    const std::string note = std::to_string(starts.size()) + " starts, T = 10, dt = 1e-3";
    out.push_back(at_most(name + ":noether_drift", noether, 1e-8, note));
    out.push_back(at_most(name + ":fixed_space_escape", escape, 1e-8, note));
  }
  return out;
}

std::vector<Check> cross_section(std::uint64_t) {
  std::vector<Check> out;
  Eigen::VectorXd generic(6);
  generic << 1.0, 0.3, 0.0, -0.2, 1.1, 0.0;
  auto g = dynamics::cross_section_scenario({0.5, 5.0}, generic, 20.0, 1e-3);
  out.push_back(at_most("generic:out_of_plane", g.max_out_of_plane, 1e-9, "T = 20"));
  out.push_back(at_most("generic:angular_momentum_drift", g.max_magnitude_drift, 1e-8, "T = 20"));
  out.push_back(holds("generic:stays_in_section", g.stays_in_section));
  auto c = dynamics::cross_section_scenario({0.5, 5.0}, dynamics::circular_orbit_state(1.0), 20.0, 1e-3);
  const double rel = c.period ? std::abs(*c.period / dynamics::circular_orbit_period() - 1.0) : INFINITY;
  out.push_back(at_most("circular:period_relative_error", rel, 1e-5, "closed form pi*sqrt(2)"));
  out.push_back(at_most("circular:angular_momentum_drift", c.max_magnitude_drift, 1e-8));
  bool guarded = false;
  try {
    Eigen::VectorXd edge = dynamics::circular_orbit_state(1.0);
    dynamics::cross_section_scenario({std::sqrt(2.0) * 1.0, 5.0}, edge, 1.0, 1e-3);
  } catch (const PreconditionError&) {
    guarded = true;
  }
  out.push_back(holds("boundary_guard", guarded, "angular momentum at the interval end is rejected"));
  return out;
}

std::vector<Check> determinism(std::uint64_t seed) {
  const auto a = canonical_report(verify_all(seed));
  const auto b = canonical_report(verify_all(seed));
  return {holds("verify_all_identical", a == b, std::to_string(a.size()) + " bytes")};
}

using CriterionFn = std::vector<Check> (*)(std::uint64_t);

CriterionFn criterion_fn(int id) {
  switch (id) {
    case 1: return adapted_j;
    case 2: return constant_rank;
    case 3: return equivariance;
    case 4: return generators;
    case 5: return poisson_structure;
    case 6: return norm_squared;
    case 7: return stratification;
    case 8: return local_model;
    case 9: return twin;
    case 10: return conservation;
    case 11: return cross_section;
    case 12: return determinism;
    default: throw ConfigError("unknown criterion " + std::to_string(id));
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

nlohmann::json to_json(const Check& c) {
  return {{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance}, {"note", c.note}};
}

nlohmann::json to_json(const CriterionResult& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  nlohmann::json j{{"id", r.id}, {"key", r.key}, {"title", r.title}, {"pass", r.pass},
                   {"runtime_limit_seconds", r.runtime_limit}, {"checks", checks}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

const std::vector<CriterionInfo>& criteria() {
  static const std::vector<CriterionInfo> list{
      {1, "adapted_j", "Adapted complex structure suite", 5},
      {2, "constant_rank", "Constant-rank splitting", 5},
      {3, "equivariance", "Momentum equivariance", 1},
      {4, "generators", "Invariant generators", 10},
      {5, "poisson_structure", "Reduced Poisson structure", 10},
      {6, "norm_squared", "Momentum norm expressibility", 1},
      {7, "stratification", "Stratification", 5},
      {8, "local_model", "Local model and abelian level set", 30},
      {9, "twin", "Dynamics twin experiment", 60},
      {10, "conservation", "Conservation and stratum preservation", 60},
      {11, "cross_section", "Cross-section scenario", 30},
      {12, "determinism", "Determinism of verify-all", 300},
  };
  return list;
}

const CriterionInfo& find_criterion(const std::string& id_or_key) {
  for (const auto& c : criteria())
    if (id_or_key == c.key || id_or_key == std::to_string(c.id)) return c;
  throw ConfigError("unknown verification criterion '" + id_or_key + "'");
}

CriterionResult run_criterion(int id, std::uint64_t seed) {
  const auto& info = find_criterion(std::to_string(id));
  CriterionResult r{info.id, info.key, info.title, info.runtime_limit};
  const auto start = Clock::now();
  try {
    r.checks = criterion_fn(id)(seed);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.pass = r.error.empty() && !r.checks.empty() && r.seconds < r.runtime_limit &&
           std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
  return r;
}

std::vector<CriterionResult> run_acceptance(std::uint64_t seed) {
  std::vector<CriterionResult> out;
  for (const auto& c : criteria()) out.push_back(run_criterion(c.id, seed));
  return out;
}

std::vector<Check> verify_model(const Model& model, std::uint64_t seed, double scale) {
  std::vector<Check> out;
  groups::Group g(model.group, model.space);
  auto f = groups::momentum_map(g, model.space);
  Loaded l{model, g, f};

  if (f.algebra_dim() > 0) {
    std::size_t nonzero = 0;
    for (const auto& p : groups::check_equivariance(f, g.structure(), model.space))
      if (!p.is_zero()) ++nonzero;
    out.push_back(equals("equivariance_nonzero_residuals", static_cast<double>(nonzero), 0.0));
  }
  auto h = invariants::invariant_generators(g);
  out.push_back(holds("generators_complete", h.complete,
                      std::to_string(h.size()) + " generators to degree " + std::to_string(h.degree_bound)));
  auto lambda = invariants::reduced_structure_matrix(h, model.space);
  auto sc = invariants::check_structure(h, lambda, g, f, model.space);
  out.push_back(holds("lambda_antisymmetric", sc.antisymmetric));
  out.push_back(holds("lambda_substitution", sc.substitution_exact));
  out.push_back(holds("lambda_jacobi", sc.jacobi_exact));
  out.push_back(holds("bracket_closure_invariant", sc.closure_invariant));
  out.push_back(holds("noether_exact", sc.noether_exact));

  auto sampled = strata::zero_level_sampler(f, 20, 1.0, seed);
  double residual = 0.0;
  for (const auto& x : sampled.points) residual = std::max(residual, f.algebra_dim() ? f.evaluate(x).norm() : 0.0);
  out.push_back(at_most("zero_level_residual", residual, 1e-12 * scale));
  out.push_back(equals("zero_level_shortfall", static_cast<double>(sampled.shortfall), 0.0));
  if (f.algebra_dim() > 0 && model.hamiltonian) {
    auto diag = invariants::poisson_ideal_diagnostic(*model.hamiltonian, f, sampled.points, model.space);
    out.push_back(at_most("poisson_ideal_residual", diag.max_residual, 1e-9 * scale));
  }

  auto st = stratify(l);
  if (st) {
    auto fr = strata::frontier_diagnostic(g, *st, seed);
    out.push_back(equals("frontier_failures", static_cast<double>(fr.failures), 0.0,
                         std::to_string(fr.pairs_checked) + " closure pairs"));
    std::size_t lift = 0;
    for (std::size_t i = 0; i < st->strata.size(); ++i)
      if (!strata::mwm_stratum(g, model.space, f, *st, i, seed + i).matches_stratum) ++lift;
    out.push_back(equals("lift_dim_mismatches", static_cast<double>(lift), 0.0,
                         std::to_string(st->strata.size()) + " strata"));
  }
  auto pts = base_points(l, st ? &*st : nullptr, 20, seed);
  std::size_t local = 0;
  for (const auto& x : pts)
    if (!strata::local_model_match(x, g, model.space, f, st ? &*st : nullptr, 1e-9 * scale).match) ++local;
  out.push_back(equals("local_model_failures", static_cast<double>(local), 0.0,
                       std::to_string(pts.size()) + " base points"));
  if (g.is_torus()) {
    auto sm = strata::slice_model(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.space.dim())), g, model.space, f);
    auto ls = strata::abelian_model_level_set(g, sm, model.space, 1000, seed);
    out.push_back(equals("level_set_counterexamples", static_cast<double>(ls.counterexamples), 0.0));
  }
  if (g.is_finite()) {
    auto sep = dynamics::separation_check(g.finite(), h, 20, seed);
    out.push_back(equals("separation_violations", static_cast<double>(sep.violations), 0.0,
                         std::to_string(sep.pairs) + " pairs"));
  }

  if (model.hamiltonian) {
    dynamics::HamiltonianSystem sys(model.space, g, *model.hamiltonian);
    auto starts = scenario_starts(l, seed);
    double noether = 0.0, escape = 0.0;
    for (const auto& x : starts) {
      auto tr = dynamics::integrate_full(sys, x, 10.0, 1e-3);
      noether = std::max(noether, dynamics::check_noether(tr, f));
      escape = std::max(escape, tr.max_stratum_distance());
    }
    out.push_back(at_most("noether_drift", noether, 1e-8 * scale));
    out.push_back(at_most("fixed_space_escape", escape, 1e-8 * scale));
    const Eigen::VectorXd v0 = starts.back();
    auto tw = dynamics::compare_full_vs_reduced(sys, h, lambda, v0, 5.0, 1e-3);
    out.push_back(at_most("twin_deviation", tw.max_deviation, 1e-6 * scale));
    out.push_back(at_most("hamilton_residual", dynamics::hamilton_residual(tw.full, h, lambda, tw.reduced_hamiltonian),
                          1e-5 * scale));
    auto rr = dynamics::reduced_return_test(lambda, tw.reduced_hamiltonian, h.evaluate(v0), 5.0, 1e-3);
    out.push_back(at_most("reduced_return_error", rr.return_error, rr.bound * scale, "bound 2 C dt^4 T"));
  }
  return out;
}

nlohmann::json verify_all(std::uint64_t seed, double scale) {
  const auto start = Clock::now();
  nlohmann::json models = nlohmann::json::object();
  nlohmann::json seconds = nlohmann::json::object();
  bool all = true;
  for (const auto& name : builtin_names()) {
    const auto t0 = Clock::now();
    nlohmann::json checks = nlohmann::json::array();
    bool pass = true;
    try {
      for (const auto& c : verify_model(builtin_model(name), seed, scale)) {
        checks.push_back(to_json(c));
        pass = pass && c.pass;
      }
      models[name] = {{"checks", checks}, {"pass", pass}};
    } catch (const std::exception& e) {
      pass = false;
      models[name] = {{"checks", checks}, {"pass", false}, {"error", e.what()}};
    }
    all = all && pass;
    seconds[name] = std::chrono::duration<double>(Clock::now() - t0).count();
  }
  return {{"command", "verify-all"},
          {"seed", seed},
          {"tolerance_scale", scale},
          {"models", models},
          {"pass", all},
          {"timestamp",
           {{"utc", utc_now()},
            {"seconds_total", std::chrono::duration<double>(Clock::now() - start).count()},
            {"seconds_per_model", seconds}}}};
}

std::string canonical_report(const nlohmann::json& report) {
  nlohmann::json copy = report;
  if (copy.is_object()) copy.erase("timestamp");
  return copy.dump(2);
}

}  // namespace symred::verify
