#include "symred/groups.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "symred/errors.hpp"

namespace symred::groups {

namespace {

QMatrix commutator(const QMatrix& a, const QMatrix& b) { return a * b - b * a; }

bool in_sp(const QMatrix& x, const QMatrix& omega) { return (x.transpose() * omega + omega * x).is_zero(); }

void check_structure(const std::vector<Rational>& c, std::size_t k) {
  if (c.size() != k * k * k) throw GroupError("structure constants need k^3 entries");
  auto at = [&](std::size_t a, std::size_t b, std::size_t d) -> const Rational& { return c[(a * k + b) * k + d]; };
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t d = 0; d < k; ++d)
        if (at(a, b, d) != -at(b, a, d)) throw GroupError("structure constants are not antisymmetric");
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t cc = 0; cc < k; ++cc)
        for (std::size_t e = 0; e < k; ++e) {
          Rational s = 0;
          for (std::size_t d = 0; d < k; ++d)
            s += at(a, b, d) * at(d, cc, e) + at(b, cc, d) * at(d, a, e) + at(cc, a, d) * at(d, b, e);
          if (s != 0) throw GroupError("structure constants violate the Jacobi identity");
        }
}

}  // namespace

IntVector Torus::column(std::size_t j) const {
  IntVector c;
  for (const auto& row : weights) c.push_back(row[j]);
  return c;
}

std::vector<Rational> structure_constants_from_basis(const std::vector<QMatrix>& basis) {
  const std::size_t k = basis.size();
  std::vector<Rational> c(k * k * k);
  if (k == 0) return c;
  const std::size_t d = basis.front().rows();
  QMatrix stacked(d * d, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t i = 0; i < d * d; ++i) stacked(i, a) = basis[a].flat()[i];
  if (rank(stacked) != k) throw GroupError("Lie algebra basis is linearly dependent");
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      QMatrix br = commutator(basis[a], basis[b]);
      QMatrix rhs(d * d, 1);
      for (std::size_t i = 0; i < d * d; ++i) rhs(i, 0) = br.flat()[i];
      auto sol = solve(stacked, rhs);
      if (!sol) throw GroupError("Lie algebra basis is not closed under the commutator");
      for (std::size_t cc = 0; cc < k; ++cc) c[(a * k + b) * k + cc] = (*sol)(cc, 0);
    }
  return c;
}

QMatrix torus_generator(const Torus& t, std::size_t a) {
  const std::size_t n = t.n();
  QMatrix x(2 * n, 2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    Rational w(t.weights[a][j]);
    x(j, n + j) = w;
    x(n + j, j) = -w;
  }
  return x;
}

Eigen::MatrixXd torus_element(const Torus& t, const Eigen::VectorXd& theta) {
  const std::size_t n = t.n();
  if (static_cast<std::size_t>(theta.size()) != t.rank()) throw DimensionError("torus angle vector has wrong length");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    double phi = 0;
    for (std::size_t a = 0; a < t.rank(); ++a) phi += theta(a) * t.weights[a][j].get_d();
    const double c = std::cos(phi), s = std::sin(phi);
    m(j, j) = c;
    m(j, n + j) = s;
    m(n + j, j) = -s;
    m(n + j, n + j) = c;
  }
  return m;
}

std::size_t FiniteGroup::index_of(const QMatrix& g) const {
  auto it = index_.find(g);
  if (it == index_.end()) throw GroupError("matrix is not an element of the group");
  return it->second;
}

FiniteGroup close_group(const FiniteMatrixGroup& spec, const QMatrix& omega) {
  const std::size_t d = omega.rows();
  for (const auto& g : spec.generators) {
    if (g.rows() != d || g.cols() != d) throw DimensionError("group generator has wrong shape");
    if (!(g.transpose() * omega * g == omega)) throw GroupError("group generator is not symplectic");
  }
  std::set<QMatrix> seen{QMatrix::identity(d)};
  std::queue<QMatrix> frontier;
  frontier.push(QMatrix::identity(d));
  while (!frontier.empty()) {
    QMatrix x = frontier.front();
    frontier.pop();
    for (const auto& g : spec.generators) {
      QMatrix y = x * g;
      if (seen.insert(y).second) {
        if (seen.size() > spec.order_bound)
          throw GroupError("group order exceeds the bound " + std::to_string(spec.order_bound));
        frontier.push(std::move(y));
      }
    }
  }
  FiniteGroup out;
  out.dim_ = d;
  out.elements_.assign(seen.begin(), seen.end());
  const std::size_t n = out.elements_.size();
  for (std::size_t i = 0; i < n; ++i) {
    out.index_.emplace(out.elements_[i], i);
    out.float_elements_.push_back(out.elements_[i].to_eigen());
  }
  out.identity_ = out.index_.at(QMatrix::identity(d));
  out.table_.resize(n * n);
  out.inverse_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t p = out.index_.at(out.elements_[i] * out.elements_[j]);
      out.table_[i * n + j] = p;
      if (p == out.identity_) out.inverse_[i] = j;
    }
  return out;
}

Subgroup generated_subgroup(const FiniteGroup& g, const std::vector<std::size_t>& gens) {
  std::set<std::size_t> seen{g.identity()};
  std::vector<std::size_t> stack{g.identity()};
  while (!stack.empty()) {
    std::size_t x = stack.back();
    stack.pop_back();
    for (std::size_t s : gens) {
      std::size_t y = g.multiply(x, s);
      if (seen.insert(y).second) stack.push_back(y);
    }
  }
  return Subgroup(seen.begin(), seen.end());
}

Subgroup conjugate(const FiniteGroup& g, const Subgroup& h, std::size_t x) {
  Subgroup out;
  for (std::size_t e : h) out.push_back(g.multiply(g.multiply(x, e), g.inverse(x)));
  std::sort(out.begin(), out.end());
  return out;
}

Subgroup canonical_conjugate(const FiniteGroup& g, const Subgroup& h) {
  Subgroup best = h;
  for (std::size_t x = 0; x < g.order(); ++x) best = std::min(best, conjugate(g, h, x));
  return best;
}

bool subgroup_contains(const Subgroup& big, const Subgroup& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

Subgroup normalizer(const FiniteGroup& g, const Subgroup& h) {
  Subgroup out;
  for (std::size_t x = 0; x < g.order(); ++x)
    if (conjugate(g, h, x) == h) out.push_back(x);
  return out;
}

std::vector<Subgroup> subgroup_classes(const FiniteGroup& g) {
  std::set<Subgroup> all;
  std::vector<Subgroup> cyclic;
  for (std::size_t x = 0; x < g.order(); ++x) {
    Subgroup c = generated_subgroup(g, {x});
    if (all.insert(c).second) cyclic.push_back(c);
  }
  // Every subgroup is a join of cyclic subgroups.
  std::vector<Subgroup> frontier(all.begin(), all.end());
  while (!frontier.empty()) {
    std::vector<Subgroup> next;
    for (const auto& a : frontier)
      for (const auto& c : cyclic) {
        if (subgroup_contains(a, c)) continue;
        std::vector<std::size_t> gens = a;
        gens.insert(gens.end(), c.begin(), c.end());
        Subgroup j = generated_subgroup(g, gens);
        if (all.insert(j).second) next.push_back(j);
      }
    frontier = std::move(next);
  }
  std::set<Subgroup> reps;
  for (const auto& h : all) reps.insert(canonical_conjugate(g, h));
  std::vector<Subgroup> out(reps.begin(), reps.end());
  std::stable_sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

QMatrix fixed_space(const FiniteGroup& g, const Subgroup& h) {
  const std::size_t d = g.dim();
  QMatrix stacked;
  for (std::size_t e : h) stacked = QMatrix::vcat(stacked, g.element(e) - QMatrix::identity(d));
  if (stacked.rows() == 0) return QMatrix::identity(d);
  return nullspace(stacked);
}

Group::Group(GroupSpec spec, const symplin::SymplecticSpace& s) : spec_(std::move(spec)), phase_dim_(s.dim()) {
  if (!s.exact_omega()) throw PreconditionError("group data needs an exactly specified symplectic form");
  const QMatrix& omega = *s.exact_omega();
  if (auto* f = std::get_if<FiniteMatrixGroup>(&spec_)) {
    closure_.push_back(close_group(*f, omega));
  } else if (auto* t = std::get_if<Torus>(&spec_)) {
    if (t->rank() == 0) throw GroupError("torus needs at least one weight row");
    for (const auto& row : t->weights)
      if (row.size() != t->n()) throw DimensionError("weight matrix rows differ in length");
    if (2 * t->n() != s.dim()) throw DimensionError("weight matrix does not match the phase-space dimension");
    for (std::size_t a = 0; a < t->rank(); ++a) {
      generators_.push_back(torus_generator(*t, a));
      if (!in_sp(generators_.back(), omega)) throw GroupError("torus generator is not in sp for this form");
    }
    structure_.assign(t->rank() * t->rank() * t->rank(), Rational(0));
  } else {
    auto& alg = std::get<MatrixLieAlgebra>(spec_);
    if (alg.basis.empty()) throw GroupError("Lie algebra needs a nonempty basis");
    for (const auto& x : alg.basis) {
      if (x.rows() != s.dim() || x.cols() != s.dim()) throw DimensionError("Lie algebra basis element has wrong shape");
      if (!in_sp(x, omega)) throw GroupError("Lie algebra basis element is not in sp(2n)");
    }
    if (alg.structure.empty()) alg.structure = structure_constants_from_basis(alg.basis);
    check_structure(alg.structure, alg.dim());
    generators_ = alg.basis;
    structure_ = alg.structure;
  }
  for (const auto& x : generators_) float_generators_.push_back(x.to_eigen());
}

const FiniteGroup& Group::finite() const {
  if (closure_.empty()) throw PreconditionError("group is not finite");
  return closure_.front();
}

symplin::StructureTensor Group::structure_tensor() const {
  const std::size_t k = algebra_dim();
  symplin::StructureTensor c(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t d = 0; d < k; ++d) c(a, b, d) = structure_[(a * k + b) * k + d].get_d();
  return c;
}

Eigen::MatrixXd Group::element_from_uniforms(const std::vector<double>& u) const {
  if (is_finite()) {
    const auto& f = finite();
    auto i = std::min(static_cast<std::size_t>(u[0] * static_cast<double>(f.order())), f.order() - 1);
    return f.float_elements()[i];
  }
  if (is_torus()) {
    Eigen::VectorXd theta(static_cast<Eigen::Index>(algebra_dim()));
    for (std::size_t a = 0; a < algebra_dim(); ++a) theta(a) = 2.0 * std::numbers::pi * u[a];
    return torus_element(torus(), theta);
  }
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(phase_dim_), static_cast<Eigen::Index>(phase_dim_));
  for (std::size_t a = 0; a < algebra_dim(); ++a) x += (2.0 * u[a] - 1.0) * std::numbers::pi * float_generators_[a];
  return x.exp();
}

Eigen::VectorXd MomentumMap::evaluate(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(hessians.size()));
  for (std::size_t a = 0; a < hessians.size(); ++a) out(a) = 0.5 * v.dot(hessians[a] * v);
  return out;
}

Eigen::MatrixXd MomentumMap::jacobian(const Eigen::VectorXd& v) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(hessians.size()), v.size());
  for (std::size_t a = 0; a < hessians.size(); ++a) out.row(a) = (hessians[a] * v).transpose();
  return out;
}

Poly MomentumMap::norm_squared() const {
  Poly out(phase_dim);
  for (const auto& f : components) out += f * f;
  return out;
}

MomentumMap momentum_map(const Group& g, const symplin::SymplecticSpace& s) {
  if (!s.exact_omega()) throw PreconditionError("momentum map needs an exactly specified symplectic form");
  const QMatrix& omega = *s.exact_omega();
  const std::size_t d = s.dim();
  MomentumMap out;
  out.phase_dim = d;
  for (const auto& x : g.algebra_generators()) {
    if (!in_sp(x, omega)) throw GroupError("generator is not in sp(2n)");
    QMatrix m = x.transpose() * omega;
    Poly f(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        if (sgn(m(i, j)) == 0) continue;
        Exponents e(d, 0);
        ++e[i];
        ++e[j];
        f.add_term(e, m(i, j) / 2);
      }
    out.components.push_back(std::move(f));
    out.hessians.push_back(m.to_eigen());
  }
  return out;
}

std::vector<Poly> check_equivariance(const MomentumMap& f, const std::vector<Rational>& structure,
                                     const symplin::SymplecticSpace& s) {
  const std::size_t k = f.algebra_dim();
  if (structure.size() != k * k * k) throw DimensionError("structure constants do not match the momentum map");
  const QMatrix pi = s.exact_poisson_tensor();
  std::vector<Poly> out;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      Poly r = bracket_with_tensor(f.components[a], f.components[b], pi);
      for (std::size_t c = 0; c < k; ++c) {
        const Rational& coef = structure[(a * k + b) * k + c];
        if (sgn(coef) != 0) r -= coef * f.components[c];
      }
      out.push_back(std::move(r));
    }
  return out;
}

Subgroup finite_isotropy(const FiniteGroup& g, const Eigen::VectorXd& v, double tol) {
  if (static_cast<std::size_t>(v.size()) != g.dim()) throw DimensionError("point has wrong dimension");
  Subgroup out;
  for (std::size_t i = 0; i < g.order(); ++i) {
    const double d = (g.float_elements()[i] * v - v).norm();
    if (d >= 0.1 * tol && d <= 10.0 * tol) {
      std::ostringstream os;
      os << "isotropy decision ambiguous: |g v - v| = " << d << " near tolerance " << tol;
      throw AmbiguityError(os.str());
    }
    if (d < 0.1 * tol) out.push_back(i);
  }
  return out;
}

Subgroup exact_isotropy(const FiniteGroup& g, const QMatrix& v) {
  Subgroup out;
  for (std::size_t i = 0; i < g.order(); ++i)
    if (g.element(i) * v == v) out.push_back(i);
  return out;
}

TorusIsotropy torus_isotropy_of_support(const Torus& t, const std::vector<std::size_t>& support) {
  TorusIsotropy out;
  out.support = support;
  IntMatrix rows;
  for (std::size_t j : support) rows.push_back(t.column(j));
  out.lattice = hermite_normal_form(rows, t.rank());
  out.dimension = t.rank() - out.lattice.size();
  for (auto& f : smith_invariant_factors(rows, t.rank()))
    if (f > 1) out.finite_factors.push_back(f);
  return out;
}

TorusIsotropy torus_isotropy(const Torus& t, const Eigen::VectorXd& v, double tol) {
  const std::size_t n = t.n();
  if (static_cast<std::size_t>(v.size()) != 2 * n) throw DimensionError("point has wrong dimension");
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = std::hypot(v(j), v(n + j));
    if (r >= 0.1 * tol && r <= 10.0 * tol) {
      std::ostringstream os;
      os << "support decision ambiguous: |z_" << j + 1 << "| = " << r << " near tolerance " << tol;
      throw AmbiguityError(os.str());
    }
    if (r > 10.0 * tol) support.push_back(j);
  }
  return torus_isotropy_of_support(t, support);
}

symplin::Subspace algebra_isotropy(const Group& g, const Eigen::VectorXd& v) {
  const auto k = static_cast<Eigen::Index>(g.algebra_dim());
  Eigen::MatrixXd m(v.size(), k);
  double scale = 0;
  for (Eigen::Index a = 0; a < k; ++a) {
    m.col(a) = g.float_generators()[a] * v;
    scale = std::max(scale, g.float_generators()[a].norm());
  }
  return symplin::Subspace::span(symplin::numerical_nullspace(m, symplin::kRankRelTol, scale * v.norm()));
}

IsotropyData isotropy(const Group& g, const Eigen::VectorXd& v, double tol) {
  if (static_cast<std::size_t>(v.size()) != g.phase_dim()) throw DimensionError("point has wrong dimension");
  if (g.is_finite()) return {finite_isotropy(g.finite(), v, tol)};
  if (g.is_torus()) return {torus_isotropy(g.torus(), v, tol)};
  return {algebra_isotropy(g, v)};
}

std::string subgroup_id(const Subgroup& h) {
  std::ostringstream os;
  os << "subgroup[";
  for (std::size_t i = 0; i < h.size(); ++i) os << (i ? "," : "") << h[i];
  os << "]";
  return os.str();
}

std::string lattice_id(const IntMatrix& hnf, const std::vector<mpz_class>& factors) {
  std::ostringstream os;
  os << "lattice[";
  for (std::size_t i = 0; i < hnf.size(); ++i) {
    os << (i ? "," : "") << "[";
    for (std::size_t j = 0; j < hnf[i].size(); ++j) os << (j ? "," : "") << hnf[i][j].get_str();
    os << "]";
  }
  os << "]/finite[";
  for (std::size_t i = 0; i < factors.size(); ++i) os << (i ? "," : "") << factors[i].get_str();
  os << "]";
  return os.str();
}

std::string orbit_type(const Group& g, const Eigen::VectorXd& v, double tol) {
  if (g.is_finite()) return subgroup_id(canonical_conjugate(g.finite(), finite_isotropy(g.finite(), v, tol)));
  if (g.is_torus()) {
    auto iso = torus_isotropy(g.torus(), v, tol);
    return lattice_id(iso.lattice, iso.finite_factors);
  }
  throw PreconditionError("orbit types are classified for finite groups and tori only");
}

}  // namespace symred::groups
