#pragma once

// Compact symmetry data acting linearly and symplectically on R^{2n}:
// finite matrix groups, tori given by weight matrices, and matrix Lie
// algebras inside sp(2n). Momentum maps, isotropy and orbit types.

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "symred/lattice.hpp"
#include "symred/poly.hpp"
#include "symred/qmatrix.hpp"
#include "symred/symplin.hpp"

namespace symred::groups {

inline constexpr std::size_t kDefaultOrderBound = 1024;

struct FiniteMatrixGroup {
  std::vector<QMatrix> generators;
  std::size_t order_bound = kDefaultOrderBound;
};

/// T^k acting on C^n: coordinate j (the (q_j, p_j) plane) rotates with the
/// character given by column j of the k x n weight matrix.
struct Torus {
  IntMatrix weights;  // k rows of length n
  std::size_t rank() const { return weights.size(); }
  std::size_t n() const { return weights.empty() ? 0 : weights.front().size(); }
  IntVector column(std::size_t j) const;
};

/// Basis X_1..X_k of a subalgebra of sp(2n) with [X_a, X_b] = sum_c c^c_{ab} X_c.
struct MatrixLieAlgebra {
  std::vector<QMatrix> basis;
  std::vector<Rational> structure;  // index (a k + b) k + c
  std::size_t dim() const { return basis.size(); }
  const Rational& c(std::size_t a, std::size_t b, std::size_t cc) const {
    return structure[(a * dim() + b) * dim() + cc];
  }
};

using GroupSpec = std::variant<FiniteMatrixGroup, Torus, MatrixLieAlgebra>;

/// Structure constants read off the commutators of the basis; throws
/// GroupError when the basis is not closed under the bracket.
std::vector<Rational> structure_constants_from_basis(const std::vector<QMatrix>& basis);

/// Infinitesimal generator of the a-th circle factor:
/// [[0, D], [-D, 0]] with D = diag(weights row a).
QMatrix torus_generator(const Torus& t, std::size_t a);

/// Exact action matrix of the torus element exp(sum theta_a X_a).
Eigen::MatrixXd torus_element(const Torus& t, const Eigen::VectorXd& theta);

/// A finite matrix group saturated under products.
class FiniteGroup {
 public:
  std::size_t order() const { return elements_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<QMatrix>& elements() const { return elements_; }
  const QMatrix& element(std::size_t i) const { return elements_[i]; }
  const std::vector<Eigen::MatrixXd>& float_elements() const { return float_elements_; }
  std::size_t identity() const { return identity_; }
  std::size_t multiply(std::size_t a, std::size_t b) const { return table_[a * order() + b]; }
  std::size_t inverse(std::size_t a) const { return inverse_[a]; }
  std::size_t index_of(const QMatrix& g) const;

 private:
  friend FiniteGroup close_group(const FiniteMatrixGroup& spec, const QMatrix& omega);

  std::size_t dim_ = 0;
  std::vector<QMatrix> elements_;
  std::vector<Eigen::MatrixXd> float_elements_;
  std::map<QMatrix, std::size_t> index_;
  std::vector<std::size_t> table_;
  std::vector<std::size_t> inverse_;
  std::size_t identity_ = 0;
};

/// Elements sorted lexicographically on their flattened entries. Throws
/// GroupError for a non-symplectic generator or an order above the bound.
FiniteGroup close_group(const FiniteMatrixGroup& spec, const QMatrix& omega);

/// A subgroup is a sorted list of element indices.
using Subgroup = std::vector<std::size_t>;

Subgroup generated_subgroup(const FiniteGroup& g, const std::vector<std::size_t>& gens);
Subgroup conjugate(const FiniteGroup& g, const Subgroup& h, std::size_t x);
/// Lexicographically least conjugate; equal for conjugate subgroups.
Subgroup canonical_conjugate(const FiniteGroup& g, const Subgroup& h);
bool subgroup_contains(const Subgroup& big, const Subgroup& small);
Subgroup normalizer(const FiniteGroup& g, const Subgroup& h);
/// Every subgroup, one canonical representative per conjugacy class, ordered
/// by increasing order and then lexicographically.
std::vector<Subgroup> subgroup_classes(const FiniteGroup& g);

/// Exact fixed space V^H (basis columns).
QMatrix fixed_space(const FiniteGroup& g, const Subgroup& h);

/// Validated group data together with its precomputed closure.
class Group {
 public:
  Group(GroupSpec spec, const symplin::SymplecticSpace& s);

  const GroupSpec& spec() const { return spec_; }
  std::size_t phase_dim() const { return phase_dim_; }
  bool is_finite() const { return std::holds_alternative<FiniteMatrixGroup>(spec_); }
  bool is_torus() const { return std::holds_alternative<Torus>(spec_); }
  bool is_algebra() const { return std::holds_alternative<MatrixLieAlgebra>(spec_); }
  const FiniteGroup& finite() const;
  const Torus& torus() const { return std::get<Torus>(spec_); }
  const MatrixLieAlgebra& algebra() const { return std::get<MatrixLieAlgebra>(spec_); }

  /// Lie algebra data; empty for finite groups.
  std::size_t algebra_dim() const { return generators_.size(); }
  const std::vector<QMatrix>& algebra_generators() const { return generators_; }
  const std::vector<Eigen::MatrixXd>& float_generators() const { return float_generators_; }
  const std::vector<Rational>& structure() const { return structure_; }
  symplin::StructureTensor structure_tensor() const;

  /// A pseudo-random group element as a floating matrix: uniform index for
  /// finite groups, uniform angles for tori, exp of an algebra element with
  /// coefficients uniform in [-pi, pi] otherwise.
  template <class Rng>
  Eigen::MatrixXd random_element(Rng& rng) const;

 private:
  Eigen::MatrixXd element_from_uniforms(const std::vector<double>& u) const;

  GroupSpec spec_;
  std::size_t phase_dim_ = 0;
  std::vector<FiniteGroup> closure_;  // zero or one entry
  std::vector<QMatrix> generators_;
  std::vector<Eigen::MatrixXd> float_generators_;
  std::vector<Rational> structure_;
};

struct MomentumMap {
  std::size_t phase_dim = 0;
  std::vector<Poly> components;           // F_a(v) = 1/2 w(X_a v, v)
  std::vector<Eigen::MatrixXd> hessians;  // X_a^T Omega, symmetric

  std::size_t algebra_dim() const { return components.size(); }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& v) const;
  /// k x 2n, row a is grad F_a.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& v) const;
  /// |F|^2 = sum_a F_a^2 as an exact polynomial.
  Poly norm_squared() const;
};

/// Requires exact form data on the space.
MomentumMap momentum_map(const Group& g, const symplin::SymplecticSpace& s);

/// Table of {F_a, F_b} - sum_c c^c_{ab} F_c (row-major k x k).
std::vector<Poly> check_equivariance(const MomentumMap& f, const std::vector<Rational>& structure,
                                     const symplin::SymplecticSpace& s);

struct TorusIsotropy {
  std::vector<std::size_t> support;
  IntMatrix lattice;                     // HNF of the weights on the support
  std::size_t dimension = 0;             // dimension of the isotropy subtorus
  std::vector<mpz_class> finite_factors;  // invariant factors > 1
};

struct IsotropyData {
  std::variant<Subgroup, TorusIsotropy, symplin::Subspace> data;
};

/// tol governs the floating decisions; values within [0.1 tol, 10 tol] of a
/// decision threshold raise AmbiguityError.
IsotropyData isotropy(const Group& g, const Eigen::VectorXd& v, double tol = 1e-9);
Subgroup finite_isotropy(const FiniteGroup& g, const Eigen::VectorXd& v, double tol = 1e-9);
Subgroup exact_isotropy(const FiniteGroup& g, const QMatrix& v);
TorusIsotropy torus_isotropy(const Torus& t, const Eigen::VectorXd& v, double tol = 1e-9);
TorusIsotropy torus_isotropy_of_support(const Torus& t, const std::vector<std::size_t>& support);
symplin::Subspace algebra_isotropy(const Group& g, const Eigen::VectorXd& v);

/// Canonical names of orbit types.
std::string subgroup_id(const Subgroup& h);
std::string lattice_id(const IntMatrix& hnf, const std::vector<mpz_class>& factors);
std::string orbit_type(const Group& g, const Eigen::VectorXd& v, double tol = 1e-9);

template <class Rng>
Eigen::MatrixXd Group::random_element(Rng& rng) const {
  std::vector<double> u;
  const std::size_t count = is_finite() ? 1 : std::max<std::size_t>(algebra_dim(), 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) u.push_back(unif(rng));
  return element_from_uniforms(u);
}

}  // namespace symred::groups
