#pragma once

// Symplectic linear algebra on R^{2n} with the form w(v, w) = v^T Omega w.
// The default Omega is [[0, I], [-I, 0]] in (q1..qn, p1..pn) ordering, so
// w(e_q_i, e_p_i) = 1.

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <vector>

#include "symred/qmatrix.hpp"

namespace symred::symplin {

/// Relative singular-value cutoff for floating rank decisions. A singular
/// value inside [0.1, 10] x cutoff is ambiguous and raises AmbiguityError.
inline constexpr double kRankRelTol = 1e-9;

/// Floating rank of a matrix with the ambiguity band enforced. The cutoff is
/// rel_tol * max(largest singular value, reference_scale).
std::size_t numerical_rank(const Eigen::VectorXd& singular_values, double rel_tol = kRankRelTol,
                           double reference_scale = 0.0);

/// Orthonormal basis of {x : m x = 0} (columns).
Eigen::MatrixXd numerical_nullspace(const Eigen::MatrixXd& m, double rel_tol = kRankRelTol,
                                    double reference_scale = 0.0);

class SymplecticSpace {
 public:
  static SymplecticSpace standard(std::size_t n);
  /// Validates skew-symmetry and invertibility.
  static SymplecticSpace from_matrix(const Eigen::MatrixXd& omega);
  static SymplecticSpace from_exact(const QMatrix& omega);

  std::size_t dim() const { return static_cast<std::size_t>(omega_.rows()); }
  std::size_t half_dim() const { return dim() / 2; }
  const Eigen::MatrixXd& omega() const { return omega_; }
  /// Exact form when the space was built from rational data.
  const std::optional<QMatrix>& exact_omega() const { return exact_; }
  double condition_number() const { return condition_; }
  bool is_standard() const;

  double form(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const { return v.dot(omega_ * w); }
  /// Matrix pi with X_h = pi grad(h), i.e. Omega^{-T}; equals Omega when standard.
  Eigen::MatrixXd poisson_tensor() const;
  /// Exact Poisson tensor; throws PreconditionError without exact data.
  QMatrix exact_poisson_tensor() const;

 private:
  SymplecticSpace(Eigen::MatrixXd omega, std::optional<QMatrix> exact);

  Eigen::MatrixXd omega_;
  std::optional<QMatrix> exact_;
  double condition_ = 1.0;
};

/// Linear subspace of R^d stored by an orthonormal column basis.
class Subspace {
 public:
  explicit Subspace(std::size_t ambient_dim = 0) : basis_(ambient_dim, 0) {}

  /// Span of the given columns; dependent columns are allowed and dropped.
  static Subspace span(const Eigen::MatrixXd& vectors, double rel_tol = kRankRelTol, double reference_scale = 0.0);
  /// Strict: the columns must be independent (DimensionError otherwise).
  static Subspace from_basis(const Eigen::MatrixXd& basis, double rel_tol = kRankRelTol);
  static Subspace full(std::size_t d);

  std::size_t ambient_dim() const { return static_cast<std::size_t>(basis_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(basis_.cols()); }
  const Eigen::MatrixXd& basis() const { return basis_; }
  Eigen::MatrixXd projector() const { return basis_ * basis_.transpose(); }
  double distance(const Eigen::VectorXd& v) const;

 private:
  Eigen::MatrixXd basis_;
};

Subspace sum(const Subspace& a, const Subspace& b);
Subspace intersect(const Subspace& a, const Subspace& b);
/// Largest sine of the principal angles; +infinity when dimensions differ.
double subspace_distance(const Subspace& a, const Subspace& b);

/// {v : w(v, u) = 0 for all u in W}.
Subspace symplectic_perp(const Subspace& w, const SymplecticSpace& s);
/// Exact version on rational bases (columns); the result is the canonical
/// nullspace basis.
QMatrix symplectic_perp_exact(const QMatrix& basis, const QMatrix& omega);

/// Whether the form restricted to W is nondegenerate, decided by rank.
bool is_symplectic_subspace(const Subspace& w, const SymplecticSpace& s);

struct AdaptedComplexStructure {
  Eigen::MatrixXd J;
  Eigen::MatrixXd A;
  Eigen::MatrixXd P;
  Eigen::MatrixXd metric_g;
};

struct AdaptedResiduals {
  double square_residual;      // |J^2 + I|_F / |J|_F^2
  double symplectic_residual;  // |J^T Omega J - Omega|_F / |Omega|_F
  double min_metric_eigenvalue;  // of sym(Omega J)
};

AdaptedResiduals adapted_residuals(const Eigen::MatrixXd& J, const SymplecticSpace& s);

/// Polar construction: A = g^{-1} Omega^T, P = sqrt(-A^2), J = A P^{-1}.
/// The square root is taken in a Cholesky g-orthonormal frame by a symmetric
/// eigendecomposition.
AdaptedComplexStructure adapted_complex_structure(const SymplecticSpace& s, const Eigen::MatrixXd& g);

struct ConstantRankData {
  Subspace nu;   // W cap W^w
  Subspace E;    // g_J-orthogonal complement of nu in W
  Subspace N;    // w-perp of W + J nu
  Subspace Jnu;  // pairing partner of nu
};

ConstantRankData constant_rank_split(const Subspace& w, const SymplecticSpace& s,
                                     const AdaptedComplexStructure& j);

struct GramBlockReport {
  double forbidden_block_max;  // largest |w(a, b)| over blocks that must vanish
  double pairing_min_sv;       // smallest singular value of the nu / J nu block
  double e_min_sv;             // nondegeneracy of w on E
  double n_min_sv;             // nondegeneracy of w on N
};

/// Gram matrix of w in the basis (E, N, nu, J nu).
GramBlockReport gram_block_report(const ConstantRankData& d, const SymplecticSpace& s);

/// Structure constants c^c_{ab} of a Lie algebra, [e_a, e_b] = sum_c c^c_{ab} e_c.
class StructureTensor {
 public:
  StructureTensor() = default;
  explicit StructureTensor(std::size_t k) : k_(k), c_(k * k * k, 0.0) {}

  std::size_t dim() const { return k_; }
  double& operator()(std::size_t a, std::size_t b, std::size_t c) { return c_[(a * k_ + b) * k_ + c]; }
  double operator()(std::size_t a, std::size_t b, std::size_t c) const { return c_[(a * k_ + b) * k_ + c]; }
  Eigen::VectorXd bracket(const Eigen::VectorXd& xi, const Eigen::VectorXd& eta) const;

 private:
  std::size_t k_ = 0;
  std::vector<double> c_;
};

/// <[xi, eta], alpha>: the KKS form at alpha on the coadjoint vectors of xi, eta.
double kks_pairing(const StructureTensor& c, const Eigen::VectorXd& alpha, const Eigen::VectorXd& xi,
                   const Eigen::VectorXd& eta);

/// {xi : <alpha, [xi, eta]> = 0 for all eta}.
Subspace coadjoint_isotropy(const StructureTensor& c, const Eigen::VectorXd& alpha);

struct OrbitNullComparison {
  Subspace orbit_tangent;      // span{X_a x}
  Subspace null_of_form;       // kernel of w restricted to the orbit tangent
  Subspace isotropy_directions;  // {X(xi) x : xi in g_alpha}
  double distance;             // subspace_distance of the last two
};

/// Checks that the null space of w on T_x(G x) is the g_alpha directions,
/// alpha = F(x), for a linear action with generators X_a.
OrbitNullComparison orbit_null_comparison(const std::vector<Eigen::MatrixXd>& generators,
                                          const StructureTensor& c, const SymplecticSpace& s,
                                          const Eigen::VectorXd& x);

}  // namespace symred::symplin
