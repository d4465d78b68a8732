#include "symred/symplin.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "symred/errors.hpp"

namespace symred::symplin {

namespace {

Eigen::JacobiSVD<Eigen::MatrixXd> full_svd(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

void require_ambient(const Subspace& w, const SymplecticSpace& s) {
  if (w.ambient_dim() != s.dim())
    throw DimensionError("subspace of R^" + std::to_string(w.ambient_dim()) + " used in a space of dimension " +
                         std::to_string(s.dim()));
}

}  // namespace

std::size_t numerical_rank(const Eigen::VectorXd& sv, double rel_tol, double reference_scale) {
  if (sv.size() == 0) return 0;
  const double largest = std::max(sv.maxCoeff(), reference_scale);
  if (largest == 0.0) return 0;
  const double cutoff = rel_tol * largest;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) >= 0.1 * cutoff && sv(i) <= 10.0 * cutoff) {
      std::ostringstream os;
      os << "rank decision ambiguous: singular value " << sv(i) << " within [0.1, 10] x cutoff " << cutoff;
      throw AmbiguityError(os.str());
    }
    if (sv(i) > cutoff) ++r;
  }
  return r;
}

Eigen::MatrixXd numerical_nullspace(const Eigen::MatrixXd& m, double rel_tol, double reference_scale) {
  const Eigen::Index n = m.cols();
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  auto svd = full_svd(m);
  const auto r = static_cast<Eigen::Index>(numerical_rank(svd.singularValues(), rel_tol, reference_scale));
  return svd.matrixV().rightCols(n - r);
}

SymplecticSpace::SymplecticSpace(Eigen::MatrixXd omega, std::optional<QMatrix> exact)
    : omega_(std::move(omega)), exact_(std::move(exact)) {
  if (omega_.rows() != omega_.cols()) throw DimensionError("symplectic form must be square");
  if (omega_.rows() == 0 || omega_.rows() % 2 != 0) throw DimensionError("symplectic space needs positive even dimension");
  const double scale = omega_.norm();
  if ((omega_ + omega_.transpose()).norm() > 1e-12 * scale) throw PreconditionError("symplectic form is not skew-symmetric");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(omega_);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-12 * sv(0)) throw PreconditionError("symplectic form is degenerate");
  condition_ = sv(0) / sv(sv.size() - 1);
  if (exact_) {
    if (!(exact_->transpose() == Rational(-1) * *exact_)) throw PreconditionError("exact form is not skew-symmetric");
    if (rank(*exact_) != exact_->rows()) throw PreconditionError("exact form is degenerate");
  }
}

SymplecticSpace SymplecticSpace::standard(std::size_t n) {
  auto w = standard_omega_exact(n);
  return SymplecticSpace(w.to_eigen(), w);
}

SymplecticSpace SymplecticSpace::from_matrix(const Eigen::MatrixXd& omega) { return SymplecticSpace(omega, std::nullopt); }

SymplecticSpace SymplecticSpace::from_exact(const QMatrix& omega) { return SymplecticSpace(omega.to_eigen(), omega); }

bool SymplecticSpace::is_standard() const {
  if (exact_) return *exact_ == standard_omega_exact(half_dim());
  return omega_ == standard_omega_exact(half_dim()).to_eigen();
}

Eigen::MatrixXd SymplecticSpace::poisson_tensor() const { return omega_.transpose().inverse(); }

QMatrix SymplecticSpace::exact_poisson_tensor() const {
  if (!exact_) throw PreconditionError("space has no exact form");
  return inverse(exact_->transpose());
}

Subspace Subspace::span(const Eigen::MatrixXd& vectors, double rel_tol, double reference_scale) {
  Subspace s(static_cast<std::size_t>(vectors.rows()));
  if (vectors.cols() == 0) return s;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(vectors, Eigen::ComputeThinU);
  const auto r = static_cast<Eigen::Index>(numerical_rank(svd.singularValues(), rel_tol, reference_scale));
  s.basis_ = svd.matrixU().leftCols(r);
  return s;
}

Subspace Subspace::from_basis(const Eigen::MatrixXd& basis, double rel_tol) {
  Subspace s = span(basis, rel_tol);
  if (s.dim() != static_cast<std::size_t>(basis.cols()))
    throw DimensionError("subspace basis is rank deficient (" + std::to_string(s.dim()) + " < " +
                         std::to_string(basis.cols()) + ")");
  return s;
}

Subspace Subspace::full(std::size_t d) {
  Subspace s(d);
  s.basis_ = Eigen::MatrixXd::Identity(d, d);
  return s;
}

double Subspace::distance(const Eigen::VectorXd& v) const {
  if (static_cast<std::size_t>(v.size()) != ambient_dim()) throw DimensionError("point has wrong dimension");
  return (v - basis_ * (basis_.transpose() * v)).norm();
}

Subspace sum(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("sum of subspaces of different spaces");
  Eigen::MatrixXd m(a.ambient_dim(), a.dim() + b.dim());
  m << a.basis(), b.basis();
  return Subspace::span(m);
}

Subspace intersect(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("intersection of subspaces of different spaces");
  if (a.dim() == 0 || b.dim() == 0) return Subspace(a.ambient_dim());
  Eigen::MatrixXd m(a.ambient_dim(), a.dim() + b.dim());
  m << a.basis(), -b.basis();
  Eigen::MatrixXd ker = numerical_nullspace(m, kRankRelTol, 1.0);
  return Subspace::span(a.basis() * ker.topRows(a.dim()));
}

double subspace_distance(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim()) return std::numeric_limits<double>::infinity();
  if (a.dim() == 0) return 0.0;
  Eigen::MatrixXd r = a.basis() - b.basis() * (b.basis().transpose() * a.basis());
  return Eigen::JacobiSVD<Eigen::MatrixXd>(r).singularValues()(0);
}

Subspace symplectic_perp(const Subspace& w, const SymplecticSpace& s) {
  require_ambient(w, s);
  if (w.dim() == 0) return Subspace::full(s.dim());
  Eigen::MatrixXd constraint = w.basis().transpose() * s.omega();
  Subspace out = Subspace::span(numerical_nullspace(constraint));
  if (out.dim() + w.dim() != s.dim()) throw AmbiguityError("symplectic perpendicular has unexpected dimension");
  return out;
}

QMatrix symplectic_perp_exact(const QMatrix& basis, const QMatrix& omega) {
  if (basis.rows() != omega.rows()) throw DimensionError("basis does not live in the symplectic space");
  if (rank(basis) != basis.cols()) throw DimensionError("subspace basis is rank deficient");
  if (basis.cols() == 0) return QMatrix::identity(omega.rows());
  return nullspace(basis.transpose() * omega);
}

bool is_symplectic_subspace(const Subspace& w, const SymplecticSpace& s) {
  require_ambient(w, s);
  if (w.dim() == 0) return true;
  Eigen::MatrixXd g = w.basis().transpose() * s.omega() * w.basis();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  return numerical_rank(svd.singularValues(), kRankRelTol, s.omega().norm()) == w.dim();
}

AdaptedResiduals adapted_residuals(const Eigen::MatrixXd& J, const SymplecticSpace& s) {
  const auto n = J.rows();
  const Eigen::MatrixXd& w = s.omega();
  AdaptedResiduals r;
  r.square_residual = (J * J + Eigen::MatrixXd::Identity(n, n)).norm() / J.squaredNorm();
  r.symplectic_residual = (J.transpose() * w * J - w).norm() / w.norm();
  Eigen::MatrixXd g = w * J;
  Eigen::MatrixXd sym = 0.5 * (g + g.transpose());
  r.min_metric_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return r;
}

AdaptedComplexStructure adapted_complex_structure(const SymplecticSpace& s, const Eigen::MatrixXd& g) {
  const auto n = static_cast<Eigen::Index>(s.dim());
  if (g.rows() != n || g.cols() != n) throw DimensionError("metric has wrong shape");
  if ((g - g.transpose()).norm() > 1e-12 * g.norm()) throw PreconditionError("metric is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw PreconditionError("metric is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd wt = s.omega().transpose();

  AdaptedComplexStructure out;
  out.metric_g = g;
  out.A = llt.solve(wt);

  // In the frame x = L^T v the operator A becomes B = L^{-1} Omega^T L^{-T},
  // which is antisymmetric, so -B^2 = B^T B is symmetric positive definite.
  const Eigen::MatrixXd Linv = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd B = Linv * wt * Linv.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B.transpose() * B);
  if (eig.info() != Eigen::Success) throw ConvergenceError("eigensolver failed on -A^2");
  const Eigen::VectorXd lambda = eig.eigenvalues();
  if (lambda(0) <= 0.0) throw ConvergenceError("-A^2 is not positive definite");
  const Eigen::MatrixXd& Q = eig.eigenvectors();
  const Eigen::VectorXd root = lambda.cwiseSqrt();
  const Eigen::MatrixXd Psq = Q * root.asDiagonal() * Q.transpose();
  const Eigen::MatrixXd Psq_inv = Q * root.cwiseInverse().asDiagonal() * Q.transpose();

  out.P = Linv.transpose() * Psq * L.transpose();
  out.J = Linv.transpose() * (B * Psq_inv) * L.transpose();

  auto r = adapted_residuals(out.J, s);
  if (r.square_residual > 1e-9 || r.symplectic_residual > 1e-9 || r.min_metric_eigenvalue <= 0.0)
    throw ConvergenceError("adapted complex structure failed its invariant checks");
  return out;
}

ConstantRankData constant_rank_split(const Subspace& w, const SymplecticSpace& s, const AdaptedComplexStructure& j) {
  require_ambient(w, s);
  if (static_cast<std::size_t>(j.J.rows()) != s.dim()) throw DimensionError("complex structure has wrong size");
  auto r = adapted_residuals(j.J, s);
  if (r.square_residual > 1e-9 || r.symplectic_residual > 1e-9 || r.min_metric_eigenvalue <= 0.0)
    throw PreconditionError("complex structure is not adapted to the symplectic form");

  const std::size_t d = s.dim();
  const double scale = s.omega().norm();
  ConstantRankData out{Subspace(d), Subspace(d), Subspace(d), Subspace(d)};
  if (w.dim() == 0) {
    out.N = Subspace::full(d);
    return out;
  }
  const Eigen::MatrixXd& W = w.basis();
  Eigen::MatrixXd gram = W.transpose() * s.omega() * W;
  out.nu = Subspace::span(W * numerical_nullspace(gram, kRankRelTol, scale));
  out.Jnu = Subspace::span(j.J * out.nu.basis());

  if (out.nu.dim() == 0) {
    out.E = w;
  } else {
    const Eigen::MatrixXd gJ = s.omega() * j.J;
    Eigen::MatrixXd constraint = out.nu.basis().transpose() * gJ * W;
    out.E = Subspace::span(W * numerical_nullspace(constraint, kRankRelTol, gJ.norm()));
  }
  out.N = symplectic_perp(sum(w, out.Jnu), s);

  if (out.nu.dim() + out.E.dim() != w.dim() || out.Jnu.dim() != out.nu.dim() ||
      out.N.dim() + w.dim() + out.nu.dim() != d)
    throw AmbiguityError("constant-rank split produced inconsistent dimensions");
  return out;
}

GramBlockReport gram_block_report(const ConstantRankData& d, const SymplecticSpace& s) {
  const std::size_t ne = d.E.dim(), nn = d.N.dim(), nv = d.nu.dim();
  Eigen::MatrixXd basis(s.dim(), ne + nn + 2 * nv);
  basis << d.E.basis(), d.N.basis(), d.nu.basis(), d.Jnu.basis();
  Eigen::MatrixXd g = basis.transpose() * s.omega() * basis;

  const std::size_t offs[5] = {0, ne, ne + nn, ne + nn + nv, ne + nn + 2 * nv};
  GramBlockReport r{0.0, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
  for (int bi = 0; bi < 4; ++bi)
    for (int bj = 0; bj < 4; ++bj) {
      const bool allowed = (bi == bj && bi < 2) || (bi == 2 && bj == 3) || (bi == 3 && bj == 2);
      if (allowed) continue;
      const auto rows = static_cast<Eigen::Index>(offs[bi + 1] - offs[bi]);
      const auto cols = static_cast<Eigen::Index>(offs[bj + 1] - offs[bj]);
      if (rows == 0 || cols == 0) continue;
      r.forbidden_block_max = std::max(
          r.forbidden_block_max,
          g.block(static_cast<Eigen::Index>(offs[bi]), static_cast<Eigen::Index>(offs[bj]), rows, cols).cwiseAbs().maxCoeff());
    }
  auto min_sv = [&](std::size_t o, std::size_t p, std::size_t nr, std::size_t nc) {
    if (nr == 0) return std::numeric_limits<double>::infinity();
    Eigen::MatrixXd b = g.block(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(nr),
                                static_cast<Eigen::Index>(nc));
    auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(b).singularValues();
    return sv(sv.size() - 1);
  };
  r.e_min_sv = min_sv(offs[0], offs[0], ne, ne);
  r.n_min_sv = min_sv(offs[1], offs[1], nn, nn);
  r.pairing_min_sv = min_sv(offs[2], offs[3], nv, nv);
  return r;
}

Eigen::VectorXd StructureTensor::bracket(const Eigen::VectorXd& xi, const Eigen::VectorXd& eta) const {
  if (static_cast<std::size_t>(xi.size()) != k_ || static_cast<std::size_t>(eta.size()) != k_)
    throw DimensionError("Lie algebra element has wrong dimension");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k_));
  for (std::size_t a = 0; a < k_; ++a)
    for (std::size_t b = 0; b < k_; ++b) {
      const double w = xi(a) * eta(b);
      if (w == 0.0) continue;
      for (std::size_t c = 0; c < k_; ++c) out(c) += w * (*this)(a, b, c);
    }
  return out;
}

double kks_pairing(const StructureTensor& c, const Eigen::VectorXd& alpha, const Eigen::VectorXd& xi,
                   const Eigen::VectorXd& eta) {
  if (static_cast<std::size_t>(alpha.size()) != c.dim()) throw DimensionError("covector has wrong dimension");
  return c.bracket(xi, eta).dot(alpha);
}

Subspace coadjoint_isotropy(const StructureTensor& c, const Eigen::VectorXd& alpha) {
  const auto k = static_cast<Eigen::Index>(c.dim());
  if (alpha.size() != k) throw DimensionError("covector has wrong dimension");
  // Row b, column a: sum_c c^c_{ab} alpha_c.
  Eigen::MatrixXd m(k, k);
  for (Eigen::Index b = 0; b < k; ++b)
    for (Eigen::Index a = 0; a < k; ++a) {
      double s = 0;
      for (Eigen::Index cc = 0; cc < k; ++cc) s += c(a, b, cc) * alpha(cc);
      m(b, a) = s;
    }
  return Subspace::span(numerical_nullspace(m, kRankRelTol, std::max(1.0, alpha.norm())));
}

OrbitNullComparison orbit_null_comparison(const std::vector<Eigen::MatrixXd>& generators, const StructureTensor& c,
                                          const SymplecticSpace& s, const Eigen::VectorXd& x) {
  if (generators.size() != c.dim()) throw DimensionError("generator count differs from algebra dimension");
  const auto d = static_cast<Eigen::Index>(s.dim());
  const auto k = static_cast<Eigen::Index>(generators.size());
  Eigen::MatrixXd tangent(d, k);
  Eigen::VectorXd alpha(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    tangent.col(a) = generators[a] * x;
    alpha(a) = 0.5 * s.form(tangent.col(a), x);
  }
  OrbitNullComparison out{Subspace::span(tangent), Subspace(s.dim()), Subspace(s.dim()), 0.0};
  const Eigen::MatrixXd& T = out.orbit_tangent.basis();
  if (out.orbit_tangent.dim() > 0) {
    Eigen::MatrixXd gram = T.transpose() * s.omega() * T;
    out.null_of_form = Subspace::span(T * numerical_nullspace(gram, kRankRelTol, s.omega().norm()));
  }
  Subspace ga = coadjoint_isotropy(c, alpha);
  if (ga.dim() > 0) out.isotropy_directions = Subspace::span(tangent * ga.basis());
  out.distance = subspace_distance(out.null_of_form, out.isotropy_directions);
  return out;
}

}  // namespace symred::symplin
