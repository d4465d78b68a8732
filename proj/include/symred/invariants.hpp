#pragma once

// Invariant polynomial rings, Hilbert maps, and the reduced Poisson
// structure on the Hilbert-map image.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include <json.hpp>

#include "symred/groups.hpp"
#include "symred/poly.hpp"
#include "symred/symplin.hpp"

namespace symred::invariants {

/// {f, g} = grad(f)^T Omega^{-T} grad(g); for the standard form
/// sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i.
Poly poisson_bracket(const Poly& f, const Poly& g, const symplin::SymplecticSpace& s);

Poly reynolds(const Poly& f, const groups::FiniteGroup& g);

/// Coefficients of t^0..t^dmax of the Molien series (exact).
std::vector<Rational> molien_series(const groups::FiniteGroup& g, int dmax);
mpz_class molien_dimension(const groups::FiniteGroup& g, int d);

struct DegreeCount {
  int degree = 0;
  std::size_t invariant_dim = 0;  // dimension of degree-d invariants found directly
  std::size_t product_dim = 0;    // span of degree-d products of the generators
  std::optional<mpz_class> expected;  // Molien coefficient or weight count, when available
};

struct HilbertMap {
  std::size_t phase_dim = 0;
  std::vector<Poly> generators;
  std::vector<int> degrees;
  int degree_bound = 0;
  /// True when every degree up to the bound is spanned by generator products
  /// (and, for finite groups and tori, matches the independent count).
  bool complete = false;
  std::vector<DegreeCount> counts;
  std::vector<Poly> relations;  // polynomials in y1..ym vanishing on the image

  std::size_t size() const { return generators.size(); }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& v) const;
};

/// Degree-by-degree generator search. Default bounds: |K| for finite groups,
/// 2 n max|weight| for tori, 4 for Lie algebras.
HilbertMap invariant_generators(const groups::Group& g, std::optional<int> degree_bound = std::nullopt);

/// Basis of the degree-d invariants in canonical echelon form.
std::vector<Poly> invariant_basis(const groups::Group& g, int d);

/// Exponent vectors e over m generators with sum e_i deg_i = d, descending
/// graded-lex.
std::vector<Exponents> weighted_monomials(const std::vector<int>& degrees, int d);

/// F in y1..ym with F(p(v)) = f(v) exactly; throws ExpressibilityError.
Poly express_in_generators(const Poly& f, const HilbertMap& h);

/// Relations among the generators up to the given weighted degree, each one
/// not implied by lower-degree relations, in reduced echelon form.
std::vector<Poly> generator_relations(const HilbertMap& h, int max_degree);

struct PoissonStructure {
  std::size_t m = 0;
  std::vector<Poly> entries;  // row-major m x m, polynomials in y
  const Poly& operator()(std::size_t i, std::size_t j) const { return entries[i * m + j]; }
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& y) const;
};

PoissonStructure reduced_structure_matrix(const HilbertMap& h, const symplin::SymplecticSpace& s);

struct StructureChecks {
  bool antisymmetric = false;
  bool substitution_exact = false;  // Lambda_ij(p(v)) == {p_i, p_j}(v)
  bool jacobi_exact = false;        // cyclic {p_i,{p_j,p_k}} == 0
  bool closure_invariant = false;   // every {p_i, p_j} is invariant
  bool noether_exact = false;       // {p_i, F_a} == 0
};

StructureChecks check_structure(const HilbertMap& h, const PoissonStructure& lambda, const groups::Group& g,
                                const groups::MomentumMap& f, const symplin::SymplecticSpace& s);

/// Exact invariance of a polynomial under the group (finite: every element;
/// torus and Lie algebra: infinitesimal generators).
bool is_invariant(const Poly& f, const groups::Group& g);

struct IdealDiagnostic {
  double max_residual = 0.0;     // max |{f, h}(v)| over samples and test functions
  bool exact_membership = false;  // {f, |F|^2} reduces to 0 modulo (F_1..F_k)
  std::size_t test_functions = 0;
};

/// Test family: |F|^2, f |F|^2, F_a F_b, plus `extra` when given. Throws
/// PreconditionError if some test function does not vanish on the samples.
IdealDiagnostic poisson_ideal_diagnostic(const Poly& f, const groups::MomentumMap& mm,
                                         const std::vector<Eigen::VectorXd>& samples,
                                         const symplin::SymplecticSpace& s,
                                         const std::optional<Poly>& extra = std::nullopt);

nlohmann::json to_json(const HilbertMap& h);
nlohmann::json to_json(const PoissonStructure& p);

}  // namespace symred::invariants
