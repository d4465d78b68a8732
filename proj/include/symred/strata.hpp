#pragma once

// Orbit-type stratification of the reduced space F^{-1}(0)/K, symplectic
// slice models, per-stratum regular reduction by N(H)/H on V^H, and the
// abelian model-space level-set check.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symred/groups.hpp"
#include "symred/qmatrix.hpp"
#include "symred/symplin.hpp"

namespace symred::strata {

struct SamplerResult {
  std::vector<Eigen::VectorXd> points;
  std::size_t requested = 0;
  std::size_t shortfall = 0;  // starts whose Newton iteration did not converge
};

/// Projected Newton from pseudo-random starts in the ball of the given
/// radius; accepted points satisfy |F(v)| <= 1e-12.
SamplerResult zero_level_sampler(const groups::MomentumMap& f, std::size_t count, double radius, std::uint64_t seed);

/// Intersection lattice of the fixed spaces of the listed elements, each
/// subspace as a canonical exact basis (columns), largest first.
std::vector<QMatrix> fixed_space_lattice(const groups::FiniteGroup& g, const groups::Subgroup& elements);

/// Strictly positive vector r on the support with sum_j r_j a_j = 0, when the
/// support is covered by positive circuits of the weight columns.
std::optional<std::vector<Rational>> positive_support_vector(const std::vector<IntVector>& columns,
                                                             const std::vector<std::size_t>& support);

struct StratumDescriptor {
  std::string isotropy_class;
  groups::Subgroup subgroup;                       // finite groups: canonical representative
  groups::TorusIsotropy torus_isotropy;            // tori: class data
  std::vector<std::vector<std::size_t>> supports;  // tori: realized support patterns
  QMatrix fixed_space;                             // exact basis of V^H (columns)
  std::size_t fixed_dim = 0;
  std::size_t stratum_dim = 0;
  std::vector<std::string> closure_neighbors;      // classes whose stratum closure contains this one
  nlohmann::json slice_rep;
};

struct ClassInfo {
  std::string id;
  std::string description;
  bool realized = false;
};

struct Stratification {
  std::vector<StratumDescriptor> strata;  // ordered by stratum dimension, then class id
  std::vector<ClassInfo> classes;         // every isotropy candidate, realized or not
  std::vector<std::pair<std::size_t, std::size_t>> hasse;  // covering pairs (lower, upper)
  std::vector<std::vector<bool>> below;   // below[i][j]: stratum i lies in the closure of stratum j
  std::size_t index_of(const std::string& id) const;
};

/// Finite groups and tori.
Stratification enumerate_strata(const groups::Group& g, const symplin::SymplecticSpace& s,
                                const groups::MomentumMap& f);

/// A point of the stratum (exact for finite groups).
Eigen::VectorXd stratum_point(const groups::Group& g, const StratumDescriptor& d, std::uint64_t seed);

struct FrontierReport {
  std::size_t pairs_checked = 0;
  std::size_t failures = 0;
  std::vector<std::string> messages;
};

/// Along x_t -> x with x in a lower stratum and x_t in an upper one, the
/// isotropy of the limit contains a conjugate of the isotropy along the path.
FrontierReport frontier_diagnostic(const groups::Group& g, const Stratification& st, std::uint64_t seed);

struct SliceModel {
  Eigen::VectorXd base_point;
  std::string isotropy_class;  // empty for Lie algebra data
  symplin::Subspace slice;     // W, orthonormal basis in R^{2n}
  std::size_t orbit_dim = 0;
  std::size_t nu_dim = 0;
  std::size_t isotropy_algebra_dim = 0;
  groups::Subgroup stabilizer;                // finite groups
  groups::TorusIsotropy torus_isotropy;       // tori
  Eigen::MatrixXd isotropy_algebra;           // orthonormal basis of h in R^k (columns)
  std::vector<Eigen::MatrixXd> slice_hessians;  // F_W components in W coordinates
  std::vector<Eigen::MatrixXd> slice_generators;  // h generators in W coordinates

  Eigen::VectorXd slice_momentum(const Eigen::VectorXd& w) const;
  /// Dimension of the part of W fixed by the isotropy algebra.
  std::size_t trivial_part_dim() const;
};

/// Requires |F(x)| <= 1e-10; the slice is the symplectic normal space N of
/// the constant-rank split of the orbit tangent (adapted J from g = I).
SliceModel slice_model(const Eigen::VectorXd& x, const groups::Group& g, const symplin::SymplecticSpace& s,
                       const groups::MomentumMap& f, double tol = 1e-9);

struct LocalModelReport {
  bool match = false;
  bool partial = false;  // Lie algebra data: dimensions only
  std::vector<std::pair<std::string, std::size_t>> slice_side;
  std::vector<std::pair<std::string, std::size_t>> global_side;
  nlohmann::json details;
};

LocalModelReport local_model_match(const Eigen::VectorXd& x, const groups::Group& g, const symplin::SymplecticSpace& s,
                                   const groups::MomentumMap& f, const Stratification* st, double tol = 1e-9);

struct MwmReport {
  std::string isotropy_class;
  std::size_t normalizer_order = 0;  // finite groups
  std::size_t quotient_dim = 0;      // dim L for tori, 0 for finite groups
  std::size_t fixed_dim = 0;
  std::size_t momentum_rank = 0;
  std::size_t orbit_dim = 0;
  std::size_t reduced_dim = 0;
  bool free_action = false;
  bool representatives_checked = false;  // a canonical quotient representative exists for this case
  bool representatives_agree = false;
  bool matches_stratum = false;
};

MwmReport mwm_stratum(const groups::Group& g, const symplin::SymplecticSpace& s, const groups::MomentumMap& f,
                      const Stratification& st, std::size_t index, std::uint64_t seed);

struct LevelSetReport {
  std::size_t samples = 0;
  std::size_t solutions = 0;
  std::size_t counterexamples = 0;
  std::size_t shifted_zero_section_hits = 0;  // must stay 0 when the target is shifted
  double max_lambda = 0.0;
  double max_slice_momentum = 0.0;
};

LevelSetReport abelian_model_level_set(const groups::Group& g, const SliceModel& slice, const symplin::SymplecticSpace& s,
                                       std::size_t samples, std::uint64_t seed);

nlohmann::json to_json(const Stratification& st);

}  // namespace symred::strata
