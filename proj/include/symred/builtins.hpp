#pragma once

// The four bundled models: the Z2 cone, the circle with weights (1, -1),
// the Klein four-group on R^4, and the rotation group on T*R^3 with a
// harmonic central force.

#include <optional>
#include <string>
#include <vector>

#include "symred/groups.hpp"
#include "symred/poly.hpp"
#include "symred/symplin.hpp"

namespace symred {

struct Model {
  std::string name;
  symplin::SymplecticSpace space;
  groups::GroupSpec group;
  std::optional<Poly> hamiltonian;
  /// Name of a black-box Hamiltonian, e.g. "central_force" (empty if polynomial).
  std::string hamiltonian_builtin;
};

std::vector<std::string> builtin_names();
/// Throws ConfigError for an unknown name.
Model builtin_model(const std::string& name);

/// Rotation generators of so(3) acting diagonally on (q, p) in R^6,
/// [X_1, X_2] = X_3.
std::vector<QMatrix> so3_basis();

}  // namespace symred
