#pragma once

// Integer normal forms for sublattices of Z^k. A torus subgroup is the
// annihilator of a sublattice of its character lattice, so these normal forms
// give exact, canonical names for torus isotropy groups.

#include <gmpxx.h>

#include <vector>

namespace symred {

using IntVector = std::vector<mpz_class>;
using IntMatrix = std::vector<IntVector>;  // row-major, rows are lattice vectors

/// Row-style Hermite normal form of the lattice spanned by the rows of m:
/// nonzero rows only, pivots strictly increasing and positive, entries above a
/// pivot reduced into [0, pivot). Two row sets span the same lattice iff their
/// HNFs are equal.
IntMatrix hermite_normal_form(const IntMatrix& m, std::size_t cols);

/// Nonzero Smith invariant factors d_1 | d_2 | ... of m (all positive).
std::vector<mpz_class> smith_invariant_factors(const IntMatrix& m, std::size_t cols);

/// Integer basis (rows) of {x in Z^cols : m x = 0}, returned in HNF.
IntMatrix integer_kernel(const IntMatrix& m, std::size_t cols);

}  // namespace symred
