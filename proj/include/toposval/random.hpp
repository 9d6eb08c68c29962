#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "toposval/contexts.hpp"
#include "toposval/linalg.hpp"

namespace toposval {

/// Every seeded schedule in the library draws from this engine.
using Rng = std::mt19937_64;

/// Haar-like unitary from the QR decomposition of a complex Gaussian matrix.
Matrix random_unitary(std::size_t dim, Rng& rng);

StateVector random_state(std::size_t dim, Rng& rng);

/// Mixture of `rank` random pure states (rank 0 picks a random rank).
DensityMatrix random_density(std::size_t dim, Rng& rng, std::size_t rank = 0);

/// A state adapted to the poset: often a mixture of atoms of one of its
/// contexts, so supports are nontrivial; otherwise a generic random state.
DensityMatrix random_density_for(const ContextPoset& poset, Rng& rng);

/// U·diag(values)·U† for a random unitary U.
HermitianOperator random_operator_with_spectrum(const std::vector<double>& values, Rng& rng);

struct RandomPosetOptions {
    std::size_t min_dim = 2;
    std::size_t max_dim = 6;
    std::size_t max_contexts = 12;
    std::size_t max_atoms = 6;
};

/// A few random bases, each refined into one or two maximal contexts with
/// chains of coarsenings, optionally closed under meets, plus the trivial
/// context.
ContextPoset random_poset(Rng& rng, const RandomPosetOptions& options = {});

}  // namespace toposval
