#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "toposval/contexts.hpp"
#include "toposval/linalg.hpp"

namespace toposval {

/// A finite set of rays in a real Hilbert space grouped into orthogonal bases.
/// Vectors are stored unnormalized, as listed.
struct KsFixture {
    std::size_t dim;
    std::vector<std::vector<Vector>> bases;
};

/// The 18-ray, 9-basis set in dimension 4.
KsFixture cabello_fixture();

struct FixtureValidation {
    bool orthogonal = true;
    /// Every ray (up to phase) occurs in exactly two bases.
    bool shared_twice = true;
    std::size_t distinct_rays = 0;
    /// Counting argument: each basis needs one ray valued 1, each ray is counted
    /// twice, so an odd number of bases admits no assignment.
    bool parity_obstruction = false;
    std::string message;

    bool valid() const { return orthogonal && shared_twice; }
};

FixtureValidation validate_fixture(const KsFixture& fixture);

/// Contexts of the fixture closed under meets, plus the trivial context.
/// Throws if validation fails.
ContextPoset ks_poset(const KsFixture& fixture);

/// One atom per context.
struct SectionAssignment {
    std::vector<std::size_t> atoms;
};

struct SectionSearchResult {
    std::optional<SectionAssignment> section;
    std::size_t nodes_explored = 0;

    bool exists() const { return section.has_value(); }
};

/// Backtracking over maximal contexts with downward propagation of the chosen
/// atoms. `reverse_order` visits maximal contexts and atoms in reverse.
SectionSearchResult global_section_search(const ContextPoset& poset, bool reverse_order = false);

/// Matching law on every comparable pair, and agreement of the induced
/// valuation functionals on each coarser context's atoms.
bool section_verify(const ContextPoset& poset, const SectionAssignment& s);

nlohmann::json to_json(const ContextPoset& poset, const SectionSearchResult& r);

}  // namespace toposval
