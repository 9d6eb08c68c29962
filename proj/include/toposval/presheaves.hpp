#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"

#include "toposval/contexts.hpp"

namespace toposval {

/// A character κ ∈ σ(V), identified with the atom it selects.
struct Character {
    std::size_t context;
    std::size_t atom;

    friend bool operator==(const Character&, const Character&) = default;
};

/// Σ(i_{V2V1}): restriction of a character of V1 to the subalgebra V2.
Character sigma_restrict(const ContextPoset& poset, std::size_t v2, std::size_t v1, Character kappa);

/// 𝐆(i_{V2V1}): the least element of ℒ(V2) above P ∈ ℒ(V1). Computed from the
/// atoms of V2 that meet P.
Mask coarse_grain(const ContextPoset& poset, std::size_t v2, std::size_t v1, Mask p);

/// Clo Σ(i_{V2V1}): image of a set of characters of V1 under restriction.
Mask clo_sigma_restrict(const ContextPoset& poset, std::size_t v2, std::size_t v1, Mask characters);

/// The V1-lattice mask of Q ∈ ℒ(V2) ⊆ ℒ(V1).
Mask embed(const ContextPoset& poset, std::size_t v2, std::size_t v1, Mask q);

/// A downward-closed set of subcontexts of `apex`, bound to one poset.
class Sieve {
public:
    /// Validates apex-boundedness and downward closure against `poset`.
    Sieve(const ContextPoset& poset, std::size_t apex, ContextSet members);

    static Sieve principal(const ContextPoset& poset, std::size_t apex);
    static Sieve empty(const ContextPoset& poset, std::size_t apex);

    std::size_t apex() const { return apex_; }
    const ContextSet& members() const { return members_; }
    std::uint64_t poset_version() const { return version_; }
    bool contains(std::size_t v) const { return members_.test(v); }

    friend bool operator==(const Sieve&, const Sieve&) = default;

private:
    std::size_t apex_;
    ContextSet members_;
    std::uint64_t version_;
};

/// True iff `members` is contained in ↓apex and closed downward.
bool is_sieve(const ContextPoset& poset, std::size_t apex, const ContextSet& members);

/// Ω(i_{V2V1}): {V3 ≤ V2 : V3 ∈ S}.
Sieve pullback(const ContextPoset& poset, std::size_t v2, const Sieve& s);

/// Raw pullback on member sets that need not be sieves.
ContextSet pullback_members(const ContextPoset& poset, std::size_t v2, const ContextSet& members);

struct NatIsoFailure {
    std::size_t v1;
    std::size_t v2;
    Mask mask;
    Mask lhs;
    Mask rhs;
};

struct NatIsoReport {
    std::size_t pairs_checked = 0;
    std::size_t elements_checked = 0;
    std::vector<NatIsoFailure> failures;
    bool passed() const { return failures.empty(); }
};

/// Checks V1(P)|_{V2} = V2(𝐆(i_{V2V1})(P)) for every comparable pair and every
/// P ∈ ℒ(V1), and injectivity of P ↦ V(P) at each stage.
NatIsoReport check_nat_iso(const ContextPoset& poset);

nlohmann::json to_json(const ContextPoset& poset, const NatIsoReport& report);

/// An assignment of one lattice element per context. A global element of 𝐆
/// when the matching law γ(V2) = 𝐆(i_{V2V1})(γ(V1)) holds.
struct GlobalElementG {
    std::vector<Mask> assignment;
};

/// An assignment of a set of characters per context. A subobject of Σ when
/// restrictions land inside: a(V1)|_{V2} ⊆ a(V2); tight when equality holds.
struct SubobjectSigma {
    std::vector<Mask> assignment;
};

struct LawViolation {
    std::size_t v1;
    std::size_t v2;
};

std::optional<LawViolation> matching_law_violation(const ContextPoset& poset, const GlobalElementG& g);
std::optional<LawViolation> subobject_law_violation(const ContextPoset& poset, const SubobjectSigma& s);
std::optional<LawViolation> tightness_violation(const ContextPoset& poset, const SubobjectSigma& s);

/// 𝐈^γ(V) = V(γ(V)). Rejects assignments that violate the matching law.
SubobjectSigma subobject_from_global_element(const ContextPoset& poset, const GlobalElementG& g);

}  // namespace toposval
