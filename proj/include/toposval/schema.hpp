#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "toposval/contexts.hpp"
#include "toposval/ocat.hpp"
#include "toposval/presheaves.hpp"
#include "toposval/valuations.hpp"

namespace toposval {

/// A binary relation between two propositions of the same stage. `stage` is a
/// context index (or an operator index on 𝒪); `lhs` and `rhs` are masks over
/// that stage's atoms (or spectrum).
struct Relation {
    std::string name;
    std::function<bool(std::size_t stage, Mask lhs, Mask rhs)> test;
};

Relation relation_leq();
Relation relation_geq();
Relation relation_equal();
Relation relation_nonzero_product();
Relation relation_always();
Relation relation_never();
/// ⊆ on character sets or eigenvalue subsets; the same mask test as ≤.
Relation relation_subset();

/// ≤, ≥, =, nonzero product, always, never.
std::vector<Relation> builtin_relations();
/// Lookup by name: leq, geq, eq, nonzero-product, always, never, subset.
Relation builtin_relation(const std::string& name);

/// A seeded boolean table indexed by (stage, lhs, rhs). `atom_counts[s]` is the
/// number of atoms of stage s; at most 8 per stage.
Relation random_relation(const std::vector<std::size_t>& atom_counts, std::uint64_t seed);
Relation random_relation(const ContextPoset& poset, std::uint64_t seed);

/// α^{a,R}_{V1}(P) = {V2 : a(V2) R 𝐆(i_{V2V1})(P)}. Throws unless `a` obeys the matching law.
MorphismSetValuation alpha_a_R(PosetPtr poset, const GlobalElementG& a, const Relation& r);

/// α^{a,R}_{V1}(P) = {V2 : a(V2) R V1(P)|_{V2}}. Throws unless `a` is a subobject of Σ.
MorphismSetValuation alpha_a_R_sigma(PosetPtr poset, const SubobjectSigma& a, const Relation& r);

/// α^{a,R}(A ∈ Δ) = {f: B → A : a(B) R f(Δ)}, indexed [A][Δ] over objects.
std::vector<std::vector<ContextSet>> alpha_a_R_o(const OCategory& category, const std::vector<Mask>& a,
                                                 const Relation& r);

enum class PropertyStatus { holds_exhaustively, witness_of_failure, not_found_after_search };

std::string to_string(PropertyStatus s);

/// Stages and propositions locating a failure. Fields a property does not use stay zero.
struct PropertyWitness {
    std::size_t v1 = 0;
    std::size_t v2 = 0;
    std::size_t v3 = 0;
    Mask p = 0;
    Mask q = 0;

    friend bool operator==(const PropertyWitness&, const PropertyWitness&) = default;
};

struct PropertyOutcome {
    bool holds = true;
    std::optional<PropertyWitness> witness;
    /// Whether the witness (if any) failed again when re-evaluated from scratch.
    bool replayed = true;

    void fail(PropertyWitness w) {
        if (holds) {
            holds = false;
            witness = w;
        }
    }
};

struct PropertyCheck {
    /// Read off the valuation's values.
    PropertyOutcome direct;
    /// The condition on R that is equivalent to the property.
    PropertyOutcome characterization;
    /// A condition on R that implies the property, for sievehood and monotonicity.
    std::optional<PropertyOutcome> sufficient;

    PropertyStatus status() const {
        return direct.holds ? PropertyStatus::holds_exhaustively : PropertyStatus::witness_of_failure;
    }
    bool consistent() const;
};

enum class Property : std::size_t { sieve, functional_composition, null_proposition, monotonicity, exclusivity, unit };

inline constexpr std::array<const char*, 6> kPropertyNames = {
    "sieve", "functionalComposition", "nullProposition", "monotonicity", "exclusivity", "unitProposition"};

struct PropertyReport {
    std::string relation;
    std::string variant;
    std::vector<std::string> stage_ids;
    std::array<PropertyCheck, 6> properties;
    /// Regularity conditions for the Σ and 𝒪 schemas: name → satisfied.
    std::vector<std::pair<std::string, bool>> regularity;

    const PropertyCheck& operator[](Property p) const { return properties[static_cast<std::size_t>(p)]; }
    bool all_hold() const;
    bool consistent() const;
};

PropertyReport survey_properties(PosetPtr poset, const GlobalElementG& a, const Relation& r);
PropertyReport survey_properties_sigma(PosetPtr poset, const SubobjectSigma& a, const Relation& r);
PropertyReport survey_properties_o(const OCategory& category, const std::vector<Mask>& a, const Relation& r);

/// s(state, A) for every object.
std::vector<Mask> elementary_supports(const QuantumState& state, const OCategory& category);

struct SieveFailureSearch {
    PropertyStatus status = PropertyStatus::not_found_after_search;
    std::size_t draws = 0;
    std::optional<PropertyWitness> witness;
    PosetPtr poset;
    std::optional<GlobalElementG> element;
};

/// Seeded search for a sievehood failure of α^{a,R}: the fixed poset first (if
/// given), then random posets, each with global elements drawn as supports of
/// random ν^ρ and as constant-1̂ assignments.
SieveFailureSearch search_sieve_failure(const Relation& r, PosetPtr first, std::uint64_t seed,
                                        std::size_t draws);

nlohmann::json to_json(const PropertyReport& report);

}  // namespace toposval
