#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "toposval/contexts.hpp"
#include "toposval/linalg.hpp"
#include "toposval/presheaves.hpp"

namespace toposval {

using PosetPtr = std::shared_ptr<const ContextPoset>;

/// An assignment (V1, P) ↦ α_{V1}(P), a set of contexts below V1. Values need
/// not be sieves. Built once from a rule and then frozen as a table.
class MorphismSetValuation {
public:
    /// Membership rule: is V2 in α_{V1}(P)? Only called for V2 ≤ V1.
    using Rule = std::function<bool(std::size_t v1, Mask p, std::size_t v2)>;
    using Table = std::vector<std::vector<ContextSet>>;

    MorphismSetValuation(PosetPtr poset, const Rule& rule, std::string name = {});
    static MorphismSetValuation from_table(PosetPtr poset, Table table, std::string name = {});

    const ContextPoset& poset() const { return *poset_; }
    const PosetPtr& poset_ptr() const { return poset_; }
    const std::string& name() const { return name_; }

    const ContextSet& at(std::size_t v, Mask p) const { return table_.at(v).at(p); }
    /// α_V(P) = true_V, the principal sieve.
    bool is_true(std::size_t v, Mask p) const { return at(v, p) == poset_->down_set(v); }

    const Table& table() const { return table_; }
    friend bool operator==(const MorphismSetValuation& a, const MorphismSetValuation& b) {
        return a.table_ == b.table_;
    }

private:
    MorphismSetValuation(PosetPtr poset, Table table, std::string name);

    PosetPtr poset_;
    Table table_;
    std::string name_;
};

/// A morphism-set valuation all of whose values are sieves.
class Valuation {
public:
    /// Throws unless every value is a sieve on its context.
    explicit Valuation(MorphismSetValuation values);

    Sieve evaluate(std::size_t v, Mask p) const;
    const MorphismSetValuation& values() const { return values_; }
    const ContextPoset& poset() const { return values_.poset(); }

private:
    MorphismSetValuation values_;
};

struct ValuationParams {
    double r;
    explicit ValuationParams(double r_);
};

/// ν^ρ: V2 ∈ ν^ρ_{V1}(P) iff ρ makes 𝐆(i_{V2V1})(P) certain.
Valuation nu_rho(const DensityMatrix& rho, PosetPtr poset);

/// ν^{ρ,r}: V2 ∈ ν^{ρ,r}_{V1}(P) iff tr(ρ 𝐆(i_{V2V1})(P)) ≥ r.
MorphismSetValuation nu_rho_r(const DensityMatrix& rho, ValuationParams params, PosetPtr poset);

struct TruthSet {
    std::size_t context;
    std::vector<Mask> members;
};

TruthSet truth_set(const MorphismSetValuation& alpha, std::size_t v);

/// inf T(V). When T(V) is empty the lattice infimum is 1̂ and `degenerate` is set.
struct Support {
    Mask mask;
    bool degenerate;
};

Support support(const MorphismSetValuation& alpha, std::size_t v);

/// 𝐈(V) = ⋂_{P∈T(V)} V(P), all of σ(V) when T(V) is empty.
Mask interval(const MorphismSetValuation& alpha, std::size_t v);

GlobalElementG supports_of(const MorphismSetValuation& alpha);
SubobjectSigma intervals_of(const MorphismSetValuation& alpha);
bool has_degenerate_support(const MorphismSetValuation& alpha);

/// (V1, V2, P, Q) locating a failing check. Unused fields are zero.
struct Witness {
    std::size_t v1 = 0;
    std::size_t v2 = 0;
    Mask p = 0;
    Mask q = 0;
};

struct CheckResult {
    bool holds = true;
    std::optional<Witness> witness;

    void fail(Witness w) {
        if (holds) {
            holds = false;
            witness = w;
        }
    }
};

struct Definition3Report {
    CheckResult sieve_valued;
    CheckResult functional_composition;
    CheckResult null_proposition;
    CheckResult monotonicity;
    CheckResult exclusivity;
    CheckResult unit_proposition;

    bool all_clauses() const {
        return functional_composition.holds && null_proposition.holds && monotonicity.holds &&
               exclusivity.holds && unit_proposition.holds;
    }
};

Definition3Report check_definition3(const MorphismSetValuation& alpha);

/// s(α,V2) ≥ s(α,V1) for V2 ⊆ V1.
CheckResult check_subobject_condition(const MorphismSetValuation& alpha);

/// s(α,V2) = 𝐆(i_{V2V1})(s(α,V1)) for V2 ⊆ V1.
CheckResult check_global_element_condition(const MorphismSetValuation& alpha);

/// α^a_{V1}(P) = {V2 : a(V2) ≤ 𝐆(i_{V2V1})(P)}. `a` need not satisfy the matching law.
MorphismSetValuation alpha_from_global_element(PosetPtr poset, const GlobalElementG& a);

/// α^a_{V1}(P) = {V2 : a(V2) ⊆ V1(P)|_{V2}}. `a` need not be a subobject.
MorphismSetValuation alpha_from_subobject(PosetPtr poset, const SubobjectSigma& a);

/// First (V1, V2, P) where two valuations on the same poset differ.
std::optional<Witness> first_difference(const MorphismSetValuation& a, const MorphismSetValuation& b);

struct ReconstructionReport {
    MorphismSetValuation reconstructed;
    bool equal;
    std::optional<Witness> difference;
    bool condition_i;
    /// equal ⇔ condition (i)
    bool consistent() const { return equal == condition_i; }
};

/// α^{s^α}, compared with α.
ReconstructionReport reconstruct_from_supports(const MorphismSetValuation& alpha);
/// α^{𝐈^α}, compared with α.
ReconstructionReport reconstruct_from_intervals(const MorphismSetValuation& alpha);

struct TheoremReport {
    bool degenerate = false;
    CheckResult condition_i;
    CheckResult condition_ii;
    CheckResult sievehood;
    CheckResult functional_composition;
    CheckResult characterization;
    /// Second route to condition (i) through V2(𝐆(P)) instead of V1(P)|_{V2}.
    /// Only populated by theorem2_verify.
    std::optional<CheckResult> condition_i_via_iso;

    bool conditions_hold() const { return condition_i.holds && condition_ii.holds; }
    bool conclusions_hold() const {
        return sievehood.holds && functional_composition.holds && characterization.holds;
    }
    /// (i) ∧ (ii) ⇒ (a) ∧ (b) ∧ (c), and (i) ⇒ (b).
    bool contract_holds() const;
};

TheoremReport theorem1_verify(const MorphismSetValuation& alpha);
TheoremReport theorem2_verify(const MorphismSetValuation& alpha);

struct SupportMatchWitness {
    std::uint64_t seed;
    std::size_t draw;
    double r;
    Matrix rho;
    PosetPtr poset;
    Witness witness;
};

/// Seeded search over `draws` (ρ, r, poset) triples for a violation of the
/// support-matching law by ν^{ρ,r}. Absence means "not found", not "holds".
std::optional<SupportMatchWitness> search_support_match_violation(std::uint64_t seed, std::size_t draws = 200);

nlohmann::json dump(const MorphismSetValuation& alpha);
nlohmann::json to_json(const ContextPoset& poset, const CheckResult& r);
nlohmann::json to_json(const ContextPoset& poset, const Definition3Report& r);
nlohmann::json to_json(const ContextPoset& poset, const TheoremReport& r);

}  // namespace toposval
