#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "toposval/contexts.hpp"
#include "toposval/linalg.hpp"

namespace toposval {

/// Spectral decomposition of a discrete-spectrum self-adjoint operator. In
/// finite dimension every operator qualifies.
class ODecomposition {
public:
    explicit ODecomposition(HermitianOperator op, double tol_group = tol::group);

    const HermitianOperator& op() const { return op_; }
    std::size_t dim() const { return op_.dim(); }
    /// Number of distinct eigenvalues.
    std::size_t size() const { return spectrum_.size(); }
    const std::vector<double>& spectrum() const { return spectrum_; }
    const std::vector<Projector>& eigenprojectors() const { return projectors_; }
    Mask full_mask() const { return (Mask{1} << size()) - 1; }

    /// Ê[A ∈ Δ], with Δ a mask over the spectrum indices.
    Projector spectral_projector(Mask delta) const;
    /// Index of the eigenvalue equal to `value` within 1e-8.
    std::optional<std::size_t> index_of(double value) const;
    /// Real values of the eigenvalues selected by `delta`.
    std::vector<double> values(Mask delta) const;

private:
    HermitianOperator op_;
    std::vector<double> spectrum_;
    std::vector<Projector> projectors_;
};

/// A Borel function restricted to σ(A): image[i] = f(λ_i).
struct EigenvalueMap {
    std::vector<double> image;
};

/// Subsets Δ ⊆ σ(A) are masks over the spectrum indices of their anchor operator.
using EigenvalueSubset = Mask;

using QuantumState = std::variant<StateVector, DensityMatrix>;

/// f with B = f(A), if one exists.
std::optional<EigenvalueMap> discover_morphism(const ODecomposition& b, const ODecomposition& a);

/// f(Δ) as a mask over the spectrum of B = f(A).
Mask image_mask(const EigenvalueMap& f, const ODecomposition& a, Mask delta, const ODecomposition& b);

struct OCoarseGrain {
    /// Ê[A ∈ f⁻¹(f(Δ))]
    Projector direct;
    /// inf{Q ∈ W_{f(A)} : Ê[A∈Δ] ≤ Q}, with W_{f(A)} built from an independent
    /// decomposition of f(A).
    Projector infimum;
    bool agree;
};

/// 𝐆(f_𝒪)(Ê[A∈Δ]) = Ê[f(A) ∈ f(Δ)] computed two ways.
OCoarseGrain o_coarse_grain(const EigenvalueMap& f, const ODecomposition& a, Mask delta);

/// The smallest Δ ⊆ σ(A) to which the state assigns probability one.
Mask elementary_support(const QuantumState& state, const ODecomposition& a);

/// Probability-one test for either kind of state.
bool state_certain(const QuantumState& state, const Projector& p);

/// A finite full subcategory of 𝒪_d. Morphisms are discovered pairwise.
class OCategory {
public:
    static OCategory build(std::vector<std::pair<std::string, HermitianOperator>> operators);

    std::size_t size() const { return objects_.size(); }
    std::size_t dim() const { return objects_.front().dim(); }
    const ODecomposition& object(std::size_t i) const { return objects_.at(i); }
    const std::string& id(std::size_t i) const { return ids_.at(i); }
    /// The morphism B → A (B = f(A)), if any.
    const std::optional<EigenvalueMap>& hom(std::size_t b, std::size_t a) const { return hom_.at(b).at(a); }
    /// All objects with a morphism into `a`, as a bit set over objects.
    ContextSet sources(std::size_t a) const;

private:
    std::vector<std::string> ids_;
    std::vector<ODecomposition> objects_;
    std::vector<std::vector<std::optional<EigenvalueMap>>> hom_;
};

struct CompositionReport {
    bool reflexive = true;
    bool closed = true;
    std::optional<std::pair<std::size_t, std::size_t>> witness;
};

/// Identities exist and f: B→A, g: C→B give h: C→A with h = g∘f on σ(A).
CompositionReport check_composition(const OCategory& category);

/// ν(A ∈ Δ): sources B whose coarse-grained proposition is certain.
ContextSet nu_psi_o(const QuantumState& state, const OCategory& category, std::size_t a, Mask delta);

struct CharacterizationReport {
    ContextSet definitional;
    ContextSet via_support;
    bool equal() const { return definitional == via_support; }
};

/// ν(A ∈ Δ) against {f : f(Δ) ⊇ f(s(state, A))}.
CharacterizationReport characterize_check(const QuantumState& state, const OCategory& category, std::size_t a,
                                          Mask delta);

struct FuncSubsetReport {
    bool subset = true;
    bool equal = true;
    std::optional<std::size_t> witness;  // offending source B
};

/// f(s(state, A)) ⊆ s(state, f(A)) and equality, over all morphisms into A.
FuncSubsetReport func_subset_check(const QuantumState& state, const OCategory& category, std::size_t a);

/// ν(A ∈ Δ) closed under precomposition.
bool nu_psi_o_is_sieve(const QuantumState& state, const OCategory& category, std::size_t a, Mask delta);

nlohmann::json morphism_report(const OCategory& category);

}  // namespace toposval
