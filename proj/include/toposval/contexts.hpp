#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "toposval/linalg.hpp"

namespace toposval {

/// Bit set over the atoms of one context. A lattice element P ∈ ℒ(V) and a
/// clopen set of characters V(P) share this encoding.
using Mask = std::uint32_t;

/// Set of contexts of a poset, indexed by position.
using ContextSet = boost::dynamic_bitset<>;

inline constexpr std::size_t kMaxAtoms = 20;

inline bool mask_subset(Mask a, Mask b) { return (a & ~b) == 0; }

/// A commutative algebra presented by its minimal projectors. Atoms are kept in
/// canonical order so that equal algebras compare equal independent of how
/// they were generated.
class Context {
public:
    Context(std::string id, std::vector<Projector> atoms);

    /// The one-atom algebra {λ·1̂}.
    static Context trivial(std::size_t dim, std::string id = "triv");

    const std::string& id() const { return id_; }
    std::size_t dim() const { return atoms_.front().dim(); }
    std::size_t atom_count() const { return atoms_.size(); }
    const std::vector<Projector>& atoms() const { return atoms_; }
    const Projector& atom(std::size_t i) const { return atoms_.at(i); }

    Mask full_mask() const { return atom_count() == 32 ? ~Mask{0} : (Mask{1} << atom_count()) - 1; }
    bool valid_mask(Mask m) const { return mask_subset(m, full_mask()); }

    /// The projector Σ_{i∈mask} atom_i.
    Projector lift(Mask mask) const;

    bool same_algebra(const Context& other) const;
    Context renamed(std::string id) const;

private:
    std::string id_;
    std::vector<Projector> atoms_;
};

/// Joint spectral refinement of pairwise commuting operators.
Context context_from_operators(std::string id, const std::vector<HermitianOperator>& ops,
                               double tol_group = tol::group);

/// For V2 ⊆ V1: index of the V2 atom containing each V1 atom. Empty when V2 is
/// not a subalgebra of V1.
std::optional<std::vector<std::size_t>> refinement_map(const Context& v2, const Context& v1);

/// V2 ⊆ V1 as algebras.
bool inclusion(const Context& v2, const Context& v1);

/// Largest common subalgebra V1 ∩ V2.
Context meet(const Context& a, const Context& b, std::string id);

/// All 2^|atoms| elements of ℒ(V), as masks in increasing numeric order.
std::vector<Mask> lattice_elements(const Context& v);

/// Gelfand transform: the value κ(A) of the character at `atom` on A ∈ V.
double evaluate(const Context& v, std::size_t atom, const HermitianOperator& a);

/// True iff A lies in the algebra (commutes with and is constant on every atom).
bool belongs_to(const Context& v, const HermitianOperator& a);

/// V(P) = {κ : κ(P) = 1}, as a set of character (atom) indices.
Mask v_of_p(const Context& v, Mask p);

/// A finite fragment of the category of contexts, ordered by inclusion.
/// Immutable; the version stamp distinguishes posets so that sieves built on
/// one are never silently reused on another.
class ContextPoset {
public:
    static ContextPoset build(std::vector<Context> contexts, bool add_trivial,
                              bool close_under_meets = false);

    std::size_t size() const { return contexts_.size(); }
    std::size_t dim() const { return dim_; }
    const Context& context(std::size_t i) const { return contexts_.at(i); }
    const std::vector<Context>& contexts() const { return contexts_; }
    std::optional<std::size_t> index_of(const std::string& id) const;

    /// V_lower ⊆ V_upper.
    bool leq(std::size_t lower, std::size_t upper) const { return leq_[lower][upper]; }

    /// Refinement map for lower ⊆ upper (see `refinement_map`). Throws if not comparable.
    const std::vector<std::size_t>& atom_map(std::size_t lower, std::size_t upper) const;

    /// ↓V: every context below (and including) V.
    const ContextSet& down_set(std::size_t v) const { return down_.at(v); }

    /// Hasse edges (lower, upper).
    std::vector<std::pair<std::size_t, std::size_t>> covers() const;
    std::vector<std::size_t> maximal() const;

    bool includes_trivial() const { return includes_trivial_; }
    std::uint64_t version() const { return version_; }

    ContextSet empty_set() const { return ContextSet(size()); }

private:
    ContextPoset() = default;

    std::vector<Context> contexts_;
    std::size_t dim_ = 0;
    std::vector<std::vector<bool>> leq_;
    std::vector<std::vector<std::vector<std::size_t>>> maps_;
    std::vector<ContextSet> down_;
    bool includes_trivial_ = false;
    std::uint64_t version_ = 0;
};

/// Dimension 3: V1 = {P0, P1, P2}, V2 = {P0, P1+P2} and the trivial context.
ContextPoset fixture_a();

}  // namespace toposval
