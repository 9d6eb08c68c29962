#include "toposval/presheaves.hpp"

#include <sstream>

namespace toposval {

namespace {

void require_sieve_poset(const ContextPoset& poset, const Sieve& s) {
    if (s.poset_version() != poset.version()) {
        throw Error("sieve was built on a different poset");
    }
}

}  // namespace

Character sigma_restrict(const ContextPoset& poset, std::size_t v2, std::size_t v1, Character kappa) {
    if (kappa.context != v1 || kappa.atom >= poset.context(v1).atom_count()) {
        throw Error("sigma_restrict: character does not belong to the source context");
    }
    return {v2, poset.atom_map(v2, v1)[kappa.atom]};
}

Mask coarse_grain(const ContextPoset& poset, std::size_t v2, std::size_t v1, Mask p) {
    const auto& map = poset.atom_map(v2, v1);
    if (!poset.context(v1).valid_mask(p)) {
        throw Error("coarse_grain: lattice element does not belong to the source context");
    }
    Mask out = 0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (p & (Mask{1} << i)) {
            out |= Mask{1} << map[i];
        }
    }
    return out;
}

Mask clo_sigma_restrict(const ContextPoset& poset, std::size_t v2, std::size_t v1, Mask characters) {
    const auto& map = poset.atom_map(v2, v1);
    if (!poset.context(v1).valid_mask(characters)) {
        throw Error("clo_sigma_restrict: characters do not belong to the source context");
    }
    Mask out = 0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (characters & (Mask{1} << i)) {
            out |= Mask{1} << sigma_restrict(poset, v2, v1, {v1, i}).atom;
        }
    }
    return out;
}

Mask embed(const ContextPoset& poset, std::size_t v2, std::size_t v1, Mask q) {
    const auto& map = poset.atom_map(v2, v1);
    if (!poset.context(v2).valid_mask(q)) {
        throw Error("embed: lattice element does not belong to the subcontext");
    }
    Mask out = 0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (q & (Mask{1} << map[i])) {
            out |= Mask{1} << i;
        }
    }
    return out;
}

bool is_sieve(const ContextPoset& poset, std::size_t apex, const ContextSet& members) {
    if (members.size() != poset.size() || !members.is_subset_of(poset.down_set(apex))) {
        return false;
    }
    for (std::size_t v = members.find_first(); v != ContextSet::npos; v = members.find_next(v)) {
        if (!poset.down_set(v).is_subset_of(members)) {
            return false;
        }
    }
    return true;
}

Sieve::Sieve(const ContextPoset& poset, std::size_t apex, ContextSet members)
    : apex_(apex), members_(std::move(members)), version_(poset.version()) {
    if (apex_ >= poset.size()) {
        throw Error("Sieve: apex out of range");
    }
    if (!is_sieve(poset, apex_, members_)) {
        std::ostringstream os;
        os << "Sieve: members on context '" << poset.context(apex_).id()
           << "' are not a downward-closed set of subcontexts";
        throw Error(os.str());
    }
}

Sieve Sieve::principal(const ContextPoset& poset, std::size_t apex) {
    return Sieve(poset, apex, poset.down_set(apex));
}

Sieve Sieve::empty(const ContextPoset& poset, std::size_t apex) {
    return Sieve(poset, apex, poset.empty_set());
}

ContextSet pullback_members(const ContextPoset& poset, std::size_t v2, const ContextSet& members) {
    return members & poset.down_set(v2);
}

Sieve pullback(const ContextPoset& poset, std::size_t v2, const Sieve& s) {
    require_sieve_poset(poset, s);
    if (!poset.leq(v2, s.apex())) {
        throw Error("pullback: target context is not included in the sieve's apex");
    }
    return Sieve(poset, v2, pullback_members(poset, v2, s.members()));
}

NatIsoReport check_nat_iso(const ContextPoset& poset) {
    NatIsoReport report;
    for (std::size_t v1 = 0; v1 < poset.size(); ++v1) {
        const Context& c1 = poset.context(v1);
        const auto elements = lattice_elements(c1);
        // N_V is a bijection ℒ(V) → Clo Σ(V).
        std::vector<bool> seen(elements.size(), false);
        for (Mask p : elements) {
            const Mask image = v_of_p(c1, p);
            if (seen[image]) {
                report.failures.push_back({v1, v1, p, image, image});
            }
            seen[image] = true;
        }
        for (std::size_t v2 = 0; v2 < poset.size(); ++v2) {
            if (!poset.leq(v2, v1)) {
                continue;
            }
            ++report.pairs_checked;
            const Context& c2 = poset.context(v2);
            for (Mask p : elements) {
                ++report.elements_checked;
                const Mask lhs = clo_sigma_restrict(poset, v2, v1, v_of_p(c1, p));
                const Mask rhs = v_of_p(c2, coarse_grain(poset, v2, v1, p));
                if (lhs != rhs) {
                    report.failures.push_back({v1, v2, p, lhs, rhs});
                }
            }
        }
    }
    return report;
}

nlohmann::json to_json(const ContextPoset& poset, const NatIsoReport& report) {
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : report.failures) {
        failures.push_back({{"v1", poset.context(f.v1).id()},
                            {"v2", poset.context(f.v2).id()},
                            {"mask", f.mask},
                            {"lhs", f.lhs},
                            {"rhs", f.rhs}});
    }
    return {{"pairsChecked", report.pairs_checked},
            {"elementsChecked", report.elements_checked},
            {"failures", failures}};
}

std::optional<LawViolation> matching_law_violation(const ContextPoset& poset, const GlobalElementG& g) {
    if (g.assignment.size() != poset.size()) {
        throw Error("global element: assignment size does not match the poset");
    }
    for (std::size_t v1 = 0; v1 < poset.size(); ++v1) {
        for (std::size_t v2 = 0; v2 < poset.size(); ++v2) {
            if (poset.leq(v2, v1) && g.assignment[v2] != coarse_grain(poset, v2, v1, g.assignment[v1])) {
                return LawViolation{v1, v2};
            }
        }
    }
    return std::nullopt;
}

std::optional<LawViolation> subobject_law_violation(const ContextPoset& poset, const SubobjectSigma& s) {
    if (s.assignment.size() != poset.size()) {
        throw Error("subobject: assignment size does not match the poset");
    }
    for (std::size_t v1 = 0; v1 < poset.size(); ++v1) {
        for (std::size_t v2 = 0; v2 < poset.size(); ++v2) {
            if (poset.leq(v2, v1) &&
                !mask_subset(clo_sigma_restrict(poset, v2, v1, s.assignment[v1]), s.assignment[v2])) {
                return LawViolation{v1, v2};
            }
        }
    }
    return std::nullopt;
}

std::optional<LawViolation> tightness_violation(const ContextPoset& poset, const SubobjectSigma& s) {
    if (s.assignment.size() != poset.size()) {
        throw Error("subobject: assignment size does not match the poset");
    }
    for (std::size_t v1 = 0; v1 < poset.size(); ++v1) {
        for (std::size_t v2 = 0; v2 < poset.size(); ++v2) {
            if (poset.leq(v2, v1) && clo_sigma_restrict(poset, v2, v1, s.assignment[v1]) != s.assignment[v2]) {
                return LawViolation{v1, v2};
            }
        }
    }
    return std::nullopt;
}

SubobjectSigma subobject_from_global_element(const ContextPoset& poset, const GlobalElementG& g) {
    if (auto bad = matching_law_violation(poset, g)) {
        throw Error("subobject_from_global_element: matching law fails between '" +
                    poset.context(bad->v1).id() + "' and '" + poset.context(bad->v2).id() + "'");
    }
    SubobjectSigma out;
    out.assignment.reserve(poset.size());
    for (std::size_t v = 0; v < poset.size(); ++v) {
        out.assignment.push_back(v_of_p(poset.context(v), g.assignment[v]));
    }
    return out;
}

}  // namespace toposval
