#include "toposval/valuations.hpp"

#include <cstdio>
#include <sstream>

#include "toposval/random.hpp"

namespace toposval {

namespace {

void require_same_poset(const MorphismSetValuation& a, const MorphismSetValuation& b) {
    if (a.poset().version() != b.poset().version()) {
        throw Error("valuations are defined on different posets");
    }
}

std::string mask_hex(Mask m) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%x", static_cast<unsigned>(m));
    return buf;
}

// Shared sweep for sievehood and FUNC, used by the clause check and both theorem verifiers.
void check_sieves_and_func(const MorphismSetValuation& alpha, CheckResult& sieves, CheckResult& func) {
    const ContextPoset& poset = alpha.poset();
    for (std::size_t v1 = 0; v1 < poset.size(); ++v1) {
        for (Mask p : lattice_elements(poset.context(v1))) {
            const ContextSet& value = alpha.at(v1, p);
            if (!is_sieve(poset, v1, value)) {
                sieves.fail({v1, v1, p, 0});
            }
            for (std::size_t v2 = 0; v2 < poset.size(); ++v2) {
                if (!poset.leq(v2, v1)) {
                    continue;
                }
                const Mask coarse = coarse_grain(poset, v2, v1, p);
                if (alpha.at(v2, coarse) != pullback_members(poset, v2, value)) {
                    func.fail({v1, v2, p, coarse});
                }
            }
        }
    }
}

}  // namespace

MorphismSetValuation::MorphismSetValuation(PosetPtr poset, Table table, std::string name)
    : poset_(std::move(poset)), table_(std::move(table)), name_(std::move(name)) {}

MorphismSetValuation::MorphismSetValuation(PosetPtr poset, const Rule& rule, std::string name)
    : poset_(std::move(poset)), name_(std::move(name)) {
    if (!poset_) {
        throw Error("valuation: null poset");
    }
    table_.resize(poset_->size());
    for (std::size_t v1 = 0; v1 < poset_->size(); ++v1) {
        const auto elements = lattice_elements(poset_->context(v1));
        table_[v1].reserve(elements.size());
        for (Mask p : elements) {
            ContextSet members = poset_->empty_set();
            for (std::size_t v2 = 0; v2 < poset_->size(); ++v2) {
                if (poset_->leq(v2, v1) && rule(v1, p, v2)) {
                    members.set(v2);
                }
            }
            table_[v1].push_back(std::move(members));
        }
    }
}

MorphismSetValuation MorphismSetValuation::from_table(PosetPtr poset, Table table, std::string name) {
    if (!poset || table.size() != poset->size()) {
        throw Error("valuation table: wrong number of contexts");
    }
    for (std::size_t v = 0; v < table.size(); ++v) {
        if (table[v].size() != (std::size_t{1} << poset->context(v).atom_count())) {
            throw Error("valuation table: wrong number of lattice elements at '" + poset->context(v).id() + "'");
        }
        for (const auto& members : table[v]) {
            if (members.size() != poset->size() || !members.is_subset_of(poset->down_set(v))) {
                throw Error("valuation table: value at '" + poset->context(v).id() +
                            "' contains contexts that are not below it");
            }
        }
    }
    return MorphismSetValuation(std::move(poset), std::move(table), std::move(name));
}

Valuation::Valuation(MorphismSetValuation values) : values_(std::move(values)) {
    const ContextPoset& poset = values_.poset();
    for (std::size_t v = 0; v < poset.size(); ++v) {
        for (Mask p : lattice_elements(poset.context(v))) {
            if (!is_sieve(poset, v, values_.at(v, p))) {
                throw Error("valuation value at '" + poset.context(v).id() + "', mask " + mask_hex(p) +
                            " is not a sieve");
            }
        }
    }
}

Sieve Valuation::evaluate(std::size_t v, Mask p) const {
    return Sieve(poset(), v, values_.at(v, p));
}

ValuationParams::ValuationParams(double r_) : r(r_) {
    if (!(r > 0.0 && r <= 1.0)) {
        throw Error("valuation parameter r must lie in (0, 1]");
    }
}

Valuation nu_rho(const DensityMatrix& rho, PosetPtr poset) {
    if (rho.dim() != poset->dim()) {
        throw Error("nu_rho: state and poset dimensions differ");
    }
    // Certainty depends only on the coarse-grained element, so tabulate it per stage.
    std::vector<std::vector<bool>> sure(poset->size());
    for (std::size_t v = 0; v < poset->size(); ++v) {
        const Context& c = poset->context(v);
        for (Mask q : lattice_elements(c)) {
            sure[v].push_back(certain(rho, c.lift(q)));
        }
    }
    const ContextPoset& ref = *poset;
    MorphismSetValuation table(
        poset, [&](std::size_t v1, Mask p, std::size_t v2) { return sure[v2][coarse_grain(ref, v2, v1, p)]; },
        "nu_rho");
    return Valuation(std::move(table));
}

MorphismSetValuation nu_rho_r(const DensityMatrix& rho, ValuationParams params, PosetPtr poset) {
    if (rho.dim() != poset->dim()) {
        throw Error("nu_rho_r: state and poset dimensions differ");
    }
    std::vector<std::vector<double>> weight(poset->size());
    for (std::size_t v = 0; v < poset->size(); ++v) {
        const Context& c = poset->context(v);
        for (Mask q : lattice_elements(c)) {
            weight[v].push_back(rho.expectation(c.lift(q)));
        }
    }
    const ContextPoset& ref = *poset;
    const double threshold = params.r - tol::r_slack;
    return MorphismSetValuation(
        poset,
        [&](std::size_t v1, Mask p, std::size_t v2) { return weight[v2][coarse_grain(ref, v2, v1, p)] >= threshold; },
        "nu_rho_r");
}

TruthSet truth_set(const MorphismSetValuation& alpha, std::size_t v) {
    TruthSet out{v, {}};
    for (Mask p : lattice_elements(alpha.poset().context(v))) {
        if (alpha.is_true(v, p)) {
            out.members.push_back(p);
        }
    }
    return out;
}

Support support(const MorphismSetValuation& alpha, std::size_t v) {
    const TruthSet t = truth_set(alpha, v);
    Mask inf = alpha.poset().context(v).full_mask();
    for (Mask p : t.members) {
        inf &= p;
    }
    return {inf, t.members.empty()};
}

Mask interval(const MorphismSetValuation& alpha, std::size_t v) {
    const Context& c = alpha.poset().context(v);
    Mask out = v_of_p(c, c.full_mask());
    for (Mask p : truth_set(alpha, v).members) {
        out &= v_of_p(c, p);
    }
    return out;
}

GlobalElementG supports_of(const MorphismSetValuation& alpha) {
    GlobalElementG out;
    for (std::size_t v = 0; v < alpha.poset().size(); ++v) {
        out.assignment.push_back(support(alpha, v).mask);
    }
    return out;
}

SubobjectSigma intervals_of(const MorphismSetValuation& alpha) {
    SubobjectSigma out;
    for (std::size_t v = 0; v < alpha.poset().size(); ++v) {
        out.assignment.push_back(interval(alpha, v));
    }
    return out;
}

bool has_degenerate_support(const MorphismSetValuation& alpha) {
    for (std::size_t v = 0; v < alpha.poset().size(); ++v) {
        if (support(alpha, v).degenerate) {
            return true;
        }
    }
    return false;
}

Definition3Report check_definition3(const MorphismSetValuation& alpha) {
    Definition3Report report;
    const ContextPoset& poset = alpha.poset();
    check_sieves_and_func(alpha, report.sieve_valued, report.functional_composition);
    for (std::size_t v = 0; v < poset.size(); ++v) {
        const Context& c = poset.context(v);
        const auto elements = lattice_elements(c);
        if (alpha.at(v, 0).any()) {
            report.null_proposition.fail({v, alpha.at(v, 0).find_first(), 0, 0});
        }
        if (!alpha.is_true(v, c.full_mask())) {
            report.unit_proposition.fail({v, v, c.full_mask(), 0});
        }
        for (Mask p : elements) {
            for (Mask q : elements) {
                if (mask_subset(p, q) && !alpha.at(v, p).is_subset_of(alpha.at(v, q))) {
                    report.monotonicity.fail({v, v, p, q});
                }
                if ((p & q) == 0 && alpha.is_true(v, p) && alpha.is_true(v, q)) {
                    report.exclusivity.fail({v, v, p, q});
                }
            }
        }
    }
    return report;
}

CheckResult check_subobject_condition(const MorphismSetValuation& alpha) {
    CheckResult out;
    const ContextPoset& poset = alpha.poset();
    const GlobalElementG s = supports_of(alpha);
    for (std::size_t v1 = 0; v1 < poset.size(); ++v1) {
        for (std::size_t v2 = 0; v2 < poset.size(); ++v2) {
            // s(V2) ≥ s(V1) compared inside ℒ(V1), where ℒ(V2) embeds.
            if (poset.leq(v2, v1) && !mask_subset(s.assignment[v1], embed(poset, v2, v1, s.assignment[v2]))) {
                out.fail({v1, v2, s.assignment[v1], s.assignment[v2]});
            }
        }
    }
    return out;
}

CheckResult check_global_element_condition(const MorphismSetValuation& alpha) {
    CheckResult out;
    const ContextPoset& poset = alpha.poset();
    const GlobalElementG s = supports_of(alpha);
    for (std::size_t v1 = 0; v1 < poset.size(); ++v1) {
        for (std::size_t v2 = 0; v2 < poset.size(); ++v2) {
            if (poset.leq(v2, v1) && s.assignment[v2] != coarse_grain(poset, v2, v1, s.assignment[v1])) {
                out.fail({v1, v2, s.assignment[v1], s.assignment[v2]});
            }
        }
    }
    return out;
}

MorphismSetValuation alpha_from_global_element(PosetPtr poset, const GlobalElementG& a) {
    if (a.assignment.size() != poset->size()) {
        throw Error("alpha_from_global_element: assignment size does not match the poset");
    }
    const ContextPoset& ref = *poset;
    return MorphismSetValuation(
        poset,
        [&](std::size_t v1, Mask p, std::size_t v2) {
            return mask_subset(a.assignment[v2], coarse_grain(ref, v2, v1, p));
        },
        "alpha_from_global_element");
}

MorphismSetValuation alpha_from_subobject(PosetPtr poset, const SubobjectSigma& a) {
    if (a.assignment.size() != poset->size()) {
        throw Error("alpha_from_subobject: assignment size does not match the poset");
    }
    const ContextPoset& ref = *poset;
    return MorphismSetValuation(
        poset,
        [&](std::size_t v1, Mask p, std::size_t v2) {
            return mask_subset(a.assignment[v2], clo_sigma_restrict(ref, v2, v1, v_of_p(ref.context(v1), p)));
        },
        "alpha_from_subobject");
}

std::optional<Witness> first_difference(const MorphismSetValuation& a, const MorphismSetValuation& b) {
    require_same_poset(a, b);
    const ContextPoset& poset = a.poset();
    for (std::size_t v1 = 0; v1 < poset.size(); ++v1) {
        for (Mask p : lattice_elements(poset.context(v1))) {
            const ContextSet diff = a.at(v1, p) ^ b.at(v1, p);
            if (diff.any()) {
                return Witness{v1, diff.find_first(), p, 0};
            }
        }
    }
    return std::nullopt;
}

namespace {

// Condition (i) of either theorem, given the per-stage "certain at V2" test.
CheckResult condition_i(const MorphismSetValuation& alpha,
                        const std::function<bool(std::size_t v1, Mask p, std::size_t v2)>& certain_at) {
    CheckResult out;
    const ContextPoset& poset = alpha.poset();
    for (std::size_t v1 = 0; v1 < poset.size(); ++v1) {
        for (Mask p : lattice_elements(poset.context(v1))) {
            for (std::size_t v2 = 0; v2 < poset.size(); ++v2) {
                if (poset.leq(v2, v1) && alpha.at(v1, p).test(v2) != certain_at(v1, p, v2)) {
                    out.fail({v1, v2, p, 0});
                }
            }
        }
    }
    return out;
}

ReconstructionReport make_reconstruction(const MorphismSetValuation& alpha, MorphismSetValuation rebuilt,
                                         CheckResult cond) {
    auto diff = first_difference(alpha, rebuilt);
    return ReconstructionReport{std::move(rebuilt), !diff.has_value(), diff, cond.holds};
}

bool support_certain(const ContextPoset& poset, const GlobalElementG& s, std::size_t v1, Mask p, std::size_t v2) {
    return mask_subset(s.assignment[v2], coarse_grain(poset, v2, v1, p));
}

bool interval_certain(const ContextPoset& poset, const SubobjectSigma& iv, std::size_t v1, Mask p, std::size_t v2) {
    return mask_subset(iv.assignment[v2], clo_sigma_restrict(poset, v2, v1, v_of_p(poset.context(v1), p)));
}

}  // namespace

ReconstructionReport reconstruct_from_supports(const MorphismSetValuation& alpha) {
    const ContextPoset& poset = alpha.poset();
    const GlobalElementG s = supports_of(alpha);
    MorphismSetValuation rebuilt = alpha_from_global_element(alpha.poset_ptr(), s);
    CheckResult cond = condition_i(alpha, [&](std::size_t v1, Mask p, std::size_t v2) {
        return support_certain(poset, s, v1, p, v2);
    });
    return make_reconstruction(alpha, std::move(rebuilt), cond);
}

ReconstructionReport reconstruct_from_intervals(const MorphismSetValuation& alpha) {
    const ContextPoset& poset = alpha.poset();
    const SubobjectSigma iv = intervals_of(alpha);
    MorphismSetValuation rebuilt = alpha_from_subobject(alpha.poset_ptr(), iv);
    CheckResult cond = condition_i(alpha, [&](std::size_t v1, Mask p, std::size_t v2) {
        return interval_certain(poset, iv, v1, p, v2);
    });
    return make_reconstruction(alpha, std::move(rebuilt), cond);
}

bool TheoremReport::contract_holds() const {
    if (degenerate) {
        return true;
    }
    if (conditions_hold() && !conclusions_hold()) {
        return false;
    }
    if (condition_i.holds && !functional_composition.holds) {
        return false;
    }
    if (condition_i_via_iso && condition_i_via_iso->holds != condition_i.holds) {
        return false;
    }
    return true;
}

TheoremReport theorem1_verify(const MorphismSetValuation& alpha) {
    TheoremReport report;
    const ContextPoset& poset = alpha.poset();
    if (has_degenerate_support(alpha)) {
        report.degenerate = true;
        return report;
    }
    const GlobalElementG s = supports_of(alpha);
    report.condition_i = condition_i(alpha, [&](std::size_t v1, Mask p, std::size_t v2) {
        return support_certain(poset, s, v1, p, v2);
    });
    report.condition_ii = check_global_element_condition(alpha);
    check_sieves_and_func(alpha, report.sievehood, report.functional_composition);
    for (std::size_t v1 = 0; v1 < poset.size(); ++v1) {
        for (Mask p : lattice_elements(poset.context(v1))) {
            for (std::size_t v2 = 0; v2 < poset.size(); ++v2) {
                if (!poset.leq(v2, v1)) {
                    continue;
                }
                const bool expected = mask_subset(coarse_grain(poset, v2, v1, s.assignment[v1]),
                                                  coarse_grain(poset, v2, v1, p));
                if (alpha.at(v1, p).test(v2) != expected) {
                    report.characterization.fail({v1, v2, p, 0});
                }
            }
        }
    }
    return report;
}

TheoremReport theorem2_verify(const MorphismSetValuation& alpha) {
    TheoremReport report;
    const ContextPoset& poset = alpha.poset();
    const SubobjectSigma iv = intervals_of(alpha);
    report.condition_i = condition_i(alpha, [&](std::size_t v1, Mask p, std::size_t v2) {
        return interval_certain(poset, iv, v1, p, v2);
    });
    report.condition_i_via_iso = condition_i(alpha, [&](std::size_t v1, Mask p, std::size_t v2) {
        return mask_subset(iv.assignment[v2], v_of_p(poset.context(v2), coarse_grain(poset, v2, v1, p)));
    });
    if (auto bad = tightness_violation(poset, iv)) {
        report.condition_ii.fail({bad->v1, bad->v2, iv.assignment[bad->v1], iv.assignment[bad->v2]});
    }
    check_sieves_and_func(alpha, report.sievehood, report.functional_composition);
    for (std::size_t v1 = 0; v1 < poset.size(); ++v1) {
        const Context& c1 = poset.context(v1);
        for (Mask p : lattice_elements(c1)) {
            for (std::size_t v2 = 0; v2 < poset.size(); ++v2) {
                if (!poset.leq(v2, v1)) {
                    continue;
                }
                const bool expected = mask_subset(clo_sigma_restrict(poset, v2, v1, iv.assignment[v1]),
                                                  clo_sigma_restrict(poset, v2, v1, v_of_p(c1, p)));
                if (alpha.at(v1, p).test(v2) != expected) {
                    report.characterization.fail({v1, v2, p, 0});
                }
            }
        }
    }
    return report;
}

std::optional<SupportMatchWitness> search_support_match_violation(std::uint64_t seed, std::size_t draws) {
    Rng rng(seed);
    const double rs[] = {0.5, 0.6, 0.7, 0.8, 0.9};
    for (std::size_t draw = 0; draw < draws; ++draw) {
        auto poset = std::make_shared<const ContextPoset>(random_poset(rng));
        const DensityMatrix rho = random_density_for(*poset, rng);
        const double r = rs[std::uniform_int_distribution<std::size_t>(0, std::size(rs) - 1)(rng)];
        const MorphismSetValuation alpha = nu_rho_r(rho, ValuationParams(r), poset);
        const CheckResult check = check_global_element_condition(alpha);
        if (!check.holds) {
            return SupportMatchWitness{seed, draw, r, rho.matrix(), poset, *check.witness};
        }
    }
    return std::nullopt;
}

nlohmann::json dump(const MorphismSetValuation& alpha) {
    const ContextPoset& poset = alpha.poset();
    nlohmann::json out = nlohmann::json::object();
    for (std::size_t v = 0; v < poset.size(); ++v) {
        nlohmann::json rows = nlohmann::json::object();
        for (Mask p : lattice_elements(poset.context(v))) {
            nlohmann::json members = nlohmann::json::array();
            const ContextSet& value = alpha.at(v, p);
            for (std::size_t w = value.find_first(); w != ContextSet::npos; w = value.find_next(w)) {
                members.push_back(poset.context(w).id());
            }
            rows[mask_hex(p)] = members;
        }
        out[poset.context(v).id()] = rows;
    }
    return out;
}

nlohmann::json to_json(const ContextPoset& poset, const CheckResult& r) {
    nlohmann::json out{{"holds", r.holds}};
    if (r.witness) {
        out["witness"] = {{"v1", poset.context(r.witness->v1).id()},
                          {"v2", poset.context(r.witness->v2).id()},
                          {"mask", mask_hex(r.witness->p)},
                          {"mask2", mask_hex(r.witness->q)}};
    }
    return out;
}

nlohmann::json to_json(const ContextPoset& poset, const Definition3Report& r) {
    return {{"sieveValued", to_json(poset, r.sieve_valued)},
            {"functionalComposition", to_json(poset, r.functional_composition)},
            {"nullProposition", to_json(poset, r.null_proposition)},
            {"monotonicity", to_json(poset, r.monotonicity)},
            {"exclusivity", to_json(poset, r.exclusivity)},
            {"unitProposition", to_json(poset, r.unit_proposition)},
            {"allClauses", r.all_clauses()}};
}

nlohmann::json to_json(const ContextPoset& poset, const TheoremReport& r) {
    nlohmann::json out{{"degenerate", r.degenerate}, {"contractHolds", r.contract_holds()}};
    if (r.degenerate) {
        return out;
    }
    out["conditionI"] = to_json(poset, r.condition_i);
    out["conditionII"] = to_json(poset, r.condition_ii);
    out["sievehood"] = to_json(poset, r.sievehood);
    out["functionalComposition"] = to_json(poset, r.functional_composition);
    out["characterization"] = to_json(poset, r.characterization);
    if (r.condition_i_via_iso) {
        out["conditionIViaIso"] = to_json(poset, *r.condition_i_via_iso);
    }
    return out;
}

}  // namespace toposval
