#include "toposval/schema.hpp"

#include <boost/dynamic_bitset.hpp>

#include "toposval/random.hpp"

namespace toposval {

namespace {

struct Site {
    std::size_t size;
    std::function<bool(std::size_t lo, std::size_t up)> below;
    std::function<std::size_t(std::size_t)> atoms;
    std::function<Mask(std::size_t lo, std::size_t up, Mask)> coarse;

    Mask full(std::size_t v) const { return (Mask{1} << atoms(v)) - 1; }
};

using Member = std::function<bool(std::size_t up, Mask p, std::size_t lo)>;
using Table = std::vector<std::vector<ContextSet>>;

bool all_below(const Site& s, const Member& m, std::size_t up, Mask p) {
    for (std::size_t lo = 0; lo < s.size; ++lo) {
        if (s.below(lo, up) && !m(up, p, lo)) {
            return false;
        }
    }
    return true;
}

bool fails_at(Property prop, const PropertyWitness& w, const Site& s, const Member& m) {
    switch (prop) {
        case Property::sieve:
            return m(w.v1, w.p, w.v2) && s.below(w.v3, w.v2) && !m(w.v1, w.p, w.v3);
        case Property::functional_composition:
            return m(w.v2, s.coarse(w.v2, w.v1, w.p), w.v3) != m(w.v1, w.p, w.v3);
        case Property::null_proposition:
            return m(w.v1, 0, w.v2);
        case Property::monotonicity:
            return mask_subset(w.p, w.q) && m(w.v1, w.p, w.v2) && !m(w.v1, w.q, w.v2);
        case Property::exclusivity:
            return (w.p & w.q) == 0 && all_below(s, m, w.v1, w.p) && all_below(s, m, w.v1, w.q);
        case Property::unit:
            return !m(w.v1, s.full(w.v1), w.v2);
    }
    return false;
}

PropertyOutcome check_sieve(const Site& s, const Member& m) {
    PropertyOutcome out;
    for (std::size_t up = 0; up < s.size && out.holds; ++up) {
        for (Mask p = 0; p <= s.full(up) && out.holds; ++p) {
            for (std::size_t b = 0; b < s.size && out.holds; ++b) {
                if (!s.below(b, up) || !m(up, p, b)) {
                    continue;
                }
                for (std::size_t c = 0; c < s.size; ++c) {
                    if (s.below(c, b) && !m(up, p, c)) {
                        out.fail({up, b, c, p, 0});
                        break;
                    }
                }
            }
        }
    }
    return out;
}

PropertyOutcome check_func(const Site& s, const Member& m) {
    PropertyOutcome out;
    for (std::size_t up = 0; up < s.size && out.holds; ++up) {
        for (Mask p = 0; p <= s.full(up) && out.holds; ++p) {
            for (std::size_t lo = 0; lo < s.size && out.holds; ++lo) {
                if (!s.below(lo, up)) {
                    continue;
                }
                const Mask cp = s.coarse(lo, up, p);
                for (std::size_t c = 0; c < s.size; ++c) {
                    if (s.below(c, lo) && m(lo, cp, c) != m(up, p, c)) {
                        out.fail({up, lo, c, p, cp});
                        break;
                    }
                }
            }
        }
    }
    return out;
}

PropertyOutcome check_null(const Site& s, const Member& m) {
    PropertyOutcome out;
    for (std::size_t up = 0; up < s.size && out.holds; ++up) {
        for (std::size_t lo = 0; lo < s.size; ++lo) {
            if (s.below(lo, up) && m(up, 0, lo)) {
                out.fail({up, lo, 0, 0, 0});
                break;
            }
        }
    }
    return out;
}

PropertyOutcome check_monotone(const Site& s, const Member& m) {
    PropertyOutcome out;
    for (std::size_t up = 0; up < s.size && out.holds; ++up) {
        const Mask full = s.full(up);
        for (Mask p = 0; p <= full && out.holds; ++p) {
            // Supersets q of p enumerated as p | t for submasks t of the complement.
            const Mask rest = full & ~p;
            for (Mask t = rest;; t = (t - 1) & rest) {
                const Mask q = p | t;
                for (std::size_t lo = 0; lo < s.size; ++lo) {
                    if (s.below(lo, up) && m(up, p, lo) && !m(up, q, lo)) {
                        out.fail({up, lo, 0, p, q});
                        break;
                    }
                }
                if (t == 0 || !out.holds) {
                    break;
                }
            }
        }
    }
    return out;
}

PropertyOutcome check_exclusive(const Site& s, const Member& m) {
    PropertyOutcome out;
    for (std::size_t up = 0; up < s.size && out.holds; ++up) {
        const Mask full = s.full(up);
        std::vector<bool> all(static_cast<std::size_t>(full) + 1);
        for (Mask p = 0; p <= full; ++p) {
            all[p] = all_below(s, m, up, p);
        }
        for (Mask p = 0; p <= full && out.holds; ++p) {
            if (!all[p]) {
                continue;
            }
            const Mask rest = full & ~p;
            for (Mask q = rest;; q = (q - 1) & rest) {
                if (all[q]) {
                    out.fail({up, 0, 0, p, q});
                    break;
                }
                if (q == 0) {
                    break;
                }
            }
        }
    }
    return out;
}

PropertyOutcome check_unit(const Site& s, const Member& m) {
    PropertyOutcome out;
    for (std::size_t up = 0; up < s.size && out.holds; ++up) {
        for (std::size_t lo = 0; lo < s.size; ++lo) {
            if (s.below(lo, up) && !m(up, s.full(up), lo)) {
                out.fail({up, lo, 0, 0, 0});
                break;
            }
        }
    }
    return out;
}

PropertyOutcome check_with(Property prop, const Site& s, const Member& m) {
    switch (prop) {
        case Property::sieve:
            return check_sieve(s, m);
        case Property::functional_composition:
            return check_func(s, m);
        case Property::null_proposition:
            return check_null(s, m);
        case Property::monotonicity:
            return check_monotone(s, m);
        case Property::exclusivity:
            return check_exclusive(s, m);
        case Property::unit:
            return check_unit(s, m);
    }
    return {};
}

PropertyOutcome literal_null(const Site& s, const std::vector<Mask>& a, const Relation& r) {
    PropertyOutcome out;
    for (std::size_t up = 0; up < s.size && out.holds; ++up) {
        for (std::size_t lo = 0; lo < s.size; ++lo) {
            if (s.below(lo, up) && r.test(lo, a[lo], 0)) {
                out.fail({up, lo, 0, 0, 0});
                break;
            }
        }
    }
    return out;
}

PropertyOutcome literal_unit(const Site& s, const std::vector<Mask>& a, const Relation& r) {
    PropertyOutcome out;
    for (std::size_t up = 0; up < s.size && out.holds; ++up) {
        for (std::size_t lo = 0; lo < s.size; ++lo) {
            if (s.below(lo, up) && !r.test(lo, a[lo], s.full(lo))) {
                out.fail({up, lo, 0, 0, 0});
                break;
            }
        }
    }
    return out;
}

// R is carried along coarse-graining from a(V2): a(V2) R T ⇒ a(V3) R 𝐆(i_{V3V2})(T).
PropertyOutcome preserved_by_coarse_graining(const Site& s, const std::vector<Mask>& a, const Relation& r) {
    PropertyOutcome out;
    for (std::size_t mid = 0; mid < s.size && out.holds; ++mid) {
        for (Mask t = 0; t <= s.full(mid) && out.holds; ++t) {
            if (!r.test(mid, a[mid], t)) {
                continue;
            }
            for (std::size_t lo = 0; lo < s.size; ++lo) {
                if (s.below(lo, mid) && !r.test(lo, a[lo], s.coarse(lo, mid, t))) {
                    out.fail({mid, lo, 0, t, 0});
                    break;
                }
            }
        }
    }
    return out;
}

// [S ≤ T and a(V) R S] ⇒ a(V) R T.
PropertyOutcome larger_rhs_stable(const Site& s, const std::vector<Mask>& a, const Relation& r) {
    PropertyOutcome out;
    for (std::size_t v = 0; v < s.size && out.holds; ++v) {
        const Mask full = s.full(v);
        for (Mask lo = 0; lo <= full && out.holds; ++lo) {
            if (!r.test(v, a[v], lo)) {
                continue;
            }
            const Mask rest = full & ~lo;
            for (Mask t = rest;; t = (t - 1) & rest) {
                if (!r.test(v, a[v], lo | t)) {
                    out.fail({v, 0, 0, lo, lo | t});
                    break;
                }
                if (t == 0) {
                    break;
                }
            }
        }
    }
    return out;
}

Member table_member(const Table& t) {
    return [&t](std::size_t up, Mask p, std::size_t lo) { return t.at(up).at(p).test(lo); };
}

Member relation_member(const Site& s, const std::vector<Mask>& a, const Relation& r) {
    return [&s, &a, &r](std::size_t up, Mask p, std::size_t lo) { return r.test(lo, a[lo], s.coarse(lo, up, p)); };
}

PropertyReport run_survey(const Site& s, const Table& table, const std::vector<Mask>& a, const Relation& r) {
    PropertyReport report;
    report.relation = r.name;
    const Member direct = table_member(table);
    const Member via_r = relation_member(s, a, r);
    for (std::size_t i = 0; i < 6; ++i) {
        const auto prop = static_cast<Property>(i);
        PropertyCheck& c = report.properties[i];
        c.direct = check_with(prop, s, direct);
        if (prop == Property::null_proposition) {
            c.characterization = literal_null(s, a, r);
        } else if (prop == Property::unit) {
            c.characterization = literal_unit(s, a, r);
        } else {
            c.characterization = check_with(prop, s, via_r);
        }
        if (c.direct.witness) {
            c.direct.replayed = fails_at(prop, *c.direct.witness, s, via_r);
        }
        if (c.characterization.witness) {
            c.characterization.replayed = fails_at(prop, *c.characterization.witness, s, direct);
        }
    }
    auto& sieve = report.properties[static_cast<std::size_t>(Property::sieve)];
    sieve.sufficient = preserved_by_coarse_graining(s, a, r);
    auto& mono = report.properties[static_cast<std::size_t>(Property::monotonicity)];
    mono.sufficient = larger_rhs_stable(s, a, r);
    return report;
}

Site poset_site(const ContextPoset& poset, bool sigma) {
    Site s;
    s.size = poset.size();
    s.below = [&poset](std::size_t lo, std::size_t up) { return poset.leq(lo, up); };
    s.atoms = [&poset](std::size_t v) { return poset.context(v).atom_count(); };
    if (sigma) {
        s.coarse = [&poset](std::size_t lo, std::size_t up, Mask p) {
            return clo_sigma_restrict(poset, lo, up, v_of_p(poset.context(up), p));
        };
    } else {
        s.coarse = [&poset](std::size_t lo, std::size_t up, Mask p) { return coarse_grain(poset, lo, up, p); };
    }
    return s;
}

Site o_site(const OCategory& category) {
    Site s;
    s.size = category.size();
    s.below = [&category](std::size_t lo, std::size_t up) { return category.hom(lo, up).has_value(); };
    s.atoms = [&category](std::size_t v) { return category.object(v).size(); };
    s.coarse = [&category](std::size_t lo, std::size_t up, Mask delta) {
        return image_mask(*category.hom(lo, up), category.object(up), delta, category.object(lo));
    };
    return s;
}

std::vector<std::string> poset_ids(const ContextPoset& poset) {
    std::vector<std::string> out;
    for (const auto& c : poset.contexts()) {
        out.push_back(c.id());
    }
    return out;
}

bool all_nonzero(const std::vector<Mask>& a) {
    for (Mask m : a) {
        if (m == 0) {
            return false;
        }
    }
    return true;
}

nlohmann::json outcome_json(const PropertyOutcome& o, const std::vector<std::string>& ids, Property prop) {
    nlohmann::json out = {{"status", to_string(o.holds ? PropertyStatus::holds_exhaustively
                                                        : PropertyStatus::witness_of_failure)}};
    if (o.witness) {
        const auto& w = *o.witness;
        nlohmann::json wj = {{"v1", ids.at(w.v1)}};
        switch (prop) {
            case Property::sieve:
            case Property::functional_composition:
                wj["v2"] = ids.at(w.v2);
                wj["v3"] = ids.at(w.v3);
                wj["mask"] = w.p;
                break;
            case Property::null_proposition:
            case Property::unit:
                wj["v2"] = ids.at(w.v2);
                break;
            case Property::monotonicity:
                wj["v2"] = ids.at(w.v2);
                wj["mask"] = w.p;
                wj["mask2"] = w.q;
                break;
            case Property::exclusivity:
                wj["mask"] = w.p;
                wj["mask2"] = w.q;
                break;
        }
        out["witness"] = wj;
        out["replayed"] = o.replayed;
    }
    return out;
}

}  // namespace

Relation relation_leq() {
    return {"leq", [](std::size_t, Mask l, Mask r) { return mask_subset(l, r); }};
}

Relation relation_geq() {
    return {"geq", [](std::size_t, Mask l, Mask r) { return mask_subset(r, l); }};
}

Relation relation_equal() {
    return {"eq", [](std::size_t, Mask l, Mask r) { return l == r; }};
}

Relation relation_nonzero_product() {
    return {"nonzero-product", [](std::size_t, Mask l, Mask r) { return (l & r) != 0; }};
}

Relation relation_always() {
    return {"always", [](std::size_t, Mask, Mask) { return true; }};
}

Relation relation_never() {
    return {"never", [](std::size_t, Mask, Mask) { return false; }};
}

Relation relation_subset() {
    return {"subset", [](std::size_t, Mask l, Mask r) { return mask_subset(l, r); }};
}

std::vector<Relation> builtin_relations() {
    return {relation_leq(),           relation_geq(),    relation_equal(),
            relation_nonzero_product(), relation_always(), relation_never()};
}

Relation builtin_relation(const std::string& name) {
    for (auto r : builtin_relations()) {
        if (r.name == name) {
            return r;
        }
    }
    if (name == "subset") {
        return relation_subset();
    }
    throw Error("unknown relation: " + name);
}

Relation random_relation(const std::vector<std::size_t>& atom_counts, std::uint64_t seed) {
    Rng rng(seed);
    std::bernoulli_distribution coin(0.5);
    auto tables = std::make_shared<std::vector<boost::dynamic_bitset<>>>();
    for (std::size_t n : atom_counts) {
        if (n > 8) {
            throw Error("random relation: stage with more than 8 atoms");
        }
        boost::dynamic_bitset<> t(std::size_t{1} << (2 * n));
        for (std::size_t i = 0; i < t.size(); ++i) {
            t[i] = coin(rng);
        }
        tables->push_back(std::move(t));
    }
    std::vector<std::size_t> counts = atom_counts;
    return {"random:" + std::to_string(seed), [tables, counts](std::size_t stage, Mask l, Mask r) {
                const std::size_t n = counts.at(stage);
                return tables->at(stage).test((static_cast<std::size_t>(l) << n) | r);
            }};
}

Relation random_relation(const ContextPoset& poset, std::uint64_t seed) {
    std::vector<std::size_t> counts;
    for (const auto& c : poset.contexts()) {
        counts.push_back(c.atom_count());
    }
    return random_relation(counts, seed);
}

MorphismSetValuation alpha_a_R(PosetPtr poset, const GlobalElementG& a, const Relation& r) {
    if (auto bad = matching_law_violation(*poset, a)) {
        throw Error("alpha_a_R: matching law fails between '" + poset->context(bad->v1).id() + "' and '" +
                    poset->context(bad->v2).id() + "'");
    }
    const ContextPoset& p = *poset;
    return MorphismSetValuation(
        poset,
        [&](std::size_t v1, Mask m, std::size_t v2) {
            return r.test(v2, a.assignment[v2], coarse_grain(p, v2, v1, m));
        },
        "alpha[" + r.name + "]");
}

MorphismSetValuation alpha_a_R_sigma(PosetPtr poset, const SubobjectSigma& a, const Relation& r) {
    if (auto bad = subobject_law_violation(*poset, a)) {
        throw Error("alpha_a_R_sigma: subobject law fails between '" + poset->context(bad->v1).id() + "' and '" +
                    poset->context(bad->v2).id() + "'");
    }
    const ContextPoset& p = *poset;
    return MorphismSetValuation(
        poset,
        [&](std::size_t v1, Mask m, std::size_t v2) {
            return r.test(v2, a.assignment[v2], clo_sigma_restrict(p, v2, v1, v_of_p(p.context(v1), m)));
        },
        "alpha-sigma[" + r.name + "]");
}

std::vector<std::vector<ContextSet>> alpha_a_R_o(const OCategory& category, const std::vector<Mask>& a,
                                                 const Relation& r) {
    if (a.size() != category.size()) {
        throw Error("alpha_a_R_o: assignment size does not match the category");
    }
    const Site s = o_site(category);
    std::vector<std::vector<ContextSet>> out(category.size());
    for (std::size_t up = 0; up < category.size(); ++up) {
        if (!mask_subset(a[up], s.full(up))) {
            throw Error("alpha_a_R_o: assignment outside the spectrum of '" + category.id(up) + "'");
        }
        for (Mask d = 0; d <= s.full(up); ++d) {
            ContextSet members(category.size());
            for (std::size_t lo = 0; lo < category.size(); ++lo) {
                if (s.below(lo, up) && r.test(lo, a[lo], s.coarse(lo, up, d))) {
                    members.set(lo);
                }
            }
            out[up].push_back(std::move(members));
        }
    }
    return out;
}

std::string to_string(PropertyStatus s) {
    switch (s) {
        case PropertyStatus::holds_exhaustively:
            return "holds-exhaustively";
        case PropertyStatus::witness_of_failure:
            return "witness-of-failure";
        case PropertyStatus::not_found_after_search:
            return "not-found-after-search";
    }
    return "";
}

bool PropertyCheck::consistent() const {
    if (direct.holds != characterization.holds || !direct.replayed || !characterization.replayed) {
        return false;
    }
    return !sufficient || !sufficient->holds || direct.holds;
}

bool PropertyReport::all_hold() const {
    for (const auto& p : properties) {
        if (!p.direct.holds) {
            return false;
        }
    }
    return true;
}

bool PropertyReport::consistent() const {
    for (const auto& p : properties) {
        if (!p.consistent()) {
            return false;
        }
    }
    return true;
}

PropertyReport survey_properties(PosetPtr poset, const GlobalElementG& a, const Relation& r) {
    const MorphismSetValuation alpha = alpha_a_R(poset, a, r);
    const Site s = poset_site(*poset, false);
    PropertyReport report = run_survey(s, alpha.table(), a.assignment, r);
    report.variant = "G";
    report.stage_ids = poset_ids(*poset);
    report.regularity = {{"nonzero", all_nonzero(a.assignment)}};
    return report;
}

PropertyReport survey_properties_sigma(PosetPtr poset, const SubobjectSigma& a, const Relation& r) {
    const MorphismSetValuation alpha = alpha_a_R_sigma(poset, a, r);
    const Site s = poset_site(*poset, true);
    PropertyReport report = run_survey(s, alpha.table(), a.assignment, r);
    report.variant = "Sigma";
    report.stage_ids = poset_ids(*poset);
    report.regularity = {{"nonempty", all_nonzero(a.assignment)},
                         {"tight", !tightness_violation(*poset, a).has_value()}};
    return report;
}

PropertyReport survey_properties_o(const OCategory& category, const std::vector<Mask>& a, const Relation& r) {
    const auto table = alpha_a_R_o(category, a, r);
    const Site s = o_site(category);
    PropertyReport report = run_survey(s, table, a, r);
    report.variant = "O";
    for (std::size_t i = 0; i < category.size(); ++i) {
        report.stage_ids.push_back(category.id(i));
    }
    bool tight = true;
    bool spectra = true;
    for (std::size_t up = 0; up < category.size(); ++up) {
        for (std::size_t lo = 0; lo < category.size(); ++lo) {
            if (!s.below(lo, up)) {
                continue;
            }
            tight = tight && s.coarse(lo, up, a[up]) == a[lo];
            spectra = spectra && s.coarse(lo, up, s.full(up)) == s.full(lo);
        }
    }
    report.regularity = {{"nonempty", all_nonzero(a)}, {"tight", tight}, {"spectraOnto", spectra}};
    return report;
}

std::vector<Mask> elementary_supports(const QuantumState& state, const OCategory& category) {
    std::vector<Mask> out;
    for (std::size_t i = 0; i < category.size(); ++i) {
        out.push_back(elementary_support(state, category.object(i)));
    }
    return out;
}

SieveFailureSearch search_sieve_failure(const Relation& r, PosetPtr first, std::uint64_t seed,
                                        std::size_t draws) {
    SieveFailureSearch result;
    Rng rng(seed);
    auto try_poset = [&](const PosetPtr& poset) {
        std::vector<GlobalElementG> elements;
        elements.push_back({std::vector<Mask>(poset->size())});
        for (std::size_t v = 0; v < poset->size(); ++v) {
            elements.back().assignment[v] = poset->context(v).full_mask();
        }
        for (int k = 0; k < 3; ++k) {
            elements.push_back(supports_of(nu_rho(random_density_for(*poset, rng), poset).values()));
        }
        for (const auto& a : elements) {
            const MorphismSetValuation alpha = alpha_a_R(poset, a, r);
            const Site s = poset_site(*poset, false);
            const PropertyOutcome o = check_sieve(s, table_member(alpha.table()));
            if (!o.holds) {
                result.status = PropertyStatus::witness_of_failure;
                result.witness = o.witness;
                result.poset = poset;
                result.element = a;
                return true;
            }
        }
        return false;
    };
    if (first) {
        ++result.draws;
        if (try_poset(first)) {
            return result;
        }
    }
    for (std::size_t d = 0; d < draws; ++d) {
        ++result.draws;
        auto poset = std::make_shared<const ContextPoset>(random_poset(rng));
        if (try_poset(poset)) {
            return result;
        }
    }
    return result;
}

nlohmann::json to_json(const PropertyReport& report) {
    nlohmann::json props = nlohmann::json::object();
    for (std::size_t i = 0; i < 6; ++i) {
        const auto prop = static_cast<Property>(i);
        const auto& c = report.properties[i];
        nlohmann::json pj = outcome_json(c.direct, report.stage_ids, prop);
        pj["characterization"] = outcome_json(c.characterization, report.stage_ids, prop);
        if (c.sufficient) {
            pj["sufficient"] = outcome_json(*c.sufficient, report.stage_ids, prop);
        }
        props[kPropertyNames[i]] = pj;
    }
    nlohmann::json reg = nlohmann::json::object();
    for (const auto& [name, ok] : report.regularity) {
        reg[name] = ok;
    }
    return {{"relation", report.relation},
            {"variant", report.variant},
            {"properties", props},
            {"regularity", reg},
            {"consistent", report.consistent()}};
}

}  // namespace toposval
