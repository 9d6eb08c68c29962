#include "doctest.h"

#include "support.hpp"
#include "toposval/schema.hpp"

using namespace testing;

namespace {

GlobalElementG constant_full(const ContextPoset& p) {
    GlobalElementG g{std::vector<Mask>(p.size())};
    for (std::size_t v = 0; v < p.size(); ++v) {
        g.assignment[v] = p.context(v).full_mask();
    }
    return g;
}

std::array<bool, 6> clauses(const Definition3Report& d) {
    return {d.sieve_valued.holds,   d.functional_composition.holds, d.null_proposition.holds,
            d.monotonicity.holds,   d.exclusivity.holds,            d.unit_proposition.holds};
}

std::array<bool, 6> direct(const PropertyReport& r) {
    std::array<bool, 6> out{};
    for (std::size_t i = 0; i < 6; ++i) {
        out[i] = r.properties[i].direct.holds;
    }
    return out;
}

OCategory diagonal_category(std::vector<std::vector<double>> spectra) {
    std::vector<std::pair<std::string, HermitianOperator>> ops;
    for (std::size_t i = 0; i < spectra.size(); ++i) {
        Eigen::VectorXd d(static_cast<Eigen::Index>(spectra[i].size()));
        for (std::size_t k = 0; k < spectra[i].size(); ++k) {
            d[static_cast<Eigen::Index>(k)] = spectra[i][k];
        }
        ops.emplace_back("A" + std::to_string(i), HermitianOperator(Matrix(d.cast<Complex>().asDiagonal())));
    }
    return OCategory::build(std::move(ops));
}

}  // namespace

TEST_CASE("relation lookup") {
    CHECK(builtin_relations().size() == 6);
    for (const char* name : {"leq", "geq", "eq", "nonzero-product", "always", "never", "subset"}) {
        CHECK(builtin_relation(name).name == name);
    }
    CHECK_THROWS_AS(builtin_relation("bogus"), Error);
    CHECK(relation_leq().test(0, 0b01, 0b11));
    CHECK_FALSE(relation_leq().test(0, 0b11, 0b01));
    CHECK(relation_geq().test(0, 0b11, 0b01));
    CHECK(relation_equal().test(0, 0b10, 0b10));
    CHECK(relation_nonzero_product().test(0, 0b110, 0b011));
    CHECK_FALSE(relation_nonzero_product().test(0, 0b100, 0b011));
    CHECK_THROWS_AS(random_relation(std::vector<std::size_t>{9}, 1), Error);
}

TEST_CASE("random relations are reproducible from their seed") {
    const Relation a = random_relation(std::vector<std::size_t>{3, 2}, 7);
    const Relation b = random_relation(std::vector<std::size_t>{3, 2}, 7);
    const Relation c = random_relation(std::vector<std::size_t>{3, 2}, 8);
    CHECK(a.name == "random:7");
    bool differs = false;
    for (Mask l = 0; l < 8; ++l) {
        for (Mask r = 0; r < 8; ++r) {
            CHECK(a.test(0, l, r) == b.test(0, l, r));
            differs = differs || a.test(0, l, r) != c.test(0, l, r);
        }
    }
    CHECK(differs);
}

TEST_CASE("less-or-equal with state supports reproduces the state valuation") {
    Rng rng(51);
    const auto a = fix_a();
    for (int k = 0; k < 30; ++k) {
        const auto nu = nu_rho(random_density(3, rng), a);
        const GlobalElementG s = supports_of(nu.values());
        CHECK(alpha_a_R(a, s, relation_leq()) == nu.values());
        const auto report = survey_properties(a, s, relation_leq());
        CHECK(report.all_hold());
        CHECK(report.consistent());
        CHECK(report.regularity == std::vector<std::pair<std::string, bool>>{{"nonzero", true}});
        for (const auto& c : report.properties) {
            CHECK(c.status() == PropertyStatus::holds_exhaustively);
        }
    }
}

TEST_CASE("a zero global element breaks the null proposition") {
    const auto a = fix_a();
    const GlobalElementG zero{std::vector<Mask>(a->size(), 0)};
    const auto report = survey_properties(a, zero, relation_leq());
    CHECK(report.consistent());
    CHECK(report.regularity.front().second == false);
    const auto& null = report[Property::null_proposition];
    CHECK(null.status() == PropertyStatus::witness_of_failure);
    REQUIRE(null.direct.witness.has_value());
    CHECK(null.direct.replayed);
    CHECK(report[Property::sieve].direct.holds);
    CHECK(report[Property::functional_composition].direct.holds);
}

TEST_CASE("always and never fail the expected clauses") {
    const auto a = fix_a();
    const GlobalElementG g = constant_full(*a);
    const auto always = survey_properties(a, g, relation_always());
    CHECK_FALSE(always[Property::null_proposition].direct.holds);
    CHECK(always[Property::unit].direct.holds);
    CHECK(always.consistent());
    const auto never = survey_properties(a, g, relation_never());
    CHECK(never[Property::null_proposition].direct.holds);
    CHECK_FALSE(never[Property::unit].direct.holds);
    CHECK(never[Property::exclusivity].direct.holds);
    CHECK(never.consistent());
}

TEST_CASE("functional composition holds for every relation") {
    Rng rng(52);
    std::vector<PosetPtr> posets = {fix_a()};
    for (int k = 0; k < 10; ++k) {
        posets.push_back(share(random_poset(rng)));
    }
    std::uint64_t seed = 1;
    for (const auto& p : posets) {
        const GlobalElementG g = supports_of(nu_rho(random_density_for(*p, rng), p).values());
        std::vector<Relation> rs = builtin_relations();
        for (int k = 0; k < 5; ++k) {
            rs.push_back(random_relation(*p, seed++));
        }
        for (const auto& r : rs) {
            const auto report = survey_properties(p, g, r);
            CHECK(report[Property::functional_composition].direct.holds);
            CHECK(report.consistent());
        }
    }
}

TEST_CASE("survey agrees with the clause checker on valuations") {
    Rng rng(53);
    std::uint64_t seed = 100;
    int failures_seen = 0;
    for (int k = 0; k < 40; ++k) {
        const auto p = share(random_poset(rng));
        const GlobalElementG g = k % 2 == 0 ? constant_full(*p)
                                            : supports_of(nu_rho(random_density_for(*p, rng), p).values());
        std::vector<Relation> rs = builtin_relations();
        rs.push_back(random_relation(*p, seed++));
        for (const auto& r : rs) {
            const auto report = survey_properties(p, g, r);
            const auto d = check_definition3(alpha_a_R(p, g, r));
            CHECK(direct(report) == clauses(d));
            for (bool b : direct(report)) {
                failures_seen += b ? 0 : 1;
            }
        }
    }
    CHECK(failures_seen > 0);
}

TEST_CASE("built-in relations with genuine global elements give sieves") {
    // a(V3) = 𝐆(a(V2)) makes each built-in relation carry over to coarser stages.
    Rng rng(54);
    for (int k = 0; k < 30; ++k) {
        const auto p = share(random_poset(rng));
        const GlobalElementG g = supports_of(nu_rho(random_density_for(*p, rng), p).values());
        for (const auto& r : builtin_relations()) {
            const auto report = survey_properties(p, g, r);
            CHECK(report[Property::sieve].direct.holds);
            REQUIRE(report[Property::sieve].sufficient.has_value());
            CHECK(report[Property::sieve].sufficient->holds);
        }
    }
    const auto search = search_sieve_failure(relation_equal(), fix_a(), 77, 100);
    CHECK(search.status == PropertyStatus::not_found_after_search);
    CHECK(search.draws == 101);
    CHECK_FALSE(search.witness.has_value());
}

TEST_CASE("random relations can break sievehood and the witness replays") {
    bool found = false;
    for (std::uint64_t seed = 1; seed <= 40 && !found; ++seed) {
        const auto a = fix_a();
        const Relation r = random_relation(*a, seed);
        const auto search = search_sieve_failure(r, a, seed, 0);
        if (search.status != PropertyStatus::witness_of_failure) {
            continue;
        }
        found = true;
        REQUIRE(search.witness.has_value());
        REQUIRE(search.element.has_value());
        const auto report = survey_properties(search.poset, *search.element, r);
        const auto& sieve = report[Property::sieve];
        CHECK_FALSE(sieve.direct.holds);
        CHECK(sieve.direct.replayed);
        CHECK_FALSE(sieve.sufficient->holds);
        CHECK(report.consistent());
        const auto& w = *sieve.direct.witness;
        const auto alpha = alpha_a_R(search.poset, *search.element, r);
        CHECK(alpha.at(w.v1, w.p).test(w.v2));
        CHECK(search.poset->leq(w.v3, w.v2));
        CHECK_FALSE(alpha.at(w.v1, w.p).test(w.v3));
    }
    CHECK(found);
}

TEST_CASE("monotonicity follows from stability under larger propositions") {
    Rng rng(55);
    std::uint64_t seed = 500;
    for (int k = 0; k < 20; ++k) {
        const auto p = share(random_poset(rng));
        const GlobalElementG g = supports_of(nu_rho(random_density_for(*p, rng), p).values());
        std::vector<Relation> rs = builtin_relations();
        rs.push_back(random_relation(*p, seed++));
        for (const auto& r : rs) {
            const auto& mono = survey_properties(p, g, r)[Property::monotonicity];
            REQUIRE(mono.sufficient.has_value());
            if (mono.sufficient->holds) {
                CHECK(mono.direct.holds);
            }
        }
    }
    const auto a = fix_a();
    const GlobalElementG full = constant_full(*a);
    CHECK(survey_properties(a, full, relation_equal())[Property::monotonicity].direct.holds);
    const GlobalElementG g = supports_of(nu_rho(pure(vec({1, 0, 0})), a).values());
    const auto& eq = survey_properties(a, g, relation_equal())[Property::monotonicity];
    CHECK_FALSE(eq.direct.holds);
    CHECK(eq.direct.replayed);
    CHECK_FALSE(eq.sufficient->holds);
    CHECK(survey_properties(a, g, relation_leq())[Property::monotonicity].sufficient->holds);
}

TEST_CASE("the schema rejects assignments that are not global elements") {
    const auto a = fix_a();
    GlobalElementG bad = constant_full(*a);
    bad.assignment[idx(*a, "V2")] = mask_of(a->context(idx(*a, "V2")), basis_projector(3, 0));
    CHECK_THROWS_AS(alpha_a_R(a, bad, relation_leq()), Error);
    SubobjectSigma loose{std::vector<Mask>(a->size(), 0)};
    loose.assignment[idx(*a, "V1")] = 1;
    CHECK_THROWS_AS(alpha_a_R_sigma(a, loose, relation_subset()), Error);
}

TEST_CASE("character-set variant with tight subobjects") {
    Rng rng(56);
    for (int k = 0; k < 20; ++k) {
        const auto p = share(random_poset(rng));
        const auto nu = nu_rho(random_density_for(*p, rng), p);
        const SubobjectSigma iv = intervals_of(nu.values());
        CHECK(alpha_a_R_sigma(p, iv, relation_subset()) == nu.values());
        const auto report = survey_properties_sigma(p, iv, relation_subset());
        CHECK(report.variant == "Sigma");
        CHECK(report.all_hold());
        CHECK(report.consistent());
        for (const auto& [name, ok] : report.regularity) {
            CHECK(ok);
        }
    }
    const auto a = fix_a();
    const SubobjectSigma empty{std::vector<Mask>(a->size(), 0)};
    const auto report = survey_properties_sigma(a, empty, relation_subset());
    CHECK_FALSE(report[Property::null_proposition].direct.holds);
    CHECK(report.consistent());
}

TEST_CASE("operator-category variant with elementary supports") {
    const OCategory cat = diagonal_category({{-1, 1, 2}, {1, 1, 4}, {0, 0, 1}, {5, 5, 5}});
    Rng rng(57);
    for (int k = 0; k < 20; ++k) {
        const QuantumState psi = random_state(3, rng);
        const auto a = elementary_supports(psi, cat);
        const auto report = survey_properties_o(cat, a, relation_subset());
        CHECK(report.variant == "O");
        CHECK(report.all_hold());
        CHECK(report.consistent());
        for (const auto& [name, ok] : report.regularity) {
            CHECK(ok);
        }
        const auto table = alpha_a_R_o(cat, a, relation_subset());
        for (std::size_t up = 0; up < cat.size(); ++up) {
            for (Mask d = 0; d <= cat.object(up).full_mask(); ++d) {
                CHECK(table[up][d] == nu_psi_o(psi, cat, up, d));
            }
        }
    }
    CHECK_THROWS_AS(alpha_a_R_o(cat, {1, 1}, relation_subset()), Error);
}

TEST_CASE("property report serialization") {
    const auto a = fix_a();
    const GlobalElementG zero{std::vector<Mask>(a->size(), 0)};
    const auto j = to_json(survey_properties(a, zero, relation_leq()));
    CHECK(j["relation"] == "leq");
    CHECK(j["variant"] == "G");
    CHECK(j["consistent"] == true);
    for (const char* name : kPropertyNames) {
        REQUIRE(j["properties"].contains(name));
        CHECK(j["properties"][name].contains("status"));
        CHECK(j["properties"][name].contains("characterization"));
    }
    CHECK(j["properties"]["nullProposition"]["status"] == "witness-of-failure");
    CHECK(j["properties"]["nullProposition"].contains("witness"));
    CHECK(j["properties"]["sieve"]["status"] == "holds-exhaustively");
    CHECK(j["properties"]["sieve"].contains("sufficient"));
    CHECK(j["regularity"]["nonzero"] == false);
    CHECK(to_string(PropertyStatus::not_found_after_search) == "not-found-after-search");
}
