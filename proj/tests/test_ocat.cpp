#include "doctest.h"

#include "support.hpp"
#include "toposval/ocat.hpp"

using namespace testing;

namespace {

HermitianOperator rotated(const Matrix& u, const std::vector<double>& d) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = d[i];
    }
    const Matrix m = u * v.cast<Complex>().asDiagonal() * u.adjoint();
    return HermitianOperator(0.5 * (m + m.adjoint()));
}

/// Operators diagonal in one random basis: a base spectrum and polynomial
/// functions of it, plus an unrelated operator.
OCategory random_category(std::size_t dim, Rng& rng, std::vector<std::vector<double>>& spectra) {
    const Matrix u = random_unitary(dim, rng);
    std::uniform_int_distribution<int> small(-2, 2);
    std::vector<double> base(dim);
    for (auto& x : base) {
        x = small(rng);
    }
    spectra = {base};
    const std::vector<std::function<double(double)>> fs = {
        [](double x) { return x * x; }, [](double x) { return 2 * x + 1; }, [](double x) { return x > 0 ? 1.0 : 0.0; },
        [](double x) { return x * x * x - x; }, [](double) { return 3.0; }};
    std::vector<std::pair<std::string, HermitianOperator>> ops = {{"A", rotated(u, base)}};
    for (std::size_t k = 0; k < fs.size(); ++k) {
        std::vector<double> img(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            img[i] = fs[k](base[i]);
        }
        spectra.push_back(img);
        ops.emplace_back("f" + std::to_string(k), rotated(u, img));
    }
    std::vector<double> other(dim);
    for (auto& x : other) {
        x = small(rng);
    }
    ops.emplace_back("X", rotated(random_unitary(dim, rng), other));
    return OCategory::build(std::move(ops));
}

double probability(const QuantumState& s, const Projector& p) {
    if (const auto* psi = std::get_if<StateVector>(&s)) {
        return (psi->amplitudes().adjoint() * p.matrix() * psi->amplitudes())(0, 0).real();
    }
    return std::get<DensityMatrix>(s).expectation(p);
}

/// Certainty of Ê[B ∈ f(Δ)] from eigenvalue probabilities of A.
bool certain_by_weights(const QuantumState& s, const EigenvalueMap& f, const ODecomposition& a, Mask delta) {
    std::vector<double> targets;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (delta & (Mask{1} << i)) {
            targets.push_back(f.image[i]);
        }
    }
    double total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (double t : targets) {
            if (std::abs(f.image[i] - t) < 1e-6) {
                total += probability(s, a.eigenprojectors()[i]);
                break;
            }
        }
    }
    return total > 1 - 1e-7;
}

}  // namespace

TEST_CASE("spectral decomposition of a diagonal operator") {
    const ODecomposition a(HermitianOperator(diag({2, -1, 1})));
    REQUIRE(a.size() == 3);
    CHECK(a.spectrum() == std::vector<double>{-1, 1, 2});
    CHECK(a.spectral_projector(0b001).approx_equal(Projector(diag({0, 1, 0}))));
    CHECK(a.spectral_projector(0b101).approx_equal(Projector(diag({1, 1, 0}))));
    CHECK(a.spectral_projector(0).approx_equal(Projector::zero(3)));
    CHECK(a.index_of(1.0) == std::size_t{1});
    CHECK_FALSE(a.index_of(0.5).has_value());
    CHECK(a.values(0b110) == std::vector<double>{1, 2});
    CHECK_THROWS_AS(a.spectral_projector(0b1000), Error);
}

TEST_CASE("squaring merges opposite eigenvalues") {
    const ODecomposition a(HermitianOperator(diag({-1, 1, 2})));
    const ODecomposition b(HermitianOperator(diag({1, 1, 4})));
    const auto f = discover_morphism(b, a);
    REQUIRE(f.has_value());
    CHECK(f->image == std::vector<double>{1, 1, 4});
    CHECK(image_mask(*f, a, 0b011, b) == 0b01);
    CHECK(image_mask(*f, a, 0b100, b) == 0b10);
    const auto cg = o_coarse_grain(*f, a, 0b001);
    CHECK(cg.agree);
    CHECK(cg.direct.approx_equal(Projector(diag({1, 1, 0}))));
    CHECK_FALSE(discover_morphism(a, b).has_value());
}

TEST_CASE("state on a squared operator") {
    const double s = 1.0 / std::sqrt(2.0);
    const QuantumState psi = StateVector(vec({s, s, 0}));
    const ODecomposition a(HermitianOperator(diag({-1, 1, 2})));
    const ODecomposition b(HermitianOperator(diag({1, 1, 4})));
    const auto f = discover_morphism(b, a);
    REQUIRE(f.has_value());
    const Mask sa = elementary_support(psi, a);
    CHECK(a.values(sa) == std::vector<double>{-1, 1});
    const Mask sb = elementary_support(psi, b);
    CHECK(b.values(sb) == std::vector<double>{1});
    CHECK(image_mask(*f, a, sa, b) == sb);
}

TEST_CASE("category construction") {
    CHECK_THROWS_AS(OCategory::build({}), Error);
    CHECK_THROWS_AS(OCategory::build({{"a", HermitianOperator(diag({1, 2}))}, {"a", HermitianOperator(diag({1, 3}))}}),
                    Error);
    CHECK_THROWS_AS(
        OCategory::build({{"a", HermitianOperator(diag({1, 2}))}, {"b", HermitianOperator(diag({1, 2, 3}))}}), Error);
    const auto cat = OCategory::build({{"A", HermitianOperator(diag({-1, 1, 2}))},
                                       {"B", HermitianOperator(diag({1, 1, 4}))},
                                       {"C", HermitianOperator(diag({0, 0, 1}))}});
    CHECK(cat.hom(1, 0).has_value());
    CHECK(cat.hom(2, 0).has_value());
    CHECK(cat.hom(2, 1).has_value());
    CHECK_FALSE(cat.hom(0, 1).has_value());
    CHECK(cat.sources(0).count() == 3);
    CHECK(cat.hom(1, 2).has_value());
    CHECK(cat.sources(2).count() == 2);
    const auto rep = check_composition(cat);
    CHECK(rep.reflexive);
    CHECK(rep.closed);
    const auto j = morphism_report(cat);
    CHECK(j["objects"].size() == 3);
    CHECK(j["composition"]["closed"] == true);
}

TEST_CASE("morphisms match polynomial functions on random categories") {
    Rng rng(61);
    for (int k = 0; k < 40; ++k) {
        std::vector<std::vector<double>> spectra;
        const auto cat = random_category(2 + k % 4, rng, spectra);
        for (std::size_t i = 1; i < spectra.size(); ++i) {
            const auto& f = cat.hom(i, 0);
            REQUIRE(f.has_value());
            const auto& a = cat.object(0);
            for (std::size_t e = 0; e < a.size(); ++e) {
                for (std::size_t x = 0; x < spectra[0].size(); ++x) {
                    if (std::abs(spectra[0][x] - a.spectrum()[e]) < 1e-9) {
                        CHECK(f->image[e] == doctest::Approx(spectra[i][x]));
                    }
                }
            }
        }
        const auto rep = check_composition(cat);
        CHECK(rep.reflexive);
        CHECK(rep.closed);
    }
}

TEST_CASE("coarse-graining in the operator category two ways") {
    Rng rng(62);
    for (int k = 0; k < 40; ++k) {
        std::vector<std::vector<double>> spectra;
        const auto cat = random_category(2 + k % 4, rng, spectra);
        for (std::size_t a = 0; a < cat.size(); ++a) {
            for (std::size_t b = 0; b < cat.size(); ++b) {
                const auto& f = cat.hom(b, a);
                if (!f) {
                    continue;
                }
                for (Mask d = 0; d <= cat.object(a).full_mask(); ++d) {
                    const auto cg = o_coarse_grain(*f, cat.object(a), d);
                    CHECK(cg.agree);
                    CHECK(cg.direct.approx_equal(
                        cat.object(b).spectral_projector(image_mask(*f, cat.object(a), d, cat.object(b)))));
                }
            }
        }
    }
}

TEST_CASE("state valuation on the operator category matches eigenvalue weights") {
    Rng rng(63);
    int draws = 0;
    int nonempty = 0;
    while (draws < 500) {
        std::vector<std::vector<double>> spectra;
        const std::size_t dim = 2 + static_cast<std::size_t>(draws) % 4;
        const auto cat = random_category(dim, rng, spectra);
        const QuantumState state = draws % 2 == 0 ? QuantumState(random_state(dim, rng))
                                                  : QuantumState(random_density(dim, rng, 1 + rng() % dim));
        for (std::size_t a = 0; a < cat.size() && draws < 500; ++a) {
            const Mask d = static_cast<Mask>(rng() % (cat.object(a).full_mask() + 1));
            ++draws;
            const auto ch = characterize_check(state, cat, a, d);
            CHECK(ch.equal());
            const ContextSet nu = nu_psi_o(state, cat, a, d);
            CHECK(nu == ch.definitional);
            for (std::size_t b = 0; b < cat.size(); ++b) {
                const auto& f = cat.hom(b, a);
                CHECK(nu.test(b) == (f && certain_by_weights(state, *f, cat.object(a), d)));
            }
            nonempty += nu.any() ? 1 : 0;
            CHECK(nu_psi_o_is_sieve(state, cat, a, d));
        }
    }
    CHECK(nonempty > 50);
}

TEST_CASE("supports map onto supports along morphisms") {
    Rng rng(64);
    for (int k = 0; k < 300; ++k) {
        std::vector<std::vector<double>> spectra;
        const std::size_t dim = 2 + static_cast<std::size_t>(k) % 4;
        const auto cat = random_category(dim, rng, spectra);
        const QuantumState state = k % 2 == 0 ? QuantumState(random_state(dim, rng))
                                              : QuantumState(random_density(dim, rng, 1 + rng() % dim));
        for (std::size_t a = 0; a < cat.size(); ++a) {
            const auto r = func_subset_check(state, cat, a);
            CHECK(r.subset);
            CHECK(r.equal);
            CHECK_FALSE(r.witness.has_value());
        }
    }
}

TEST_CASE("elementary supports of a state are the smallest certain subsets") {
    Rng rng(65);
    for (int k = 0; k < 50; ++k) {
        const std::size_t dim = 2 + static_cast<std::size_t>(k) % 4;
        std::vector<std::vector<double>> spectra;
        const auto cat = random_category(dim, rng, spectra);
        const QuantumState state = QuantumState(random_density(dim, rng, 1 + rng() % dim));
        for (std::size_t a = 0; a < cat.size(); ++a) {
            const auto& o = cat.object(a);
            const Mask s = elementary_support(state, o);
            CHECK(state_certain(state, o.spectral_projector(s)));
            for (Mask d = 0; d <= o.full_mask(); ++d) {
                if (state_certain(state, o.spectral_projector(d))) {
                    CHECK(mask_subset(s, d));
                }
            }
        }
    }
}
