#include "doctest.h"

#include "support.hpp"

using namespace testing;

TEST_CASE("context from a nondegenerate diagonal operator") {
    const Context c = context_from_operators("c", {HermitianOperator(diag({0, 1, 2}))});
    REQUIRE(c.atom_count() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK_NOTHROW(atom_index(c, basis_projector(3, i)));
    }
}

TEST_CASE("degenerate eigenvalues merge into one atom") {
    const Context c = context_from_operators("c", {HermitianOperator(diag({5, 5, 7}))});
    REQUIRE(c.atom_count() == 2);
    CHECK_NOTHROW(atom_index(c, Projector(diag({1, 1, 0}))));
    CHECK_NOTHROW(atom_index(c, Projector(diag({0, 0, 1}))));
}

TEST_CASE("joint refinement of two commuting operators") {
    const Context c =
        context_from_operators("c", {HermitianOperator(diag({0, 1, 1})), HermitianOperator(diag({1, 1, 0}))});
    REQUIRE(c.atom_count() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK_NOTHROW(atom_index(c, basis_projector(3, i)));
    }
}

TEST_CASE("non-commuting generators are reported with their indices") {
    Matrix sx(2, 2);
    sx << 0, 1, 1, 0;
    try {
        context_from_operators("c", {HermitianOperator(diag({1, -1})), HermitianOperator(diag({1, 1})),
                                     HermitianOperator(sx)});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("0 and 2") != std::string::npos);
    }
}

TEST_CASE("context invariants are enforced") {
    CHECK_THROWS_AS(Context("c", {basis_projector(2, 0)}), Error);
    CHECK_THROWS_AS(Context("c", {basis_projector(2, 0), basis_projector(2, 0)}), Error);
    CHECK_THROWS_AS(Context("c", {}), Error);
}

TEST_CASE("canonical ordering makes equal algebras equal") {
    const Context a("a", {basis_projector(3, 2), basis_projector(3, 0), basis_projector(3, 1)});
    const Context b("b", {basis_projector(3, 1), basis_projector(3, 2), basis_projector(3, 0)});
    CHECK(a.same_algebra(b));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.atom(i).approx_equal(b.atom(i)));
    }
}

TEST_CASE("inclusion on the three-context chain") {
    const auto p = fix_a();
    const Context& v1 = p->context(idx(*p, "V1"));
    const Context& v2 = p->context(idx(*p, "V2"));
    const Context triv = Context::trivial(3);
    CHECK(inclusion(v2, v1));
    CHECK_FALSE(inclusion(v1, v2));
    CHECK(inclusion(triv, v1));
    CHECK(inclusion(triv, v2));
    CHECK(inclusion(v1, v1));
}

TEST_CASE("lattice elements") {
    CHECK(lattice_elements(Context::trivial(2)).size() == 2);
    CHECK(lattice_elements(diagonal_context(3)).size() == 8);
    const auto p = fix_a();
    const auto els = lattice_elements(p->context(idx(*p, "V2")));
    CHECK(els == std::vector<Mask>{0, 1, 2, 3});
    for (Mask a : els) {
        for (Mask b : els) {
            const Context& v2 = p->context(idx(*p, "V2"));
            CHECK(mask_subset(a, b) == v2.lift(a).leq(v2.lift(b)));
        }
    }
}

TEST_CASE("gelfand evaluation") {
    const Context d = diagonal_context(3);
    CHECK(evaluate(d, atom_index(d, basis_projector(3, 1)), HermitianOperator(diag({4, 5, 6}))) ==
          doctest::Approx(5.0));
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(evaluate(d, k, HermitianOperator(Matrix::Identity(3, 3))) == doctest::Approx(1.0));
    }
    const Context c("c", {basis_projector(3, 0), Projector(diag({0, 1, 1}))});
    CHECK(evaluate(c, atom_index(c, Projector(diag({0, 1, 1}))), HermitianOperator(diag({3, 7, 7}))) ==
          doctest::Approx(7.0));
    CHECK_THROWS_AS(evaluate(c, 0, HermitianOperator(diag({3, 7, 8}))), Error);
}

TEST_CASE("characters selected by a lattice element") {
    const auto p = fix_a();
    const Context& v1 = p->context(idx(*p, "V1"));
    CHECK(v_of_p(v1, v1.full_mask()) == v1.full_mask());
    CHECK(v_of_p(v1, 0) == 0);
    const Mask p12 = mask_of(v1, Projector(diag({0, 1, 1})));
    const Mask expected = (Mask{1} << atom_index(v1, basis_projector(3, 1))) |
                          (Mask{1} << atom_index(v1, basis_projector(3, 2)));
    CHECK(v_of_p(v1, p12) == expected);
    CHECK_THROWS_AS(v_of_p(v1, 8), Error);
}

TEST_CASE("poset construction") {
    SUBCASE("empty list with the trivial context") {
        const auto p = ContextPoset::build({Context::trivial(2)}, true);
        CHECK(p.size() == 1);
        CHECK(p.includes_trivial());
    }
    SUBCASE("the three-context chain") {
        const auto p = fix_a();
        REQUIRE(p->size() == 3);
        const auto v1 = idx(*p, "V1");
        const auto v2 = idx(*p, "V2");
        const auto t = idx(*p, "triv");
        CHECK(p->leq(t, v2));
        CHECK(p->leq(v2, v1));
        CHECK(p->leq(t, v1));
        CHECK_FALSE(p->leq(v1, v2));
        CHECK(p->covers().size() == 2);
        CHECK(p->maximal() == std::vector<std::size_t>{v1});
    }
    SUBCASE("two incomparable bases in dimension two") {
        const auto p = ContextPoset::build({diagonal_context(2), hadamard_context()}, true);
        CHECK(p.size() == 3);
        CHECK(p.covers().size() == 2);
        CHECK(p.maximal().size() == 2);
    }
    SUBCASE("mixed dimensions") {
        CHECK_THROWS_AS(ContextPoset::build({diagonal_context(2), diagonal_context(3)}, true), Error);
    }
    SUBCASE("duplicate algebras are merged") {
        const auto p = ContextPoset::build({diagonal_context(3, "a"), diagonal_context(3, "b")}, false);
        CHECK(p.size() == 1);
    }
    SUBCASE("duplicate ids are rejected") {
        const Context c("a", {basis_projector(2, 0), basis_projector(2, 1)});
        CHECK_THROWS_AS(ContextPoset::build({c, hadamard_context("a")}, false), Error);
    }
    SUBCASE("versions differ between posets") {
        CHECK(fix_a()->version() != fix_a()->version());
    }
}

TEST_CASE("closing under meets adds common coarsenings") {
    const Context a("a", {basis_projector(3, 0), Projector(diag({0, 1, 1}))});
    const Context b("b", {Projector(diag({1, 1, 0})), basis_projector(3, 2)});
    const auto open = ContextPoset::build({a, b}, true, false);
    CHECK(open.size() == 3);
    // a ∧ b is trivial here; the meet of the full diagonal with a is a itself.
    const auto closed = ContextPoset::build({diagonal_context(3), a, b}, true, true);
    CHECK(closed.size() == 4);
    const Context m = meet(a, b, "m");
    CHECK(m.atom_count() == 1);
}

TEST_CASE("functional composition and multiplicativity of characters") {
    Rng rng(21);
    for (int k = 0; k < 100; ++k) {
        const std::size_t dim = 2 + k % 4;
        const Matrix u = random_unitary(dim, rng);
        std::uniform_int_distribution<int> small(-2, 2);
        Eigen::VectorXd da(static_cast<Eigen::Index>(dim));
        Eigen::VectorXd db(static_cast<Eigen::Index>(dim));
        for (Eigen::Index i = 0; i < da.size(); ++i) {
            da[i] = small(rng);
            db[i] = small(rng);
        }
        const Matrix am = u * da.cast<Complex>().asDiagonal() * u.adjoint();
        const Matrix bm = u * db.cast<Complex>().asDiagonal() * u.adjoint();
        const HermitianOperator a(0.5 * (am + am.adjoint()));
        const HermitianOperator b(0.5 * (bm + bm.adjoint()));
        const Context c = context_from_operators("c", {a, b});
        // f(x) = x² − 3x + 1 through the eigenvalue map
        Eigen::VectorXd fd = da.array().square() - 3 * da.array() + 1;
        const Matrix fm = u * fd.cast<Complex>().asDiagonal() * u.adjoint();
        const HermitianOperator fa(0.5 * (fm + fm.adjoint()));
        const Matrix abm = a.matrix() * b.matrix();
        const HermitianOperator ab(0.5 * (abm + abm.adjoint()));
        for (std::size_t kappa = 0; kappa < c.atom_count(); ++kappa) {
            const double x = evaluate(c, kappa, a);
            CHECK(evaluate(c, kappa, fa) == doctest::Approx(x * x - 3 * x + 1).epsilon(1e-7));
            CHECK(evaluate(c, kappa, ab) == doctest::Approx(x * evaluate(c, kappa, b)).epsilon(1e-7));
        }
        CHECK(v_of_p(c, c.full_mask()) == c.full_mask());
    }
}

TEST_CASE("inclusion is a partial order on random posets") {
    Rng rng(22);
    for (int k = 0; k < 200; ++k) {
        const ContextPoset p = random_poset(rng);
        const std::size_t n = p.size();
        std::size_t triv = n;
        for (std::size_t a = 0; a < n; ++a) {
            if (p.context(a).atom_count() == 1) {
                triv = a;
            }
        }
        REQUIRE(triv < n);
        for (std::size_t a = 0; a < n; ++a) {
            CHECK(p.leq(a, a));
            CHECK(p.leq(triv, a));
            for (std::size_t b = 0; b < n; ++b) {
                CHECK(p.leq(a, b) == inclusion(p.context(a), p.context(b)));
                if (a != b) {
                    CHECK_FALSE((p.leq(a, b) && p.leq(b, a)));
                }
                for (std::size_t c = 0; c < n; ++c) {
                    if (p.leq(a, b) && p.leq(b, c)) {
                        CHECK(p.leq(a, c));
                    }
                }
            }
        }
    }
}
