#include "toposval/ks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "toposval/presheaves.hpp"

namespace toposval {

namespace {

Vector ray(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        v[i++] = x;
    }
    return v;
}

Matrix ray_projector(const Vector& v) {
    const Vector u = v.normalized();
    return u * u.adjoint();
}

// Rounded projector entries identify a ray independently of sign and phase.
std::vector<long long> ray_key(const Vector& v) {
    const Matrix p = ray_projector(v);
    std::vector<long long> key;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        key.push_back(std::llround(p(i).real() * 1e6));
        key.push_back(std::llround(p(i).imag() * 1e6));
    }
    return key;
}

}  // namespace

KsFixture cabello_fixture() {
    KsFixture f{4, {}};
    f.bases = {
        {ray({0, 0, 0, 1}), ray({0, 0, 1, 0}), ray({1, 1, 0, 0}), ray({1, -1, 0, 0})},
        {ray({0, 0, 0, 1}), ray({0, 1, 0, 0}), ray({1, 0, 1, 0}), ray({1, 0, -1, 0})},
        {ray({1, -1, 1, -1}), ray({1, -1, -1, 1}), ray({1, 1, 0, 0}), ray({0, 0, 1, 1})},
        {ray({1, -1, 1, -1}), ray({1, 1, 1, 1}), ray({1, 0, -1, 0}), ray({0, 1, 0, -1})},
        {ray({0, 0, 1, 0}), ray({0, 1, 0, 0}), ray({1, 0, 0, 1}), ray({1, 0, 0, -1})},
        {ray({1, -1, -1, 1}), ray({1, 1, 1, 1}), ray({1, 0, 0, -1}), ray({0, 1, -1, 0})},
        {ray({1, 1, -1, 1}), ray({1, 1, 1, -1}), ray({1, -1, 0, 0}), ray({0, 0, 1, 1})},
        {ray({1, 1, -1, 1}), ray({-1, 1, 1, 1}), ray({1, 0, 1, 0}), ray({0, 1, 0, -1})},
        {ray({1, 1, 1, -1}), ray({-1, 1, 1, 1}), ray({1, 0, 0, 1}), ray({0, 1, -1, 0})},
    };
    return f;
}

FixtureValidation validate_fixture(const KsFixture& fixture) {
    FixtureValidation out;
    std::map<std::vector<long long>, std::size_t> occurrences;
    for (std::size_t b = 0; b < fixture.bases.size(); ++b) {
        const auto& basis = fixture.bases[b];
        if (basis.size() != fixture.dim) {
            out.orthogonal = false;
            out.message = "basis " + std::to_string(b) + " does not have " + std::to_string(fixture.dim) + " rays";
        }
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (static_cast<std::size_t>(basis[i].size()) != fixture.dim || basis[i].norm() == 0) {
                out.orthogonal = false;
                out.message = "basis " + std::to_string(b) + " has a malformed ray";
                continue;
            }
            ++occurrences[ray_key(basis[i])];
            for (std::size_t j = i + 1; j < basis.size(); ++j) {
                if (std::abs(basis[i].normalized().dot(basis[j].normalized())) > 1e-10) {
                    out.orthogonal = false;
                    out.message = "basis " + std::to_string(b) + ": rays " + std::to_string(i) + " and " +
                                  std::to_string(j) + " are not orthogonal";
                }
            }
        }
    }
    out.distinct_rays = occurrences.size();
    std::size_t total = 0;
    for (const auto& [key, count] : occurrences) {
        total += count;
        if (count != 2) {
            out.shared_twice = false;
            if (out.message.empty()) {
                out.message = "a ray occurs in " + std::to_string(count) + " bases";
            }
        }
    }
    // Σ_bases (#rays valued 1) = #bases, and the same sum counts each ray valued 1 twice.
    out.parity_obstruction = out.shared_twice && total % 2 == 0 && fixture.bases.size() % 2 == 1;
    return out;
}

ContextPoset ks_poset(const KsFixture& fixture) {
    const FixtureValidation v = validate_fixture(fixture);
    if (!v.valid()) {
        throw Error("KS fixture rejected: " + v.message);
    }
    std::vector<Context> contexts;
    for (std::size_t b = 0; b < fixture.bases.size(); ++b) {
        std::vector<Projector> atoms;
        for (const auto& r : fixture.bases[b]) {
            atoms.emplace_back(ray_projector(r));
        }
        contexts.emplace_back("K" + std::to_string(b + 1), std::move(atoms));
    }
    return ContextPoset::build(std::move(contexts), true, true);
}

SectionSearchResult global_section_search(const ContextPoset& poset, bool reverse_order) {
    SectionSearchResult result;
    std::vector<std::size_t> anchors = poset.maximal();
    if (reverse_order) {
        std::reverse(anchors.begin(), anchors.end());
    }
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> value(poset.size(), unset);
    // Number of anchors currently forcing each context's value.
    std::vector<std::size_t> depth(poset.size(), 0);

    std::function<bool(std::size_t)> descend = [&](std::size_t k) -> bool {
        if (k == anchors.size()) {
            return true;
        }
        const std::size_t v1 = anchors[k];
        const std::size_t n = poset.context(v1).atom_count();
        for (std::size_t t = 0; t < n; ++t) {
            const std::size_t atom = reverse_order ? n - 1 - t : t;
            ++result.nodes_explored;
            std::vector<std::size_t> touched;
            bool ok = true;
            const auto& down = poset.down_set(v1);
            for (std::size_t v2 = down.find_first(); v2 != ContextSet::npos; v2 = down.find_next(v2)) {
                const std::size_t induced = poset.atom_map(v2, v1)[atom];
                if (value[v2] == unset) {
                    value[v2] = induced;
                } else if (value[v2] != induced) {
                    ok = false;
                    break;
                }
                ++depth[v2];
                touched.push_back(v2);
            }
            if (ok && descend(k + 1)) {
                return true;
            }
            for (std::size_t v2 : touched) {
                if (--depth[v2] == 0) {
                    value[v2] = unset;
                }
            }
        }
        return false;
    };

    if (descend(0)) {
        result.section = SectionAssignment{value};
    }
    return result;
}

bool section_verify(const ContextPoset& poset, const SectionAssignment& s) {
    if (s.atoms.size() != poset.size()) {
        return false;
    }
    for (std::size_t v = 0; v < poset.size(); ++v) {
        if (s.atoms[v] >= poset.context(v).atom_count()) {
            return false;
        }
    }
    for (std::size_t v1 = 0; v1 < poset.size(); ++v1) {
        for (std::size_t v2 = 0; v2 < poset.size(); ++v2) {
            if (!poset.leq(v2, v1)) {
                continue;
            }
            if (sigma_restrict(poset, v2, v1, {v1, s.atoms[v1]}).atom != s.atoms[v2]) {
                return false;
            }
            const Context& c1 = poset.context(v1);
            const Context& c2 = poset.context(v2);
            for (std::size_t i = 0; i < c2.atom_count(); ++i) {
                const HermitianOperator a(c2.atom(i).matrix());
                if (std::abs(evaluate(c1, s.atoms[v1], a) - evaluate(c2, s.atoms[v2], a)) > tol::trace_rank) {
                    return false;
                }
            }
        }
    }
    return true;
}

nlohmann::json to_json(const ContextPoset& poset, const SectionSearchResult& r) {
    nlohmann::json out = {{"exists", r.exists()}, {"nodesExplored", r.nodes_explored}};
    if (r.section) {
        nlohmann::json w = nlohmann::json::object();
        for (std::size_t v = 0; v < poset.size(); ++v) {
            w[poset.context(v).id()] = r.section->atoms[v];
        }
        out["witness"] = w;
    }
    return out;
}

}  // namespace toposval
