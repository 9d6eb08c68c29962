#include "toposval/ocat.hpp"

#include <cmath>
#include <set>

namespace toposval {

namespace {

bool same_value(double x, double y) { return std::abs(x - y) <= tol::group; }

bool contains_value(const std::vector<double>& values, double x) {
    for (double v : values) {
        if (same_value(v, x)) {
            return true;
        }
    }
    return false;
}

std::vector<double> image_values(const EigenvalueMap& f, Mask delta) {
    std::vector<double> out;
    for (std::size_t i = 0; i < f.image.size(); ++i) {
        if ((delta >> i) & 1U) {
            if (!contains_value(out, f.image[i])) {
                out.push_back(f.image[i]);
            }
        }
    }
    return out;
}

bool subset_values(const std::vector<double>& a, const std::vector<double>& b) {
    for (double x : a) {
        if (!contains_value(b, x)) {
            return false;
        }
    }
    return true;
}

}  // namespace

ODecomposition::ODecomposition(HermitianOperator op, double tol_group) : op_(std::move(op)) {
    auto blocks = eig_hermitian(op_, tol_group);
    if (blocks.size() > 31) {
        throw Error("operator has more than 31 distinct eigenvalues");
    }
    for (auto& b : blocks) {
        spectrum_.push_back(b.eigenvalue);
        projectors_.push_back(std::move(b.projector));
    }
}

Projector ODecomposition::spectral_projector(Mask delta) const {
    if (!mask_subset(delta, full_mask())) {
        throw Error("eigenvalue subset out of range");
    }
    const auto n = static_cast<Eigen::Index>(dim());
    Matrix m = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < size(); ++i) {
        if ((delta >> i) & 1U) {
            m += projectors_[i].matrix();
        }
    }
    return Projector(std::move(m));
}

std::optional<std::size_t> ODecomposition::index_of(double value) const {
    for (std::size_t i = 0; i < spectrum_.size(); ++i) {
        if (same_value(spectrum_[i], value)) {
            return i;
        }
    }
    return std::nullopt;
}

std::vector<double> ODecomposition::values(Mask delta) const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) {
        if ((delta >> i) & 1U) {
            out.push_back(spectrum_[i]);
        }
    }
    return out;
}

std::optional<EigenvalueMap> discover_morphism(const ODecomposition& b, const ODecomposition& a) {
    if (a.dim() != b.dim()) {
        throw Error("operators of different dimension");
    }
    const Matrix& bm = b.op().matrix();
    const auto n = static_cast<Eigen::Index>(a.dim());
    Matrix rebuilt = Matrix::Zero(n, n);
    EigenvalueMap f;
    for (const auto& e : a.eigenprojectors()) {
        const double c = (bm * e.matrix()).trace().real() / static_cast<double>(e.rank());
        rebuilt += c * e.matrix();
        f.image.push_back(c);
    }
    if (max_abs(rebuilt - bm) > tol::group) {
        return std::nullopt;
    }
    for (auto& c : f.image) {
        const auto idx = b.index_of(c);
        if (!idx) {
            return std::nullopt;
        }
        c = b.spectrum()[*idx];
    }
    return f;
}

Mask image_mask(const EigenvalueMap& f, const ODecomposition& a, Mask delta, const ODecomposition& b) {
    if (f.image.size() != a.size()) {
        throw Error("eigenvalue map does not match the source spectrum");
    }
    Mask out = 0;
    for (double x : image_values(f, delta)) {
        const auto idx = b.index_of(x);
        if (!idx) {
            throw Error("image value outside the target spectrum");
        }
        out |= Mask{1} << *idx;
    }
    return out;
}

OCoarseGrain o_coarse_grain(const EigenvalueMap& f, const ODecomposition& a, Mask delta) {
    if (f.image.size() != a.size()) {
        throw Error("eigenvalue map does not match the source spectrum");
    }
    const auto target = image_values(f, delta);
    Mask preimage = 0;
    for (std::size_t i = 0; i < f.image.size(); ++i) {
        if (contains_value(target, f.image[i])) {
            preimage |= Mask{1} << i;
        }
    }
    Projector direct = a.spectral_projector(preimage);

    const auto n = static_cast<Eigen::Index>(a.dim());
    Matrix fa = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < a.size(); ++i) {
        fa += f.image[i] * a.eigenprojectors()[i].matrix();
    }
    const ODecomposition w(HermitianOperator(0.5 * (fa + fa.adjoint())));
    const Projector e = a.spectral_projector(delta);
    Mask inf = w.full_mask();
    for (Mask m = 0; m <= w.full_mask(); ++m) {
        if (e.leq(w.spectral_projector(m))) {
            inf &= m;
        }
    }
    Projector infimum = w.spectral_projector(inf);
    const bool agree = direct.approx_equal(infimum);
    return {std::move(direct), std::move(infimum), agree};
}

Mask elementary_support(const QuantumState& state, const ODecomposition& a) {
    Mask out = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Matrix& e = a.eigenprojectors()[i].matrix();
        double weight = 0;
        double floor = 0;
        if (const auto* psi = std::get_if<StateVector>(&state)) {
            weight = psi->amplitudes().dot(e * psi->amplitudes()).real();
            floor = tol::vector_weight;
        } else {
            weight = std::get<DensityMatrix>(state).expectation(a.eigenprojectors()[i]);
            floor = tol::support_weight;
        }
        if (weight > floor) {
            out |= Mask{1} << i;
        }
    }
    return out;
}

bool state_certain(const QuantumState& state, const Projector& p) {
    if (const auto* psi = std::get_if<StateVector>(&state)) {
        const Vector& v = psi->amplitudes();
        return (v - p.matrix() * v).squaredNorm() <= tol::vector_weight;
    }
    return certain(std::get<DensityMatrix>(state), p);
}

OCategory OCategory::build(std::vector<std::pair<std::string, HermitianOperator>> operators) {
    if (operators.empty()) {
        throw Error("empty operator set");
    }
    OCategory c;
    std::set<std::string> seen;
    const std::size_t dim = operators.front().second.dim();
    for (auto& [id, op] : operators) {
        if (!seen.insert(id).second) {
            throw Error("duplicate operator id: " + id);
        }
        if (op.dim() != dim) {
            throw Error("operators of mixed dimension");
        }
        c.ids_.push_back(id);
        c.objects_.emplace_back(std::move(op));
    }
    const std::size_t n = c.objects_.size();
    c.hom_.assign(n, std::vector<std::optional<EigenvalueMap>>(n));
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t a = 0; a < n; ++a) {
            c.hom_[b][a] = discover_morphism(c.objects_[b], c.objects_[a]);
        }
    }
    return c;
}

ContextSet OCategory::sources(std::size_t a) const {
    ContextSet out(size());
    for (std::size_t b = 0; b < size(); ++b) {
        if (hom(b, a)) {
            out.set(b);
        }
    }
    return out;
}

CompositionReport check_composition(const OCategory& category) {
    CompositionReport report;
    const std::size_t n = category.size();
    for (std::size_t a = 0; a < n; ++a) {
        if (!category.hom(a, a)) {
            report.reflexive = false;
            report.witness = {a, a};
            return report;
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const auto& f = category.hom(b, a);
            if (!f) {
                continue;
            }
            for (std::size_t c = 0; c < n; ++c) {
                const auto& g = category.hom(c, b);
                if (!g) {
                    continue;
                }
                const auto& h = category.hom(c, a);
                bool ok = h.has_value();
                for (std::size_t i = 0; ok && i < f->image.size(); ++i) {
                    const auto j = category.object(b).index_of(f->image[i]);
                    ok = j && same_value(h->image[i], g->image[*j]);
                }
                if (!ok) {
                    report.closed = false;
                    report.witness = {c, a};
                    return report;
                }
            }
        }
    }
    return report;
}

ContextSet nu_psi_o(const QuantumState& state, const OCategory& category, std::size_t a, Mask delta) {
    ContextSet out(category.size());
    for (std::size_t b = 0; b < category.size(); ++b) {
        if (const auto& f = category.hom(b, a)) {
            if (state_certain(state, o_coarse_grain(*f, category.object(a), delta).direct)) {
                out.set(b);
            }
        }
    }
    return out;
}

CharacterizationReport characterize_check(const QuantumState& state, const OCategory& category, std::size_t a,
                                          Mask delta) {
    CharacterizationReport report{nu_psi_o(state, category, a, delta), ContextSet(category.size())};
    const Mask s = elementary_support(state, category.object(a));
    for (std::size_t b = 0; b < category.size(); ++b) {
        if (const auto& f = category.hom(b, a)) {
            if (subset_values(image_values(*f, s), image_values(*f, delta))) {
                report.via_support.set(b);
            }
        }
    }
    return report;
}

FuncSubsetReport func_subset_check(const QuantumState& state, const OCategory& category, std::size_t a) {
    FuncSubsetReport report;
    const Mask s = elementary_support(state, category.object(a));
    for (std::size_t b = 0; b < category.size(); ++b) {
        const auto& f = category.hom(b, a);
        if (!f) {
            continue;
        }
        const Mask pushed = image_mask(*f, category.object(a), s, category.object(b));
        const Mask sb = elementary_support(state, category.object(b));
        if (!mask_subset(pushed, sb)) {
            report.subset = false;
            report.witness = report.witness.value_or(b);
        }
        if (pushed != sb) {
            report.equal = false;
            report.witness = report.witness.value_or(b);
        }
    }
    return report;
}

bool nu_psi_o_is_sieve(const QuantumState& state, const OCategory& category, std::size_t a, Mask delta) {
    const ContextSet s = nu_psi_o(state, category, a, delta);
    for (std::size_t b = 0; b < category.size(); ++b) {
        if (!s.test(b)) {
            continue;
        }
        for (std::size_t c = 0; c < category.size(); ++c) {
            if (category.hom(c, b) && !s.test(c)) {
                return false;
            }
        }
    }
    return true;
}

nlohmann::json morphism_report(const OCategory& category) {
    nlohmann::json objects = nlohmann::json::array();
    nlohmann::json morphisms = nlohmann::json::array();
    for (std::size_t a = 0; a < category.size(); ++a) {
        objects.push_back({{"id", category.id(a)}, {"spectrum", category.object(a).spectrum()}});
        for (std::size_t b = 0; b < category.size(); ++b) {
            if (const auto& f = category.hom(b, a)) {
                nlohmann::json map = nlohmann::json::array();
                for (std::size_t i = 0; i < f->image.size(); ++i) {
                    map.push_back({category.object(a).spectrum()[i], f->image[i]});
                }
                morphisms.push_back({{"from", category.id(b)}, {"to", category.id(a)}, {"map", map}});
            }
        }
    }
    const auto comp = check_composition(category);
    nlohmann::json composition = {{"reflexive", comp.reflexive}, {"closed", comp.closed}};
    if (comp.witness) {
        composition["witness"] = {category.id(comp.witness->first), category.id(comp.witness->second)};
    }
    return {{"objects", objects}, {"morphisms", morphisms}, {"composition", composition}};
}

}  // namespace toposval
