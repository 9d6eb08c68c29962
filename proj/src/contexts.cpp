#include "toposval/contexts.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>

namespace toposval {

namespace {

// Entries rounded to this grid give the canonical sort key of an atom.
constexpr double kKeyScale = 1e6;

std::vector<long long> atom_key(const Projector& p) {
    std::vector<long long> key;
    key.reserve(static_cast<std::size_t>(p.matrix().size()) * 2);
    for (Eigen::Index r = 0; r < p.matrix().rows(); ++r) {
        for (Eigen::Index c = 0; c < p.matrix().cols(); ++c) {
            // Descending on the diagonal so that atoms supported early come first.
            key.push_back(-std::llround(p.matrix()(r, c).real() * kKeyScale));
            key.push_back(-std::llround(p.matrix()(r, c).imag() * kKeyScale));
        }
    }
    return key;
}

std::atomic<std::uint64_t> next_version{1};

}  // namespace

Context::Context(std::string id, std::vector<Projector> atoms)
    : id_(std::move(id)), atoms_(std::move(atoms)) {
    if (atoms_.empty()) {
        throw Error("Context '" + id_ + "': no atoms");
    }
    if (atoms_.size() > 31) {
        throw Error("Context '" + id_ + "': too many atoms");
    }
    const std::size_t n = atoms_.front().dim();
    Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i].dim() != n) {
            throw Error("Context '" + id_ + "': atoms of different dimension");
        }
        if (atoms_[i].rank() == 0) {
            throw Error("Context '" + id_ + "': zero atom");
        }
        for (std::size_t j = i + 1; j < atoms_.size(); ++j) {
            if (!atoms_[i].orthogonal_to(atoms_[j])) {
                throw Error("Context '" + id_ + "': atoms are not mutually orthogonal");
            }
        }
        sum += atoms_[i].matrix();
    }
    if (max_abs(sum - Matrix::Identity(sum.rows(), sum.cols())) >= tol::subspace) {
        throw Error("Context '" + id_ + "': atoms do not sum to the identity");
    }
    std::vector<std::pair<std::vector<long long>, std::size_t>> keyed;
    keyed.reserve(atoms_.size());
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        keyed.emplace_back(atom_key(atoms_[i]), i);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<Projector> sorted;
    sorted.reserve(atoms_.size());
    for (const auto& [key, i] : keyed) {
        sorted.push_back(atoms_[i]);
    }
    atoms_ = std::move(sorted);
}

Context Context::trivial(std::size_t dim, std::string id) {
    return Context(std::move(id), {Projector::identity(dim)});
}

Projector Context::lift(Mask mask) const {
    if (!valid_mask(mask)) {
        throw Error("Context '" + id_ + "': mask out of range");
    }
    const auto n = static_cast<Eigen::Index>(dim());
    Matrix out = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (mask & (Mask{1} << i)) {
            out += atoms_[i].matrix();
        }
    }
    return Projector(out);
}

bool Context::same_algebra(const Context& other) const {
    if (dim() != other.dim() || atom_count() != other.atom_count()) {
        return false;
    }
    return std::all_of(atoms_.begin(), atoms_.end(), [&](const Projector& a) {
        return std::any_of(other.atoms_.begin(), other.atoms_.end(),
                           [&](const Projector& b) { return a.approx_equal(b); });
    });
}

Context Context::renamed(std::string id) const {
    Context out = *this;
    out.id_ = std::move(id);
    return out;
}

Context context_from_operators(std::string id, const std::vector<HermitianOperator>& ops,
                               double tol_group) {
    if (ops.empty()) {
        throw Error("context_from_operators: no operators");
    }
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (ops[i].dim() != ops.front().dim()) {
            throw Error("context_from_operators: operators of different dimension");
        }
        for (std::size_t j = i + 1; j < ops.size(); ++j) {
            if (!commutes(ops[i], ops[j])) {
                std::ostringstream os;
                os << "context_from_operators: operators " << i << " and " << j << " do not commute";
                throw Error(os.str());
            }
        }
    }
    // Common refinement: products of eigenprojectors, keeping the nonzero ones.
    std::vector<Matrix> parts{Matrix::Identity(static_cast<Eigen::Index>(ops.front().dim()),
                                               static_cast<Eigen::Index>(ops.front().dim()))};
    for (const auto& op : ops) {
        std::vector<Matrix> next;
        for (const auto& block : eig_hermitian(op, tol_group)) {
            for (const auto& part : parts) {
                Matrix prod = part * block.projector.matrix();
                if (max_abs(prod) >= tol::subspace) {
                    next.push_back(std::move(prod));
                }
            }
        }
        parts = std::move(next);
    }
    std::vector<Projector> atoms;
    atoms.reserve(parts.size());
    for (auto& m : parts) {
        atoms.emplace_back(0.5 * (m + m.adjoint()));
    }
    return Context(std::move(id), std::move(atoms));
}

std::optional<std::vector<std::size_t>> refinement_map(const Context& v2, const Context& v1) {
    if (v2.dim() != v1.dim()) {
        throw Error("inclusion: contexts of different dimension");
    }
    std::vector<std::size_t> map(v1.atom_count(), v2.atom_count());
    for (std::size_t i = 0; i < v1.atom_count(); ++i) {
        for (std::size_t j = 0; j < v2.atom_count(); ++j) {
            if (v1.atom(i).leq(v2.atom(j))) {
                map[i] = j;
                break;
            }
        }
        if (map[i] == v2.atom_count()) {
            return std::nullopt;
        }
    }
    // Each V2 atom must be exactly the sum of the V1 atoms it contains.
    for (std::size_t j = 0; j < v2.atom_count(); ++j) {
        Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(v1.dim()), static_cast<Eigen::Index>(v1.dim()));
        for (std::size_t i = 0; i < v1.atom_count(); ++i) {
            if (map[i] == j) {
                sum += v1.atom(i).matrix();
            }
        }
        if (max_abs(sum - v2.atom(j).matrix()) >= tol::subspace) {
            return std::nullopt;
        }
    }
    return map;
}

bool inclusion(const Context& v2, const Context& v1) {
    return refinement_map(v2, v1).has_value();
}

Context meet(const Context& a, const Context& b, std::string id) {
    if (a.dim() != b.dim()) {
        throw Error("meet: contexts of different dimension");
    }
    // Union-find over the atoms of `a`: two atoms are joined when a single atom
    // of `b` overlaps both. Components are the atoms of the intersection.
    std::vector<std::size_t> parent(a.atom_count());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t j = 0; j < b.atom_count(); ++j) {
        std::optional<std::size_t> first;
        for (std::size_t i = 0; i < a.atom_count(); ++i) {
            if (max_abs(a.atom(i).matrix() * b.atom(j).matrix()) < tol::subspace) {
                continue;
            }
            if (!first) {
                first = i;
            } else {
                parent[find(i)] = find(*first);
            }
        }
    }
    std::vector<Mask> components;
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < a.atom_count(); ++i) {
        const std::size_t r = find(i);
        auto it = std::find(roots.begin(), roots.end(), r);
        if (it == roots.end()) {
            roots.push_back(r);
            components.push_back(Mask{1} << i);
        } else {
            components[static_cast<std::size_t>(it - roots.begin())] |= Mask{1} << i;
        }
    }
    std::vector<Projector> atoms;
    atoms.reserve(components.size());
    for (Mask m : components) {
        atoms.push_back(a.lift(m));
    }
    return Context(std::move(id), std::move(atoms));
}

std::vector<Mask> lattice_elements(const Context& v) {
    if (v.atom_count() > kMaxAtoms) {
        throw Error("lattice_elements: context '" + v.id() + "' has too many atoms to enumerate");
    }
    std::vector<Mask> out(std::size_t{1} << v.atom_count());
    std::iota(out.begin(), out.end(), Mask{0});
    return out;
}

bool belongs_to(const Context& v, const HermitianOperator& a) {
    if (a.dim() != v.dim()) {
        return false;
    }
    for (const auto& atom : v.atoms()) {
        const Matrix& e = atom.matrix();
        if (max_abs(a.matrix() * e - e * a.matrix()) >= tol::subspace) {
            return false;
        }
        const Complex mean = (e * a.matrix()).trace() / static_cast<double>(atom.rank());
        if (max_abs(a.matrix() * e - mean * e) >= tol::subspace) {
            return false;
        }
    }
    return true;
}

double evaluate(const Context& v, std::size_t atom, const HermitianOperator& a) {
    if (atom >= v.atom_count()) {
        throw Error("evaluate: character index out of range");
    }
    if (!belongs_to(v, a)) {
        throw Error("evaluate: operator does not belong to context '" + v.id() + "'");
    }
    const Projector& e = v.atom(atom);
    return (e.matrix() * a.matrix()).trace().real() / static_cast<double>(e.rank());
}

Mask v_of_p(const Context& v, Mask p) {
    if (!v.valid_mask(p)) {
        throw Error("v_of_p: lattice element does not belong to context '" + v.id() + "'");
    }
    return p;
}

ContextPoset ContextPoset::build(std::vector<Context> contexts, bool add_trivial,
                                 bool close_under_meets) {
    ContextPoset poset;
    if (contexts.empty() && !add_trivial) {
        throw Error("build_poset: no contexts");
    }
    std::size_t dim = 0;
    for (const auto& c : contexts) {
        if (dim == 0) {
            dim = c.dim();
        } else if (c.dim() != dim) {
            throw Error("build_poset: contexts of mixed dimension");
        }
    }
    if (dim == 0) {
        throw Error("build_poset: cannot infer the dimension of an empty context list");
    }

    auto insert = [&](Context c) {
        for (const auto& existing : poset.contexts_) {
            if (existing.same_algebra(c)) {
                return false;
            }
        }
        for (const auto& existing : poset.contexts_) {
            if (existing.id() == c.id()) {
                throw Error("build_poset: duplicate context id '" + c.id() + "'");
            }
        }
        poset.contexts_.push_back(std::move(c));
        return true;
    };
    for (auto& c : contexts) {
        insert(std::move(c));
    }
    auto unique_id = [&](std::string base) {
        std::string id = base;
        for (std::size_t k = 1; poset.index_of(id); ++k) {
            id = base + "_" + std::to_string(k);
        }
        return id;
    };
    if (close_under_meets) {
        bool grew = true;
        std::size_t fresh = 0;
        while (grew) {
            grew = false;
            const std::size_t n = poset.contexts_.size();
            for (std::size_t i = 0; i < n && !grew; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    Context m = meet(poset.contexts_[i], poset.contexts_[j], "");
                    const bool known = std::any_of(poset.contexts_.begin(), poset.contexts_.end(),
                                                   [&](const Context& c) { return c.same_algebra(m); });
                    if (!known) {
                        const bool is_trivial = m.atom_count() == 1;
                        std::string id = is_trivial ? unique_id("triv") : unique_id("meet" + std::to_string(fresh++));
                        insert(m.renamed(std::move(id)));
                        grew = true;
                    }
                }
            }
        }
    }
    if (add_trivial) {
        Context triv = Context::trivial(dim);
        const bool known = std::any_of(poset.contexts_.begin(), poset.contexts_.end(),
                                       [&](const Context& c) { return c.same_algebra(triv); });
        if (!known) {
            insert(triv.renamed(unique_id("triv")));
        }
    }

    const std::size_t n = poset.contexts_.size();
    poset.dim_ = dim;
    poset.leq_.assign(n, std::vector<bool>(n, false));
    poset.maps_.assign(n, std::vector<std::vector<std::size_t>>(n));
    poset.down_.assign(n, ContextSet(n));
    for (std::size_t lo = 0; lo < n; ++lo) {
        for (std::size_t up = 0; up < n; ++up) {
            if (auto map = refinement_map(poset.contexts_[lo], poset.contexts_[up])) {
                poset.leq_[lo][up] = true;
                poset.maps_[lo][up] = std::move(*map);
                poset.down_[up].set(lo);
            }
        }
    }
    for (const auto& c : poset.contexts_) {
        if (c.atom_count() == 1) {
            poset.includes_trivial_ = true;
        }
    }
    poset.version_ = next_version.fetch_add(1);
    return poset;
}

std::optional<std::size_t> ContextPoset::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < contexts_.size(); ++i) {
        if (contexts_[i].id() == id) {
            return i;
        }
    }
    return std::nullopt;
}

const std::vector<std::size_t>& ContextPoset::atom_map(std::size_t lower, std::size_t upper) const {
    if (lower >= size() || upper >= size() || !leq_[lower][upper]) {
        std::ostringstream os;
        os << "context " << lower << " is not included in context " << upper;
        throw Error(os.str());
    }
    return maps_[lower][upper];
}

std::vector<std::pair<std::size_t, std::size_t>> ContextPoset::covers() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t lo = 0; lo < size(); ++lo) {
        for (std::size_t up = 0; up < size(); ++up) {
            if (lo == up || !leq_[lo][up]) {
                continue;
            }
            bool direct = true;
            for (std::size_t mid = 0; mid < size() && direct; ++mid) {
                if (mid != lo && mid != up && leq_[lo][mid] && leq_[mid][up]) {
                    direct = false;
                }
            }
            if (direct) {
                out.emplace_back(lo, up);
            }
        }
    }
    return out;
}

std::vector<std::size_t> ContextPoset::maximal() const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < size(); ++v) {
        bool top = true;
        for (std::size_t w = 0; w < size() && top; ++w) {
            if (w != v && leq_[v][w]) {
                top = false;
            }
        }
        if (top) {
            out.push_back(v);
        }
    }
    return out;
}

ContextPoset fixture_a() {
    const Matrix id = Matrix::Identity(3, 3);
    std::vector<Projector> p;
    for (Eigen::Index i = 0; i < 3; ++i) {
        p.emplace_back(Matrix(id.col(i) * id.col(i).adjoint()));
    }
    Context v1("V1", p);
    Context v2("V2", {p[0], Projector(p[1].matrix() + p[2].matrix())});
    return ContextPoset::build({v1, v2}, true);
}

}  // namespace toposval
