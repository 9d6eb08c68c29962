#pragma once

#include <memory>
#include <vector>

#include "toposval/contexts.hpp"
#include "toposval/linalg.hpp"
#include "toposval/presheaves.hpp"
#include "toposval/random.hpp"
#include "toposval/valuations.hpp"

namespace testing {

using namespace toposval;

inline Matrix diag(std::initializer_list<double> xs) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        d[i++] = x;
    }
    return d.cast<Complex>().asDiagonal();
}

inline Vector vec(std::initializer_list<Complex> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (auto x : xs) {
        v[i++] = x;
    }
    return v;
}

inline Projector ket_projector(const Vector& v) {
    const Vector u = v.normalized();
    return Projector(u * u.adjoint());
}

inline Projector basis_projector(std::size_t dim, std::size_t i) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    return Projector(m);
}

inline Context diagonal_context(std::size_t dim, std::string id = "diag") {
    std::vector<Projector> atoms;
    for (std::size_t i = 0; i < dim; ++i) {
        atoms.push_back(basis_projector(dim, i));
    }
    return Context(std::move(id), std::move(atoms));
}

inline Context hadamard_context(std::string id = "had") {
    const double s = 1.0 / std::sqrt(2.0);
    return Context(std::move(id), {ket_projector(vec({s, s})), ket_projector(vec({s, -s}))});
}

inline PosetPtr share(ContextPoset p) { return std::make_shared<const ContextPoset>(std::move(p)); }

inline PosetPtr fix_a() { return share(fixture_a()); }

inline std::size_t idx(const ContextPoset& p, const std::string& id) { return p.index_of(id).value(); }

/// Index of the atom of `c` equal to `p`.
inline std::size_t atom_index(const Context& c, const Projector& p) {
    for (std::size_t i = 0; i < c.atom_count(); ++i) {
        if (c.atom(i).approx_equal(p)) {
            return i;
        }
    }
    throw Error("atom not found");
}

/// Mask of `c` whose lift equals `p`.
inline Mask mask_of(const Context& c, const Projector& p) {
    for (Mask m = 0; m <= c.full_mask(); ++m) {
        if (c.lift(m).approx_equal(p)) {
            return m;
        }
    }
    throw Error("projector not in the lattice");
}

/// The least Q ∈ ℒ(V2) with P ≤ Q, found by comparing matrices over all of ℒ(V2).
inline Mask brute_force_infimum(const ContextPoset& poset, std::size_t v2, std::size_t v1, Mask p) {
    const Context& lo = poset.context(v2);
    const Projector pp = poset.context(v1).lift(p);
    std::vector<Mask> above;
    for (Mask q = 0; q <= lo.full_mask(); ++q) {
        if (pp.leq(lo.lift(q))) {
            above.push_back(q);
        }
    }
    for (Mask q : above) {
        bool least = true;
        for (Mask r : above) {
            least = least && lo.lift(q).leq(lo.lift(r));
        }
        if (least) {
            return q;
        }
    }
    throw Error("no least upper candidate");
}

inline DensityMatrix mixed(const Matrix& m) { return DensityMatrix(m); }

inline DensityMatrix pure(const Vector& v) { return DensityMatrix::pure(StateVector(v.normalized())); }

}  // namespace testing
