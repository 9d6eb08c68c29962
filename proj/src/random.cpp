#include "toposval/random.hpp"

#include <algorithm>
#include <numeric>

namespace toposval {

namespace {

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Vector gaussian_vector(std::size_t dim, Rng& rng) {
    std::normal_distribution<double> normal;
    Vector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = Complex(normal(rng), normal(rng));
    }
    return v;
}

// Random set partition of {0..n-1} into `blocks` nonempty blocks, as a block index per element.
std::vector<std::size_t> random_partition(std::size_t n, std::size_t blocks, Rng& rng) {
    std::vector<std::size_t> label(n);
    std::iota(label.begin(), label.end(), 0);
    std::shuffle(label.begin(), label.end(), rng);
    for (auto& l : label) {
        if (l >= blocks) {
            l = uniform_index(rng, 0, blocks - 1);
        }
    }
    return label;
}

Context context_from_partition(const Matrix& basis, const std::vector<std::size_t>& label,
                               std::size_t blocks, std::string id) {
    const auto n = basis.rows();
    std::vector<Matrix> atoms(blocks, Matrix::Zero(n, n));
    for (std::size_t i = 0; i < label.size(); ++i) {
        const Vector v = basis.col(static_cast<Eigen::Index>(i));
        atoms[label[i]] += v * v.adjoint();
    }
    std::vector<Projector> projectors;
    projectors.reserve(blocks);
    for (auto& m : atoms) {
        projectors.emplace_back(0.5 * (m + m.adjoint()));
    }
    return Context(std::move(id), std::move(projectors));
}

}  // namespace

Matrix random_unitary(std::size_t dim, Rng& rng) {
    const auto n = static_cast<Eigen::Index>(dim);
    Matrix g(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        g.col(c) = gaussian_vector(dim, rng);
    }
    const Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < n; ++c) {
        const Complex d = r(c, c);
        if (std::abs(d) > 0) {
            q.col(c) *= d / std::abs(d);
        }
    }
    return q;
}

StateVector random_state(std::size_t dim, Rng& rng) {
    return StateVector(gaussian_vector(dim, rng).normalized());
}

DensityMatrix random_density(std::size_t dim, Rng& rng, std::size_t rank) {
    if (rank == 0) {
        rank = uniform_index(rng, 1, dim);
    }
    const auto n = static_cast<Eigen::Index>(dim);
    Matrix rho = Matrix::Zero(n, n);
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    const Matrix u = random_unitary(dim, rng);
    double total = 0;
    for (std::size_t k = 0; k < rank; ++k) {
        const double w = weight(rng);
        const Vector v = u.col(static_cast<Eigen::Index>(k));
        rho += w * (v * v.adjoint());
        total += w;
    }
    rho /= total;
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

DensityMatrix random_density_for(const ContextPoset& poset, Rng& rng) {
    if (uniform_index(rng, 0, 2) == 0) {
        return random_density(poset.dim(), rng);
    }
    const Context& c = poset.context(uniform_index(rng, 0, poset.size() - 1));
    const auto n = static_cast<Eigen::Index>(poset.dim());
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    Matrix rho = Matrix::Zero(n, n);
    double total = 0;
    for (const auto& atom : c.atoms()) {
        if (uniform_index(rng, 0, 1) == 0 && total > 0) {
            continue;
        }
        const double w = weight(rng);
        rho += (w / static_cast<double>(atom.rank())) * atom.matrix();
        total += w;
    }
    rho /= total;
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

HermitianOperator random_operator_with_spectrum(const std::vector<double>& values, Rng& rng) {
    const Matrix u = random_unitary(values.size(), rng);
    Eigen::VectorXd d(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        d[static_cast<Eigen::Index>(i)] = values[i];
    }
    Matrix h = u * d.cast<Complex>().asDiagonal() * u.adjoint();
    return HermitianOperator(0.5 * (h + h.adjoint()));
}

ContextPoset random_poset(Rng& rng, const RandomPosetOptions& options) {
    const std::size_t dim = uniform_index(rng, options.min_dim, options.max_dim);
    const std::size_t max_atoms = std::min(dim, options.max_atoms);
    const std::size_t budget = options.max_contexts - 1;  // trivial context is added last
    const std::size_t bases = uniform_index(rng, 1, 3);

    std::vector<Context> contexts;
    std::size_t counter = 0;
    for (std::size_t b = 0; b < bases && contexts.size() < budget; ++b) {
        const auto n = static_cast<Eigen::Index>(dim);
        const Matrix basis = (b == 0 && uniform_index(rng, 0, 1) == 0) ? Matrix(Matrix::Identity(n, n))
                                                                        : random_unitary(dim, rng);
        const std::size_t refinements = uniform_index(rng, 1, 2);
        for (std::size_t m = 0; m < refinements && contexts.size() < budget; ++m) {
            std::size_t blocks = uniform_index(rng, std::min<std::size_t>(2, max_atoms), max_atoms);
            auto label = random_partition(dim, blocks, rng);
            contexts.push_back(context_from_partition(basis, label, blocks, "c" + std::to_string(counter++)));
            // A chain of coarsenings obtained by merging two blocks at a time.
            const std::size_t merges = uniform_index(rng, 0, 2);
            for (std::size_t k = 0; k < merges && blocks > 2 && contexts.size() < budget; ++k) {
                const std::size_t from = uniform_index(rng, 0, blocks - 1);
                std::size_t into = uniform_index(rng, 0, blocks - 2);
                if (into >= from) {
                    ++into;
                }
                for (auto& l : label) {
                    if (l == from) {
                        l = into;
                    }
                    if (l == blocks - 1) {
                        l = from == blocks - 1 ? into : from;
                    }
                }
                --blocks;
                contexts.push_back(context_from_partition(basis, label, blocks, "c" + std::to_string(counter++)));
            }
        }
    }
    if (uniform_index(rng, 0, 1) == 0) {
        ContextPoset closed = ContextPoset::build(contexts, true, true);
        if (closed.size() <= options.max_contexts) {
            return closed;
        }
    }
    return ContextPoset::build(std::move(contexts), true, false);
}

}  // namespace toposval
