#include "toposval/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace toposval {

namespace {

void require_square(const Matrix& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        std::ostringstream os;
        os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
        throw Error(os.str());
    }
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": dimension mismatch (" << a << " vs " << b << ")";
        throw Error(os.str());
    }
}

// Gaps inside this band around the grouping threshold are neither clearly
// degenerate nor clearly split.
constexpr double kAmbiguityLow = 0.25;
constexpr double kAmbiguityHigh = 4.0;

}  // namespace

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(Matrix entries) : entries_(std::move(entries)) {
    require_square(entries_, "HermitianOperator");
    if (max_abs(entries_ - entries_.adjoint()) >= tol::hermitian) {
        throw Error("HermitianOperator: matrix is not Hermitian");
    }
}

Projector::Projector(Matrix entries) : entries_(std::move(entries)) {
    require_square(entries_, "Projector");
    if (max_abs(entries_ - entries_.adjoint()) >= tol::projector) {
        throw Error("Projector: matrix is not Hermitian");
    }
    if (max_abs(entries_ * entries_ - entries_) >= tol::projector) {
        throw Error("Projector: matrix is not idempotent");
    }
    const double tr = entries_.trace().real();
    const double rounded = std::round(tr);
    if (std::abs(tr - rounded) >= tol::trace_rank || rounded < 0) {
        throw Error("Projector: trace is not an integer rank");
    }
    rank_ = static_cast<std::size_t>(rounded);
}

Projector Projector::zero(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    return Projector(Matrix::Zero(n, n));
}

Projector Projector::identity(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    return Projector(Matrix::Identity(n, n));
}

bool Projector::leq(const Projector& other) const {
    require_same_dim(dim(), other.dim(), "Projector::leq");
    return max_abs(other.entries_ * entries_ - entries_) < tol::subspace;
}

bool Projector::approx_equal(const Projector& other) const {
    require_same_dim(dim(), other.dim(), "Projector::approx_equal");
    return max_abs(entries_ - other.entries_) < tol::subspace;
}

bool Projector::orthogonal_to(const Projector& other) const {
    require_same_dim(dim(), other.dim(), "Projector::orthogonal_to");
    return max_abs(entries_ * other.entries_) < tol::subspace;
}

StateVector::StateVector(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) {
        throw Error("StateVector: empty amplitude vector");
    }
    if (std::abs(amplitudes_.norm() - 1.0) >= tol::unit_norm) {
        throw Error("StateVector: amplitudes are not unit norm");
    }
}

DensityMatrix::DensityMatrix(Matrix entries)
    : entries_(std::move(entries)), support_(Projector::zero(1)) {
    require_square(entries_, "DensityMatrix");
    if (max_abs(entries_ - entries_.adjoint()) >= tol::hermitian) {
        throw Error("DensityMatrix: matrix is not Hermitian");
    }
    if (std::abs(entries_.trace().real() - 1.0) >= tol::unit_trace) {
        throw Error("DensityMatrix: trace is not one");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_);
    const auto& values = solver.eigenvalues();
    Matrix support = Matrix::Zero(entries_.rows(), entries_.cols());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values[i] < tol::psd_floor) {
            throw Error("DensityMatrix: negative eigenvalue below the PSD floor");
        }
        if (values[i] > tol::support_weight) {
            const Vector v = solver.eigenvectors().col(i);
            support += v * v.adjoint();
        }
    }
    support_ = Projector(support);
    if (max_abs(support_.matrix() * entries_ - entries_) >= tol::subspace) {
        throw Error("DensityMatrix: support projector does not fix the state");
    }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    const Vector& v = psi.amplitudes();
    return DensityMatrix(v * v.adjoint());
}

double DensityMatrix::expectation(const Projector& p) const {
    require_same_dim(dim(), p.dim(), "DensityMatrix::expectation");
    return (entries_ * p.matrix()).trace().real();
}

std::vector<EigenBlock> eig_hermitian(const HermitianOperator& h, double tol_group) {
    if (!(tol_group > 0)) {
        throw Error("eig_hermitian: grouping tolerance must be positive");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) {
        throw Error("eig_hermitian: eigensolver did not converge");
    }
    const auto& values = solver.eigenvalues();  // ascending
    const auto& vectors = solver.eigenvectors();

    std::vector<EigenBlock> blocks;
    Eigen::Index start = 0;
    const Eigen::Index n = values.size();
    for (Eigen::Index i = 1; i <= n; ++i) {
        if (i < n) {
            const double gap = values[i] - values[i - 1];
            if (gap > kAmbiguityLow * tol_group && gap < kAmbiguityHigh * tol_group) {
                std::ostringstream os;
                os << "eig_hermitian: eigenvalues " << values[i - 1] << " and " << values[i]
                   << " straddle the grouping tolerance " << tol_group;
                throw Error(os.str());
            }
            if (gap <= tol_group) {
                continue;
            }
        }
        if (values[i - 1] - values[start] > tol_group) {
            throw Error("eig_hermitian: eigenvalue cluster wider than the grouping tolerance");
        }
        Matrix proj = Matrix::Zero(h.matrix().rows(), h.matrix().cols());
        double sum = 0;
        for (Eigen::Index k = start; k < i; ++k) {
            const Vector v = vectors.col(k);
            proj += v * v.adjoint();
            sum += values[k];
        }
        blocks.push_back({sum / static_cast<double>(i - start), Projector(proj)});
        start = i;
    }
    return blocks;
}

Projector projector_from_span(const std::vector<Vector>& vectors) {
    if (vectors.empty()) {
        throw Error("projector_from_span: no vectors given");
    }
    const Eigen::Index dim = vectors.front().size();
    Matrix basis(dim, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t j = 0; j < vectors.size(); ++j) {
        if (vectors[j].size() != dim) {
            throw Error("projector_from_span: vectors have different dimensions");
        }
        if (vectors[j].norm() < tol::subspace) {
            throw Error("projector_from_span: zero vector");
        }
        basis.col(static_cast<Eigen::Index>(j)) = vectors[j].normalized();
    }
    if (basis.cols() > dim) {
        throw Error("projector_from_span: more vectors than the dimension");
    }
    const Eigen::ColPivHouseholderQR<Matrix> qr(basis);
    const Matrix r = qr.matrixR().template triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
        if (std::abs(r(j, j)) < tol::subspace) {
            throw Error("projector_from_span: vectors are linearly dependent");
        }
    }
    const Matrix q = qr.householderQ() * Matrix::Identity(dim, basis.cols());
    return Projector(q * q.adjoint());
}

bool commutes(const HermitianOperator& a, const HermitianOperator& b) {
    require_same_dim(a.dim(), b.dim(), "commutes");
    return max_abs(a.matrix() * b.matrix() - b.matrix() * a.matrix()) < tol::commute;
}

bool certain(const DensityMatrix& rho, const Projector& p) {
    require_same_dim(rho.dim(), p.dim(), "certain");
    const Matrix& s = rho.support().matrix();
    return max_abs(p.matrix() * s - s) < tol::subspace;
}

Matrix reconstruct(const std::vector<EigenBlock>& blocks) {
    if (blocks.empty()) {
        throw Error("reconstruct: no eigenblocks");
    }
    Matrix out = Matrix::Zero(blocks.front().projector.matrix().rows(),
                              blocks.front().projector.matrix().cols());
    for (const auto& b : blocks) {
        out += b.eigenvalue * b.projector.matrix();
    }
    return out;
}

}  // namespace toposval
