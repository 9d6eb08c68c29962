#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace toposval {

/// Raised for precondition violations and malformed inputs across the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Fixed absolute tolerances. Numerics only touch the boundary (matrix
/// comparisons); everything downstream works on exact masks.
namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double projector = 1e-9;
inline constexpr double trace_rank = 1e-8;
inline constexpr double unit_trace = 1e-10;
inline constexpr double psd_floor = -1e-10;
inline constexpr double unit_norm = 1e-10;
inline constexpr double group = 1e-8;
inline constexpr double commute = 1e-9;
inline constexpr double subspace = 1e-8;
inline constexpr double reconstruct = 1e-7;
inline constexpr double support_weight = 1e-10;
inline constexpr double vector_weight = 1e-9;
inline constexpr double r_slack = 1e-10;
}  // namespace tol

/// Largest absolute entry; the norm used for every tolerance comparison.
double max_abs(const Matrix& m);

class HermitianOperator {
public:
    explicit HermitianOperator(Matrix entries);

    std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
    const Matrix& matrix() const { return entries_; }

private:
    Matrix entries_;
};

class Projector {
public:
    explicit Projector(Matrix entries);

    static Projector zero(std::size_t dim);
    static Projector identity(std::size_t dim);

    std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
    std::size_t rank() const { return rank_; }
    const Matrix& matrix() const { return entries_; }

    /// this ≤ other in the projector order (range inclusion).
    bool leq(const Projector& other) const;
    bool approx_equal(const Projector& other) const;
    bool orthogonal_to(const Projector& other) const;

private:
    Matrix entries_;
    std::size_t rank_ = 0;
};

class StateVector {
public:
    explicit StateVector(Vector amplitudes);

    std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
    const Vector& amplitudes() const { return amplitudes_; }

private:
    Vector amplitudes_;
};

class DensityMatrix {
public:
    explicit DensityMatrix(Matrix entries);
    static DensityMatrix pure(const StateVector& psi);

    std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
    const Matrix& matrix() const { return entries_; }
    const Projector& support() const { return support_; }

    /// Born-rule weight tr(ρP), real part.
    double expectation(const Projector& p) const;

private:
    Matrix entries_;
    Projector support_;
};

struct EigenBlock {
    double eigenvalue;
    Projector projector;
};

/// Eigenvalues grouped at `tol_group`, strictly increasing, with eigenprojectors
/// summing to the identity. Throws when raw eigenvalues cluster ambiguously
/// around the grouping threshold.
std::vector<EigenBlock> eig_hermitian(const HermitianOperator& h, double tol_group = tol::group);

/// Orthogonal projector onto span(vectors). Vectors must be linearly independent.
Projector projector_from_span(const std::vector<Vector>& vectors);

bool commutes(const HermitianOperator& a, const HermitianOperator& b);

/// True iff ρ assigns probability one to P, decided as supp(ρ) ≤ P.
bool certain(const DensityMatrix& rho, const Projector& p);

/// Σ λ·E_λ.
Matrix reconstruct(const std::vector<EigenBlock>& blocks);

}  // namespace toposval
