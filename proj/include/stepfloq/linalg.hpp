#pragma once

// Small dense complex linear algebra: Hermitian and unitary operators,
// commutators, exact exponentials and logarithms via eigendecomposition.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "stepfloq/errors.hpp"

namespace stepfloq {

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using ComplexMatrixd = ComplexMatrix<double>;
using ComplexVectord = ComplexVector<double>;

template <typename Derived>
auto max_entry_norm(const Eigen::MatrixBase<Derived>& m) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    if (m.size() == 0) return Real(0);
    return m.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const auto z = m(i, j);
            if (!std::isfinite(std::real(z)) || !std::isfinite(std::imag(z))) return false;
        }
    return true;
}

namespace detail {

template <typename Real>
void require_square_finite(const ComplexMatrix<Real>& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols())
        throw DimensionMismatch(std::string(what) + ": matrix must be square and non-empty");
    if (!all_finite(m)) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

}  // namespace detail

/// Square complex matrix that equals its conjugate transpose.
///
/// The check is on the max-entry norm with tolerance 1e-12, scaled by the
/// largest entry when that exceeds one.
template <typename Real>
class HermitianOperator {
public:
    using Matrix = ComplexMatrix<Real>;

    static constexpr Real tolerance = Real(1e-12);

    HermitianOperator() : matrix_(Matrix::Zero(1, 1)) {}

    explicit HermitianOperator(Matrix m) : matrix_(std::move(m)) {
        detail::require_square_finite<Real>(matrix_, "HermitianOperator");
        const Real scale = std::max(Real(1), max_entry_norm(matrix_));
        if (max_entry_norm(Matrix(matrix_ - matrix_.adjoint())) > tolerance * scale)
            throw std::invalid_argument("HermitianOperator: matrix is not Hermitian");
    }

    /// Hermitian part (m + m^dagger)/2, for results of floating-point
    /// computations that are Hermitian only up to rounding.
    static HermitianOperator hermitian_part(const Matrix& m) {
        return HermitianOperator(Matrix((m + m.adjoint()) / Real(2)));
    }

    static HermitianOperator zero(Eigen::Index dim) { return HermitianOperator(Matrix::Zero(dim, dim)); }
    static HermitianOperator identity(Eigen::Index dim) {
        return HermitianOperator(Matrix::Identity(dim, dim));
    }

    const Matrix& matrix() const noexcept { return matrix_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }

    friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
        check_dims(a, b);
        return HermitianOperator(Matrix(a.matrix_ + b.matrix_));
    }
    friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
        check_dims(a, b);
        return HermitianOperator(Matrix(a.matrix_ - b.matrix_));
    }
    friend HermitianOperator operator-(const HermitianOperator& a) { return HermitianOperator(Matrix(-a.matrix_)); }
    friend HermitianOperator operator*(Real s, const HermitianOperator& a) {
        return HermitianOperator(Matrix(s * a.matrix_));
    }
    friend HermitianOperator operator*(const HermitianOperator& a, Real s) { return s * a; }

private:
    static void check_dims(const HermitianOperator& a, const HermitianOperator& b) {
        if (a.dim() != b.dim()) throw DimensionMismatch("operator dimensions differ");
    }

    Matrix matrix_;
};

/// Square complex matrix with U^dagger U = 1 (Frobenius tolerance 1e-10).
template <typename Real>
class UnitaryOperator {
public:
    using Matrix = ComplexMatrix<Real>;

    static constexpr Real tolerance = Real(1e-10);

    explicit UnitaryOperator(Matrix m) : matrix_(std::move(m)) {
        detail::require_square_finite<Real>(matrix_, "UnitaryOperator");
        const Matrix defect = matrix_.adjoint() * matrix_ - Matrix::Identity(dim(), dim());
        if (defect.norm() > tolerance) throw std::invalid_argument("UnitaryOperator: matrix is not unitary");
    }

    static UnitaryOperator identity(Eigen::Index dim) { return UnitaryOperator(Matrix::Identity(dim, dim)); }

    const Matrix& matrix() const noexcept { return matrix_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }

    /// Left-multiplication composes propagators: (b * a) applies a first.
    friend UnitaryOperator operator*(const UnitaryOperator& b, const UnitaryOperator& a) {
        if (a.dim() != b.dim()) throw DimensionMismatch("operator dimensions differ");
        return UnitaryOperator(Matrix(b.matrix_ * a.matrix_));
    }

private:
    Matrix matrix_;
};

using HermitianOperatord = HermitianOperator<double>;
using UnitaryOperatord = UnitaryOperator<double>;

template <typename Real>
struct SpinOperators {
    HermitianOperator<Real> x, y, z;
};

/// Spin-1/2 operators S = sigma/2 (eigenvalues +-1/2, S^2 = 3/4).
template <typename Real = double>
SpinOperators<Real> spin_half_operators() {
    using C = std::complex<Real>;
    using M = ComplexMatrix<Real>;
    const Real h = Real(1) / Real(2);
    M sx(2, 2), sy(2, 2), sz(2, 2);
    sx << C(0), C(h), C(h), C(0);
    sy << C(0), C(0, -h), C(0, h), C(0);
    sz << C(h), C(0), C(0), C(-h);
    return {HermitianOperator<Real>(sx), HermitianOperator<Real>(sy), HermitianOperator<Real>(sz)};
}

/// ab - ba. Anti-Hermitian for Hermitian inputs.
template <typename Real>
ComplexMatrix<Real> commutator(const HermitianOperator<Real>& a, const HermitianOperator<Real>& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("commutator: operator dimensions differ");
    return a.matrix() * b.matrix() - b.matrix() * a.matrix();
}

template <typename Real>
struct Eigensystem {
    RealVector<Real> values;       // ascending
    ComplexMatrix<Real> vectors;   // orthonormal columns
};

template <typename Real>
Eigensystem<Real> hermitian_eigensystem(const HermitianOperator<Real>& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(h.matrix());
    if (solver.info() != Eigen::Success) throw Error("hermitian_eigensystem: solver failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// exp(-i h dt).
template <typename Real>
UnitaryOperator<Real> evolve(const HermitianOperator<Real>& h, Real dt) {
    if (!std::isfinite(dt)) throw std::invalid_argument("evolve: non-finite time step");
    if (dt == Real(0)) return UnitaryOperator<Real>::identity(h.dim());
    const auto es = hermitian_eigensystem(h);
    ComplexVector<Real> phases(es.values.size());
    for (Eigen::Index k = 0; k < es.values.size(); ++k)
        phases(k) = std::polar(Real(1), -es.values(k) * dt);
    return UnitaryOperator<Real>(es.vectors * phases.asDiagonal() * es.vectors.adjoint());
}

/// Hermitian H with exp(-i H dt) = u, eigenphases taken in (-pi, pi].
///
/// u is normal, so its complex Schur form is diagonal up to rounding and the
/// Schur vectors give an orthonormal eigenbasis even for repeated phases.
/// Throws BranchCut when an eigenphase lies within 1e-9 of the cut.
template <typename Real>
HermitianOperator<Real> principal_log(const UnitaryOperator<Real>& u, Real dt) {
    if (!(dt > Real(0)) || !std::isfinite(dt)) throw std::invalid_argument("principal_log: dt must be positive");
    Eigen::ComplexSchur<ComplexMatrix<Real>> schur(u.matrix());
    if (schur.info() != Eigen::Success) throw Error("principal_log: Schur decomposition failed");
    const auto& t = schur.matrixT();
    const auto& z = schur.matrixU();
    const Real pi = std::numbers::pi_v<Real>;
    ComplexVector<Real> energies(t.rows());
    for (Eigen::Index k = 0; k < t.rows(); ++k) {
        const Real theta = std::arg(t(k, k));
        if (pi - std::abs(theta) < Real(1e-9))
            throw BranchCut("principal_log: eigenphase on the branch cut (|theta| ~ pi)");
        energies(k) = -theta / dt;
    }
    return HermitianOperator<Real>::hermitian_part(z * energies.asDiagonal() * z.adjoint());
}

/// Spectral norm of a Hermitian operator.
template <typename Real>
Real spectral_norm(const HermitianOperator<Real>& h) {
    return hermitian_eigensystem(h).values.cwiseAbs().maxCoeff();
}

}  // namespace stepfloq
