#pragma once

// Piecewise-constant periodic driving protocols over one normalized period
// x = t/T in [0, 1).

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "stepfloq/linalg.hpp"

namespace stepfloq {

/// Ordered potentials V_1..V_N, step r occupying [f_{r-1}, f_r) of the period.
///
/// Fractions run from f_0 = 0 to f_N = 1 and never decrease. Zero-width steps
/// are legal and contribute nothing.
template <typename Real>
class StepProtocol {
public:
    using Operator = HermitianOperator<Real>;

    StepProtocol(std::vector<Operator> potentials, std::vector<Real> fractions)
        : potentials_(std::move(potentials)), fractions_(std::move(fractions)) {
        if (potentials_.empty()) throw std::invalid_argument("StepProtocol: no potentials");
        if (fractions_.size() != potentials_.size() + 1)
            throw std::invalid_argument("StepProtocol: need one more fraction than potentials");
        if (fractions_.front() != Real(0) || fractions_.back() != Real(1))
            throw std::invalid_argument("StepProtocol: fractions must start at 0 and end at 1");
        for (std::size_t r = 1; r < fractions_.size(); ++r)
            if (!(fractions_[r] >= fractions_[r - 1]))
                throw std::invalid_argument("StepProtocol: fractions must be non-decreasing");
        for (const auto& v : potentials_)
            if (v.dim() != potentials_.front().dim())
                throw DimensionMismatch("StepProtocol: potentials differ in dimension");
    }

    std::size_t steps() const noexcept { return potentials_.size(); }
    Eigen::Index dim() const noexcept { return potentials_.front().dim(); }
    const std::vector<Operator>& potentials() const noexcept { return potentials_; }
    const std::vector<Real>& fractions() const noexcept { return fractions_; }
    const Operator& potential(std::size_t r) const { return potentials_.at(r); }
    Real width(std::size_t r) const { return fractions_.at(r + 1) - fractions_.at(r); }

private:
    std::vector<Operator> potentials_;
    std::vector<Real> fractions_;
};

using StepProtocold = StepProtocol<double>;

template <typename Real>
struct PartitionParams {
    std::vector<Real> alphas;

    explicit PartitionParams(std::vector<Real> a) : alphas(std::move(a)) {
        for (Real x : alphas)
            if (!(x >= Real(0) && x <= Real(1)))
                throw std::invalid_argument("PartitionParams: every alpha must lie in [0, 1]");
    }
};

namespace detail {

template <typename Real>
void require_unit(Real x, const char* name) {
    if (!(x >= Real(0) && x <= Real(1)))
        throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
}

}  // namespace detail

/// The four-step protocol: V1 on [0, a/2), V2 on [a/2, 1/2), V3 on
/// [1/2, (1+b)/2), V4 on [(1+b)/2, 1).
template <typename Real>
StepProtocol<Real> four_step_protocol(Real alpha, Real beta, const HermitianOperator<Real>& v1,
                                      const HermitianOperator<Real>& v2, const HermitianOperator<Real>& v3,
                                      const HermitianOperator<Real>& v4) {
    detail::require_unit(alpha, "alpha");
    detail::require_unit(beta, "beta");
    const Real half = Real(1) / Real(2);
    return StepProtocol<Real>({v1, v2, v3, v4}, {Real(0), alpha * half, half, (Real(1) + beta) * half, Real(1)});
}

/// f_n = 1 - prod_{i<=n} (1 - alpha_i), the closed form of the
/// inclusion-exclusion sum. The product is accumulated left to right.
template <typename Real>
std::vector<Real> partition_fractions(const PartitionParams<Real>& params) {
    std::vector<Real> f;
    f.reserve(params.alphas.size() + 2);
    f.push_back(Real(0));
    Real remaining = Real(1);
    for (Real a : params.alphas) {
        remaining *= (Real(1) - a);
        f.push_back(Real(1) - remaining);
    }
    f.push_back(Real(1));
    return f;
}

template <typename Real>
StepProtocol<Real> generalized_protocol(const PartitionParams<Real>& params,
                                        std::vector<HermitianOperator<Real>> potentials) {
    if (potentials.size() != params.alphas.size() + 1)
        throw std::invalid_argument("generalized_protocol: need exactly one more potential than parameters");
    return StepProtocol<Real>(std::move(potentials), partition_fractions(params));
}

/// Potential of the step whose half-open interval contains x.
template <typename Real>
const HermitianOperator<Real>& potential_at(const StepProtocol<Real>& p, Real x) {
    if (!(x >= Real(0) && x < Real(1))) throw std::invalid_argument("potential_at: x must lie in [0, 1)");
    const auto& f = p.fractions();
    for (std::size_t r = 0; r < p.steps(); ++r)
        if (x >= f[r] && x < f[r + 1]) return p.potential(r);
    throw Error("potential_at: no step contains x");  // unreachable for a valid protocol
}

/// Weight of step r in the j-th Fourier component:
/// int_{f_{r-1}}^{f_r} exp(-i 2 pi j x) dx.
template <typename Real>
std::complex<Real> fourier_step_weight(Real f_lo, Real f_hi, long j) {
    if (j == 0) return {f_hi - f_lo, Real(0)};
    const Real k = Real(2) * std::numbers::pi_v<Real> * Real(j);
    const std::complex<Real> hi = std::polar(Real(1), -k * f_hi);
    const std::complex<Real> lo = std::polar(Real(1), -k * f_lo);
    return (hi - lo) / std::complex<Real>(Real(0), -k);
}

/// V^(j) = int_0^1 V(x) exp(-i 2 pi j x) dx, exactly, one antiderivative per step.
template <typename Real>
ComplexMatrix<Real> fourier_component(const StepProtocol<Real>& p, long j) {
    ComplexMatrix<Real> out = ComplexMatrix<Real>::Zero(p.dim(), p.dim());
    const auto& f = p.fractions();
    for (std::size_t r = 0; r < p.steps(); ++r) {
        if (f[r + 1] == f[r]) continue;
        out += fourier_step_weight(f[r], f[r + 1], j) * p.potential(r).matrix();
    }
    return out;
}

/// Duration-weighted average V^(0), as a Hermitian operator.
template <typename Real>
HermitianOperator<Real> average_potential(const StepProtocol<Real>& p) {
    return HermitianOperator<Real>::hermitian_part(fourier_component(p, 0));
}

template <typename Real>
bool zero_sum_check(std::span<const HermitianOperator<Real>> potentials) {
    if (potentials.empty()) return true;
    ComplexMatrix<Real> sum = ComplexMatrix<Real>::Zero(potentials.front().dim(), potentials.front().dim());
    for (const auto& v : potentials) {
        if (v.dim() != sum.rows()) throw DimensionMismatch("zero_sum_check: potentials differ in dimension");
        sum += v.matrix();
    }
    return max_entry_norm(sum) <= Real(1e-12);
}

template <typename Real>
bool zero_sum_check(const std::vector<HermitianOperator<Real>>& potentials) {
    return zero_sum_check(std::span<const HermitianOperator<Real>>(potentials));
}

}  // namespace stepfloq
