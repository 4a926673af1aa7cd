#pragma once

// First-order effective Hamiltonian and kick operator K(0), built three
// independent ways:
//   * closed-form polynomials in the four-step switching fractions (alpha, beta),
//   * truncated sums over Fourier harmonics of the drive,
//   * the exact one-period propagator and its principal logarithm.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "stepfloq/linalg.hpp"
#include "stepfloq/parallel.hpp"
#include "stepfloq/protocol.hpp"

namespace stepfloq {

enum class ModelMode { PaperPolynomial, HarmonicSum, ExactOracle };

/// Whether the j = 0 drive average V^(0) is part of H_eff. `Paper` keeps the
/// first-order formula as published (no average); `Corrected` adds it.
enum class Averaging { Paper, Corrected };

inline std::string to_string(ModelMode m) {
    switch (m) {
        case ModelMode::PaperPolynomial: return "paper-polynomial";
        case ModelMode::HarmonicSum: return "harmonic-sum";
        case ModelMode::ExactOracle: return "exact-oracle";
    }
    return "unknown";
}

inline std::string to_string(Averaging a) { return a == Averaging::Paper ? "paper" : "corrected"; }

template <typename Real>
struct EffectiveModel {
    HermitianOperator<Real> h_eff;
    HermitianOperator<Real> kick_zero;  // zero for the exact oracle, which has no separate kick
    ModelMode mode;
    Averaging averaging;
    Real omega;
};

struct HarmonicTruncation {
    std::size_t j_max = 2000;
    double tail_bound = 0.0;  // estimate of the dropped tail, same units as the sum
};

template <typename Real>
struct HarmonicSum {
    ComplexMatrix<Real> value;
    HarmonicTruncation truncation;
};

inline constexpr std::size_t default_j_max_h = 2000;
inline constexpr std::size_t default_j_max_k = 10000;

/// Coefficients of [V_r, V_s] (s > r) in the first-order term.
template <typename Real>
struct CommutatorWeights {
    Real p12, p13, p14, p23, p24, p34;

    std::array<Real, 6> as_array() const { return {p12, p13, p14, p23, p24, p34}; }
};

/// Coefficients of V_r in K(0).
template <typename Real>
struct KickWeights {
    Real q1, q2, q3, q4;

    std::array<Real, 4> as_array() const { return {q1, q2, q3, q4}; }
};

/// (r, s) index pairs matching CommutatorWeights::as_array().
inline constexpr std::array<std::array<int, 2>, 6> commutator_pairs = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

template <typename Real>
CommutatorWeights<Real> p_polynomials(Real a, Real b) {
    detail::require_unit(a, "alpha");
    detail::require_unit(b, "beta");
    return {a * (1 - a),
            a * b * (a - b),
            a * (1 - b) * (a - b - 1),
            b * (1 - a) * (a - b + 1),
            (a - 1) * (b - 1) * (a - b),
            b * (1 - b)};
}

/// Partial derivatives of p_polynomials with respect to alpha and beta.
template <typename Real>
std::array<CommutatorWeights<Real>, 2> p_polynomial_gradients(Real a, Real b) {
    detail::require_unit(a, "alpha");
    detail::require_unit(b, "beta");
    const CommutatorWeights<Real> da{
        1 - 2 * a,
        2 * a * b - b * b,
        (1 - b) * (2 * a - b - 1),
        -b * (a - b + 1) + b * (1 - a),
        (b - 1) * (2 * a - b - 1),
        Real(0)};
    const CommutatorWeights<Real> db{
        Real(0),
        a * a - 2 * a * b,
        -a * (a - b - 1) - a * (1 - b),
        (1 - a) * (a - 2 * b + 1),
        (a - 1) * (a - 2 * b + 1),
        1 - 2 * b};
    return {da, db};
}

template <typename Real>
KickWeights<Real> q_polynomials(Real a, Real b) {
    detail::require_unit(a, "alpha");
    detail::require_unit(b, "beta");
    return {a * (2 - a), (a - 1) * (a - 1), -b * b, b * b - 1};
}

namespace detail {

template <typename Real>
void require_omega(Real omega) {
    if (!(omega > Real(0)) || !std::isfinite(omega)) throw std::invalid_argument("omega must be positive");
}

/// Recovers (alpha, beta) from a protocol built by four_step_protocol.
template <typename Real>
std::array<Real, 2> four_step_parameters(const StepProtocol<Real>& p) {
    const auto& f = p.fractions();
    if (p.steps() != 4 || std::abs(f[2] - Real(0.5)) > Real(1e-14))
        throw std::invalid_argument("expected a four-step protocol with its midpoint switch at T/2");
    const Real a = std::clamp(Real(2) * f[1], Real(0), Real(1));
    const Real b = std::clamp(Real(2) * f[3] - Real(1), Real(0), Real(1));
    return {a, b};
}

}  // namespace detail

/// (i pi / 8 omega) sum_{s>r} P_rs [V_r, V_s].
template <typename Real>
ComplexMatrix<Real> first_order_polynomial_term(const StepProtocol<Real>& p, Real omega) {
    detail::require_omega(omega);
    const auto [a, b] = detail::four_step_parameters(p);
    const auto weights = p_polynomials(a, b).as_array();
    ComplexMatrix<Real> sum = ComplexMatrix<Real>::Zero(p.dim(), p.dim());
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const auto [r, s] = commutator_pairs[k];
        sum += weights[k] * commutator(p.potential(r), p.potential(s));
    }
    const std::complex<Real> prefactor(Real(0), std::numbers::pi_v<Real> / (Real(8) * omega));
    return prefactor * sum;
}

/// -(pi / 4 omega) sum_r Q_r V_r.
template <typename Real>
HermitianOperator<Real> kick_polynomial(const StepProtocol<Real>& p, Real omega) {
    detail::require_omega(omega);
    const auto [a, b] = detail::four_step_parameters(p);
    const auto weights = q_polynomials(a, b).as_array();
    ComplexMatrix<Real> sum = ComplexMatrix<Real>::Zero(p.dim(), p.dim());
    for (std::size_t r = 0; r < 4; ++r) sum += weights[r] * p.potential(r).matrix();
    return HermitianOperator<Real>::hermitian_part(-(std::numbers::pi_v<Real> / (Real(4) * omega)) * sum);
}

template <typename Real>
EffectiveModel<Real> h_eff_paper(const HermitianOperator<Real>& h0, const StepProtocol<Real>& p, Real omega,
                                 Averaging averaging = Averaging::Paper) {
    if (h0.dim() != p.dim()) throw DimensionMismatch("h_eff_paper: H0 and potentials differ in dimension");
    ComplexMatrix<Real> h = h0.matrix() + first_order_polynomial_term(p, omega);
    if (averaging == Averaging::Corrected) h += fourier_component(p, 0);
    return {HermitianOperator<Real>::hermitian_part(h), kick_polynomial(p, omega), ModelMode::PaperPolynomial,
            averaging, omega};
}

namespace detail {

/// Sums term(j) for j = 1..j_max with pairwise reduction and estimates the
/// tail assuming ||term(j)|| ~ C / j^decay.
template <typename Real, typename Term>
HarmonicSum<Real> harmonic_series(std::size_t j_max, int decay, unsigned threads, Term term) {
    if (j_max < 1) throw std::invalid_argument("harmonic sum needs j_max >= 1");
    std::vector<ComplexMatrix<Real>> terms(j_max);
    parallel_for(j_max, threads, [&](std::size_t i) { terms[i] = term(static_cast<long>(i + 1)); });

    Real c = 0;
    const std::size_t window = std::min<std::size_t>(16, j_max);
    for (std::size_t i = j_max - window; i < j_max; ++i)
        c = std::max(c, terms[i].norm() * std::pow(Real(i + 1), Real(decay)));
    const Real jm = Real(j_max);
    const Real tail = decay > 1 ? c / (Real(decay - 1) * std::pow(jm, Real(decay - 1))) : c;

    return {pairwise_sum(std::move(terms)), HarmonicTruncation{j_max, static_cast<double>(tail)}};
}

}  // namespace detail

/// H_1 / omega = (1/omega) sum_{j=1}^{j_max} (1/j) [V^(j), V^(-j)].
template <typename Real>
HarmonicSum<Real> h_first_order_harmonic(const StepProtocol<Real>& p, Real omega,
                                         std::size_t j_max = default_j_max_h, unsigned threads = 1) {
    detail::require_omega(omega);
    return detail::harmonic_series<Real>(j_max, 3, threads, [&](long j) {
        const ComplexMatrix<Real> vj = fourier_component(p, j);
        const ComplexMatrix<Real> vmj = vj.adjoint();
        return ComplexMatrix<Real>((vj * vmj - vmj * vj) / (Real(j) * omega));
    });
}

/// K(0) = (1 / i omega) sum_{j=1}^{j_max} (1/j) (V^(j) - V^(-j)).
template <typename Real>
HarmonicSum<Real> kick_harmonic(const StepProtocol<Real>& p, Real omega, std::size_t j_max = default_j_max_k,
                                unsigned threads = 1) {
    detail::require_omega(omega);
    const std::complex<Real> inv_i_omega(Real(0), Real(-1) / omega);
    return detail::harmonic_series<Real>(j_max, 2, threads, [&](long j) {
        const ComplexMatrix<Real> vj = fourier_component(p, j);
        return ComplexMatrix<Real>(inv_i_omega * (vj - vj.adjoint()) / Real(j));
    });
}

template <typename Real>
EffectiveModel<Real> h_eff_harmonic(const HermitianOperator<Real>& h0, const StepProtocol<Real>& p, Real omega,
                                    Averaging averaging = Averaging::Paper, std::size_t j_max_h = default_j_max_h,
                                    std::size_t j_max_k = default_j_max_k, unsigned threads = 1) {
    if (h0.dim() != p.dim()) throw DimensionMismatch("h_eff_harmonic: H0 and potentials differ in dimension");
    ComplexMatrix<Real> h = h0.matrix() + h_first_order_harmonic(p, omega, j_max_h, threads).value;
    if (averaging == Averaging::Corrected) h += fourier_component(p, 0);
    return {HermitianOperator<Real>::hermitian_part(h),
            HermitianOperator<Real>::hermitian_part(kick_harmonic(p, omega, j_max_k, threads).value),
            ModelMode::HarmonicSum, averaging, omega};
}

/// One-period propagator U(T) = prod_{r=N..1} exp(-i (H0 + V_r) w_r T).
template <typename Real>
UnitaryOperator<Real> one_period_propagator(const HermitianOperator<Real>& h0, const StepProtocol<Real>& p,
                                            Real omega) {
    detail::require_omega(omega);
    if (h0.dim() != p.dim()) throw DimensionMismatch("one_period_propagator: dimension mismatch");
    const Real period = Real(2) * std::numbers::pi_v<Real> / omega;
    auto u = UnitaryOperator<Real>::identity(p.dim());
    for (std::size_t r = 0; r < p.steps(); ++r) {
        if (p.width(r) == Real(0)) continue;
        u = evolve(h0 + p.potential(r), p.width(r) * period) * u;
    }
    return u;
}

/// Stroboscopic Floquet Hamiltonian H_F = (i/T) log U(T) on the principal
/// branch. Same spectrum as the true H_eff; the matrices differ by the kick
/// similarity exp(+-i K(0)).
template <typename Real>
EffectiveModel<Real> exact_floquet(const HermitianOperator<Real>& h0, const StepProtocol<Real>& p, Real omega) {
    const Real period = Real(2) * std::numbers::pi_v<Real> / omega;
    auto hf = principal_log(one_period_propagator(h0, p, omega), period);
    return {std::move(hf), HermitianOperator<Real>::zero(p.dim()), ModelMode::ExactOracle, Averaging::Corrected,
            omega};
}

template <typename Real>
struct ModelComparison {
    Real spectral_distance;  // max |sorted eigenvalue difference|
    Real matrix_distance;    // Frobenius distance, after kick conjugation when `conjugated`
    bool conjugated;
};

/// Compares two models of the same drive.
///
/// When exactly one side is the exact oracle, its H_F is first mapped to the
/// H_eff frame with the other model's kick: exp(iK) H_F exp(-iK).
template <typename Real>
ModelComparison<Real> compare_models(const EffectiveModel<Real>& a, const EffectiveModel<Real>& b) {
    if (a.h_eff.dim() != b.h_eff.dim()) throw DimensionMismatch("compare_models: dimension mismatch");
    if (std::abs(a.omega - b.omega) > Real(1e-12) * std::max(Real(1), std::abs(a.omega)))
        throw std::invalid_argument("compare_models: models use different omega");

    const auto ea = hermitian_eigensystem(a.h_eff).values;
    const auto eb = hermitian_eigensystem(b.h_eff).values;
    const Real spectral = (ea - eb).cwiseAbs().maxCoeff();

    const bool a_oracle = a.mode == ModelMode::ExactOracle;
    const bool b_oracle = b.mode == ModelMode::ExactOracle;
    if (a_oracle == b_oracle) return {spectral, (a.h_eff.matrix() - b.h_eff.matrix()).norm(), false};

    const auto& oracle = a_oracle ? a : b;
    const auto& model = a_oracle ? b : a;
    const ComplexMatrix<Real> rot = evolve(model.kick_zero, Real(-1)).matrix();  // exp(+i K)
    const ComplexMatrix<Real> mapped = rot * oracle.h_eff.matrix() * rot.adjoint();
    return {spectral, (mapped - model.h_eff.matrix()).norm(), true};
}

}  // namespace stepfloq
