#include "stepfloq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "stepfloq/errors.hpp"

namespace stepfloq {

namespace {

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

HermitianOperatord random_hermitian(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    ComplexMatrixd m(2, 2);
    m(0, 0) = u(rng);
    m(1, 1) = u(rng);
    m(0, 1) = {u(rng), u(rng)};
    m(1, 0) = std::conj(m(0, 1));
    return HermitianOperatord(m);
}

}  // namespace

bool VerifyReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

StepProtocold random_zero_sum_protocol(std::uint64_t seed, std::size_t index) {
    auto rng = make_rng(seed, 0x1000 + index);
    std::uniform_real_distribution<double> unit(0, 1);
    const double a = unit(rng);
    const double b = unit(rng);
    const auto v1 = random_hermitian(rng);
    const auto v2 = random_hermitian(rng);
    const auto v3 = random_hermitian(rng);
    const HermitianOperatord v4 = -(v1 + v2 + v3);
    return four_step_protocol(a, b, v1, v2, v3, v4);
}

CheckResult check_polynomial_identity(const VerifySettings& s, std::uint64_t seed, unsigned threads) {
    CheckResult r{"A1", "polynomial identity", false, 0, polynomial_identity_tol, ""};
    const double w = s.omega;
    for (int k = 0; k < s.samples; ++k) {
        const auto p = random_zero_sum_protocol(seed, static_cast<std::size_t>(k));
        const ComplexMatrixd poly = first_order_polynomial_term(p, w);
        const auto harm = h_first_order_harmonic(p, w, s.j_max_h, threads);
        const double scale = std::max(1.0, harm.value.norm() * w);
        r.residual = std::max(r.residual, (poly - harm.value).norm() / scale);
    }
    r.pass = r.residual <= r.threshold;
    r.detail = "max scaled Frobenius residual over " + std::to_string(s.samples) + " protocols, j_max = " +
               std::to_string(s.j_max_h);
    return r;
}

CheckResult check_kick_identity(const VerifySettings& s, std::uint64_t seed, unsigned threads) {
    CheckResult r{"A2", "kick identity", false, 0, kick_identity_tol, ""};
    const double w = s.omega;
    for (int k = 0; k < s.samples; ++k) {
        const auto p = random_zero_sum_protocol(seed, static_cast<std::size_t>(k));
        const auto poly = kick_polynomial(p, w);
        const auto harm = kick_harmonic(p, w, s.j_max_k, threads);
        const double scale = std::max(1.0, harm.value.norm() * w);
        r.residual = std::max(r.residual, (poly.matrix() - harm.value).norm() / scale);
    }
    r.pass = r.residual <= r.threshold;
    r.detail = "max scaled Frobenius residual over " + std::to_string(s.samples) + " protocols, j_max = " +
               std::to_string(s.j_max_k);
    return r;
}

CheckResult check_oracle_order(const VerifySettings& s, const DriveConstants& c, double inertia, OracleSweep& sweep) {
    CheckResult r{"A3", "oracle order", false, 0, 0, ""};
    sweep = {};
    const auto h0 = spin_h0(inertia);
    const auto p = spin_protocol(s.oracle_alpha, s.oracle_beta, c);
    for (double w : s.oracle_omegas) {
        const auto oracle = exact_floquet(h0, p, w);
        const auto corrected = h_eff_paper(h0, p, w, Averaging::Corrected);
        const auto paper = h_eff_paper(h0, p, w, Averaging::Paper);
        sweep.omegas.push_back(w);
        sweep.corrected_distance.push_back(compare_models(corrected, oracle).spectral_distance);
        sweep.paper_distance.push_back(compare_models(paper, oracle).spectral_distance);
    }
    bool ok = true;
    double worst = 0;
    for (std::size_t k = 1; k < sweep.omegas.size(); ++k) {
        // Normalize to one doubling so uneven sweeps compare with 1/4.
        const double doublings = std::log2(sweep.omegas[k] / sweep.omegas[k - 1]);
        const double ratio =
            std::pow(sweep.corrected_distance[k] / sweep.corrected_distance[k - 1], 1.0 / doublings);
        sweep.ratios.push_back(ratio);
        ok = ok && ratio >= 0.2 && ratio <= 0.35;
        if (k == 1 || std::abs(ratio - 0.25) > std::abs(worst - 0.25)) worst = ratio;
    }
    r.pass = ok;
    r.residual = worst;
    r.threshold = 0.35;
    r.detail = "distance ratio per doubling must lie in [0.2, 0.35]; worst " + fmt("%.6g", worst);
    return r;
}

CheckResult check_field_anchors(const VerifySettings& s, std::uint64_t seed) {
    CheckResult r{"A4", "field anchors", true, 0, 0, ""};
    auto rng = make_rng(seed, 0x4000);
    std::uniform_real_distribution<double> u(-2, 2);
    double corner = 0;
    for (int k = 0; k < s.anchor_constants; ++k) {
        const DriveConstants c(u(rng), u(rng), u(rng), u(rng));
        for (auto [a, b] : {std::pair{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}})
            corner = std::max(corner, synthetic_field(a, b, c).magnitude);
    }
    const double quarter = synthetic_field(0.25, 0.25, DriveConstants(1, 1, 1, 1)).magnitude;
    const auto mx = max_field(DriveConstants(1, 1, 1, 1));
    double diag = 0;
    for (int k = 0; k < s.diagonal_samples; ++k) {
        const double t = static_cast<double>(k) / (s.diagonal_samples - 1);
        diag = std::max(diag, synthetic_field(t, t, DriveConstants(0, 1, 0, 1)).magnitude);
    }
    const bool corner_ok = corner <= 1e-12;
    const bool quarter_ok = std::abs(quarter - 1.2437) <= 5e-4;
    const bool max_ok = std::abs(mx.alpha - 0.63) <= 0.01 && std::abs(mx.beta - 0.38) <= 0.01;
    const bool diag_ok = diag <= 1e-12;
    r.pass = corner_ok && quarter_ok && max_ok && diag_ok;
    r.residual = std::max(corner, diag);
    r.threshold = 1e-12;
    r.detail = "corners " + fmt("%.3g", corner) + ", |B(0.25,0.25)| " + fmt("%.7f", quarter) + ", max at (" +
               fmt("%.4f", mx.alpha) + ", " + fmt("%.4f", mx.beta) + "), diagonal (0,1,0,1) " + fmt("%.3g", diag);
    return r;
}

CheckResult check_invariant_segments(const VerifySettings& s) {
    CheckResult r{"A5", "invariant segments", false, 0, 1e-10, ""};
    try {
        const auto segs = invariant_segments(DriveConstants(1, 1, 1, 1), s.segment_samples, 1e-10);
        double dev = 0, fit = 0;
        for (const auto& d : segs) {
            dev = std::max(dev, d.max_angular_deviation);
            fit = std::max(fit, d.profile_residual);
        }
        r.residual = std::max(dev, fit);
        r.pass = dev <= 1e-10 && fit <= 1e-10;
        r.detail = "max angular deviation " + fmt("%.3g", dev) + ", max profile residual " + fmt("%.3g", fit);
    } catch (const DirectionNotInvariant& e) {
        r.residual = HUGE_VAL;
        r.detail = e.what();
    }
    return r;
}

VerifyReport run_verification(const RunConfig& cfg) {
    VerifyReport rep;
    const auto& s = cfg.verify;
    const DriveConstants c = cfg.protocol.spin_constants ? cfg.protocol.constants : DriveConstants(1, 1, 1, 1);
    rep.checks.push_back(check_polynomial_identity(s, cfg.seed, cfg.threads));
    rep.checks.push_back(check_kick_identity(s, cfg.seed, cfg.threads));
    rep.checks.push_back(check_oracle_order(s, c, cfg.inertia, rep.sweep));
    rep.checks.push_back(check_field_anchors(s, cfg.seed));
    rep.checks.push_back(check_invariant_segments(s));
    return rep;
}

}  // namespace stepfloq
