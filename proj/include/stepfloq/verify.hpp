#pragma once

// Self-checks of the effective-model machinery: polynomial and kick
// identities against the harmonic sums, the exact-propagator oracle's
// convergence order, field anchors, and invariant-segment directions.

#include <cstdint>
#include <string>
#include <vector>

#include "stepfloq/config.hpp"

namespace stepfloq {

struct CheckResult {
    std::string id;
    std::string name;
    bool pass = false;
    double residual = 0;   // worst value of the checked quantity
    double threshold = 0;
    std::string detail;
};

struct OracleSweep {
    std::vector<double> omegas;
    std::vector<double> corrected_distance;  // H0 + V(0) + H1 against the oracle
    std::vector<double> paper_distance;      // H0 + H1 against the oracle
    std::vector<double> ratios;              // corrected distance per doubling of omega
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    OracleSweep sweep;
    bool all_pass() const;
};

inline constexpr double polynomial_identity_tol = 1e-6;
inline constexpr double kick_identity_tol = 1e-5;

/// Seeded random four-step protocol with Hermitian 2x2 potentials summing
/// to zero; shared by verification and tests.
StepProtocold random_zero_sum_protocol(std::uint64_t seed, std::size_t index);

CheckResult check_polynomial_identity(const VerifySettings& s, std::uint64_t seed, unsigned threads);
CheckResult check_kick_identity(const VerifySettings& s, std::uint64_t seed, unsigned threads);
CheckResult check_oracle_order(const VerifySettings& s, const DriveConstants& c, double inertia, OracleSweep& sweep);
CheckResult check_field_anchors(const VerifySettings& s, std::uint64_t seed);
CheckResult check_invariant_segments(const VerifySettings& s);

VerifyReport run_verification(const RunConfig& cfg);

}  // namespace stepfloq
