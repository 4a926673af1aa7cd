#pragma once

// Run configuration for the command-line tool, read from JSON.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stepfloq/adiabatic.hpp"
#include "stepfloq/effective.hpp"
#include "stepfloq/path.hpp"
#include "stepfloq/spin_system.hpp"

namespace stepfloq {

struct ProtocolDescriptor {
    enum class Type { FourStep, Generalized };
    Type type = Type::FourStep;
    double alpha = 0.5, beta = 0.5;      // four-step
    std::vector<double> alphas;          // generalized
    bool spin_constants = true;          // potentials from drive constants
    DriveConstants constants;
    std::vector<HermitianOperatord> potentials;  // explicit matrices otherwise

    StepProtocold build() const;
};

struct VerifySettings {
    int samples = 256;  // random protocols for the polynomial and kick identities
    std::size_t j_max_h = default_j_max_h;
    std::size_t j_max_k = default_j_max_k;
    double omega = 100;
    std::vector<double> oracle_omegas = {50, 100, 200};
    double oracle_alpha = 0.3, oracle_beta = 0.7;
    int anchor_constants = 100;
    int diagonal_samples = 1000;
    int segment_samples = 257;
};

struct RunConfig {
    ProtocolDescriptor protocol;
    double omega = 100;
    double inertia = 1;
    int grid_n = 64;
    std::string path_name = "fig4b";
    std::optional<ParameterPath> path;  // explicit segments, overrides path_name
    std::string path_json;              // canonical JSON of explicit segments, for hashing
    int samples = 1000;
    std::string out = "out";
    Averaging averaging = Averaging::Paper;
    StateSpec state;
    std::optional<std::array<double, 2>> fast_point;
    unsigned threads = 1;
    std::uint64_t seed = 20240101;
    VerifySettings verify;

    ParameterPath resolve_path() const;
    /// Drive constants, or ConfigError when the protocol uses explicit matrices.
    const DriveConstants& spin_constants() const;
};

/// Parses a JSON document; missing keys keep their defaults. Throws
/// ConfigError on malformed input or invalid values.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& file);

/// Re-validates fields after command-line overrides.
void validate_config(const RunConfig& cfg);

/// Canonical JSON of every setting that affects results (not threads or
/// the output directory).
std::string canonical_config(const RunConfig& cfg);

/// FNV-1a 64 of the canonical config, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Explicit path from its JSON segment encoding.
ParameterPath parse_path_json(const std::string& json_text, const std::string& name = "custom");

}  // namespace stepfloq
