#pragma once

// CSV, JSON and SVG renderings of results. Every file carries the config
// hash and the averaging and state-mode tags.

#include <string>

#include "stepfloq/adiabatic.hpp"
#include "stepfloq/spin_system.hpp"
#include "stepfloq/verify.hpp"

namespace stepfloq {

struct OutputMeta {
    std::string config_hash;
    Averaging averaging = Averaging::Paper;
    StateMode state = StateMode::Ground;
};

/// 17 significant digits.
std::string format_double(double x);

/// "# config_hash=... averaging=... state=..." plus extra key=value pairs.
std::string csv_comment(const OutputMeta& meta, const std::string& extra = "");

std::string bands_csv(const BandSurface& s, const OutputMeta& meta);
std::string scan_csv(const DiabolicalScan& scan, const OutputMeta& meta);
std::string scan_json(const DiabolicalScan& scan, const DriveConstants& c, const OutputMeta& meta);
std::string trajectory_csv(const BlochTrajectory& traj, const OutputMeta& meta);
std::string report_json(const AdiabaticReport& rep, const ParameterPath& path, const OutputMeta& meta);
std::string energies_json(const FastEnergy& fast, double h0, double delta_e_slow, const AdiabaticCheck& check,
                          double alpha0, double beta0, const OutputMeta& meta);
std::string verify_json(const VerifyReport& rep, const OutputMeta& meta);

/// |B| heatmap over the unit square, one rect per grid node.
std::string heatmap_svg(const BandSurface& s);
/// Path in the parameter square with the five invariant segments dashed.
std::string parameter_svg(const ParameterPath& path, const std::vector<Crossing>& crossings, int samples = 800);
/// Orthographic projection of the image loop onto the sphere's x-y view.
std::string bloch_svg(const BlochTrajectory& traj);

/// Writes the file, creating parent directories; throws IoError.
void write_text_file(const std::string& file, const std::string& content);

}  // namespace stepfloq
