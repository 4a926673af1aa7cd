#pragma once

// Bloch-sphere images of parameter paths, geometric phase, crossing and loop
// analysis, and the fast/slow energy costs of an adiabatic sweep.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stepfloq/path.hpp"
#include "stepfloq/spin_system.hpp"

namespace stepfloq {

inline constexpr double default_diabolical_guard = 1e-8;

/// Spin-up along n: (cos theta/2, e^{i phi} sin theta/2).
Eigen::Vector2cd aligned_spinor(const Eigen::Vector3d& n);

/// <psi|S|psi> for a normalized spinor.
Eigen::Vector3d spin_expectation(const Eigen::Vector2cd& psi);

struct TrajectorySample {
    double tau, alpha, beta;
    Eigen::Vector3d n;
    Eigen::Vector2cd spinor;
    double b_mag;
};

struct BlochTrajectory {
    std::vector<TrajectorySample> samples;
    DriveConstants constants;
    double omega = 0;

    /// First and last n agree within 1e-9.
    bool closed_on_sphere() const;
    std::vector<Eigen::Vector3d> directions() const;
    std::vector<Eigen::Vector2cd> spinors() const;
};

struct TrajectoryOptions {
    double guard = default_diabolical_guard;
    double omega = 100;
    unsigned threads = 1;
};

/// n-hat = B/|B| and its aligned spinor at each of n path samples.
/// Throws NearDiabolical if |B| drops below the guard at a sample, or between
/// two samples where n-hat jumps by more than half a radian.
BlochTrajectory bloch_trajectory(const ParameterPath& path, const DriveConstants& c, int n,
                                 const TrajectoryOptions& opt = {});

/// -arg of the closed overlap product, in (-pi, pi]. The list is treated as a
/// loop: the overlap of the last spinor with the first is included.
double berry_phase(const std::vector<Eigen::Vector2cd>& spinors);

/// Throws std::invalid_argument when the image is not closed.
double berry_phase(const BlochTrajectory& traj);

/// Signed spherical area swept by the closed polyline of unit vectors, as a
/// fan of geodesic triangles from a reference apex. Accumulates past 4 pi for
/// loops wound more than once.
double solid_angle(const std::vector<Eigen::Vector3d>& loop);
double solid_angle(const BlochTrajectory& traj);

/// Wraps into (-pi, pi].
double wrap_phase(double x);

enum class CrossingType { Transversal, Tangential };
std::string to_string(CrossingType t);

struct Crossing {
    double tau, alpha, beta;
    InvariantSegment segment;
    CrossingType type;
    bool at_endpoint = false;  // contact at an end of an open path
};

/// Contacts of the sampled path with alpha = beta, alpha = 0, alpha = 1,
/// beta = 0 and beta = 1, ordered by tau.
std::vector<Crossing> invariant_crossings(const ParameterPath& path, int n);

struct SelfIntersections {
    int count = 0;
    std::vector<Eigen::Vector3d> points;
};

/// Crossings and touches between non-adjacent chords of the closed image
/// loop. Hits closer than a few chords to each other count once.
SelfIntersections self_intersections(const std::vector<Eigen::Vector3d>& loop, unsigned threads = 1);
SelfIntersections self_intersections(const BlochTrajectory& traj, unsigned threads = 1);

/// 1 + sum over groups of contacts sharing one image point of (size - 1).
///
/// Every passage of the path through an invariant segment lands on that
/// segment's fixed direction, so k passages onto one direction pinch the
/// image into k loops there. The closing contact of an open path whose
/// image closes (both ends on the same direction) counts once.
int loop_count(const ParameterPath& path, const BlochTrajectory& traj);

struct FastEnergy {
    double value = 0;                                  // <psi| S.B_f |psi>
    Eigen::Vector3d b_f = Eigen::Vector3d::Zero();     // duration-weighted drive average on (Sx, Sy, Sz)
};

/// Duration-weighted average of the four potentials, as a field.
Eigen::Vector3d average_field(double alpha, double beta, const DriveConstants& c);

/// Throws std::invalid_argument for an unnormalized state.
FastEnergy delta_e_fast(const Eigen::Vector2cd& state, double alpha0, double beta0, const DriveConstants& c);

/// <H0> = 3/(8I), reported next to delta_e_fast.
double h0_expectation(double inertia);

enum class StateMode { Fixed, Ground };
std::string to_string(StateMode m);

struct StateSpec {
    StateMode mode = StateMode::Ground;
    Eigen::Vector2cd fixed = Eigen::Vector2cd(1, 0);
};

/// -(pi/8w) dB/dalpha and -(pi/8w) dB/dbeta.
std::array<Eigen::Vector3d, 2> slow_fields(double alpha, double beta, const DriveConstants& c, double omega);

/// Integral of <psi| S.(F1 alpha' + F2 beta') |psi> d tau along the path.
///
/// Composite 4-point Gauss-Legendre on n - 1 panels laid out like
/// sample_path, after a smoothstep change of variable on each segment that
/// tames endpoint derivative singularities. Ground mode uses the state
/// aligned with B at each node and throws NearDiabolical below the guard.
double delta_e_slow(const StateSpec& state, const ParameterPath& path, const DriveConstants& c, double omega, int n,
                    double guard = default_diabolical_guard);

struct AdiabaticCheck {
    double ratio = 0;
    bool separated = false;
};

inline constexpr double adiabatic_ratio_floor = 1e-15;
inline constexpr double adiabatic_separation = 10;

/// |slow| / max(|fast|, 1e-15); separated when the ratio is at least 10.
AdiabaticCheck adiabatic_check(double delta_e_fast, double delta_e_slow);

struct AdiabaticReport {
    BlochTrajectory trajectory;
    bool image_closed = false;
    std::optional<double> berry_phase;
    std::optional<double> solid_angle;
    std::vector<Crossing> crossings;
    SelfIntersections self_intersections;
    std::optional<int> loop_count;
    StateMode state_mode = StateMode::Ground;
    FastEnergy fast;
    double delta_e_slow = 0;
    AdiabaticCheck check;
};

AdiabaticReport analyze_path(const ParameterPath& path, const DriveConstants& c, double omega, int n,
                             const StateSpec& state, unsigned threads = 1);

}  // namespace stepfloq
