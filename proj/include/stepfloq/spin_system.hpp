#pragma once

// Driven spin-1/2 model: potentials built from four drive constants, the
// synthetic fields B (in H_eff) and B' (in K(0)), band surfaces, and the
// degeneracy structure over the (alpha, beta) unit square.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stepfloq/effective.hpp"
#include "stepfloq/linalg.hpp"
#include "stepfloq/protocol.hpp"

namespace stepfloq {

struct DriveConstants {
    double c1 = 1, c2 = 1, c3 = 1, c4 = 1;

    DriveConstants() = default;
    DriveConstants(double a, double b, double c, double d);

    std::array<double, 4> as_array() const { return {c1, c2, c3, c4}; }
    bool all_zero() const { return c1 == 0 && c2 == 0 && c3 == 0 && c4 == 0; }
};

struct SyntheticField {
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    double magnitude = 0;

    SyntheticField() = default;
    explicit SyntheticField(const Eigen::Vector3d& v) : b(v), magnitude(v.norm()) {}

    double bx() const { return b.x(); }
    double by() const { return b.y(); }
    double bz() const { return b.z(); }
};

/// V1 = c1 Sx - c2 Sy, V2 = c2 Sy + c3 Sz, V3 = c4 Sz - c1 Sx, V4 = -(c3 + c4) Sz.
std::array<HermitianOperatord, 4> spin_potentials(const DriveConstants& c);

/// The four-step protocol with spin potentials.
StepProtocold spin_protocol(double alpha, double beta, const DriveConstants& c);

/// H0 = S^2 / 2I = (3/4)/(2I) * identity.
HermitianOperatord spin_h0(double inertia);

/// S . v for a real 3-vector.
HermitianOperatord spin_dot(const Eigen::Vector3d& v);

/// Components of a traceless 2x2 Hermitian operator on (Sx, Sy, Sz).
Eigen::Vector3d spin_components(const ComplexMatrixd& m);

/// Linear map from commutator weights P_rs to B; H_eff = H0 - (pi/8w) S.B.
Eigen::Vector3d field_from_weights(const CommutatorWeights<double>& p, const DriveConstants& c);

SyntheticField synthetic_field(double alpha, double beta, const DriveConstants& c);

/// Closed-form B for c = (1, 1, 1, 1).
Eigen::Vector3d unit_constants_field(double alpha, double beta);

/// dB/dalpha and dB/dbeta.
std::array<Eigen::Vector3d, 2> field_gradient(double alpha, double beta, const DriveConstants& c);

/// B' with K(0) = -(pi/4w) S.B'.
SyntheticField kick_field(double alpha, double beta, const DriveConstants& c);

/// B for c = (0, 1, 0, 1), which points along x everywhere.
SyntheticField field_0101(double alpha, double beta);

struct SpinSpectrum {
    double e_minus;
    double e_plus;
};

/// Eigenvalues of the assembled first-order H_eff. With paper averaging (no
/// drive average) they are 3/(8I) -+ (pi/16w)|B|.
SpinSpectrum spectrum(double alpha, double beta, const DriveConstants& c, double omega, double inertia,
                      Averaging averaging = Averaging::Paper);

struct BandNode {
    double alpha, beta, e_minus, e_plus, b_mag;
};

struct BandSurface {
    int resolution = 0;
    std::vector<BandNode> nodes;  // row-major: alpha index outer, beta index inner
};

/// Band surface on a resolution x resolution grid including the edges.
BandSurface band_surface(const DriveConstants& c, int resolution, double omega, double inertia,
                         unsigned threads = 1, Averaging averaging = Averaging::Paper);

struct DegeneracyPoint {
    double alpha, beta, b_mag;
    bool corner;
};

struct DegeneracyLocus {
    int component;
    std::vector<Eigen::Vector2d> polyline;
};

struct DiabolicalScan {
    bool degenerate_everywhere = false;
    std::vector<DegeneracyPoint> points;  // corners first, then isolated interior zeros
    std::vector<DegeneracyLocus> loci;
};

/// Zeros of |B| on the unit square.
///
/// Every grid cell is searched for a constrained minimum of |B|^2 by damped
/// Gauss-Newton from the cell centre; cells whose minimum is below `tol`
/// are zero cells. Connected zero cells spanning more than a couple of cells
/// form a locus; the rest are isolated points. The four corners are zeros
/// for every choice of constants and are always reported.
DiabolicalScan diabolical_scan(const DriveConstants& c, int grid_n = 64, double tol = 1e-10,
                               unsigned threads = 1);

/// Refines a zero of |B|^2 from `start`, staying inside [lo, hi] box bounds.
Eigen::Vector2d refine_field_zero(const DriveConstants& c, Eigen::Vector2d start, const Eigen::Vector2d& lo,
                                  const Eigen::Vector2d& hi, int max_iter = 100);

struct FieldMaximum {
    double alpha, beta, magnitude;
};

/// Global maximizer of |B| on the unit square (grid seed + projected ascent).
FieldMaximum max_field(const DriveConstants& c, int seed_grid = 201);

enum class InvariantSegment { AlphaZero, AlphaOne, BetaZero, BetaOne, Diagonal };

inline constexpr std::array<InvariantSegment, 5> all_invariant_segments = {
    InvariantSegment::AlphaZero, InvariantSegment::AlphaOne, InvariantSegment::BetaZero,
    InvariantSegment::BetaOne, InvariantSegment::Diagonal};

std::string to_string(InvariantSegment s);

/// Point on a segment at parameter s in [0, 1].
Eigen::Vector2d segment_point(InvariantSegment seg, double s);

struct SegmentDirection {
    InvariantSegment segment;
    bool zero_field = false;
    Eigen::Vector3d direction = Eigen::Vector3d::Zero();  // unit vector, unset when zero_field
    double max_angular_deviation = 0;
    double profile_scale = 0;     // |B(s)| ~ profile_scale * s(1 - s)
    double profile_residual = 0;  // max |(|B(s)| - profile_scale * s(1 - s))|
};

/// Verifies that B keeps its direction along each of the five segments.
/// Throws DirectionNotInvariant when the deviation exceeds `tolerance`.
std::vector<SegmentDirection> invariant_segments(const DriveConstants& c, int samples = 257,
                                                 double tolerance = 1e-10);

}  // namespace stepfloq
