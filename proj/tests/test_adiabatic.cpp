#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "stepfloq/adiabatic.hpp"
#include "stepfloq/errors.hpp"

using namespace stepfloq;
using Eigen::Vector2cd;
using Eigen::Vector3d;
using cd = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;
const DriveConstants unit(1, 1, 1, 1);

std::vector<Vector3d> equator(int n, int turns = 1) {
    std::vector<Vector3d> out;
    for (int k = 0; k < n * turns; ++k) {
        const double p = 2 * pi * k / n;
        out.emplace_back(std::cos(p), std::sin(p), 0);
    }
    return out;
}

/// Great-circle arc from a to b, excluding b.
void arc(std::vector<Vector3d>& out, const Vector3d& a, const Vector3d& b, int n) {
    const double th = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
    for (int k = 0; k < n; ++k) {
        const double t = th * k / n;
        out.push_back((std::sin(th - t) * a + std::sin(t) * b) / std::sin(th));
    }
}

std::vector<Vector2cd> spinors_of(const std::vector<Vector3d>& loop) {
    std::vector<Vector2cd> out;
    for (const auto& n : loop) out.push_back(aligned_spinor(n));
    return out;
}

double phase_gap(double a, double b) { return std::abs(wrap_phase(a - b)); }

BlochTrajectory trajectory(const std::string& name, int n, const DriveConstants& c = unit) {
    return bloch_trajectory(builtin_path(name), c, n);
}

}  // namespace

TEST_CASE("aligned spinor and spin expectation") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int k = 0; k < 50; ++k) {
        const Vector3d n = Vector3d(g(rng), g(rng), g(rng)).normalized();
        const auto psi = aligned_spinor(n);
        CHECK(std::abs(psi.norm() - 1) <= 1e-14);
        CHECK((spin_expectation(psi) - 0.5 * n).norm() <= 1e-14);
        // eigenvector of n.S with eigenvalue +1/2
        CHECK((spin_dot(n).matrix() * psi - 0.5 * psi).norm() <= 1e-14);
    }
    const auto down = aligned_spinor({0, 0, -1});
    CHECK(std::abs(std::abs(down(1)) - 1) <= 1e-15);
}

TEST_CASE("berry phase of simple loops") {
    std::vector<Vector3d> constant(10, Vector3d(0.3, 0.4, 0.5).normalized());
    CHECK(std::abs(berry_phase(spinors_of(constant))) <= 1e-14);

    CHECK(phase_gap(berry_phase(spinors_of(equator(2000))), -pi) <= 1e-5);
}

TEST_CASE("berry phase is gauge invariant") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-pi, pi);
    const auto traj = trajectory("fig4b", 2000);
    auto spinors = traj.spinors();
    const double ref = berry_phase(spinors);
    for (auto& s : spinors) s *= std::polar(1.0, u(rng));
    CHECK(phase_gap(berry_phase(spinors), ref) <= 1e-12);
}

TEST_CASE("solid angle of reference loops") {
    CHECK(solid_angle(equator(1000)) == doctest::Approx(2 * pi).epsilon(1e-12));
    CHECK(solid_angle(equator(1000, 2)) == doctest::Approx(4 * pi).epsilon(1e-12));

    std::vector<Vector3d> octant;
    const Vector3d x(1, 0, 0), y(0, 1, 0), z(0, 0, 1);
    arc(octant, x, y, 100);
    arc(octant, y, z, 100);
    arc(octant, z, x, 100);
    CHECK(solid_angle(octant) == doctest::Approx(pi / 2).epsilon(1e-12));

    std::vector<Vector3d> back(octant.rbegin(), octant.rend());
    CHECK(solid_angle(back) == doctest::Approx(-pi / 2).epsilon(1e-12));
}

TEST_CASE("berry phase equals minus half the solid angle on the catalog paths") {
    for (const char* name : {"fig4a", "fig4b", "fig4c"}) {
        const auto traj = trajectory(name, 10000);
        REQUIRE(traj.closed_on_sphere());
        CHECK_MESSAGE(phase_gap(berry_phase(traj), -solid_angle(traj) / 2) <= 1e-4, name);
    }
}

TEST_CASE("berry phase converges at second order") {
    for (const char* name : {"fig4a", "fig4b", "fig4c"}) {
        const double ref = berry_phase(trajectory(name, 160001));
        const double e1 = phase_gap(berry_phase(trajectory(name, 1001)), ref);
        const double e2 = phase_gap(berry_phase(trajectory(name, 2001)), ref);
        const double e3 = phase_gap(berry_phase(trajectory(name, 4001)), ref);
        CHECK_MESSAGE(std::log2(e1 / e2) >= 1.9, name);
        CHECK_MESSAGE(std::log2(e2 / e3) >= 1.9, name);
    }
}

TEST_CASE("reversal negates the phase") {
    for (const char* name : {"fig4a", "fig4b", "fig4c"}) {
        const auto p = builtin_path(name);
        const double fwd = berry_phase(bloch_trajectory(p, unit, 4000));
        const double rev = berry_phase(bloch_trajectory(p.reversed(), unit, 4000));
        CHECK_MESSAGE(phase_gap(fwd, -rev) <= 1e-10, name);
        const double af = solid_angle(bloch_trajectory(p, unit, 4000));
        const double ar = solid_angle(bloch_trajectory(p.reversed(), unit, 4000));
        CHECK(af == doctest::Approx(-ar).epsilon(1e-10));
    }
}

TEST_CASE("trajectory directions") {
    const auto traj = trajectory("fig4a", 101);
    bool found = false;
    for (const auto& s : traj.samples)
        if (s.alpha == 0.5 && s.beta == 0.5) {
            found = true;
            CHECK((s.n + Vector3d(1, 3, -1).normalized()).norm() <= 1e-12);
        }
    CHECK(found);

    const auto flat = trajectory("fig5-short", 400, DriveConstants(0, 1, 0, 1));
    const Vector3d first = flat.samples.front().n;
    CHECK(std::abs(std::abs(first.x()) - 1) <= 1e-12);
    for (const auto& s : flat.samples) CHECK((s.n - first).norm() <= 1e-12);

    CHECK_THROWS_AS(trajectory("fig4b", 1000, DriveConstants(0, 1, 0, 1)), NearDiabolical);
    // the corner is a zero of B for every drive
    const ParameterPath corner("corner", {{0, 1, PathComponent::polynomial({0, 0.5}), PathComponent::constant(0)}});
    CHECK_THROWS_AS(bloch_trajectory(corner, unit, 100), NearDiabolical);
}

TEST_CASE("invariant crossings") {
    const auto b = invariant_crossings(builtin_path("fig4b"), 10000);
    std::vector<Crossing> diag;
    for (const auto& c : b)
        if (c.segment == InvariantSegment::Diagonal) diag.push_back(c);
    REQUIRE(diag.size() == 2);
    const double lo = 0.5 - 0.5 / std::sqrt(2.0), hi = 0.5 + 0.5 / std::sqrt(2.0);
    CHECK(diag[0].type == CrossingType::Transversal);
    CHECK(diag[1].type == CrossingType::Transversal);
    CHECK(std::abs(diag[0].alpha - hi) <= 1e-6);
    CHECK(std::abs(diag[0].beta - hi) <= 1e-6);
    CHECK(std::abs(diag[1].alpha - lo) <= 1e-6);
    CHECK(std::abs(diag[1].beta - lo) <= 1e-6);

    const auto a = invariant_crossings(builtin_path("fig4a"), 10000);
    REQUIRE_FALSE(a.empty());
    bool touches_diag = false, touches_bottom = false, touches_right = false;
    for (const auto& c : a) {
        CHECK(c.type == CrossingType::Tangential);
        touches_diag = touches_diag || (c.segment == InvariantSegment::Diagonal && std::abs(c.alpha - 0.5) <= 1e-9);
        touches_bottom = touches_bottom || (c.segment == InvariantSegment::BetaZero && std::abs(c.alpha - 0.5) <= 1e-6);
        touches_right = touches_right || c.segment == InvariantSegment::AlphaOne;
    }
    CHECK(touches_diag);
    CHECK(touches_bottom);
    CHECK(touches_right);

    const auto c = invariant_crossings(builtin_path("fig4c"), 10000);
    int top = 0, ends = 0;
    for (const auto& x : c) {
        CHECK(x.type == CrossingType::Tangential);
        if (x.segment == InvariantSegment::BetaOne) {
            ++top;
            CHECK((std::abs(x.alpha - 0.4) <= 1e-6 || std::abs(x.alpha - 0.6) <= 1e-6));
        }
        if (x.segment == InvariantSegment::Diagonal && x.at_endpoint) ++ends;
    }
    CHECK(top == 2);
    CHECK(ends == 2);

    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i].tau >= c[i - 1].tau);
}

TEST_CASE("self intersections of the image loops") {
    CHECK(self_intersections(trajectory("fig4a", 4000)).count == 0);
    CHECK(self_intersections(trajectory("fig4b", 4000)).count == 1);
    CHECK(self_intersections(trajectory("fig4c", 4000)).count == 1);
    // a figure eight on the sphere crosses itself once
    std::vector<Vector3d> eight;
    for (int k = 0; k < 1000; ++k) {
        const double t = 2 * pi * k / 1000;
        eight.push_back(Vector3d(std::sin(t), 0.5 * std::sin(2 * t), 2).normalized());
    }
    CHECK(self_intersections(eight).count == 1);
    CHECK(self_intersections(equator(500)).count == 0);
    // the threaded sweep gives the same answer
    CHECK(self_intersections(trajectory("fig4b", 4000), 8).count == 1);
}

TEST_CASE("loop counts") {
    const std::vector<std::pair<const char*, int>> expected = {
        {"fig4a", 1}, {"fig4b", 2}, {"fig4c", 2}, {"fig5-long", 2}, {"fig5-short", 1}};
    for (const auto& [name, want] : expected) {
        const auto p = builtin_path(name);
        CHECK_MESSAGE(loop_count(p, bloch_trajectory(p, unit, 4000)) == want, name);
    }
}

TEST_CASE("fast energy") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int k = 0; k < 10; ++k) {
        Vector2cd psi(cd(g(rng), g(rng)), cd(g(rng), g(rng)));
        psi.normalize();
        CHECK(std::abs(delta_e_fast(psi, 0.5, 0.5, unit).value) <= 1e-14);
    }
    CHECK(delta_e_fast(Vector2cd(1, 0), 0, 0, unit).value == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK_THROWS_AS(delta_e_fast(Vector2cd(1, 1), 0.2, 0.2, unit), std::invalid_argument);
    CHECK(h0_expectation(2.0) == doctest::Approx(3.0 / 16));

    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 1000; ++k) {
        const double a = u(rng), b = u(rng);
        const Vector3d closed(0.5 * (a - b), 0.5 * (1 - 2 * a), 0.5 * (3 * b - a - 1));
        CHECK((average_field(a, b, unit) - closed).cwiseAbs().maxCoeff() <= 1e-12);
    }

    // general constants: the average potential read on (Sx, Sy, Sz)
    std::uniform_real_distribution<double> uc(-2, 2);
    for (int k = 0; k < 50; ++k) {
        const DriveConstants c(uc(rng), uc(rng), uc(rng), uc(rng));
        const double a = u(rng), b = u(rng);
        const ComplexMatrixd v0 = fourier_component(spin_protocol(a, b, c), 0);
        const Vector3d comp(2 * v0(0, 1).real(), -2 * v0(0, 1).imag(), (v0(0, 0) - v0(1, 1)).real());
        CHECK((average_field(a, b, c) - comp).cwiseAbs().maxCoeff() <= 1e-14);
        const Vector2cd up(1, 0);
        CHECK(delta_e_fast(up, a, b, c).value == doctest::Approx(0.5 * comp.z()).epsilon(1e-12));
    }
}

TEST_CASE("slow fields are scaled field gradients") {
    const double w = 100, h = 1e-5;
    for (auto [a, b] : {std::pair{0.3, 0.7}, {0.6, 0.2}, {0.45, 0.45}}) {
        const auto f = slow_fields(a, b, unit, w);
        const Vector3d da = (synthetic_field(a + h, b, unit).b - synthetic_field(a - h, b, unit).b) / (2 * h);
        const Vector3d db = (synthetic_field(a, b + h, unit).b - synthetic_field(a, b - h, unit).b) / (2 * h);
        const Vector3d fa = -(pi / (8 * w)) * da, fb = -(pi / (8 * w)) * db;
        CHECK((f[0] - fa).norm() <= 1e-8 * fa.norm());
        CHECK((f[1] - fb).norm() <= 1e-8 * fb.norm());
    }
}

TEST_CASE("slow energy along paths") {
    const StateSpec up{StateMode::Fixed, Vector2cd(1, 0)};
    for (const char* name : {"fig4a", "fig4b", "fig5-long", "fig5-short"})
        CHECK_MESSAGE(std::abs(delta_e_slow(up, builtin_path(name), unit, 100, 1000)) <= 1e-10, name);
    CHECK(std::abs(delta_e_slow(up, builtin_path("fig4c"), unit, 100, 1000)) <= 1e-10);

    // open path: the integral of a gradient is the endpoint difference
    const ParameterPath line("line", {{0, 1, PathComponent::polynomial({0.2, 0.5}), PathComponent::polynomial({0.1, 0.3})}});
    const double w = 100;
    const double want = -(pi / (8 * w)) * 0.5 * (synthetic_field(0.7, 0.4, unit).bz() - synthetic_field(0.2, 0.1, unit).bz());
    CHECK(delta_e_slow(up, line, unit, w, 200) == doctest::Approx(want).epsilon(1e-12));

    const StateSpec ground{StateMode::Ground, {}};
    const double g = delta_e_slow(ground, builtin_path("fig4b"), unit, 100, 1000);
    CHECK(std::isfinite(g));
    CHECK_THROWS_AS(delta_e_slow(ground, builtin_path("fig4b"), DriveConstants(0, 1, 0, 1), 100, 1000),
                    NearDiabolical);
}

TEST_CASE("adiabatic check") {
    const auto zero_fast = adiabatic_check(0.0, 1e-3);
    CHECK(zero_fast.separated);
    CHECK(zero_fast.ratio == doctest::Approx(1e-3 / adiabatic_ratio_floor));
    const auto equal = adiabatic_check(0.2, -0.2);
    CHECK(equal.ratio == doctest::Approx(1.0));
    CHECK_FALSE(equal.separated);
}

TEST_CASE("full path report") {
    const auto rep = analyze_path(builtin_path("fig4b"), unit, 100, 2000, StateSpec{StateMode::Ground, {}});
    CHECK(rep.image_closed);
    REQUIRE(rep.berry_phase);
    REQUIRE(rep.solid_angle);
    CHECK(phase_gap(*rep.berry_phase, -*rep.solid_angle / 2) <= 1e-4);
    REQUIRE(rep.loop_count);
    CHECK(*rep.loop_count == 2);
    CHECK(rep.self_intersections.count == 1);
    CHECK(std::isfinite(rep.check.ratio));
    CHECK(rep.trajectory.samples.size() == 2000);
}
