// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "stepfloq/adiabatic.hpp"
#include "stepfloq/cli.hpp"
#include "stepfloq/config.hpp"
#include "stepfloq/verify.hpp"

using namespace stepfloq;
using Eigen::Vector3d;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;
const DriveConstants unit(1, 1, 1, 1);

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

bool report(const char* id, const char* name, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < limit_s;
    const bool ok = o.pass && in_time;
    std::printf("%-3s %-22s %s  (%s; %.2f s, limit %.0f s%s)\n", id, name, ok ? "PASS" : "FAIL", o.detail.c_str(), secs,
                limit_s, in_time ? "" : ", too slow");
    std::fflush(stdout);
    return ok;
}

Outcome from_check(const CheckResult& c) { return {c.pass, c.detail}; }

double phase_gap(double a, double b) { return std::abs(wrap_phase(a - b)); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int quiet_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    return run_cli(args, out, err);
}

/// Trapezoid oracle for V^(j) with panel edges on the step boundaries.
ComplexMatrixd trapezoid_component(const StepProtocold& p, long j, int points) {
    ComplexMatrixd out = ComplexMatrixd::Zero(2, 2);
    const auto& f = p.fractions();
    for (std::size_t r = 0; r < p.steps(); ++r) {
        const double w = f[r + 1] - f[r];
        if (w == 0) continue;
        const int m = std::max(2, static_cast<int>(points * w));
        std::complex<double> acc = 0;
        for (int k = 0; k <= m; ++k) {
            const double wt = (k == 0 || k == m) ? 0.5 : 1.0;
            acc += wt * std::polar(1.0, -2 * pi * j * (f[r] + w * k / m));
        }
        out += acc * (w / m) * p.potential(r).matrix();
    }
    return out;
}

double inclusion_exclusion(const std::vector<double>& a, std::size_t n) {
    double f = 0;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        double prod = 1;
        int bits = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                prod *= a[i];
                ++bits;
            }
        f += (bits % 2 ? 1 : -1) * prod;
    }
    return f;
}

}  // namespace

int main() {
    const RunConfig cfg = parse_config("{}");
    const auto& vs = cfg.verify;
    bool all = true;

    all &= report("A1", "polynomial identity", 10, [&] { return from_check(check_polynomial_identity(vs, cfg.seed, 1)); });
    all &= report("A2", "kick identity", 30, [&] { return from_check(check_kick_identity(vs, cfg.seed, 1)); });
    all &= report("A3", "oracle order", 1, [&] {
        OracleSweep sweep;
        const auto c = check_oracle_order(vs, unit, 1.0, sweep);
        std::string d = "corrected distances";
        for (double x : sweep.corrected_distance) d += " " + fmt("%.3e", x);
        d += ", paper distances";
        for (double x : sweep.paper_distance) d += " " + fmt("%.3e", x);
        d += ", ratios";
        for (double x : sweep.ratios) d += " " + fmt("%.4f", x);
        return Outcome{c.pass, d};
    });
    all &= report("A4", "field anchors", 5, [&] { return from_check(check_field_anchors(vs, cfg.seed)); });
    all &= report("A5", "invariant segments", 1, [&] { return from_check(check_invariant_segments(vs)); });

    all &= report("A6", "geometric phase", 5, [] {
        double worst_gap = 0, worst_order = HUGE_VAL, worst_rev = 0;
        for (const char* name : {"fig4a", "fig4b", "fig4c"}) {
            const auto p = builtin_path(name);
            const auto traj = bloch_trajectory(p, unit, 10000);
            worst_gap = std::max(worst_gap, phase_gap(berry_phase(traj), -solid_angle(traj) / 2));

            const double ref = berry_phase(bloch_trajectory(p, unit, 80001));
            const double e1 = phase_gap(berry_phase(bloch_trajectory(p, unit, 1251)), ref);
            const double e2 = phase_gap(berry_phase(bloch_trajectory(p, unit, 2501)), ref);
            worst_order = std::min(worst_order, std::log2(e1 / e2));

            const double rev = berry_phase(bloch_trajectory(p.reversed(), unit, 10000));
            worst_rev = std::max(worst_rev, phase_gap(berry_phase(traj), -rev));
        }
        return Outcome{worst_gap <= 1e-4 && worst_order >= 1.9 && worst_rev <= 1e-10,
                       "max |phase + solid/2| " + fmt("%.2e", worst_gap) + ", min order " + fmt("%.3f", worst_order) +
                           ", reversal mismatch " + fmt("%.2e", worst_rev)};
    });

    all &= report("A7", "windings", 5, [] {
        const std::vector<std::pair<const char*, int>> expected = {
            {"fig4a", 1}, {"fig4b", 2}, {"fig4c", 2}, {"fig5-long", 2}, {"fig5-short", 1}};
        bool ok = true;
        std::string d = "loop counts";
        for (const auto& [name, want] : expected) {
            const auto p = builtin_path(name);
            const int got = loop_count(p, bloch_trajectory(p, unit, 10000));
            ok = ok && got == want;
            d += std::string(" ") + name + "=" + std::to_string(got);
        }
        const double lo = 0.5 - 0.5 / std::sqrt(2.0), hi = 0.5 + 0.5 / std::sqrt(2.0);
        double cross_err = 0;
        int diag = 0;
        for (const auto& c : invariant_crossings(builtin_path("fig4b"), 10000)) {
            if (c.segment != InvariantSegment::Diagonal) continue;
            ++diag;
            const double t = c.alpha > 0.5 ? hi : lo;
            cross_err = std::max({cross_err, std::abs(c.alpha - t), std::abs(c.beta - t)});
        }
        ok = ok && diag == 2 && cross_err <= 1e-6;
        const auto tc = bloch_trajectory(builtin_path("fig4c"), unit, 10000);
        const double gap = (tc.samples.front().n - tc.samples.back().n).norm();
        ok = ok && gap <= 1e-9;
        d += ", fig4b diagonal crossings " + std::to_string(diag) + " off by " + fmt("%.1e", cross_err) +
             ", fig4c endpoint gap " + fmt("%.1e", gap);
        return Outcome{ok, d};
    });

    all &= report("A8", "energy costs", 5, [] {
        std::mt19937_64 rng(2024);
        std::normal_distribution<double> g;
        std::uniform_real_distribution<double> u(0, 1);
        Eigen::Vector2cd psi(std::complex<double>(g(rng), g(rng)), std::complex<double>(g(rng), g(rng)));
        psi.normalize();
        const double fast = std::abs(delta_e_fast(psi, 0.5, 0.5, unit).value);

        double bf = 0;
        for (int k = 0; k < 1000; ++k) {
            const double a = u(rng), b = u(rng);
            const Vector3d closed(0.5 * (a - b), 0.5 * (1 - 2 * a), 0.5 * (3 * b - a - 1));
            bf = std::max(bf, (average_field(a, b, unit) - closed).cwiseAbs().maxCoeff());
        }

        const double w = 100, h = 1e-5;
        double slow_rel = 0;
        for (int k = 0; k < 50; ++k) {
            const double a = 0.01 + 0.98 * u(rng), b = 0.01 + 0.98 * u(rng);
            const auto f = slow_fields(a, b, unit, w);
            const Vector3d da = (synthetic_field(a + h, b, unit).b - synthetic_field(a - h, b, unit).b) / (2 * h);
            const Vector3d db = (synthetic_field(a, b + h, unit).b - synthetic_field(a, b - h, unit).b) / (2 * h);
            slow_rel = std::max(slow_rel, (f[0] + (pi / (8 * w)) * da).norm() / f[0].norm());
            slow_rel = std::max(slow_rel, (f[1] + (pi / (8 * w)) * db).norm() / f[1].norm());
        }

        double loop = 0;
        const StateSpec up{StateMode::Fixed, Eigen::Vector2cd(1, 0)};
        for (const char* name : {"fig4a", "fig4b", "fig5-long", "fig5-short"})
            loop = std::max(loop, std::abs(delta_e_slow(up, builtin_path(name), unit, w, 1000)));

        return Outcome{fast <= 1e-14 && bf <= 1e-12 && slow_rel <= 1e-7 && loop <= 1e-10,
                       "fast at (0.5,0.5) " + fmt("%.1e", fast) + ", B_f formula " + fmt("%.1e", bf) +
                           ", slow-field rel " + fmt("%.1e", slow_rel) + ", closed-loop slow " + fmt("%.1e", loop)};
    });

    all &= report("A9", "protocol layer", 30, [] {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> u(0, 1);
        double fourier = 0;
        for (int k = 0; k < 20; ++k) {
            auto p = random_zero_sum_protocol(31337, static_cast<std::size_t>(k));
            if (k % 4 == 0) {
                // force zero-width steps at the corners of the square
                const auto& v = p.potentials();
                p = four_step_protocol(k % 8 == 0 ? 0.0 : 1.0, k % 8 == 0 ? 1.0 : 0.0, v[0], v[1], v[2], v[3]);
            }
            for (long j : {0L, 1L, -1L, 3L})
                fourier = std::max(fourier, (fourier_component(p, j) - trapezoid_component(p, j, 1000000))
                                                .cwiseAbs()
                                                .maxCoeff());
        }
        double incl = 0;
        for (int t = 0; t < 200; ++t) {
            std::vector<double> a(1 + t % 6);
            for (auto& x : a) x = u(rng);
            const auto f = partition_fractions(PartitionParams<double>(a));
            for (std::size_t n = 1; n <= a.size(); ++n) incl = std::max(incl, std::abs(f[n] - inclusion_exclusion(a, n)));
        }
        return Outcome{fourier <= 1e-9 && incl <= 1e-12,
                       "Fourier vs trapezoid " + fmt("%.1e", fourier) + ", inclusion-exclusion " + fmt("%.1e", incl)};
    });

    all &= report("A10", "determinism", 60, [] {
        const fs::path root = fs::current_path() / "acceptance_out";
        bool ok = true;
        ok = ok && quiet_cli({"verify", "--out", (root / "v1").string()}) == exit_ok;
        ok = ok && quiet_cli({"verify", "--out", (root / "v2").string()}) == exit_ok;
        const bool verify_same = slurp(root / "v1" / "verify.json") == slurp(root / "v2" / "verify.json");
        ok = ok && quiet_cli({"scan", "--threads", "1", "--out", (root / "s1").string()}) == exit_ok;
        ok = ok && quiet_cli({"scan", "--threads", "8", "--out", (root / "s8").string()}) == exit_ok;
        const bool scan_same = slurp(root / "s1" / "scan.csv") == slurp(root / "s8" / "scan.csv");
        ok = ok && quiet_cli({"bands", "--threads", "1", "--out", (root / "b1").string()}) == exit_ok;
        ok = ok && quiet_cli({"bands", "--threads", "8", "--out", (root / "b8").string()}) == exit_ok;
        const bool bands_same = slurp(root / "b1" / "bands.csv") == slurp(root / "b8" / "bands.csv");
        return Outcome{ok && verify_same && scan_same && bands_same,
                       std::string("verify reports ") + (verify_same ? "identical" : "differ") + ", scan CSV " +
                           (scan_same ? "identical" : "differs") + ", bands CSV " +
                           (bands_same ? "identical" : "differs") + " at 1 vs 8 threads"};
    });

    std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
    return all ? 0 : 1;
}
