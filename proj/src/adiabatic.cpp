#include "stepfloq/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "stepfloq/errors.hpp"
#include "stepfloq/parallel.hpp"

namespace stepfloq {

namespace {

constexpr double pi = std::numbers::pi;

double angle_between(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

/// Angular distance from p to the minor great-circle arc a -> b.
double point_arc_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const Eigen::Vector3d nrm = a.cross(b);
    const double len = nrm.norm();
    const double ends = std::min(angle_between(p, a), angle_between(p, b));
    if (len < 1e-15) return ends;
    const Eigen::Vector3d c = nrm / len;
    const Eigen::Vector3d proj = p - p.dot(c) * c;
    if (proj.norm() < 1e-15) return ends;
    if (a.cross(proj).dot(c) >= 0 && proj.cross(b).dot(c) >= 0)
        return std::min(ends, std::asin(std::min(1.0, std::abs(p.dot(c)))));
    return ends;
}

double loop_distance(const Eigen::Vector3d& p, const std::vector<Eigen::Vector3d>& loop) {
    double d = HUGE_VAL;
    for (std::size_t k = 0; k + 1 < loop.size(); ++k) d = std::min(d, point_arc_distance(p, loop[k], loop[k + 1]));
    if (loop.size() == 1) d = angle_between(p, loop[0]);
    return d;
}

template <typename F>
double golden_min(F&& f, double lo, double hi, int iters = 200) {
    const double g = (std::sqrt(5.0) - 1) / 2;
    double a = lo, b = hi;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int k = 0; k < iters && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++k) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

Eigen::Vector2d clamp_unit(const Eigen::Vector2d& p) { return p.cwiseMax(0.0).cwiseMin(1.0); }

double segment_function(InvariantSegment seg, const Eigen::Vector2d& p) {
    switch (seg) {
        case InvariantSegment::AlphaZero: return p.x();
        case InvariantSegment::AlphaOne: return p.x() - 1;
        case InvariantSegment::BetaZero: return p.y();
        case InvariantSegment::BetaOne: return p.y() - 1;
        case InvariantSegment::Diagonal: return p.x() - p.y();
    }
    return 0;
}

}  // namespace

Eigen::Vector2cd aligned_spinor(const Eigen::Vector3d& n) {
    const double nz = std::clamp(n.z(), -1.0, 1.0);
    const double phi = std::atan2(n.y(), n.x());
    return {std::complex<double>(std::sqrt((1 + nz) / 2), 0),
            std::polar(std::sqrt((1 - nz) / 2), phi)};
}

Eigen::Vector3d spin_expectation(const Eigen::Vector2cd& psi) {
    const std::complex<double> ab = std::conj(psi(0)) * psi(1);
    return {ab.real(), ab.imag(), (std::norm(psi(0)) - std::norm(psi(1))) / 2};
}

bool BlochTrajectory::closed_on_sphere() const {
    if (samples.size() < 2) return false;
    return (samples.front().n - samples.back().n).norm() <= 1e-9;
}

std::vector<Eigen::Vector3d> BlochTrajectory::directions() const {
    std::vector<Eigen::Vector3d> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.n);
    return out;
}

std::vector<Eigen::Vector2cd> BlochTrajectory::spinors() const {
    std::vector<Eigen::Vector2cd> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.spinor);
    return out;
}

BlochTrajectory bloch_trajectory(const ParameterPath& path, const DriveConstants& c, int n,
                                 const TrajectoryOptions& opt) {
    const auto pts = sample_path(path, n);
    BlochTrajectory traj;
    traj.constants = c;
    traj.omega = opt.omega;
    traj.samples.resize(pts.size());
    parallel_for(pts.size(), opt.threads, [&](std::size_t i) {
        const auto f = synthetic_field(pts[i].alpha, pts[i].beta, c);
        auto& s = traj.samples[i];
        s.tau = pts[i].tau;
        s.alpha = pts[i].alpha;
        s.beta = pts[i].beta;
        s.b_mag = f.magnitude;
        s.n = f.magnitude > 0 ? Eigen::Vector3d(f.b / f.magnitude) : Eigen::Vector3d::Zero();
        s.spinor = aligned_spinor(s.n);
    });
    for (const auto& s : traj.samples)
        if (!(s.b_mag >= opt.guard)) throw NearDiabolical(s.tau, s.b_mag);

    auto magnitude_at = [&](double tau) {
        const auto p = clamp_unit(path.point(tau));
        return synthetic_field(p.x(), p.y(), c).magnitude;
    };
    for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
        const auto& a = traj.samples[i];
        const auto& b = traj.samples[i + 1];
        if (angle_between(a.n, b.n) <= 0.5) continue;
        const double t = golden_min(magnitude_at, a.tau, b.tau);
        const double m = magnitude_at(t);
        if (m < opt.guard) throw NearDiabolical(t, m);
    }
    return traj;
}

double wrap_phase(double x) {
    double r = std::remainder(x, 2 * pi);
    if (r <= -pi) r += 2 * pi;
    return r;
}

double berry_phase(const std::vector<Eigen::Vector2cd>& spinors) {
    if (spinors.size() < 2) return 0;
    std::complex<double> prod(1, 0);
    for (std::size_t k = 0; k < spinors.size(); ++k) {
        const auto& a = spinors[k];
        const auto& b = spinors[(k + 1) % spinors.size()];
        const std::complex<double> ov = a.dot(b);  // conjugates a
        prod *= ov / std::abs(ov);
    }
    return wrap_phase(-std::arg(prod));
}

double berry_phase(const BlochTrajectory& traj) {
    if (!traj.closed_on_sphere()) throw std::invalid_argument("berry_phase: trajectory is not closed on the sphere");
    return berry_phase(traj.spinors());
}

double solid_angle(const std::vector<Eigen::Vector3d>& loop) {
    if (loop.size() < 3) return 0;
    std::vector<Eigen::Vector3d> pts = loop;
    if ((pts.front() - pts.back()).norm() > 1e-9) pts.push_back(pts.front());

    // The fan is singular where an edge passes through -apex, so the apex is
    // chosen with its antipode well clear of the loop.
    constexpr double clearance = 0.05;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) sum += pts[k];
    std::optional<Eigen::Vector3d> apex;
    if (sum.norm() > 1e-6 * static_cast<double>(pts.size())) {
        const Eigen::Vector3d o = sum.normalized();
        if (loop_distance(-o, pts) >= clearance) apex = o;
    }
    if (!apex) {
        const double r = 1 / std::sqrt(3.0);
        const std::vector<Eigen::Vector3d> cands = {
            {0, 0, 1}, {0, 0, -1}, {1, 0, 0},  {-1, 0, 0}, {0, 1, 0},   {0, -1, 0},  {r, r, r},
            {-r, r, r}, {r, -r, r}, {r, r, -r}, {-r, -r, r}, {-r, r, -r}, {r, -r, -r}, {-r, -r, -r}};
        double best = -1;
        for (const auto& o : cands) {
            const double d = loop_distance(-o, pts);
            if (d > best) {
                best = d;
                apex = o;
            }
        }
        if (best < clearance) throw Error("solid_angle: no reference point clear of the trajectory");
    }
    const Eigen::Vector3d& o = *apex;
    double total = 0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const auto& a = pts[k];
        const auto& b = pts[k + 1];
        total += 2 * std::atan2(o.dot(a.cross(b)), 1 + o.dot(a) + a.dot(b) + b.dot(o));
    }
    return total;
}

double solid_angle(const BlochTrajectory& traj) {
    if (!traj.closed_on_sphere()) throw std::invalid_argument("solid_angle: trajectory is not closed on the sphere");
    return solid_angle(traj.directions());
}

std::string to_string(CrossingType t) { return t == CrossingType::Transversal ? "transversal" : "tangential"; }

std::vector<Crossing> invariant_crossings(const ParameterPath& path, int n) {
    const auto samples = sample_path(path, n);
    const bool closed = path.closed();
    const std::size_t count = samples.size();
    const std::size_t distinct = closed ? count - 1 : count;
    const double period = path.tau_end() - path.tau_begin();
    constexpr double zero_tol = 1e-12;
    constexpr double touch_tol = 1e-10;

    std::vector<Crossing> out;
    for (auto seg : all_invariant_segments) {
        auto g_at = [&](double tau) { return segment_function(seg, path.point(tau)); };
        std::vector<double> g(count);
        for (std::size_t i = 0; i < count; ++i)
            g[i] = segment_function(seg, Eigen::Vector2d(samples[i].alpha, samples[i].beta));
        auto is_zero = [&](std::size_t i) { return std::abs(g[i]) <= zero_tol; };
        auto add = [&](double tau, CrossingType type, bool endpoint) {
            const auto p = path.point(tau);
            out.push_back({tau, p.x(), p.y(), seg, type, endpoint});
        };

        // Runs of zero samples.
        std::size_t nonzero = 0;
        for (std::size_t i = 0; i < distinct; ++i) nonzero += !is_zero(i);
        if (nonzero == 0) continue;  // the path runs along the segment
        if (closed) {
            std::size_t start = 0;
            while (is_zero(start)) ++start;
            for (std::size_t k = 1; k <= distinct; ++k) {
                const std::size_t i = (start + k) % distinct;
                if (!is_zero(i)) continue;
                const std::size_t prev = (i + distinct - 1) % distinct;
                if (!is_zero(prev)) {
                    std::size_t j = i;
                    while (is_zero((j + 1) % distinct)) j = (j + 1) % distinct;
                    const std::size_t next = (j + 1) % distinct;
                    const bool flip = (g[prev] > 0) != (g[next] > 0);
                    add(samples[i].tau, flip ? CrossingType::Transversal : CrossingType::Tangential, false);
                }
            }
        } else {
            for (std::size_t i = 0; i < count; ++i) {
                if (!is_zero(i) || (i > 0 && is_zero(i - 1))) continue;
                std::size_t j = i;
                while (j + 1 < count && is_zero(j + 1)) ++j;
                if (i == 0 || j + 1 == count) {
                    add(samples[i].tau, CrossingType::Tangential, true);
                } else {
                    const bool flip = (g[i - 1] > 0) != (g[j + 1] > 0);
                    add(samples[i].tau, flip ? CrossingType::Transversal : CrossingType::Tangential, false);
                }
            }
        }

        // Sign changes between samples.
        for (std::size_t i = 0; i + 1 < count; ++i) {
            if (is_zero(i) || is_zero(i + 1) || (g[i] > 0) == (g[i + 1] > 0)) continue;
            double lo = samples[i].tau, hi = samples[i + 1].tau;
            const bool lo_pos = g[i] > 0;
            for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
                const double mid = 0.5 * (lo + hi);
                if ((g_at(mid) > 0) == lo_pos)
                    lo = mid;
                else
                    hi = mid;
            }
            add(0.5 * (lo + hi), CrossingType::Transversal, false);
        }

        // Touches between samples: a strict dip of |g| without a sign change.
        auto wrap_tau = [&](double u) { return u < path.tau_begin() ? u + period : u; };
        for (std::size_t i = 0; i < distinct; ++i) {
            std::size_t prev, next;
            double lo, hi;
            if (closed) {
                prev = (i + distinct - 1) % distinct;
                next = i + 1;
                lo = i == 0 ? samples[distinct - 1].tau - period : samples[prev].tau;
                hi = samples[next].tau;
            } else {
                if (i == 0 || i + 1 == count) continue;
                prev = i - 1;
                next = i + 1;
                lo = samples[prev].tau;
                hi = samples[next].tau;
            }
            const std::size_t next_idx = closed ? next % distinct : next;
            if (is_zero(prev) || is_zero(i) || is_zero(next_idx)) continue;
            if ((g[prev] > 0) != (g[i] > 0) || (g[next_idx] > 0) != (g[i] > 0)) continue;
            if (!(std::abs(g[i]) < std::abs(g[prev]) && std::abs(g[i]) <= std::abs(g[next_idx]))) continue;
            const double u = golden_min([&](double x) { return std::abs(g_at(wrap_tau(x))); }, lo, hi);
            const double tau = wrap_tau(u);
            if (std::abs(g_at(tau)) <= touch_tol) add(tau, CrossingType::Tangential, false);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) {
        if (a.tau != b.tau) return a.tau < b.tau;
        return static_cast<int>(a.segment) < static_cast<int>(b.segment);
    });
    return out;
}

SelfIntersections self_intersections(const std::vector<Eigen::Vector3d>& loop, unsigned threads) {
    SelfIntersections result;
    std::vector<Eigen::Vector3d> pts = loop;
    if (pts.size() < 4) return result;
    if ((pts.front() - pts.back()).norm() > 1e-9) pts.push_back(pts.front());
    const std::size_t m = pts.size() - 1;  // chords
    std::vector<double> arc(m + 1, 0.0), half(m);
    std::vector<Eigen::Vector3d> mid(m);
    for (std::size_t k = 0; k < m; ++k) {
        arc[k + 1] = arc[k] + angle_between(pts[k], pts[k + 1]);
        mid[k] = 0.5 * (pts[k] + pts[k + 1]);
        half[k] = 0.5 * (pts[k + 1] - pts[k]).norm();
    }
    const double total = arc[m];
    constexpr double touch = 1e-9;
    constexpr double min_separation = 1e-3;

    struct Hit {
        std::size_t i, j;
        Eigen::Vector3d p;
    };
    std::vector<std::vector<Hit>> per_i(m);
    parallel_for(m, threads, [&](std::size_t i) {
        const auto& a = pts[i];
        const auto& b = pts[i + 1];
        const Eigen::Vector3d n1 = a.cross(b);
        for (std::size_t j = i + 2; j < m; ++j) {
            if (i == 0 && j == m - 1) continue;
            if ((mid[i] - mid[j]).norm() > half[i] + half[j] + 1e-8) continue;
            const double sep = std::min(arc[j] - arc[i + 1], total - arc[j + 1] + arc[i]);
            if (sep < min_separation) continue;
            const auto& c = pts[j];
            const auto& d = pts[j + 1];
            const Eigen::Vector3d n2 = c.cross(d);
            const double s1 = n1.dot(c), s2 = n1.dot(d), s3 = n2.dot(a), s4 = n2.dot(b);
            if (s1 * s2 < 0 && s3 * s4 < 0 && (a + b).dot(c + d) > 0) {
                Eigen::Vector3d p = n1.cross(n2).normalized();
                if (p.dot(a + b) < 0) p = -p;
                per_i[i].push_back({i, j, p});
                continue;
            }
            const std::array<std::pair<const Eigen::Vector3d*, bool>, 4> verts = {
                {{&c, true}, {&d, true}, {&a, false}, {&b, false}}};
            for (const auto& [v, on_ab] : verts) {
                const double dist = on_ab ? point_arc_distance(*v, a, b) : point_arc_distance(*v, c, d);
                if (dist <= touch) {
                    per_i[i].push_back({i, j, *v});
                    break;
                }
            }
        }
    });

    std::vector<Hit> hits;
    for (auto& v : per_i) hits.insert(hits.end(), v.begin(), v.end());
    auto cyc = [&](std::size_t x, std::size_t y) {
        const std::size_t d = x > y ? x - y : y - x;
        return std::min(d, m - d);
    };
    constexpr std::size_t window = 4;
    std::vector<int> cluster(hits.size(), -1);
    int clusters = 0;
    for (std::size_t h = 0; h < hits.size(); ++h) {
        if (cluster[h] >= 0) continue;
        cluster[h] = clusters;
        std::vector<std::size_t> stack = {h};
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            for (std::size_t o = 0; o < hits.size(); ++o) {
                if (cluster[o] >= 0) continue;
                const bool same = (cyc(hits[o].i, hits[cur].i) <= window && cyc(hits[o].j, hits[cur].j) <= window) ||
                                  (cyc(hits[o].i, hits[cur].j) <= window && cyc(hits[o].j, hits[cur].i) <= window);
                if (same) {
                    cluster[o] = clusters;
                    stack.push_back(o);
                }
            }
        }
        result.points.push_back(hits[h].p);
        ++clusters;
    }
    result.count = clusters;
    return result;
}

SelfIntersections self_intersections(const BlochTrajectory& traj, unsigned threads) {
    return self_intersections(traj.directions(), threads);
}

int loop_count(const ParameterPath& path, const BlochTrajectory& traj) {
    if (!traj.closed_on_sphere()) throw std::invalid_argument("loop_count: trajectory is not closed on the sphere");
    const auto contacts = invariant_crossings(path, static_cast<int>(traj.samples.size()));
    std::vector<Eigen::Vector3d> dirs;
    std::vector<bool> endpoint;
    for (const auto& cr : contacts) {
        const auto f = synthetic_field(cr.alpha, cr.beta, traj.constants);
        if (f.magnitude < default_diabolical_guard) continue;
        dirs.push_back(f.b / f.magnitude);
        endpoint.push_back(cr.at_endpoint);
    }
    std::vector<int> group(dirs.size(), -1);
    int groups = 0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        if (group[i] >= 0) continue;
        group[i] = groups;
        for (std::size_t j = i + 1; j < dirs.size(); ++j)
            if (group[j] < 0 && angle_between(dirs[i], dirs[j]) < 1e-6) group[j] = groups;
        ++groups;
    }
    int loops = 1;
    for (int g = 0; g < groups; ++g) {
        int size = 0, ends = 0;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            if (group[i] != g) continue;
            ++size;
            ends += endpoint[i];
        }
        if (ends == 2) --size;  // both ends of an open path meet at the closing point
        loops += std::max(0, size - 1);
    }
    return loops;
}

Eigen::Vector3d average_field(double alpha, double beta, const DriveConstants& c) {
    return spin_components(average_potential(spin_protocol(alpha, beta, c)).matrix());
}

namespace {

void require_normalized(const Eigen::Vector2cd& psi) {
    if (!psi.allFinite() || std::abs(psi.norm() - 1) > 1e-10)
        throw std::invalid_argument("state must be a normalized spinor");
}

}  // namespace

FastEnergy delta_e_fast(const Eigen::Vector2cd& state, double alpha0, double beta0, const DriveConstants& c) {
    require_normalized(state);
    FastEnergy out;
    out.b_f = average_field(alpha0, beta0, c);
    out.value = spin_expectation(state).dot(out.b_f);
    return out;
}

double h0_expectation(double inertia) {
    if (!(inertia > 0)) throw std::invalid_argument("inertia must be positive");
    return 3.0 / (8.0 * inertia);
}

std::string to_string(StateMode m) { return m == StateMode::Fixed ? "fixed" : "ground"; }

std::array<Eigen::Vector3d, 2> slow_fields(double alpha, double beta, const DriveConstants& c, double omega) {
    detail::require_omega(omega);
    const auto g = field_gradient(alpha, beta, c);
    const double k = -pi / (8 * omega);
    return {k * g[0], k * g[1]};
}

double delta_e_slow(const StateSpec& state, const ParameterPath& path, const DriveConstants& c, double omega, int n,
                    double guard) {
    detail::require_omega(omega);
    if (state.mode == StateMode::Fixed) require_normalized(state.fixed);
    const Eigen::Vector3d fixed_s = spin_expectation(state.fixed);
    // Quadrature nodes can straddle an isolated zero; the trajectory guard also
    // catches zeros between samples.
    if (state.mode == StateMode::Ground) bloch_trajectory(path, c, n, {guard, omega, 1});

    const auto samples = sample_path(path, n);
    std::vector<int> panels(path.segments().size(), 0);
    for (std::size_t i = 1; i < samples.size(); ++i) ++panels[samples[i].segment];

    static constexpr std::array<double, 4> x = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                                0.8611363115940526};
    static constexpr std::array<double, 4> w = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                0.3478548451374538};
    std::vector<double> terms;
    for (std::size_t s = 0; s < panels.size(); ++s) {
        const auto& seg = path.segments()[s];
        const double t0 = seg.tau_begin, len = seg.tau_end - seg.tau_begin;
        const int k = panels[s];
        for (int p = 0; p < k; ++p) {
            const double u0 = static_cast<double>(p) / k, u1 = static_cast<double>(p + 1) / k;
            double panel = 0;
            for (int q = 0; q < 4; ++q) {
                const double u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * x[q];
                const double tau = t0 + len * u * u * (3 - 2 * u);
                const double jac = len * 6 * u * (1 - u);
                const Eigen::Vector2d pt = clamp_unit(seg.point(tau));
                const Eigen::Vector2d vel = seg.velocity(tau);
                const auto f = slow_fields(pt.x(), pt.y(), c, omega);
                Eigen::Vector3d s_exp = fixed_s;
                if (state.mode == StateMode::Ground) {
                    const auto b = synthetic_field(pt.x(), pt.y(), c);
                    if (b.magnitude < guard) throw NearDiabolical(tau, b.magnitude);
                    s_exp = 0.5 * b.b / b.magnitude;
                }
                panel += w[q] * s_exp.dot(f[0] * vel.x() + f[1] * vel.y()) * jac;
            }
            terms.push_back(0.5 * (u1 - u0) * panel);
        }
    }
    return pairwise_sum(std::move(terms));
}

AdiabaticCheck adiabatic_check(double fast, double slow) {
    AdiabaticCheck out;
    out.ratio = std::abs(slow) / std::max(std::abs(fast), adiabatic_ratio_floor);
    out.separated = out.ratio >= adiabatic_separation;
    return out;
}

AdiabaticReport analyze_path(const ParameterPath& path, const DriveConstants& c, double omega, int n,
                             const StateSpec& state, unsigned threads) {
    AdiabaticReport rep;
    TrajectoryOptions opt;
    opt.omega = omega;
    opt.threads = threads;
    rep.trajectory = bloch_trajectory(path, c, n, opt);
    rep.image_closed = rep.trajectory.closed_on_sphere();
    rep.crossings = invariant_crossings(path, n);
    if (rep.image_closed) {
        rep.berry_phase = berry_phase(rep.trajectory);
        rep.solid_angle = solid_angle(rep.trajectory);
        rep.self_intersections = self_intersections(rep.trajectory, threads);
        rep.loop_count = loop_count(path, rep.trajectory);
    }
    rep.state_mode = state.mode;
    const auto& first = rep.trajectory.samples.front();
    const Eigen::Vector2cd psi0 = state.mode == StateMode::Fixed ? state.fixed : first.spinor;
    rep.fast = delta_e_fast(psi0, first.alpha, first.beta, c);
    rep.delta_e_slow = delta_e_slow(state, path, c, omega, n);
    rep.check = adiabatic_check(rep.fast.value, rep.delta_e_slow);
    return rep;
}

}  // namespace stepfloq
