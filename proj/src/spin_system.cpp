#include "stepfloq/spin_system.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "stepfloq/parallel.hpp"

namespace stepfloq {

DriveConstants::DriveConstants(double a, double b, double c, double d) : c1(a), c2(b), c3(c), c4(d) {
    for (double x : as_array())
        if (!std::isfinite(x)) throw std::invalid_argument("DriveConstants: constants must be finite");
}

std::array<HermitianOperatord, 4> spin_potentials(const DriveConstants& c) {
    const auto s = spin_half_operators<double>();
    return {c.c1 * s.x - c.c2 * s.y, c.c2 * s.y + c.c3 * s.z, c.c4 * s.z - c.c1 * s.x, -(c.c3 + c.c4) * s.z};
}

StepProtocold spin_protocol(double alpha, double beta, const DriveConstants& c) {
    const auto v = spin_potentials(c);
    return four_step_protocol(alpha, beta, v[0], v[1], v[2], v[3]);
}

HermitianOperatord spin_h0(double inertia) {
    if (!(inertia > 0)) throw std::invalid_argument("inertia must be positive");
    return (0.75 / (2.0 * inertia)) * HermitianOperatord::identity(2);
}

HermitianOperatord spin_dot(const Eigen::Vector3d& v) {
    const auto s = spin_half_operators<double>();
    return HermitianOperatord(ComplexMatrixd(v.x() * s.x.matrix() + v.y() * s.y.matrix() + v.z() * s.z.matrix()));
}

Eigen::Vector3d spin_components(const ComplexMatrixd& m) {
    if (m.rows() != 2 || m.cols() != 2) throw DimensionMismatch("spin_components: expected a 2x2 matrix");
    const auto s = spin_half_operators<double>();
    // tr(S_i S_j) = delta_ij / 2
    return {2.0 * (m * s.x.matrix()).trace().real(), 2.0 * (m * s.y.matrix()).trace().real(),
            2.0 * (m * s.z.matrix()).trace().real()};
}

Eigen::Vector3d field_from_weights(const CommutatorWeights<double>& p, const DriveConstants& c) {
    const double bx = c.c2 * c.c3 * (-p.p12 + p.p14 - p.p24) + c.c2 * c.c4 * (-p.p13 + p.p23 - p.p24 + p.p14);
    const double by = c.c1 * c.c3 * (-p.p12 + p.p14 - p.p34 - p.p23) + c.c1 * c.c4 * (-p.p13 - p.p34 + p.p14);
    const double bz = c.c1 * c.c2 * (p.p12 - p.p13 + p.p23);
    return {bx, by, bz};
}

SyntheticField synthetic_field(double alpha, double beta, const DriveConstants& c) {
    return SyntheticField(field_from_weights(p_polynomials(alpha, beta), c));
}

Eigen::Vector3d unit_constants_field(double a, double b) {
    return {-6 * a * a * b + 5 * a * a + 6 * a * b * b - 5 * a - 3 * b * b + 3 * b,
            -2 * a * a * b + 3 * a * a + 2 * a * b * b - 3 * a + 3 * b * b - 3 * b,
            -2 * a * a * b - a * a + 2 * a * b * b + a - b * b + b};
}

std::array<Eigen::Vector3d, 2> field_gradient(double alpha, double beta, const DriveConstants& c) {
    const auto g = p_polynomial_gradients(alpha, beta);
    return {field_from_weights(g[0], c), field_from_weights(g[1], c)};
}

SyntheticField kick_field(double alpha, double beta, const DriveConstants& c) {
    const auto q = q_polynomials(alpha, beta);
    return SyntheticField(Eigen::Vector3d(c.c1 * (q.q1 - q.q3), c.c2 * (q.q2 - q.q1),
                                          c.c3 * q.q2 + c.c4 * q.q3 - (c.c3 + c.c4) * q.q4));
}

SyntheticField field_0101(double a, double b) {
    detail::require_unit(a, "alpha");
    detail::require_unit(b, "beta");
    const double bx = -2 * a + 2 * a * a + 2 * b - 4 * a * a * b - 2 * b * b + 4 * a * b * b;
    return SyntheticField(Eigen::Vector3d(bx, 0, 0));
}

SpinSpectrum spectrum(double alpha, double beta, const DriveConstants& c, double omega, double inertia,
                      Averaging averaging) {
    if (!(omega > 0)) throw std::invalid_argument("omega must be positive");
    const auto model = h_eff_paper(spin_h0(inertia), spin_protocol(alpha, beta, c), omega, averaging);
    const auto values = hermitian_eigensystem(model.h_eff).values;
    return {values(0), values(1)};
}

BandSurface band_surface(const DriveConstants& c, int resolution, double omega, double inertia, unsigned threads,
                         Averaging averaging) {
    if (resolution < 2) throw std::invalid_argument("band_surface: resolution must be at least 2");
    BandSurface out;
    out.resolution = resolution;
    out.nodes.resize(static_cast<std::size_t>(resolution) * resolution);
    const double h = 1.0 / (resolution - 1);
    parallel_for(static_cast<std::size_t>(resolution), threads, [&](std::size_t i) {
        const double a = i == static_cast<std::size_t>(resolution - 1) ? 1.0 : i * h;
        for (int j = 0; j < resolution; ++j) {
            const double b = j == resolution - 1 ? 1.0 : j * h;
            const auto e = spectrum(a, b, c, omega, inertia, averaging);
            out.nodes[i * resolution + j] = {a, b, e.e_minus, e.e_plus, synthetic_field(a, b, c).magnitude};
        }
    });
    return out;
}

Eigen::Vector2d refine_field_zero(const DriveConstants& c, Eigen::Vector2d x, const Eigen::Vector2d& lo,
                                  const Eigen::Vector2d& hi, int max_iter) {
    auto residual = [&](const Eigen::Vector2d& p) { return field_from_weights(p_polynomials(p.x(), p.y()), c); };
    Eigen::Vector3d r = residual(x);
    double lambda = 1e-3;
    for (int it = 0; it < max_iter && r.norm() > 1e-16; ++it) {
        const auto g = field_gradient(x.x(), x.y(), c);
        Eigen::Matrix<double, 3, 2> jac;
        jac.col(0) = g[0];
        jac.col(1) = g[1];
        const Eigen::Matrix2d jtj = jac.transpose() * jac;
        const Eigen::Vector2d jtr = jac.transpose() * r;
        bool improved = false;
        for (int tries = 0; tries < 30; ++tries) {
            const Eigen::Matrix2d damped = jtj + lambda * Eigen::Matrix2d::Identity() * std::max(1e-12, jtj.trace());
            const Eigen::Vector2d step = damped.ldlt().solve(-jtr);
            const Eigen::Vector2d trial = x.cwiseMax(lo).cwiseMin(hi) + step;
            const Eigen::Vector2d projected = trial.cwiseMax(lo).cwiseMin(hi);
            const Eigen::Vector3d rt = residual(projected);
            if (rt.norm() < r.norm()) {
                const double moved = (projected - x).norm();
                x = projected;
                r = rt;
                lambda = std::max(lambda / 3.0, 1e-12);
                improved = moved > 1e-17;
                break;
            }
            lambda *= 4.0;
        }
        if (!improved) break;
    }
    return x;
}

namespace {

constexpr std::array<std::array<double, 2>, 4> corners = {{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};

int corner_index(const Eigen::Vector2d& p, double eps) {
    for (int k = 0; k < 4; ++k)
        if (std::abs(p.x() - corners[k][0]) <= eps && std::abs(p.y() - corners[k][1]) <= eps) return k;
    return -1;
}

std::vector<Eigen::Vector2d> chain_polyline(std::vector<Eigen::Vector2d> pts) {
    // Deduplicate, then walk nearest neighbours from the point farthest from the centroid.
    std::vector<Eigen::Vector2d> unique;
    for (const auto& p : pts) {
        bool dup = false;
        for (const auto& q : unique)
            if ((p - q).norm() <= 1e-9) {
                dup = true;
                break;
            }
        if (!dup) unique.push_back(p);
    }
    if (unique.size() <= 2) return unique;
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& p : unique) centroid += p;
    centroid /= static_cast<double>(unique.size());
    std::size_t start = 0;
    for (std::size_t k = 1; k < unique.size(); ++k)
        if ((unique[k] - centroid).norm() > (unique[start] - centroid).norm()) start = k;

    std::vector<Eigen::Vector2d> ordered{unique[start]};
    std::vector<bool> used(unique.size(), false);
    used[start] = true;
    for (std::size_t n = 1; n < unique.size(); ++n) {
        std::size_t best = unique.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < unique.size(); ++k) {
            if (used[k]) continue;
            const double d = (unique[k] - ordered.back()).norm();
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        used[best] = true;
        ordered.push_back(unique[best]);
    }
    return ordered;
}

}  // namespace

DiabolicalScan diabolical_scan(const DriveConstants& c, int grid_n, double tol, unsigned threads) {
    if (grid_n < 16) throw std::invalid_argument("diabolical_scan: grid_n must be at least 16");
    DiabolicalScan out;
    for (const auto& k : corners)
        out.points.push_back({k[0], k[1], synthetic_field(k[0], k[1], c).magnitude, true});

    const double h = 1.0 / (grid_n - 1);
    auto node = [&](int i) { return i == grid_n - 1 ? 1.0 : i * h; };

    double max_node = 0;
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j) max_node = std::max(max_node, synthetic_field(node(i), node(j), c).magnitude);
    if (max_node <= tol) {
        out.degenerate_everywhere = true;
        return out;
    }

    const int cells = grid_n - 1;
    std::vector<char> zero(static_cast<std::size_t>(cells) * cells, 0);
    std::vector<Eigen::Vector2d> found(zero.size());
    std::vector<double> found_mag(zero.size(), 0);
    parallel_for(static_cast<std::size_t>(cells), threads, [&](std::size_t i) {
        for (int j = 0; j < cells; ++j) {
            const Eigen::Vector2d lo(node(static_cast<int>(i)), node(j));
            const Eigen::Vector2d hi(node(static_cast<int>(i) + 1), node(j + 1));
            const Eigen::Vector2d z = refine_field_zero(c, 0.5 * (lo + hi), lo, hi);
            const double m = synthetic_field(z.x(), z.y(), c).magnitude;
            const std::size_t idx = i * cells + j;
            found[idx] = z;
            found_mag[idx] = m;
            zero[idx] = m < tol ? 1 : 0;
        }
    });

    // 8-connected components of zero cells, discovered in row-major order.
    std::vector<int> label(zero.size(), -1);
    int next_curve = 0;
    for (int i0 = 0; i0 < cells; ++i0)
        for (int j0 = 0; j0 < cells; ++j0) {
            const std::size_t start = static_cast<std::size_t>(i0) * cells + j0;
            if (!zero[start] || label[start] >= 0) continue;
            std::vector<std::size_t> members;
            std::deque<std::size_t> queue{start};
            label[start] = 0;
            while (!queue.empty()) {
                const std::size_t cur = queue.front();
                queue.pop_front();
                members.push_back(cur);
                const int ci = static_cast<int>(cur / cells), cj = static_cast<int>(cur % cells);
                for (int di = -1; di <= 1; ++di)
                    for (int dj = -1; dj <= 1; ++dj) {
                        const int ni = ci + di, nj = cj + dj;
                        if (ni < 0 || nj < 0 || ni >= cells || nj >= cells) continue;
                        const std::size_t nb = static_cast<std::size_t>(ni) * cells + nj;
                        if (zero[nb] && label[nb] < 0) {
                            label[nb] = 0;
                            queue.push_back(nb);
                        }
                    }
            }
            int imin = cells, imax = -1, jmin = cells, jmax = -1;
            for (auto m : members) {
                const int ci = static_cast<int>(m / cells), cj = static_cast<int>(m % cells);
                imin = std::min(imin, ci);
                imax = std::max(imax, ci);
                jmin = std::min(jmin, cj);
                jmax = std::max(jmax, cj);
            }
            if (std::max(imax - imin, jmax - jmin) >= 2) {
                std::vector<Eigen::Vector2d> pts;
                for (auto m : members) pts.push_back(found[m]);
                out.loci.push_back({next_curve++, chain_polyline(std::move(pts))});
            } else {
                std::size_t best = members.front();
                for (auto m : members)
                    if (found_mag[m] < found_mag[best]) best = m;
                const Eigen::Vector2d p = found[best];
                if (corner_index(p, 1e-6) >= 0) continue;  // already listed
                out.points.push_back({p.x(), p.y(), found_mag[best], false});
            }
        }
    return out;
}

FieldMaximum max_field(const DriveConstants& c, int seed_grid) {
    if (seed_grid < 2) throw std::invalid_argument("max_field: seed grid must be at least 2");
    auto mag2 = [&](double a, double b) {
        a = std::clamp(a, 0.0, 1.0);
        b = std::clamp(b, 0.0, 1.0);
        return synthetic_field(a, b, c).b.squaredNorm();
    };
    const double h = 1.0 / (seed_grid - 1);
    double best_a = 0, best_b = 0, best = -1;
    for (int i = 0; i < seed_grid; ++i)
        for (int j = 0; j < seed_grid; ++j) {
            const double a = std::min(1.0, i * h), b = std::min(1.0, j * h);
            const double v = mag2(a, b);
            if (v > best) {
                best = v;
                best_a = a;
                best_b = b;
            }
        }
    // Compass search on the box, halving the stencil whenever the centre wins.
    for (double step = h; step > 1e-13;) {
        double cand_a = best_a, cand_b = best_b, cand = best;
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
                if (di == 0 && dj == 0) continue;
                const double a = std::clamp(best_a + di * step, 0.0, 1.0);
                const double b = std::clamp(best_b + dj * step, 0.0, 1.0);
                const double v = mag2(a, b);
                if (v > cand) {
                    cand = v;
                    cand_a = a;
                    cand_b = b;
                }
            }
        if (cand > best) {
            best = cand;
            best_a = cand_a;
            best_b = cand_b;
        } else {
            step *= 0.5;
        }
    }
    return {best_a, best_b, std::sqrt(best)};
}

std::string to_string(InvariantSegment s) {
    switch (s) {
        case InvariantSegment::AlphaZero: return "alpha=0";
        case InvariantSegment::AlphaOne: return "alpha=1";
        case InvariantSegment::BetaZero: return "beta=0";
        case InvariantSegment::BetaOne: return "beta=1";
        case InvariantSegment::Diagonal: return "alpha=beta";
    }
    return "unknown";
}

Eigen::Vector2d segment_point(InvariantSegment seg, double s) {
    switch (seg) {
        case InvariantSegment::AlphaZero: return {0, s};
        case InvariantSegment::AlphaOne: return {1, s};
        case InvariantSegment::BetaZero: return {s, 0};
        case InvariantSegment::BetaOne: return {s, 1};
        case InvariantSegment::Diagonal: return {s, s};
    }
    return {0, 0};
}

std::vector<SegmentDirection> invariant_segments(const DriveConstants& c, int samples, double tolerance) {
    if (samples < 3) throw std::invalid_argument("invariant_segments: need at least 3 samples");
    std::vector<SegmentDirection> out;
    for (auto seg : all_invariant_segments) {
        SegmentDirection d;
        d.segment = seg;
        std::vector<double> s(samples), mag(samples);
        std::vector<Eigen::Vector3d> field(samples);
        double max_mag = 0;
        for (int k = 0; k < samples; ++k) {
            s[k] = (k + 1.0) / (samples + 1.0);
            const auto p = segment_point(seg, s[k]);
            field[k] = synthetic_field(p.x(), p.y(), c).b;
            mag[k] = field[k].norm();
            max_mag = std::max(max_mag, mag[k]);
        }
        if (max_mag <= 1e-12) {
            d.zero_field = true;
            out.push_back(d);
            continue;
        }
        const Eigen::Vector3d ref = field[samples / 2].normalized();
        for (int k = 0; k < samples; ++k) {
            if (mag[k] == 0) {
                d.max_angular_deviation = std::numbers::pi;
                continue;
            }
            const Eigen::Vector3d n = field[k] / mag[k];
            d.max_angular_deviation = std::max(d.max_angular_deviation, std::atan2(n.cross(ref).norm(), n.dot(ref)));
        }
        if (d.max_angular_deviation > tolerance)
            throw DirectionNotInvariant("field direction varies along segment " + to_string(seg));
        d.direction = ref;

        double num = 0, den = 0;
        for (int k = 0; k < samples; ++k) {
            const double q = s[k] * (1 - s[k]);
            num += mag[k] * q;
            den += q * q;
        }
        d.profile_scale = num / den;
        for (int k = 0; k < samples; ++k)
            d.profile_residual = std::max(d.profile_residual, std::abs(mag[k] - d.profile_scale * s[k] * (1 - s[k])));
        out.push_back(d);
    }
    return out;
}

}  // namespace stepfloq
