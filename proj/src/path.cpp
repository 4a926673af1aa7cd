#include "stepfloq/path.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stepfloq {

namespace {

double horner(const std::vector<double>& c, double x) {
    double v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    return v;
}

double horner_derivative(const std::vector<double>& c, double x) {
    double v = 0;
    for (std::size_t k = c.size(); k-- > 1;) v = v * x + static_cast<double>(k) * c[k];
    return v;
}

/// Coefficients of p(c - tau).
std::vector<double> reflect_poly(const std::vector<double>& p, double c) {
    std::vector<double> out(p.size(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
        // (c - tau)^k = sum_m C(k, m) c^(k-m) (-tau)^m
        double binom = 1;
        for (std::size_t m = 0; m <= k; ++m) {
            out[m] += p[k] * binom * std::pow(c, static_cast<double>(k - m)) * ((m % 2) ? -1.0 : 1.0);
            binom = binom * static_cast<double>(k - m) / static_cast<double>(m + 1);
        }
    }
    return out;
}

}  // namespace

double PathComponent::value(double tau) const {
    double v = horner(poly, tau);
    for (const auto& c : cosines) v += c.amplitude * std::cos(c.frequency * tau + c.phase);
    for (const auto& r : roots) v += r.scale * std::sqrt(std::max(0.0, horner(r.poly, tau)));
    return v;
}

double PathComponent::derivative(double tau) const {
    double v = horner_derivative(poly, tau);
    for (const auto& c : cosines) v -= c.amplitude * c.frequency * std::sin(c.frequency * tau + c.phase);
    for (const auto& r : roots) {
        const double q = std::max(0.0, horner(r.poly, tau));
        const double dq = horner_derivative(r.poly, tau);
        if (r.scale == 0 || dq == 0) continue;
        v += q > 0 ? r.scale * dq / (2 * std::sqrt(q)) : std::copysign(HUGE_VAL, r.scale * dq);
    }
    return v;
}

PathComponent PathComponent::reflected(double c) const {
    PathComponent out;
    out.poly = reflect_poly(poly, c);
    for (const auto& cs : cosines) out.cosines.push_back({cs.amplitude, -cs.frequency, cs.frequency * c + cs.phase});
    for (const auto& r : roots) out.roots.push_back({r.scale, reflect_poly(r.poly, c)});
    return out;
}

ParameterPath::ParameterPath(std::string name, std::vector<PathSegment> segments)
    : name_(std::move(name)), segments_(std::move(segments)) {
    if (segments_.empty()) throw std::invalid_argument("ParameterPath: no segments");
    constexpr double eps = 1e-12;
    for (std::size_t s = 0; s < segments_.size(); ++s) {
        const auto& seg = segments_[s];
        if (!(seg.tau_end > seg.tau_begin)) throw std::invalid_argument("ParameterPath: empty segment tau range");
        if (s > 0) {
            const auto& prev = segments_[s - 1];
            if (prev.tau_end != seg.tau_begin) throw std::invalid_argument("ParameterPath: segments leave a tau gap");
            if ((prev.point(prev.tau_end) - seg.point(seg.tau_begin)).norm() > eps)
                throw std::invalid_argument("ParameterPath: discontinuous joint at tau = " +
                                            std::to_string(seg.tau_begin));
        }
        constexpr int probes = 256;
        for (int k = 0; k <= probes; ++k) {
            const double t = seg.tau_begin + (seg.tau_end - seg.tau_begin) * k / probes;
            const auto p = seg.point(t);
            if (!std::isfinite(p.x()) || !std::isfinite(p.y()) || p.x() < -eps || p.x() > 1 + eps ||
                p.y() < -eps || p.y() > 1 + eps)
                throw std::invalid_argument("ParameterPath: image leaves the unit square at tau = " +
                                            std::to_string(t));
        }
    }
    closed_ = (segments_.front().point(tau_begin()) - segments_.back().point(tau_end())).norm() <= eps;
}

std::size_t ParameterPath::segment_index(double tau) const {
    if (tau < tau_begin() || tau > tau_end()) throw std::out_of_range("ParameterPath: tau outside the domain");
    for (std::size_t s = 0; s < segments_.size(); ++s)
        if (tau <= segments_[s].tau_end) return s;
    return segments_.size() - 1;
}

Eigen::Vector2d ParameterPath::point(double tau) const {
    return segments_[segment_index(tau)].point(tau).cwiseMax(0.0).cwiseMin(1.0);
}

Eigen::Vector2d ParameterPath::velocity(double tau) const { return segments_[segment_index(tau)].velocity(tau); }

double ParameterPath::length(int samples_per_segment) const {
    double total = 0;
    for (const auto& seg : segments_) {
        Eigen::Vector2d prev = seg.point(seg.tau_begin);
        for (int k = 1; k <= samples_per_segment; ++k) {
            const auto p = seg.point(seg.tau_begin + (seg.tau_end - seg.tau_begin) * k / samples_per_segment);
            total += (p - prev).norm();
            prev = p;
        }
    }
    return total;
}

ParameterPath ParameterPath::reversed() const {
    const double c = tau_begin() + tau_end();
    std::vector<PathSegment> rev;
    for (auto it = segments_.rbegin(); it != segments_.rend(); ++it)
        rev.push_back({c - it->tau_end, c - it->tau_begin, it->alpha.reflected(c), it->beta.reflected(c)});
    // Keep joints bit-identical to the forward path's so continuity survives rounding.
    for (std::size_t s = 1; s < rev.size(); ++s) rev[s].tau_begin = rev[s - 1].tau_end;
    return ParameterPath(name_ + "-reversed", std::move(rev));
}

namespace {

PathSegment circle(double cx, double cy, double r) {
    const double w = 2 * std::numbers::pi;
    PathSegment s;
    s.tau_begin = 0;
    s.tau_end = 1;
    s.alpha = PathComponent{{cx}, {{r, w, 0.0}}, {}};
    s.beta = PathComponent{{cy}, {{r, w, -std::numbers::pi / 2}}, {}};  // r sin(w tau)
    return s;
}

}  // namespace

std::vector<std::string> builtin_path_names() { return {"fig4a", "fig4b", "fig4c", "fig5-long", "fig5-short"}; }

ParameterPath builtin_path(const std::string& name) {
    using P = PathComponent;
    if (name == "fig4a") {
        // (1 - 2t, 1/2), (1/2, 1 - 2t), (t, 1/2 - sqrt(t - t^2))
        return ParameterPath(name, {{0.0, 0.25, P::polynomial({1, -2}), P::constant(0.5)},
                                    {0.25, 0.5, P::constant(0.5), P::polynomial({1, -2})},
                                    {0.5, 1.0, P::polynomial({0, 1}), P{{0.5}, {}, {{-1.0, {0, 1, -1}}}}}});
    }
    if (name == "fig4b") return ParameterPath(name, {circle(0.5, 0.5, 0.5)});
    if (name == "fig4c") {
        return ParameterPath(name, {{0.25, 0.4, P::polynomial({0, 1}), P::polynomial({-1, 5})},
                                    {0.4, 0.6, P::polynomial({0, 1}), P::polynomial({7, -25, 25})},
                                    {0.6, 0.75, P::polynomial({0, 1}), P::polynomial({2, -5.0 / 3.0})}});
    }
    // Two concentric circles centred 0.1414 from the diagonal: the longer one
    // dips across alpha = beta, the shorter one stays clear of every invariant
    // segment. Radii differ by 5%.
    if (name == "fig5-long") return ParameterPath(name, {circle(0.6, 0.4, 0.145)});
    if (name == "fig5-short") return ParameterPath(name, {circle(0.6, 0.4, 0.138)});
    throw std::invalid_argument("unknown builtin path: " + name);
}

std::vector<PathSample> sample_path(const ParameterPath& path, int n) {
    if (n < 2) throw std::invalid_argument("sample_path: need at least 2 samples");
    const auto& segs = path.segments();
    const int intervals = n - 1;
    if (intervals < static_cast<int>(segs.size()))
        throw std::invalid_argument("sample_path: fewer intervals than segments, joints cannot all be sampled");

    const double total = path.tau_end() - path.tau_begin();
    std::vector<int> alloc(segs.size());
    std::vector<double> ideal(segs.size());
    int used = 0;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        ideal[s] = intervals * (segs[s].tau_end - segs[s].tau_begin) / total;
        alloc[s] = std::max(1, static_cast<int>(std::floor(ideal[s])));
        used += alloc[s];
    }
    while (used < intervals) {
        std::size_t best = 0;
        for (std::size_t s = 1; s < segs.size(); ++s)
            if (ideal[s] - alloc[s] > ideal[best] - alloc[best]) best = s;
        ++alloc[best];
        ++used;
    }
    while (used > intervals) {
        std::size_t best = segs.size();
        for (std::size_t s = 0; s < segs.size(); ++s)
            if (alloc[s] > 1 && (best == segs.size() || ideal[s] - alloc[s] < ideal[best] - alloc[best])) best = s;
        --alloc[best];
        --used;
    }

    std::vector<PathSample> out;
    out.reserve(n);
    for (std::size_t s = 0; s < segs.size(); ++s) {
        const auto& seg = segs[s];
        for (int i = (s == 0 ? 0 : 1); i <= alloc[s]; ++i) {
            const double tau =
                i == alloc[s] ? seg.tau_end : seg.tau_begin + (seg.tau_end - seg.tau_begin) * i / alloc[s];
            const Eigen::Vector2d p = seg.point(tau).cwiseMax(0.0).cwiseMin(1.0);
            out.push_back({tau, p.x(), p.y(), s});
        }
    }
    if (path.closed()) {
        out.back().alpha = out.front().alpha;
        out.back().beta = out.front().beta;
    }
    return out;
}

}  // namespace stepfloq
