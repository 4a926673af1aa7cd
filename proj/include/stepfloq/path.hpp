#pragma once

// Piecewise-analytic paths tau -> (alpha(tau), beta(tau)) in the unit square.

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace stepfloq {

/// Scalar function of tau built from three kinds of terms, summed:
///   poly:   sum_k c_k tau^k
///   cosine: a cos(f tau + phase)
///   root:   s sqrt(max(0, q(tau))) with q a polynomial
/// Enough to write every catalog path exactly and to serialize paths as JSON.
struct PathComponent {
    struct Cosine {
        double amplitude = 0, frequency = 0, phase = 0;
    };
    struct Root {
        double scale = 0;
        std::vector<double> poly;
    };

    std::vector<double> poly;
    std::vector<Cosine> cosines;
    std::vector<Root> roots;

    static PathComponent constant(double c) { return PathComponent{{c}, {}, {}}; }
    static PathComponent polynomial(std::vector<double> coeffs) { return PathComponent{std::move(coeffs), {}, {}}; }

    double value(double tau) const;
    double derivative(double tau) const;

    /// g(tau) = f(c - tau).
    PathComponent reflected(double c) const;
};

struct PathSegment {
    double tau_begin = 0, tau_end = 1;
    PathComponent alpha, beta;

    Eigen::Vector2d point(double tau) const { return {alpha.value(tau), beta.value(tau)}; }
    Eigen::Vector2d velocity(double tau) const { return {alpha.derivative(tau), beta.derivative(tau)}; }
};

/// Ordered segments covering [tau_begin, tau_end] without gaps.
///
/// Joints must be continuous to 1e-12 and the image must stay inside the
/// unit square (points are clamped onto it to absorb rounding).
class ParameterPath {
public:
    ParameterPath(std::string name, std::vector<PathSegment> segments);

    const std::string& name() const noexcept { return name_; }
    const std::vector<PathSegment>& segments() const noexcept { return segments_; }
    double tau_begin() const { return segments_.front().tau_begin; }
    double tau_end() const { return segments_.back().tau_end; }
    bool closed() const noexcept { return closed_; }

    /// Index of the segment owning tau (a joint belongs to the earlier segment).
    std::size_t segment_index(double tau) const;
    Eigen::Vector2d point(double tau) const;
    Eigen::Vector2d velocity(double tau) const;

    /// Euclidean length in parameter space, by fine polyline.
    double length(int samples_per_segment = 4096) const;

    /// Same image traversed backwards over the same tau domain.
    ParameterPath reversed() const;

private:
    std::string name_;
    std::vector<PathSegment> segments_;
    bool closed_ = false;
};

/// Catalog: fig4a, fig4b, fig4c, fig5-long, fig5-short.
ParameterPath builtin_path(const std::string& name);
std::vector<std::string> builtin_path_names();

struct PathSample {
    double tau, alpha, beta;
    std::size_t segment;
};

/// n samples spread over segments in proportion to their tau-length, evenly
/// spaced within each segment, with every joint sampled exactly. For a closed
/// path the last sample repeats the first.
std::vector<PathSample> sample_path(const ParameterPath& path, int n);

}  // namespace stepfloq
