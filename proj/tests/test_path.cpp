#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "stepfloq/config.hpp"
#include "stepfloq/errors.hpp"
#include "stepfloq/path.hpp"

using namespace stepfloq;
using Eigen::Vector2d;

namespace {

constexpr double pi = std::numbers::pi;

bool near(const Vector2d& a, const Vector2d& b, double tol = 1e-12) { return (a - b).norm() <= tol; }

}  // namespace

TEST_CASE("path components evaluate every term kind") {
    PathComponent f{{1, 2, 3}, {{0.5, 2, 0.25}}, {{2, {1, -1}}}};
    const double t = 0.3;
    const double want = 1 + 2 * t + 3 * t * t + 0.5 * std::cos(2 * t + 0.25) + 2 * std::sqrt(1 - t);
    CHECK(f.value(t) == doctest::Approx(want).epsilon(1e-15));
    const double h = 1e-6;
    CHECK(f.derivative(t) == doctest::Approx((f.value(t + h) - f.value(t - h)) / (2 * h)).epsilon(1e-8));

    const auto g = f.reflected(1.2);
    for (double x : {0.1, 0.4, 0.9}) CHECK(g.value(x) == doctest::Approx(f.value(1.2 - x)).epsilon(1e-13));
}

TEST_CASE("builtin catalog") {
    for (const auto& name : builtin_path_names()) {
        const auto p = builtin_path(name);
        CHECK(p.name() == name);
        CHECK(p.closed() == (name != "fig4c"));
    }
    CHECK_THROWS_AS(builtin_path("fig9"), std::invalid_argument);

    const auto b = builtin_path("fig4b");
    CHECK(near(b.point(0), {1, 0.5}));
    CHECK(near(b.point(0.25), {0.5, 1}));

    const auto c = builtin_path("fig4c");
    CHECK(c.tau_begin() == 0.25);
    CHECK(c.tau_end() == 0.75);
    CHECK(near(c.point(0.25), {0.25, 0.25}));
    CHECK(near(c.point(0.75), {0.75, 0.75}));
    CHECK(near(c.point(0.4), {0.4, 1.0}));
    CHECK(near(c.point(0.6), {0.6, 1.0}));

    const auto a = builtin_path("fig4a");
    CHECK(near(a.point(0), {1, 0.5}));
    CHECK(near(a.point(0.25), {0.5, 0.5}));
    CHECK(near(a.point(0.5), {0.5, 0}));
    CHECK(near(a.point(0.75), {0.75, 0.5 - std::sqrt(0.75 * 0.25)}));
    CHECK(near(a.point(1), {1, 0.5}));
}

TEST_CASE("fig5 variants differ slightly in length") {
    const double l1 = builtin_path("fig5-long").length();
    const double l2 = builtin_path("fig5-short").length();
    CHECK(l1 > l2);
    CHECK((l1 - l2) / l1 < 0.1);
    CHECK(l1 == doctest::Approx(2 * pi * 0.145).epsilon(1e-6));
}

TEST_CASE("segment ownership at joints") {
    const auto a = builtin_path("fig4a");
    CHECK(a.segment_index(0.0) == 0);
    CHECK(a.segment_index(0.25) == 0);
    CHECK(a.segment_index(0.2500001) == 1);
    CHECK(a.segment_index(1.0) == 2);
    CHECK_THROWS(a.segment_index(1.5));
    CHECK(near(a.velocity(0.1), {-2, 0}));
}

TEST_CASE("sample_path examples") {
    const auto b = builtin_path("fig4b");
    const auto s = sample_path(b, 5);
    REQUIRE(s.size() == 5);
    for (int k = 0; k < 5; ++k) {
        const double t = k / 4.0;
        CHECK(s[k].tau == doctest::Approx(t));
        CHECK(near({s[k].alpha, s[k].beta}, {0.5 + 0.5 * std::cos(2 * pi * t), 0.5 + 0.5 * std::sin(2 * pi * t)}));
    }
    CHECK(s.front().alpha == s.back().alpha);
    CHECK(s.front().beta == s.back().beta);

    const auto a = sample_path(builtin_path("fig4a"), 101);
    REQUIRE(a.size() == 101);
    bool has_center = false, has_bottom = false;
    for (const auto& x : a) {
        has_center = has_center || (x.alpha == 0.5 && x.beta == 0.5);
        has_bottom = has_bottom || (x.alpha == 0.5 && x.beta == 0.0);
    }
    CHECK(has_center);
    CHECK(has_bottom);
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i].tau > a[i - 1].tau);

    CHECK_THROWS(sample_path(builtin_path("fig4a"), 3));
    CHECK_THROWS(sample_path(b, 1));
}

TEST_CASE("reversal retraces the image") {
    for (const auto& name : builtin_path_names()) {
        const auto p = builtin_path(name);
        const auto r = p.reversed();
        CHECK(r.closed() == p.closed());
        const double c = p.tau_begin() + p.tau_end();
        for (int k = 0; k <= 20; ++k) {
            const double t = p.tau_begin() + (p.tau_end() - p.tau_begin()) * k / 20;
            CHECK(near(r.point(c - t), p.point(t), 1e-12));
        }
    }
}

TEST_CASE("path validation") {
    using P = PathComponent;
    CHECK_THROWS(ParameterPath("x", {}));
    // gap in tau
    CHECK_THROWS(ParameterPath("x", {{0, 0.4, P::constant(0.5), P::polynomial({0, 1})},
                                     {0.5, 1, P::constant(0.5), P::polynomial({0, 1})}}));
    // jump at the joint
    CHECK_THROWS(ParameterPath("x", {{0, 0.5, P::constant(0.5), P::polynomial({0, 1})},
                                     {0.5, 1, P::constant(0.6), P::polynomial({0, 1})}}));
    // leaves the square
    CHECK_THROWS(ParameterPath("x", {{0, 1, P::polynomial({0, 2}), P::constant(0.5)}}));
    // empty range
    CHECK_THROWS(ParameterPath("x", {{0.5, 0.5, P::constant(0.5), P::constant(0.5)}}));

    const ParameterPath ok("line", {{0, 1, P::polynomial({0, 1}), P::polynomial({0, 1})}});
    CHECK_FALSE(ok.closed());
    CHECK(ok.length() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("path JSON round trip") {
    const auto p = parse_path_json(R"({"segments": [
        {"tau": [0, 0.5], "alpha": {"poly": [0.5]}, "beta": {"poly": [0, 2]}},
        {"tau": [0.5, 1], "alpha": {"poly": [0.5], "cos": [[0.1, 3.141592653589793, 0.0]]},
         "beta": {"poly": [1], "sqrt": [[0.0, [1]]]}}]})");
    CHECK(p.segments().size() == 2);
    CHECK(near(p.point(0.25), {0.5, 0.5}));
    CHECK_THROWS_AS(parse_path_json(R"({"segments": [{"tau": [0, 1]}]})"), ConfigError);
}
