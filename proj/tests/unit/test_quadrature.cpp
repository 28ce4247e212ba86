#include <doctest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "stagpoint/quadrature.hpp"

using namespace stagpoint;
using oracle::pi;

TEST_SUITE("quadrature") {

TEST_CASE("spec validation") {
    QuadratureSpec s;
    CHECK_NOTHROW(s.validate());
    s.circle_nodes = 15;
    CHECK_THROWS_AS(s.validate(), InvalidSpec);
    s = {};
    s.circle_nodes = 18;
    CHECK_NOTHROW(s.validate());
    s.cutoff_fraction = 0.2;
    CHECK_THROWS_AS(s.validate(), InvalidSpec);
    s.cutoff_fraction = 0.0;
    CHECK_THROWS_AS(s.validate(), InvalidSpec);
}

TEST_CASE("angular counts are aligned to multiples of 24") {
    CHECK(aligned_angular_nodes(16) == 24);
    CHECK(aligned_angular_nodes(512) % 24 == 0);
    CHECK(aligned_angular_nodes(512) >= 512);
    const QuadratureSpec s;
    CHECK(circle_node_count(s, true) >= 2 * s.circle_nodes);
    CHECK(circle_node_count(s, true) % 24 == 0);
}

TEST_CASE("circle length and a weighted polynomial") {
    const QuadratureSpec s;
    CHECK(circle_integral([](Point2) { return 1.0; }, {1, 0}, 0.5, s) == doctest::Approx(pi).epsilon(1e-12));
    // psi = x^2, g = psi^2 / x = x^3: 2 pi r (x0^3 + 3/2 x0 r^2).
    const double r = 0.25;
    const double exact = 2 * pi * r * (1.0 + 1.5 * r * r);
    const double got = circle_integral([](Point2 p) { return p.x * p.x * p.x; }, {1, 0}, r, s);
    CHECK(got == doctest::Approx(exact).epsilon(1e-13));
    CHECK(got == doctest::Approx(1.7181).epsilon(1e-4));
}

TEST_CASE("disk area, half-disk and wedge densities") {
    const QuadratureSpec s;
    CHECK(disk_integral([](Point2) { return 1.0; }, {1, 0}, 1.0, s) == doctest::Approx(pi).epsilon(1e-12));
    // The kink of y+ on the axis costs O(dtheta^2) on the aligned rule.
    auto yplus = [](Point2 p) { return p.y > 0 ? p.y : 0.0; };
    CHECK(disk_integral(yplus, {1, 0}, 1.0, s, true) == doctest::Approx(2.0 / 3).epsilon(1e-5));
    CHECK(disk_integral(yplus, {1, 0}, 1.0, s.refined(4), true) == doctest::Approx(2.0 / 3).epsilon(1e-6));
    auto wedge = [](Point2 p) {
        const double th = std::atan2(p.y, p.x - 1.0);
        return (th > pi / 6 && th < 5 * pi / 6) ? p.y : 0.0;
    };
    CHECK(disk_integral(wedge, {1, 0}, 1.0, s, true) == doctest::Approx(std::sqrt(3.0) / 3).epsilon(1e-5));
}

TEST_CASE("divergence theorem on polynomial fields") {
    const QuadratureSpec s;
    // v = (x^2 y, x y^3 + y), div v = 2xy + 3xy^2 + 1.
    auto div = [](Point2 p) { return 2 * p.x * p.y + 3 * p.x * p.y * p.y + 1.0; };
    for (Point2 c : {Point2{1, 0}, Point2{2, 0.5}})
        for (double r : {0.1, 0.5, 0.9}) {
            auto flux = [c](Point2 p) {
                const double nx = p.x - c.x, ny = p.y - c.y, n = std::hypot(nx, ny);
                return (p.x * p.x * p.y * nx + (p.x * p.y * p.y * p.y + p.y) * ny) / n;
            };
            const double lhs = disk_integral(div, c, r, s);
            const double rhs = circle_integral(flux, c, r, s);
            CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(lhs)));
        }
}

TEST_CASE("linearity and sector additivity") {
    const QuadratureSpec s;
    auto g = [](Point2 p) { return std::exp(p.x) * std::cos(p.y); };
    auto h = [](Point2 p) { return p.x * p.y * p.y; };
    auto sector = [](Point2 p) { return std::atan2(p.y, p.x - 1.0) > 0.3 ? 1.0 : 0.0; };
    const Point2 c{1, 0};
    const double lin = disk_integral([&](Point2 p) { return 2 * g(p) - 3 * h(p); }, c, 0.7, s);
    CHECK(lin == doctest::Approx(2 * disk_integral(g, c, 0.7, s) - 3 * disk_integral(h, c, 0.7, s)).epsilon(1e-13));
    const double in = circle_integral([&](Point2 p) { return g(p) * sector(p); }, c, 0.7, s);
    const double out = circle_integral([&](Point2 p) { return g(p) * (1 - sector(p)); }, c, 0.7, s);
    CHECK(in + out == doctest::Approx(circle_integral(g, c, 0.7, s)).epsilon(1e-13));
}

TEST_CASE("doubling nodes changes smooth results by at most 1e-10") {
    const QuadratureSpec s;
    const QuadratureSpec s2 = s.refined(2);
    auto g = [](Point2 p) { return std::exp(p.x) * std::sin(p.y + 0.3) / p.x; };
    const Point2 c{1.2, 0.1};
    const double a = circle_integral(g, c, 0.6, s), b = circle_integral(g, c, 0.6, s2);
    CHECK(std::abs(a - b) <= 1e-10 * std::abs(b));
    const double d1 = disk_integral(g, c, 0.6, s), d2 = disk_integral(g, c, 0.6, s2);
    CHECK(std::abs(d1 - d2) <= 1e-10 * std::abs(d2));
}

TEST_CASE("a jump off the node alignment converges at first order") {
    // Indicator of {y > 0} on circles whose center sits above the axis: arc length r (pi + 2 asin(c / r)).
    const double r = 0.5;
    auto mean_error = [&](int n) {
        double e = 0.0;
        int count = 0;
        for (double c = 0.0013; c < 0.4; c += 0.0037) {
            const auto v = circle_integral_n<1>(
                [](const RingNode& node) { return std::array<double, 1>{node.p.y > 0 ? 1.0 : 0.0}; }, {1, c}, r, n);
            e += std::abs(v[0] - r * (pi + 2 * std::asin(c / r)));
            ++count;
        }
        return e / count;
    };
    const double first = mean_error(64);
    double prev = first;
    CHECK(prev > 1e-6);
    for (int n = 128; n <= 1024; n *= 2) {
        const double e = mean_error(n);
        CHECK(prev / e > 1.4);
        CHECK(prev / e < 3.0);
        CHECK(e <= 2 * r * 2 * pi / n);
        prev = e;
    }
    CHECK(first / prev > 8.0);
    CHECK(first / prev < 32.0);
}

TEST_CASE("improper radial integrals of power laws") {
    const QuadratureSpec s;
    for (double r : {0.1, 0.5, 1.0}) {
        const auto a = improper_radial_integral([](double t) { return std::pow(t, 5); }, r, 4, s);
        CHECK(a.integrable);
        CHECK(a.value == doctest::Approx(r * r / 2).epsilon(1e-10));
        CHECK(a.tail_fraction < 0.01);
        const auto b = improper_radial_integral([](double t) { return std::pow(t, 5) * (1 + t); }, r, 4, s);
        CHECK(b.value == doctest::Approx(r * r / 2 + r * r * r / 3).epsilon(1e-9));
    }
}

TEST_CASE("non-integrable tails are reported") {
    const QuadratureSpec s;
    const auto a = improper_radial_integral([](double t) { return t * t; }, 0.5, 4, s);
    CHECK_FALSE(a.integrable);
    CHECK_FALSE(a.warning.empty());
    CHECK_THROWS_AS(improper_radial_integral([](double t) { return t; }, 0.0, 4, s), PreconditionError);
}

}
