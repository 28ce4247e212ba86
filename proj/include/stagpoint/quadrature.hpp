#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "stagpoint/geometry.hpp"

namespace stagpoint {

struct QuadratureSpec {
    int circle_nodes = 512;
    int disk_radial_nodes = 64;
    int disk_angular_nodes = 256;
    double cutoff_fraction = 1e-3;
    bool monitor = true;
    // Improper integrals: composite Gauss-Legendre panels, uniform in log t.
    int panels_per_decade = 4;
    int panel_nodes = 10;
    double improper_tolerance = 1e-10;
    int max_refinements = 3;

    void validate() const;
    // All node counts multiplied by factor.
    QuadratureSpec refined(int factor = 2) const;
};

// Angular node counts are rounded up to a multiple of 24 so that the rays at multiples of
// pi/12 (wedge edges pi/6, 5pi/6 and nodal rays k*pi/N for N <= 4) sit on cell boundaries
// of the half-offset rule. Integrands with a positivity indicator get twice the nodes.
int aligned_angular_nodes(int requested);
int circle_node_count(const QuadratureSpec& spec, bool discontinuous = false);
int disk_angular_node_count(const QuadratureSpec& spec, bool discontinuous = true);

struct AngularRule {
    std::vector<double> cos_t;
    std::vector<double> sin_t;
    double dtheta = 0.0;
};

// Trapezoid/midpoint nodes theta_i = (i + 1/2) * 2pi / n; cached, thread-safe.
std::shared_ptr<const AngularRule> angular_rule(int n);

// Gauss-Legendre nodes and weights on [0, 1]; cached, thread-safe.
struct LineRule {
    std::vector<double> x;
    std::vector<double> w;
};
std::shared_ptr<const LineRule> gauss_legendre_unit(int n);

struct RingNode {
    Point2 p;       // center + rel
    Vec2 rel;       // p - center, exact polar offset
    Vec2 normal;    // outward unit normal of the circle through p
    double radius;  // |rel|
};

// Sum of g over one circle, times the arc-length element: approximates the line integral over |X - c| = r.
template <std::size_t M, class G>
std::array<double, M> ring_integral(G&& g, Point2 center, double r, const AngularRule& rule) {
    std::array<double, M> acc{};
    const std::size_t n = rule.cos_t.size();
    for (std::size_t i = 0; i < n; ++i) {
        RingNode node;
        node.normal = {rule.cos_t[i], rule.sin_t[i]};
        node.rel = {r * rule.cos_t[i], r * rule.sin_t[i]};
        node.p = {center.x + node.rel.x, center.y + node.rel.y};
        node.radius = r;
        const std::array<double, M> v = g(node);
        for (std::size_t m = 0; m < M; ++m) acc[m] += v[m];
    }
    const double w = r * rule.dtheta;
    for (auto& a : acc) a *= w;
    return acc;
}

template <std::size_t M, class G>
std::array<double, M> circle_integral_n(G&& g, Point2 center, double r, int n_theta) {
    auto rule = angular_rule(n_theta);
    return ring_integral<M>(g, center, r, *rule);
}

// Gauss-Legendre in rho times the angular rule: integral over |X - c| < r of g.
template <std::size_t M, class G>
std::array<double, M> disk_integral_n(G&& g, Point2 center, double r, int n_rho, int n_theta) {
    auto rule = angular_rule(n_theta);
    auto gl = gauss_legendre_unit(n_rho);
    std::array<double, M> acc{};
    for (std::size_t k = 0; k < gl->x.size(); ++k) {
        const double rho = r * gl->x[k];
        const std::array<double, M> ring = ring_integral<M>(g, center, rho, *rule);
        const double w = r * gl->w[k];
        for (std::size_t m = 0; m < M; ++m) acc[m] += w * ring[m];
    }
    return acc;
}

using PointIntegrand = std::function<double(Point2)>;

double circle_integral(const PointIntegrand& g, Point2 center, double r, const QuadratureSpec& spec,
                       bool discontinuous = false);
double disk_integral(const PointIntegrand& g, Point2 center, double r, const QuadratureSpec& spec,
                     bool discontinuous = false);

struct ImproperIntegral {
    double value = 0.0;
    double main = 0.0;  // part on [c_min r, r]
    double tail = 0.0;  // extrapolated part on (0, c_min r)
    double tail_fraction = 0.0;
    double tail_exponent = 0.0;  // fitted p in Q(t) t^-k ~ t^p, NaN when Q vanishes near 0
    double error_estimate = 0.0;
    bool integrable = true;
    int panels = 0;
    std::string warning;
};

using RadialVectorFn = std::function<std::vector<double>(double)>;

// Integral over (0, r) of t^-k Q(t) dt.
ImproperIntegral improper_radial_integral(const std::function<double(double)>& Q, double r, int k,
                                          const QuadratureSpec& spec);

// Batched form: component j integrates t^-k[j] Q_j(t). When dQ is supplied (dQ = Q'), the main part
// uses the swapped-order form and Q itself is only sampled at the cutoff radii. Qabs, when supplied,
// gives the integral of |integrand| behind each Q_j; components with |Q_j| at the roundoff level of
// Qabs near the cutoff get a zero tail instead of a fit through noise.
std::vector<ImproperIntegral> improper_radial_integrals(const RadialVectorFn& Q, const RadialVectorFn* dQ, double r,
                                                        const std::vector<int>& k, const QuadratureSpec& spec,
                                                        const RadialVectorFn* Qabs = nullptr);

// Relative level below which |Q| is indistinguishable from cancellation noise in its magnitude integral.
inline constexpr double kCancellationFloor = 1e-11;

}  // namespace stagpoint
