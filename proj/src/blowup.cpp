#include "stagpoint/blowup.hpp"

#include <gsl/gsl_fit.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace stagpoint {

namespace {
constexpr double kPi = std::numbers::pi;

double polar_angle(Point2 X) { return std::atan2(X.y, X.x); }
}  // namespace

RescaledField::RescaledField(ScalarField2D source, Point2 X0, double r, double factor)
    : source_(std::move(source)), X0_(X0), r_(r), factor_(factor) {}

double RescaledField::value(Point2 X) const { return factor_ * source_.value({X0_.x + r_ * X.x, X0_.y + r_ * X.y}); }

Vec2 RescaledField::gradient(Point2 X) const {
    const Vec2 g = source_.gradient({X0_.x + r_ * X.x, X0_.y + r_ * X.y});
    return {factor_ * r_ * g.x, factor_ * r_ * g.y};
}

double BlowupFrame::boundary_norm(const QuadratureSpec& quad) const {
    const double x0 = X0.x, rr = r;
    auto v = circle_integral_n<1>(
        [&](const RingNode& n) {
            const double p = phi.value(n.p);
            return std::array<double, 1>{p * p / (x0 + rr * n.p.x)};
        },
        {0.0, 0.0}, 1.0, circle_node_count(quad, false));
    return v[0];
}

BlowupFrame rescale_phi(const ScalarField2D& field, Point2 X0, double r, const EvalSpec& spec) {
    if (!(r > 0.0)) throw PreconditionError("blow-up scale must be positive");
    if (!(X0.x > r)) throw WindowError("blow-up ball crosses the axis");
    if (!field.window().contains_disk(X0, r)) throw WindowError("blow-up ball leaves the field window");
    auto s = circle_integral_n<1>(
        [&](const RingNode& n) {
            const double p = field.value(n.p);
            return std::array<double, 1>{p * p / n.p.x};
        },
        X0, r, circle_node_count(spec.quad, false));
    const double S = s[0];
    if (!(S / r > kDenominatorFloor)) throw DegenerateDenominator("psi vanishes on the blow-up circle");
    const double norm = std::sqrt(S / r);
    return BlowupFrame{X0, r, norm, RescaledField(field, X0, r, 1.0 / norm)};
}

RescaledField rescale_psi32(const ScalarField2D& field, Point2 X0, double r) {
    if (!(r > 0.0)) throw DomainError("rescaling needs r > 0");
    if (!field.window().contains_disk(X0, r)) throw DomainError("rescaling ball leaves the field window");
    return RescaledField(field, X0, r, std::pow(r, -1.5));
}

std::string homogeneity_method_string(HomogeneityMethod m) {
    return m == HomogeneityMethod::BoundaryNormSlope ? "boundary-norm-slope" : "frequency-plateau";
}

HomogeneityEstimate fit_homogeneity(const RadialProfile& profile, double psi_at_base, double positivity_threshold) {
    Samples logs, freq;
    for (const auto& rec : profile.records) {
        // Only S and D enter; improper-integral failures elsewhere in the record do not matter here.
        if (rec.degenerate || !(rec.core.J > kDenominatorFloor) || !std::isfinite(rec.S)) continue;
        logs.emplace_back(rec.r, 0.5 * std::log(rec.S));
        if (std::isfinite(rec.D)) freq.emplace_back(rec.r, rec.D);
    }
    if (logs.size() < 6) throw InsufficientData("homogeneity fit needs at least 6 radii with J > 0");

    HomogeneityEstimate est;

    const Samples dec = smallest_decade(logs);
    if (dec.size() < 3) throw InsufficientData("homogeneity fit needs at least 3 radii in the smallest decade");
    std::vector<double> lx, ly;
    for (const auto& s : dec) {
        lx.push_back(std::log(s.first));
        ly.push_back(s.second);
    }
    double a, b, c00, c01, c11, sumsq;
    gsl_fit_linear(lx.data(), 1, ly.data(), 1, lx.size(), &a, &b, &c00, &c01, &c11, &sumsq);
    est.slope.method = HomogeneityMethod::BoundaryNormSlope;
    est.slope.degree = b - 0.5;
    est.slope.residual = std::sqrt(sumsq / static_cast<double>(lx.size()));
    est.slope.r_min = dec.front().first;
    est.slope.r_max = dec.back().first;
    est.slope.samples = static_cast<int>(dec.size());

    const Extrapolation e = extrapolate_zero_limit(freq);
    est.plateau.method = HomogeneityMethod::FrequencyPlateau;
    est.plateau.degree = e.limit;
    est.plateau.residual = e.uncertainty;
    est.plateau.r_min = e.r_min;
    est.plateau.r_max = e.r_max;
    est.plateau.samples = e.samples;

    est.degree = est.plateau.degree;
    est.method = HomogeneityMethod::FrequencyPlateau;
    est.r_min = est.plateau.r_min;
    est.r_max = est.plateau.r_max;
    est.disagreement = std::fabs(est.slope.degree - est.plateau.degree);
    est.residual = std::max(est.plateau.residual, est.disagreement);

    if (est.disagreement > kHomogeneityAgreement) {
        est.flagged = true;
        est.flags.push_back("boundary-norm slope and frequency plateau disagree");
    }
    if (psi_at_base > positivity_threshold && est.degree < 1.5) {
        est.flagged = true;
        est.flags.push_back("base point lies inside {psi > 0}; degree below 3/2 is not a free-boundary blow-up");
    }
    return est;
}

HomogeneityEstimate fit_homogeneity(const ScalarField2D& field, Point2 X0, const AnalysisWindow& window,
                                    const EvalSpec& spec, const Vorticity& vort) {
    const RadialProfile profile = profile_sweep(field, vort, window, spec);
    return fit_homogeneity(profile, field.value(X0), spec.positivity_threshold);
}

double LimitProfile::value(Point2 X, double x0) const {
    const double rho = std::hypot(X.x, X.y);
    if (rho == 0.0) return 0.0;
    const double th = polar_angle(X);
    if (kind == LimitProfileKind::Corner) {
        if (!(th > kPi / 6.0 && th < 5.0 * kPi / 6.0)) return 0.0;
        const double c = scaling == ProfileScaling::Unit ? std::sqrt(3.0 * x0 / kPi) : std::sqrt(2.0) * x0 / 3.0;
        return c * std::pow(rho, 1.5) * std::cos(1.5 * (th - kPi / 2.0));
    }
    if (scaling == ProfileScaling::Physical || X.y <= 0.0) return 0.0;
    return std::sqrt(x0 / (kPi / 2.0)) * std::pow(rho, N) * std::fabs(std::sin(N * th));
}

std::string LimitProfile::describe() const {
    std::string s = kind == LimitProfileKind::Corner ? "corner" : "frequency-" + std::to_string(N);
    return s + (scaling == ProfileScaling::Unit ? "" : " (physical)");
}

namespace {

// Integral of g over inner <= |X| <= outer: Gauss-Legendre in rho, aligned angular rule.
template <std::size_t M, class G>
std::array<double, M> annulus_integral(G&& g, double inner, double outer, const QuadratureSpec& quad) {
    auto rule = angular_rule(disk_angular_node_count(quad, true));
    auto gl = gauss_legendre_unit(quad.disk_radial_nodes);
    std::array<double, M> acc{};
    const double width = outer - inner;
    for (std::size_t k = 0; k < gl->x.size(); ++k) {
        const double rho = inner + width * gl->x[k];
        const std::array<double, M> ring = ring_integral<M>(g, {0.0, 0.0}, rho, *rule);
        for (std::size_t m = 0; m < M; ++m) acc[m] += width * gl->w[k] * ring[m];
    }
    return acc;
}

}  // namespace

double limit_profile_distance(const RescaledField& phi, const LimitProfile& profile, const QuadratureSpec& quad) {
    const double x0 = phi.X0().x;
    auto v = annulus_integral<2>(
        [&](const RingNode& n) {
            const double p = phi.value(n.p);
            const double c = profile.value(n.p, x0);
            return std::array<double, 2>{(p - c) * (p - c) / x0, c * c / x0};
        },
        0.25, 0.75, quad);
    if (!(v[1] > 0.0)) return std::sqrt(v[0]);
    return std::sqrt(v[0] / v[1]);
}

double limit_profile_distance(const BlowupFrame& frame, const LimitProfile& profile, const QuadratureSpec& quad) {
    return limit_profile_distance(frame.phi, profile, quad);
}

double annulus_homogeneity_residual(const BlowupFrame& frame, double N, const QuadratureSpec& quad, double inner,
                                    double outer) {
    if (!(inner > 0.0 && outer > inner && outer <= 1.0)) throw PreconditionError("annulus needs 0 < inner < outer <= 1");
    const double x0 = frame.X0.x;
    auto v = annulus_integral<1>(
        [&](const RingNode& n) {
            const double p = frame.phi.value(n.p);
            const Vec2 g = frame.phi.gradient(n.p);
            const double radial = g.x * n.rel.x + g.y * n.rel.y - N * p;
            return std::array<double, 1>{radial * radial / (x0 * std::pow(n.radius, 5))};
        },
        inner, outer, quad);
    return v[0];
}

double nodal_ray_laplacian(int N, bool signed_control) {
    if (N < 2) throw DomainError("nodal-ray Laplacian needs N >= 2");
    const double rho = 1.0;
    auto u = [&](double th) {
        const double s = std::pow(rho, N) * std::sin(N * th);
        return signed_control ? s : std::fabs(s);
    };
    const double ray = kPi / N;
    const double e = 1e-4;
    // Second-order one-sided differences; the angular derivative is (1/rho) d/dtheta.
    const double above = (-3.0 * u(ray) + 4.0 * u(ray + e) - u(ray + 2.0 * e)) / (2.0 * e * rho);
    const double below = (3.0 * u(ray) - 4.0 * u(ray - e) + u(ray - 2.0 * e)) / (2.0 * e * rho);
    return (above - below) / std::pow(rho, N - 1);
}

}  // namespace stagpoint
