#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stagpoint/blowup.hpp"

using namespace stagpoint;
using oracle::pi;

namespace {

ScalarField2D synthetic(ProfileName name, double x0 = 1.0, int N = 2) {
    SyntheticProfileSpec s;
    s.name = name;
    s.x0 = x0;
    s.N = N;
    return make_synthetic(s);
}

// Midpoint rule over |X| = 1 of p^2 / x0.
template <class F>
double unit_circle_norm(F&& p, double x0, int n = 8192) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double th = (i + 0.5) * 2 * pi / n;
        const double v = p(Point2{std::cos(th), std::sin(th)});
        s += v * v / x0;
    }
    return s * 2 * pi / n;
}

}  // namespace

TEST_SUITE("blowup") {

TEST_CASE("unit-scaled limit profiles have unit weighted boundary norm") {
    for (double x0 : {0.5, 1.0, 3.0}) {
        const LimitProfile corner{LimitProfileKind::Corner};
        CHECK(unit_circle_norm([&](Point2 X) { return corner.value(X, x0); }, x0) == doctest::Approx(1.0).epsilon(1e-6));
        for (int N : {2, 3, 4}) {
            const LimitProfile f{LimitProfileKind::FrequencyN, N};
            CHECK(unit_circle_norm([&](Point2 X) { return f.value(X, x0); }, x0) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    const LimitProfile phys{LimitProfileKind::Corner, 0, ProfileScaling::Physical};
    CHECK(phys.value({0, 1}, 1.0) == doctest::Approx(std::sqrt(2.0) / 3));
    CHECK(LimitProfile{LimitProfileKind::FrequencyN, 3, ProfileScaling::Physical}.value({0.2, 0.5}, 1.0) == 0.0);
    CHECK(LimitProfile{LimitProfileKind::FrequencyN, 3}.describe() == "frequency-3");
    CHECK(phys.describe() == "corner (physical)");
}

TEST_CASE("frames of the degenerate profile") {
    const EvalSpec spec;
    for (int N : {2, 3, 4}) {
        const auto deg = synthetic(ProfileName::DegenerateN, 1.0, N);
        const BlowupFrame f1 = rescale_phi(deg, {1, 0}, 1e-1, spec);
        const BlowupFrame f2 = rescale_phi(deg, {1, 0}, 1e-2, spec);
        CHECK(f2.normalization > 0.0);
        CHECK(f1.boundary_norm(spec.quad) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(f2.boundary_norm(spec.quad) == doctest::Approx(1.0).epsilon(1e-8));
        // sqrt(S / r) = r^N (1 + O(r)) for a degree-N profile.
        CHECK(f2.normalization / std::pow(1e-2, N) == doctest::Approx(1.0).epsilon(0.02));

        const LimitProfile same{LimitProfileKind::FrequencyN, N};
        const double d1 = limit_profile_distance(f1, same, spec.quad);
        const double d2 = limit_profile_distance(f2, same, spec.quad);
        CHECK(d2 <= 0.05);
        // At least first order in r; the profiles are symmetric about the vertical, so the
        // first-order weight correction cancels and the observed rate is r^2.
        CHECK(d1 / d2 >= 10.0);
        CHECK(limit_profile_distance(f2, {LimitProfileKind::FrequencyN, N + 1}, spec.quad) >= 0.5);

        CHECK(annulus_homogeneity_residual(f2, N, spec.quad) <= 1e-3);
        CHECK(annulus_homogeneity_residual(f2, N + 1, spec.quad) > 1e-2);
    }
}

TEST_CASE("frames are invariant under positive scaling and nonnegative") {
    const EvalSpec spec;
    const auto deg = synthetic(ProfileName::DegenerateN, 1.0, 3);
    const BlowupFrame a = rescale_phi(deg, {1, 0}, 0.05, spec);
    const BlowupFrame b = rescale_phi(deg.scaled(42.0), {1, 0}, 0.05, spec);
    for (double x = -0.95; x < 1.0; x += 0.1)
        for (double y = -0.95; y < 1.0; y += 0.1) {
            if (x * x + y * y >= 1.0) continue;
            const double va = a.phi.value({x, y});
            CHECK(va >= 0.0);
            CHECK(b.phi.value({x, y}) == doctest::Approx(va).epsilon(1e-12));
        }
}

TEST_CASE("rescaled gradients follow the chain rule") {
    const auto corner = synthetic(ProfileName::StokesCorner);
    const RescaledField f(corner, {1, 0}, 0.1, 2.0);
    const Point2 X{0.1, 0.5};
    const Vec2 g = f.gradient(X);
    const Vec2 s = grad(corner, {1.01, 0.05});
    CHECK(g.x == doctest::Approx(2.0 * 0.1 * s.x));
    CHECK(g.y == doctest::Approx(2.0 * 0.1 * s.y));
}

TEST_CASE("psi / r^{3/2} rescalings") {
    const EvalSpec spec;
    const auto corner = synthetic(ProfileName::StokesCorner);
    const LimitProfile phys{LimitProfileKind::Corner, 0, ProfileScaling::Physical};
    for (double r : {1e-1, 1e-3})
        CHECK(limit_profile_distance(rescale_psi32(corner, {1, 0}, r), phys, spec.quad) <= 1e-8);

    // Degree N: sup over the unit ball scales like r^{N - 3/2}.
    for (int N : {2, 3}) {
        const auto deg = synthetic(ProfileName::DegenerateN, 1.0, N);
        auto sup = [&](double r) {
            const RescaledField f = rescale_psi32(deg, {1, 0}, r);
            double m = 0.0;
            for (int i = 1; i < 200; ++i) m = std::max(m, f.value({0.0, i / 200.0}) + f.value({0.7, 0.7 * i / 200.0}));
            return m;
        };
        CHECK(sup(1e-2) / sup(1e-4) == doctest::Approx(std::pow(100.0, N - 1.5)).epsilon(1e-6));
    }
    const RescaledField z = rescale_psi32(synthetic(ProfileName::Zero), {1, 0}, 0.1);
    CHECK(z.value({0.3, 0.3}) == 0.0);
    CHECK_THROWS_AS(rescale_psi32(corner, {1, 0}, 5.0), DomainError);
}

TEST_CASE("rescale_phi contract errors") {
    const EvalSpec spec;
    CHECK_THROWS_AS(rescale_phi(synthetic(ProfileName::Zero), {1, 0}, 0.1, spec), DegenerateDenominator);
    CHECK_THROWS_AS(rescale_phi(synthetic(ProfileName::StokesCorner), {1, 0}, 1.5, spec), WindowError);
}

TEST_CASE("homogeneity of exactly homogeneous fields") {
    const EvalSpec spec;
    for (int N : {2, 3, 4}) {
        const auto deg = synthetic(ProfileName::DegenerateN, 1.0, N);
        const auto w = AnalysisWindow::make(deg, {1, 0}, 1e-1, 0.8, 21);
        const HomogeneityEstimate h = fit_homogeneity(deg, {1, 0}, w, spec);
        CHECK(h.degree == doctest::Approx(N).epsilon(0.02 / N));
        CHECK(h.slope.degree == doctest::Approx(N).epsilon(0.02 / N));
        CHECK(h.method == HomogeneityMethod::FrequencyPlateau);
        CHECK(h.residual >= 0.0);
        CHECK_FALSE(h.flagged);
    }
    const auto corner = synthetic(ProfileName::StokesCorner);
    const HomogeneityEstimate c = fit_homogeneity(corner, {1, 0}, AnalysisWindow::make(corner, {1, 0}, 1e-1, 0.8, 21), spec);
    CHECK(std::abs(c.degree - 1.5) <= 0.02);
    CHECK_FALSE(c.flagged);

    SyntheticProfileSpec s;
    s.name = ProfileName::CustomHomogeneous;
    s.lambda = 2.5;
    s.angular = [](double th) { return th > 0 ? std::pow(std::sin(th), 2) : 0.0; };
    s.angular_derivative = [](double th) { return th > 0 ? 2 * std::sin(th) * std::cos(th) : 0.0; };
    const auto custom = make_synthetic(s);
    const HomogeneityEstimate h = fit_homogeneity(custom, {1, 0}, AnalysisWindow::make(custom, {1, 0}, 1e-1, 0.8, 21), spec);
    CHECK(std::abs(h.degree - 2.5) <= 0.02);
    CHECK(std::abs(h.slope.degree - 2.5) <= 0.02);
}

TEST_CASE("property: homogeneity degree is invariant under scaling") {
    const EvalSpec spec;
    const auto deg = synthetic(ProfileName::DegenerateN, 1.0, 3);
    const auto w = AnalysisWindow::make(deg, {1, 0}, 1e-1, 0.8, 21);
    const double a = fit_homogeneity(deg, {1, 0}, w, spec).degree;
    const double b = fit_homogeneity(deg.scaled(1e3), {1, 0}, w, spec).degree;
    CHECK(b == doctest::Approx(a).epsilon(1e-10));
}

TEST_CASE("non-homogeneous probe is flagged") {
    const auto x2 = synthetic(ProfileName::WeightedHarmonicX2);
    const auto w = AnalysisWindow::probe(x2, {1, 0.5});
    const HomogeneityEstimate h = fit_homogeneity(x2, {1, 0.5}, w, EvalSpec{});
    CHECK(h.flagged);
    CHECK_FALSE(h.flags.empty());
    CHECK_THROWS_AS(fit_homogeneity(synthetic(ProfileName::Zero), {1, 0}, AnalysisWindow::make(synthetic(ProfileName::Zero), {1, 0}), EvalSpec{}),
                    InsufficientData);
}

TEST_CASE("nodal-ray jump") {
    for (int N : {2, 3, 4, 7}) {
        CHECK(nodal_ray_laplacian(N) == doctest::Approx(2.0 * N).epsilon(1e-6));
        CHECK(std::abs(nodal_ray_laplacian(N, true)) <= 1e-6);
    }
    CHECK_THROWS_AS(nodal_ray_laplacian(1), DomainError);
}

}
