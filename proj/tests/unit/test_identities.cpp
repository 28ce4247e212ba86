#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stagpoint/identities.hpp"

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

std::vector<double> geometric(double r_max, double q, int count) {
    std::vector<double> r;
    for (int j = 0; j < count; ++j) r.push_back(r_max * std::pow(q, j));
    return r;
}

}  // namespace

TEST_SUITE("identities") {

TEST_CASE("relative residual definition") {
    CHECK(relative_residual(3.0, 1.0) == doctest::Approx(2.0 / 4.0));
    CHECK(relative_residual(0.0, 0.0) == 0.0);
    const Residual r = make_residual("x", 0.1, 1.0, 1.0 + 1e-7, 1e-6);
    CHECK(r.pass);
    CHECK_FALSE(make_residual("x", 0.1, 1.0, 1.1, 1e-6).pass);
    CHECK(make_residual("x", 0.1, 1.0, 1.1, 1e-6).abs_residual == doctest::Approx(0.1));
}

TEST_CASE("energy identity on exact solutions") {
    const EvalSpec spec;
    const auto x2 = synthetic(ProfileName::WeightedHarmonicX2);
    const Residual a = check_energy_identity(x2, VorticityModel::zero(), {1, 0}, 0.5, spec);
    // Both sides equal 4 pi r^2 x0.
    CHECK(a.lhs == doctest::Approx(pi).epsilon(1e-12));
    CHECK(a.rhs == doctest::Approx(pi).epsilon(1e-12));
    CHECK(a.rel_residual <= 1e-9);
    CHECK(a.pass);
    const auto x2y = synthetic(ProfileName::WeightedHarmonicX2Y);
    for (Point2 X0 : {Point2{1, 0}, Point2{1, 0.6}})
        CHECK(check_energy_identity(x2y, VorticityModel::zero(), X0, 0.3, spec).rel_residual <= 1e-8);
    const Residual z = check_energy_identity(synthetic(ProfileName::Zero), VorticityModel::zero(), {1, 0}, 0.3, spec);
    CHECK(z.lhs == 0.0);
    CHECK(z.rhs == 0.0);
    CHECK(z.pass);
}

TEST_CASE("Rellich identity on exact solutions") {
    const EvalSpec spec;
    for (auto name : {ProfileName::WeightedHarmonicX2, ProfileName::WeightedHarmonicX2Y}) {
        const Residual a = check_rellich_identity(synthetic(name), VorticityModel::zero(), {1, 0}, 0.5, spec);
        CHECK(a.rel_residual <= 1e-8);
        CHECK(a.lhs > 0.0);
    }
    const Residual z = check_rellich_identity(synthetic(ProfileName::Zero), VorticityModel::zero(), {1, 0}, 0.3, spec);
    CHECK(z.lhs == 0.0);
    CHECK(z.pass);
}

TEST_CASE("Rellich identity with the effective vorticity on a non-solution") {
    const auto corner = synthetic(ProfileName::StokesCorner);
    CHECK(check_rellich_identity(corner, Vorticity::effective(), {1, 0}, 0.1, EvalSpec{}).rel_residual <= 1e-6);
}

TEST_CASE("adjusted-energy derivative") {
    const EvalSpec spec;
    const auto deg = synthetic(ProfileName::DegenerateN);
    const Residual a = check_weiss_derivative(deg, Vorticity::effective(), {1, 0}, 0.05, 0.0, spec);
    CHECK(a.rel_residual <= 1e-4);
    CHECK(a.pass);
    const auto corner = synthetic(ProfileName::StokesCorner);
    CHECK(check_weiss_derivative(corner, Vorticity::effective(), {1, 0}, 0.05, 0.0, spec, 1e-3).pass);
    const Residual z = check_weiss_derivative(synthetic(ProfileName::Zero), VorticityModel::zero(), {1, 0}, 0.05, 0.0, spec);
    CHECK(z.lhs == 0.0);
    CHECK(z.rhs == 0.0);
    CHECK_THROWS_AS(check_weiss_derivative(deg, Vorticity::effective(), {1, 0}, 0.05, 0.02, spec), PreconditionError);
}

TEST_CASE("halving the FD step shows second-order truncation") {
    const auto deg = synthetic(ProfileName::DegenerateN, 1.0, 3);
    const Residual a = check_weiss_derivative(deg, Vorticity::effective(), {1, 0}, 0.1, 1e-2, EvalSpec{});
    CHECK(a.fd_convergence >= 3.5);
}

TEST_CASE("frequency derivative: both forms and their mutual agreement") {
    const EvalSpec spec;
    for (int N : {2, 3, 4}) {
        const auto deg = synthetic(ProfileName::DegenerateN, 1.0, N);
        for (double r : {0.02, 0.05, 0.1}) {
            const auto c = check_frequency_derivative_both(deg, Vorticity::effective(), {1, 0}, r, 0.0, spec);
            CHECK(c.mutual.rel_residual <= 1e-8);
            CHECK(c.d_form.rel_residual <= 1e-4);
            CHECK(c.h_form.rel_residual <= 1e-4);
        }
    }
    const auto corner = synthetic(ProfileName::StokesCorner);
    const Residual c = check_frequency_derivative(corner, Vorticity::effective(), {1, 0}, 0.05, 0.0,
                                                  FrequencyForm::HForm, spec, 1e-3);
    CHECK(c.pass);
    CHECK_THROWS_AS(check_frequency_derivative(synthetic(ProfileName::Zero), VorticityModel::zero(), {1, 0}, 0.05, 0.0,
                                               FrequencyForm::DForm, spec),
                    DegenerateDenominator);
}

TEST_CASE("K bound") {
    const EvalSpec spec;
    const auto deg = synthetic(ProfileName::DegenerateN, 1.0, 3);
    const auto radii = geometric(0.2, 0.8, 20);
    const KBoundReport zero_f = check_K_bound(deg, VorticityModel::zero(), {1, 0}, radii, spec);
    CHECK(zero_f.C0 == 0.0);
    CHECK(zero_f.lower_bound_holds);
    CHECK(zero_f.failing_radii.empty());
    for (const auto& row : zero_f.rows) CHECK(row.K == 0.0);

    const KBoundReport lin = check_K_bound(deg, VorticityModel::linear(1.0), {1, 0}, radii, spec);
    CHECK(lin.growth_bound_holds);
    CHECK(lin.lower_bound_holds);
    CHECK(std::isfinite(lin.C0));
    CHECK(lin.C0 > 0.0);
    const KBoundReport fine = check_K_bound(deg, VorticityModel::linear(1.0), {1, 0}, geometric(0.2, std::sqrt(0.8), 39), spec);
    CHECK(fine.C0 == doctest::Approx(lin.C0).epsilon(0.05));

    const KBoundReport z = check_K_bound(synthetic(ProfileName::Zero), VorticityModel::zero(), {1, 0}, radii, spec);
    CHECK(z.lower_bound_holds);
}

TEST_CASE("V decomposition") {
    const EvalSpec spec;
    const auto radii = geometric(0.1, 0.8, 24);
    for (int N : {2, 3, 4}) {
        const SequenceCheck s = check_V_decomposition(synthetic(ProfileName::DegenerateN, 1.0, N), {1, 0}, radii, spec);
        CHECK(s.max_abs_smallest_decade <= 1e-2);
        CHECK(s.pass);
    }
    const SequenceCheck c = check_V_decomposition(synthetic(ProfileName::StokesCorner), {1, 0}, radii, spec);
    CHECK(c.decay.order > 0.0);
    CHECK_THROWS_AS(check_V_decomposition(synthetic(ProfileName::Zero), {1, 0}, radii, spec), DegenerateDenominator);
}

TEST_CASE("small-r identities") {
    const EvalSpec spec;
    const auto radii = geometric(0.1, 0.8, 24);
    for (int N : {2, 3, 4}) {
        const auto seqs = check_small_r_identities(synthetic(ProfileName::DegenerateN, 1.0, N), {1, 0}, radii, spec);
        REQUIRE(seqs.size() == 3);
        for (const auto& s : seqs) {
            CHECK(s.pass);
            CHECK((s.decay.vanishing || s.decay.order >= 1.0));
        }
    }
    const auto zero = check_small_r_identities(synthetic(ProfileName::Zero), {1, 0}, radii, spec);
    for (const auto& s : zero)
        for (const auto& row : s.rows) CHECK(row.lhs == 0.0);
    // Negative control: reported, not asserted.
    std::vector<SequenceCheck> x2;
    CHECK_NOTHROW(x2 = check_small_r_identities(synthetic(ProfileName::WeightedHarmonicX2), {1, 0}, radii, spec));
    CHECK(x2.size() == 3);
}

TEST_CASE("Y convexity") {
    const EvalSpec spec;
    const auto radii = geometric(0.1, 0.8, 24);
    for (auto name : {ProfileName::DegenerateN, ProfileName::StokesCorner}) {
        const YConvexityReport y = check_Y_convexity(synthetic(name), {1, 0}, radii, spec);
        CHECK(y.convex);
        CHECK(y.inequality_holds);
        for (std::size_t j = 1; j < y.radii.size(); ++j) CHECK(y.radii[j] > y.radii[j - 1]);
    }
    CHECK_THROWS_AS(check_Y_convexity(synthetic(ProfileName::DegenerateN), {1, 0}, {0.1, 0.05}, spec), InsufficientData);
}

TEST_CASE("verify suites") {
    const EvalSpec spec;
    CHECK(parse_suite("exact") == Suite::Exact);
    CHECK_THROWS_AS(parse_suite("bogus"), ConfigError);
    const auto x2 = synthetic(ProfileName::WeightedHarmonicX2);
    VerifyOptions opts;
    const VerifyReport ok = run_verify_suite(x2, VorticityModel::zero(), {1, 0}, spec, opts);
    CHECK(ok.suite == Suite::Exact);
    CHECK(ok.ok());
    opts.tolerance = 1e-15;
    const VerifyReport strict = run_verify_suite(x2, VorticityModel::zero(), {1, 0}, spec, opts);
    CHECK(strict.failures > 0);

    VerifyOptions auto_opts;
    const VerifyReport deg = run_verify_suite(synthetic(ProfileName::DegenerateN, 1.0, 3), Vorticity::effective(), {1, 0},
                                              spec, auto_opts);
    CHECK(deg.suite == Suite::Stagnation);
    CHECK(deg.ok());
    const VerifyReport x2y = run_verify_suite(synthetic(ProfileName::WeightedHarmonicX2Y), VorticityModel::zero(), {1, 0},
                                              spec, auto_opts);
    CHECK(x2y.suite == Suite::Exact);
}

}
