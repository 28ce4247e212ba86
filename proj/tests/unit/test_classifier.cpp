#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stagpoint/classifier.hpp"

using namespace stagpoint;

namespace {

ScalarField2D synthetic(ProfileName name, double x0 = 1.0, int N = 2) {
    SyntheticProfileSpec s;
    s.name = name;
    s.x0 = x0;
    s.N = N;
    return make_synthetic(s);
}

StagnationPointReport flat_report(double x) {
    StagnationPointReport r;
    r.X0 = {x, 0.0};
    r.label = PointLabel::HorizontalFlatExcluded;
    return r;
}

}  // namespace

TEST_SUITE("classifier") {

TEST_CASE("density catalog") {
    for (double x0 : {0.1, 1.0, 7.0}) {
        const DensityCatalog c(x0);
        CHECK(c.d0 == 0.0);
        CHECK(c.d_corner == doctest::Approx(oracle::corner_density(x0)));
        CHECK(c.d_flat == doctest::Approx(oracle::flat_density(x0)));
        CHECK(c.d0 < c.d_corner);
        CHECK(c.d_corner < c.d_flat);
    }
    CHECK_THROWS_AS(DensityCatalog(0.0), DomainError);
    CHECK(point_label_string(PointLabel::HorizontalFlatExcluded) == "HorizontalFlat-Excluded");
    CHECK(density_class_string(DensityClass::Corner) == "corner");
}

TEST_CASE("density matching with a margin") {
    const DensityCatalog c(1.0);
    const DensityMatch corner = match_density(c, 0.5775, 1e-4, 0.25);
    CHECK(corner.nearest == DensityClass::Corner);
    CHECK(corner.runner_up == DensityClass::Flat);
    CHECK(corner.resolved);
    CHECK(corner.margin > 0.9);
    const DensityMatch flat = match_density(c, 0.666, 1e-3, 0.25);
    CHECK(flat.nearest == DensityClass::Flat);
    CHECK(flat.resolved);
    CHECK(match_density(c, 0.02, 1e-3, 0.25).nearest == DensityClass::Zero);
    // Midway between the corner and flat values.
    const double mid = 0.5 * (c.d_corner + c.d_flat);
    CHECK_FALSE(match_density(c, mid + 1e-4, 1e-4, 0.25).resolved);
    // Uncertainty comparable to the spacing.
    CHECK_FALSE(match_density(c, 0.5775, 0.05, 0.25).resolved);
}

TEST_CASE("detection on synthetic fields") {
    const DetectionConfig cfg;
    for (int N : {2, 3}) {
        const auto deg = synthetic(ProfileName::DegenerateN, 1.0, N);
        const auto pts = detect_stagnation_points(deg, cfg);
        REQUIRE(pts.size() >= 1);
        const Box& w = deg.window();
        const double cell = (w.xmax - w.xmin) / cfg.scan_cells;
        bool found = false;
        for (Point2 p : pts) {
            CHECK(p.y == 0.0);
            if (std::abs(p.x - 1.0) <= cell) found = true;
        }
        CHECK(found);
    }
    const auto corner = synthetic(ProfileName::StokesCorner);
    const auto cp = detect_stagnation_points(corner, cfg);
    REQUIRE(cp.size() == 1);
    // The apex is an isolated contact with the axis, so the zoom pins it well below a cell.
    CHECK(std::abs(cp[0].x - 1.0) <= 1e-8);
    CHECK(detect_stagnation_points(synthetic(ProfileName::Zero), cfg).empty());
    CHECK_FALSE(detect_stagnation_points(synthetic(ProfileName::WeightedHarmonicX2Y), cfg).empty());
}

TEST_CASE("classify the wedge") {
    const ClassifierConfig cfg;
    const auto r = classify_stagnation_point(synthetic(ProfileName::StokesCorner), Vorticity::effective(), {1, 0}, cfg);
    CHECK(r.label == PointLabel::StokesCorner);
    REQUIRE(r.phi0);
    CHECK(std::abs(r.phi0->value - oracle::corner_density(1.0)) <= 2e-3);
    REQUIRE(r.density);
    CHECK(r.density->nearest == DensityClass::Corner);
    REQUIRE_FALSE(r.profile_distance.empty());
    CHECK(r.profile_distance.front().first == "corner");
    CHECK(r.profile_distance.front().second <= 1e-2);
    REQUIRE(r.identities);
    CHECK(r.identities->failures == 0);
}

TEST_CASE("classify the flat profile") {
    const ClassifierConfig cfg;
    const auto r = classify_stagnation_point(synthetic(ProfileName::DegenerateN), Vorticity::effective(), {1, 0}, cfg);
    CHECK(r.label == PointLabel::HorizontalFlatExcluded);
    REQUIRE(r.phi0);
    CHECK(std::abs(r.phi0->value - oracle::flat_density(1.0)) <= 1e-2);
    REQUIRE(r.H0);
    CHECK(std::abs(r.H0->value - 2.0) <= 0.02);
    CHECK(r.N == 2);
    CHECK(r.N_gap <= 0.02);
    CHECK(r.frequency_ran);
    CHECK(r.nodal_jump == doctest::Approx(4.0).epsilon(1e-6));
    REQUIRE(r.homogeneity);
    CHECK(std::abs(r.homogeneity->degree - 2.0) <= 0.02);
}

TEST_CASE("negative controls") {
    const ClassifierConfig cfg;
    const auto x2y = classify_stagnation_point(synthetic(ProfileName::WeightedHarmonicX2Y), Vorticity::effective(), {1, 0}, cfg);
    CHECK(x2y.label == PointLabel::Nondegenerate);
    CHECK(x2y.gradient_screen == doctest::Approx(1.0));
    CHECK_FALSE(x2y.phi0);
    const auto zero = classify_stagnation_point(synthetic(ProfileName::Zero), Vorticity::effective(), {1, 0}, cfg);
    CHECK(zero.label == PointLabel::CuspOrZeroDensity);
    CHECK_FALSE(zero.frequency_ran);
}

TEST_CASE("gradient screen on sampled grids") {
    // y = 0 on a node, x = 1 between nodes; the spline gradient at the flat point is about 1e-3.
    const Box box{0.02, 4.0, -2.0, 4.0};
    ClassifierConfig cfg;
    cfg.run_identities = false;
    const auto deg = ScalarField2D::from_grid(sample_to_grid(synthetic(ProfileName::DegenerateN), 401, 301, box));
    const auto d = classify_stagnation_point(deg, Vorticity::effective(), {1, 0}, cfg);
    CHECK(d.gradient_screen > cfg.screen * 0.25);
    CHECK(d.label != PointLabel::Nondegenerate);
    const auto x2y = ScalarField2D::from_grid(sample_to_grid(synthetic(ProfileName::WeightedHarmonicX2Y), 401, 301, box));
    CHECK(classify_stagnation_point(x2y, Vorticity::effective(), {1, 0}, cfg).label == PointLabel::Nondegenerate);
}

TEST_CASE("window too small for the grid") {
    const auto deg = synthetic(ProfileName::DegenerateN);
    const auto tiny = deg.restricted({0.9999, 1.0001, -0.0001, 0.0001});
    CHECK_THROWS_AS(classify_stagnation_point(tiny, Vorticity::effective(), {1, 0}, ClassifierConfig{}), WindowError);
}

TEST_CASE("property: frequency outputs are scale invariant") {
    const auto deg = synthetic(ProfileName::DegenerateN, 1.0, 3);
    const auto w = AnalysisWindow::make(deg, {1, 0}, 1e-1, 0.8, 21);
    const auto a = profile_sweep(deg, Vorticity::effective(), w, EvalSpec{});
    const auto b = profile_sweep(deg.scaled(20.0), Vorticity::effective(), w, EvalSpec{});
    const auto ha = extrapolate_zero_limit(column(a, Column::H)), hb = extrapolate_zero_limit(column(b, Column::H));
    CHECK(hb.limit == doctest::Approx(ha.limit).epsilon(1e-8));
    CHECK(std::lround(hb.limit) == std::lround(ha.limit));
    const auto da = extrapolate_zero_limit(column(a, Column::D)), db = extrapolate_zero_limit(column(b, Column::D));
    CHECK(db.limit == doctest::Approx(da.limit).epsilon(1e-10));
}

TEST_CASE("flat-set finiteness probe") {
    const auto deg = synthetic(ProfileName::DegenerateN);
    const FlatSetSummary none = flat_set_finiteness_probe(deg, {}, 1e-3);
    CHECK(none.flat_count == 0);
    CHECK(none.separated);
    const FlatSetSummary one = flat_set_finiteness_probe(deg, {flat_report(1.0)}, 1e-3);
    CHECK(one.flat_count == 1);
    CHECK(one.separated);
    CHECK(std::isinf(one.min_separation));
    const std::vector<StagnationPointReport> two{flat_report(1.001), flat_report(1.0)};
    const FlatSetSummary coarse = flat_set_finiteness_probe(deg, two, 2e-3);
    CHECK_FALSE(coarse.separated);
    CHECK(coarse.min_separation == doctest::Approx(1e-3));
    CHECK_FALSE(coarse.notes.empty());
    CHECK(flat_set_finiteness_probe(deg, two, 5e-4).separated);
}

}
