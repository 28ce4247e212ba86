#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stagpoint/blowup.hpp"
#include "stagpoint/identities.hpp"

namespace stagpoint {

// Candidate limits of the adjusted energy at an axis point x0: 0, the wedge value and the half-disk value.
struct DensityCatalog {
    double x0 = 1.0;
    double d0 = 0.0;
    double d_corner = 0.0;  // x0 sqrt(3) / 3
    double d_flat = 0.0;    // x0 2 / 3

    explicit DensityCatalog(double x0);
};

enum class DensityClass { Zero, Corner, Flat };
std::string density_class_string(DensityClass c);

enum class PointLabel { StokesCorner, CuspOrZeroDensity, HorizontalFlatExcluded, Nondegenerate, Unresolved };
std::string point_label_string(PointLabel l);

struct DensityMatch {
    DensityClass nearest = DensityClass::Zero;
    double nearest_value = 0.0;
    DensityClass runner_up = DensityClass::Corner;
    // (distance to runner-up - distance to nearest) / |runner-up - nearest|, in [0, 1].
    double margin = 0.0;
    bool resolved = false;
};
DensityMatch match_density(const DensityCatalog& catalog, double phi0, double sigma, double required_margin);

// Grid fields: a screen below this fraction of its mean two cells out is treated as spline error.
inline constexpr double kGridScreenFraction = 0.01;

struct ClassifierConfig {
    EvalSpec spec;
    double r_max = 0.0;  // <= 0 selects delta / 2
    double q = 0.8;
    int count = 40;
    double margin = 0.25;
    double screen = kNondegenerateScreen;
    // Blow-up frame scale for profile distances; clipped to the radius grid.
    double frame_r = 1e-2;
    bool run_identities = true;
};

struct IdentitySummary {
    int checks = 0;
    int failures = 0;
    double max_rel_residual = 0.0;
};

struct Estimate {
    double value = 0.0;
    double sigma = 0.0;
};

struct StagnationPointReport {
    Point2 X0;
    PointLabel label = PointLabel::Unresolved;
    double gradient_screen = 0.0;
    std::optional<Estimate> phi0;
    std::optional<DensityMatch> density;
    std::optional<Estimate> H0;
    int N = 0;  // nearest integer >= 2, flat class only
    double N_gap = 0.0;  // |H0 - N|
    std::optional<HomogeneityEstimate> homogeneity;
    std::vector<std::pair<std::string, double>> profile_distance;
    double nodal_jump = 0.0;
    bool frequency_ran = false;
    std::optional<IdentitySummary> identities;
    std::vector<std::string> diagnostics;
};

struct DetectionConfig {
    double threshold = 0.0;
    int scan_cells = 4000;  // scan step is the larger of the field spacing and the axis length / scan_cells
};

// Axis points on the boundary of {psi > threshold} where the speed |grad psi|^2 / x^2 is locally smallest,
// in increasing x.
std::vector<Point2> detect_stagnation_points(const ScalarField2D& field, const DetectionConfig& config);

StagnationPointReport classify_stagnation_point(const ScalarField2D& field, const Vorticity& vort, Point2 X0,
                                                const ClassifierConfig& config);

struct FlatSetSummary {
    int flat_count = 0;
    double scanned_length = 0.0;
    double per_unit_length = 0.0;
    double min_separation = 0.0;  // infinity below two flat points
    double resolution = 0.0;
    bool separated = true;
    std::vector<std::string> notes;
};
FlatSetSummary flat_set_finiteness_probe(const ScalarField2D& field, const std::vector<StagnationPointReport>& reports,
                                         double resolution);

}  // namespace stagpoint
