#include "stagpoint/classifier.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "stagpoint/format.hpp"

namespace stagpoint {

DensityCatalog::DensityCatalog(double x0_) : x0(x0_), d_corner(x0_ * std::sqrt(3.0) / 3.0), d_flat(x0_ * 2.0 / 3.0) {
    if (!(x0_ > 0.0)) throw DomainError("density catalog needs x0 > 0");
}

std::string density_class_string(DensityClass c) {
    switch (c) {
        case DensityClass::Zero: return "zero";
        case DensityClass::Corner: return "corner";
        case DensityClass::Flat: return "flat";
    }
    return "unknown";
}

std::string point_label_string(PointLabel l) {
    switch (l) {
        case PointLabel::StokesCorner: return "StokesCorner";
        case PointLabel::CuspOrZeroDensity: return "CuspOrZeroDensity";
        case PointLabel::HorizontalFlatExcluded: return "HorizontalFlat-Excluded";
        case PointLabel::Nondegenerate: return "Nondegenerate";
        case PointLabel::Unresolved: return "Unresolved";
    }
    return "unknown";
}

DensityMatch match_density(const DensityCatalog& catalog, double phi0, double sigma, double required_margin) {
    std::array<std::pair<DensityClass, double>, 3> c{{{DensityClass::Zero, catalog.d0},
                                                      {DensityClass::Corner, catalog.d_corner},
                                                      {DensityClass::Flat, catalog.d_flat}}};
    std::sort(c.begin(), c.end(), [phi0](const auto& a, const auto& b) {
        return std::fabs(phi0 - a.second) < std::fabs(phi0 - b.second);
    });
    DensityMatch m;
    m.nearest = c[0].first;
    m.nearest_value = c[0].second;
    m.runner_up = c[1].first;
    const double spacing = std::fabs(c[1].second - c[0].second);
    m.margin = (std::fabs(phi0 - c[1].second) - std::fabs(phi0 - c[0].second)) / spacing;
    m.resolved = std::isfinite(phi0) && m.margin >= required_margin && sigma <= required_margin * spacing;
    return m;
}

namespace {

double speed(const ScalarField2D& field, double x) {
    return norm2(field.gradient({x, 0.0})) / (x * x);
}

bool on_boundary(const ScalarField2D& field, double x, double step, double thr) {
    if (field.value({x, 0.0}) > thr) return false;
    constexpr int kDirections = 16;
    for (int k = 0; k < kDirections; ++k) {
        const double th = (k + 0.5) * 2.0 * std::numbers::pi / kDirections;
        for (double scale : {0.5, 1.0}) {
            const Point2 p{x + scale * step * std::cos(th), scale * step * std::sin(th)};
            if (field.window().contains(p) && field.value(p) > thr) return true;
        }
    }
    return false;
}

struct SpeedParams {
    const ScalarField2D* field;
};

double speed_gsl(double x, void* params) { return speed(*static_cast<SpeedParams*>(params)->field, x); }

// Brent refinement of a bracketed minimum of the speed; falls back to the scan point.
double refine_minimum(const ScalarField2D& field, double a, double m, double b) {
    const double fa = speed(field, a), fm = speed(field, m), fb = speed(field, b);
    if (!(fm < fa && fm < fb)) return m;
    SpeedParams params{&field};
    gsl_function F{&speed_gsl, &params};
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    gsl_min_fminimizer* s = gsl_min_fminimizer_alloc(gsl_min_fminimizer_brent);
    double x = m;
    if (gsl_min_fminimizer_set_with_values(s, &F, m, fm, a, fa, b, fb) == GSL_SUCCESS) {
        for (int it = 0; it < 100; ++it) {
            if (gsl_min_fminimizer_iterate(s) != GSL_SUCCESS) break;
            x = gsl_min_fminimizer_x_minimum(s);
            const double lo = gsl_min_fminimizer_x_lower(s), hi = gsl_min_fminimizer_x_upper(s);
            if (gsl_min_test_interval(lo, hi, 1e-12, 0.0) == GSL_SUCCESS) break;
        }
    }
    gsl_min_fminimizer_free(s);
    gsl_set_error_handler(old);
    return x;
}

// Isolated contact between the zero set and the axis: rescan [a, b] with finer steps and boundary
// radii until the boundary points pin the contact down, then take their midpoint.
double zoom_contact(const ScalarField2D& field, double a, double b, double step, double thr) {
    double x = 0.5 * (a + b);
    for (int level = 0; level < 40 && step > 1e-12 * std::max(1.0, std::abs(x)); ++level) {
        const double fine = step / 8.0;
        double lo = b, hi = a;
        for (double t = a; t <= b + 0.5 * fine; t += fine)
            if (on_boundary(field, t, fine, thr)) {
                lo = std::min(lo, t);
                hi = std::max(hi, t);
            }
        if (lo > hi) break;
        x = 0.5 * (lo + hi);
        a = lo - fine;
        b = hi + fine;
        step = fine;
    }
    return x;
}

}  // namespace

std::vector<Point2> detect_stagnation_points(const ScalarField2D& field, const DetectionConfig& config) {
    const Box& w = field.window();
    std::vector<Point2> out;
    if (!(w.ymin < 0.0 && w.ymax > 0.0)) return out;
    const double lo = std::max(w.xmin, 0.0), hi = w.xmax;
    if (!(hi > lo)) return out;
    const int cells = std::max(config.scan_cells, 8);
    const double step = std::max(field.spacing(), (hi - lo) / cells);
    std::vector<double> xs;
    for (double x = lo + step; x < hi - 0.5 * step; x += step) xs.push_back(x);

    // Runs of consecutive boundary points; each run contributes its local speed minima.
    std::size_t i = 0;
    while (i < xs.size()) {
        if (!on_boundary(field, xs[i], step, config.threshold)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < xs.size() && on_boundary(field, xs[j + 1], step, config.threshold)) ++j;
        std::vector<double> s;
        for (std::size_t k = i; k <= j; ++k) s.push_back(speed(field, xs[k]));
        const double smin = *std::min_element(s.begin(), s.end());
        std::size_t k = 0;
        while (k < s.size()) {
            // Plateau of equal values; keep it when no neighbour is lower.
            std::size_t e = k;
            while (e + 1 < s.size() && s[e + 1] == s[k]) ++e;
            const bool left_ok = k == 0 || s[k - 1] > s[k];
            const bool right_ok = e + 1 == s.size() || s[e + 1] > s[k];
            const bool interior = k > 0 && e + 1 < s.size();
            // Edge minima of a run only count as candidates when they are the run minimum.
            if (left_ok && right_ok && (interior || s[k] == smin)) {
                const std::size_t mid = (k + e) / 2;
                double x = xs[i + mid];
                if (k == e && interior) x = refine_minimum(field, xs[i + k - 1], x, xs[i + k + 1]);
                else if (j - i < 4 && k == 0 && e == j - i)
                    x = zoom_contact(field, xs[i] - step, xs[j] + step, step, config.threshold);
                out.push_back({x, 0.0});
            }
            k = e + 1;
        }
        i = j + 1;
    }
    return out;
}

StagnationPointReport classify_stagnation_point(const ScalarField2D& field, const Vorticity& vort, Point2 X0,
                                                const ClassifierConfig& config) {
    StagnationPointReport rep;
    rep.X0 = X0;
    const AnalysisWindow window = AnalysisWindow::make(field, X0, config.r_max, config.q, config.count);
    if (window.delta < 1e3 * field.fd_step()) throw WindowError("admissible radius too small for the radius grid");

    rep.gradient_screen = gradient_screen_value(field, X0);
    bool nondegenerate = rep.gradient_screen >= config.screen * window.r_max;
    // Spline fields carry O(h) gradient error at the free-surface kink. There the screen must also be
    // comparable to its mean on a circle two cells out, which a genuine stagnation point is not.
    if (nondegenerate && field.spacing() > 0.0 && 2.0 * field.spacing() < window.delta) {
        const double rho = 2.0 * field.spacing();
        constexpr int kDirections = 32;
        double ring = 0.0;
        for (int k = 0; k < kDirections; ++k) {
            const double th = (k + 0.5) * 2.0 * std::numbers::pi / kDirections;
            ring += norm2(field.gradient({X0.x + rho * std::cos(th), X0.y + rho * std::sin(th)}));
        }
        ring /= kDirections * X0.x * X0.x;
        if (rep.gradient_screen < kGridScreenFraction * ring) {
            nondegenerate = false;
            rep.diagnostics.push_back("gradient screen " + fmt_double(rep.gradient_screen) +
                                      " attributed to grid resolution (ring mean " + fmt_double(ring) + ")");
        }
    }
    if (nondegenerate) {
        rep.label = PointLabel::Nondegenerate;
        rep.diagnostics.push_back("gradient screen " + fmt_double(rep.gradient_screen) + " above threshold");
        return rep;
    }

    if (field.spacing() > 0.0 && window.radii.back() < 2.0 * field.spacing())
        rep.diagnostics.push_back("smallest radius " + fmt_double(window.radii.back()) +
                                  " is below two grid cells; small-r values reflect the spline");
    const RadialProfile profile = profile_sweep(field, vort, window, config.spec);
    // Per-radius notes, collapsed to one line per distinct message.
    std::vector<std::pair<std::string, int>> notes;
    for (const auto& rec : profile.records)
        for (const auto& d : rec.diagnostics) {
            auto it = std::find_if(notes.begin(), notes.end(), [&](const auto& n) { return n.first == d; });
            if (it == notes.end()) notes.emplace_back(d, 1);
            else ++it->second;
        }
    for (const auto& [msg, n] : notes) rep.diagnostics.push_back(msg + " (" + std::to_string(n) + " entries)");

    try {
        const Extrapolation phi = extrapolate_zero_limit(column(profile, Column::Phi));
        rep.phi0 = Estimate{phi.limit, phi.uncertainty};
    } catch (const InsufficientData& e) {
        rep.label = PointLabel::Unresolved;
        rep.diagnostics.push_back(std::string("density extrapolation failed: ") + e.what());
        return rep;
    }
    try {
        const Extrapolation h = extrapolate_zero_limit(column(profile, Column::H));
        rep.H0 = Estimate{h.limit, h.uncertainty};
    } catch (const InsufficientData& e) {
        rep.diagnostics.push_back(std::string("frequency extrapolation failed: ") + e.what());
    }

    const DensityCatalog catalog(X0.x);
    rep.density = match_density(catalog, rep.phi0->value, rep.phi0->sigma, config.margin);

    if (config.run_identities) {
        VerifyOptions vo;
        vo.suite = Suite::Exact;
        const VerifyReport vr = run_verify_suite(field, vort, X0, config.spec, vo);
        IdentitySummary s;
        for (const auto& r : vr.residuals) {
            if (!r.asserted || r.excluded) continue;
            ++s.checks;
            s.max_rel_residual = std::max(s.max_rel_residual, r.rel_residual);
        }
        s.failures = vr.failures;
        rep.identities = s;
    }

    if (!rep.density->resolved) {
        rep.label = PointLabel::Unresolved;
        rep.diagnostics.push_back("density " + fmt_double(rep.phi0->value) + " within the guard band (margin " +
                                  fmt_double(rep.density->margin) + ")");
        return rep;
    }

    const double frame_r = std::clamp(config.frame_r, window.radii.back(), window.r_max);
    switch (rep.density->nearest) {
        case DensityClass::Zero:
            rep.label = PointLabel::CuspOrZeroDensity;
            break;
        case DensityClass::Corner: {
            rep.label = PointLabel::StokesCorner;
            try {
                const BlowupFrame frame = rescale_phi(field, X0, frame_r, config.spec);
                rep.profile_distance.emplace_back("corner",
                                                  limit_profile_distance(frame, {LimitProfileKind::Corner}, config.spec.quad));
            } catch (const std::exception& e) {
                rep.diagnostics.push_back(std::string("corner frame failed: ") + e.what());
            }
            break;
        }
        case DensityClass::Flat: {
            rep.frequency_ran = true;
            try {
                rep.homogeneity = fit_homogeneity(profile, field.value(X0), config.spec.positivity_threshold);
            } catch (const InsufficientData& e) {
                rep.diagnostics.push_back(std::string("homogeneity fit failed: ") + e.what());
            }
            if (!rep.H0) {
                rep.label = PointLabel::Unresolved;
                rep.diagnostics.push_back("flat density without a frequency limit");
                break;
            }
            rep.N = std::max(2, static_cast<int>(std::lround(rep.H0->value)));
            rep.N_gap = std::fabs(rep.H0->value - rep.N);
            try {
                const BlowupFrame frame = rescale_phi(field, X0, frame_r, config.spec);
                rep.profile_distance.emplace_back(
                    "frequency-" + std::to_string(rep.N),
                    limit_profile_distance(frame, {LimitProfileKind::FrequencyN, rep.N}, config.spec.quad));
            } catch (const std::exception& e) {
                rep.diagnostics.push_back(std::string("frequency frame failed: ") + e.what());
            }
            rep.nodal_jump = nodal_ray_laplacian(rep.N);
            rep.label = PointLabel::HorizontalFlatExcluded;
            if (rep.N_gap > 0.25) rep.diagnostics.push_back("frequency limit is far from an integer");
            break;
        }
    }
    return rep;
}

FlatSetSummary flat_set_finiteness_probe(const ScalarField2D& field, const std::vector<StagnationPointReport>& reports,
                                         double resolution) {
    FlatSetSummary s;
    s.resolution = resolution;
    const Box& w = field.window();
    s.scanned_length = w.xmax - std::max(w.xmin, 0.0);
    std::vector<double> xs;
    for (const auto& r : reports)
        if (r.label == PointLabel::HorizontalFlatExcluded) xs.push_back(r.X0.x);
    std::sort(xs.begin(), xs.end());
    s.flat_count = static_cast<int>(xs.size());
    s.per_unit_length = s.scanned_length > 0.0 ? s.flat_count / s.scanned_length : 0.0;
    s.min_separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < xs.size(); ++i) s.min_separation = std::min(s.min_separation, xs[i] - xs[i - 1]);
    if (s.flat_count == 0) {
        s.notes.push_back("no flat candidates");
    } else if (s.min_separation < resolution) {
        s.separated = false;
        s.notes.push_back("flat candidates " + fmt_double(s.min_separation) +
                          " apart, closer than the blow-up resolution " + fmt_double(resolution) +
                          "; a blow-up at twice their distance would carry two flat points");
    }
    return s;
}

}  // namespace stagpoint
