#include "stagpoint/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stagpoint/format.hpp"

namespace stagpoint {

double relative_residual(double lhs, double rhs) {
    return std::fabs(lhs - rhs) / (1.0 + std::max(std::fabs(lhs), std::fabs(rhs)));
}

Residual make_residual(std::string name, double r, double lhs, double rhs, double tolerance) {
    Residual res;
    res.identity = std::move(name);
    res.r = r;
    res.lhs = lhs;
    res.rhs = rhs;
    res.abs_residual = std::fabs(lhs - rhs);
    res.rel_residual = relative_residual(lhs, rhs);
    res.tolerance = tolerance;
    res.pass = res.rel_residual <= tolerance;
    return res;
}

Residual check_energy_identity(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r,
                               const EvalSpec& spec, double tol) {
    const RadiusMoments m = radius_moments(field, vort, X0, r, spec);
    return make_residual("energy", r, m.grad_energy - m.vort_energy, m.cross, tol);
}

Residual check_rellich_identity(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r,
                                const EvalSpec& spec, double tol) {
    const RadiusMoments m = radius_moments(field, vort, X0, r, spec);
    return make_residual("rellich", r, r * m.psi2, m.rellich_volume, tol);
}

namespace {

double resolve_step(const ScalarField2D& field, Point2 X0, double r, double h) {
    if (h <= 0.0) h = 1e-3 * r;
    if (!(h < 0.25 * r)) throw PreconditionError("finite-difference step must be below r/4");
    const double delta = admissible_radius(field, X0);
    if (!(r + h < delta))
        throw PreconditionError("r + h = " + fmt_double(r + h) + " exceeds the admissible radius " + fmt_double(delta));
    return h;
}

bool crosses_jump(const ScalarField2D& field, Point2 X0, double r, double h, const EvalSpec& spec) {
    return positive_node_count(field, X0, r - h, spec) != positive_node_count(field, X0, r + h, spec);
}

struct CenteredFD {
    double richardson;
    double plain;  // step h
    double half;   // step h/2
};

template <class Fn>
CenteredFD centered_fd(Fn&& f, double r, double h) {
    const double d1 = (f(r + h) - f(r - h)) / (2.0 * h);
    const double d2 = (f(r + 0.5 * h) - f(r - 0.5 * h)) / h;
    return {(4.0 * d2 - d1) / 3.0, d1, d2};
}

void attach_fd(Residual& res, const CenteredFD& fd) {
    res.fd_plain = fd.plain;
    const double e1 = std::fabs(fd.plain - res.rhs), e2 = std::fabs(fd.half - res.rhs);
    res.fd_convergence = e2 > 0.0 ? e1 / e2 : std::numeric_limits<double>::infinity();
}

void mark_jump(Residual& res) {
    res.excluded = true;
    res.note = "jump-crossing radius: positivity pattern on the circle changes within the FD stencil";
}

}  // namespace

Residual check_weiss_derivative(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r, double h,
                                const EvalSpec& spec, double tol) {
    h = resolve_step(field, X0, r, h);
    const RadiusMoments m = radius_moments(field, vort, X0, r, spec);
    const CoreFunctionals c = core_from_moments(m);
    const double r3 = r * r * r, r4 = r3 * r, r5 = r4 * r;
    const double rhs = 2.0 * m.weiss_square / r3 + (c.I1 + c.I2) / r4 + 1.5 * c.J1 / r5 + c.K / r4;
    const CenteredFD fd = centered_fd(
        [&](double t) { return weiss_energy(core_functionals(field, vort, X0, t, spec)); }, r, h);
    Residual res = make_residual("weiss_derivative", r, fd.richardson, rhs, tol);
    attach_fd(res, fd);
    if (crosses_jump(field, X0, r, h, spec)) mark_jump(res);
    return res;
}

FrequencyDerivativeCheck check_frequency_derivative_both(const ScalarField2D& field, const Vorticity& vort, Point2 X0,
                                                         double r, double h, const EvalSpec& spec, double tol,
                                                         double mutual_tol) {
    h = resolve_step(field, X0, r, h);
    const RadialRecord rec = evaluate_radius(field, vort, X0, r, spec);
    if (rec.degenerate) throw DegenerateDenominator("J(r) vanishes at r = " + fmt_double(r));
    const double S = rec.S;
    const double sqD = frequency_square(field, X0, r, rec.D, spec);
    const double sqH = frequency_square(field, X0, r, rec.H, spec);
    const double common = 2.0 / r * rec.V * (rec.H - 1.5) + rec.Z / r * (rec.H - 1.5) + rec.core.K / S;
    const double rhs_d = 2.0 / r * sqD / S + 2.0 / r * rec.V * rec.V + common;
    const double rhs_h = 2.0 / r * sqH / S + common;

    const CenteredFD fd = centered_fd(
        [&](double t) {
            const RadialRecord q = evaluate_radius(field, vort, X0, t, spec);
            if (q.degenerate) throw DegenerateDenominator("J vanishes inside the FD stencil");
            return q.H;
        },
        r, h);
    const bool jump = crosses_jump(field, X0, r, h, spec);

    FrequencyDerivativeCheck out;
    out.d_form = make_residual("frequency_derivative_D", r, fd.richardson, rhs_d, tol);
    out.h_form = make_residual("frequency_derivative_H", r, fd.richardson, rhs_h, tol);
    attach_fd(out.d_form, fd);
    attach_fd(out.h_form, fd);
    out.mutual = make_residual("frequency_forms_agree", r, rhs_d, rhs_h, mutual_tol);
    if (jump) {
        mark_jump(out.d_form);
        mark_jump(out.h_form);
    }
    for (const auto& d : rec.diagnostics) {
        out.d_form.note += (out.d_form.note.empty() ? "" : "; ") + d;
        out.h_form.note += (out.h_form.note.empty() ? "" : "; ") + d;
    }
    return out;
}

Residual check_frequency_derivative(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r, double h,
                                    FrequencyForm form, const EvalSpec& spec, double tol) {
    FrequencyDerivativeCheck both = check_frequency_derivative_both(field, vort, X0, r, h, spec, tol);
    return form == FrequencyForm::DForm ? both.d_form : both.h_form;
}

KBoundReport check_K_bound(const ScalarField2D& field, const Vorticity& vort, Point2 X0, const std::vector<double>& radii,
                           const EvalSpec& spec) {
    KBoundReport rep;
    rep.growth_bound_holds = vort.is_effective() || vort.model().satisfies_growth_bound();
    for (double r : radii) {
        const RadiusMoments m = radius_moments(field, vort, X0, r, spec);
        KBoundRow row;
        row.r = r;
        row.boundary = r * m.psi2;
        row.volume = m.psi2_volume;
        row.K = r * m.k_boundary + m.k_volume;
        row.lower_bound_holds = row.boundary >= row.volume * (1.0 - 1e-12);
        if (!row.lower_bound_holds) {
            rep.lower_bound_holds = false;
            rep.failing_radii.push_back(r);
        }
        if (row.boundary > 0.0) rep.C0 = std::max(rep.C0, std::fabs(row.K) / (r * row.boundary));
        rep.rows.push_back(row);
    }
    return rep;
}

namespace {

void finish_sequence(SequenceCheck& s) {
    Samples samples;
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        double v = s.rows[i].lhs - s.rows[i].rhs;
        if (i < s.magnitude.size() && std::fabs(v) <= kCancellationFloor * s.magnitude[i]) v = 0.0;
        samples.emplace_back(s.rows[i].r, v);
    }
    try {
        s.decay = fit_decay_order(samples, 0.0);
    } catch (const InsufficientData& e) {
        // Divergent improper integrals (base point off the zero set) leave nothing to fit.
        s.decay.order = std::nan("");
        s.note = e.what();
    }
    for (const auto& p : smallest_decade(samples)) s.max_abs_smallest_decade = std::max(s.max_abs_smallest_decade, std::fabs(p.second));
    s.pass = s.decay.vanishing || s.decay.order >= s.min_order;
    for (auto& row : s.rows) {
        row.asserted = false;
        row.pass = true;
    }
}

std::vector<double> increasing(std::vector<double> radii) {
    std::sort(radii.begin(), radii.end());
    return radii;
}

}  // namespace

SequenceCheck check_V_decomposition(const ScalarField2D& field, Point2 X0, const std::vector<double>& radii,
                                    const EvalSpec& spec) {
    SequenceCheck s;
    s.name = "V_decomposition";
    const Vorticity zero = VorticityModel::zero();
    for (double r : radii) {
        const RadialRecord rec = evaluate_radius(field, zero, X0, r, spec);
        if (rec.degenerate) throw DegenerateDenominator("J(r) vanishes at r = " + fmt_double(r));
        if (rec.precision_limited) continue;
        s.rows.push_back(make_residual(s.name, r, rec.V, rec.Vtilde + 0.5 * rec.Z, 0.0));
        s.magnitude.push_back(rec.V_noise / kDeficitRoundoff);
    }
    finish_sequence(s);
    return s;
}

std::vector<SequenceCheck> check_small_r_identities(const ScalarField2D& field, Point2 X0,
                                                    const std::vector<double>& radii, const EvalSpec& spec) {
    SequenceCheck A, B, C;
    A.name = "small_r_A";
    B.name = "small_r_B";
    C.name = "small_r_C";
    const Vorticity zero = VorticityModel::zero();
    for (double r : radii) {
        const RadiusMoments m = radius_moments(field, zero, X0, r, spec);
        const ImproperTerms t = improper_terms(field, X0, r, spec);
        const double r4 = r * r * r * r, r5 = r4 * r;
        A.rows.push_back(make_residual(A.name, r, m.i1 / r4 + m.j1 / r5, 0.0, 0.0));
        A.magnitude.push_back(m.i1_magnitude / r4 + m.j1_magnitude / r5);
        B.rows.push_back(make_residual(B.name, r, t.i2.value / r - m.i2_plus / r4, 0.0, 0.0));
        B.magnitude.push_back(2.0 * m.i2_plus_magnitude / r4);
        C.rows.push_back(make_residual(C.name, r, t.j1.value / r - m.j1 / r5, 0.0, 0.0));
        C.magnitude.push_back(2.0 * m.j1_magnitude / r5);
    }
    finish_sequence(A);
    finish_sequence(B);
    finish_sequence(C);
    return {A, B, C};
}

YConvexityReport check_Y_convexity(const ScalarField2D& field, Point2 X0, const std::vector<double>& radii,
                                   const EvalSpec& spec, double tol) {
    YConvexityReport rep;
    rep.tolerance = tol;
    rep.radii = increasing(radii);
    if (rep.radii.size() < 3) throw InsufficientData("convexity check needs at least 3 radii");
    const int nc = circle_node_count(spec.quad, false);
    auto S = [&](double t) {
        return circle_integral_n<1>(
            [&](const RingNode& n) {
                const double psi = field.value(n.p);
                return std::array<double, 1>{psi * psi / n.p.x};
            },
            X0, t, nc)[0];
    };
    auto Y = [&](double r) { return improper_radial_integral(S, r, 3, spec.quad).value; };
    for (double r : rep.radii) {
        rep.Y.push_back(Y(r));
        const CenteredFD fd = centered_fd(Y, r, 1e-3 * r);
        rep.Y_prime.push_back(fd.richardson);
    }
    const std::size_t n = rep.radii.size();
    std::vector<double> g(n), slope(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = rep.Y[i] / std::sqrt(rep.radii[i]);
    double scale = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        slope[i] = (g[i + 1] - g[i]) / (rep.radii[i + 1] - rep.radii[i]);
        scale = std::max(scale, std::fabs(slope[i]));
    }
    rep.min_slope_increment = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 2 < n; ++i)
        rep.min_slope_increment = std::min(rep.min_slope_increment, scale > 0.0 ? (slope[i + 1] - slope[i]) / scale : 0.0);
    double yscale = 0.0;
    for (double v : rep.Y_prime) yscale = std::max(yscale, std::fabs(v));
    rep.min_inequality_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double margin = rep.Y_prime[i] - 1.5 * rep.Y[i] / rep.radii[i];
        rep.min_inequality_margin = std::min(rep.min_inequality_margin, yscale > 0.0 ? margin / yscale : 0.0);
    }
    rep.convex = rep.min_slope_increment >= -tol;
    rep.inequality_holds = rep.min_inequality_margin >= -tol;
    return rep;
}

Suite parse_suite(const std::string& s) {
    if (s == "auto") return Suite::Auto;
    if (s == "exact") return Suite::Exact;
    if (s == "stagnation") return Suite::Stagnation;
    throw ConfigError("unknown verify suite '" + s + "' (expected auto, exact or stagnation)");
}

std::string suite_string(Suite s) {
    switch (s) {
        case Suite::Auto: return "auto";
        case Suite::Exact: return "exact";
        case Suite::Stagnation: return "stagnation";
    }
    return "auto";
}

namespace {

double pick(double override_tol, double def) { return override_tol > 0.0 ? override_tol : def; }

void tally(VerifyReport& rep, const Residual& r) {
    if (r.excluded) {
        ++rep.excluded;
        return;
    }
    if (r.asserted && !r.pass) ++rep.failures;
}

}  // namespace

VerifyReport run_verify_suite(const ScalarField2D& field, const Vorticity& vort, Point2 X0, const EvalSpec& spec,
                              const VerifyOptions& opts) {
    VerifyReport rep;
    rep.X0 = X0;
    rep.field_label = field.label();
    rep.vorticity_label = vort.describe();
    rep.suite = opts.suite;
    const double delta = admissible_radius(field, X0);
    if (rep.suite == Suite::Auto) {
        const bool on_boundary = X0.y == 0.0 && field.value(X0) <= spec.positivity_threshold;
        rep.suite = on_boundary && !is_nondegenerate(field, X0, 0.5 * delta) ? Suite::Stagnation : Suite::Exact;
    }

    std::vector<double> radii = opts.radii;
    if (radii.empty()) {
        for (double f : {0.1, 0.05, 0.02}) {
            const double r = f * X0.x;
            if (r * (1.0 + 2e-3) < delta) radii.push_back(r);
        }
        if (radii.empty()) radii.push_back(0.25 * delta);
    }

    const double t_energy = pick(opts.tolerance, kDefaultEnergyTol);
    const double t_rellich = pick(opts.tolerance, kDefaultRellichTol);
    const double t_deriv = pick(opts.tolerance, kDefaultDerivativeTol);
    const double t_mutual = pick(opts.tolerance, kDefaultMutualTol);

    auto guarded = [&](const std::string& name, double r, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            Residual bad;
            bad.identity = name;
            bad.r = r;
            bad.lhs = bad.rhs = std::numeric_limits<double>::quiet_NaN();
            bad.pass = false;
            bad.note = std::string("error: ") + e.what();
            rep.residuals.push_back(bad);
        }
    };

    for (double r : radii) {
        guarded("energy", r, [&] { rep.residuals.push_back(check_energy_identity(field, vort, X0, r, spec, t_energy)); });
        guarded("rellich", r, [&] { rep.residuals.push_back(check_rellich_identity(field, vort, X0, r, spec, t_rellich)); });
        if (X0.y == 0.0)
            guarded("weiss_derivative", r,
                    [&] { rep.residuals.push_back(check_weiss_derivative(field, vort, X0, r, 0.0, spec, t_deriv)); });
    }

    if (rep.suite == Suite::Stagnation) {
        for (double r : radii) {
            guarded("frequency_derivative", r, [&] {
                auto both = check_frequency_derivative_both(field, vort, X0, r, 0.0, spec, t_deriv, t_mutual);
                rep.residuals.push_back(both.d_form);
                rep.residuals.push_back(both.h_form);
                rep.residuals.push_back(both.mutual);
            });
        }
        const AnalysisWindow w = AnalysisWindow::make(field, X0, 0.0, 0.8, opts.sequence_count);
        try {
            rep.k_bound = check_K_bound(field, vort, X0, w.radii, spec);
            rep.has_k_bound = true;
            if (!rep.k_bound.lower_bound_holds) ++rep.failures;
        } catch (const std::exception& e) {
            rep.diagnostics.push_back(std::string("K bound: ") + e.what());
            ++rep.failures;
        }
        try {
            rep.sequences.push_back(check_V_decomposition(field, X0, w.radii, spec));
            for (auto& s : check_small_r_identities(field, X0, w.radii, spec)) rep.sequences.push_back(std::move(s));
        } catch (const std::exception& e) {
            rep.diagnostics.push_back(std::string("sequence checks: ") + e.what());
            ++rep.failures;
        }
        for (const auto& s : rep.sequences)
            if (!s.pass) ++rep.failures;
        try {
            rep.y_convexity = check_Y_convexity(field, X0, w.radii, spec);
            rep.has_y_convexity = true;
            if (!rep.y_convexity.convex) ++rep.failures;
            if (!rep.y_convexity.inequality_holds) ++rep.failures;
        } catch (const std::exception& e) {
            rep.diagnostics.push_back(std::string("Y convexity: ") + e.what());
            ++rep.failures;
        }
    }

    for (const auto& r : rep.residuals) tally(rep, r);
    return rep;
}

}  // namespace stagpoint
