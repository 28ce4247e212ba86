#include "stagpoint/functionals.hpp"

#include <gsl/gsl_fit.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "stagpoint/format.hpp"

namespace stagpoint {

double admissible_radius(const ScalarField2D& field, Point2 X0) {
    const Box& w = field.window();
    if (!w.contains(X0)) throw WindowError("candidate point lies outside the field window");
    return 0.5 * std::min(X0.x, w.distance_to_boundary(X0));
}

double gradient_screen_value(const ScalarField2D& field, Point2 X0) {
    if (!(X0.x > 0.0)) throw WindowError("candidate point needs x0 > 0");
    return norm2(field.gradient(X0)) / (X0.x * X0.x);
}

bool is_nondegenerate(const ScalarField2D& field, Point2 X0, double y_scale) {
    return gradient_screen_value(field, X0) >= kNondegenerateScreen * y_scale;
}

namespace {

AnalysisWindow build_window(const ScalarField2D& field, Point2 X0, double r_max, double q, int count) {
    if (!(X0.x > 0.0)) throw WindowError("candidate point needs x0 > 0");
    if (!(q > 0.0 && q < 1.0)) throw InvalidSpec("radius ratio q must lie in (0, 1)");
    if (count < 1) throw InvalidSpec("radius grid needs at least one point");
    AnalysisWindow w;
    w.X0 = X0;
    w.delta = admissible_radius(field, X0);
    if (!(w.delta > 0.0)) throw WindowError("admissible radius is zero");
    w.r_max = r_max > 0.0 ? r_max : 0.5 * w.delta;
    if (!(w.r_max < w.delta)) throw WindowError("r_max must be smaller than the admissible radius " + fmt_double(w.delta));
    w.q = q;
    w.radii.resize(count);
    for (int j = 0; j < count; ++j) w.radii[j] = w.r_max * std::pow(q, j);
    return w;
}

inline double pos(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

AnalysisWindow AnalysisWindow::make(const ScalarField2D& field, Point2 X0, double r_max, double q, int count) {
    if (X0.y != 0.0) throw WindowError("stagnation candidates lie on the axis y = 0");
    return build_window(field, X0, r_max, q, count);
}

AnalysisWindow AnalysisWindow::probe(const ScalarField2D& field, Point2 X0, double r_max, double q, int count) {
    return build_window(field, X0, r_max, q, count);
}

RadiusMoments radius_moments(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r,
                             const EvalSpec& spec) {
    if (!(r > 0.0)) throw PreconditionError("radius must be positive");
    if (!field.window().contains_disk(X0, r)) throw DomainError("ball leaves the field window");
    const double x0 = X0.x;
    const double thr = spec.positivity_threshold;
    const bool eff = vort.is_effective();
    RadiusMoments m;
    m.r = r;

    auto disk = disk_integral_n<19>(
        [&](const RingNode& n) {
            const FieldSample s = field.sample(n.p);
            const double x = n.p.x, y = n.p.y, dx = n.rel.x;
            const double psi = s.value;
            const double g2 = norm2(s.gradient);
            const double chi = psi > thr ? 1.0 : 0.0;
            const double yp = pos(y), ym = pos(-y);
            const double radial = dot(n.rel, s.gradient);
            double gv = 0.0, F = 0.0;
            if (psi != 0.0 || g2 != 0.0) {
                gv = vort.value(field, n.p, psi);
                if (!eff) F = vort.primitive(psi);
            }
            const double e_grad = g2 / x;
            const double e_vort = x * psi * gv;
            std::array<double, 19> v;
            v[0] = e_grad;
            v[1] = e_vort;
            v[2] = x * y * chi;
            v[3] = -dx / (x * x) * g2;
            // The disk is symmetric about x = x0, so (x - x0) y+ integrates to zero. The density terms
            // are also evaluated with that part dropped; whichever form has the smaller magnitude is used.
            v[4] = dx * y * chi;
            v[5] = x * yp * (1.0 - chi);
            v[6] = x0 * yp * (1.0 - chi);
            v[7] = eff ? 2.0 * x * gv * radial : (2.0 * x0 - 6.0 * x) * F;
            v[8] = psi * psi / x;
            v[9] = 2.0 * psi * psi / x - dx / (x * x) * psi * psi + (e_grad - e_vort) * (r * r - n.radius * n.radius);
            v[10] = dx * yp * chi;
            v[11] = v[5];
            v[12] = std::fabs(dx) / (x * x) * g2;
            v[13] = std::fabs(dx) * yp * chi;
            v[14] = -dx * (yp * (1.0 - chi) + ym * chi);
            v[15] = std::fabs(dx * y) * chi;
            v[16] = std::fabs(dx) * (yp * (1.0 - chi) + ym * chi);
            v[17] = -dx * yp * (1.0 - chi);
            v[18] = std::fabs(dx) * yp * (1.0 - chi);
            return v;
        },
        X0, r, spec.quad.disk_radial_nodes, disk_angular_node_count(spec.quad, true));
    m.grad_energy = disk[0];
    m.vort_energy = disk[1];
    m.xy_chi = disk[2];
    m.i1 = disk[3];
    const bool i2_direct = disk[15] <= disk[16];
    m.i2 = i2_direct ? disk[4] : disk[14];
    m.density_deficit = disk[5];
    m.vtilde = disk[6];
    m.k_volume = disk[7];
    m.psi2_volume = disk[8];
    m.rellich_volume = disk[9];
    const bool i2p_direct = disk[13] <= disk[18];
    m.i2_plus = i2p_direct ? disk[10] : disk[17];
    m.deficit_magnitude = disk[11] + std::min(disk[15], disk[16]);
    m.i1_magnitude = disk[12];
    m.i2_plus_magnitude = std::min(disk[13], disk[18]);

    int positive = 0;
    const int nc = circle_node_count(spec.quad, false);
    auto circ = circle_integral_n<7>(
        [&](const RingNode& n) {
            const FieldSample s = field.sample(n.p);
            const double x = n.p.x, dx = n.rel.x;
            const double psi = s.value;
            const double dn = dot(s.gradient, n.normal);
            if (psi > thr) ++positive;
            double kb = 0.0;
            if (psi != 0.0) {
                const double gv = vort.value(field, n.p, psi);
                kb = eff ? -x * psi * gv : 2.0 * x * vort.primitive(psi) - x * psi * gv;
            }
            const double w = dn - 1.5 * psi / r;
            return std::array<double, 7>{psi * psi / x, dx / (x * x) * psi * psi, psi * dn / x, dn * dn / x, w * w / x,
                                         kb, std::fabs(dx) / (x * x) * psi * psi};
        },
        X0, r, nc);
    m.psi2 = circ[0];
    m.j1 = circ[1];
    m.cross = circ[2];
    m.dn2 = circ[3];
    m.weiss_square = circ[4];
    m.k_boundary = circ[5];
    m.j1_magnitude = circ[6];
    m.positive_nodes = positive;
    m.circle_nodes = nc;
    return m;
}

double frequency_square(const ScalarField2D& field, Point2 X0, double r, double c, const EvalSpec& spec) {
    auto v = circle_integral_n<1>(
        [&](const RingNode& n) {
            const FieldSample s = field.sample(n.p);
            const double w = r * dot(s.gradient, n.normal) - c * s.value;
            return std::array<double, 1>{w * w / n.p.x};
        },
        X0, r, circle_node_count(spec.quad, false));
    return v[0];
}

int positive_node_count(const ScalarField2D& field, Point2 X0, double r, const EvalSpec& spec) {
    auto rule = angular_rule(circle_node_count(spec.quad, false));
    int count = 0;
    for (std::size_t i = 0; i < rule->cos_t.size(); ++i)
        if (field.value({X0.x + r * rule->cos_t[i], X0.y + r * rule->sin_t[i]}) > spec.positivity_threshold) ++count;
    return count;
}

CoreFunctionals core_from_moments(const RadiusMoments& m) {
    const double r = m.r;
    CoreFunctionals c;
    c.r = r;
    c.I = (m.grad_energy - m.vort_energy + m.xy_chi) / (r * r * r);
    c.J = m.psi2 / (r * r * r * r);
    c.K = r * m.k_boundary + m.k_volume;
    c.I1 = m.i1;
    c.I2 = m.i2;
    c.J1 = m.j1;
    return c;
}

CoreFunctionals core_functionals(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r,
                                 const EvalSpec& spec) {
    const double delta = admissible_radius(field, X0);
    if (!(r < delta)) throw WindowError("r = " + fmt_double(r) + " is not below the admissible radius " + fmt_double(delta));
    return core_from_moments(radius_moments(field, vort, X0, r, spec));
}

double weiss_energy(const CoreFunctionals& core) { return core.I - 1.5 * core.J; }

namespace {

void require_denominator(double S, double r) {
    if (!(S / (r * r * r * r) >= kDenominatorFloor))
        throw DegenerateDenominator("J(r) below " + fmt_sci(kDenominatorFloor, 0) + " at r = " + fmt_double(r));
}

}  // namespace

FrequencyD frequency_D(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r, const EvalSpec& spec) {
    const RadiusMoments m = radius_moments(field, vort, X0, r, spec);
    require_denominator(m.psi2, r);
    FrequencyD d;
    d.volume = r * (m.grad_energy - m.vort_energy) / m.psi2;
    d.boundary = r * m.cross / m.psi2;
    d.energy_residual = std::fabs(d.volume - d.boundary) / (1.0 + std::max(std::fabs(d.volume), std::fabs(d.boundary)));
    return d;
}

ImproperTerms improper_terms(const ScalarField2D& field, Point2 X0, double r, const EvalSpec& spec) {
    const double thr = spec.positivity_threshold;
    const int nd = disk_angular_node_count(spec.quad, true);
    const int nc = circle_node_count(spec.quad, false);
    // Components: I1 integrand, I2 integrand in direct and complement form (see radius_moments), and
    // the magnitudes of the three.
    auto i12 = [&, thr](const RingNode& n) {
        const FieldSample s = field.sample(n.p);
        const double x = n.p.x, dx = n.rel.x, y = n.p.y;
        const double chi = s.value > thr ? 1.0 : 0.0;
        const double yp = pos(y), ym = pos(-y);
        const double g = dx / (x * x) * norm2(s.gradient);
        const double c = yp * (1.0 - chi) + ym * chi;
        return std::array<double, 6>{-g, dx * y * chi, -dx * c, std::fabs(g), std::fabs(dx * y) * chi, std::fabs(dx) * c};
    };
    auto pick = [](const std::array<double, 6>& v, bool magnitude) {
        const bool direct = v[4] <= v[5];
        if (magnitude) return std::vector<double>{v[3], direct ? v[4] : v[5]};
        return std::vector<double>{v[0], direct ? v[1] : v[2]};
    };
    RadialVectorFn A12 = [&](double t) { return pick(disk_integral_n<6>(i12, X0, t, spec.quad.disk_radial_nodes, nd), true); };
    RadialVectorFn Q12 = [&](double t) { return pick(disk_integral_n<6>(i12, X0, t, spec.quad.disk_radial_nodes, nd), false); };
    RadialVectorFn dQ12 = [&](double t) {
        auto rule = angular_rule(nd);
        return pick(ring_integral<6>(i12, X0, t, *rule), false);
    };
    RadialVectorFn Qjs = [&](double t) {
        auto v = circle_integral_n<2>(
            [&](const RingNode& n) {
                const double psi = field.value(n.p);
                const double x = n.p.x;
                return std::array<double, 2>{n.rel.x / (x * x) * psi * psi, psi * psi / x};
            },
            X0, t, nc);
        return std::vector<double>{v[0], v[1]};
    };
    RadialVectorFn Ajs = [&](double t) {
        auto v = circle_integral_n<2>(
            [&](const RingNode& n) {
                const double psi = field.value(n.p);
                const double x = n.p.x;
                return std::array<double, 2>{std::fabs(n.rel.x) / (x * x) * psi * psi, psi * psi / x};
            },
            X0, t, nc);
        return std::vector<double>{v[0], v[1]};
    };
    auto a = improper_radial_integrals(Q12, &dQ12, r, {4, 4}, spec.quad, &A12);
    auto b = improper_radial_integrals(Qjs, nullptr, r, {5, 3}, spec.quad, &Ajs);
    return {a[0], a[1], b[0], b[1]};
}

double V_of_r(const ScalarField2D& field, Point2 X0, double r, const EvalSpec& spec) {
    return evaluate_radius(field, VorticityModel::zero(), X0, r, spec).V;
}

double tildeV(const ScalarField2D& field, Point2 X0, double r, const EvalSpec& spec) {
    const RadiusMoments m = radius_moments(field, VorticityModel::zero(), X0, r, spec);
    require_denominator(m.psi2, r);
    return r * m.vtilde / m.psi2;
}

double Z_of_r(const ScalarField2D& field, Point2 X0, double r, const EvalSpec& spec) {
    const RadiusMoments m = radius_moments(field, VorticityModel::zero(), X0, r, spec);
    require_denominator(m.psi2, r);
    return m.j1 / m.psi2;
}

double H_of_r(double D, double V) { return D - V; }

double M_of_r(double I, const ImproperTerms& t) { return I - t.i1.value - t.i2.value - 1.5 * t.j1.value; }

double Y_of_r(const ImproperTerms& t) { return t.y.value; }

RadialRecord evaluate_radius(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r,
                             const EvalSpec& spec) {
    RadialRecord rec;
    rec.r = r;
    const RadiusMoments m = radius_moments(field, vort, X0, r, spec);
    rec.core = core_from_moments(m);
    rec.Phi = weiss_energy(rec.core);
    rec.S = m.psi2;

    const ImproperTerms t = improper_terms(field, X0, r, spec);
    rec.int_i1 = t.i1.value;
    rec.int_i2 = t.i2.value;
    rec.int_j1 = t.j1.value;
    rec.M = M_of_r(rec.core.I, t);
    rec.Y = Y_of_r(t);
    for (const auto* ii : {&t.i1, &t.i2, &t.j1, &t.y}) {
        rec.max_tail_fraction = std::max(rec.max_tail_fraction, std::isfinite(ii->tail_fraction) ? ii->tail_fraction : 1.0);
        if (!ii->warning.empty()) rec.diagnostics.push_back(ii->warning);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (!(rec.core.J >= kDenominatorFloor)) {
        rec.degenerate = true;
        rec.D = rec.D_boundary = rec.V = rec.Vtilde = rec.Z = rec.H = nan;
        rec.diagnostics.push_back("degenerate denominator: J = " + fmt_sci(rec.core.J));
    } else {
        const double S = m.psi2;
        rec.D = r * (m.grad_energy - m.vort_energy) / S;
        rec.D_boundary = r * m.cross / S;
        const double r4 = r * r * r * r;
        rec.V = (r * m.density_deficit + r4 * (t.i1.value + t.i2.value) + 1.5 * r4 * t.j1.value) / S;
        rec.Vtilde = r * m.vtilde / S;
        rec.Z = m.j1 / S;
        rec.H = H_of_r(rec.D, rec.V);
        rec.V_noise = kDeficitRoundoff * r * m.deficit_magnitude / S;
        if (rec.V_noise > kVNoiseLimit) {
            rec.precision_limited = true;
            rec.diagnostics.push_back("precision-limited: V roundoff estimate " + fmt_sci(rec.V_noise));
        }
    }
    rec.ok = std::isfinite(rec.Phi) && std::isfinite(rec.M) && std::isfinite(rec.Y) && !rec.degenerate;
    return rec;
}

RadialProfile profile_sweep(const ScalarField2D& field, const Vorticity& vort, const AnalysisWindow& window,
                            const EvalSpec& spec) {
    spec.quad.validate();
    RadialProfile prof;
    prof.X0 = window.X0;
    prof.field_label = field.label();
    prof.vorticity_label = vort.describe();
    prof.records.reserve(window.radii.size());
    for (double r : window.radii) {
        if (!(r < window.delta)) {
            RadialRecord bad;
            bad.r = r;
            bad.ok = false;
            bad.diagnostics.push_back("radius outside admissible range");
            prof.records.push_back(bad);
            continue;
        }
        try {
            prof.records.push_back(evaluate_radius(field, vort, window.X0, r, spec));
        } catch (const std::exception& e) {
            RadialRecord bad;
            bad.r = r;
            bad.ok = false;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            bad.core = {r, nan, nan, nan, nan, nan, nan};
            bad.Phi = bad.M = bad.D = bad.D_boundary = bad.V = bad.Vtilde = bad.Z = bad.H = bad.Y = bad.S = nan;
            bad.diagnostics.push_back(std::string("error: ") + e.what());
            prof.records.push_back(bad);
        }
    }
    return prof;
}

Samples column(const RadialProfile& profile, Column c, bool include_precision_limited) {
    Samples out;
    out.reserve(profile.records.size());
    const bool v_based = c == Column::V || c == Column::H;
    for (const auto& rec : profile.records) {
        if (v_based && rec.precision_limited && !include_precision_limited) continue;
        double v = 0.0;
        switch (c) {
            case Column::I: v = rec.core.I; break;
            case Column::J: v = rec.core.J; break;
            case Column::K: v = rec.core.K; break;
            case Column::I1: v = rec.core.I1; break;
            case Column::I2: v = rec.core.I2; break;
            case Column::J1: v = rec.core.J1; break;
            case Column::Phi: v = rec.Phi; break;
            case Column::M: v = rec.M; break;
            case Column::D: v = rec.D; break;
            case Column::D_boundary: v = rec.D_boundary; break;
            case Column::V: v = rec.V; break;
            case Column::Vtilde: v = rec.Vtilde; break;
            case Column::Z: v = rec.Z; break;
            case Column::H: v = rec.H; break;
            case Column::Y: v = rec.Y; break;
            case Column::S: v = rec.S; break;
        }
        out.emplace_back(rec.r, v);
    }
    return out;
}

Samples smallest_decade(const Samples& samples) {
    Samples finite;
    for (const auto& s : samples)
        if (std::isfinite(s.first) && std::isfinite(s.second) && s.first > 0.0) finite.push_back(s);
    if (finite.empty()) return finite;
    double rmin = finite.front().first;
    for (const auto& s : finite) rmin = std::min(rmin, s.first);
    Samples out;
    for (const auto& s : finite)
        if (s.first <= 10.0 * rmin * (1.0 + 1e-12)) out.push_back(s);
    std::sort(out.begin(), out.end());
    return out;
}

Extrapolation extrapolate_zero_limit(const Samples& samples) {
    const Samples dec = smallest_decade(samples);
    if (dec.size() < 4) throw InsufficientData("zero-limit extrapolation needs at least 4 finite samples in the smallest decade");
    std::vector<double> x, y;
    for (const auto& s : dec) {
        x.push_back(s.first);
        y.push_back(s.second);
    }
    double a, b, c00, c01, c11, sumsq;
    gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &a, &b, &c00, &c01, &c11, &sumsq);
    double resid = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) resid = std::max(resid, std::fabs(y[i] - (a + b * x[i])));
    Extrapolation e;
    e.limit = a;
    e.slope = b;
    e.fit_residual = resid;
    e.uncertainty = std::max(resid, std::fabs(b) * x.front());
    e.samples = static_cast<int>(x.size());
    e.r_min = x.front();
    e.r_max = x.back();
    return e;
}

DecayFit fit_decay_order(const Samples& samples, double floor) {
    const Samples dec = smallest_decade(samples);
    DecayFit fit;
    fit.samples = static_cast<int>(dec.size());
    if (dec.size() < 2) throw InsufficientData("decay fit needs at least 2 finite samples");
    std::vector<double> lx, ly;
    for (const auto& s : dec) {
        fit.max_abs = std::max(fit.max_abs, std::fabs(s.second));
        if (std::fabs(s.second) > floor) {
            lx.push_back(std::log(s.first));
            ly.push_back(std::log(std::fabs(s.second)));
        }
    }
    if (lx.size() < 2) {
        fit.vanishing = true;
        fit.order = std::numeric_limits<double>::infinity();
        return fit;
    }
    double a, b, c00, c01, c11, sumsq;
    gsl_fit_linear(lx.data(), 1, ly.data(), 1, lx.size(), &a, &b, &c00, &c01, &c11, &sumsq);
    fit.order = b;
    return fit;
}

MonotonicityReport monotonicity_constants(const RadialProfile& profile) {
    std::vector<const RadialRecord*> recs;
    for (const auto& r : profile.records)
        if (r.ok && !r.precision_limited) recs.push_back(&r);
    std::sort(recs.begin(), recs.end(), [](auto* a, auto* b) { return a->r < b->r; });
    if (recs.size() < 4) throw InsufficientData("monotonicity analysis needs at least 4 valid radii");
    MonotonicityReport rep;
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
        const double ra = recs[i]->r, rb = recs[i + 1]->r;
        const double Ja = recs[i]->core.J, Jb = recs[i + 1]->core.J;
        if (Ja > Jb) rep.beta = std::max(rep.beta, std::log(Ja / Jb) / (rb * rb - ra * ra));
    }
    Samples v2, z;
    for (const auto* r : recs) {
        rep.C1 = std::max(rep.C1, (1.5 - r->H) / (r->r * r->r));
        rep.C2 = std::max(rep.C2, std::fabs(r->Z) / r->r);
        v2.emplace_back(r->r, r->V * r->V / r->r);
        z.emplace_back(r->r, r->Z);
    }
    const double rmin = recs.front()->r;
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
        const double dr = recs[i + 1]->r - recs[i]->r;
        const double term = v2[i].second * dr;
        rep.v2_sum_full += term;
        if (recs[i]->r >= 100.0 * rmin * (1.0 - 1e-12)) rep.v2_sum_truncated += term;
    }
    const DecayFit vf = fit_decay_order(v2, 1e-300);
    rep.v2_exponent = vf.order;
    rep.v2_summable = vf.vanishing || vf.order > -1.0;
    const DecayFit zf = fit_decay_order(z, 1e-300);
    rep.z_order = zf.order;
    return rep;
}

}  // namespace stagpoint
