#include "stagpoint/serialize.hpp"

#include <cmath>
#include <sstream>

#include "stagpoint/format.hpp"

namespace stagpoint {

using nlohmann::ordered_json;

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

namespace {

std::string csv_number(double v) { return std::isfinite(v) ? fmt_double(v) : (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")); }

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
    return out;
}

std::vector<std::string> record_diagnostics(const RadialRecord& rec) {
    std::vector<std::string> d = rec.diagnostics;
    if (rec.degenerate) d.insert(d.begin(), "degenerate");
    if (rec.precision_limited) d.push_back("precision-limited V (noise " + fmt_sci(rec.V_noise) + ")");
    return d;
}

ordered_json point_json(Point2 p) { return ordered_json{{"x", p.x}, {"y", p.y}}; }

ordered_json residual_json(const Residual& r) {
    ordered_json j;
    j["identity"] = r.identity;
    j["r"] = r.r;
    j["lhs"] = number_or_null(r.lhs);
    j["rhs"] = number_or_null(r.rhs);
    j["abs_residual"] = number_or_null(r.abs_residual);
    j["rel_residual"] = number_or_null(r.rel_residual);
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["excluded"] = r.excluded;
    j["asserted"] = r.asserted;
    if (r.fd_convergence != 0.0) {
        j["fd_plain"] = number_or_null(r.fd_plain);
        j["fd_convergence"] = number_or_null(r.fd_convergence);
    }
    j["note"] = r.note;
    return j;
}

}  // namespace

void write_profile_csv(std::ostream& out, const RadialProfile& profile) {
    out << kProfileCsvHeader << '\n';
    for (const auto& rec : profile.records) {
        const double vals[] = {rec.r,   rec.core.I, rec.core.J, rec.core.K, rec.core.I1, rec.core.I2, rec.core.J1, rec.Phi,
                               rec.M,   rec.D,      rec.V,      rec.Vtilde, rec.Z,       rec.H,       rec.Y};
        for (double v : vals) out << csv_number(v) << ',';
        out << csv_quote(join(record_diagnostics(rec), "; ")) << '\n';
    }
}

ordered_json profile_json(const RadialProfile& profile) {
    ordered_json j;
    j["point"] = point_json(profile.X0);
    j["field"] = profile.field_label;
    j["vorticity"] = profile.vorticity_label;
    ordered_json rows = ordered_json::array();
    for (const auto& rec : profile.records) {
        ordered_json row;
        row["r"] = rec.r;
        row["I"] = number_or_null(rec.core.I);
        row["J"] = number_or_null(rec.core.J);
        row["K"] = number_or_null(rec.core.K);
        row["I1"] = number_or_null(rec.core.I1);
        row["I2"] = number_or_null(rec.core.I2);
        row["J1"] = number_or_null(rec.core.J1);
        row["Phi"] = number_or_null(rec.Phi);
        row["M"] = number_or_null(rec.M);
        row["D"] = number_or_null(rec.D);
        row["V"] = number_or_null(rec.V);
        row["Vtilde"] = number_or_null(rec.Vtilde);
        row["Z"] = number_or_null(rec.Z);
        row["H"] = number_or_null(rec.H);
        row["Y"] = number_or_null(rec.Y);
        row["diagnostics"] = record_diagnostics(rec);
        rows.push_back(std::move(row));
    }
    j["records"] = std::move(rows);
    return j;
}

void write_residuals_csv(std::ostream& out, const VerifyReport& report) {
    out << "identity,r,lhs,rhs,abs_residual,rel_residual,tolerance,pass,excluded,asserted,note\n";
    auto row = [&](const Residual& r) {
        out << r.identity << ',' << csv_number(r.r) << ',' << csv_number(r.lhs) << ',' << csv_number(r.rhs) << ','
            << csv_number(r.abs_residual) << ',' << csv_number(r.rel_residual) << ',' << csv_number(r.tolerance) << ','
            << (r.pass ? 1 : 0) << ',' << (r.excluded ? 1 : 0) << ',' << (r.asserted ? 1 : 0) << ',' << csv_quote(r.note)
            << '\n';
    };
    for (const auto& r : report.residuals) row(r);
    for (const auto& s : report.sequences)
        for (const auto& r : s.rows) row(r);
}

ordered_json verify_json(const VerifyReport& report) {
    ordered_json j;
    j["point"] = point_json(report.X0);
    j["suite"] = suite_string(report.suite);
    j["field"] = report.field_label;
    j["vorticity"] = report.vorticity_label;
    j["failures"] = report.failures;
    j["excluded"] = report.excluded;
    ordered_json rows = ordered_json::array();
    for (const auto& r : report.residuals) rows.push_back(residual_json(r));
    j["residuals"] = std::move(rows);
    ordered_json seqs = ordered_json::array();
    for (const auto& s : report.sequences) {
        ordered_json q;
        q["name"] = s.name;
        q["decay_order"] = s.decay.vanishing ? ordered_json("vanishing") : number_or_null(s.decay.order);
        q["max_abs_smallest_decade"] = s.max_abs_smallest_decade;
        q["min_order"] = s.min_order;
        q["pass"] = s.pass;
        if (!s.note.empty()) q["note"] = s.note;
        ordered_json rr = ordered_json::array();
        for (const auto& r : s.rows) rr.push_back(residual_json(r));
        q["rows"] = std::move(rr);
        seqs.push_back(std::move(q));
    }
    j["sequences"] = std::move(seqs);
    if (report.has_k_bound) {
        const auto& k = report.k_bound;
        j["k_bound"] = {{"C0", number_or_null(k.C0)},
                        {"lower_bound_holds", k.lower_bound_holds},
                        {"growth_bound_holds", k.growth_bound_holds},
                        {"failing_radii", k.failing_radii}};
    }
    if (report.has_y_convexity) {
        const auto& y = report.y_convexity;
        j["y_convexity"] = {{"min_slope_increment", number_or_null(y.min_slope_increment)},
                            {"min_inequality_margin", number_or_null(y.min_inequality_margin)},
                            {"convex", y.convex},
                            {"inequality_holds", y.inequality_holds},
                            {"tolerance", y.tolerance}};
    }
    j["diagnostics"] = report.diagnostics;
    return j;
}

ordered_json homogeneity_json(const HomogeneityEstimate& h) {
    auto fit = [](const HomogeneityFit& f) {
        return ordered_json{{"method", homogeneity_method_string(f.method)},
                            {"degree", number_or_null(f.degree)},
                            {"residual", number_or_null(f.residual)},
                            {"r_min", f.r_min},
                            {"r_max", f.r_max},
                            {"samples", f.samples}};
    };
    ordered_json j;
    j["degree"] = number_or_null(h.degree);
    j["residual"] = number_or_null(h.residual);
    j["method"] = homogeneity_method_string(h.method);
    j["r_range"] = {h.r_min, h.r_max};
    j["slope"] = fit(h.slope);
    j["plateau"] = fit(h.plateau);
    j["disagreement"] = number_or_null(h.disagreement);
    j["flagged"] = h.flagged;
    j["flags"] = h.flags;
    return j;
}

ordered_json point_report_json(const StagnationPointReport& r) {
    ordered_json j;
    j["point"] = point_json(r.X0);
    if (r.phi0) j["phi0"] = {{"value", number_or_null(r.phi0->value)}, {"sigma", number_or_null(r.phi0->sigma)}};
    else j["phi0"] = nullptr;
    j["density_class"] = r.density ? ordered_json(density_class_string(r.density->nearest)) : ordered_json(nullptr);
    j["margin"] = r.density ? number_or_null(r.density->margin) : ordered_json(nullptr);
    if (r.H0) j["H0"] = {{"value", number_or_null(r.H0->value)}, {"sigma", number_or_null(r.H0->sigma)}};
    else j["H0"] = nullptr;
    j["N"] = r.N > 0 ? ordered_json(r.N) : ordered_json(nullptr);
    j["N_gap"] = r.N > 0 ? number_or_null(r.N_gap) : ordered_json(nullptr);
    ordered_json pd = ordered_json::object();
    for (const auto& [name, v] : r.profile_distance) pd[name] = number_or_null(v);
    j["profile_distance"] = std::move(pd);
    j["nodal_jump"] = r.nodal_jump;
    j["label"] = point_label_string(r.label);
    j["gradient_screen"] = number_or_null(r.gradient_screen);
    j["homogeneity"] = r.homogeneity ? homogeneity_json(*r.homogeneity) : ordered_json(nullptr);
    if (r.identities)
        j["identities"] = {{"checks", r.identities->checks},
                           {"failures", r.identities->failures},
                           {"max_rel_residual", number_or_null(r.identities->max_rel_residual)}};
    else j["identities"] = nullptr;
    j["diagnostics"] = r.diagnostics;
    return j;
}

ordered_json flat_summary_json(const FlatSetSummary& s) {
    return ordered_json{{"flat_count", s.flat_count},
                        {"scanned_length", s.scanned_length},
                        {"per_unit_length", s.per_unit_length},
                        {"min_separation", number_or_null(s.min_separation)},
                        {"resolution", s.resolution},
                        {"separated", s.separated},
                        {"notes", s.notes}};
}

std::string point_report_text(const StagnationPointReport& r) {
    std::ostringstream o;
    o << "point (" << fmt_double(r.X0.x) << ", " << fmt_double(r.X0.y) << "): " << point_label_string(r.label) << '\n';
    if (r.phi0)
        o << "  density " << fmt_double(r.phi0->value) << " +- " << fmt_sci(r.phi0->sigma);
    if (r.density)
        o << " nearest " << density_class_string(r.density->nearest) << " (margin " << fmt_sci(r.density->margin) << ")";
    if (r.phi0) o << '\n';
    if (r.H0) o << "  frequency " << fmt_double(r.H0->value) << " +- " << fmt_sci(r.H0->sigma) << '\n';
    if (r.N > 0) o << "  N = " << r.N << ", nodal jump " << fmt_double(r.nodal_jump) << '\n';
    for (const auto& [name, v] : r.profile_distance) o << "  distance to " << name << " profile " << fmt_sci(v) << '\n';
    if (r.identities)
        o << "  identities " << r.identities->checks - r.identities->failures << "/" << r.identities->checks << " pass\n";
    for (const auto& d : r.diagnostics) o << "  note: " << d << '\n';
    return o.str();
}

}  // namespace stagpoint
