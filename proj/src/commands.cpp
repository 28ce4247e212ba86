#include "stagpoint/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "stagpoint/format.hpp"
#include "stagpoint/serialize.hpp"
#include "stagpoint/svg.hpp"

namespace stagpoint {

using nlohmann::ordered_json;

namespace {

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return std::filesystem::path(cfg.out_dir) / name;
}

void write_text(const RunConfig& cfg, const std::string& name, const std::string& text, std::ostream& log) {
    const auto p = out_path(cfg, name);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
    log << "wrote " << p.string() << '\n';
}

void write_json(const RunConfig& cfg, const std::string& name, const ordered_json& j, std::ostream& log) {
    write_text(cfg, name, j.dump(2) + "\n", log);
}

// Configured point, else (x0, 0) for synthetic fields, else the first detected candidate.
Point2 analysis_point(const RunConfig& cfg, const ScalarField2D& field) {
    if (cfg.point) return *cfg.point;
    if (cfg.source == FieldSource::Synthetic) return {cfg.x0, 0.0};
    const auto pts = detect_stagnation_points(field, {cfg.threshold, cfg.scan_cells});
    if (pts.empty()) throw ConfigError("no analysis point given and none detected on the axis");
    return pts.front();
}

AnalysisWindow window_for(const RunConfig& cfg, const ScalarField2D& field, Point2 X0) {
    return X0.y == 0.0 ? AnalysisWindow::make(field, X0, cfg.r_max, cfg.q, cfg.count)
                       : AnalysisWindow::probe(field, X0, cfg.r_max, cfg.q, cfg.count);
}

void log_limit(std::ostream& log, const char* name, const RadialProfile& profile, Column c) {
    try {
        const Extrapolation e = extrapolate_zero_limit(column(profile, c));
        log << name << "(0+) = " << fmt_double(e.limit) << " +- " << fmt_sci(e.uncertainty) << '\n';
    } catch (const InsufficientData& e) {
        log << name << "(0+): " << e.what() << '\n';
    }
}

}  // namespace

int cmd_synth(const RunConfig& cfg, std::ostream& log) {
    if (cfg.source != FieldSource::Synthetic) throw ConfigError("synth needs a synthetic field");
    const ScalarField2D field = build_field(cfg);
    const GridData grid = sample_to_grid(field, cfg.synth_nx, cfg.synth_ny, field.window());
    const bool csv = cfg.synth_grid_format == "csv";
    std::ostringstream o;
    write_grid(o, grid, csv ? GridFormat::Csv : GridFormat::Text);
    write_text(cfg, field.label() + (csv ? ".csv" : ".grid"), o.str(), log);
    return kExitOk;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& log) {
    const ScalarField2D field = build_field(cfg);
    const Vorticity vort = build_vorticity(cfg);
    const Point2 X0 = analysis_point(cfg, field);
    const AnalysisWindow window = window_for(cfg, field, X0);
    const RadialProfile profile = profile_sweep(field, vort, window, cfg.eval_spec());

    if (cfg.wants("csv")) {
        std::ostringstream o;
        write_profile_csv(o, profile);
        write_text(cfg, "profile.csv", o.str(), log);
    }
    if (cfg.wants("json")) write_json(cfg, "profile.json", profile_json(profile), log);
    if (cfg.wants("svg")) {
        const DensityCatalog cat(X0.x);
        write_text(cfg, "phi.svg", svg_log_plot("adjusted energy", "Phi", column(profile, Column::Phi), cat.d_corner), log);
        write_text(cfg, "D.svg", svg_log_plot("frequency D", "D", column(profile, Column::D)), log);
        write_text(cfg, "V.svg", svg_log_plot("density correction V", "V", column(profile, Column::V), 0.0), log);
        write_text(cfg, "H.svg", svg_log_plot("frequency H", "H", column(profile, Column::H)), log);
    }
    int warnings = 0;
    for (const auto& rec : profile.records)
        if (rec.degenerate || !rec.ok) ++warnings;
    if (warnings > 0) log << "warning: " << warnings << " of " << profile.records.size() << " radii degenerate or incomplete\n";
    log_limit(log, "Phi", profile, Column::Phi);
    log_limit(log, "H", profile, Column::H);
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
    const ScalarField2D field = build_field(cfg);
    const Vorticity vort = build_vorticity(cfg);
    const Point2 X0 = analysis_point(cfg, field);
    VerifyOptions opts;
    opts.suite = cfg.suite;
    opts.tolerance = cfg.tolerance;
    const VerifyReport rep = run_verify_suite(field, vort, X0, cfg.eval_spec(), opts);
    if (cfg.wants("csv")) {
        std::ostringstream o;
        write_residuals_csv(o, rep);
        write_text(cfg, "residuals.csv", o.str(), log);
    }
    if (cfg.wants("json")) write_json(cfg, "verify.json", verify_json(rep), log);
    int checks = 0;
    for (const auto& r : rep.residuals)
        if (r.asserted && !r.excluded) ++checks;
    log << "suite " << suite_string(rep.suite) << ": " << checks << " pointwise checks, " << rep.sequences.size()
        << " sequences, " << rep.failures << " failures, " << rep.excluded << " excluded\n";
    for (const auto& r : rep.residuals)
        if (r.asserted && !r.excluded && !r.pass)
            log << "FAIL " << r.identity << " r=" << fmt_double(r.r) << " rel=" << fmt_sci(r.rel_residual) << " tol="
                << fmt_sci(r.tolerance) << '\n';
    for (const auto& s : rep.sequences)
        if (!s.pass) log << "FAIL sequence " << s.name << " order " << fmt_double(s.decay.order) << '\n';
    for (const auto& d : rep.diagnostics) log << "note: " << d << '\n';
    return rep.ok() ? kExitOk : kExitFailure;
}

int cmd_blowup(const RunConfig& cfg, std::ostream& log) {
    const ScalarField2D field = build_field(cfg);
    const Vorticity vort = build_vorticity(cfg);
    const Point2 X0 = analysis_point(cfg, field);
    const EvalSpec spec = cfg.eval_spec();
    const AnalysisWindow window = window_for(cfg, field, X0);
    const RadialProfile profile = profile_sweep(field, vort, window, spec);

    ordered_json j;
    j["point"] = {{"x", X0.x}, {"y", X0.y}};
    j["field"] = field.label();
    int code = kExitOk;
    double degree = std::nan("");
    try {
        const HomogeneityEstimate h = fit_homogeneity(profile, field.value(X0), spec.positivity_threshold);
        degree = h.degree;
        j["homogeneity"] = homogeneity_json(h);
        log << "homogeneity degree " << fmt_double(h.degree) << " (slope method " << fmt_double(h.slope.degree)
            << ", residual " << fmt_sci(h.residual) << ")" << (h.flagged ? " FLAGGED" : "") << '\n';
        for (const auto& f : h.flags) log << "flag: " << f << '\n';
        if (h.flagged) code = kExitFailure;
    } catch (const InsufficientData& e) {
        j["homogeneity"] = nullptr;
        log << "homogeneity fit unavailable: " << e.what() << '\n';
        code = kExitFailure;
    }

    std::vector<double> radii = cfg.blowup_radii;
    if (radii.empty()) {
        for (double r : {1e-1, 1e-2}) radii.push_back(r * X0.x);
        radii.push_back(window.radii.back());
    }
    const int N = std::isfinite(degree) ? std::max(2, static_cast<int>(std::lround(degree))) : 2;
    ordered_json frames = ordered_json::array();
    for (double r : radii) {
        ordered_json fj;
        fj["r"] = r;
        try {
            const BlowupFrame frame = rescale_phi(field, X0, r, spec);
            fj["normalization"] = frame.normalization;
            fj["boundary_norm"] = frame.boundary_norm(spec.quad);
            ordered_json d;
            d["corner"] = limit_profile_distance(frame, {LimitProfileKind::Corner}, spec.quad);
            for (int n : {N, N + 1}) {
                const LimitProfile p{LimitProfileKind::FrequencyN, n};
                d[p.describe()] = limit_profile_distance(frame, p, spec.quad);
            }
            fj["profile_distance"] = std::move(d);
            fj["annulus_residual"] = number_or_null(annulus_homogeneity_residual(frame, N, spec.quad));
            fj["annulus_degree"] = N;
            const RescaledField psi32 = rescale_psi32(field, X0, r);
            fj["psi32_corner_distance"] =
                limit_profile_distance(psi32, {LimitProfileKind::Corner, 0, ProfileScaling::Physical}, spec.quad);
        } catch (const std::exception& e) {
            fj["error"] = e.what();
        }
        frames.push_back(std::move(fj));
    }
    j["frames"] = std::move(frames);
    j["nodal_jump"] = {{"N", N}, {"value", nodal_ray_laplacian(N)}, {"signed_control", nodal_ray_laplacian(N, true)}};
    if (cfg.wants("json")) write_json(cfg, "blowup.json", j, log);
    return code;
}

int cmd_classify(const RunConfig& cfg, std::ostream& log) {
    const ScalarField2D field = build_field(cfg);
    const Vorticity vort = build_vorticity(cfg);
    std::vector<Point2> points;
    if (cfg.point) points.push_back(*cfg.point);
    else if (cfg.source == FieldSource::Synthetic) points.push_back({cfg.x0, 0.0});
    else points = detect_stagnation_points(field, {cfg.threshold, cfg.scan_cells});

    ClassifierConfig cc;
    cc.spec = cfg.eval_spec();
    cc.r_max = cfg.r_max;
    cc.q = cfg.q;
    cc.count = cfg.count;
    cc.margin = cfg.margin;

    std::vector<StagnationPointReport> reports;
    int code = kExitOk;
    for (const Point2& p : points) {
        try {
            reports.push_back(classify_stagnation_point(field, vort, p, cc));
        } catch (const WindowError& e) {
            StagnationPointReport r;
            r.X0 = p;
            r.diagnostics.push_back(e.what());
            reports.push_back(std::move(r));
        }
        if (reports.back().label == PointLabel::Unresolved) code = kExitFailure;
        log << point_report_text(reports.back());
    }
    if (points.empty()) log << "no stagnation candidates detected\n";
    const FlatSetSummary flat = flat_set_finiteness_probe(field, reports, cfg.resolution);
    for (const auto& n : flat.notes) log << "flat set: " << n << '\n';

    ordered_json j;
    j["field"] = field.label();
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) arr.push_back(point_report_json(r));
    j["points"] = std::move(arr);
    j["flat_set"] = flat_summary_json(flat);
    if (cfg.wants("json")) write_json(cfg, "classify.json", j, log);
    return code;
}

int run_command(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    try {
        cfg.validate();
        if (cfg.command == "synth") return cmd_synth(cfg, log);
        if (cfg.command == "analyze") return cmd_analyze(cfg, log);
        if (cfg.command == "verify") return cmd_verify(cfg, log);
        if (cfg.command == "blowup") return cmd_blowup(cfg, log);
        if (cfg.command == "classify") return cmd_classify(cfg, log);
        throw ConfigError("unknown command '" + cfg.command + "'");
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidSpec& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParseError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace stagpoint
