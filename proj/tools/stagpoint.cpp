// stagpoint command-line driver.
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "stagpoint/commands.hpp"

using namespace stagpoint;

int main(int argc, char** argv) {
    CLI::App app{"Stagnation-point analysis of axisymmetric stream functions"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path, out_dir, formats, profile, grid, point, vorticity, suite;
    double rmax = 0.0, tol = 0.0, x0 = 1.0, C = 0.0;
    int radii = 40, N = 2;

    app.add_option("--config", config_path, "Config file ([section] key = value)");
    app.add_option("--out", out_dir, "Output directory (default $STAGPOINT_OUT_DIR or .)");
    app.add_option("--format", formats, "Comma list of csv,json,svg");
    app.add_option("--radii", radii, "Number of radii in the geometric grid");
    app.add_option("--rmax", rmax, "Largest radius");
    app.add_option("--tol", tol, "Tolerance overriding every verification check");
    app.add_option("--profile", profile, "Synthetic profile (stokes-corner, degenerate-N, degenerate-3, ...)");
    app.add_option("--x0", x0, "Axis offset of the synthetic profile");
    app.add_option("--N", N, "Degree of the degenerate-N profile");
    app.add_option("--grid", grid, "Grid file to load instead of a synthetic profile");
    app.add_option("--point", point, "Analysis point x,y");
    app.add_option("--vorticity", vorticity, "effective | zero | linear | table");
    app.add_option("--C", C, "Coefficient of the linear vorticity model");
    app.add_option("--suite", suite, "Verification suite: auto | exact | stagnation");

    for (const char* name : {"synth", "analyze", "verify", "blowup", "classify"}) app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    RunConfig cfg;
    try {
        if (const char* env = std::getenv("STAGPOINT_OUT_DIR"); env && *env) cfg.out_dir = env;
        if (!config_path.empty()) cfg = load_config(config_path, cfg);
        cfg.command = app.get_subcommands().front()->get_name();
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!formats.empty()) cfg.formats = split_list(formats);
        auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
        if (given("--radii")) cfg.count = radii;
        if (given("--rmax")) cfg.r_max = rmax;
        if (given("--tol")) {
            if (!(tol > 0.0)) throw ConfigError("tolerances must be positive");
            cfg.tolerance = tol;
        }
        if (!profile.empty()) {
            apply_config_value(cfg, "field", "profile", profile);
            cfg.source = FieldSource::Synthetic;
        }
        if (given("--x0")) cfg.x0 = x0;
        if (given("--N")) cfg.N = N;
        if (!grid.empty()) apply_config_value(cfg, "field", "grid", grid);
        if (!point.empty()) cfg.point = parse_point(point);
        if (!vorticity.empty()) apply_config_value(cfg, "vorticity", "model", vorticity);
        if (given("--C")) cfg.vorticity_C = C;
        if (!suite.empty()) apply_config_value(cfg, "verify", "suite", suite);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return run_command(cfg, std::cout, std::cerr);
}
