#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stagpoint/classifier.hpp"

namespace stagpoint {

enum class FieldSource { Synthetic, Grid };
enum class VorticityKind { Effective, Zero, Linear, Table };

struct RunConfig {
    std::string command;

    FieldSource source = FieldSource::Synthetic;
    std::string profile = "degenerate-N";
    double x0 = 1.0;
    int N = 2;
    double lambda = 1.5;
    int angular_k = 1;  // custom-homogeneous: angular part |sin(k theta)| on the upper half-plane
    std::string grid_path;
    GridFormat grid_format = GridFormat::Auto;

    VorticityKind vorticity = VorticityKind::Effective;
    double vorticity_C = 0.0;
    std::string vorticity_table;

    std::optional<Point2> point;  // analysis point; defaults to (x0, 0) for synthetic fields, detection for grids
    double r_max = 0.0;
    double q = 0.8;
    int count = 40;

    QuadratureSpec quad;
    double threshold = 0.0;

    Suite suite = Suite::Auto;
    double tolerance = 0.0;  // > 0 overrides every verification tolerance

    std::vector<double> blowup_radii;  // empty selects 1e-1, 1e-2 and the smallest grid radius within reach

    double margin = 0.25;
    double resolution = 1e-3;
    int scan_cells = 4000;

    int synth_nx = 401;
    int synth_ny = 401;
    std::string synth_grid_format = "text";

    std::string out_dir = ".";
    std::vector<std::string> formats{"csv", "json", "svg"};

    bool wants(const std::string& fmt) const;
    EvalSpec eval_spec() const { return EvalSpec{quad, threshold}; }
    void validate() const;  // ConfigError on violations
};

// Flat key-value file with [sections]; unknown keys are rejected.
RunConfig load_config(const std::string& path, RunConfig base = {});
void apply_config_value(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value);

std::vector<std::string> split_list(const std::string& s);
Point2 parse_point(const std::string& s);

ScalarField2D build_field(const RunConfig& cfg);
Vorticity build_vorticity(const RunConfig& cfg);

}  // namespace stagpoint
