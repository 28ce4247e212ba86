#include "stagpoint/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace stagpoint {

bool RunConfig::wants(const std::string& fmt) const {
    return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

void RunConfig::validate() const {
    if (source == FieldSource::Synthetic) {
        if (!(x0 > 0.0) || !std::isfinite(x0)) throw ConfigError("x0 must be positive");
        if (N < 2) throw ConfigError("N must be at least 2");
        if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
        if (angular_k < 1) throw ConfigError("angular_k must be at least 1");
    } else if (grid_path.empty()) {
        throw ConfigError("grid source needs a grid path");
    } else if (!std::ifstream(grid_path)) {
        throw ConfigError("grid file '" + grid_path + "' does not exist");
    }
    if (vorticity == VorticityKind::Table) {
        if (vorticity_table.empty()) throw ConfigError("table vorticity needs a table path");
        if (!std::ifstream(vorticity_table)) throw ConfigError("vorticity table '" + vorticity_table + "' does not exist");
    }
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("q must lie in (0, 1)");
    if (count < 6) throw ConfigError("count must be at least 6");
    if (r_max < 0.0) throw ConfigError("r_max must be non-negative");
    if (tolerance < 0.0 || !std::isfinite(tolerance)) throw ConfigError("tolerances must be positive");
    if (threshold < 0.0) throw ConfigError("positivity threshold must be non-negative");
    if (!(margin > 0.0 && margin < 1.0)) throw ConfigError("density margin must lie in (0, 1)");
    if (!(resolution > 0.0)) throw ConfigError("resolution must be positive");
    if (synth_nx < 2 || synth_ny < 2) throw ConfigError("synthetic grid needs at least 2 nodes per axis");
    for (double r : blowup_radii)
        if (!(r > 0.0)) throw ConfigError("blow-up radii must be positive");
    for (const auto& f : formats)
        if (f != "csv" && f != "json" && f != "svg") throw ConfigError("unknown output format '" + f + "'");
    try {
        quad.validate();
    } catch (const InvalidSpec& e) {
        throw ConfigError(e.what());
    }
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, ',')) {
        const auto b = cur.find_first_not_of(" \t");
        const auto e = cur.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
    }
    return out;
}

namespace {

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != std::floor(d) || std::fabs(d) > 1e9) throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

GridFormat to_grid_format(const std::string& v) {
    if (v == "auto") return GridFormat::Auto;
    if (v == "text") return GridFormat::Text;
    if (v == "csv") return GridFormat::Csv;
    throw ConfigError("unknown grid format '" + v + "'");
}

}  // namespace

Point2 parse_point(const std::string& s) {
    const auto parts = split_list(s);
    if (parts.size() != 2) throw ConfigError("point must be 'x,y', got '" + s + "'");
    return {to_double("point", parts[0]), to_double("point", parts[1])};
}

void apply_config_value(RunConfig& c, const std::string& section, const std::string& key, const std::string& v) {
    const std::string k = section.empty() ? key : section + "." + key;
    if (k == "field.source") {
        if (v == "synthetic") c.source = FieldSource::Synthetic;
        else if (v == "grid") c.source = FieldSource::Grid;
        else throw ConfigError("field.source must be synthetic or grid");
    } else if (k == "field.profile") {
        // "degenerate-3" is shorthand for profile degenerate-N with N = 3.
        const std::string prefix = "degenerate-";
        if (v.rfind(prefix, 0) == 0 && v != "degenerate-N") {
            c.profile = "degenerate-N";
            c.N = to_int(k, v.substr(prefix.size()));
        } else {
            try {
                parse_profile_name(v);
            } catch (const InvalidSpec& e) {
                throw ConfigError(e.what());
            }
            c.profile = v;
        }
    } else if (k == "field.x0") {
        c.x0 = to_double(k, v);
    } else if (k == "field.N") {
        c.N = to_int(k, v);
    } else if (k == "field.lambda") {
        c.lambda = to_double(k, v);
    } else if (k == "field.angular_k") {
        c.angular_k = to_int(k, v);
    } else if (k == "field.grid") {
        c.grid_path = v;
        c.source = FieldSource::Grid;
    } else if (k == "field.grid_format") {
        c.grid_format = to_grid_format(v);
    } else if (k == "vorticity.model") {
        if (v == "effective") c.vorticity = VorticityKind::Effective;
        else if (v == "zero") c.vorticity = VorticityKind::Zero;
        else if (v == "linear") c.vorticity = VorticityKind::Linear;
        else if (v == "table") c.vorticity = VorticityKind::Table;
        else throw ConfigError("vorticity.model must be effective, zero, linear or table");
    } else if (k == "vorticity.C") {
        c.vorticity_C = to_double(k, v);
    } else if (k == "vorticity.table") {
        c.vorticity_table = v;
    } else if (k == "window.point") {
        c.point = parse_point(v);
    } else if (k == "window.r_max") {
        c.r_max = to_double(k, v);
    } else if (k == "window.q") {
        c.q = to_double(k, v);
    } else if (k == "window.count") {
        c.count = to_int(k, v);
    } else if (k == "quadrature.circle_nodes") {
        c.quad.circle_nodes = to_int(k, v);
    } else if (k == "quadrature.disk_radial_nodes") {
        c.quad.disk_radial_nodes = to_int(k, v);
    } else if (k == "quadrature.disk_angular_nodes") {
        c.quad.disk_angular_nodes = to_int(k, v);
    } else if (k == "quadrature.cutoff_fraction") {
        c.quad.cutoff_fraction = to_double(k, v);
    } else if (k == "quadrature.monitor") {
        c.quad.monitor = to_bool(k, v);
    } else if (k == "quadrature.threshold") {
        c.threshold = to_double(k, v);
    } else if (k == "verify.suite") {
        c.suite = parse_suite(v);
    } else if (k == "verify.tol") {
        c.tolerance = to_double(k, v);
        if (!(c.tolerance > 0.0)) throw ConfigError("tolerances must be positive");
    } else if (k == "blowup.radii") {
        c.blowup_radii.clear();
        for (const auto& s : split_list(v)) c.blowup_radii.push_back(to_double(k, s));
    } else if (k == "classify.margin") {
        c.margin = to_double(k, v);
    } else if (k == "classify.resolution") {
        c.resolution = to_double(k, v);
    } else if (k == "classify.scan_cells") {
        c.scan_cells = to_int(k, v);
    } else if (k == "synth.nx") {
        c.synth_nx = to_int(k, v);
    } else if (k == "synth.ny") {
        c.synth_ny = to_int(k, v);
    } else if (k == "synth.format") {
        if (v != "text" && v != "csv") throw ConfigError("synth.format must be text or csv");
        c.synth_grid_format = v;
    } else if (k == "output.dir") {
        c.out_dir = v;
    } else if (k == "output.format") {
        c.formats = split_list(v);
    } else {
        throw ConfigError("unknown config key '" + k + "'");
    }
}

RunConfig load_config(const std::string& path, RunConfig base) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("cannot read config '" + path + "': " + e.message());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("config keys must sit inside a [section]: '" + section + "'");
        for (const auto& [key, node] : body) apply_config_value(base, section, key, node.get_value<std::string>());
    }
    return base;
}

ScalarField2D build_field(const RunConfig& cfg) {
    if (cfg.source == FieldSource::Grid) return load_grid(cfg.grid_path, cfg.grid_format);
    SyntheticProfileSpec s;
    s.name = parse_profile_name(cfg.profile);
    s.x0 = cfg.x0;
    s.N = cfg.N;
    s.lambda = cfg.lambda;
    if (s.name == ProfileName::CustomHomogeneous) {
        const int k = cfg.angular_k;
        s.angular = [k](double th) { return th > 0.0 ? std::fabs(std::sin(k * th)) : 0.0; };
        s.angular_derivative = [k](double th) {
            if (!(th > 0.0)) return 0.0;
            const double sn = std::sin(k * th), cs = std::cos(k * th);
            return k * cs * (sn >= 0.0 ? 1.0 : -1.0);
        };
    }
    return make_synthetic(s);
}

Vorticity build_vorticity(const RunConfig& cfg) {
    switch (cfg.vorticity) {
        case VorticityKind::Effective: return Vorticity::effective();
        case VorticityKind::Zero: return VorticityModel::zero();
        case VorticityKind::Linear: return VorticityModel::linear(cfg.vorticity_C);
        case VorticityKind::Table: return VorticityModel::table(load_vorticity_table(cfg.vorticity_table));
    }
    return Vorticity::effective();
}

}  // namespace stagpoint
