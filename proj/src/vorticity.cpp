#include "stagpoint/vorticity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "stagpoint/format.hpp"

namespace stagpoint {

VorticityModel VorticityModel::zero() {
    VorticityModel m;
    m.name = "zero";
    m.f = [](double) { return 0.0; };
    m.F = [](double) { return 0.0; };
    m.C = 0.0;
    return m;
}

VorticityModel VorticityModel::linear(double C) {
    if (!(C >= 0.0)) throw InvalidSpec("linear vorticity needs C >= 0");
    VorticityModel m;
    m.name = "linear(" + fmt_double(C) + ")";
    m.f = [C](double z) { return C * z; };
    m.F = [C](double z) { return 0.5 * C * z * z; };
    m.C = C;
    return m;
}

VorticityModel VorticityModel::table(std::vector<std::pair<double, double>> points) {
    std::sort(points.begin(), points.end());
    if (points.empty() || points.front().first != 0.0) points.insert(points.begin(), {0.0, 0.0});
    if (points.size() < 2) throw InvalidSpec("vorticity table needs at least one nonzero node");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].first > points[i - 1].first)) throw InvalidSpec("vorticity table abscissae must increase");
    auto pts = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(points));
    // Cumulative primitive at nodes.
    auto cum = std::make_shared<std::vector<double>>(pts->size(), 0.0);
    for (std::size_t i = 1; i < pts->size(); ++i)
        (*cum)[i] = (*cum)[i - 1] + 0.5 * ((*pts)[i].second + (*pts)[i - 1].second) * ((*pts)[i].first - (*pts)[i - 1].first);
    auto locate = [pts](double z) {
        auto it = std::upper_bound(pts->begin(), pts->end(), z, [](double v, const auto& p) { return v < p.first; });
        std::size_t i = it == pts->begin() ? 0 : static_cast<std::size_t>(it - pts->begin()) - 1;
        return std::min(i, pts->size() - 2);
    };
    VorticityModel m;
    m.name = "table";
    m.f = [pts, locate](double z) {
        std::size_t i = locate(z);
        const auto& a = (*pts)[i];
        const auto& b = (*pts)[i + 1];
        return a.second + (b.second - a.second) * (z - a.first) / (b.first - a.first);
    };
    m.F = [pts, cum, locate](double z) {
        std::size_t i = locate(z);
        const auto& a = (*pts)[i];
        const auto& b = (*pts)[i + 1];
        const double slope = (b.second - a.second) / (b.first - a.first);
        const double t = z - a.first;
        return (*cum)[i] + a.second * t + 0.5 * slope * t * t;
    };
    double C = 0.0;
    for (std::size_t i = 1; i < pts->size(); ++i) C = std::max(C, std::fabs((*pts)[i].second) / (*pts)[i].first);
    m.C = C;
    m.z0 = pts->back().first;
    return m;
}

bool VorticityModel::satisfies_growth_bound(int samples) const {
    if (!f || !F) return false;
    if (F(0.0) != 0.0) return false;
    for (int i = 1; i <= samples; ++i) {
        const double z = z0 * i / (samples + 1.0);
        if (std::fabs(f(z)) > C * z * (1.0 + 1e-12) + 1e-300) return false;
    }
    return true;
}

std::vector<std::pair<double, double>> load_vorticity_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open vorticity table '" + path + "'");
    std::vector<std::pair<double, double>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double z, f;
        if (!(ss >> z >> f)) throw ParseError("bad vorticity table line '" + line + "'");
        out.emplace_back(z, f);
    }
    if (out.empty()) throw ParseError("empty vorticity table");
    return out;
}

Vorticity::Vorticity() : model_(VorticityModel::zero()) {}
Vorticity::Vorticity(VorticityModel model) : model_(std::move(model)) {}

Vorticity Vorticity::effective(double h) {
    Vorticity v;
    v.effective_ = true;
    v.h_ = h;
    v.model_.name = "effective";
    return v;
}

std::string Vorticity::describe() const { return effective_ ? "effective" : model_.name; }

double Vorticity::value(const ScalarField2D& field, Point2 p, double psi) const {
    if (effective_) return effective_vorticity(field, p, h_);
    return model_.f(psi);
}

double Vorticity::primitive(double psi) const {
    if (effective_) throw PreconditionError("effective vorticity has no primitive");
    return model_.F(psi);
}

}  // namespace stagpoint
