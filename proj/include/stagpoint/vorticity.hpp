#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "stagpoint/field.hpp"

namespace stagpoint {

// Nonlinearity f with primitive F and growth bound |f(z)| <= C z on (0, z0).
struct VorticityModel {
    std::string name = "zero";
    std::function<double(double)> f;
    std::function<double(double)> F;
    double C = 0.0;
    double z0 = 1.0;

    static VorticityModel zero();
    static VorticityModel linear(double C);
    // Piecewise-linear f through (z, f) pairs with f(0) = 0 prepended when missing; F integrates exactly.
    static VorticityModel table(std::vector<std::pair<double, double>> points);

    // Samples (0, z0) and reports whether |f(z)| <= C z (with a small relative slack) and F(0) = 0.
    bool satisfies_growth_bound(int samples = 257) const;
};

std::vector<std::pair<double, double>> load_vorticity_table(const std::string& path);

// What the functionals use in place of f(psi): either a model or the field's own effective vorticity.
class Vorticity {
public:
    Vorticity();
    Vorticity(VorticityModel model);  // NOLINT: implicit on purpose
    static Vorticity effective(double h = 0.0);

    bool is_effective() const { return effective_; }
    const VorticityModel& model() const { return model_; }
    double fd_step() const { return h_; }
    std::string describe() const;

    // f(psi) for a model, g(p) for the effective wrapper.
    double value(const ScalarField2D& field, Point2 p, double psi) const;
    // F(psi); only meaningful for a model.
    double primitive(double psi) const;

private:
    VorticityModel model_;
    bool effective_ = false;
    double h_ = 0.0;
};

}  // namespace stagpoint
