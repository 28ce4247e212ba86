#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stagpoint/geometry.hpp"

namespace stagpoint {

enum class FieldKind { AnalyticClosure, Grid };
enum class GradientMode { Analytic, CentralDifference };

struct FieldSample {
    double value = 0.0;
    Vec2 gradient;
};

// Uniform tensor grid; values[j * nx + i] is the sample at (x_i, y_j).
struct GridData {
    int nx = 0;
    int ny = 0;
    double xmin = 0.0;
    double xmax = 0.0;
    double ymin = 0.0;
    double ymax = 0.0;
    std::vector<double> values;

    double dx() const { return (xmax - xmin) / (nx - 1); }
    double dy() const { return (ymax - ymin) / (ny - 1); }
    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
};

// Stream function on a window of the right half-plane. Immutable and cheap to copy.
class ScalarField2D {
public:
    using ValueFn = std::function<double(Point2)>;
    using SampleFn = std::function<FieldSample(Point2)>;

    // Closed-form field. Without a sample function the gradient falls back to central differences.
    static ScalarField2D analytic(Box window, ValueFn value, SampleFn sample = {}, std::string label = "analytic");
    static ScalarField2D from_grid(GridData grid, std::string label = "grid");

    FieldKind kind() const;
    GradientMode gradient_mode() const;
    const Box& window() const;
    const std::string& label() const;
    // Node spacing for grid fields, 0 for analytic ones.
    double spacing() const;
    // Default central-difference step: max(1e-5, 1e-3 * spacing).
    double fd_step() const;
    // Step for differencing an analytic gradient (first differences only): fd_step / 100.
    double gradient_fd_step() const;
    const std::vector<std::string>& diagnostics() const;

    double value(Point2 p) const;
    Vec2 gradient(Point2 p) const;
    Vec2 gradient_fd(Point2 p, double h) const;
    FieldSample sample(Point2 p) const;

    // c * psi, sharing the underlying data.
    ScalarField2D scaled(double c) const;
    // Same field restricted to a smaller window.
    ScalarField2D restricted(Box window) const;

    struct Impl;

private:
    explicit ScalarField2D(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

double eval(const ScalarField2D& field, Point2 p);
Vec2 grad(const ScalarField2D& field, Point2 p);
Vec2 grad_fd(const ScalarField2D& field, Point2 p, double h);
int positivity_indicator(const ScalarField2D& field, Point2 p, double threshold = 0.0);
// g = -div((1/x) grad psi) / x by second-order central differences; h <= 0 picks gradient_fd_step
// when an analytic gradient exists and fd_step otherwise.
double effective_vorticity(const ScalarField2D& field, Point2 p, double h = 0.0);

enum class ProfileName {
    StokesCorner,
    DegenerateN,
    WeightedHarmonicX2,
    WeightedHarmonicX2Y,
    Zero,
    CustomHomogeneous,
};

struct SyntheticProfileSpec {
    ProfileName name = ProfileName::Zero;
    double x0 = 1.0;
    int N = 2;
    // custom-homogeneous only: psi(X0 + X) = rho^lambda * angular(theta), theta in (-pi, pi].
    double lambda = 1.5;
    std::function<double(double)> angular;
    std::function<double(double)> angular_derivative;
    std::optional<Box> window;
};

ProfileName parse_profile_name(const std::string& name);
std::string profile_name_string(ProfileName name);
Box default_synthetic_window(double x0);
ScalarField2D make_synthetic(const SyntheticProfileSpec& spec);

enum class GridFormat { Auto, Text, Csv };

GridData parse_grid(std::istream& in, GridFormat format);
ScalarField2D load_grid(const std::string& path, GridFormat format = GridFormat::Auto);
GridData sample_to_grid(const ScalarField2D& field, int nx, int ny, Box box);
void write_grid(std::ostream& out, const GridData& grid, GridFormat format);

}  // namespace stagpoint
