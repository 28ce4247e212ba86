#include "stagpoint/field.hpp"

#include <gsl/gsl_linalg.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <variant>

#include "stagpoint/format.hpp"

namespace stagpoint {

namespace {

// Cubic-spline node derivatives on a uniform line of samples. End slopes come from the
// four-point one-sided formula, so cubics are reproduced exactly.
std::vector<double> spline_slopes(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<double> d(n, 0.0);
    d[0] = (-11.0 * f[0] + 18.0 * f[1] - 9.0 * f[2] + 2.0 * f[3]) / (6.0 * h);
    d[n - 1] = (11.0 * f[n - 1] - 18.0 * f[n - 2] + 9.0 * f[n - 3] - 2.0 * f[n - 4]) / (6.0 * h);
    const int m = n - 2;
    if (m == 0) return d;
    gsl_vector* diag = gsl_vector_alloc(m);
    gsl_vector* rhs = gsl_vector_alloc(m);
    gsl_vector* sol = gsl_vector_alloc(m);
    gsl_vector* off = gsl_vector_alloc(std::max(m - 1, 1));
    gsl_vector_set_all(diag, 4.0);
    gsl_vector_set_all(off, 1.0);
    for (int i = 1; i <= m; ++i) {
        double b = 3.0 * (f[i + 1] - f[i - 1]) / h;
        if (i == 1) b -= d[0];
        if (i == m) b -= d[n - 1];
        gsl_vector_set(rhs, i - 1, b);
    }
    if (m == 1) {
        d[1] = gsl_vector_get(rhs, 0) / 4.0;
    } else {
        gsl_linalg_solve_symm_tridiag(diag, off, rhs, sol);
        for (int i = 1; i <= m; ++i) d[i] = gsl_vector_get(sol, i - 1);
    }
    gsl_vector_free(diag);
    gsl_vector_free(rhs);
    gsl_vector_free(sol);
    gsl_vector_free(off);
    return d;
}

// Tensor-product cubic spline stored as Hermite data (f, fx, fy, fxy) per node.
struct BicubicGrid {
    GridData data;
    std::vector<double> fx, fy, fxy;

    explicit BicubicGrid(GridData g) : data(std::move(g)) {
        const int nx = data.nx, ny = data.ny;
        const std::size_t total = static_cast<std::size_t>(nx) * ny;
        fx.assign(total, 0.0);
        fy.assign(total, 0.0);
        fxy.assign(total, 0.0);
        std::vector<double> line;
        for (int j = 0; j < ny; ++j) {
            line.assign(data.values.begin() + static_cast<std::ptrdiff_t>(j) * nx,
                        data.values.begin() + static_cast<std::ptrdiff_t>(j + 1) * nx);
            auto d = spline_slopes(line, data.dx());
            for (int i = 0; i < nx; ++i) fx[idx(i, j)] = d[i];
        }
        for (int i = 0; i < nx; ++i) {
            line.resize(ny);
            for (int j = 0; j < ny; ++j) line[j] = data.values[idx(i, j)];
            auto d = spline_slopes(line, data.dy());
            for (int j = 0; j < ny; ++j) fy[idx(i, j)] = d[j];
            for (int j = 0; j < ny; ++j) line[j] = fx[idx(i, j)];
            auto dd = spline_slopes(line, data.dy());
            for (int j = 0; j < ny; ++j) fxy[idx(i, j)] = dd[j];
        }
    }

    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * data.nx + i; }

    double value(Point2 p) const {
        const double hx = data.dx(), hy = data.dy();
        double sx = (p.x - data.xmin) / hx;
        double sy = (p.y - data.ymin) / hy;
        int i = std::clamp(static_cast<int>(std::floor(sx)), 0, data.nx - 2);
        int j = std::clamp(static_cast<int>(std::floor(sy)), 0, data.ny - 2);
        double u = sx - i, v = sy - j;
        double Hu[2] = {(2 * u - 3) * u * u + 1, (3 - 2 * u) * u * u};
        double Gu[2] = {((u - 2) * u + 1) * u, (u - 1) * u * u};
        double Hv[2] = {(2 * v - 3) * v * v + 1, (3 - 2 * v) * v * v};
        double Gv[2] = {((v - 2) * v + 1) * v, (v - 1) * v * v};
        double s = 0.0;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                std::size_t k = idx(i + a, j + b);
                s += data.values[k] * Hu[a] * Hv[b] + fx[k] * hx * Gu[a] * Hv[b] + fy[k] * hy * Hu[a] * Gv[b] +
                     fxy[k] * hx * hy * Gu[a] * Gv[b];
            }
        }
        return std::max(0.0, s);
    }
};

struct AnalyticPayload {
    ScalarField2D::ValueFn value;
    ScalarField2D::SampleFn sample;
};

}  // namespace

struct ScalarField2D::Impl {
    Box window;
    std::string label;
    double scale = 1.0;
    std::variant<AnalyticPayload, std::shared_ptr<const BicubicGrid>> payload;
    std::vector<std::string> diagnostics;
};

ScalarField2D::ScalarField2D(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

ScalarField2D ScalarField2D::analytic(Box window, ValueFn value, SampleFn sample, std::string label) {
    if (!(window.xmin > 0.0) || !(window.xmax > window.xmin) || !(window.ymax > window.ymin))
        throw InvalidSpec("field window must be a nonempty box inside {x > 0}");
    auto impl = std::make_shared<Impl>();
    impl->window = window;
    impl->label = std::move(label);
    impl->payload = AnalyticPayload{std::move(value), std::move(sample)};
    return ScalarField2D(std::move(impl));
}

ScalarField2D ScalarField2D::from_grid(GridData grid, std::string label) {
    if (grid.nx < 4 || grid.ny < 4) throw ParseError("grid needs at least 4 nodes per direction");
    if (grid.values.size() != static_cast<std::size_t>(grid.nx) * grid.ny)
        throw ParseError("grid value count does not match nx * ny");
    if (!(grid.xmin > 0.0)) throw InvalidSpec("grid x-range must lie in {x > 0}");
    if (!(grid.xmax > grid.xmin) || !(grid.ymax > grid.ymin)) throw ParseError("grid extent is empty");
    for (double v : grid.values) {
        if (std::isnan(v)) throw InvariantViolation("grid contains NaN samples");
        if (v < 0.0) throw InvariantViolation("grid contains negative samples (psi >= 0 required)");
    }
    auto impl = std::make_shared<Impl>();
    impl->window = {grid.xmin, grid.xmax, grid.ymin, grid.ymax};
    impl->label = std::move(label);
    double bottom = 0.0;
    for (int i = 0; i < grid.nx; ++i) bottom = std::max(bottom, grid.at(i, 0));
    if (bottom > 0.0)
        impl->diagnostics.push_back("bottom edge not identically zero (max " + fmt_sci(bottom) +
                                    "); psi = 0 for y << 0 cannot be confirmed");
    impl->payload = std::make_shared<const BicubicGrid>(std::move(grid));
    return ScalarField2D(std::move(impl));
}

FieldKind ScalarField2D::kind() const {
    return std::holds_alternative<AnalyticPayload>(impl_->payload) ? FieldKind::AnalyticClosure : FieldKind::Grid;
}

GradientMode ScalarField2D::gradient_mode() const {
    if (auto* a = std::get_if<AnalyticPayload>(&impl_->payload); a && a->sample) return GradientMode::Analytic;
    return GradientMode::CentralDifference;
}

const Box& ScalarField2D::window() const { return impl_->window; }
const std::string& ScalarField2D::label() const { return impl_->label; }
const std::vector<std::string>& ScalarField2D::diagnostics() const { return impl_->diagnostics; }

double ScalarField2D::spacing() const {
    if (auto* g = std::get_if<std::shared_ptr<const BicubicGrid>>(&impl_->payload))
        return std::max((*g)->data.dx(), (*g)->data.dy());
    return 0.0;
}

double ScalarField2D::fd_step() const { return std::max(1e-5, 1e-3 * spacing()); }

double ScalarField2D::gradient_fd_step() const { return 1e-2 * fd_step(); }

double ScalarField2D::value(Point2 p) const {
    if (!impl_->window.contains(p))
        throw DomainError("point (" + fmt_double(p.x) + ", " + fmt_double(p.y) + ") outside field window");
    if (auto* a = std::get_if<AnalyticPayload>(&impl_->payload)) return impl_->scale * a->value(p);
    return impl_->scale * std::get<std::shared_ptr<const BicubicGrid>>(impl_->payload)->value(p);
}

Vec2 ScalarField2D::gradient_fd(Point2 p, double h) const {
    if (!(h > 0.0)) throw PreconditionError("finite-difference step must be positive");
    if (impl_->window.distance_to_boundary(p) < h)
        throw DomainError("insufficient window margin for finite-difference gradient");
    double gx = (value({p.x + h, p.y}) - value({p.x - h, p.y})) / (2.0 * h);
    double gy = (value({p.x, p.y + h}) - value({p.x, p.y - h})) / (2.0 * h);
    return {gx, gy};
}

Vec2 ScalarField2D::gradient(Point2 p) const { return sample(p).gradient; }

FieldSample ScalarField2D::sample(Point2 p) const {
    if (auto* a = std::get_if<AnalyticPayload>(&impl_->payload); a && a->sample) {
        if (!impl_->window.contains(p))
            throw DomainError("point (" + fmt_double(p.x) + ", " + fmt_double(p.y) + ") outside field window");
        FieldSample s = a->sample(p);
        s.value *= impl_->scale;
        s.gradient.x *= impl_->scale;
        s.gradient.y *= impl_->scale;
        return s;
    }
    return {value(p), gradient_fd(p, fd_step())};
}

ScalarField2D ScalarField2D::scaled(double c) const {
    if (!(c > 0.0)) throw InvalidSpec("scale factor must be positive");
    auto impl = std::make_shared<Impl>(*impl_);
    impl->scale *= c;
    return ScalarField2D(std::move(impl));
}

ScalarField2D ScalarField2D::restricted(Box window) const {
    const Box& w = impl_->window;
    if (window.xmin < w.xmin || window.xmax > w.xmax || window.ymin < w.ymin || window.ymax > w.ymax)
        throw InvalidSpec("restricted window must lie inside the field window");
    auto impl = std::make_shared<Impl>(*impl_);
    impl->window = window;
    return ScalarField2D(std::move(impl));
}

double eval(const ScalarField2D& field, Point2 p) { return field.value(p); }
Vec2 grad(const ScalarField2D& field, Point2 p) { return field.gradient(p); }
Vec2 grad_fd(const ScalarField2D& field, Point2 p, double h) { return field.gradient_fd(p, h); }

int positivity_indicator(const ScalarField2D& field, Point2 p, double threshold) {
    return field.value(p) > threshold ? 1 : 0;
}

double effective_vorticity(const ScalarField2D& field, Point2 p, double h) {
    if (!(p.x > 0.0)) throw DomainError("effective vorticity needs x > 0");
    if (h <= 0.0) h = field.gradient_mode() == GradientMode::Analytic ? field.gradient_fd_step() : field.fd_step();
    if (field.window().distance_to_boundary(p) < h) throw DomainError("insufficient window margin for vorticity stencil");
    const double x = p.x;
    double div;
    if (field.gradient_mode() == GradientMode::Analytic) {
        Vec2 gxp = field.gradient({x + h, p.y});
        Vec2 gxm = field.gradient({x - h, p.y});
        Vec2 gyp = field.gradient({x, p.y + h});
        Vec2 gym = field.gradient({x, p.y - h});
        div = (gxp.x / (x + h) - gxm.x / (x - h)) / (2.0 * h) + (gyp.y - gym.y) / (2.0 * h * x);
    } else {
        double c = field.value(p);
        double e = field.value({x + h, p.y}), w = field.value({x - h, p.y});
        double n = field.value({x, p.y + h}), s = field.value({x, p.y - h});
        div = ((e - c) / (x + 0.5 * h) - (c - w) / (x - 0.5 * h)) / (h * h) + (n - 2.0 * c + s) / (h * h * x);
    }
    return -div / x;
}

// ---------------------------------------------------------------------------------------------
// Synthetic profiles

ProfileName parse_profile_name(const std::string& name) {
    if (name == "stokes-corner") return ProfileName::StokesCorner;
    if (name == "degenerate-N" || name == "degenerate") return ProfileName::DegenerateN;
    if (name == "weighted-harmonic-x2") return ProfileName::WeightedHarmonicX2;
    if (name == "weighted-harmonic-x2y") return ProfileName::WeightedHarmonicX2Y;
    if (name == "zero") return ProfileName::Zero;
    if (name == "custom-homogeneous") return ProfileName::CustomHomogeneous;
    throw InvalidSpec("unknown synthetic profile '" + name + "'");
}

std::string profile_name_string(ProfileName name) {
    switch (name) {
        case ProfileName::StokesCorner: return "stokes-corner";
        case ProfileName::DegenerateN: return "degenerate-N";
        case ProfileName::WeightedHarmonicX2: return "weighted-harmonic-x2";
        case ProfileName::WeightedHarmonicX2Y: return "weighted-harmonic-x2y";
        case ProfileName::Zero: return "zero";
        case ProfileName::CustomHomogeneous: return "custom-homogeneous";
    }
    return "unknown";
}

Box default_synthetic_window(double x0) { return {0.02 * x0, 4.0 * x0, -2.0 * x0, 4.0 * x0}; }

namespace {

constexpr double kPi = std::numbers::pi;

FieldSample corner_sample(Point2 p, double x0) {
    const double a = std::sqrt(2.0) * x0 / 3.0;
    const double rx = p.x - x0, ry = p.y;
    const double rho = std::hypot(rx, ry);
    if (rho == 0.0) return {};
    const double th = std::atan2(ry, rx);
    if (!(th > kPi / 6.0 && th < 5.0 * kPi / 6.0)) return {};
    const double arg = 1.5 * (th - kPi / 2.0);
    const double sr = std::sqrt(rho);
    const double val = a * rho * sr * std::cos(arg);
    const double dr = 1.5 * a * sr * std::cos(arg);
    const double dt = -1.5 * a * sr * std::sin(arg);
    const double ex = rx / rho, ey = ry / rho;
    return {val, {dr * ex - dt * ey, dr * ey + dt * ex}};
}

FieldSample degenerate_sample(Point2 p, double x0, int N) {
    const double A = std::sqrt(x0) / std::sqrt(kPi / 2.0);
    const double rx = p.x - x0, ry = p.y;
    if (ry < 0.0) return {};
    const double rho = std::hypot(rx, ry);
    if (rho == 0.0) return {};
    const double th = std::atan2(ry, rx);  // in [0, pi]
    const double s = std::sin(N * th), c = std::cos(N * th);
    // On a nodal ray (including the axis) take the one-sided limit from increasing theta;
    // at theta = pi that direction leaves the upper half-plane, so use the limit from below.
    double sgn;
    if (ry == 0.0) sgn = rx > 0.0 ? 1.0 : ((N % 2 == 0) ? -1.0 : 1.0);
    else if (s > 0.0) sgn = 1.0;
    else if (s < 0.0) sgn = -1.0;
    else sgn = c > 0.0 ? 1.0 : -1.0;
    const double rn1 = std::pow(rho, N - 1);
    const double val = ry == 0.0 ? 0.0 : A * rn1 * rho * std::fabs(s);
    const double dr = N * A * rn1 * std::fabs(s);
    const double dt = N * A * rn1 * c * sgn;
    const double ex = rx / rho, ey = ry / rho;
    return {val, {dr * ex - dt * ey, dr * ey + dt * ex}};
}

}  // namespace

ScalarField2D make_synthetic(const SyntheticProfileSpec& spec) {
    if (!(spec.x0 > 0.0) || !std::isfinite(spec.x0)) throw InvalidSpec("synthetic profile needs x0 > 0");
    const double x0 = spec.x0;
    const Box window = spec.window.value_or(default_synthetic_window(x0));
    const std::string label = profile_name_string(spec.name);
    switch (spec.name) {
        case ProfileName::StokesCorner:
            return ScalarField2D::analytic(
                window, [x0](Point2 p) { return corner_sample(p, x0).value; },
                [x0](Point2 p) { return corner_sample(p, x0); }, label);
        case ProfileName::DegenerateN: {
            if (spec.N < 2) throw InvalidSpec("degenerate-N profile needs N >= 2");
            const int N = spec.N;
            return ScalarField2D::analytic(
                window, [x0, N](Point2 p) { return degenerate_sample(p, x0, N).value; },
                [x0, N](Point2 p) { return degenerate_sample(p, x0, N); }, label + "-" + std::to_string(N));
        }
        case ProfileName::WeightedHarmonicX2:
            return ScalarField2D::analytic(
                window, [](Point2 p) { return p.x * p.x; },
                [](Point2 p) { return FieldSample{p.x * p.x, {2.0 * p.x, 0.0}}; }, label);
        case ProfileName::WeightedHarmonicX2Y:
            // x^2 y restricted to y >= 0 so that psi >= 0; gradient on the axis is the limit from y > 0.
            return ScalarField2D::analytic(
                window, [](Point2 p) { return p.y > 0.0 ? p.x * p.x * p.y : 0.0; },
                [](Point2 p) {
                    if (p.y < 0.0) return FieldSample{};
                    return FieldSample{p.x * p.x * p.y, {2.0 * p.x * p.y, p.x * p.x}};
                },
                label);
        case ProfileName::Zero:
            return ScalarField2D::analytic(
                window, [](Point2) { return 0.0; }, [](Point2) { return FieldSample{}; }, label);
        case ProfileName::CustomHomogeneous: {
            if (!spec.angular) throw InvalidSpec("custom-homogeneous profile needs an angular function");
            if (!(spec.lambda > 0.0)) throw InvalidSpec("custom-homogeneous profile needs lambda > 0");
            auto ang = spec.angular;
            const double lam = spec.lambda;
            auto value = [ang, lam, x0](Point2 p) {
                const double rx = p.x - x0, ry = p.y;
                const double rho = std::hypot(rx, ry);
                if (rho == 0.0) return 0.0;
                return std::pow(rho, lam) * ang(std::atan2(ry, rx));
            };
            ScalarField2D::SampleFn sample;
            if (spec.angular_derivative) {
                auto dang = spec.angular_derivative;
                sample = [ang, dang, lam, x0](Point2 p) {
                    const double rx = p.x - x0, ry = p.y;
                    const double rho = std::hypot(rx, ry);
                    if (rho == 0.0) return FieldSample{};
                    const double th = std::atan2(ry, rx);
                    const double rl1 = std::pow(rho, lam - 1.0);
                    const double dr = lam * rl1 * ang(th), dt = rl1 * dang(th);
                    const double ex = rx / rho, ey = ry / rho;
                    return FieldSample{rl1 * rho * ang(th), {dr * ex - dt * ey, dr * ey + dt * ex}};
                };
            }
            return ScalarField2D::analytic(window, value, sample, label);
        }
    }
    throw InvalidSpec("unhandled synthetic profile");
}

// ---------------------------------------------------------------------------------------------
// Grid files

namespace {

std::vector<double> split_numbers(const std::string& line, bool csv) {
    std::string s = line;
    if (csv) std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream ss(s);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) {
        try {
            std::size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size()) throw ParseError("bad number '" + tok + "'");
            out.push_back(v);
        } catch (const std::invalid_argument&) {
            if (tok == "nan" || tok == "NaN" || tok == "-nan") {
                out.push_back(std::nan(""));
                continue;
            }
            throw ParseError("bad number '" + tok + "'");
        } catch (const std::out_of_range&) {
            throw ParseError("number out of range '" + tok + "'");
        }
    }
    return out;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

GridData parse_grid(std::istream& in, GridFormat format) {
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        if (!blank(line)) lines.push_back(line);
    }
    if (lines.empty()) throw ParseError("empty grid file");
    bool csv = format == GridFormat::Csv;
    std::string header = lines.front();
    auto hash = header.find('#');
    if (hash != std::string::npos) {
        header = header.substr(hash + 1);
        if (format == GridFormat::Auto) csv = true;
    }
    if (format == GridFormat::Auto && header.find(',') != std::string::npos) csv = true;
    auto h = split_numbers(header, csv || header.find(',') != std::string::npos);
    if (h.size() != 6) throw ParseError("grid header must hold nx ny xmin xmax ymin ymax");
    GridData g;
    if (h[0] != std::floor(h[0]) || h[1] != std::floor(h[1]) || h[0] < 1 || h[1] < 1)
        throw ParseError("grid header nx, ny must be positive integers");
    g.nx = static_cast<int>(h[0]);
    g.ny = static_cast<int>(h[1]);
    g.xmin = h[2];
    g.xmax = h[3];
    g.ymin = h[4];
    g.ymax = h[5];
    if (static_cast<int>(lines.size()) - 1 != g.ny)
        throw ParseError("grid has " + std::to_string(lines.size() - 1) + " rows, header says " + std::to_string(g.ny));
    g.values.reserve(static_cast<std::size_t>(g.nx) * g.ny);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto row = split_numbers(lines[r], csv);
        if (static_cast<int>(row.size()) != g.nx)
            throw ParseError("grid row " + std::to_string(r) + " has " + std::to_string(row.size()) + " values");
        g.values.insert(g.values.end(), row.begin(), row.end());
    }
    return g;
}

ScalarField2D load_grid(const std::string& path, GridFormat format) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open grid file '" + path + "'");
    if (format == GridFormat::Auto && path.size() >= 4 && path.substr(path.size() - 4) == ".csv") format = GridFormat::Csv;
    return ScalarField2D::from_grid(parse_grid(in, format), path);
}

GridData sample_to_grid(const ScalarField2D& field, int nx, int ny, Box box) {
    if (nx < 4 || ny < 4) throw InvalidSpec("grid needs at least 4 nodes per direction");
    GridData g{nx, ny, box.xmin, box.xmax, box.ymin, box.ymax, {}};
    g.values.resize(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            // Evaluate at index-derived coordinates so the file round-trips node for node.
            Point2 p{box.xmin + i * g.dx(), box.ymin + j * g.dy()};
            if (i == nx - 1) p.x = box.xmax;
            if (j == ny - 1) p.y = box.ymax;
            g.values[static_cast<std::size_t>(j) * nx + i] = field.value(p);
        }
    }
    return g;
}

void write_grid(std::ostream& out, const GridData& grid, GridFormat format) {
    const bool csv = format == GridFormat::Csv;
    const char* sep = csv ? "," : " ";
    if (csv) out << "# ";
    out << grid.nx << sep << grid.ny << sep << fmt_double(grid.xmin) << sep << fmt_double(grid.xmax) << sep
        << fmt_double(grid.ymin) << sep << fmt_double(grid.ymax) << "\n";
    char buf[40];
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", grid.at(i, j));
            if (i) out << sep;
            out << buf;
        }
        out << "\n";
    }
}

}  // namespace stagpoint
