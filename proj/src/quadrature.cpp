#include "stagpoint/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "stagpoint/format.hpp"

namespace stagpoint {

void QuadratureSpec::validate() const {
    if (circle_nodes < 16 || circle_nodes % 2 != 0) throw InvalidSpec("circle node count must be even and >= 16");
    if (disk_angular_nodes < 16 || disk_angular_nodes % 2 != 0)
        throw InvalidSpec("disk angular node count must be even and >= 16");
    if (disk_radial_nodes < 2) throw InvalidSpec("disk radial node count must be >= 2");
    if (!(cutoff_fraction > 0.0 && cutoff_fraction <= 0.1)) throw InvalidSpec("cutoff fraction must lie in (0, 0.1]");
    if (panels_per_decade < 1 || panel_nodes < 2) throw InvalidSpec("improper-integral panels misconfigured");
    if (!(improper_tolerance > 0.0)) throw InvalidSpec("improper-integral tolerance must be positive");
}

QuadratureSpec QuadratureSpec::refined(int factor) const {
    QuadratureSpec s = *this;
    s.circle_nodes *= factor;
    s.disk_radial_nodes *= factor;
    s.disk_angular_nodes *= factor;
    s.panels_per_decade *= factor;
    return s;
}

int aligned_angular_nodes(int requested) {
    const int unit = 24;
    return ((requested + unit - 1) / unit) * unit;
}

int circle_node_count(const QuadratureSpec& spec, bool discontinuous) {
    return aligned_angular_nodes(discontinuous ? 2 * spec.circle_nodes : spec.circle_nodes);
}

int disk_angular_node_count(const QuadratureSpec& spec, bool discontinuous) {
    return aligned_angular_nodes(discontinuous ? 2 * spec.disk_angular_nodes : spec.disk_angular_nodes);
}

std::shared_ptr<const AngularRule> angular_rule(int n) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const AngularRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto rule = std::make_shared<AngularRule>();
    rule->dtheta = 2.0 * std::numbers::pi / n;
    rule->cos_t.resize(n);
    rule->sin_t.resize(n);
    for (int i = 0; i < n; ++i) {
        const double th = (i + 0.5) * rule->dtheta;
        rule->cos_t[i] = std::cos(th);
        rule->sin_t[i] = std::sin(th);
    }
    cache.emplace(n, rule);
    return rule;
}

std::shared_ptr<const LineRule> gauss_legendre_unit(int n) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const LineRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto rule = std::make_shared<LineRule>();
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n));
    rule->x.resize(n);
    rule->w.resize(n);
    for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(0.0, 1.0, static_cast<std::size_t>(i), &rule->x[i], &rule->w[i], t);
    gsl_integration_glfixed_table_free(t);
    cache.emplace(n, rule);
    return rule;
}

double circle_integral(const PointIntegrand& g, Point2 center, double r, const QuadratureSpec& spec, bool discontinuous) {
    if (!(r > 0.0)) throw PreconditionError("circle radius must be positive");
    auto v = circle_integral_n<1>([&](const RingNode& n) { return std::array<double, 1>{g(n.p)}; }, center, r,
                                  circle_node_count(spec, discontinuous));
    return v[0];
}

double disk_integral(const PointIntegrand& g, Point2 center, double r, const QuadratureSpec& spec, bool discontinuous) {
    if (!(r > 0.0)) throw PreconditionError("disk radius must be positive");
    auto v = disk_integral_n<1>([&](const RingNode& n) { return std::array<double, 1>{g(n.p)}; }, center, r,
                                spec.disk_radial_nodes, disk_angular_node_count(spec, discontinuous));
    return v[0];
}

namespace {

struct PanelSum {
    std::vector<double> value;
    std::vector<double> magnitude;  // same rule applied to |integrand|
};

// Integral over [a, r] in u = log t with P equal panels of an n-point Gauss rule.
PanelSum log_panel_sum(const std::function<std::vector<double>(double)>& h, double a, double r, int P, int n,
                       std::size_t m) {
    auto gl = gauss_legendre_unit(n);
    const double ua = std::log(a), ub = std::log(r);
    const double width = (ub - ua) / P;
    PanelSum acc{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
    for (int p = 0; p < P; ++p) {
        const double u0 = ua + p * width;
        for (int i = 0; i < n; ++i) {
            const double t = std::exp(u0 + width * gl->x[i]);
            const std::vector<double> v = h(t);
            const double w = width * gl->w[i] * t;
            for (std::size_t j = 0; j < m; ++j) {
                acc.value[j] += w * v[j];
                acc.magnitude[j] += w * std::fabs(v[j]);
            }
        }
    }
    return acc;
}

}  // namespace

std::vector<ImproperIntegral> improper_radial_integrals(const RadialVectorFn& Q, const RadialVectorFn* dQ, double r,
                                                        const std::vector<int>& k, const QuadratureSpec& spec,
                                                        const RadialVectorFn* Qabs) {
    if (!(r > 0.0)) throw PreconditionError("improper integral needs r > 0");
    for (int kk : k)
        if (kk < 2) throw PreconditionError("improper integral exponent must be >= 2");
    const std::size_t m = k.size();
    const double a = spec.cutoff_fraction * r;
    const double b = std::min(10.0 * a, r);

    const std::vector<double> Qa = Q(a);
    const std::vector<double> Qb = Q(b);
    if (Qa.size() != m || Qb.size() != m) throw PreconditionError("radius function returned the wrong component count");
    std::vector<bool> noise(m, false);
    if (Qabs) {
        const std::vector<double> Aa = (*Qabs)(a);
        const std::vector<double> Ab = (*Qabs)(b);
        for (std::size_t j = 0; j < m; ++j)
            noise[j] = std::fabs(Qa[j]) <= kCancellationFloor * Aa[j] && std::fabs(Qb[j]) <= kCancellationFloor * Ab[j];
    }

    // Integrand in t, already including everything except dt.
    std::function<std::vector<double>(double)> h;
    std::vector<double> offset(m, 0.0);
    if (dQ) {
        // int_a^r t^-k Q dt = Q(a) K(a) + int_a^r Q'(s) K(s) ds with K(s) = (s^{1-k} - r^{1-k}) / (k-1).
        for (std::size_t j = 0; j < m; ++j) {
            const double kk = k[j];
            offset[j] = Qa[j] * (std::pow(a, 1.0 - kk) - std::pow(r, 1.0 - kk)) / (kk - 1.0);
        }
        h = [&](double t) {
            std::vector<double> d = (*dQ)(t);
            for (std::size_t j = 0; j < m; ++j) {
                const double kk = k[j];
                d[j] *= (std::pow(t, 1.0 - kk) - std::pow(r, 1.0 - kk)) / (kk - 1.0);
            }
            return d;
        };
    } else {
        h = [&](double t) {
            std::vector<double> q = Q(t);
            for (std::size_t j = 0; j < m; ++j) q[j] *= std::pow(t, -static_cast<double>(k[j]));
            return q;
        };
    }

    const double decades = std::log10(r / a);
    int P = std::max(1, static_cast<int>(std::ceil(spec.panels_per_decade * decades - 1e-9)));
    PanelSum sum = log_panel_sum(h, a, r, P, spec.panel_nodes, m);
    std::vector<double> err(m, 0.0);
    if (spec.monitor) {
        std::vector<double> coarse = log_panel_sum(h, a, r, std::max(1, P / 2), spec.panel_nodes, m).value;
        for (int level = 0;; ++level) {
            bool ok = true;
            for (std::size_t j = 0; j < m; ++j) {
                err[j] = std::fabs(sum.value[j] - coarse[j]);
                // Cancellation in the integrand itself caps the attainable relative accuracy.
                const double scale = std::max(std::fabs(sum.value[j] + offset[j]) + std::fabs(offset[j]),
                                              kCancellationFloor * sum.magnitude[j]);
                if (err[j] > spec.improper_tolerance * scale && err[j] > 1e-300) ok = false;
            }
            if (ok || level >= spec.max_refinements) break;
            coarse = sum.value;
            P *= 2;
            sum = log_panel_sum(h, a, r, P, spec.panel_nodes, m);
        }
    }
    const std::vector<double>& main = sum.value;

    std::vector<ImproperIntegral> out(m);
    for (std::size_t j = 0; j < m; ++j) {
        ImproperIntegral& res = out[j];
        res.main = main[j] + offset[j];
        res.panels = P;
        res.error_estimate = err[j];
        const double kk = k[j];
        const double Ga = Qa[j] * std::pow(a, -kk);
        const double Gb = Qb[j] * std::pow(b, -kk);
        if ((Ga == 0.0 && Gb == 0.0) || noise[j]) {
            res.tail = 0.0;
            res.tail_exponent = std::nan("");
        } else if (Ga * Gb <= 0.0 || b <= a) {
            res.tail = Ga * a;
            res.tail_exponent = std::nan("");
            res.warning = "tail fit undefined (sign change near cutoff); tail taken as constant";
        } else {
            const double p = std::log(Gb / Ga) / std::log(b / a);
            res.tail_exponent = p;
            if (p <= -1.0) {
                res.integrable = false;
                res.tail = std::nan("");
                res.warning = "integrand ~ t^" + fmt_sci(p, 3) + " near 0 is not integrable";
            } else {
                res.tail = Ga * a / (p + 1.0);
            }
        }
        res.value = res.main + res.tail;
        const double denom = std::fabs(res.main) + std::fabs(res.tail);
        res.tail_fraction = denom > 0.0 ? std::fabs(res.tail) / denom : 0.0;
    }
    return out;
}

ImproperIntegral improper_radial_integral(const std::function<double(double)>& Q, double r, int k,
                                          const QuadratureSpec& spec) {
    RadialVectorFn q = [&](double t) { return std::vector<double>{Q(t)}; };
    return improper_radial_integrals(q, nullptr, r, {k}, spec).front();
}

}  // namespace stagpoint
