#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stagpoint/field.hpp"
#include "stagpoint/quadrature.hpp"
#include "stagpoint/vorticity.hpp"

namespace stagpoint {

struct EvalSpec {
    QuadratureSpec quad;
    double positivity_threshold = 0.0;

    EvalSpec() = default;
    EvalSpec(QuadratureSpec q, double threshold = 0.0) : quad(q), positivity_threshold(threshold) {}  // NOLINT
};

// Half of min{x0, distance to the window boundary}.
double admissible_radius(const ScalarField2D& field, Point2 X0);

// |grad psi(X0)|^2 / x0^2, the free-boundary speed squared at X0.
double gradient_screen_value(const ScalarField2D& field, Point2 X0);
inline constexpr double kNondegenerateScreen = 1e-6;
// True when the speed squared is at least kNondegenerateScreen * y_scale (the local height scale, r_max).
bool is_nondegenerate(const ScalarField2D& field, Point2 X0, double y_scale);

struct AnalysisWindow {
    Point2 X0;
    double delta = 0.0;
    double r_max = 0.0;
    double q = 0.8;
    std::vector<double> radii;  // strictly decreasing, r_j = r_max q^j

    // Candidate on the axis; r_max <= 0 selects delta / 2.
    static AnalysisWindow make(const ScalarField2D& field, Point2 X0, double r_max = 0.0, double q = 0.8, int count = 40);
    // Same grid construction without the y = 0 requirement, for negative-control probes.
    static AnalysisWindow probe(const ScalarField2D& field, Point2 X0, double r_max = 0.0, double q = 0.8, int count = 40);
};

struct CoreFunctionals {
    double r = 0.0;
    double I = 0.0;
    double J = 0.0;
    double K = 0.0;
    double I1 = 0.0;
    double I2 = 0.0;
    double J1 = 0.0;
};

// Every raw disk and circle integral at one radius, from a single pass over each node set.
struct RadiusMoments {
    double r = 0.0;
    // over B_r(X0)
    double grad_energy = 0.0;      // |grad psi|^2 / x
    double vort_energy = 0.0;      // x psi f
    double xy_chi = 0.0;           // x y chi
    double i1 = 0.0;               // -(x - x0)/x^2 |grad psi|^2
    double i2 = 0.0;               // (x - x0) y chi, or -(x - x0) (y+ (1 - chi) + y- chi) when smaller in magnitude
    double density_deficit = 0.0;  // y+ (x0 - x chi), evaluated as x y+ (1 - chi)
    double deficit_magnitude = 0.0;  // deficit plus |x - x0| (y+ (1 - chi) + y- chi), scale of the cancellations in V
    double vtilde = 0.0;           // x0 y+ (1 - chi)
    double k_volume = 0.0;
    double psi2_volume = 0.0;      // psi^2 / x
    double rellich_volume = 0.0;
    double i2_plus = 0.0;          // (x - x0) y+ chi, or -(x - x0) y+ (1 - chi) when smaller in magnitude
    double i1_magnitude = 0.0;     // |x - x0|/x^2 |grad psi|^2
    double i2_plus_magnitude = 0.0;  // magnitude of the form used for i2_plus
    // over the circle |X - X0| = r
    double psi2 = 0.0;             // psi^2 / x
    double j1 = 0.0;               // (x - x0)/x^2 psi^2
    double j1_magnitude = 0.0;     // |x - x0|/x^2 psi^2
    double cross = 0.0;            // psi d_nu psi / x
    double dn2 = 0.0;              // (d_nu psi)^2 / x
    double weiss_square = 0.0;     // (d_nu psi - 1.5 psi / r)^2 / x
    double k_boundary = 0.0;
    int positive_nodes = 0;
    int circle_nodes = 0;
};

RadiusMoments radius_moments(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r, const EvalSpec& spec);
// Circle integral of (1/x)(r d_nu psi - c psi)^2.
double frequency_square(const ScalarField2D& field, Point2 X0, double r, double c, const EvalSpec& spec);
// Number of circle nodes with psi above the threshold (topology probe for jump detection).
int positive_node_count(const ScalarField2D& field, Point2 X0, double r, const EvalSpec& spec);

CoreFunctionals core_from_moments(const RadiusMoments& m);
// WindowError unless 0 < r < admissible_radius.
CoreFunctionals core_functionals(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r, const EvalSpec& spec);
double weiss_energy(const CoreFunctionals& core);

struct FrequencyD {
    double volume = 0.0;
    double boundary = 0.0;
    double energy_residual = 0.0;  // |volume - boundary| / (1 + max)
};
FrequencyD frequency_D(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r, const EvalSpec& spec);

// Improper radial integrals entering V, M and Y.
struct ImproperTerms {
    ImproperIntegral i1;  // int_0^r t^-4 I1
    ImproperIntegral i2;  // int_0^r t^-4 I2
    ImproperIntegral j1;  // int_0^r t^-5 J1
    ImproperIntegral y;   // int_0^r t^-3 (circle integral of psi^2/x)
};
ImproperTerms improper_terms(const ScalarField2D& field, Point2 X0, double r, const EvalSpec& spec);

double V_of_r(const ScalarField2D& field, Point2 X0, double r, const EvalSpec& spec);
double tildeV(const ScalarField2D& field, Point2 X0, double r, const EvalSpec& spec);
double Z_of_r(const ScalarField2D& field, Point2 X0, double r, const EvalSpec& spec);
double H_of_r(double D, double V);
double M_of_r(double I, const ImproperTerms& t);
double Y_of_r(const ImproperTerms& t);

// Lower bound below which ratio denominators are treated as zero.
inline constexpr double kDenominatorFloor = 1e-30;
// Relative roundoff assumed for the cancelling density-deficit integral, and the V noise level above
// which a record is treated as precision-limited.
inline constexpr double kDeficitRoundoff = 1e-15;
inline constexpr double kVNoiseLimit = 1e-6;

struct RadialRecord {
    double r = 0.0;
    CoreFunctionals core;
    double Phi = 0.0;
    double M = 0.0;
    double D = 0.0;
    double D_boundary = 0.0;
    double V = 0.0;
    double Vtilde = 0.0;
    double Z = 0.0;
    double H = 0.0;
    double Y = 0.0;
    double S = 0.0;  // circle integral of psi^2/x
    double int_i1 = 0.0, int_i2 = 0.0, int_j1 = 0.0;
    double max_tail_fraction = 0.0;
    double V_noise = 0.0;            // roundoff estimate for V
    bool precision_limited = false;  // V_noise above kVNoiseLimit; V and H not trusted
    bool ok = true;           // all quantities finite
    bool degenerate = false;  // J below the denominator floor
    std::vector<std::string> diagnostics;
};

RadialRecord evaluate_radius(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r, const EvalSpec& spec);

struct RadialProfile {
    Point2 X0;
    std::string field_label;
    std::string vorticity_label;
    std::vector<RadialRecord> records;  // radii strictly decreasing
};

RadialProfile profile_sweep(const ScalarField2D& field, const Vorticity& vort, const AnalysisWindow& window,
                            const EvalSpec& spec);

using Samples = std::vector<std::pair<double, double>>;

enum class Column { I, J, K, I1, I2, J1, Phi, M, D, D_boundary, V, Vtilde, Z, H, Y, S };
// Precision-limited records are left out of the V and H columns unless asked for.
Samples column(const RadialProfile& profile, Column c, bool include_precision_limited = false);

struct Extrapolation {
    double limit = 0.0;
    double uncertainty = 0.0;
    double slope = 0.0;
    double fit_residual = 0.0;
    int samples = 0;
    double r_min = 0.0;
    double r_max = 0.0;
};

// Least squares a + b r over the smallest sampled decade (non-finite samples dropped).
Extrapolation extrapolate_zero_limit(const Samples& samples);

// Samples restricted to the smallest decade [r_min, 10 r_min].
Samples smallest_decade(const Samples& samples);

struct DecayFit {
    double order = 0.0;        // slope of log|v| against log r; +inf when all values vanish
    double max_abs = 0.0;      // max |v| over the decade
    bool vanishing = false;    // every |v| below the floor
    int samples = 0;
};
DecayFit fit_decay_order(const Samples& samples, double floor = 1e-14);

struct MonotonicityReport {
    double beta = 0.0;              // smallest beta >= 0 making exp(beta r^2) J nondecreasing
    double C1 = 0.0;                // smallest C1 >= 0 with H - 3/2 >= -C1 r^2
    double v2_sum_full = 0.0;       // geometric Riemann sum of V^2 / r over all radii
    double v2_sum_truncated = 0.0;  // same sum stopping two decades above r_min
    double v2_exponent = 0.0;       // fitted p in V^2/r ~ r^p on the smallest decade
    bool v2_summable = false;       // p > -1
    double C2 = 0.0;                // max |Z| / r
    double z_order = 0.0;           // fitted slope of |Z| over the smallest decade
};
MonotonicityReport monotonicity_constants(const RadialProfile& profile);

}  // namespace stagpoint
