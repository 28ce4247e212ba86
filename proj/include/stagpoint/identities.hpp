#pragma once

#include <string>
#include <vector>

#include "stagpoint/functionals.hpp"

namespace stagpoint {

struct Residual {
    std::string identity;
    double r = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_residual = 0.0;
    double rel_residual = 0.0;  // |lhs - rhs| / (1 + max(|lhs|, |rhs|))
    double tolerance = 0.0;
    bool pass = false;
    bool excluded = false;  // jump-crossing radius or otherwise not assessed
    bool asserted = true;   // false for report-only rows
    // Finite-difference checks only: plain centered FD at h, and the ratio of FD errors at h and h/2.
    double fd_plain = 0.0;
    double fd_convergence = 0.0;
    std::string note;
};

double relative_residual(double lhs, double rhs);
Residual make_residual(std::string name, double r, double lhs, double rhs, double tolerance);

inline constexpr double kDefaultEnergyTol = 1e-6;
inline constexpr double kDefaultRellichTol = 1e-6;
inline constexpr double kDefaultDerivativeTol = 1e-4;
inline constexpr double kDefaultMutualTol = 1e-8;

Residual check_energy_identity(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r,
                               const EvalSpec& spec, double tol = kDefaultEnergyTol);

Residual check_rellich_identity(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r,
                                const EvalSpec& spec, double tol = kDefaultRellichTol);

// h <= 0 selects 1e-3 r. The FD value is Richardson-extrapolated from steps h and h/2.
Residual check_weiss_derivative(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r, double h,
                                const EvalSpec& spec, double tol = kDefaultDerivativeTol);

enum class FrequencyForm { DForm, HForm };

Residual check_frequency_derivative(const ScalarField2D& field, const Vorticity& vort, Point2 X0, double r, double h,
                                    FrequencyForm form, const EvalSpec& spec, double tol = kDefaultDerivativeTol);

// Both forms from one set of evaluations, plus their mutual agreement.
struct FrequencyDerivativeCheck {
    Residual d_form;
    Residual h_form;
    Residual mutual;  // lhs = D-form rhs, rhs = H-form rhs
};
FrequencyDerivativeCheck check_frequency_derivative_both(const ScalarField2D& field, const Vorticity& vort, Point2 X0,
                                                         double r, double h, const EvalSpec& spec,
                                                         double tol = kDefaultDerivativeTol,
                                                         double mutual_tol = kDefaultMutualTol);

struct KBoundRow {
    double r = 0.0;
    double boundary = 0.0;  // r * circle integral of psi^2/x
    double volume = 0.0;    // disk integral of psi^2/x
    double K = 0.0;
    bool lower_bound_holds = true;
};
struct KBoundReport {
    double C0 = 0.0;  // smallest constant with |K| <= C0 r S over the grid
    bool lower_bound_holds = true;
    bool growth_bound_holds = true;  // sampling check of |f(z)| <= C z
    std::vector<double> failing_radii;
    std::vector<KBoundRow> rows;
};
KBoundReport check_K_bound(const ScalarField2D& field, const Vorticity& vort, Point2 X0, const std::vector<double>& radii,
                           const EvalSpec& spec);

// A residual sequence over radii with its decay order over the smallest decade.
struct SequenceCheck {
    std::string name;
    std::vector<Residual> rows;
    // Scale of the cancelling terms behind each row; values below kCancellationFloor times this count as zero.
    std::vector<double> magnitude;
    DecayFit decay;
    double max_abs_smallest_decade = 0.0;
    double min_order = 1.0;
    bool pass = false;  // decay order >= min_order (or all values vanish)
    std::string note;
};

// Rows: lhs = V, rhs = Vtilde + Z/2.
SequenceCheck check_V_decomposition(const ScalarField2D& field, Point2 X0, const std::vector<double>& radii,
                                    const EvalSpec& spec);

// Three sequences A, B, C (in that order), each reported as lhs = residual, rhs = 0.
std::vector<SequenceCheck> check_small_r_identities(const ScalarField2D& field, Point2 X0,
                                                    const std::vector<double>& radii, const EvalSpec& spec);

struct YConvexityReport {
    std::vector<double> radii;  // increasing
    std::vector<double> Y;
    std::vector<double> Y_prime;  // centered FD at each radius
    double min_slope_increment = 0.0;  // min over consecutive slopes of Y/sqrt(r), scaled
    double min_inequality_margin = 0.0;  // min of (Y' - 1.5 Y / r) / scale
    bool convex = false;
    bool inequality_holds = false;
    double tolerance = 1e-6;
};
YConvexityReport check_Y_convexity(const ScalarField2D& field, Point2 X0, const std::vector<double>& radii,
                                   const EvalSpec& spec, double tol = 1e-6);

enum class Suite { Auto, Exact, Stagnation };
Suite parse_suite(const std::string& s);
std::string suite_string(Suite s);

struct VerifyOptions {
    Suite suite = Suite::Auto;
    double tolerance = 0.0;  // > 0 overrides every per-check tolerance
    std::vector<double> radii;  // radii for pointwise checks; empty selects defaults
    int sequence_count = 24;   // radii for the sequence checks
};

struct VerifyReport {
    Point2 X0;
    Suite suite = Suite::Exact;
    std::string field_label;
    std::string vorticity_label;
    std::vector<Residual> residuals;
    std::vector<SequenceCheck> sequences;
    KBoundReport k_bound;
    bool has_k_bound = false;
    YConvexityReport y_convexity;
    bool has_y_convexity = false;
    int failures = 0;
    int excluded = 0;
    std::vector<std::string> diagnostics;
    bool ok() const { return failures == 0; }
};

VerifyReport run_verify_suite(const ScalarField2D& field, const Vorticity& vort, Point2 X0, const EvalSpec& spec,
                              const VerifyOptions& opts);

}  // namespace stagpoint
