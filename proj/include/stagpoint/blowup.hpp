#pragma once

#include <string>
#include <vector>

#include "stagpoint/functionals.hpp"

namespace stagpoint {

// X -> factor * psi(X0 + r X) on the unit ball; X is measured from the origin.
class RescaledField {
public:
    RescaledField(ScalarField2D source, Point2 X0, double r, double factor);

    double value(Point2 X) const;
    // Gradient in the rescaled variable: factor * r * grad psi(X0 + r X).
    Vec2 gradient(Point2 X) const;

    const ScalarField2D& source() const { return source_; }
    Point2 X0() const { return X0_; }
    double r() const { return r_; }
    double factor() const { return factor_; }

private:
    ScalarField2D source_;
    Point2 X0_;
    double r_;
    double factor_;
};

struct BlowupFrame {
    Point2 X0;
    double r = 0.0;
    double normalization = 0.0;  // sqrt(r^-1 * circle integral of psi^2/x over |X - X0| = r)
    RescaledField phi;

    // Circle integral over |X| = 1 of phi^2 / (x0 + r x); equals 1 by construction.
    double boundary_norm(const QuadratureSpec& quad) const;
};

// Throws WindowError when B_r(X0) leaves the window and DegenerateDenominator when psi vanishes on the circle.
BlowupFrame rescale_phi(const ScalarField2D& field, Point2 X0, double r, const EvalSpec& spec);

// X -> psi(X0 + r X) / r^{3/2}; DomainError when B_r(X0) leaves the window.
RescaledField rescale_psi32(const ScalarField2D& field, Point2 X0, double r);

enum class HomogeneityMethod { BoundaryNormSlope, FrequencyPlateau };
std::string homogeneity_method_string(HomogeneityMethod m);

struct HomogeneityFit {
    HomogeneityMethod method = HomogeneityMethod::FrequencyPlateau;
    double degree = 0.0;
    double residual = 0.0;  // slope: rms of the log-log fit; plateau: extrapolation uncertainty
    double r_min = 0.0;
    double r_max = 0.0;
    int samples = 0;
};

inline constexpr double kHomogeneityAgreement = 0.05;

struct HomogeneityEstimate {
    // Primary estimate (frequency plateau).
    double degree = 0.0;
    double residual = 0.0;  // max of the primary residual and the disagreement between methods
    HomogeneityMethod method = HomogeneityMethod::FrequencyPlateau;
    double r_min = 0.0;
    double r_max = 0.0;

    HomogeneityFit slope;
    HomogeneityFit plateau;
    double disagreement = 0.0;
    // Set when the methods disagree by more than kHomogeneityAgreement, or when the base point is
    // off the zero set and the degree is below 3/2.
    bool flagged = false;
    std::vector<std::string> flags;
};

// Needs at least 6 radii with J above the denominator floor, else InsufficientData.
HomogeneityEstimate fit_homogeneity(const RadialProfile& profile, double psi_at_base = 0.0,
                                    double positivity_threshold = 0.0);
// Sweeps the window first; the frequency uses the field's effective vorticity unless vort is given.
HomogeneityEstimate fit_homogeneity(const ScalarField2D& field, Point2 X0, const AnalysisWindow& window,
                                    const EvalSpec& spec, const Vorticity& vort = Vorticity::effective());

enum class LimitProfileKind { Corner, FrequencyN };
enum class ProfileScaling {
    Unit,      // unit circle integral of phi^2 / x0, matching rescale_phi frames
    Physical,  // the psi / r^{3/2} limit: corner coefficient sqrt(2) x0 / 3, zero for frequency-N
};

struct LimitProfile {
    LimitProfileKind kind = LimitProfileKind::FrequencyN;
    int N = 2;
    ProfileScaling scaling = ProfileScaling::Unit;

    double value(Point2 X, double x0) const;
    std::string describe() const;
};

// Relative L2 distance (weight 1/x0) on the annulus 1/4 <= |X| <= 3/4. When the candidate vanishes
// there, the absolute L2 norm of phi is returned instead.
double limit_profile_distance(const RescaledField& phi, const LimitProfile& profile, const QuadratureSpec& quad);
double limit_profile_distance(const BlowupFrame& frame, const LimitProfile& profile, const QuadratureSpec& quad);

// Annulus integral of (1/x0) |X|^-5 (grad phi . X - N phi)^2 over inner <= |X| <= outer.
double annulus_homogeneity_residual(const BlowupFrame& frame, double N, const QuadratureSpec& quad,
                                    double inner = 0.25, double outer = 0.75);

// Jump of the one-sided angular derivatives of rho^N |sin N theta| across the ray theta = pi/N at
// rho = 1 (2N); with signed = true the absolute value is dropped and the jump is 0.
double nodal_ray_laplacian(int N, bool signed_control = false);

}  // namespace stagpoint
