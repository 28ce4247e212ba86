// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>

#include "stagpoint/commands.hpp"

using namespace stagpoint;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int k, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", k, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string sci(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3e", v);
    return b;
}

std::string fix(double v, int d = 6) {
    char b[32];
    std::snprintf(b, sizeof b, "%.*f", d, v);
    return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScalarField2D synthetic(ProfileName name, double x0 = 1.0, int N = 2) {
    SyntheticProfileSpec s;
    s.name = name;
    s.x0 = x0;
    s.N = N;
    return make_synthetic(s);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

// Runs a command into dir and returns the output files by name.
std::map<std::string, std::string> run_into(RunConfig cfg, const fs::path& dir, int& code) {
    fs::remove_all(dir);
    cfg.out_dir = dir.string();
    std::ostringstream log, err;
    code = run_command(cfg, log, err);
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = slurp(e.path());
    return files;
}

}  // namespace

int main() {
    const EvalSpec spec;
    const Point2 X0{1.0, 0.0};
    const std::vector<int> degrees{2, 3, 4};

    // 1. Exact solutions with f = 0: energy and Rellich identities.
    {
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (auto name : {ProfileName::WeightedHarmonicX2, ProfileName::WeightedHarmonicX2Y}) {
            const auto f = synthetic(name);
            for (double r : {0.05, 0.2, 0.45}) {
                worst = std::max(worst, check_energy_identity(f, VorticityModel::zero(), X0, r, spec).rel_residual);
                worst = std::max(worst, check_rellich_identity(f, VorticityModel::zero(), X0, r, spec).rel_residual);
            }
        }
        const double t = seconds_since(t0);
        report(1, worst <= 1e-8 && t < 5.0,
               "x^2, x^2y energy/Rellich max rel residual " + sci(worst) + " (tol 1e-8), " + fix(t, 2) + " s (limit 5 s)");
    }

    // Classification runs shared by criteria 2, 3 and 7.
    const ClassifierConfig cc;
    const auto corner = classify_stagnation_point(synthetic(ProfileName::StokesCorner), Vorticity::effective(), X0, cc);
    std::map<int, StagnationPointReport> flat;
    std::map<int, double> flat_seconds;
    for (int N : degrees) {
        const auto t0 = std::chrono::steady_clock::now();
        flat[N] = classify_stagnation_point(synthetic(ProfileName::DegenerateN, 1.0, N), Vorticity::effective(), X0, cc);
        flat_seconds[N] = seconds_since(t0);
    }

    // 2. Density reproduction.
    {
        const double d_corner = std::sqrt(3.0) / 3.0, d_flat = 2.0 / 3.0;
        bool ok = corner.phi0 && std::abs(corner.phi0->value - d_corner) <= 2e-3;
        std::string detail = "corner Phi(0+) = " + (corner.phi0 ? fix(corner.phi0->value) : std::string("n/a")) +
                             " (target " + fix(d_corner) + " +- 2e-3)";
        for (int N : degrees) {
            const auto& r = flat[N];
            ok = ok && r.phi0 && std::abs(r.phi0->value - d_flat) <= 1e-2;
            detail += "; N=" + std::to_string(N) + " Phi(0+) = " + (r.phi0 ? fix(r.phi0->value) : std::string("n/a"));
        }
        report(2, ok, detail + " (target " + fix(d_flat) + " +- 1e-2)");
    }

    // 3. Integer frequency and homogeneity degree.
    {
        bool ok = true;
        std::string detail;
        for (int N : degrees) {
            const auto& r = flat[N];
            const double H0 = r.H0 ? r.H0->value : std::nan("");
            const double deg = r.homogeneity ? r.homogeneity->degree : std::nan("");
            ok = ok && std::abs(H0 - N) <= 0.02 && std::abs(deg - N) <= 0.02 && flat_seconds[N] < 60.0;
            detail += (detail.empty() ? "" : "; ") + std::string("N=") + std::to_string(N) + " H(0+) = " + fix(H0, 5) +
                      ", degree " + fix(deg, 5) + ", " + fix(flat_seconds[N], 1) + " s";
        }
        report(3, ok, detail + " (tol 0.02, limit 60 s)");
    }

    // 4. Frequency-derivative identity, both forms.
    {
        double mutual = 0.0, fd = 0.0;
        int excluded = 0;
        for (int N : degrees) {
            const auto f = synthetic(ProfileName::DegenerateN, 1.0, N);
            for (double r : {0.02, 0.05, 0.1}) {
                const auto c = check_frequency_derivative_both(f, Vorticity::effective(), X0, r, 0.0, spec);
                if (c.d_form.excluded || c.h_form.excluded) {
                    ++excluded;
                    continue;
                }
                mutual = std::max(mutual, c.mutual.rel_residual);
                fd = std::max({fd, c.d_form.rel_residual, c.h_form.rel_residual});
            }
        }
        report(4, mutual <= 1e-8 && fd <= 1e-4 && excluded < 9,
               "max mutual " + sci(mutual) + " (tol 1e-8), max FD " + sci(fd) + " (tol 1e-4), " +
                   std::to_string(excluded) + " excluded");
    }

    // Default sweeps shared by criteria 5 and 6.
    std::map<int, RadialProfile> sweeps;
    for (int N : degrees) {
        const auto f = synthetic(ProfileName::DegenerateN, 1.0, N);
        sweeps[N] = profile_sweep(f, Vorticity::effective(), AnalysisWindow::make(f, X0), spec);
    }

    // 5. Monotonicity, V^2/r summability and V(0+) = 0.
    {
        bool ok = true;
        std::string detail;
        for (int N : degrees) {
            const auto m = monotonicity_constants(sweeps[N]);
            const auto v0 = extrapolate_zero_limit(column(sweeps[N], Column::V));
            const bool bounded = m.v2_summable && std::isfinite(m.v2_sum_full) &&
                                 m.v2_sum_full <= 1.1 * m.v2_sum_truncated + 1e-12;
            ok = ok && m.beta <= 1e3 && bounded && std::abs(v0.limit) <= 1e-2;
            detail += (detail.empty() ? "" : "; ") + std::string("N=") + std::to_string(N) + " beta " + sci(m.beta) +
                      ", V^2/r sum " + sci(m.v2_sum_full) + " vs " + sci(m.v2_sum_truncated) + ", V(0+) " + sci(v0.limit);
        }
        report(5, ok, detail + " (beta <= 1e3, |V(0+)| <= 1e-2)");
    }

    // 6. V decomposition and small-r identities decay with order >= 1.
    {
        bool ok = true;
        std::string detail;
        std::vector<double> radii;
        for (int j = 0; j < 24; ++j) radii.push_back(0.1 * std::pow(0.8, j));
        for (int N : degrees) {
            const auto f = synthetic(ProfileName::DegenerateN, 1.0, N);
            std::vector<SequenceCheck> seqs{check_V_decomposition(f, X0, radii, spec)};
            for (auto& s : check_small_r_identities(f, X0, radii, spec)) seqs.push_back(std::move(s));
            detail += (detail.empty() ? "" : "; ") + std::string("N=") + std::to_string(N);
            for (const auto& s : seqs) {
                const bool pass = s.decay.vanishing || s.decay.order >= 1.0;
                ok = ok && pass;
                detail += " " + s.name + " " + (s.decay.vanishing ? std::string("vanishing") : fix(s.decay.order, 2));
            }
        }
        report(6, ok, detail + " (order >= 1)");
    }

    // 7. Exclusion witness on every flat-classified synthetic.
    {
        bool ok = true;
        std::string detail;
        for (int N : degrees) {
            const auto& r = flat[N];
            const double control = nodal_ray_laplacian(r.N >= 2 ? r.N : 2, true);
            ok = ok && r.label == PointLabel::HorizontalFlatExcluded && r.N == N && std::abs(r.nodal_jump - 2.0 * N) <= 1e-6 &&
                 std::abs(control) <= 1e-6;
            detail += (detail.empty() ? "" : "; ") + point_label_string(r.label) + " N=" + std::to_string(r.N) +
                      " jump " + fix(r.nodal_jump, 6) + " control " + sci(control);
        }
        report(7, ok, detail);
    }

    // 8. Directional vanishing on the annulus at r = 1e-2.
    {
        double worst = 0.0;
        for (int N : degrees) {
            const auto frame = rescale_phi(synthetic(ProfileName::DegenerateN, 1.0, N), X0, 1e-2, spec);
            worst = std::max(worst, annulus_homogeneity_residual(frame, N, spec.quad));
        }
        report(8, worst <= 1e-3, "max annulus residual " + sci(worst) + " (tol 1e-3)");
    }

    // 9. Negative controls.
    {
        const auto x2y = classify_stagnation_point(synthetic(ProfileName::WeightedHarmonicX2Y), Vorticity::effective(), X0, cc);
        const auto x2 = synthetic(ProfileName::WeightedHarmonicX2);
        const Point2 probe{1.0, 0.5};
        std::string probe_text;
        bool flagged = false;
        try {
            const auto h = fit_homogeneity(x2, probe, AnalysisWindow::probe(x2, probe), spec);
            flagged = h.flagged;
            probe_text = "degree " + fix(h.degree, 4) + (h.flagged ? " flagged" : " NOT flagged");
        } catch (const InsufficientData& e) {
            flagged = true;
            probe_text = std::string("unresolved (") + e.what() + ")";
        }
        report(9, x2y.label == PointLabel::Nondegenerate && flagged,
               "x^2y label " + point_label_string(x2y.label) + "; x^2 probe at (1, 0.5) " + probe_text);
    }

    // 10. Byte-identical reports from repeated runs.
    {
        const fs::path base = fs::temp_directory_path() / ("stagpoint_acceptance_" + std::to_string(::getpid()));
        bool ok = true;
        int files = 0;
        struct Run {
            std::string command, profile;
        };
        for (const Run& run : {Run{"analyze", "stokes-corner"}, Run{"verify", "weighted-harmonic-x2"},
                               Run{"blowup", "degenerate-N"}, Run{"classify", "degenerate-N"}}) {
            RunConfig cfg;
            cfg.command = run.command;
            apply_config_value(cfg, "field", "profile", run.profile);
            if (run.command == "verify") cfg.vorticity = VorticityKind::Zero;
            int ca = 0, cb = 0;
            const auto a = run_into(cfg, base / (run.command + "_a"), ca);
            const auto b = run_into(cfg, base / (run.command + "_b"), cb);
            ok = ok && ca == cb && !a.empty() && a == b;
            files += static_cast<int>(a.size());
        }
        fs::remove_all(base);
        report(10, ok, std::to_string(files) + " report files compared across two runs of analyze, verify, blowup, classify");
    }

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
