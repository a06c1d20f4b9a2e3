#pragma once

#include <string>
#include <vector>

namespace cmcglue {

/// Generalized catenoid profile in R^{n+1}:
///   phi(s) = cosh((n-1)s)^{1/(n-1)},  psi(s) = int_0^s phi^{2-n}.
class CatenoidProfile {
public:
    explicit CatenoidProfile(int n, double quadrature_tolerance = 1e-12);

    int n() const { return n_; }
    double quadrature_tolerance() const { return tol_; }

    double phi(double s) const;
    double dphi(double s) const;
    double d2phi(double s) const;
    double dlog_phi(double s) const; // tanh((n-1)s)
    double psi(double s) const;      // adaptive Gauss-Kronrod
    double psi_prime(double s) const; // phi^{2-n}

    /// Optional precomputed (s, phi, psi) table for export.
    struct Sample {
        double s, phi, psi;
    };
    std::vector<Sample> sample_table(double s_max, int count) const;

private:
    int n_;
    double tol_;
};

/// int_R phi^{2-n} ds, with truncation point chosen so the integrand is below
/// tol/10 and an analytic exponential tail bound added to the error budget.
double neck_height_integral(int n, double tol = 1e-12);

/// |H| of the revolution surface (phi(s) Theta, psi(s)) with profile
/// derivatives by central differences of step fd_step.
double catenoid_mean_curvature_residual(int n, double s, double fd_step);

enum class JacobiField { translation_vertical, dilation, translation_horizontal };
JacobiField jacobi_field_from_name(const std::string& name);

/// Max |L_K f| of the named explicit Jacobi field over [s_lo, s_hi], with the
/// angular mode term matching the field (mode 0 for the f_0 pair, mode 1 for
/// the horizontal translation phi^{1-n}); derivatives by central differences.
double jacobi_residual(int n, JacobiField field, double s_lo, double s_hi, double fd_step);

/// Mode-j amplitude of a Jacobi field, sampled along s.
struct ModeSolution {
    int j = 0;
    std::vector<double> grid;    // strictly increasing s samples
    std::vector<double> log_abs; // log |u_j(s)| (renormalized integration)
};

enum class ModeVerdict { no_bounded_nontrivial, inconclusive };

struct BoundedModeResult {
    ModeVerdict verdict = ModeVerdict::inconclusive;
    double growth_exponent = 0.0;     // fitted d log|u|/ds on the last quarter
    double expected_exponent = 0.0;   // +infinity indicial growth root (= j)
    double fit_residual = 0.0;
    ModeSolution solution;
};

/// Shoots the mode ODE
///   phi^{-n} d/ds(phi^{n-2} du/ds) - j(n-2+j) phi^{-2} u + n(n-1) phi^{-2n} u = 0
/// from s = -s_max with the decaying-branch data u ~ e^{(n-2+j)s} and fits the
/// growth at +infinity. The indicial roots at +infinity are {j, -(n-2+j)}, so
/// the continuation of the decaying branch blows up like e^{js} whenever no
/// doubly-decaying solution exists; verdict requires the fitted exponent to
/// reach j(1 - fit_tolerance) > 0.
BoundedModeResult bounded_mode_verdict(int n, int j, double delta, double s_max,
                                       double fit_tolerance = 0.1);

} // namespace cmcglue
