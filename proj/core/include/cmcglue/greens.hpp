#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "cmcglue/chart.hpp"
#include "cmcglue/symmetry.hpp"

namespace cmcglue {

/// Euclidean volume of the unit d-sphere: 2 pi^{(d+1)/2} / Gamma((d+1)/2).
double sphere_volume(int d);

/// Dimension of the space of degree-k spherical harmonics on S^d.
double harmonic_count(int d, int k);

/// Zonal (Gegenbauer) polynomials for S^d normalized to P_k(1) = 1, with first
/// and second derivatives; d = 1 reduces to Chebyshev, d = 2 to Legendre.
struct ZonalTable {
    std::vector<double> P, dP, ddP;
};
ZonalTable zonal_eval(int d, int k_max, double x);

/// G-invariant Green's function of L_{t*} on C_{t*} with source
/// -c_n sum_{mu in Lambda} delta_mu, represented by its zonal mode weights
///   W_ij = -c_n N_p(i) N_q(j) / (w_p w_q cos^p t* sin^q t* lambda_ij),
/// the (1,1) kernel block excluded.
class GreensField {
public:
    int p = 1, q = 2;
    int I_max = 40, J_max = 40;
    double c_n = 0.0;
    double c_eval = 6.0; // evaluation-radius constant: accurate for dist >= c_eval/min(I,J)
    GluingSet gluing;
    Eigen::MatrixXd mode_weights; // (I_max+1) x (J_max+1), entry (1,1) = 0

    double a() const; // cos t*
    double b() const; // sin t*
    int n() const { return p + q; }
    double exclusion_radius() const { return c_eval / std::min(I_max, J_max); }

    struct Value {
        double value = 0.0;
        bool near_source_warning = false;
    };
    /// Raw truncated zonal series at a product point.
    Value evaluate(const ProductPoint& z) const;

    /// Gaussian-mollified sum: per-factor degree weights e^{-(i/(a sigma))^2}
    /// e^{-(j/(b sigma))^2}, which makes the spatial mollifier isotropic of
    /// width ~1/sigma. Harmonicity of the local singularity keeps the value
    /// unbiased at distances >= a few widths while the band-limited-delta
    /// oscillation is suppressed exponentially. sigma <= 0 disables it.
    double evaluate_filtered(const ProductPoint& z, double spatial_sigma) const;

    /// Value, gradient and Hessian of Gamma composed with a product chart,
    /// with the same isotropic filter (needed for second derivatives near
    /// the sources).
    struct Jet {
        double value = 0.0;
        Eigen::VectorXd grad;
        Eigen::MatrixXd hess;
    };
    Jet chart_jet(const ProductChart& chart, const Eigen::VectorXd& zbar,
                  double spatial_sigma) const;

    /// Spatial filter scale for a point at chart distance d from the nearest
    /// source: sigma = 10/d (the mollifier tail is super-exponential in
    /// sigma*d and is below every error budget from ~9 on), capped by the
    /// stored truncation.
    double jet_sigma(double dist) const;

    /// Radii for the near-source expansion fit, matched to the filter cap.
    std::vector<double> default_fit_radii() const;

    nlohmann::json to_json() const;
    static GreensField from_json(const nlohmann::json& j);
};

GreensField solve_greens(int p, int q, const GluingSet& gluing, int I_max, int J_max,
                         double c_eval = 6.0);

struct LocalExpansion {
    double fitted_exponent = 0.0;
    double fitted_coefficient = 0.0;
    double gamma_lambda = 0.0; // n = 3 only; 0 by definition for n >= 4
    double fit_residual = 0.0;
};

/// Least-squares fit of log Gamma vs log r near gluing.points[mu_index],
/// direction-averaged; radii must respect the evaluation-radius constraint.
LocalExpansion local_expansion(const GreensField& field, int mu_index,
                               const std::vector<double>& radii, int directions = 8);

} // namespace cmcglue
