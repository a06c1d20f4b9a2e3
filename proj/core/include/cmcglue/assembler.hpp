#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cmcglue/catenoid.hpp"
#include "cmcglue/chart.hpp"
#include "cmcglue/greens.hpp"
#include "cmcglue/symmetry.hpp"

namespace cmcglue {

/// Matched gluing data of the doubling construction at angle t > t*.
struct GluingParameters {
    int p = 1, q = 2;
    double t = 0.0;          // = t_plus
    double t_plus = 0.0;
    double t_minus = 0.0;    // H(t_minus) = -H(t), in (0, t*)
    double eps = 0.0;        // neck scale
    double r = 0.0;          // = eps^{(n-1)/n}, splice radius
    double gamma_lambda = 0.0;
    double s_max = 0.0;      // phi(s_max) = eps^{-1/n}
    double neck_integral = 0.0;

    int n() const { return p + q; }
    double mid() const { return 0.5 * (t_plus + t_minus); }
};

/// Root of H(t_minus) = -H(t) in (0, t*), |residual| <= 1e-12.
double match_translate(int p, int q, double t);

/// Solves t+ - t- = eps * int phi^{2-n} + 2 eps^{n-1} gamma for eps > 0 and
/// fills the derived quantities.
GluingParameters solve_neck_scale(int p, int q, double t, double gamma_lambda,
                                  double t_window = 0.05);

/// Xi(z, v) = (cos v Theta^{(p)}, sin v Theta^{(q)}), unit vector in R^{n+2}.
Eigen::VectorXd toroidal_embed(const ProductPoint& z, double v);

/// Geodesic normal coordinates based at the first-coordinate poles for the
/// metric cos^2 t* g_{S^p} + sin^2 t* g_{S^q}.
ProductPoint normal_coords(int p, int q, const Eigen::VectorXd& zbar, double guard = 0.5);

/// Smooth cutoff: 0 on |w| <= 1/2, 1 on |w| >= 2 (exp(-1/x) gluing).
double cutoff_eta(double w);

/// Inverse of eps * phi(s) = rho on the signed monotone branch.
double neck_s_from_radius(const GluingParameters& gp, double rho, bool upper);

/// Splice-annulus height at zbar in the chart at a gluing point:
/// eta * (graph height) + (1 - eta) * (neck height); side selects the sign.
double transition_height(const GluingParameters& gp, const GreensField& field,
                         const ProductChart& mu_chart, const Eigen::VectorXd& zbar, bool upper);

enum class Region { CapPlus, CapMinus, Neck, TransitionUpper, TransitionLower };
const char* region_name(Region r);

struct AtlasPoint {
    Region region = Region::CapPlus;
    int mu_index = -1;          // nearest gluing point (necks/transitions)
    int orbit_id = -1;          // base-sample index before G-symmetrization
    ProductPoint z;             // base point on S^p x S^q
    double s = 0.0;             // neck s parameter (necks only)
    double height = 0.0;        // v-coordinate of the embedding
    Eigen::VectorXd embedding;  // unit vector in R^{n+2}
    double weight = 1.0;        // zeta_t
    double dist = 0.0;          // |z_bar| to the nearest gluing point
};

struct AtlasResolution {
    int cap_density = 8;    // global product-grid density
    int ring_radii = 6;     // per-mu radial refinement
    int ring_dir_density = 4;
    int neck_s_samples = 25;
    int neck_dir_density = 4;
    int trans_radii = 7;
    int trans_dir_density = 4;
};

struct SurfaceAtlas {
    GluingParameters params;
    double weight_radius = 0.3; // the fixed radius of the weight definition
    std::vector<AtlasPoint> points;
    std::vector<int> region_counts; // indexed by Region
};

/// Samples the approximate hypersurface: Gamma-corrected graphs outside the
/// splice balls, truncated rescaled catenoid necks, cutoff transitions in the
/// annuli; assigns the weight and G-symmetrizes the cloud.
SurfaceAtlas build_atlas(int p, int q, double t, const SymmetryGroup& group,
                         const GreensField& field, const AtlasResolution& res,
                         double weight_radius = 0.3, double t_window = 0.05);

/// Weight rule by region: 1 far from gluing points, log-interpolated on
/// [R_w, 2R_w], |z_bar| inside, eps*cosh(s) on the necks.
double atlas_weight(Region region, double dist, double s, const GluingParameters& gp,
                    double weight_radius);

/// max over points of zeta^{-gamma} |value|.
double weighted_sup_norm(const SurfaceAtlas& atlas, const std::vector<double>& values,
                         double gamma);

/// Deterministic grid on the unit d-sphere (recursive polar product).
std::vector<Eigen::VectorXd> sphere_grid(int d, int density);

} // namespace cmcglue
