#pragma once

#include <Eigen/Dense>
#include <functional>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "cmcglue/assembler.hpp"
#include "cmcglue/chart.hpp"
#include "cmcglue/clifford.hpp"
#include "cmcglue/greens.hpp"

namespace cmcglue {

/// Block coefficients of the ambient metric dv^2 + cos^2 v g_{S^p} + sin^2 v g_{S^q}.
struct AmbientBlocks {
    double dv2 = 1.0;
    double cos2 = 0.0;
    double sin2 = 0.0;
};
AmbientBlocks ambient_metric(int p, int q, double v);

/// Second-order data of a height function u over a product chart.
struct GraphJet {
    const ProductChart* chart = nullptr;
    Eigen::VectorXd zbar;
    double u = 0.0;
    Eigen::VectorXd du;  // n
    Eigen::MatrixXd d2u; // n x n, symmetric
};

/// Mean curvature of the graph z -> Xi(z, u(z)) from the exact second
/// fundamental form ||N|| B = cos u sin u (g_q - g_p) + (u_ij - Gamma^k_ij u_k);
/// for constant u this reduces exactly to slice_mean_curvature(u).
double graph_mean_curvature(int p, int q, const GraphJet& jet);

/// FD jet of an arbitrary height function over a chart.
GraphJet jet_from_function(const ProductChart& chart, const Eigen::VectorXd& zbar,
                           const std::function<double(const Eigen::VectorXd&)>& u,
                           double fd_step);

/// Ambient metric matrix in chart coordinates w = (x_bar, y_bar, v); the flat
/// model replaces it by the identity (the leading-order neck test).
Eigen::MatrixXd ambient_metric_matrix(const ProductChart& chart, const Eigen::VectorXd& w,
                                      bool flat_model = false);

/// Mean curvature of a parametrized hypersurface chart R^n -> (z_bar, v),
/// fundamental forms by central differences, ambient Christoffels analytic.
/// orientation_hint fixes the normal side; sign convention matches
/// graph_mean_curvature (hint +e_v reproduces H_t on a slice).
double parametric_mean_curvature(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map,
                                 const Eigen::VectorXd& u0, const ProductChart& chart,
                                 const Eigen::VectorXd& orientation_hint, double fd_step,
                                 bool flat_model = false);

/// The neck chart map (sigma, nu) -> (eps phi(s0+sigma) Theta(nu), mid + eps psi(s0+sigma)).
std::function<Eigen::VectorXd(const Eigen::VectorXd&)>
neck_chart_map(const GluingParameters& gp, double s0, const Eigen::VectorXd& theta0);

/// Neck normal hint N0 = -phi^{1-n} P_Theta + dlog(phi) d_v in chart coordinates.
Eigen::VectorXd neck_orientation_hint(const GluingParameters& gp, double s0,
                                      const Eigen::VectorXd& theta0);

/// Analytic jet of the transition height in the gluing-point chart (radial
/// cutoff and neck parts exact, Green's part from the filtered series).
GraphJet transition_jet(const GluingParameters& gp, const GreensField& field,
                        const ProductChart& chart, const Eigen::VectorXd& zbar, bool upper);

struct RegionStats {
    double weighted_max = 0.0; // max zeta^{2-gamma} |H - H_t|
    double raw_max = 0.0;      // max |H - H_t|
    int count = 0;
};

struct CurvatureReport {
    double gamma = 0.0;
    double t = 0.0;
    double eps = 0.0;
    double h_target = 0.0; // H_t
    std::vector<RegionStats> regions; // indexed by Region
    double global_weighted = 0.0;
    double cap_envelope_constant = 0.0;  // max |H-H_t| |zbar|^n / eps^n over caps
    double neck_envelope_constant = 0.0; // max |H-H_t| cosh^n(s) over necks
    struct Row {
        int region;
        double zeta, H, H_target, weighted;
        double dist, s;
    };
    std::vector<Row> rows;

    nlohmann::json to_json() const;
};

struct VerifyOptions {
    double neck_fd = 1e-3;           // FD step for the parametric neck evaluation
    double far_cap_dist = 0.3;       // "far from necks" threshold for diagnostics
    bool keep_rows = true;
    bool dedupe_orbits = true;       // evaluate one representative per G-orbit
};

/// Evaluates H at every atlas point (analytic graph jets on caps, assembled
/// T_t jets on transitions, parametric on necks) with a globally consistent
/// orientation and reports the weighted Prop-8 error data.
CurvatureReport verify_cmc_error(const SurfaceAtlas& atlas, const GreensField& field,
                                 double gamma, const VerifyOptions& opt = {});

/// Finite-difference derivative of the deformation operator at 0 on the mode
/// (i, j), compared with lambda_ij(t); deformation along the slice normal
/// N_t = sin t P_x - cos t P_y. Returns the max relative error over samples.
double linearization_check(int p, int q, double t, ModeIndex mode, double eps_fd,
                           double fd_step);

/// Product harmonic of degrees (i, j) in {0,1,2}: factors 1, x1, x1^2 - x2^2.
double product_harmonic(ModeIndex mode, const ProductPoint& z);

} // namespace cmcglue
