#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cmcglue/assembler.hpp"
#include "cmcglue/config.hpp"
#include "cmcglue/curvature.hpp"
#include "cmcglue/greens.hpp"

namespace cmcglue {

/// Quadrature nodes and weights on the unit d-sphere (d <= 3), exact for
/// low-degree polynomials.
struct SphereQuadrature {
    std::vector<Eigen::VectorXd> nodes;
    std::vector<double> weights; // sum = sphere_volume(d)
};
SphereQuadrature sphere_quadrature(int d, int level);

/// Relative error of <Gamma, L w> = -c_n sum_mu w(mu) for w = xi_1^2 zeta_1^2
/// (low modes, no kernel component), paired in the volume measure of g_{t*}.
double distributional_identity_error(const GreensField& field, int level = 32);

/// Max deviation of Gamma over seeded random points vs their images under
/// every group element.
double greens_invariance_error(const GreensField& field, const SymmetryGroup& group,
                               int samples, unsigned seed);

/// Weight-ratio band across region junctions: (min, max) of the ratio of the
/// two adjacent weight rules.
std::pair<double, double> weight_continuity_band(const GluingParameters& gp,
                                                 double weight_radius);

/// Max |v-height gap| between the neck at its truncation boundary and the
/// transition graph at |z_bar| = r.
double neck_boundary_gap(const GluingParameters& gp, const GreensField& field);

/// Max distance from g * point to the atlas cloud over a subsample and all
/// group elements (permutation test).
double atlas_invariance_error(const SurfaceAtlas& atlas, const SymmetryGroup& group,
                              int stride = 7);

/// max over CapPlus points of |height - t*|.
double cap_convergence_sup(const SurfaceAtlas& atlas);

/// Runs one CLI subcommand (spectrum, catenoid, group-check, greens, assemble,
/// verify, scaling), writing artifacts into cfg.out_dir and printing one
/// verdict line per check. Returns the process exit code: 0 on success, 1 on
/// numerical assertion failure.
int run_subcommand(const std::string& name, const ExperimentConfig& cfg, std::ostream& out);

} // namespace cmcglue
