#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cmcglue/chart.hpp"

namespace cmcglue {

/// One ambient symmetry (sigma_{p+1}, sigma_{q+1}) in O(p+1) x O(q+1).
struct OrthogonalPair {
    Eigen::MatrixXd sigma_p; // (p+1) x (p+1)
    Eigen::MatrixXd sigma_q; // (q+1) x (q+1)
};

/// Structured generator description (compiled to matrices).
/// kind: "rotation" (plane + angle as a rational multiple of pi),
///       "signs" (diagonal +-1), "rho" (the canonical reflection pair),
///       "matrix" (raw entries).
struct GeneratorSpec {
    std::string kind;
    std::string factor;            // rotation: "x" or "y"
    int plane_a = 1, plane_b = 2;  // rotation: 1-based coordinates within the factor
    long angle_num = 0;            // rotation: angle = num * pi / den
    long angle_den = 1;
    std::vector<int> x_signs;      // signs
    std::vector<int> y_signs;
    Eigen::MatrixXd x_matrix;      // matrix
    Eigen::MatrixXd y_matrix;
};

OrthogonalPair compile_generator(int p, int q, const GeneratorSpec& spec);
OrthogonalPair identity_pair(int p, int q);
OrthogonalPair rho_pair(int p, int q);
OrthogonalPair rotation_pair(int p, int q, const std::string& factor, int plane_a, int plane_b,
                             long angle_num, long angle_den);
OrthogonalPair signs_pair(int p, int q, const std::vector<int>& x_signs,
                          const std::vector<int>& y_signs);
OrthogonalPair compose(const OrthogonalPair& g, const OrthogonalPair& h);

/// Finite subgroup of O(p+1) x O(q+1), closed under composition and inverse.
struct SymmetryGroup {
    int p = 1, q = 1;
    std::vector<OrthogonalPair> elements; // deduplicated; contains the identity
    std::vector<GeneratorSpec> generator_spec;

    int order() const { return static_cast<int>(elements.size()); }
};

/// mu_0 = (sqrt(p/n), 0, ..., 0 | sqrt(q/n), 0, ..., 0) in R^{n+2}.
Eigen::VectorXd base_point(int p, int q);

/// Breadth-first closure under composition with tolerance dedupe
/// (max entry difference < 1e-8). Throws if the closure exceeds order_cap.
SymmetryGroup close_group(int p, int q, const std::vector<OrthogonalPair>& generators,
                          int order_cap = 20000);

/// Orbit of mu_0 (or any point of C_{t*}) under G: the gluing set Lambda.
struct GluingSet {
    int p = 1, q = 1;
    std::vector<Eigen::VectorXd> points; // unit vectors in R^{n+2} on C_{t*}

    int m() const { return static_cast<int>(points.size()); }
    ProductPoint factor(int k) const; // unit (xi, zeta) of points[k]
};

GluingSet orbit(const SymmetryGroup& group, const Eigen::VectorXd& point,
                double dedupe_tol = 1e-9);

/// Dimension of {A : sigma_p^T A sigma_q = A for all g}: computed both as the
/// numerical rank of the Reynolds projection and by the trace formula
/// (1/|G|) sum tr(sigma_p) tr(sigma_q); the two must agree.
struct FixedBilinear {
    int dimension = 0;
    double trace_formula = 0.0;           // before rounding
    std::vector<Eigen::MatrixXd> basis;   // (p+1) x (q+1) fixed matrices
    bool admissible() const { return dimension == 0; }
};
FixedBilinear fixed_bilinear_dimension(const SymmetryGroup& group);

bool contains_rho(const SymmetryGroup& group, double tol = 1e-8);

/// M_kl = sum_{mu in Lambda} x_k(mu) y_l(mu) (ambient coordinates); the
/// projection of the source onto the Prop-2 kernel block.
Eigen::MatrixXd kernel_orthogonality_matrix(const GluingSet& gluing);

/// Apply a group element to an ambient vector in R^{n+2}.
Eigen::VectorXd apply_pair(const OrthogonalPair& g, const Eigen::VectorXd& v, int p, int q);

/// Size of the stabilizer of a point (fixed-point test at tolerance).
int stabilizer_order(const SymmetryGroup& group, const Eigen::VectorXd& point, double tol = 1e-8);

} // namespace cmcglue
