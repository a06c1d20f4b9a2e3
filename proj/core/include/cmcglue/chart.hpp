#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace cmcglue {

/// A point of S^p x S^q stored as its two unit factors.
struct ProductPoint {
    Eigen::VectorXd xi;   // unit vector in R^{p+1}
    Eigen::VectorXd zeta; // unit vector in R^{q+1}
};

/// Geodesic normal chart on the round sphere of radius `scale` in R^{d+1}.
/// Chart coordinates are arc length for the scaled metric:
///   point(x) = cos(|x|/a) c + sin(|x|/a) * direction,  a = scale.
/// First and second derivatives of the embedding are analytic; the apparent
/// 1/|x| singularities cancel and are handled by series near 0.
class SphereChart {
public:
    SphereChart(Eigen::VectorXd center, double scale);
    SphereChart(Eigen::VectorXd center, double scale, Eigen::MatrixXd frame);

    int dim() const { return static_cast<int>(frame_.cols()); }
    double scale() const { return a_; }
    const Eigen::VectorXd& center() const { return center_; }
    const Eigen::MatrixXd& frame() const { return frame_; }

    Eigen::VectorXd point(const Eigen::VectorXd& x) const;

    /// Embedding derivatives at x: value, d first derivatives, d(d+1)/2 second.
    struct Jet {
        Eigen::VectorXd p;
        std::vector<Eigen::VectorXd> dp;                 // [k]
        std::vector<std::vector<Eigen::VectorXd>> d2p;   // [k][l], symmetric
    };
    Jet jet(const Eigen::VectorXd& x) const;

    /// Inverse chart (log map); rejects near-antipodal input.
    Eigen::VectorXd log(const Eigen::VectorXd& xi) const;

    /// Components of the UNIT sphere metric in this chart: g_kl = dp_k . dp_l.
    Eigen::MatrixXd unit_metric(const Eigen::VectorXd& x) const;
    /// d/dx_m of unit_metric_kl.
    double unit_metric_deriv(const Jet& j, int m, int k, int l) const;

private:
    Eigen::VectorXd center_;
    Eigen::MatrixXd frame_; // (d+1) x d, orthonormal, orthogonal to center
    double a_;
};

/// Product chart (x-bar | y-bar) on S^p x S^q with the C_{t*} scales
/// cos t* on the first factor and sin t* on the second; geodesic normal
/// coordinates for g_* = cos^2 t* g_{S^p} + sin^2 t* g_{S^q}.
class ProductChart {
public:
    ProductChart(SphereChart xc, SphereChart yc);

    /// Canonical chart at the first-coordinate poles (the base gluing-point chart).
    static ProductChart canonical(int p, int q);
    /// Chart centred at an arbitrary product point, frames by deterministic Gram-Schmidt.
    static ProductChart centered(const ProductPoint& z, int p, int q);

    int p() const { return xc_.dim(); }
    int q() const { return yc_.dim(); }
    int n() const { return p() + q(); }
    const SphereChart& x_chart() const { return xc_; }
    const SphereChart& y_chart() const { return yc_; }
    ProductPoint center() const { return {xc_.center(), yc_.center()}; }

    ProductPoint point(const Eigen::VectorXd& zbar) const;
    Eigen::VectorXd log(const ProductPoint& z) const;

    /// Unit-sphere metric blocks and derivatives at zbar (for graph curvature).
    struct MetricData {
        Eigen::MatrixXd gp;  // p x p, unit S^p metric components
        Eigen::MatrixXd gq;  // q x q
        // dgp[m](k,l) = d/dzbar_m of gp(k,l), m = 0..p-1; likewise dgq over y slots
        std::vector<Eigen::MatrixXd> dgp;
        std::vector<Eigen::MatrixXd> dgq;
    };
    MetricData metric_data(const Eigen::VectorXd& zbar) const;

private:
    SphereChart xc_;
    SphereChart yc_;
};

/// Deterministic orthonormal tangent frame at a unit vector c in R^{d+1}.
Eigen::MatrixXd tangent_frame(const Eigen::VectorXd& c);

/// Geodesic distance on (S^p x S^q, g_*) between product points.
double product_distance(const ProductPoint& z1, const ProductPoint& z2, double a, double b);

} // namespace cmcglue
