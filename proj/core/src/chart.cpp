#include "cmcglue/chart.hpp"

#include <cmath>

#include "cmcglue/clifford.hpp"
#include "cmcglue/error.hpp"

namespace cmcglue {

namespace {

// Radial profile functions of x = m/a with removable singularities at 0.
// sinc(x) = sin x / x
double sinc(double x) {
    if (std::abs(x) < 0.05) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0;
    }
    return std::sin(x) / x;
}

// qfun(x) = (x cos x - sin x)/x^3  ->  -1/3 at 0
double qfun(double x) {
    if (std::abs(x) < 0.05) {
        const double x2 = x * x;
        return -1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0 + x2 * x2 * x2 / 45360.0;
    }
    return (x * std::cos(x) - std::sin(x)) / (x * x * x);
}

// wfun(x) = qfun'(x)/x = (3 sin x - 3 x cos x - x^2 sin x)/x^5  ->  1/15 at 0
double wfun(double x) {
    if (std::abs(x) < 0.05) {
        const double x2 = x * x;
        return 1.0 / 15.0 - x2 / 210.0 + x2 * x2 / 7560.0;
    }
    const double x2 = x * x;
    return (3.0 * std::sin(x) - 3.0 * x * std::cos(x) - x2 * std::sin(x)) / (x2 * x2 * x);
}

} // namespace

Eigen::MatrixXd tangent_frame(const Eigen::VectorXd& c) {
    const int N = static_cast<int>(c.size());
    Eigen::MatrixXd E(N, N - 1);
    // Gram-Schmidt of the coordinate axes against c, skipping the axis most
    // parallel to c.
    int skip = 0;
    c.cwiseAbs().maxCoeff(&skip);
    int col = 0;
    for (int k = 0; k < N && col < N - 1; ++k) {
        if (k == skip) continue;
        Eigen::VectorXd v = Eigen::VectorXd::Unit(N, k);
        v -= (c.dot(v)) * c;
        for (int m = 0; m < col; ++m) v -= (E.col(m).dot(v)) * E.col(m);
        const double nrm = v.norm();
        if (nrm < 1e-12)
            throw numeric_error("tangent_frame: degenerate Gram-Schmidt");
        E.col(col++) = v / nrm;
    }
    return E;
}

SphereChart::SphereChart(Eigen::VectorXd center, double scale)
    : center_(std::move(center)), frame_(), a_(scale) {
    center_.normalize();
    frame_ = tangent_frame(center_);
}

SphereChart::SphereChart(Eigen::VectorXd center, double scale, Eigen::MatrixXd frame)
    : center_(std::move(center)), frame_(std::move(frame)), a_(scale) {}

Eigen::VectorXd SphereChart::point(const Eigen::VectorXd& x) const {
    const double m = x.norm();
    const Eigen::VectorXd X = frame_ * x;
    return std::cos(m / a_) * center_ + (sinc(m / a_) / a_) * X;
}

SphereChart::Jet SphereChart::jet(const Eigen::VectorXd& x) const {
    const int d = dim();
    const double m = x.norm();
    const double xa = m / a_;
    const Eigen::VectorXd X = frame_ * x;

    // p = f(m) c + g(m) X with f = cos(m/a), g = sin(m/a)/m.
    // A = f'/m, B = g'/m, Ap = A'/m, Bp = B'/m are smooth and even.
    const double f = std::cos(xa);
    const double g = sinc(xa) / a_;
    const double A = -sinc(xa) / (a_ * a_);
    const double B = qfun(xa) / (a_ * a_ * a_);
    const double Ap = -qfun(xa) / (a_ * a_ * a_ * a_);
    const double Bp = wfun(xa) / (a_ * a_ * a_ * a_ * a_);

    Jet out;
    out.p = f * center_ + g * X;
    out.dp.resize(d);
    for (int k = 0; k < d; ++k)
        out.dp[k] = A * x(k) * center_ + B * x(k) * X + g * frame_.col(k);
    out.d2p.assign(d, std::vector<Eigen::VectorXd>(d));
    for (int k = 0; k < d; ++k) {
        for (int l = 0; l <= k; ++l) {
            Eigen::VectorXd v = Ap * x(k) * x(l) * center_ + Bp * x(k) * x(l) * X
                              + B * (x(k) * frame_.col(l) + x(l) * frame_.col(k));
            if (k == l) v += A * center_ + B * X;
            out.d2p[k][l] = v;
            if (l != k) out.d2p[l][k] = v;
        }
    }
    return out;
}

Eigen::VectorXd SphereChart::log(const Eigen::VectorXd& xi) const {
    const double c = std::clamp(center_.dot(xi) / xi.norm(), -1.0, 1.0);
    const double ang = std::acos(c);
    if (ang > M_PI - 1e-6)
        throw chart_error("SphereChart::log: point near the antipode of the chart center");
    Eigen::VectorXd t = xi / xi.norm() - c * center_;
    const double tn = t.norm();
    if (tn < 1e-14) return Eigen::VectorXd::Zero(dim());
    return (a_ * ang / tn) * (frame_.transpose() * t);
}

Eigen::MatrixXd SphereChart::unit_metric(const Eigen::VectorXd& x) const {
    const Jet j = jet(x);
    const int d = dim();
    Eigen::MatrixXd g(d, d);
    for (int k = 0; k < d; ++k)
        for (int l = 0; l <= k; ++l) {
            g(k, l) = j.dp[k].dot(j.dp[l]);
            g(l, k) = g(k, l);
        }
    return g;
}

double SphereChart::unit_metric_deriv(const Jet& j, int m, int k, int l) const {
    return j.d2p[m][k].dot(j.dp[l]) + j.dp[k].dot(j.d2p[m][l]);
}

ProductChart::ProductChart(SphereChart xc, SphereChart yc)
    : xc_(std::move(xc)), yc_(std::move(yc)) {}

ProductChart ProductChart::canonical(int p, int q) {
    const double ts = minimal_angle(p, q);
    Eigen::VectorXd cx = Eigen::VectorXd::Unit(p + 1, 0);
    Eigen::VectorXd cy = Eigen::VectorXd::Unit(q + 1, 0);
    // frames: E_k = e_{k+1}
    Eigen::MatrixXd Ex = Eigen::MatrixXd::Zero(p + 1, p);
    for (int k = 0; k < p; ++k) Ex(k + 1, k) = 1.0;
    Eigen::MatrixXd Ey = Eigen::MatrixXd::Zero(q + 1, q);
    for (int k = 0; k < q; ++k) Ey(k + 1, k) = 1.0;
    return ProductChart(SphereChart(cx, std::cos(ts), Ex), SphereChart(cy, std::sin(ts), Ey));
}

ProductChart ProductChart::centered(const ProductPoint& z, int p, int q) {
    const double ts = minimal_angle(p, q);
    return ProductChart(SphereChart(z.xi, std::cos(ts)), SphereChart(z.zeta, std::sin(ts)));
}

ProductPoint ProductChart::point(const Eigen::VectorXd& zbar) const {
    const int p = xc_.dim();
    return {xc_.point(zbar.head(p)), yc_.point(zbar.tail(yc_.dim()))};
}

Eigen::VectorXd ProductChart::log(const ProductPoint& z) const {
    Eigen::VectorXd out(n());
    out.head(p()) = xc_.log(z.xi);
    out.tail(q()) = yc_.log(z.zeta);
    return out;
}

ProductChart::MetricData ProductChart::metric_data(const Eigen::VectorXd& zbar) const {
    const int p = xc_.dim(), q = yc_.dim();
    MetricData md;
    const SphereChart::Jet jx = xc_.jet(zbar.head(p));
    const SphereChart::Jet jy = yc_.jet(zbar.tail(q));
    md.gp.resize(p, p);
    for (int k = 0; k < p; ++k)
        for (int l = 0; l <= k; ++l)
            md.gp(k, l) = md.gp(l, k) = jx.dp[k].dot(jx.dp[l]);
    md.gq.resize(q, q);
    for (int k = 0; k < q; ++k)
        for (int l = 0; l <= k; ++l)
            md.gq(k, l) = md.gq(l, k) = jy.dp[k].dot(jy.dp[l]);
    md.dgp.assign(p, Eigen::MatrixXd(p, p));
    for (int m = 0; m < p; ++m)
        for (int k = 0; k < p; ++k)
            for (int l = 0; l < p; ++l)
                md.dgp[m](k, l) = xc_.unit_metric_deriv(jx, m, k, l);
    md.dgq.assign(q, Eigen::MatrixXd(q, q));
    for (int m = 0; m < q; ++m)
        for (int k = 0; k < q; ++k)
            for (int l = 0; l < q; ++l)
                md.dgq[m](k, l) = yc_.unit_metric_deriv(jy, m, k, l);
    return md;
}

double product_distance(const ProductPoint& z1, const ProductPoint& z2, double a, double b) {
    const double dx = std::acos(std::clamp(z1.xi.dot(z2.xi), -1.0, 1.0));
    const double dy = std::acos(std::clamp(z1.zeta.dot(z2.zeta), -1.0, 1.0));
    return std::sqrt(a * a * dx * dx + b * b * dy * dy);
}

} // namespace cmcglue
