#include "cmcglue/catenoid.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "cmcglue/error.hpp"

namespace cmcglue {

namespace {

double pow_cosh(int n, double s, double expo) {
    // cosh((n-1)s)^expo computed in log form to stay finite for large |s|
    const double a = (n - 1) * std::abs(s);
    // log cosh a = a + log(1 + e^{-2a}) - log 2
    const double lc = a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
    return std::exp(expo * lc);
}

} // namespace

CatenoidProfile::CatenoidProfile(int n, double quadrature_tolerance)
    : n_(n), tol_(quadrature_tolerance) {
    if (n < 3) throw std::domain_error("CatenoidProfile: n must be >= 3");
    if (!(quadrature_tolerance > 0))
        throw std::domain_error("CatenoidProfile: quadrature tolerance must be positive");
}

double CatenoidProfile::phi(double s) const { return pow_cosh(n_, s, 1.0 / (n_ - 1)); }

double CatenoidProfile::dphi(double s) const {
    // phi' = sinh((n-1)s) phi^{2-n}
    return std::sinh((n_ - 1) * s) * pow_cosh(n_, s, (2.0 - n_) / (n_ - 1));
}

double CatenoidProfile::d2phi(double s) const {
    // phi'' = (n-1) cosh((n-1)s) phi^{2-n} + (2-n) sinh^2((n-1)s) phi^{3-2n}
    const double sh = std::sinh((n_ - 1) * s);
    return (n_ - 1) * std::cosh((n_ - 1) * s) * pow_cosh(n_, s, (2.0 - n_) / (n_ - 1))
         + (2.0 - n_) * sh * sh * pow_cosh(n_, s, (3.0 - 2.0 * n_) / (n_ - 1));
}

double CatenoidProfile::dlog_phi(double s) const { return std::tanh((n_ - 1) * s); }

double CatenoidProfile::psi_prime(double s) const { return pow_cosh(n_, s, (2.0 - n_) / (n_ - 1)); }

double CatenoidProfile::psi(double s) const {
    if (s == 0.0) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double v = gauss_kronrod<double, 15>::integrate(
        [this](double t) { return psi_prime(t); }, 0.0, s, 12, tol_, &err);
    if (err > std::max(tol_, 1e3 * tol_ * std::abs(v)) * 10.0)
        throw numeric_error("CatenoidProfile::psi: quadrature did not reach the requested "
                            "tolerance (achieved " + std::to_string(err) + ")");
    return v;
}

std::vector<CatenoidProfile::Sample> CatenoidProfile::sample_table(double s_max, int count) const {
    std::vector<Sample> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        const double s = -s_max + 2.0 * s_max * k / (count - 1);
        out.push_back({s, phi(s), psi(s)});
    }
    return out;
}

double neck_height_integral(int n, double tol) {
    if (n < 3)
        throw std::domain_error("neck_height_integral: divergent for n < 3");
    CatenoidProfile prof(n, tol);
    // integrand <= 2^{(n-2)/(n-1)} e^{-(n-2)|s|}; truncate where it is < tol/10
    const double c = std::pow(2.0, (n - 2.0) / (n - 1.0));
    const double S = std::max(4.0, std::log(10.0 * c / tol) / (n - 2));
    const double tail = 2.0 * c * std::exp(-(n - 2) * S) / (n - 2);
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double v = gauss_kronrod<double, 15>::integrate(
        [&prof](double t) { return prof.psi_prime(t); }, -S, S, 12, tol, &err);
    if (err + tail > 100.0 * tol * std::max(1.0, v))
        throw numeric_error("neck_height_integral: tolerance not achieved");
    return v;
}

double catenoid_mean_curvature_residual(int n, double s, double fd_step) {
    if (fd_step <= 0) throw std::domain_error("catenoid_mean_curvature_residual: fd_step must be > 0");
    CatenoidProfile prof(n);
    const double h = fd_step;
    const double rp = (prof.phi(s + h) - prof.phi(s - h)) / (2 * h);
    const double rpp = (prof.phi(s + h) - 2 * prof.phi(s) + prof.phi(s - h)) / (h * h);
    const double zp = (prof.psi(s + h) - prof.psi(s - h)) / (2 * h);
    const double zpp = (prof.psi(s + h) - 2 * prof.psi(s) + prof.psi(s - h)) / (h * h);
    const double w2 = rp * rp + zp * zp;
    // sum-of-principal-curvatures convention for the revolution hypersurface
    // (rho(s) Theta, z(s)) in R^{n+1}
    const double prof_curv = (rp * zpp - zp * rpp) / std::pow(w2, 1.5);
    const double rot_curv = (n - 1) * zp / (prof.phi(s) * std::sqrt(w2));
    return std::abs(prof_curv + rot_curv);
}

JacobiField jacobi_field_from_name(const std::string& name) {
    if (name == "translation_vertical") return JacobiField::translation_vertical;
    if (name == "dilation") return JacobiField::dilation;
    if (name == "translation_horizontal") return JacobiField::translation_horizontal;
    throw std::invalid_argument("unknown Jacobi field name: " + name);
}

namespace {

// L_j u = phi^{-2} u'' + (n-2) dlogphi phi^{-2} u' - j(n-2+j) phi^{-2} u
//         + n(n-1) phi^{-2n} u,  evaluated with FD derivatives of u.
template <class F>
double mode_operator_fd(const CatenoidProfile& prof, int j, const F& u, double s, double h) {
    const int n = prof.n();
    const double up = (u(s + h) - u(s - h)) / (2 * h);
    const double upp = (u(s + h) - 2 * u(s) + u(s - h)) / (h * h);
    const double ph2 = std::pow(prof.phi(s), -2.0);
    return ph2 * (upp + (n - 2) * prof.dlog_phi(s) * up) - j * (n - 2 + j) * ph2 * u(s)
         + n * (n - 1) * std::pow(prof.phi(s), -2.0 * n) * u(s);
}

} // namespace

double jacobi_residual(int n, JacobiField field, double s_lo, double s_hi, double fd_step) {
    if (n < 3) throw std::domain_error("jacobi_residual: n must be >= 3");
    CatenoidProfile prof(n);
    int j = 0;
    std::function<double(double)> u;
    switch (field) {
    case JacobiField::translation_vertical:
        u = [&prof](double s) { return prof.dlog_phi(s); };
        break;
    case JacobiField::dilation:
        u = [&prof](double s) { return prof.psi(s) * prof.dlog_phi(s) - prof.psi_prime(s); };
        break;
    case JacobiField::translation_horizontal:
        // phi^{1-n} carries the degree-1 harmonic; its amplitude solves the
        // mode ODE with the j=1 angular term -(n-1) phi^{-2}
        j = 1;
        u = [&prof, n](double s) { return std::pow(prof.phi(s), 1.0 - n); };
        break;
    }
    double worst = 0.0;
    const int samples = 61;
    for (int k = 0; k < samples; ++k) {
        const double s = s_lo + (s_hi - s_lo) * k / (samples - 1);
        worst = std::max(worst, std::abs(mode_operator_fd(prof, j, u, s, fd_step)));
    }
    return worst;
}

BoundedModeResult bounded_mode_verdict(int n, int j, double delta, double s_max,
                                       double fit_tolerance) {
    if (n < 3) throw std::domain_error("bounded_mode_verdict: n must be >= 3");
    if (j < 2)
        throw std::domain_error("bounded_mode_verdict: j must be >= 2 "
                                "(mode 1 has the bounded solution phi^{1-n})");
    if (!(delta < 0)) throw std::domain_error("bounded_mode_verdict: delta must be < 0");

    CatenoidProfile prof(n);
    // u'' = -(n-2) tanh((n-1)s) u' + j(n-2+j) u - n(n-1) phi^{2-2n} u
    const auto rhs = [&](double s, double u, double v) {
        const double pot = j * (n - 2 + j)
                         - n * (n - 1) * std::pow(prof.phi(s), 2.0 - 2.0 * n);
        return std::pair<double, double>{v, -(n - 2) * prof.dlog_phi(s) * v + pot * u};
    };

    // decaying branch at -infinity: u ~ e^{(n-2+j)s}
    const double mu_minus = n - 2 + j;
    double u = 1.0, v = mu_minus, log_scale = 0.0;
    double s = -s_max;
    const double h = 1e-3;
    const int steps = static_cast<int>(std::ceil(2.0 * s_max / h));
    const double hs = 2.0 * s_max / steps;

    BoundedModeResult out;
    out.solution.j = j;
    const int keep_every = std::max(1, steps / 2000);

    for (int k = 0; k < steps; ++k) {
        // classic RK4 on (u, v)
        auto f1 = rhs(s, u, v);
        auto f2 = rhs(s + hs / 2, u + hs / 2 * f1.first, v + hs / 2 * f1.second);
        auto f3 = rhs(s + hs / 2, u + hs / 2 * f2.first, v + hs / 2 * f2.second);
        auto f4 = rhs(s + hs, u + hs * f3.first, v + hs * f3.second);
        u += hs / 6 * (f1.first + 2 * f2.first + 2 * f3.first + f4.first);
        v += hs / 6 * (f1.second + 2 * f2.second + 2 * f3.second + f4.second);
        s += hs;
        const double mag = std::max(std::abs(u), std::abs(v));
        if (mag > 1e8) { // renormalize into the log scale factor
            u /= mag;
            v /= mag;
            log_scale += std::log(mag);
        }
        if (k % keep_every == 0 && std::abs(u) > 0) {
            out.solution.grid.push_back(s);
            out.solution.log_abs.push_back(log_scale + std::log(std::abs(u)));
        }
    }

    // least-squares slope of log|u| vs s on the last quarter of the range
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (size_t k = 0; k < out.solution.grid.size(); ++k) {
        if (out.solution.grid[k] < s_max / 2) continue;
        const double X = out.solution.grid[k], Y = out.solution.log_abs[k];
        sx += X; sy += Y; sxx += X * X; sxy += X * Y;
        ++cnt;
    }
    if (cnt < 8) {
        out.verdict = ModeVerdict::inconclusive;
        return out;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    const double icept = (sy - slope * sx) / cnt;
    double resid = 0.0;
    for (size_t k = 0; k < out.solution.grid.size(); ++k) {
        if (out.solution.grid[k] < s_max / 2) continue;
        resid = std::max(resid, std::abs(out.solution.log_abs[k]
                                         - slope * out.solution.grid[k] - icept));
    }
    out.growth_exponent = slope;
    out.expected_exponent = static_cast<double>(j); // +infinity indicial growth root
    out.fit_residual = resid;
    const bool blows_up = slope >= out.expected_exponent * (1.0 - fit_tolerance) && slope > 0;
    out.verdict = (blows_up && resid < 0.5) ? ModeVerdict::no_bounded_nontrivial
                                            : ModeVerdict::inconclusive;
    return out;
}

} // namespace cmcglue
