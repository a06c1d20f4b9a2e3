#include "cmcglue/greens.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "cmcglue/clifford.hpp"
#include "cmcglue/error.hpp"

namespace cmcglue {

double sphere_volume(int d) {
    if (d < 1) throw std::domain_error("sphere_volume: d must be >= 1");
    return 2.0 * std::pow(M_PI, (d + 1) / 2.0) / std::tgamma((d + 1) / 2.0);
}

double harmonic_count(int d, int k) {
    if (k == 0) return 1.0;
    if (d == 1) return 2.0;
    // (2k + d - 1)/(d - 1) * binom(k + d - 2, k)
    double binom = 1.0;
    for (int m = 1; m <= d - 2; ++m) binom *= static_cast<double>(k + m) / m;
    return (2.0 * k + d - 1) / (d - 1) * binom;
}

ZonalTable zonal_eval(int d, int k_max, double x) {
    const double lam = (d - 1) / 2.0;
    ZonalTable t;
    t.P.assign(k_max + 1, 0.0);
    t.dP.assign(k_max + 1, 0.0);
    t.ddP.assign(k_max + 1, 0.0);
    t.P[0] = 1.0;
    if (k_max >= 1) {
        t.P[1] = x;
        t.dP[1] = 1.0;
    }
    for (int k = 2; k <= k_max; ++k) {
        const double a = 2.0 * (k + lam - 1) / (k + 2 * lam - 1);
        const double b = (k - 1.0) / (k + 2 * lam - 1);
        t.P[k] = a * x * t.P[k - 1] - b * t.P[k - 2];
        t.dP[k] = a * (t.P[k - 1] + x * t.dP[k - 1]) - b * t.dP[k - 2];
        t.ddP[k] = a * (2.0 * t.dP[k - 1] + x * t.ddP[k - 1]) - b * t.ddP[k - 2];
    }
    return t;
}

double GreensField::a() const { return std::cos(minimal_angle(p, q)); }
double GreensField::b() const { return std::sin(minimal_angle(p, q)); }

namespace {
constexpr double kJetFilterScale = 10.0; // sigma * d for mollified evaluations
} // namespace

double GreensField::jet_sigma(double dist) const {
    // floor keeps the low-mode damping of the far field negligible
    const double sigma = std::max(kJetFilterScale / std::max(dist, 1e-6), 25.0);
    const double cap = std::min(I_max / a(), J_max / b()) / 3.5;
    return std::min(sigma, cap);
}

std::vector<double> GreensField::default_fit_radii() const {
    // mollified VALUES are already clean from sigma*d ~ 6, so the fit ladder
    // can sit below the jet-filter scale; smaller radii shrink the bias of the
    // log-log coefficient from the constant and drift terms
    const double d_min = 1.05 * 6.0 / (std::min(I_max / a(), J_max / b()) / 3.5);
    return {d_min, 1.35 * d_min, 1.8 * d_min, 2.4 * d_min};
}

double GreensField::evaluate_filtered(const ProductPoint& z, double spatial_sigma) const {
    if (spatial_sigma <= 0) return evaluate(z).value;
    const double sa = a() * spatial_sigma, sb = b() * spatial_sigma;
    const int Icut = std::min<int>(I_max, static_cast<int>(std::ceil(3.5 * sa)));
    const int Jcut = std::min<int>(J_max, static_cast<int>(std::ceil(3.5 * sb)));
    std::vector<double> fi(Icut + 1), fj(Jcut + 1);
    for (int i = 0; i <= Icut; ++i) fi[i] = std::exp(-(i / sa) * (i / sa));
    for (int j = 0; j <= Jcut; ++j) fj[j] = std::exp(-(j / sb) * (j / sb));
    double out = 0.0;
    for (int m = 0; m < gluing.m(); ++m) {
        const ProductPoint mu = gluing.factor(m);
        const double cp = std::clamp(mu.xi.dot(z.xi), -1.0, 1.0);
        const double cq = std::clamp(mu.zeta.dot(z.zeta), -1.0, 1.0);
        const ZonalTable Ti = zonal_eval(p, Icut, cp);
        const ZonalTable Pj = zonal_eval(q, Jcut, cq);
        double s = 0.0;
        for (int i = 0; i <= Icut; ++i) {
            double row = 0.0;
            for (int j = 0; j <= Jcut; ++j) row += mode_weights(i, j) * fj[j] * Pj.P[j];
            s += row * fi[i] * Ti.P[i];
        }
        out += s;
    }
    return out;
}

GreensField::Value GreensField::evaluate(const ProductPoint& z) const {
    Value out;
    const double av = a(), bv = b();
    for (int m = 0; m < gluing.m(); ++m) {
        const ProductPoint mu = gluing.factor(m);
        const double cp = std::clamp(mu.xi.dot(z.xi), -1.0, 1.0);
        const double cq = std::clamp(mu.zeta.dot(z.zeta), -1.0, 1.0);
        const ZonalTable Ti = zonal_eval(p, I_max, cp);
        const ZonalTable Pj = zonal_eval(q, J_max, cq);
        double s = 0.0;
        for (int i = 0; i <= I_max; ++i) {
            double row = 0.0;
            for (int j = 0; j <= J_max; ++j) row += mode_weights(i, j) * Pj.P[j];
            s += row * Ti.P[i];
        }
        out.value += s;
        if (product_distance(mu, z, av, bv) < exclusion_radius())
            out.near_source_warning = true;
    }
    return out;
}

GreensField::Jet GreensField::chart_jet(const ProductChart& chart, const Eigen::VectorXd& zbar,
                                        double spatial_sigma) const {
    const int np = chart.p(), nq = chart.q(), N = np + nq;
    Jet out;
    out.grad = Eigen::VectorXd::Zero(N);
    out.hess = Eigen::MatrixXd::Zero(N, N);

    const SphereChart::Jet jx = chart.x_chart().jet(zbar.head(np));
    const SphereChart::Jet jy = chart.y_chart().jet(zbar.tail(nq));

    int Icut = I_max, Jcut = J_max;
    std::vector<double> fi(I_max + 1, 1.0), fj(J_max + 1, 1.0);
    if (spatial_sigma > 0) {
        const double sa = a() * spatial_sigma, sb = b() * spatial_sigma;
        Icut = std::min<int>(I_max, static_cast<int>(std::ceil(3.5 * sa)));
        Jcut = std::min<int>(J_max, static_cast<int>(std::ceil(3.5 * sb)));
        for (int i = 0; i <= Icut; ++i) fi[i] = std::exp(-(i / sa) * (i / sa));
        for (int j = 0; j <= Jcut; ++j) fj[j] = std::exp(-(j / sb) * (j / sb));
    }

    for (int m = 0; m < gluing.m(); ++m) {
        const ProductPoint mu = gluing.factor(m);
        const double cp = std::clamp(mu.xi.dot(jx.p), -1.0, 1.0);
        const double cq = std::clamp(mu.zeta.dot(jy.p), -1.0, 1.0);

        Eigen::VectorXd dcp(np), dcq(nq);
        for (int k = 0; k < np; ++k) dcp(k) = mu.xi.dot(jx.dp[k]);
        for (int k = 0; k < nq; ++k) dcq(k) = mu.zeta.dot(jy.dp[k]);
        Eigen::MatrixXd d2cp(np, np), d2cq(nq, nq);
        for (int k = 0; k < np; ++k)
            for (int l = 0; l <= k; ++l)
                d2cp(k, l) = d2cp(l, k) = mu.xi.dot(jx.d2p[k][l]);
        for (int k = 0; k < nq; ++k)
            for (int l = 0; l <= k; ++l)
                d2cq(k, l) = d2cq(l, k) = mu.zeta.dot(jy.d2p[k][l]);

        const ZonalTable Ti = zonal_eval(p, Icut, cp);
        const ZonalTable Pj = zonal_eval(q, Jcut, cq);

        // six separable scalar sums over the mode table
        double S0 = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0, Syy = 0;
        for (int i = 0; i <= Icut; ++i) {
            double r0 = 0, r1 = 0, r2 = 0;
            for (int j = 0; j <= Jcut; ++j) {
                const double w = mode_weights(i, j) * fj[j];
                r0 += w * Pj.P[j];
                r1 += w * Pj.dP[j];
                r2 += w * Pj.ddP[j];
            }
            r0 *= fi[i];
            r1 *= fi[i];
            r2 *= fi[i];
            S0 += Ti.P[i] * r0;
            Sx += Ti.dP[i] * r0;
            Sy += Ti.P[i] * r1;
            Sxx += Ti.ddP[i] * r0;
            Sxy += Ti.dP[i] * r1;
            Syy += Ti.P[i] * r2;
        }

        out.value += S0;
        out.grad.head(np) += Sx * dcp;
        out.grad.tail(nq) += Sy * dcq;
        out.hess.topLeftCorner(np, np) += Sxx * dcp * dcp.transpose() + Sx * d2cp;
        out.hess.topRightCorner(np, nq) += Sxy * dcp * dcq.transpose();
        out.hess.bottomRightCorner(nq, nq) += Syy * dcq * dcq.transpose() + Sy * d2cq;
    }
    out.hess.bottomLeftCorner(nq, np) = out.hess.topRightCorner(np, nq).transpose();
    return out;
}

GreensField solve_greens(int p, int q, const GluingSet& gluing, int I_max, int J_max,
                         double c_eval) {
    if (I_max < 8 || J_max < 8)
        throw std::domain_error("solve_greens: truncation caps must be >= 8");
    if (gluing.p != p || gluing.q != q)
        throw std::domain_error("solve_greens: gluing set dimensions mismatch");

    // solvability: the source must not project onto the Prop-2 kernel
    const Eigen::MatrixXd M = kernel_orthogonality_matrix(gluing);
    double worst = 0.0;
    int wk = 0, wl = 0;
    for (int k = 0; k < M.rows(); ++k)
        for (int l = 0; l < M.cols(); ++l)
            if (std::abs(M(k, l)) > worst) {
                worst = std::abs(M(k, l));
                wk = k;
                wl = l;
            }
    if (worst >= gluing.m() * 1e-8)
        throw solvability_error("solve_greens: gluing set is not kernel-orthogonal, "
                                "sum x_k y_l = " + std::to_string(M(wk, wl)) + " at (k,l) = ("
                                + std::to_string(wk + 1) + "," + std::to_string(wl + 1) + ")");

    GreensField f;
    f.p = p;
    f.q = q;
    f.I_max = I_max;
    f.J_max = J_max;
    f.c_eval = c_eval;
    f.c_n = sphere_volume(p + q - 1);
    f.gluing = gluing;
    f.mode_weights.setZero(I_max + 1, J_max + 1);

    const double ts = minimal_angle(p, q);
    const CliffordSlice slice(p, q, ts);
    const double wp = sphere_volume(p), wq = sphere_volume(q);
    const double meas = std::pow(std::cos(ts), p) * std::pow(std::sin(ts), q);
    for (int i = 0; i <= I_max; ++i) {
        for (int j = 0; j <= J_max; ++j) {
            if (i == 1 && j == 1) continue; // kernel block excluded
            const double lam = jacobi_eigenvalue(slice, {i, j});
            if (std::abs(lam) < 1e-9)
                throw numeric_error("solve_greens: lambda_ij = 0 outside the (1,1) block at ("
                                    + std::to_string(i) + "," + std::to_string(j) + ")");
            const double w = -f.c_n * harmonic_count(p, i) * harmonic_count(q, j)
                           / (wp * wq * meas * lam);
            if (!std::isfinite(w))
                throw numeric_error("solve_greens: non-finite mode weight");
            f.mode_weights(i, j) = w;
        }
    }
    return f;
}

namespace {

// deterministic direction set on S^{n-1} used for direction-averaged fits
std::vector<Eigen::VectorXd> fit_directions(int n, int count) {
    std::vector<Eigen::VectorXd> dirs;
    dirs.reserve(count);
    // golden-angle style deterministic spread
    for (int k = 0; k < count; ++k) {
        Eigen::VectorXd v(n);
        double seed = 0.7548776662 * (k + 1);
        for (int c = 0; c < n; ++c) {
            seed = std::fmod(seed * 9.869604401 + 0.5772156649, 1.0);
            v(c) = 2.0 * seed - 1.0 + 0.1 * (c + 1);
        }
        if (v.norm() < 1e-3) v.setOnes();
        dirs.push_back(v.normalized());
    }
    return dirs;
}

} // namespace

LocalExpansion local_expansion(const GreensField& field, int mu_index,
                               const std::vector<double>& radii, int directions) {
    if (radii.size() < 4)
        throw std::domain_error("local_expansion: need at least 4 radii");
    const double rmin_ok = field.exclusion_radius();
    for (double r : radii)
        if (r < rmin_ok)
            throw std::domain_error("local_expansion: radius below the evaluation-radius "
                                    "constraint c_eval/min(I,J)");

    const int n = field.n();
    const ProductPoint mu = field.gluing.factor(mu_index);
    const ProductChart chart = ProductChart::centered(mu, field.p, field.q);
    const auto dirs = fit_directions(n, directions);

    std::vector<double> mean_vals;
    mean_vals.reserve(radii.size());
    for (double r : radii) {
        double acc = 0.0;
        for (const auto& d : dirs)
            acc += field.evaluate_filtered(chart.point(r * d), field.jet_sigma(r));
        mean_vals.push_back(acc / directions);
    }

    // least squares of log(Gamma) vs log(r)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int cnt = static_cast<int>(radii.size());
    for (int k = 0; k < cnt; ++k) {
        if (mean_vals[k] <= 0)
            throw numeric_error("local_expansion: nonpositive direction-averaged value; "
                                "fit model Gamma ~ C r^e does not apply");
        const double X = std::log(radii[k]), Y = std::log(mean_vals[k]);
        sx += X; sy += Y; sxx += X * X; sxy += X * Y;
    }
    LocalExpansion out;
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    const double icept = (sy - slope * sx) / cnt;
    out.fitted_exponent = slope;
    out.fitted_coefficient = std::exp(icept);
    double resid = 0.0;
    for (int k = 0; k < cnt; ++k)
        resid = std::max(resid, std::abs(std::log(mean_vals[k])
                                         - (slope * std::log(radii[k]) + icept)));
    out.fit_residual = resid;
    if (resid > 0.5)
        throw numeric_error("local_expansion: expansion-fit error, log-log residual "
                            + std::to_string(resid));

    if (n == 3) {
        // fitted constant of Gamma(r) - 1/r = gamma + c r: the affine intercept
        // removes the O(r) drift that a plain mean would keep
        double ax = 0, ay = 0, axx = 0, axy = 0;
        for (int k = 0; k < cnt; ++k) {
            const double X = radii[k], Y = mean_vals[k] - 1.0 / radii[k];
            ax += X; ay += Y; axx += X * X; axy += X * Y;
        }
        const double c1 = (cnt * axy - ax * ay) / (cnt * axx - ax * ax);
        out.gamma_lambda = (ay - c1 * ax) / cnt;
    } else {
        out.gamma_lambda = 0.0; // convention for n >= 4
    }
    return out;
}

nlohmann::json GreensField::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["p"] = p;
    j["q"] = q;
    j["I_max"] = I_max;
    j["J_max"] = J_max;
    j["c_n"] = c_n;
    j["c_eval"] = c_eval;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& v : gluing.points) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < v.size(); ++k) row.push_back(v(k));
        pts.push_back(row);
    }
    j["gluing_points"] = pts;
    nlohmann::json w = nlohmann::json::array();
    for (int i = 0; i <= I_max; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int jj = 0; jj <= J_max; ++jj) row.push_back(mode_weights(i, jj));
        w.push_back(row);
    }
    j["mode_weights"] = w;
    return j;
}

GreensField GreensField::from_json(const nlohmann::json& j) {
    if (!j.contains("version") || j.at("version").get<int>() != 1)
        throw config_error("GreensField::from_json: unsupported or missing version");
    GreensField f;
    f.p = j.at("p").get<int>();
    f.q = j.at("q").get<int>();
    f.I_max = j.at("I_max").get<int>();
    f.J_max = j.at("J_max").get<int>();
    f.c_n = j.at("c_n").get<double>();
    f.c_eval = j.at("c_eval").get<double>();
    f.gluing.p = f.p;
    f.gluing.q = f.q;
    for (const auto& row : j.at("gluing_points")) {
        Eigen::VectorXd v(row.size());
        for (size_t k = 0; k < row.size(); ++k) v(k) = row[k].get<double>();
        f.gluing.points.push_back(v);
    }
    f.mode_weights.resize(f.I_max + 1, f.J_max + 1);
    const auto& w = j.at("mode_weights");
    for (int i = 0; i <= f.I_max; ++i)
        for (int jj = 0; jj <= f.J_max; ++jj) f.mode_weights(i, jj) = w[i][jj].get<double>();
    return f;
}

} // namespace cmcglue
