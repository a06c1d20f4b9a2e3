#include "cmcglue/curvature.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <unordered_map>

#include "cmcglue/error.hpp"

namespace cmcglue {

AmbientBlocks ambient_metric(int p, int q, double v) {
    (void)p;
    (void)q;
    if (!(v > 0 && v < M_PI / 2))
        throw std::domain_error("ambient_metric: v must lie in (0, pi/2)");
    return {1.0, std::cos(v) * std::cos(v), std::sin(v) * std::sin(v)};
}

namespace {

// Shared curvature core: first/second derivative data of a chart map into
// (z_bar, v) coordinates, exact ambient metric and Christoffels, normal by
// null-space solve, B(X,Y) = -<cov Hess, N>, H = trace_gbar(B). Both the
// graph path (analytic jets) and the parametric path (FD jets) feed it.
struct AmbientData;
AmbientData ambient_data(const ProductChart& chart, const Eigen::VectorXd& w, bool flat_model);

double mean_curvature_core(const std::vector<Eigen::VectorXd>& T,
                           const std::vector<std::vector<Eigen::VectorXd>>& d2F,
                           const ProductChart& chart, const Eigen::VectorXd& w0,
                           const Eigen::VectorXd& orientation_hint, bool flat_model);

} // namespace

double graph_mean_curvature(int p, int q, const GraphJet& jet) {
    const int n = p + q;
    if (!jet.chart || jet.du.size() != n)
        throw std::domain_error("graph_mean_curvature: malformed jet");
    if (!(jet.u > 0 && jet.u < M_PI / 2))
        throw geometry_error("graph_mean_curvature: height outside (0, pi/2)");

    // tangents T_i = d_i + u_,i d_v and Hessian (0, u_,ij) of the graph map,
    // assembled analytically from the jet
    std::vector<Eigen::VectorXd> T(n, Eigen::VectorXd::Zero(n + 1));
    std::vector<std::vector<Eigen::VectorXd>> d2F(
        n, std::vector<Eigen::VectorXd>(n, Eigen::VectorXd::Zero(n + 1)));
    for (int i = 0; i < n; ++i) {
        T[i](i) = 1.0;
        T[i](n) = jet.du(i);
        for (int j = 0; j < n; ++j) d2F[i][j](n) = jet.d2u(i, j);
    }
    Eigen::VectorXd w0(n + 1);
    w0.head(n) = jet.zbar;
    w0(n) = jet.u;
    Eigen::VectorXd hint = Eigen::VectorXd::Zero(n + 1);
    hint(n) = 1.0;
    return mean_curvature_core(T, d2F, *jet.chart, w0, hint, false);
}

GraphJet jet_from_function(const ProductChart& chart, const Eigen::VectorXd& zbar,
                           const std::function<double(const Eigen::VectorXd&)>& u,
                           double fd_step) {
    const int n = chart.n();
    const double h = fd_step;
    GraphJet jet;
    jet.chart = &chart;
    jet.zbar = zbar;
    jet.u = u(zbar);
    jet.du.resize(n);
    jet.d2u.resize(n, n);
    const double u0 = jet.u;
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd zp = zbar, zm = zbar;
        zp(k) += h;
        zm(k) -= h;
        const double up = u(zp), um = u(zm);
        jet.du(k) = (up - um) / (2 * h);
        jet.d2u(k, k) = (up - 2 * u0 + um) / (h * h);
    }
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < k; ++l) {
            Eigen::VectorXd zpp = zbar, zpm = zbar, zmp = zbar, zmm = zbar;
            zpp(k) += h; zpp(l) += h;
            zpm(k) += h; zpm(l) -= h;
            zmp(k) -= h; zmp(l) += h;
            zmm(k) -= h; zmm(l) -= h;
            jet.d2u(k, l) = jet.d2u(l, k) = (u(zpp) - u(zpm) - u(zmp) + u(zmm)) / (4 * h * h);
        }
    return jet;
}

Eigen::MatrixXd ambient_metric_matrix(const ProductChart& chart, const Eigen::VectorXd& w,
                                      bool flat_model) {
    const int p = chart.p(), q = chart.q(), n = p + q;
    Eigen::MatrixXd G = Eigen::MatrixXd::Identity(n + 1, n + 1);
    if (flat_model) return G;
    const double v = w(n);
    const ProductChart::MetricData md = chart.metric_data(w.head(n));
    G.topLeftCorner(p, p) = std::cos(v) * std::cos(v) * md.gp;
    G.block(p, p, q, q) = std::sin(v) * std::sin(v) * md.gq;
    return G;
}

namespace {

// ambient metric with coordinate derivatives and Christoffels at w = (zbar, v)
struct AmbientData {
    Eigen::MatrixXd G;
    Eigen::MatrixXd Ginv;
    std::vector<Eigen::MatrixXd> Gamma; // Gamma[a](b,c)
};

double mean_curvature_core(const std::vector<Eigen::VectorXd>& T,
                           const std::vector<std::vector<Eigen::VectorXd>>& d2F,
                           const ProductChart& chart, const Eigen::VectorXd& w0,
                           const Eigen::VectorXd& orientation_hint, bool flat_model) {
    const int n = static_cast<int>(T.size());
    const AmbientData amb = ambient_data(chart, w0, flat_model);

    Eigen::MatrixXd gbar(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
            gbar(i, j) = gbar(j, i) = T[i].dot(amb.G * T[j]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gbar);
    if (!lu.isInvertible() || lu.determinant() <= 0)
        throw geometry_error("mean curvature: near-singular first fundamental form");
    const Eigen::MatrixXd ginv = lu.inverse();

    // unit normal: kernel of the n x (n+1) matrix (G T_i)^T
    Eigen::MatrixXd A(n, n + 1);
    for (int i = 0; i < n; ++i) A.row(i) = (amb.G * T[i]).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    Eigen::VectorXd N = svd.matrixV().col(n);
    const double gnorm = std::sqrt(N.dot(amb.G * N));
    if (!(gnorm > 0) || !std::isfinite(gnorm))
        throw geometry_error("mean curvature: failed to normalize the normal");
    N /= gnorm;
    if (orientation_hint.dot(amb.G * N) < 0) N = -N;

    // B_ij = -N . G . (d2F_ij + Gamma(T_i, T_j))
    double H = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd cov = d2F[i][j];
            for (int a = 0; a <= n; ++a) cov(a) += T[i].dot(amb.Gamma[a] * T[j]);
            H += ginv(i, j) * (-N.dot(amb.G * cov));
        }
    return H;
}

AmbientData ambient_data(const ProductChart& chart, const Eigen::VectorXd& w, bool flat_model) {
    const int p = chart.p(), q = chart.q(), n = p + q;
    AmbientData out;
    out.G = ambient_metric_matrix(chart, w, flat_model);
    out.Ginv = out.G.inverse();
    out.Gamma.assign(n + 1, Eigen::MatrixXd::Zero(n + 1, n + 1));
    if (flat_model) return out;

    const double v = w(n);
    const double c2 = std::cos(v) * std::cos(v), s2 = std::sin(v) * std::sin(v);
    const double dc2 = -2.0 * std::cos(v) * std::sin(v); // d/dv cos^2 v
    const ProductChart::MetricData md = chart.metric_data(w.head(n));

    std::vector<Eigen::MatrixXd> dG(n + 1, Eigen::MatrixXd::Zero(n + 1, n + 1));
    for (int m = 0; m < p; ++m) dG[m].topLeftCorner(p, p) = c2 * md.dgp[m];
    for (int m = 0; m < q; ++m) dG[p + m].block(p, p, q, q) = s2 * md.dgq[m];
    dG[n].topLeftCorner(p, p) = dc2 * md.gp;
    dG[n].block(p, p, q, q) = -dc2 * md.gq;

    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b)
            for (int c = 0; c <= b; ++c) {
                double g = 0.0;
                for (int d = 0; d <= n; ++d)
                    g += out.Ginv(a, d) * (dG[b](d, c) + dG[c](d, b) - dG[d](b, c));
                out.Gamma[a](b, c) = out.Gamma[a](c, b) = 0.5 * g;
            }
    return out;
}

} // namespace

double parametric_mean_curvature(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map,
                                 const Eigen::VectorXd& u0, const ProductChart& chart,
                                 const Eigen::VectorXd& orientation_hint, double fd_step,
                                 bool flat_model) {
    const int n = static_cast<int>(u0.size());
    const double h = fd_step;
    if (h <= 0) throw std::domain_error("parametric_mean_curvature: fd_step must be > 0");

    const Eigen::VectorXd w0 = map(u0);
    std::vector<Eigen::VectorXd> T(n);
    std::vector<std::vector<Eigen::VectorXd>> d2F(n, std::vector<Eigen::VectorXd>(n));
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd up = u0, um = u0;
        up(k) += h;
        um(k) -= h;
        const Eigen::VectorXd fp = map(up), fm = map(um);
        T[k] = (fp - fm) / (2 * h);
        d2F[k][k] = (fp - 2 * w0 + fm) / (h * h);
    }
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < k; ++l) {
            Eigen::VectorXd upp = u0, upm = u0, ump = u0, umm = u0;
            upp(k) += h; upp(l) += h;
            upm(k) += h; upm(l) -= h;
            ump(k) -= h; ump(l) += h;
            umm(k) -= h; umm(l) -= h;
            d2F[k][l] = d2F[l][k] = (map(upp) - map(upm) - map(ump) + map(umm)) / (4 * h * h);
        }

    return mean_curvature_core(T, d2F, chart, w0, orientation_hint, flat_model);
}

std::function<Eigen::VectorXd(const Eigen::VectorXd&)>
neck_chart_map(const GluingParameters& gp, double s0, const Eigen::VectorXd& theta0) {
    const int n = gp.n();
    const CatenoidProfile prof(n);
    const SphereChart theta_chart(theta0, 1.0);
    const double mid = gp.mid();
    const double eps = gp.eps;
    return [n, prof, theta_chart, mid, eps, s0](const Eigen::VectorXd& u) {
        const double s = s0 + u(0);
        const Eigen::VectorXd theta = theta_chart.point(u.tail(n - 1));
        Eigen::VectorXd w(n + 1);
        w.head(n) = eps * prof.phi(s) * theta;
        w(n) = mid + eps * prof.psi(s);
        return w;
    };
}

Eigen::VectorXd neck_orientation_hint(const GluingParameters& gp, double s0,
                                      const Eigen::VectorXd& theta0) {
    const int n = gp.n();
    const CatenoidProfile prof(n);
    Eigen::VectorXd hint(n + 1);
    hint.head(n) = -std::pow(prof.phi(s0), 1.0 - n) * theta0;
    hint(n) = prof.dlog_phi(s0);
    return hint;
}

namespace {

// analytic jet of a radial function F(rho) over the chart: value, F', F''
struct RadialJet {
    double F, dF, d2F;
};

RadialJet eta_jet(double rho, double r) {
    const double h = 1e-5;
    const double w = rho / r;
    return {cutoff_eta(w), (cutoff_eta(w + h) - cutoff_eta(w - h)) / (2 * h) / r,
            (cutoff_eta(w + h) - 2 * cutoff_eta(w) + cutoff_eta(w - h)) / (h * h) / (r * r)};
}

// neck height mid + eps psi(s(rho)) as a radial function
RadialJet neck_height_jet(const GluingParameters& gp, const CatenoidProfile& prof, double rho,
                          bool upper) {
    const double s = neck_s_from_radius(gp, rho, upper);
    const double pp = prof.psi_prime(s);       // psi'
    const double dp = prof.dphi(s);            // phi'
    const double ppp = (2.0 - gp.n()) * std::pow(prof.phi(s), 1.0 - gp.n()) * dp; // psi''
    const double d2p = prof.d2phi(s);          // phi''
    RadialJet rj;
    rj.F = gp.mid() + gp.eps * prof.psi(s);
    rj.dF = pp / dp;
    rj.d2F = (ppp * dp - pp * d2p) / (gp.eps * dp * dp * dp);
    return rj;
}

} // namespace

GraphJet transition_jet(const GluingParameters& gp, const GreensField& field,
                        const ProductChart& chart, const Eigen::VectorXd& zbar, bool upper) {
    const int n = gp.n();
    const double rho = zbar.norm();
    const CatenoidProfile prof(n);
    const double epsn1 = std::pow(gp.eps, n - 1);

    GraphJet jet;
    jet.chart = &chart;
    jet.zbar = zbar;
    jet.u = 0.0;
    jet.du = Eigen::VectorXd::Zero(n);
    jet.d2u = Eigen::MatrixXd::Zero(n, n);

    const RadialJet eta = eta_jet(rho, gp.r);
    const RadialJet nk = neck_height_jet(gp, prof, rho, upper);

    // graph part (full jet), only when the cutoff sees it
    double gval = 0.0;
    Eigen::VectorXd ggrad = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd ghess = Eigen::MatrixXd::Zero(n, n);
    if (eta.F > 0.0 || eta.dF != 0.0 || eta.d2F != 0.0) {
        const GreensField::Jet gj = field.chart_jet(chart, zbar, field.jet_sigma(rho));
        const double sgn = upper ? -1.0 : 1.0;
        gval = (upper ? gp.t_plus : gp.t_minus) + sgn * epsn1 * gj.value;
        ggrad = sgn * epsn1 * gj.grad;
        ghess = sgn * epsn1 * gj.hess;
    }

    // T = eta g + (1 - eta) N, with N radial
    const Eigen::VectorXd zhat = zbar / rho;
    const Eigen::MatrixXd radial_dd =
        Eigen::MatrixXd::Identity(n, n) / rho - zhat * zhat.transpose() / rho;
    const Eigen::VectorXd eta_grad = eta.dF * zhat;
    const Eigen::MatrixXd eta_hess = eta.d2F * zhat * zhat.transpose() + eta.dF * radial_dd;
    const Eigen::VectorXd nk_grad = nk.dF * zhat;
    const Eigen::MatrixXd nk_hess = nk.d2F * zhat * zhat.transpose() + nk.dF * radial_dd;

    jet.u = eta.F * gval + (1.0 - eta.F) * nk.F;
    jet.du = eta_grad * (gval - nk.F) + eta.F * ggrad + (1.0 - eta.F) * nk_grad;
    jet.d2u = eta_hess * (gval - nk.F) + eta_grad * (ggrad - nk_grad).transpose()
            + (ggrad - nk_grad) * eta_grad.transpose() + eta.F * ghess
            + (1.0 - eta.F) * nk_hess;
    return jet;
}

CurvatureReport verify_cmc_error(const SurfaceAtlas& atlas, const GreensField& field,
                                 double gamma, const VerifyOptions& opt) {
    const GluingParameters& gp = atlas.params;
    const int p = gp.p, q = gp.q, n = gp.n();
    if (!(gamma > 2.0 - n && gamma < 0.0))
        throw std::domain_error("verify_cmc_error: gamma must lie strictly in (2-n, 0)");

    CurvatureReport rep;
    rep.gamma = gamma;
    rep.t = gp.t;
    rep.eps = gp.eps;
    rep.h_target = slice_mean_curvature(CliffordSlice(p, q, gp.t_plus));
    rep.regions.assign(5, RegionStats{});

    std::vector<ProductChart> mu_charts;
    for (int m = 0; m < field.gluing.m(); ++m)
        mu_charts.push_back(ProductChart::centered(field.gluing.factor(m), p, q));

    const double epsn1 = std::pow(gp.eps, n - 1);
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(n);

    // curvature is G-invariant; evaluate one representative per orbit
    std::unordered_map<int, double> orbit_H;

    const auto evaluate_H = [&](const AtlasPoint& pt) -> double {
        double H = 0.0;
        switch (pt.region) {
        case Region::CapPlus:
        case Region::CapMinus: {
            const bool upper = (pt.region == Region::CapPlus);
            const ProductChart chart = ProductChart::centered(pt.z, p, q);
            const GreensField::Jet gj = field.chart_jet(chart, origin, field.jet_sigma(pt.dist));
            GraphJet jet;
            jet.chart = &chart;
            jet.zbar = origin;
            const double sgn = upper ? -1.0 : 1.0;
            jet.u = (upper ? gp.t_plus : gp.t_minus) + sgn * epsn1 * gj.value;
            jet.du = sgn * epsn1 * gj.grad;
            jet.d2u = sgn * epsn1 * gj.hess;
            H = graph_mean_curvature(p, q, jet);
            if (!upper) H = -H; // global orientation
            break;
        }
        case Region::TransitionUpper:
        case Region::TransitionLower: {
            const bool upper = (pt.region == Region::TransitionUpper);
            const ProductChart& chart = mu_charts[pt.mu_index];
            const Eigen::VectorXd zbar = chart.log(pt.z);
            const GraphJet jet = transition_jet(gp, field, chart, zbar, upper);
            H = graph_mean_curvature(p, q, jet);
            if (!upper) H = -H;
            break;
        }
        case Region::Neck: {
            const ProductChart& chart = mu_charts[pt.mu_index];
            const Eigen::VectorXd zbar = chart.log(pt.z);
            const Eigen::VectorXd theta0 = zbar / zbar.norm();
            const auto map = neck_chart_map(gp, pt.s, theta0);
            const Eigen::VectorXd hint = neck_orientation_hint(gp, pt.s, theta0);
            H = parametric_mean_curvature(map, Eigen::VectorXd::Zero(n), chart, hint,
                                          opt.neck_fd);
            break;
        }
        }
        return H;
    };

    for (const auto& pt : atlas.points) {
        double H = 0.0;
        if (opt.dedupe_orbits && pt.orbit_id >= 0) {
            const auto hit = orbit_H.find(pt.orbit_id);
            if (hit != orbit_H.end()) {
                H = hit->second;
            } else {
                H = evaluate_H(pt);
                orbit_H.emplace(pt.orbit_id, H);
            }
        } else {
            H = evaluate_H(pt);
        }

        const double err = std::abs(H - rep.h_target);
        const double weighted = std::pow(pt.weight, 2.0 - gamma) * err;
        RegionStats& rs = rep.regions[static_cast<int>(pt.region)];
        rs.weighted_max = std::max(rs.weighted_max, weighted);
        rs.raw_max = std::max(rs.raw_max, err);
        rs.count++;
        rep.global_weighted = std::max(rep.global_weighted, weighted);

        if (pt.region == Region::CapPlus || pt.region == Region::CapMinus)
            rep.cap_envelope_constant =
                std::max(rep.cap_envelope_constant,
                         err * std::pow(pt.dist, n) / std::pow(gp.eps, n));
        if (pt.region == Region::Neck)
            rep.neck_envelope_constant =
                std::max(rep.neck_envelope_constant, err * std::pow(std::cosh(pt.s), n));

        if (opt.keep_rows)
            rep.rows.push_back({static_cast<int>(pt.region), pt.weight, H, rep.h_target,
                                weighted, pt.dist, pt.s});
    }
    return rep;
}

double product_harmonic(ModeIndex mode, const ProductPoint& z) {
    const auto factor = [](int deg, const Eigen::VectorXd& v) {
        switch (deg) {
        case 0: return 1.0;
        case 1: return v(0);
        case 2: return v(0) * v(0) - v(1) * v(1);
        default: throw std::domain_error("product_harmonic: degree must be <= 2");
        }
    };
    return factor(mode.i, z.xi) * factor(mode.j, z.zeta);
}

double linearization_check(int p, int q, double t, ModeIndex mode, double eps_fd,
                           double fd_step) {
    const CliffordSlice slice(p, q, t);
    const double lam = jacobi_eigenvalue(slice, mode);
    const double scale = std::max(1.0, std::abs(lam));

    // deterministic sample points
    std::vector<ProductPoint> samples;
    const auto xs = sphere_grid(p, 2);
    const auto ys = sphere_grid(q, 2);
    for (size_t k = 0; k < 5; ++k)
        samples.push_back({xs[(3 * k + 1) % xs.size()], ys[(5 * k + 2) % ys.size()]});

    double worst = 0.0;
    for (const auto& z : samples) {
        const ProductChart chart = ProductChart::centered(z, p, q);
        const auto height = [&](double sign) {
            // deformation f = eps_fd * e along N_t = sin t P_x - cos t P_y,
            // i.e. v-height t - sign * eps_fd * e
            return [&chart, t, sign, eps_fd, mode](const Eigen::VectorXd& zbar) {
                return t - sign * eps_fd * product_harmonic(mode, chart.point(zbar));
            };
        };
        const Eigen::VectorXd origin = Eigen::VectorXd::Zero(p + q);
        const double Hp = graph_mean_curvature(
            p, q, jet_from_function(chart, origin, height(+1.0), fd_step));
        const double Hm = graph_mean_curvature(
            p, q, jet_from_function(chart, origin, height(-1.0), fd_step));
        const double deriv = (Hp - Hm) / (2 * eps_fd);
        worst = std::max(worst, std::abs(deriv - lam * product_harmonic(mode, z)) / scale);
    }
    return worst;
}

nlohmann::json CurvatureReport::to_json() const {
    nlohmann::json j;
    j["gamma"] = gamma;
    j["t"] = t;
    j["eps"] = eps;
    j["h_target"] = h_target;
    j["global_weighted"] = global_weighted;
    j["cap_envelope_constant"] = cap_envelope_constant;
    j["neck_envelope_constant"] = neck_envelope_constant;
    nlohmann::json regs = nlohmann::json::object();
    for (size_t k = 0; k < regions.size(); ++k) {
        nlohmann::json r;
        r["weighted_max"] = regions[k].weighted_max;
        r["raw_max"] = regions[k].raw_max;
        r["count"] = regions[k].count;
        regs[region_name(static_cast<Region>(k))] = r;
    }
    j["regions"] = regs;
    return j;
}

} // namespace cmcglue
