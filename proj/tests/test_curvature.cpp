#include <doctest.h>
#include "cmcglue/curvature.hpp"
#include "cmcglue/experiment.hpp"
#include "cmcglue/error.hpp"
#include <cmath>
#include <stdexcept>
using namespace cmcglue;

namespace {

SymmetryGroup fixture_group() {
    return close_group(1, 2,
                       {rotation_pair(1, 2, "x", 1, 2, 1, 1), rho_pair(1, 2),
                        signs_pair(1, 2, {1, 1}, {1, 1, -1})},
                       100);
}

const GreensField& fixture_field() {
    static GreensField f =
        solve_greens(1, 2, orbit(fixture_group(), base_point(1, 2)), 240, 240);
    return f;
}

ProductPoint sample_point() {
    Eigen::VectorXd xi(2), zeta(3);
    xi << std::cos(0.4), std::sin(0.4);
    zeta << std::cos(0.7), std::sin(0.7) * 0.6, std::sin(0.7) * 0.8;
    return {xi, zeta};
}

} // namespace

TEST_CASE("ambient metric blocks") {
    const auto at_star = ambient_metric(1, 2, minimal_angle(1, 2));
    CHECK(at_star.dv2 == 1.0);
    CHECK(at_star.cos2 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(at_star.sin2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    const auto mid = ambient_metric(1, 1, M_PI / 4);
    CHECK(mid.cos2 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(mid.sin2 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(ambient_metric(1, 2, 0.0), std::domain_error);

    // finite-difference pullback of the toroidal embedding matches the blocks
    const ProductChart chart = ProductChart::canonical(1, 2);
    Eigen::VectorXd zbar(3);
    zbar << 0.21, -0.13, 0.17;
    const double v0 = 0.8, h = 1e-5;
    const auto emb = [&](const Eigen::VectorXd& zb, double v) {
        return toroidal_embed(chart.point(zb), v);
    };
    const Eigen::MatrixXd G = ambient_metric_matrix(chart, (Eigen::VectorXd(4) << zbar, v0).finished());
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l <= k; ++l) {
            Eigen::VectorXd zp = zbar, zm = zbar, zq = zbar, zr = zbar;
            double vp = v0, vm = v0, vq = v0, vr = v0;
            if (k < 3) { zp(k) += h; zm(k) -= h; } else { vp += h; vm -= h; }
            if (l < 3) { zq(l) += h; zr(l) -= h; } else { vq += h; vr -= h; }
            const Eigen::VectorXd dk = (emb(zp, vp) - emb(zm, vm)) / (2 * h);
            const Eigen::VectorXd dl = (emb(zq, vq) - emb(zr, vr)) / (2 * h);
            CHECK(dk.dot(dl) == doctest::Approx(G(k, l)).epsilon(1e-6));
        }
}

TEST_CASE("graph mean curvature: constant heights are slices") {
    // exact reduction at arbitrary chart points, not just the center
    for (auto [p, q] : {std::pair{1, 2}, std::pair{2, 2}}) {
        const ProductChart chart = ProductChart::canonical(p, q);
        for (double u0 : {0.5, minimal_angle(p, q), 1.1}) {
            Eigen::VectorXd zbar = Eigen::VectorXd::Zero(p + q);
            zbar(0) = 0.31;
            zbar(p) = -0.22;
            GraphJet jet;
            jet.chart = &chart;
            jet.zbar = zbar;
            jet.u = u0;
            jet.du = Eigen::VectorXd::Zero(p + q);
            jet.d2u = Eigen::MatrixXd::Zero(p + q, p + q);
            CHECK(graph_mean_curvature(p, q, jet)
                  == doctest::Approx(slice_mean_curvature({p, q, u0})).epsilon(1e-12));
        }
    }
}

TEST_CASE("linearization check: FD deformation derivative matches the spectrum") {
    // kernel mode stays flat, constant mode gives 2n, higher modes match
    CHECK(linearization_check(1, 2, minimal_angle(1, 2), {1, 1}, 1e-5, 1e-4) <= 0.01);
    CHECK(linearization_check(1, 2, minimal_angle(1, 2), {0, 0}, 1e-5, 1e-4) <= 0.01);
    CHECK(linearization_check(1, 1, M_PI / 4, {2, 0}, 1e-5, 1e-4) <= 0.01);
    CHECK(linearization_check(1, 2, minimal_angle(1, 2) + 0.03, {2, 0}, 1e-5, 1e-4) <= 0.01);
    CHECK(linearization_check(2, 2, minimal_angle(2, 2), {0, 2}, 1e-5, 1e-4) <= 0.01);
}

TEST_CASE("parametric curvature: slices, order, sign") {
    const ProductChart chart = ProductChart::canonical(1, 2);
    Eigen::VectorXd hint = Eigen::VectorXd::Zero(4);
    hint(3) = 1.0;
    const auto slice_map = [&](double t) {
        return [t](const Eigen::VectorXd& u) {
            Eigen::VectorXd w(4);
            w.head(3) = u;
            w(3) = t;
            return w;
        };
    };
    Eigen::VectorXd u0(3);
    u0 << 0.15, -0.1, 0.2;
    for (double t : {0.6, minimal_angle(1, 2), 1.0}) {
        const double Ht = slice_mean_curvature({1, 2, t});
        const double H1 = parametric_mean_curvature(slice_map(t), u0, chart, hint, 1e-3);
        CHECK(H1 == doctest::Approx(Ht).epsilon(1e-5));
        // halving the step drops the error ~4x
        const double e1 = std::abs(parametric_mean_curvature(slice_map(t), u0, chart, hint, 4e-3) - Ht);
        const double e2 = std::abs(parametric_mean_curvature(slice_map(t), u0, chart, hint, 2e-3) - Ht);
        if (e1 > 1e-11) CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.5));
    }
    // flipping the orientation hint flips the sign
    const double Hup = parametric_mean_curvature(slice_map(0.8), u0, chart, hint, 1e-3);
    const double Hdn = parametric_mean_curvature(slice_map(0.8), u0, chart, -hint, 1e-3);
    CHECK(Hup == doctest::Approx(-Hdn).epsilon(1e-10));
    CHECK_THROWS_AS(parametric_mean_curvature(slice_map(0.8), u0, chart, hint, -1.0),
                    std::domain_error);

    // degenerate map rejected
    const auto collapsed = [](const Eigen::VectorXd& u) {
        Eigen::VectorXd w(4);
        w.setZero();
        w(0) = u(0);
        w(3) = 0.9;
        return w;
    };
    CHECK_THROWS_AS(parametric_mean_curvature(collapsed, u0, chart, hint, 1e-3), geometry_error);
}

TEST_CASE("chart consistency: graph and parametric agree on random graphs") {
    const int p = 1, q = 2;
    const double t = minimal_angle(p, q);
    Eigen::VectorXd hint = Eigen::VectorXd::Zero(4);
    hint(3) = 1.0;
    unsigned state = 12345;
    const auto rnd = [&]() {
        state = state * 1664525u + 1013904223u;
        return (state >> 8) * (1.0 / (1 << 24)) - 0.5;
    };
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd xi(2), zeta(3);
        const double a1 = rnd() * 3.0, a2 = rnd() * 3.0, a3 = rnd() * 2.0;
        xi << std::cos(a1), std::sin(a1);
        zeta << std::cos(a2), std::sin(a2) * std::cos(a3), std::sin(a2) * std::sin(a3);
        const ProductChart chart = ProductChart::centered({xi, zeta}, p, q);
        const double c1 = 0.04 * rnd(), c2 = 0.05 * rnd();
        const auto height = [&](const Eigen::VectorXd& zb) {
            const ProductPoint z = chart.point(zb);
            return t + c1 * product_harmonic({1, 1}, z) + c2 * product_harmonic({2, 0}, z);
        };
        const Eigen::VectorXd origin = Eigen::VectorXd::Zero(3);
        const auto map = [&](const Eigen::VectorXd& u) {
            Eigen::VectorXd w(4);
            w.head(3) = u;
            w(3) = height(u);
            return w;
        };
        // both paths are O(h^2)-accurate; their gap obeys a fixed h^2 bound
        const double h = 1e-4;
        const double Hg = graph_mean_curvature(p, q, jet_from_function(chart, origin, height, h));
        const double Hp = parametric_mean_curvature(map, origin, chart, hint, h);
        CHECK(std::abs(Hg - Hp) <= 2e4 * h * h);
    }
}

TEST_CASE("curvature is invariant under the group") {
    const SymmetryGroup G = fixture_group();
    const GreensField& field = fixture_field();
    const double t = minimal_angle(1, 2) + 0.02;
    const GluingParameters gp = solve_neck_scale(1, 2, t, -0.075);
    const double epsn1 = gp.eps * gp.eps;
    const ProductPoint z = sample_point();
    const auto H_at = [&](const ProductPoint& pt) {
        const ProductChart chart = ProductChart::centered(pt, 1, 2);
        double dist = 1e9;
        for (int m = 0; m < field.gluing.m(); ++m)
            dist = std::min(dist, product_distance(field.gluing.factor(m), pt, field.a(), field.b()));
        const auto gj = field.chart_jet(chart, Eigen::VectorXd::Zero(3), field.jet_sigma(dist));
        GraphJet jet;
        jet.chart = &chart;
        jet.zbar = Eigen::VectorXd::Zero(3);
        jet.u = gp.t_plus - epsn1 * gj.value;
        jet.du = -epsn1 * gj.grad;
        jet.d2u = -epsn1 * gj.hess;
        return graph_mean_curvature(1, 2, jet);
    };
    const double H0 = H_at(z);
    for (const auto& g : G.elements) {
        const ProductPoint gz{g.sigma_p * z.xi, g.sigma_q * z.zeta};
        CHECK(H_at(gz) == doctest::Approx(H0).epsilon(1e-9));
    }
}

TEST_CASE("neck region: bounded curvature error and flat-model minimality") {
    const GreensField& field = fixture_field();
    const double ts = minimal_angle(1, 2);
    const GluingParameters gp = solve_neck_scale(1, 2, ts + 0.04, -0.075);
    const double Ht = slice_mean_curvature({1, 2, gp.t_plus});
    const ProductChart chart = ProductChart::centered(field.gluing.factor(0), 1, 2);
    Eigen::VectorXd theta(3);
    theta << 0.0, 0.6, 0.8;

    for (double s : {0.0, 0.5 * gp.s_max, -0.8 * gp.s_max}) {
        const auto map = neck_chart_map(gp, s, theta);
        const auto hint = neck_orientation_hint(gp, s, theta);
        const double H =
            parametric_mean_curvature(map, Eigen::VectorXd::Zero(3), chart, hint, 1e-3);
        // individual principal curvatures are O(1/eps); the trace cancellation
        // leaves an O(cosh^-n s)-envelope error
        CHECK(std::abs(H - Ht) < 1.0);
        CHECK(std::abs(H - Ht) * std::pow(std::cosh(s), 3) < 4.0);

        // with the flat ambient model the rescaled catenoid is exactly minimal
        const double Hflat =
            parametric_mean_curvature(map, Eigen::VectorXd::Zero(3), chart, hint, 5e-4, true);
        CHECK(std::abs(Hflat) <= 1e-6 + 100.0 * 5e-4 * 5e-4 / gp.eps);
        const double Hflat2 =
            parametric_mean_curvature(map, Eigen::VectorXd::Zero(3), chart, hint, 2.5e-4, true);
        CHECK(std::abs(Hflat2) <= 1e-6 + std::abs(Hflat));
    }
}

TEST_CASE("neck induced metric expands as eps^2 phi^2 (ds^2 + spherical)") {
    const GreensField& field = fixture_field();
    const double ts = minimal_angle(1, 2);
    const CatenoidProfile prof(3);
    double fitted_prev = -1.0;
    for (double dt : {0.04, 0.02}) {
        const GluingParameters gp = solve_neck_scale(1, 2, ts + dt, -0.075);
        const ProductChart chart = ProductChart::centered(field.gluing.factor(0), 1, 2);
        Eigen::VectorXd theta(3);
        theta << 0.0, 0.6, 0.8;
        double fitted = 0.0;
        for (double s : {0.0, 0.6 * gp.s_max, 0.95 * gp.s_max, -0.7 * gp.s_max}) {
            const auto map = neck_chart_map(gp, s, theta);
            const double h = 1e-5;
            Eigen::MatrixXd gbar(3, 3);
            std::vector<Eigen::VectorXd> T(3);
            const Eigen::VectorXd w0 = map(Eigen::VectorXd::Zero(3));
            const Eigen::MatrixXd G = ambient_metric_matrix(chart, w0);
            for (int k = 0; k < 3; ++k) {
                Eigen::VectorXd up = Eigen::VectorXd::Zero(3), um = Eigen::VectorXd::Zero(3);
                up(k) += h;
                um(k) -= h;
                T[k] = (map(up) - map(um)) / (2 * h);
            }
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) gbar(k, l) = T[k].dot(G * T[l]);
            const double lead = gp.eps * gp.eps * prof.phi(s) * prof.phi(s);
            const Eigen::MatrixXd dev = gbar - lead * Eigen::MatrixXd::Identity(3, 3);
            const double env = std::pow(gp.eps, 3) * std::pow(std::cosh(s), 2)
                             + std::pow(gp.eps, 4) * std::pow(std::cosh(s), 4);
            fitted = std::max(fitted, dev.cwiseAbs().maxCoeff() / env);
        }
        CHECK(fitted < 10.0);
        if (fitted_prev > 0) CHECK(fitted / fitted_prev < 3.0);
        fitted_prev = fitted;
    }
}

TEST_CASE("verify_cmc_error: report structure on a coarse atlas") {
    const SymmetryGroup G = fixture_group();
    const GreensField& field = fixture_field();
    AtlasResolution res;
    res.cap_density = 4;
    res.ring_radii = 3;
    res.ring_dir_density = 2;
    res.neck_s_samples = 9;
    res.neck_dir_density = 2;
    res.trans_radii = 3;
    res.trans_dir_density = 2;
    const SurfaceAtlas atlas = build_atlas(1, 2, minimal_angle(1, 2) + 0.03, G, field, res);
    const CurvatureReport rep = verify_cmc_error(atlas, field, -0.5);
    CHECK(rep.global_weighted > 0);
    CHECK(std::isfinite(rep.global_weighted));
    for (const auto& rs : rep.regions) {
        CHECK(rs.count > 0);
        CHECK(rs.weighted_max <= rep.global_weighted + 1e-15);
    }
    CHECK(rep.rows.size() == atlas.points.size());
    CHECK(rep.cap_envelope_constant > 0);
    CHECK(rep.neck_envelope_constant > 0);
    CHECK_THROWS_AS(verify_cmc_error(atlas, field, 0.5), std::domain_error);
    CHECK_THROWS_AS(verify_cmc_error(atlas, field, -1.5), std::domain_error);

    // orbit dedupe is an exact optimization: H values agree with a direct pass
    VerifyOptions direct;
    direct.dedupe_orbits = false;
    direct.keep_rows = true;
    const CurvatureReport rep2 = verify_cmc_error(atlas, field, -0.5, direct);
    CHECK(rep2.global_weighted == doctest::Approx(rep.global_weighted).epsilon(1e-9));
}

TEST_CASE("product harmonics") {
    const ProductPoint z = sample_point();
    CHECK(product_harmonic({0, 0}, z) == 1.0);
    CHECK(product_harmonic({1, 0}, z) == doctest::Approx(z.xi(0)));
    CHECK(product_harmonic({2, 1}, z)
          == doctest::Approx((z.xi(0) * z.xi(0) - z.xi(1) * z.xi(1)) * z.zeta(0)));
    CHECK_THROWS_AS(product_harmonic({3, 0}, z), std::domain_error);
}

TEST_CASE("transition jet matches finite differences of the transition height") {
    const GreensField& field = fixture_field();
    const double ts = minimal_angle(1, 2);
    const GluingParameters gp = solve_neck_scale(1, 2, ts + 0.04, -0.075);
    const ProductChart chart = ProductChart::centered(field.gluing.factor(0), 1, 2);
    Eigen::VectorXd dir(3);
    dir << 0.48, 0.6, 0.64;
    for (double rho : {0.6 * gp.r, 1.0 * gp.r, 1.7 * gp.r})
        for (bool upper : {true, false}) {
            const Eigen::VectorXd zbar = rho * dir;
            const GraphJet aj = transition_jet(gp, field, chart, zbar, upper);
            // FD reference built from the same mollified height function
            const auto height = [&](const Eigen::VectorXd& zb) {
                const double r2 = zb.norm();
                const double eta = cutoff_eta(r2 / gp.r);
                double graph = 0.0;
                if (eta > 0.0) {
                    const double G =
                        field.evaluate_filtered(chart.point(zb), field.jet_sigma(zbar.norm()));
                    graph = upper ? gp.t_plus - gp.eps * gp.eps * G
                                  : gp.t_minus + gp.eps * gp.eps * G;
                }
                double neck = 0.0;
                if (eta < 1.0) {
                    const CatenoidProfile prof(3);
                    neck = gp.mid() + gp.eps * prof.psi(neck_s_from_radius(gp, r2, upper));
                }
                return eta * graph + (1.0 - eta) * neck;
            };
            const double h = 1e-6 * std::max(1.0, rho / 1e-3);
            const GraphJet fj = jet_from_function(chart, zbar, height, h);
            CHECK(aj.u == doctest::Approx(fj.u).epsilon(1e-10));
            for (int k = 0; k < 3; ++k)
                CHECK(aj.du(k) == doctest::Approx(fj.du(k)).epsilon(1e-4));
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    CHECK(std::abs(aj.d2u(k, l) - fj.d2u(k, l))
                          <= 1e-3 * (1.0 + std::abs(aj.d2u(k, l))));
        }
}
