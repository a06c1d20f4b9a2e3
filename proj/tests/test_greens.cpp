#include <doctest.h>
#include "cmcglue/greens.hpp"
#include "cmcglue/clifford.hpp"
#include "cmcglue/error.hpp"
#include "cmcglue/experiment.hpp"
#include <nlohmann/json.hpp>
#include <cmath>
#include <stdexcept>
using namespace cmcglue;

namespace {

SymmetryGroup example2_group() {
    return close_group(1, 2,
                       {rotation_pair(1, 2, "x", 1, 2, 1, 1), rho_pair(1, 2),
                        signs_pair(1, 2, {1, 1}, {1, 1, -1})},
                       100);
}

GluingSet solvable_orbit() { return orbit(example2_group(), base_point(1, 2)); }

} // namespace

TEST_CASE("sphere volume") {
    CHECK(sphere_volume(1) == doctest::Approx(2 * M_PI).epsilon(1e-14));
    CHECK(sphere_volume(2) == doctest::Approx(4 * M_PI).epsilon(1e-14));
    CHECK(sphere_volume(3) == doctest::Approx(2 * M_PI * M_PI).epsilon(1e-14));
    CHECK_THROWS_AS(sphere_volume(0), std::domain_error);
}

TEST_CASE("harmonic counts and zonal polynomials") {
    CHECK(harmonic_count(1, 0) == 1);
    CHECK(harmonic_count(1, 5) == 2);
    CHECK(harmonic_count(2, 4) == 9);      // 2k+1
    CHECK(harmonic_count(3, 3) == 16);     // (k+1)^2

    // d = 1 reduces to Chebyshev, d = 2 to Legendre
    const double x = 0.37;
    const auto t1 = zonal_eval(1, 6, x);
    CHECK(t1.P[3] == doctest::Approx(std::cos(3 * std::acos(x))).epsilon(1e-12));
    const auto t2 = zonal_eval(2, 6, x);
    CHECK(t2.P[2] == doctest::Approx(0.5 * (3 * x * x - 1)).epsilon(1e-12));
    CHECK(t2.P[3] == doctest::Approx(0.5 * (5 * x * x * x - 3 * x)).epsilon(1e-12));
    // P(1) = 1 normalization for all d
    for (int d : {1, 2, 3, 4}) {
        const auto t = zonal_eval(d, 10, 1.0);
        for (int k = 0; k <= 10; ++k) CHECK(t.P[k] == doctest::Approx(1.0).epsilon(1e-12));
    }
    // derivative tables vs finite differences
    const double h = 1e-6;
    for (int d : {1, 2, 3}) {
        const auto tp = zonal_eval(d, 8, x + h);
        const auto tm = zonal_eval(d, 8, x - h);
        const auto t0 = zonal_eval(d, 8, x);
        for (int k = 0; k <= 8; ++k) {
            CHECK(t0.dP[k] == doctest::Approx((tp.P[k] - tm.P[k]) / (2 * h)).epsilon(1e-5));
            CHECK(t0.ddP[k]
                  == doctest::Approx((tp.P[k] - 2 * t0.P[k] + tm.P[k]) / (h * h)).epsilon(1e-3));
        }
    }
}

TEST_CASE("constant mode pairs to the total volume") {
    // the measure normalization: integral of 1 over (C_{t*}, g_{t*}) equals
    // cos^p sin^q t* times the product of unit sphere volumes
    const double ts = minimal_angle(1, 2);
    const SphereQuadrature qx = sphere_quadrature(1, 24);
    const SphereQuadrature qy = sphere_quadrature(2, 24);
    double vol = 0.0;
    for (double wx : qx.weights)
        for (double wy : qy.weights) vol += wx * wy;
    vol *= std::pow(std::cos(ts), 1) * std::pow(std::sin(ts), 2);
    CHECK(vol == doctest::Approx(std::cos(ts) * std::sin(ts) * std::sin(ts) * sphere_volume(1)
                                 * sphere_volume(2)).epsilon(1e-12));
}

TEST_CASE("solve rejects non-orthogonal gluing sets") {
    // the antipodal pair is NOT kernel-orthogonal (x_k y_l is even under the
    // ambient antipodal map), so the solve must refuse it
    const auto anti = close_group(
        1, 2, {OrthogonalPair{-Eigen::MatrixXd::Identity(2, 2), -Eigen::MatrixXd::Identity(3, 3)}},
        10);
    const GluingSet gl = orbit(anti, base_point(1, 2));
    CHECK_THROWS_AS(solve_greens(1, 2, gl, 20, 20), solvability_error);

    const auto trivial = close_group(1, 2, {identity_pair(1, 2)}, 10);
    CHECK_THROWS_AS(solve_greens(1, 2, orbit(trivial, base_point(1, 2)), 20, 20),
                    solvability_error);
    CHECK_THROWS_AS(solve_greens(1, 2, solvable_orbit(), 4, 4), std::domain_error);
}

TEST_CASE("solved field structure") {
    const GreensField f = solve_greens(1, 2, solvable_orbit(), 20, 20);
    CHECK(f.mode_weights(1, 1) == 0.0); // kernel block excluded
    CHECK(f.c_n == doctest::Approx(4 * M_PI).epsilon(1e-14));
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) CHECK(std::isfinite(f.mode_weights(i, j)));
    // constant mode weight: -c_n N/(w1 w2 meas lambda_00), lambda_00 = 2n = 6
    const double ts = minimal_angle(1, 2);
    const double meas = std::cos(ts) * std::sin(ts) * std::sin(ts);
    CHECK(f.mode_weights(0, 0)
          == doctest::Approx(-4 * M_PI / (2 * M_PI * 4 * M_PI * meas * 6.0)).epsilon(1e-12));
}

TEST_CASE("partial sums are Cauchy away from the sources") {
    const GluingSet gl = solvable_orbit();
    const ProductChart chart = ProductChart::canonical(1, 2);
    Eigen::VectorXd zbar(3);
    zbar << 0.45, 0.52, 0.38; // far from both gluing points
    const ProductPoint z = chart.point(zbar);
    const GreensField g20 = solve_greens(1, 2, gl, 20, 20);
    const GreensField g30 = solve_greens(1, 2, gl, 30, 30);
    const GreensField g40 = solve_greens(1, 2, gl, 40, 40);
    double d32 = 0.0, d43 = 0.0;
    for (int k = 0; k < 10; ++k) {
        Eigen::VectorXd off(3);
        off << 0.45 + 0.03 * k, 0.52 - 0.02 * k, 0.38;
        const ProductPoint zk = chart.point(off);
        d32 = std::max(d32, std::abs(g30.evaluate(zk).value - g20.evaluate(zk).value));
        d43 = std::max(d43, std::abs(g40.evaluate(zk).value - g30.evaluate(zk).value));
    }
    CHECK(d43 < d32);
    (void)z;
}

TEST_CASE("truncation convergence on a far-field sample") {
    const GluingSet gl = solvable_orbit();
    const GreensField f1 = solve_greens(1, 2, gl, 20, 20);
    const GreensField f2 = solve_greens(1, 2, gl, 40, 40);
    const GreensField f4 = solve_greens(1, 2, gl, 80, 80);
    const ProductChart chart = ProductChart::canonical(1, 2);
    double d21 = 0.0, d42 = 0.0;
    for (int k = 0; k < 12; ++k) {
        Eigen::VectorXd zbar(3);
        zbar << 0.3 + 0.02 * k, 0.4 - 0.01 * k, 0.35;
        const ProductPoint z = chart.point(zbar);
        d21 = std::max(d21, std::abs(f2.evaluate(z).value - f1.evaluate(z).value));
        d42 = std::max(d42, std::abs(f4.evaluate(z).value - f2.evaluate(z).value));
    }
    CHECK(d42 < d21);
}

TEST_CASE("near-source warning") {
    const GreensField f = solve_greens(1, 2, solvable_orbit(), 20, 20);
    const ProductChart chart = ProductChart::centered(f.gluing.factor(0), 1, 2);
    Eigen::VectorXd close(3), far(3);
    close << 0.1, 0.05, 0.05; // |zbar| < c_eval/20 = 0.3
    far << 0.9, 0.8, 0.7;
    CHECK(f.evaluate(chart.point(close)).near_source_warning);
    CHECK_FALSE(f.evaluate(chart.point(far)).near_source_warning);
}

TEST_CASE("G-invariance of the field") {
    const SymmetryGroup G = example2_group();
    const GreensField f = solve_greens(1, 2, orbit(G, base_point(1, 2)), 40, 40);
    CHECK(greens_invariance_error(f, G, 100, 777) <= 1e-8);
}

TEST_CASE("local expansion: n = 3 singularity and gamma") {
    const GreensField f = solve_greens(1, 2, solvable_orbit(), 480, 480);
    const double ex = f.exclusion_radius();
    const LocalExpansion le = local_expansion(f, 0, f.default_fit_radii());
    CHECK(std::abs(le.fitted_exponent - (-1.0)) <= 0.15);
    CHECK(std::abs(le.fitted_coefficient - 1.0) <= 0.15);
    // gamma_Lambda: stable under refining the truncation
    const GreensField f2 = solve_greens(1, 2, solvable_orbit(), 640, 640);
    const LocalExpansion le2 = local_expansion(f2, 0, f2.default_fit_radii());
    CHECK(std::abs(le.gamma_lambda - le2.gamma_lambda) < 0.1);
    // both sources see the same expansion by symmetry
    const LocalExpansion le_b = local_expansion(f, 1, f.default_fit_radii());
    CHECK(le_b.gamma_lambda == doctest::Approx(le.gamma_lambda).epsilon(1e-6));

    CHECK_THROWS_AS(local_expansion(f, 0, {1.3 * ex, 1.8 * ex, 2.5 * ex}), std::domain_error);
    CHECK_THROWS_AS(local_expansion(f, 0, {0.5 * ex, 1.3 * ex, 1.8 * ex, 2.5 * ex}),
                    std::domain_error);
}

TEST_CASE("local expansion: n = 4 exponent and zero gamma") {
    // (p,q) = (2,2): orbit of the x-plane pi rotation is kernel-orthogonal
    const auto rot = close_group(2, 2, {rotation_pair(2, 2, "x", 1, 2, 1, 1)}, 10);
    const GluingSet gl = orbit(rot, base_point(2, 2));
    REQUIRE(kernel_orthogonality_matrix(gl).cwiseAbs().maxCoeff() < gl.m() * 1e-8);
    const GreensField f = solve_greens(2, 2, gl, 320, 320);
    const LocalExpansion le = local_expansion(f, 0, f.default_fit_radii());
    CHECK(std::abs(le.fitted_exponent - (-2.0)) <= 0.3);
    // the log-log intercept sits at r = 1, so the slope deficit from the n = 4
    // logarithmic correction inflates it; bracket it and pin the constant by
    // the direct ratio at the smallest resolvable radius instead
    CHECK(le.fitted_coefficient > 0.3);
    CHECK(le.fitted_coefficient < 0.9);
    const double r0 = f.default_fit_radii().front();
    const ProductChart chart = ProductChart::centered(f.gluing.factor(0), 2, 2);
    Eigen::VectorXd dir(4);
    dir << 0.6, 0.4, 0.5, 0.3;
    dir.normalize();
    const double ratio =
        f.evaluate_filtered(chart.point(r0 * dir), f.jet_sigma(r0)) * r0 * r0;
    CHECK(ratio == doctest::Approx(0.5).epsilon(0.05));
    CHECK(le.gamma_lambda == 0.0); // by definition for n >= 4
}

TEST_CASE("distributional identity at caps 40") {
    const GreensField f = solve_greens(1, 2, solvable_orbit(), 40, 40);
    CHECK(distributional_identity_error(f) <= 0.02);
}

TEST_CASE("serialization round trip") {
    const GreensField f = solve_greens(1, 2, solvable_orbit(), 24, 24);
    const GreensField g = GreensField::from_json(f.to_json());
    CHECK(g.p == f.p);
    CHECK(g.I_max == f.I_max);
    CHECK(g.gluing.m() == f.gluing.m());
    const ProductChart chart = ProductChart::canonical(1, 2);
    Eigen::VectorXd zbar(3);
    zbar << 0.4, 0.3, 0.2;
    const ProductPoint z = chart.point(zbar);
    CHECK(g.evaluate(z).value == doctest::Approx(f.evaluate(z).value).epsilon(1e-14));
    nlohmann::json bad = f.to_json();
    bad["version"] = 7;
    CHECK_THROWS_AS(GreensField::from_json(bad), config_error);
}

TEST_CASE("filtered jet matches the raw series away from sources") {
    const GreensField f = solve_greens(1, 2, solvable_orbit(), 160, 160);
    const ProductChart chart = ProductChart::canonical(1, 2);
    Eigen::VectorXd zbar(3);
    zbar << 0.2, 0.15, 0.1;
    const auto jet = f.chart_jet(chart, zbar, f.jet_sigma(zbar.norm()));
    CHECK(jet.value == doctest::Approx(f.evaluate(chart.point(zbar)).value).epsilon(2e-3));
    // jet gradient against finite differences of the filtered value
    const double h = 1e-5;
    const double sig = f.jet_sigma(zbar.norm());
    for (int k = 0; k < 3; ++k) {
        Eigen::VectorXd zp = zbar, zm = zbar;
        zp(k) += h;
        zm(k) -= h;
        const double fd =
            (f.chart_jet(chart, zp, sig).value - f.chart_jet(chart, zm, sig).value) / (2 * h);
        CHECK(jet.grad(k) == doctest::Approx(fd).epsilon(1e-6));
    }
    // Hessian diagonal vs second differences
    for (int k = 0; k < 3; ++k) {
        Eigen::VectorXd zp = zbar, zm = zbar;
        zp(k) += h;
        zm(k) -= h;
        const double fd = (f.chart_jet(chart, zp, sig).value - 2 * jet.value
                           + f.chart_jet(chart, zm, sig).value) / (h * h);
        CHECK(jet.hess(k, k) == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("antipodally symmetric orbit: values agree at antipodes") {
    // x-flip and y-flip generate a 4-point kernel-orthogonal orbit whose set
    // is invariant under the full ambient antipodal map
    Eigen::MatrixXd xflip = -Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd yflip = -Eigen::MatrixXd::Identity(3, 3);
    const auto G = close_group(1, 2,
                               {OrthogonalPair{xflip, Eigen::MatrixXd::Identity(3, 3)},
                                OrthogonalPair{Eigen::MatrixXd::Identity(2, 2), yflip}},
                               10);
    const GluingSet gl = orbit(G, base_point(1, 2));
    REQUIRE(gl.m() == 4);
    const GreensField f = solve_greens(1, 2, gl, 24, 24);
    const ProductChart chart = ProductChart::canonical(1, 2);
    for (int k = 0; k < 5; ++k) {
        Eigen::VectorXd zbar(3);
        zbar << 0.5 + 0.05 * k, 0.4 - 0.03 * k, 0.45;
        const ProductPoint z = chart.point(zbar);
        const ProductPoint anti{-z.xi, -z.zeta};
        CHECK(f.evaluate(anti).value == doctest::Approx(f.evaluate(z).value).epsilon(1e-12));
    }
}
