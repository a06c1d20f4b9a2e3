// Acceptance suite: runs every verification criterion of the construction at
// its pinned tolerance and prints one pass/fail line per criterion.
// Exit code 0 iff all criteria pass.

#include <cmath>
#include <cstdio>
#include <vector>

#include "cmcglue/assembler.hpp"
#include "cmcglue/catenoid.hpp"
#include "cmcglue/clifford.hpp"
#include "cmcglue/curvature.hpp"
#include "cmcglue/experiment.hpp"
#include "cmcglue/greens.hpp"
#include "cmcglue/symmetry.hpp"

using namespace cmcglue;

namespace {

int failures = 0;

void report(int idx, bool pass, const char* what, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", idx, what,
                detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a, b, c, d);
    return buf;
}

SymmetryGroup admissible_group() {
    return close_group(1, 2,
                       {rotation_pair(1, 2, "x", 1, 2, 1, 1), rho_pair(1, 2),
                        signs_pair(1, 2, {1, 1}, {1, 1, -1})},
                       100);
}

// 1. Spectral kernel structure of the minimal slices for (p,q) in {(1,2),(2,2),(1,3)}
void criterion1() {
    double worst11 = 0.0;
    bool neg_ok = true, nonzero_ok = true;
    for (auto [p, q] : {std::pair{1, 2}, std::pair{2, 2}, std::pair{1, 3}}) {
        const CliffordSlice s(p, q, minimal_angle(p, q));
        worst11 = std::max(worst11, std::abs(jacobi_eigenvalue(s, {1, 1})));
        for (int i = 1; i <= 10; ++i)
            for (int j = 1; j <= 10; ++j)
                if (!(i == 1 && j == 1) && !(jacobi_eigenvalue(s, {i, j}) < 0)) neg_ok = false;
        for (int k = 0; k <= 10; ++k) {
            if (k != 1 && std::abs(jacobi_eigenvalue(s, {k, 0})) <= 1e-9) nonzero_ok = false;
            if (k != 1 && std::abs(jacobi_eigenvalue(s, {0, k})) <= 1e-9) nonzero_ok = false;
        }
        if (std::abs(jacobi_eigenvalue(s, {1, 0})) <= 1e-9) nonzero_ok = false;
        if (std::abs(jacobi_eigenvalue(s, {0, 1})) <= 1e-9) nonzero_ok = false;
    }
    report(1, worst11 <= 1e-12 && neg_ok && nonzero_ok, "spectral kernel structure",
           fmt("max |lambda_11(t*)| = %.2e, off-kernel signs and nonvanishing hold", worst11));
}

// 2. Linearization consistency: eigenvalue split identity + FD deformation
void criterion2() {
    double worst_split = 0.0;
    for (int k = 0; k <= 8; ++k) {
        const double t = 0.35 + 0.1 * k;
        const CliffordSlice s(1, 2, t);
        const auto d = principal_curvature_data(s);
        const double c2 = std::cos(t) * std::cos(t), s2 = std::sin(t) * std::sin(t);
        for (int i = 0; i <= 8; ++i)
            for (int j = 0; j <= 8; ++j) {
                const double lap = -i * (i + 0.0) / c2 - j * (j + 1.0) / s2;
                const double split = lap + d.b_norm_sq + 3.0;
                worst_split =
                    std::max(worst_split, std::abs(jacobi_eigenvalue(s, {i, j}) - split));
            }
    }
    double worst_fd = 0.0;
    for (double t : {minimal_angle(1, 2), minimal_angle(1, 2) + 0.03})
        for (ModeIndex m : {ModeIndex{1, 1}, ModeIndex{0, 0}, ModeIndex{2, 0}})
            worst_fd = std::max(worst_fd, linearization_check(1, 2, t, m, 1e-5, 1e-4));
    report(2, worst_split <= 1e-10 && worst_fd <= 0.01, "linearization consistency",
           fmt("split identity dev %.2e, FD DPhi dev %.3f%%", worst_split, 100 * worst_fd));
}

// 3. Catenoid suite
void criterion3() {
    double worst_mc = 0.0, worst_jac = 0.0, worst_exp_dev = 0.0;
    bool verdicts = true;
    for (int n : {3, 4, 5}) {
        for (int k = 0; k <= 32; ++k)
            worst_mc = std::max(worst_mc,
                                catenoid_mean_curvature_residual(n, -4.0 + 0.25 * k, 1e-4));
        for (auto f : {JacobiField::translation_vertical, JacobiField::dilation,
                       JacobiField::translation_horizontal})
            worst_jac = std::max(worst_jac, jacobi_residual(n, f, -3.0, 3.0, 5e-4));
        for (int j : {2, 3}) {
            const BoundedModeResult r = bounded_mode_verdict(n, j, -0.5, 8.0);
            if (r.verdict != ModeVerdict::no_bounded_nontrivial) verdicts = false;
            worst_exp_dev = std::max(worst_exp_dev,
                                     std::abs(r.growth_exponent - r.expected_exponent)
                                         / r.expected_exponent);
        }
    }
    report(3, worst_mc <= 1e-5 && worst_jac <= 1e-4 && verdicts && worst_exp_dev <= 0.1,
           "catenoid suite",
           fmt("|H| <= %.2e, Jacobi residual <= %.2e, growth exponent dev %.1f%%", worst_mc,
               worst_jac, 100 * worst_exp_dev));
}

// 4. Admissibility fixtures
void criterion4() {
    const auto ex3 = close_group(1, 2,
                                 {signs_pair(1, 2, {1, -1}, {1, 1, 1}),
                                  signs_pair(1, 2, {1, 1}, {1, -1, 1}),
                                  signs_pair(1, 2, {1, 1}, {1, 1, -1})},
                                 100);
    const FixedBilinear f3 = fixed_bilinear_dimension(ex3);

    const SymmetryGroup ex2 = admissible_group();
    const FixedBilinear f2 = fixed_bilinear_dimension(ex2);

    const auto ex1 = close_group(
        1, 1,
        {compose(rotation_pair(1, 1, "x", 1, 2, 1, 1), rotation_pair(1, 1, "y", 1, 2, 1, 1)),
         rotation_pair(1, 1, "x", 1, 2, 2, 1), rho_pair(1, 1)},
        100);
    const FixedBilinear f1 = fixed_bilinear_dimension(ex1);

    const bool agree = std::abs(f3.trace_formula - f3.dimension) < 1e-9
                    && std::abs(f2.trace_formula - f2.dimension) < 1e-9
                    && std::abs(f1.trace_formula - f1.dimension) < 1e-9;
    report(4, f3.dimension == 1 && f2.dimension == 0 && f1.dimension >= 1 && agree,
           "admissibility fixtures",
           fmt("dims: sign fixture %g, admissible %g, lattice %g (trace formula agrees)",
               f3.dimension, f2.dimension, f1.dimension));
}

// 5. Green's function: near-source fit, pairing identity, kernel orthogonality
void criterion5() {
    const SymmetryGroup G = admissible_group();
    const GluingSet gl = orbit(G, base_point(1, 2));
    const Eigen::MatrixXd M = kernel_orthogonality_matrix(gl);
    const bool ortho = M.cwiseAbs().maxCoeff() < gl.m() * 1e-8;

    const GreensField fine = solve_greens(1, 2, gl, 480, 480);
    const LocalExpansion le = local_expansion(fine, 0, fine.default_fit_radii());
    const bool fit_ok = std::abs(le.fitted_exponent + 1.0) <= 0.15
                     && std::abs(le.fitted_coefficient - 1.0) <= 0.15;

    const GreensField f40 = solve_greens(1, 2, gl, 40, 40);
    const double ident = distributional_identity_error(f40);

    report(5, ortho && fit_ok && ident <= 0.02, "Green's function",
           fmt("exponent %.3f, coefficient %.3f, pairing identity %.2e", le.fitted_exponent,
               le.fitted_coefficient, ident));
}

struct ScheduleData {
    std::vector<GluingParameters> params;
    std::vector<CurvatureReport> reports;
    std::vector<SurfaceAtlas> atlases;
    GreensField field;
    SymmetryGroup group;
};

ScheduleData run_schedule() {
    ScheduleData out{.params = {}, .reports = {}, .atlases = {}, .field = {}, .group = admissible_group()};
    const GluingSet gl = orbit(out.group, base_point(1, 2));
    const double ts = minimal_angle(1, 2);
    const double I3 = neck_height_integral(3);
    const double r_min = std::pow(2.0 * 0.005 / I3, 2.0 / 3.0);
    const int caps = static_cast<int>(std::ceil(52.0 / r_min));
    out.field = solve_greens(1, 2, gl, caps, caps);

    AtlasResolution res;
    res.cap_density = 6;
    res.ring_radii = 5;
    res.ring_dir_density = 3;
    res.neck_s_samples = 21;
    res.neck_dir_density = 3;
    res.trans_radii = 6;
    res.trans_dir_density = 3;

    VerifyOptions vopt;
    vopt.keep_rows = false;
    for (double dt : {0.04, 0.02, 0.01, 0.005}) {
        SurfaceAtlas atlas = build_atlas(1, 2, ts + dt, out.group, out.field, res);
        out.params.push_back(atlas.params);
        out.reports.push_back(verify_cmc_error(atlas, out.field, -0.5, vopt));
        out.atlases.push_back(std::move(atlas));
    }
    return out;
}

// 6. Gluing parameters along the schedule
void criterion6(const ScheduleData& sd) {
    double worst_match = 0.0, worst_eq = 0.0, worst_gap_ratio = 0.0;
    bool halving = true;
    for (size_t k = 0; k < sd.params.size(); ++k) {
        const GluingParameters& gp = sd.params[k];
        worst_match = std::max(worst_match,
                               std::abs(slice_mean_curvature({1, 2, gp.t_minus})
                                        + slice_mean_curvature({1, 2, gp.t_plus})));
        worst_eq = std::max(worst_eq,
                            std::abs(gp.eps * gp.neck_integral
                                     + 2.0 * gp.eps * gp.eps * gp.gamma_lambda
                                     - (gp.t_plus - gp.t_minus)));
        const double gap = neck_boundary_gap(gp, sd.field);
        worst_gap_ratio =
            std::max(worst_gap_ratio, gap / std::pow(gp.eps, 4.0 * 2.0 / 3.0));
        if (k > 0) {
            const double ratio = sd.params[k].eps / sd.params[k - 1].eps;
            if (std::abs(ratio - 0.5) > 0.05) halving = false;
        }
    }
    report(6, worst_match <= 1e-12 && worst_eq <= 1e-12 && worst_gap_ratio <= 10.0 && halving,
           "gluing parameters",
           fmt("H-matching %.1e, eps-equation %.1e, gap/eps^(8/3) = %.2f, eps halves with dt",
               worst_match, worst_eq, worst_gap_ratio));
}

// 7. Weighted mean-curvature error scaling
void criterion7(const ScheduleData& sd) {
    std::vector<double> normalized, Ccap, Cneck;
    for (const auto& rep : sd.reports) {
        normalized.push_back(rep.global_weighted / std::pow(rep.eps, 2.5));
        Ccap.push_back(rep.cap_envelope_constant);
        Cneck.push_back(rep.neck_envelope_constant);
    }
    const auto band = [](const std::vector<double>& v) {
        double lo = v[0], hi = v[0];
        for (double x : v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        return hi / lo;
    };
    const double b_norm = band(normalized), b_cap = band(Ccap), b_neck = band(Cneck);
    report(7, b_norm <= 3.0 && b_cap <= 3.0 && b_neck <= 3.0, "weighted mean-curvature error scaling",
           fmt("weighted-sup band %.2f, cap envelope band %.2f, neck envelope band %.2f",
               b_norm, b_cap, b_neck));
    std::printf("       normalized weighted sup along the schedule:");
    for (double v : normalized) std::printf(" %.3f", v);
    std::printf("\n       cap envelope C:");
    for (double v : Ccap) std::printf(" %.3f", v);
    std::printf("   neck envelope C:");
    for (double v : Cneck) std::printf(" %.3f", v);
    std::printf("\n");
}

// 8. Structural invariants of the atlas
void criterion8(const ScheduleData& sd) {
    double worst_inv = 0.0, band_lo = 1.0, band_hi = 1.0;
    std::vector<double> conv;
    for (size_t k = 0; k < sd.atlases.size(); ++k) {
        worst_inv = std::max(worst_inv, atlas_invariance_error(sd.atlases[k], sd.group, 11));
        const auto wb = weight_continuity_band(sd.params[k], sd.atlases[k].weight_radius);
        band_lo = std::min(band_lo, wb.first);
        band_hi = std::max(band_hi, wb.second);
        conv.push_back(cap_convergence_sup(sd.atlases[k]) / sd.params[k].eps);
    }
    double conv_band = conv[0];
    for (double c : conv) conv_band = std::max(conv_band, c);
    double conv_lo = conv[0];
    for (double c : conv) conv_lo = std::min(conv_lo, c);
    report(8,
           worst_inv <= 1e-6 && band_lo >= 0.25 && band_hi <= 4.0
               && conv_band / conv_lo <= 3.0,
           "structural invariants",
           fmt("G-invariance dev %.1e, weight ratios in [%.2f, %.2f], cap convergence linear",
               worst_inv, band_lo, band_hi));
}

} // namespace

int main() {
    std::printf("acceptance suite: doubled Clifford hypersurfaces via catenoidal gluing\n");
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    const ScheduleData sd = run_schedule();
    criterion6(sd);
    criterion7(sd);
    criterion8(sd);
    if (failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
