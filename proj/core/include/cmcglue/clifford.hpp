#pragma once

#include <utility>
#include <vector>

namespace cmcglue {

/// Generalized Clifford hypersurface C_t = S^p(cos t) x S^q(sin t) in S^{n+1}, n = p+q >= 3.
struct CliffordSlice {
    int p;
    int q;
    double t; // radians, 0 < t < pi/2

    CliffordSlice(int p_, int q_, double t_);
    int n() const { return p + q; }
};

/// Product spherical-harmonic degrees (i on S^p, j on S^q).
struct ModeIndex {
    int i = 0;
    int j = 0;
};

/// t_* = arctan(sqrt(q/p)); the unique minimal slice angle.
double minimal_angle(int p, int q);

/// H_t = q cot t - p tan t (sum convention, normal sin t P_x - cos t P_y).
double slice_mean_curvature(const CliffordSlice& slice);

struct PrincipalCurvatureData {
    double sp_curvature; // -tan t, multiplicity p
    double sq_curvature; // cot t, multiplicity q
    double b_norm_sq;    // p tan^2 t + q cot^2 t
};
PrincipalCurvatureData principal_curvature_data(const CliffordSlice& slice);

/// Eigenvalue of the linearized mean curvature operator
/// L_t = cos^-2(t) (Lap_{S^p} + p) + sin^-2(t) (Lap_{S^q} + q)
/// on the product harmonic of degrees (i, j).
double jacobi_eigenvalue(const CliffordSlice& slice, ModeIndex mode);

/// Kernel of L_{t_*}: restrictions of the bilinear monomials x_k y_l.
struct KernelDescription {
    int dimension; // (p+1)(q+1)
    std::vector<std::pair<int, int>> basis_labels; // (k, l), 1-based
};
KernelDescription kernel_description(int p, int q);

} // namespace cmcglue
