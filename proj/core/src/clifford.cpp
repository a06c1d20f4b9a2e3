#include "cmcglue/clifford.hpp"

#include <cmath>
#include <stdexcept>

#include "cmcglue/error.hpp"

namespace cmcglue {

// n = 2 (the classical Clifford torus) is accepted: all slice formulas hold
// for any p, q >= 1, and the p = q = 1 fixtures exercise them.
CliffordSlice::CliffordSlice(int p_, int q_, double t_) : p(p_), q(q_), t(t_) {
    if (p < 1 || q < 1)
        throw std::domain_error("CliffordSlice: p, q must be >= 1");
    if (!(t > 0.0 && t < M_PI / 2))
        throw std::domain_error("CliffordSlice: t must lie in (0, pi/2)");
}

double minimal_angle(int p, int q) {
    if (p < 1 || q < 1)
        throw std::domain_error("minimal_angle: p, q must be >= 1");
    return std::atan(std::sqrt(static_cast<double>(q) / static_cast<double>(p)));
}

double slice_mean_curvature(const CliffordSlice& slice) {
    return slice.q / std::tan(slice.t) - slice.p * std::tan(slice.t);
}

PrincipalCurvatureData principal_curvature_data(const CliffordSlice& slice) {
    const double tn = std::tan(slice.t);
    const double ct = 1.0 / tn;
    return {-tn, ct, slice.p * tn * tn + slice.q * ct * ct};
}

double jacobi_eigenvalue(const CliffordSlice& slice, ModeIndex mode) {
    if (mode.i < 0 || mode.j < 0)
        throw std::domain_error("jacobi_eigenvalue: mode degrees must be >= 0");
    const double c2 = std::cos(slice.t) * std::cos(slice.t);
    const double s2 = std::sin(slice.t) * std::sin(slice.t);
    const double i = mode.i, j = mode.j, p = slice.p, q = slice.q;
    return -(i * i + i * (p - 1) - p) / c2 - (j * j + j * (q - 1) - q) / s2;
}

KernelDescription kernel_description(int p, int q) {
    if (p < 1 || q < 1)
        throw std::domain_error("kernel_description: p, q must be >= 1");
    KernelDescription out;
    out.dimension = (p + 1) * (q + 1);
    out.basis_labels.reserve(out.dimension);
    for (int k = 1; k <= p + 1; ++k)
        for (int l = 1; l <= q + 1; ++l)
            out.basis_labels.emplace_back(k, l);
    return out;
}

} // namespace cmcglue
