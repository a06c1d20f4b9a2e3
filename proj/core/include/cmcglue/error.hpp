#pragma once

#include <stdexcept>
#include <string>

namespace cmcglue {

/// Numerical invariant failure; the message names the invariant that broke.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed configuration, generator spec, or ambiguous dedupe.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Point outside a chart's validity region.
struct chart_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// Gluing set fails the kernel-orthogonality requirement of the Green's solve.
struct solvability_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Degenerate metric or ill-posed curvature evaluation.
struct geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Root bracketing failed: the requested parameter lies outside the valid window.
struct window_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cmcglue
