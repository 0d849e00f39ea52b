#pragma once

namespace lenschain {

/// Numerical thresholds shared by every module. A single instance is passed
/// down so that a singular/nonsingular verdict is made the same way everywhere.
struct Tolerances {
    /// |det(M)| <= sing * max(1, ||M||_inf^N) counts as singular.
    double sing = 1e-9;
    /// |s_i| <= band * max(1, ||x_i||) counts as on the switching manifold.
    double band = 1e-8;
    /// Relative wrap-around residual accepted for a reconstructed cycle.
    double wrap = 1e-9;
};

}  // namespace lenschain
