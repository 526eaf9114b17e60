#pragma once

#include <functional>

namespace fb {

/// One-dimensional quadratures for profiles whose variation lives on scales
/// far below any practical grid (η_θ over many decades, ω at width δ ≪ h).

struct LogQuadratureOptions {
    double panel = 0.5;   ///< panel width in log|x|
    double margin = 40.0; ///< extra log-range on both sides (kernel decays like e^{-|t|})
};

/// [f]²_{1/2} = (C(1,1/2)/2) ∬ (f(x)-f(y))²/|x-y|² dx dy.
///
/// Computed in the variables x = ±e^a, where the kernel becomes
/// 1/(4 sinh²((a-b)/2)) for equal signs and 1/(4 cosh²((a-b)/2)) for opposite
/// signs, so geometric nodes in |x| are uniform nodes in a. `x_lo`, `x_hi`
/// bracket the positive scales where f varies; f must be constant for
/// |x| < x_lo·e^{-margin} and for |x| > x_hi·e^{margin} up to negligible error.
double half_seminorm_sq_1d(const std::function<double(double)>& f, double x_lo, double x_hi,
                           const LogQuadratureOptions& opts = {});

/// ∬ (f(x)-f(y))² |x-y|^{-1-2s} dx dy for f equal to the constant `outside`
/// off [a, b]. No normalization constant.
double kernel_energy_1d(const std::function<double(double)>& f, double s, double a, double b, double outside);

/// ∬_{R²×R²} (f(|a|)-f(|b|))² |a-b|^{-2-2s} da db for a radial profile equal
/// to `outside` for |a| ≥ r_max.
double kernel_energy_radial_2d(const std::function<double(double)>& f, double s, double r_max, double outside);

/// ∫_a^b g(x) dx by composite 20-point Gauss-Legendre on `panels` panels.
double integrate_1d(const std::function<double(double)>& g, double a, double b, int panels = 16);

}  // namespace fb
