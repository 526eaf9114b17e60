#pragma once

#include <vector>

namespace fb {

/// Dimension/order pair with every derived constant cached at construction.
///
/// c_inf is stored as (s/N)·s_sharp^(N/(2s)) computed from the stored s_sharp,
/// so the relation holds bit-for-bit. For N ≤ 2s (only N = 1, s ≥ 1/2) the
/// pair still defines the seminorm; two_star, s_sharp and c_inf are then NaN
/// and has_critical_exponent() is false.
struct FracParams {
    int N = 0;
    double s = 0.0;
    double two_star = 0.0;  ///< 2N/(N-2s)
    double c_kernel = 0.0;  ///< C(N,s), normalization of the singular kernel
    double s_sharp = 0.0;   ///< S(N,s), best Sobolev constant
    double c_inf = 0.0;     ///< least energy on the Nehari manifold of R^N

    FracParams() = default;
    FracParams(int N, double s);

    bool has_critical_exponent() const { return N > 2.0 * s; }
    /// Throws DomainError unless N > 2s.
    void require_critical_exponent() const;

    /// γ² = 2*/2, ratio of the bootstrap recursion.
    double gamma_sq() const { return two_star / 2.0; }
    /// (N/s)·c∞: the common value of [U]² and ‖U‖^{2*} for a normalized bubble.
    double bubble_energy() const { return (N / s) * c_inf; }
};

double critical_exponent(int N, double s);
double sharp_sobolev_constant(int N, double s);
double minimal_energy(int N, double s);

struct KernelConstant {
    double value = 0.0;
    double error_estimate = 0.0;  ///< absolute error bound on value
};

/// C(N,s) = 1 / ∫(1-cos ξ₁)/|ξ|^{N+2s} dξ by radial × angular quadrature.
///
/// Radial factor: series on [0,1]; the oscillatory tail on [1,∞) is rotated
/// onto the ray 1 + i·y where it decays like e^{-y}. Throws ComputationError
/// when the achieved relative error exceeds 1e-8.
KernelConstant kernel_constant_detail(int N, double s);
double kernel_constant(int N, double s);

/// p₀ = 2*(2*+1)/2, p_{n+1} = γ²(p_n + 2 - 2*); returns `count` terms.
std::vector<double> bootstrap_exponents(int N, double s, int count);

/// Σ'_{j∈Z^N} |j|^{-σ}, analytically continued in σ (pole at σ = N only).
/// Evaluated by the theta-function splitting; accurate to ~1e-13.
double lattice_zeta(int N, double sigma);

/// Surface measure of the unit sphere S^{n-1} in R^n.
double sphere_area(int n);

/// 1/Γ(x), zero at the poles.
double rgamma(double x);

}  // namespace fb
