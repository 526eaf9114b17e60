#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <vector>

#include "fracbubble/field.hpp"
#include "fracbubble/fraccore.hpp"

namespace fb {

enum class SeminormMode { kernel, fourier };
enum class ConvolutionPath { automatic, dense, fft };

struct OperatorOptions {
    ConvolutionPath path = ConvolutionPath::automatic;
    /// Grids with more nodes than this use the FFT convolution under `automatic`.
    std::size_t fft_threshold = 64 * 64;
};

/// Discrete fractional Laplacian on a fixed grid, for fields extended by zero.
///
///   (L u)_i = C(N,s) [ u_i (h^N W_i + T_i) - h^N Σ_{j≠i} K(x_i-x_j) u_j
///                      + h^{2-2s} κ/(2N) (-Δ_h u)_i ]
///
/// K(r) = |r|^{-N-2s}; W_i = Σ_{j≠i} K(x_i-x_j) over grid nodes; T_i is the exact
/// integral of K over the complement of the grid box; κ = -Z_N(N+2s-2) with Z_N
/// the lattice zeta function. The last term restores the missing self-cell
/// contribution to second order (the lattice sum of |j|^{2-N-2s} continued
/// analytically). L is symmetric, so h^N⟨u, Lu⟩ is the matching quadrature of
/// (C/2)∬(u(x)-u(y))²|x-y|^{-N-2s}.
class FracOperator {
public:
    FracOperator(const Grid& grid, const FracParams& params, OperatorOptions opts = {});
    ~FracOperator();
    FracOperator(const FracOperator&) = delete;
    FracOperator& operator=(const FracOperator&) = delete;

    const Grid& grid() const { return grid_; }
    const FracParams& params() const { return params_; }
    bool uses_fft() const { return use_fft_; }

    /// Full L u.
    std::vector<double> apply(const std::vector<double>& u) const;
    /// Split into the off-site part and the local second-order correction.
    void apply_split(const std::vector<double>& u, std::vector<double>& offsite, std::vector<double>& local) const;
    /// h^N ⟨u, L u⟩.
    double seminorm_sq(const std::vector<double>& u) const;
    /// h^N ⟨u, v⟩ with serial fixed-order summation.
    double inner(const std::vector<double>& u, const std::vector<double>& v) const;

    /// Exterior tail T_i (without the C(N,s) factor).
    const std::vector<double>& exterior_tail() const { return tail_; }
    double kappa() const { return kappa_; }

private:
    void convolve(const std::vector<double>& u, std::vector<double>& out) const;
    void convolve_dense(const std::vector<double>& u, std::vector<double>& out) const;
    void convolve_fft(const std::vector<double>& u, std::vector<double>& out) const;

    Grid grid_;
    FracParams params_;
    bool use_fft_ = false;
    double kappa_ = 0.0;
    std::vector<double> diag_;    // h^N W + T
    std::vector<double> tail_;    // T
    std::vector<double> ktable_;  // h^N K on |index offsets|, dense path

    struct FftState;
    std::unique_ptr<FftState> fft_;
    mutable std::mutex mu_;
};

/// (C/2)∬(u(x)-u(y))²/|x-y|^{N+2s} for u extended by zero.
///
/// kernel: h^N⟨u, L u⟩ with FracOperator. fourier: Σ|ξ|^{2s}|û(ξ)|²Δξ^N on the
/// doubly padded DFT with unitary normalization û(ξ) = (2π)^{-N/2}∫u e^{-iξx},
/// minus the lattice-zeta correction Δξ^{N+2s} Z_N(-2s) |û(0)|² for the cusp of
/// |ξ|^{2s} at the origin. Throws DomainError when boundary_layer_ratio(u)
/// exceeds `max_boundary_ratio`.
double gagliardo_seminorm_sq(const Field& u, const FracParams& params, SeminormMode mode = SeminormMode::kernel,
                             double max_boundary_ratio = 1e-3, OperatorOptions opts = {});

/// (Σ|u_i|^p h^N)^{1/p}.
double lp_norm(const Field& u, double p);
/// Σ|u_i|^p h^N.
double lp_integral(const Field& u, double p);

struct FracLaplacianResult {
    Field value;
    /// Fraction of significant sites where the local correction exceeds 10% of the off-site sum.
    double coarse_fraction = 0.0;
    /// Set when coarse_fraction > 1%.
    bool too_coarse = false;
};

/// PV (-Δ)^s u at grid nodes (see FracOperator); logs a warning when too coarse.
FracLaplacianResult apply_frac_laplacian_report(const Field& u, const FracParams& params, OperatorOptions opts = {});
Field apply_frac_laplacian(const Field& u, const FracParams& params, OperatorOptions opts = {});

/// ∫_{R^N \ box} |x - y|^{-N-2s} dy for a node at distance lo_a / hi_a from the
/// lower / upper face of an axis-aligned box, per axis.
double box_exterior_integral(int N, double s, const double* lo, const double* hi);

}  // namespace fb
