#pragma once

#include <string>
#include <vector>

#include "fracbubble/field.hpp"
#include "fracbubble/fraccore.hpp"

namespace fb {

/// U_{ε,z}(x) = d·(ε/(ε²+|x-z|²))^{(N-2s)/2}.
struct BubbleSpec {
    double eps = 1.0;
    std::vector<double> z;
    double d = 1.0;

    void validate(int N) const;
    double value(const double* x, int N, double s) const;
};

enum class CutoffKind { psi_bump, omega_transition, omega_delta, eta_theta, omega_theta_lambda };

/// Parameters of the smooth cut-offs. Unused fields are ignored by a kind.
///
/// psi_bump:            1 on |x| ≤ ρ, 0 on |x| ≥ 2ρ
/// omega_transition:    0 on |x'| ≤ 1, 1 on |x'| ≥ 2 (x' = first N-1 coordinates)
/// omega_delta:         omega_transition(x'/δ)
/// eta_theta:           1 on |x| ≤ 1, 0 on |x| ≥ R_θ = 1/θ, linear in log|x| between,
///                      with both kinks rounded over a fraction `kink` of the log range
/// omega_theta_lambda:  1 - eta_theta(x₁/λ)
struct CutoffSpec {
    CutoffKind kind = CutoffKind::psi_bump;
    double rho = 1.0;
    double delta = 1.0;
    double theta = 0.5;
    double lambda = 1.0;
    double kink = 0.1;

    double r_theta() const { return 1.0 / theta; }
    void validate() const;
};

/// C∞ step: 0 for t ≤ 0, 1 for t ≥ 1, ramp(t) + ramp(1-t) = 1.
double smooth_step(double t);
/// Smoothed clamp(t, 0, 1): 0 for t ≤ 0, 1 for t ≥ 1, slope 1/(1-w) on [w, 1-w].
double smooth_clamp(double t, double w);

/// Profile value at x (length = dimension of x).
double cutoff_profile(const CutoffSpec& spec, const std::vector<double>& x);
double cutoff_profile(const CutoffSpec& spec, const double* x, int n);

/// η_θ as a function of r = |x| ≥ 0.
double eta_theta_radial(double r, double theta, double kink = 0.1);

/// U_{ε,z} at grid nodes; warns when h > ε/8.
Field talenti(const BubbleSpec& spec, const Grid& grid, const FracParams& params);

/// ψ(x-z)·U_{ε,z}(x) with ψ = psi_bump of radius ρ, times ω(x'/δ) when δ > 0.
/// No resolution checks; building block for the samplers below.
Field cut_bubble(const BubbleSpec& spec, double rho, double delta, const Grid& grid, const FracParams& params);

/// ω_δ(x)·ψ(x-z)·U_{ε,z}(x). Requires ε > δ > 0 and h ≤ δ/4.
Field truncated_bubble(const BubbleSpec& spec, double rho, double delta, const Grid& grid, const FracParams& params);

/// ω_{θ,λ}(x₁)·ψ(x-z)·U_{ε,z}(x), N = 2, s = 1/2, 1 > ε > θ > λ > 0.
Field borderline_bubble(const BubbleSpec& spec, double rho, double theta, double lambda, const Grid& grid,
                        const FracParams& params, double kink = 0.1);

struct NormalizationOptions {
    double eps = 1.0;
    /// Cut-off radii in units of ε for the extrapolation; empty picks a default by N.
    std::vector<double> radii;
    /// Grid spacing in units of ε; 0 picks a default by N.
    double h = 0.0;
    /// Relative uncertainty above which normalization_d throws.
    double max_rel_uncertainty = 0.01;
};

/// Seminorm and L^{2*} mass of a bubble, extrapolated to the uncut profile.
///
/// The bubble is cut by psi_bump of radius L·ε for each L in `radii`;
/// seminorm(L) and mass(L) are extrapolated with the two leading cut-off
/// error powers (L^{-(N-2s)}, L^{-N} for the seminorm; L^{-N}, L^{-N-2} for
/// the mass). Uncertainty combines the change from one- to two-term
/// extrapolation with the change under halving h at the smallest radius.
struct BubbleNorms {
    double seminorm_sq = 0.0;
    double mass = 0.0;
    double seminorm_uncertainty = 0.0;
    double mass_uncertainty = 0.0;
    std::vector<double> radii;
    std::vector<double> seminorm_at;
    std::vector<double> mass_at;
};

BubbleNorms extrapolated_bubble_norms(const FracParams& params, double d, const NormalizationOptions& opts = {});

struct NormalizationResult {
    double d = 0.0;
    double rel_uncertainty = 0.0;
    BubbleNorms profile;  ///< norms of the d = 1 profile
};

/// d_{N,s} = ([φ]²/‖φ‖^{2*}_{2*})^{1/(2*-2)} for φ = (ε/(ε²+|x|²))^{(N-2s)/2}.
NormalizationResult normalization_d_detail(const FracParams& params, const NormalizationOptions& opts = {});
double normalization_d(const FracParams& params, const NormalizationOptions& opts = {});

/// Default exponent α of δ = ε^α: 1.25·(N-2s)/(N-1-2s).
double default_alpha(const FracParams& params);

std::string to_string(CutoffKind k);
CutoffKind cutoff_kind_from_string(const std::string& s);

}  // namespace fb
