#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fracbubble/bubbles.hpp"
#include "fracbubble/domain.hpp"
#include "fracbubble/field.hpp"
#include "fracbubble/fields.hpp"
#include "fracbubble/fraccore.hpp"
#include "fracbubble/nehari.hpp"

namespace fb {

/// Outcome of a sweep: raw columns, the points entering the log-log fit and the verdict.
struct RateReport {
    std::string name;
    std::string variable;
    std::vector<double> samples;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> measured;  ///< one vector per column, aligned with samples
    std::vector<double> fit_x;                  ///< sweep values entering the fit
    std::vector<double> fit_y;                  ///< fitted quantity (positive)
    double slope = 0.0;
    double expected = 0.0;
    double rel_error = 0.0;
    double tolerance = 0.15;
    double fit_residual = 0.0;  ///< max |log y - line| over fit points
    bool monotone = true;
    bool pass = false;
    std::string method;
};

nlohmann::json to_json(const RateReport& r);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};
/// Least squares line through (log x, log y); throws on non-positive y or flat data.
SlopeFit fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Fits fit_x/fit_y and sets the verdict: |slope - expected|/expected ≤ tolerance and residual < 0.1.
void finalize_rate(RateReport& r);

struct RateSweepOptions {
    double rho = 0.0;           ///< ψ radius; 0 means ρ = ε
    double tolerance = 0.15;
    double d = 0.0;             ///< bubble normalization; 0 computes normalization_d
    OperatorOptions op;
};

/// Fields u_δ = ω_δ ψ U and the uncut v = ψ U sampled once per δ on a grid
/// with h = min(δ/4, ε/8) around z, feeding both rate reports.
///
/// Energy: Δ(δ) = [u_δ]² - [v]² removes the δ-independent floor exactly (its
/// δ → 0 limit is 0 on every grid). Δ carries the δ^{N-1} term of the mass
/// removed from the slab next to the δ^{N-1-2s} cut energy; the fit uses
/// G(δ) = 2^{N-1} Δ(δ/2) - Δ(δ), in which the δ^{N-1} term cancels, so G ∝ δ^{N-1-2s}.
/// Mass: D(δ) = ‖v‖^{2*} - ‖u_δ‖^{2*}, fitted directly against δ^{N-1}.
struct RateSweep {
    std::vector<double> deltas;
    std::vector<double> h;
    std::vector<double> seminorm_u, seminorm_v, mass_u, mass_v;
    RateReport energy;
    RateReport mass;
};

RateSweep run_rate_sweep(const FracParams& params, double eps, const std::vector<double>& deltas,
                         const std::vector<double>& z, const RateSweepOptions& opts = {});
RateReport verify_upper_energy(const FracParams& params, double eps, const std::vector<double>& deltas,
                               const std::vector<double>& z, const RateSweepOptions& opts = {});
RateReport verify_lower_mass(const FracParams& params, double eps, const std::vector<double>& deltas,
                             const std::vector<double>& z, const RateSweepOptions& opts = {});

/// m(θ) = [η_θ]²_{1/2}·|log θ| per θ; pass when max m / min m ≤ 2.
/// Also records the seminorm of η_θ(·/λ) for each λ in `lambdas` at the first θ.
struct CapacityReport {
    RateReport report;
    std::vector<double> lambdas;
    std::vector<double> scaled_rel_diff;
};
CapacityReport verify_capacity_decay(const std::vector<double>& thetas, const std::vector<double>& lambdas = {0.1},
                                     double kink = 0.1);

/// Factorized check of the borderline bubble (N = 2, s = 1/2) at z = R e₂, where
/// the slit cut-off acts on the bubble core. For each ε: θ = exp(-ε^{-α}),
/// λ = ε^{1+α}/R_θ; ε is clamped from below so that θ ≥ 1e-4.
///
/// With v = ψU on a grid and ω = ω_{θ,λ}(x₁) far below grid scale:
///   [u]² ≈ [v]² - ∫(1-ω²)dx₁·∫(v Lv)(0,x₂)dx₂ + (C(2,1/2)/2)·c_t·Q(ω)·∫v(0,x₂)²dx₂
///   ‖u‖^{2*} ≈ ‖v‖^{2*} - ∫(1-ω^{2*})dx₁·∫v(0,x₂)^{2*}dx₂
/// where Q(ω) = ∬(ω(a)-ω(b))²/|a-b|² comes from the log-graded 1D quadrature.
struct BorderlineOptions {
    double alpha = 1.5;
    double R = 5.0;
    double rho_over_eps = 32.0;
    double h_over_eps = 0.125;
    double slack = 0.15;  ///< fraction of (N/s)c∞
    double kink = 0.1;
    double d = 0.0;
};
struct BorderlineRow {
    double eps = 0.0, theta = 0.0, lambda = 0.0;
    bool clamped = false;
    double seminorm_v = 0.0, mass_v = 0.0;
    double capacity_term = 0.0;  ///< cross energy of the x₁ cut-off, ∝ 1/|log θ|
    double bulk_term = 0.0;      ///< ⟨(1-ω²)v, Lv⟩
    double mass_loss = 0.0;      ///< ∝ λR_θ
    double seminorm_u = 0.0, mass_u = 0.0;
    double energy_excess = 0.0;  ///< ([u]² - (N/s)c∞) / ((N/s)c∞)
    double mass_deficit = 0.0;   ///< ((N/s)c∞ - ‖u‖^{2*}) / ((N/s)c∞)
    bool pass = false;
};
struct BorderlineReport {
    std::vector<BorderlineRow> rows;
    double slack = 0.15;
    bool pass = false;
};
BorderlineReport verify_borderline(const FracParams& params, const std::vector<double>& eps_list,
                                   const BorderlineOptions& opts = {});
nlohmann::json to_json(const BorderlineReport& r);

struct SphereMapOptions {
    double alpha = 0.0;        ///< 0 picks default_alpha (1.5 in the borderline case)
    double rho = 0.0;          ///< 0 picks 0.95·rho_bound
    double h_over_eps = 0.125;
    int n_samples = 32;        ///< N = 2; N = 3 uses the icosphere of `ico_level`
    int ico_level = 1;
    double d = 0.0;
    bool keep_fields = true;
    OperatorOptions op;
};

struct SphereMapSample {
    std::vector<double> direction;  ///< x ∈ S^{N-1}
    std::vector<double> z;          ///< R·x
    double seminorm_sq = 0.0;       ///< [u_{ε,z}]² including sub-grid slab terms
    double mass = 0.0;
    double energy = 0.0;            ///< I(T(u_{ε,z}))
    std::vector<double> beta;       ///< β(φ(z))
    std::vector<double> beta_bar;
    double dist = 0.0;              ///< |β̄ - x|
    Field phi;                      ///< T(u) on its local grid (slab applied nodally)
};

struct SphereMapResult {
    double eps = 0.0, delta = 0.0, rho = 0.0, R = 0.0, h = 0.0;
    bool borderline = false;           ///< N = 2, s = 1/2: ω_{θ,λ}(x₁) replaces ω_δ
    double theta = 0.0, lambda = 0.0;  ///< borderline parameters
    bool slab_subgrid = false;
    std::vector<SphereMapSample> samples;
    double max_energy = 0.0;
    double max_dist = 0.0;
    int degree = 0;
};

/// φ(x) = T(u_{ε,Rx}) for x on S^{N-1}, with δ = ε^α. When δ < 4h the slab is
/// sub-grid and enters through its factorized contributions (cross energy
/// ∝ δ^{N-1-2s}, removed mass and removed bulk energy ∝ δ^{N-1}).
/// For N = 2, s = 1/2 the cut-off is ω_{θ,λ}(x₁) with θ = exp(-ε^{-α}),
/// λ = ε^{1+α}θ, factorized the same way when λR_θ < 4h.
SphereMapResult build_sphere_map(const FracParams& params, double eps, const DomainSpec& domain,
                                 const SphereMapOptions& opts = {});
nlohmann::json to_json(const SphereMapResult& r);

struct BarycenterCheck {
    std::vector<double> beta_norms;
    std::vector<double> energies;
    std::vector<bool> rejected;  ///< precondition not met (off Nehari or energy too high)
    double min_margin = 0.0;     ///< min |β| - R₀/2 over accepted fields
    bool pass = false;
};
/// |β(u)| ≥ R₀/2 for every field on the Nehari manifold with I(u) ≤ c∞ + margin.
BarycenterCheck check_barycenter_lower_bound(const FracParams& params, const DomainSpec& domain,
                                             const std::vector<Field>& fields, double margin,
                                             OperatorOptions op = {});

/// Cross-energy factors of the slab profile ω in R^{N-1}:
/// Q = ∬(ω(a)-ω(b))²|a-b|^{-(N-1)-2s} da db and c_t = ∫(1+τ²)^{-(N+2s)/2} dτ.
double slab_profile_energy(int N, double s);
double transverse_kernel_factor(int N, double s);
/// ∫_{R^{N-1}} (1 - ω(t)^p) dt.
double slab_profile_defect(int N, double p);

}  // namespace fb
