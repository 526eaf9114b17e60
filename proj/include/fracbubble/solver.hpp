#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracbubble/domain.hpp"
#include "fracbubble/field.hpp"
#include "fracbubble/fields.hpp"
#include "fracbubble/fraccore.hpp"

namespace fb {

/// Nodes of a grid lying in Ω; all other nodes are held at zero.
struct DomainMask {
    Grid grid;
    std::vector<std::uint8_t> interior;  ///< 1 inside Ω, per node
    std::vector<std::size_t> nodes;      ///< flat indices of interior nodes, ascending
};

/// Requires the grid box to contain B_{R₂} (Ω ⊂ B_{R₂}) and h < δ/2.
DomainMask build_domain_mask(const DomainSpec& spec, const Grid& grid);

/// Solver grid: `resolution` nodes per axis on [-R₂, R₂]^N.
Grid solver_grid(const DomainSpec& spec);

/// L u - |u|^{2*-2} u on interior nodes, zero elsewhere: the gradient of the
/// discrete free energy in the h^N-weighted inner product.
std::vector<double> discrete_gradient(const std::vector<double>& u, const FracOperator& op, const DomainMask& mask);

/// Discrete I(u) = h^N⟨u, Lu⟩/2 - h^N Σ|u|^{2*}/2*.
double discrete_energy(const std::vector<double>& u, const FracOperator& op);

struct IterateStats {
    int iteration = 0;
    double energy = 0.0;
    double max_abs = 0.0;
    double support_radius = 0.0;  ///< radius of the ball with the volume of {u ≥ max/2}
    double manifold_gradient = 0.0;
    double step = 0.0;
};

IterateStats iterate_stats(const std::vector<double>& u, const Grid& grid);

struct ConcentrationReport {
    bool flag = false;
    double amplitude = 0.0;
    double amplitude_threshold = 0.0;  ///< h^{-(N-2s)/2}/4
    double support_radius = 0.0;
    double radius_threshold = 0.0;     ///< 4h
    std::string reason;
};

/// Flags a history whose amplitude grew past h^{-(N-2s)/2}/4, or whose
/// support radius shrank below 4h. Needs at least two entries.
ConcentrationReport diagnose_concentration(const std::vector<IterateStats>& history, double h, int N, double s);

struct GradientCheck {
    int iteration = 0;
    double max_rel_error = 0.0;
};

/// Centered finite differences of discrete_energy along `n_dirs` random interior
/// directions. Errors are relative to |⟨Lu,w⟩| + |⟨|u|^{2*-2}u,w⟩|, the size of
/// the two terms that cancel near a critical point.
double gradient_check(const std::vector<double>& u, const FracOperator& op, const DomainMask& mask, int n_dirs,
                      std::uint64_t seed);

struct SolveOptions {
    double tol = 1e-6;        ///< stop when ‖∇_N I‖ ≤ tol·[u]_s
    int max_iter = 20000;
    double slack = 0.1;       ///< level window (c∞(1-slack), 2c∞(1+slack))
    double start_eps = 0.1;   ///< bubble scale of the initial sphere-map sample
    int start_samples = 32;
    double start_alpha = 0.0; ///< 0 picks the sphere-map default
    bool gradient_checks = true;
    std::uint64_t seed = 1;
    OperatorOptions op;
};

struct SolveResult {
    Field solution;
    double energy = 0.0;             ///< level c = I(u)
    double energy_uncertainty = 0.0; ///< |c - c evaluated with the Fourier-mode seminorm|
    double nehari_residual = 0.0;    ///< ([u]² - ‖u‖^{2*})/[u]²
    double manifold_gradient = 0.0;  ///< ‖∇_N I‖/[u]_s
    double free_gradient = 0.0;      ///< ‖∇I‖/[u]_s
    double positivity_min = 0.0;
    int iterations = 0;
    bool converged = false;
    bool in_window = false;
    bool above_c_inf = false;
    ConcentrationReport concentration;
    std::vector<GradientCheck> gradient_checks;
    std::vector<IterateStats> history;
    std::vector<double> start_point;  ///< z* of the initial guess
    bool success = false;
    std::string message;
};

/// Projected descent u ← T(|u - τ∇_N I(u)|) on the masked grid, starting from
/// the sphere-map sample whose β̄ is closest to e_N.
SolveResult solve_critical_point(const DomainSpec& spec, const FracParams& params, const SolveOptions& opts = {});

/// Descent from a given field (restricted to the mask, then projected).
SolveResult solve_from(const Field& start, const DomainSpec& spec, const FracParams& params,
                       const SolveOptions& opts = {});

nlohmann::json to_json(const SolveResult& r);
nlohmann::json to_json(const ConcentrationReport& r);

}  // namespace fb
