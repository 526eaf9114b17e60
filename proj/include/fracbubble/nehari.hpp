#pragma once

#include <array>
#include <vector>

#include "fracbubble/field.hpp"
#include "fracbubble/fields.hpp"
#include "fracbubble/fraccore.hpp"

namespace fb {

/// I(u) = [u]²/2 - ‖u‖^{2*}_{2*}/2* with its two ingredients.
struct EnergyReport {
    double seminorm_sq = 0.0;
    double mass = 0.0;  ///< ‖u‖^{2*}_{2*}
    double energy = 0.0;
    double nehari_residual = 0.0;  ///< seminorm_sq - mass

    static EnergyReport from(double seminorm_sq, double mass, double two_star);
};

EnergyReport energy(const Field& u, const FracParams& params, OperatorOptions opts = {});
EnergyReport energy(const Field& u, const FracOperator& op);

/// T(u) = ([u]²/‖u‖^{2*})^{1/(2*-2)} u. Rejects u ≡ 0.
Field nehari_project(const Field& u, const FracParams& params, OperatorOptions opts = {});
Field nehari_project(const Field& u, const FracOperator& op);
/// Scale factor of the projection given the two norms of u.
double nehari_scale(double seminorm_sq, double mass, double two_star);

/// β(u) = ∫_{B_{R3}} x|u|^{2*} / ∫_{R^N} |u|^{2*}; the numerator only is masked.
std::vector<double> barycenter(const Field& u, double R3, double two_star);

/// Winding number (N = 2) or degree (N = 3) of the sampled map.
struct SphereSample {
    std::vector<double> point;  ///< on S^{N-1}
    std::vector<double> image;  ///< nonzero
};

/// Icosahedron refined `level` times, vertices projected to S². Faces are
/// counter-clockwise seen from outside.
struct Icosphere {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> faces;
};
Icosphere icosphere(int level);

/// N = 2: samples ordered along the circle; the winding of the normalized
/// images is divided by the winding of the points (±1), so either traversal
/// direction gives the degree. Consecutive normalized images must be less than
/// π/2 apart.
/// N = 3: samples are the vertices of icosphere(level) in order (any level);
/// the degree is the sum of signed solid angles of the image triangles over 4π.
int sphere_map_degree(const std::vector<SphereSample>& samples);

}  // namespace fb
