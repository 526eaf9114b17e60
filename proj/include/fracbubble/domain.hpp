#pragma once

#include <vector>

namespace fb {

/// Slit annulus Ω = {R₁ ≤ |x| ≤ R₂} \ {|x'| < δ, x_N ≥ 0} inside B_{R₃} \ B_{R₀}.
struct DomainSpec {
    int N = 2;
    double R0 = 1.0, R1 = 2.0, R2 = 3.0, R3 = 4.0;
    double delta = 0.1;
    /// Grid nodes per axis for solver grids.
    int resolution = 128;

    void validate() const;
    /// Midline radius R = (R₁+R₂)/2 of the bubble sphere.
    double mid_radius() const { return (R1 + R2) / 2.0; }
    /// Largest admissible ψ radius: min(R/10, (R₂-R₁)/2).
    double rho_bound() const;
    bool contains(const double* x) const;
};

}  // namespace fb
