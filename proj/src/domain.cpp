#include "fracbubble/domain.hpp"

#include <algorithm>
#include <cmath>

#include "fracbubble/error.hpp"

namespace fb {

void DomainSpec::validate() const {
    if (N != 2 && N != 3) throw DomainError("N", "domain supports N in {2,3}");
    if (!(R0 > 0.0)) throw DomainError("R0", "must be positive");
    if (!(R0 < R1)) throw DomainError("R1", "requires R0 < R1");
    if (!(R1 < R2)) throw DomainError("R2", "requires R1 < R2");
    if (!(R2 < R3)) throw DomainError("R3", "requires R2 < R3");
    if (!(delta > 0.0)) throw DomainError("delta", "must be positive");
    if (resolution < 8) throw DomainError("resolution", "need at least 8 nodes per axis");
}

double DomainSpec::rho_bound() const { return std::min(mid_radius() / 10.0, (R2 - R1) / 2.0); }

bool DomainSpec::contains(const double* x) const {
    double r2 = 0.0, t2 = 0.0;
    for (int a = 0; a < N; ++a) r2 += x[a] * x[a];
    for (int a = 0; a + 1 < N; ++a) t2 += x[a] * x[a];
    if (r2 < R1 * R1 || r2 > R2 * R2) return false;
    return !(t2 < delta * delta && x[N - 1] >= 0.0);
}

}  // namespace fb
