#include "fracbubble/bubbles.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <spdlog/spdlog.h>

#include "fracbubble/error.hpp"
#include "fracbubble/fields.hpp"
#include "fracbubble/parallel.hpp"

namespace fb {

namespace {

double expo(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// ∫₀^y smooth_step for y ∈ [0,1].
double step_integral(double y) {
    if (y <= 0.0) return 0.0;
    return boost::math::quadrature::gauss<double, 30>::integrate([](double t) { return smooth_step(t); }, 0.0, y);
}

double norm_of(const double* x, int n) {
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
    return std::sqrt(r2);
}

// |x'| for x' = first n-1 coordinates.
double transverse_norm(const double* x, int n) { return norm_of(x, std::max(1, n - 1)); }

// Solves [1, L^-p, L^-q] c = v for three radii; returns c[0].
double extrapolate3(const std::vector<double>& L, const std::vector<double>& v, double p, double q) {
    std::array<std::array<double, 4>, 3> A{};
    for (int i = 0; i < 3; ++i) A[i] = {1.0, std::pow(L[i], -p), std::pow(L[i], -q), v[i]};
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            const double f = A[r][c] / A[c][c];
            for (int k = c; k < 4; ++k) A[r][k] -= f * A[c][k];
        }
    }
    return A[0][3] / A[0][0];
}

double extrapolate2(double L1, double v1, double L2, double v2, double p) {
    const double a = std::pow(L1, -p), b = std::pow(L2, -p);
    return (v1 * b - v2 * a) / (b - a);
}

}  // namespace

void BubbleSpec::validate(int N) const {
    if (!(eps > 0.0)) throw DomainError("eps", "must be positive");
    if (!(d > 0.0)) throw DomainError("d", "must be positive");
    if (static_cast<int>(z.size()) != N) throw DomainError("z", "length must equal N");
}

double BubbleSpec::value(const double* x, int N, double s) const {
    double r2 = 0.0;
    for (int a = 0; a < N; ++a) r2 += (x[a] - z[a]) * (x[a] - z[a]);
    return d * std::pow(eps / (eps * eps + r2), (N - 2.0 * s) / 2.0);
}

void CutoffSpec::validate() const {
    switch (kind) {
        case CutoffKind::psi_bump:
            if (!(rho > 0.0)) throw DomainError("rho", "must be positive");
            break;
        case CutoffKind::omega_transition:
            break;
        case CutoffKind::omega_delta:
            if (!(delta > 0.0)) throw DomainError("delta", "must be positive");
            break;
        case CutoffKind::omega_theta_lambda:
            if (!(lambda > 0.0)) throw DomainError("lambda", "must be positive");
            [[fallthrough]];
        case CutoffKind::eta_theta:
            if (!(theta > 0.0 && theta < 1.0)) throw DomainError("theta", "must lie in (0,1)");
            if (!(kink >= 0.0 && kink <= 0.5)) throw DomainError("kink", "must lie in [0,1/2]");
            break;
    }
}

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = expo(t), b = expo(1.0 - t);
    return a / (a + b);
}

double smooth_clamp(double t, double w) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    if (w <= 0.0) return t;
    const double c = 1.0 / (1.0 - w);
    if (t > 0.5) return 1.0 - smooth_clamp(1.0 - t, w);
    if (t < w) return c * w * step_integral(t / w);
    return c * (w / 2.0 + t - w);
}

double eta_theta_radial(double r, double theta, double kink) {
    if (r <= 1.0) return 1.0;
    return 1.0 - smooth_clamp(std::log(r) / -std::log(theta), kink);
}

double cutoff_profile(const CutoffSpec& spec, const double* x, int n) {
    switch (spec.kind) {
        case CutoffKind::psi_bump:
            return 1.0 - smooth_step((norm_of(x, n) - spec.rho) / spec.rho);
        case CutoffKind::omega_transition:
            return smooth_step(transverse_norm(x, n) - 1.0);
        case CutoffKind::omega_delta:
            return smooth_step(transverse_norm(x, n) / spec.delta - 1.0);
        case CutoffKind::eta_theta:
            return eta_theta_radial(norm_of(x, n), spec.theta, spec.kink);
        case CutoffKind::omega_theta_lambda:
            return 1.0 - eta_theta_radial(std::abs(x[0]) / spec.lambda, spec.theta, spec.kink);
    }
    return 0.0;
}

double cutoff_profile(const CutoffSpec& spec, const std::vector<double>& x) {
    return cutoff_profile(spec, x.data(), static_cast<int>(x.size()));
}

Field talenti(const BubbleSpec& spec, const Grid& grid, const FracParams& params) {
    spec.validate(params.N);
    if (grid.dim != params.N) throw DomainError("grid.dim", "must equal N");
    if (grid.h > spec.eps / 8.0)
        spdlog::warn("talenti: h = {} does not resolve eps = {} (h > eps/8)", grid.h, spec.eps);
    Field u(grid);
    parallel_for(u.size(), [&](std::size_t f) {
        const auto x = grid.point(f);
        u.values[f] = spec.value(x.data(), params.N, params.s);
    });
    return u;
}

Field cut_bubble(const BubbleSpec& spec, double rho, double delta, const Grid& grid, const FracParams& params) {
    spec.validate(params.N);
    if (grid.dim != params.N) throw DomainError("grid.dim", "must equal N");
    if (!(rho > 0.0)) throw DomainError("rho", "must be positive");
    const int N = params.N;
    Field u(grid);
    parallel_for(u.size(), [&](std::size_t f) {
        const auto x = grid.point(f);
        double y[3];
        for (int a = 0; a < N; ++a) y[a] = x[a] - spec.z[a];
        double v = (1.0 - smooth_step((norm_of(y, N) - rho) / rho));
        if (v == 0.0) return;
        if (delta > 0.0) v *= smooth_step(transverse_norm(x.data(), N) / delta - 1.0);
        if (v == 0.0) return;
        u.values[f] = v * spec.value(x.data(), N, params.s);
    });
    return u;
}

Field truncated_bubble(const BubbleSpec& spec, double rho, double delta, const Grid& grid, const FracParams& params) {
    if (!(delta > 0.0 && delta < spec.eps)) throw DomainError("delta", "requires eps > delta > 0");
    if (params.N < 2) throw DomainError("N", "slab cut-off needs N >= 2");
    if (grid.h > delta / 4.0 * (1.0 + 1e-12))
        throw DomainError("grid.h", "must resolve delta (h <= delta/4)");
    return cut_bubble(spec, rho, delta, grid, params);
}

Field borderline_bubble(const BubbleSpec& spec, double rho, double theta, double lambda, const Grid& grid,
                        const FracParams& params, double kink) {
    if (params.N != 2 || params.s != 0.5) throw DomainError("params", "borderline case is N = 2, s = 1/2");
    if (!(1.0 > spec.eps && spec.eps > theta && theta > lambda && lambda > 0.0))
        throw DomainError("theta", "requires 1 > eps > theta > lambda > 0");
    Field u = cut_bubble(spec, rho, 0.0, grid, params);
    for (std::size_t f = 0; f < u.size(); ++f) {
        if (u.values[f] == 0.0) continue;
        const auto x = grid.point(f);
        u.values[f] *= 1.0 - eta_theta_radial(std::abs(x[0]) / lambda, theta, kink);
    }
    return u;
}

BubbleNorms extrapolated_bubble_norms(const FracParams& params, double d, const NormalizationOptions& opts) {
    params.require_critical_exponent();
    const int N = params.N;
    const double s = params.s;
    const double eps = opts.eps;
    if (!(eps > 0.0)) throw DomainError("eps", "must be positive");
    std::vector<double> radii = opts.radii;
    if (radii.empty()) {
        if (N == 1)
            radii = {8, 32, 128};
        else if (N == 2)
            radii = {4, 8, 16};
        else
            radii = {2, 4, 8};
    }
    if (radii.size() != 3) throw DomainError("radii", "need exactly three cut-off radii");
    const double h_rel = opts.h > 0.0 ? opts.h : (N <= 2 ? 0.25 : 0.5);

    BubbleSpec spec;
    spec.eps = eps;
    spec.z.assign(N, 0.0);
    spec.d = d;

    auto measure = [&](double L, double h) {
        const double half = 2.0 * L * eps + 2.0 * h * eps;
        const Grid g = Grid::covering(std::vector<double>(N, 0.0), half, h * eps);
        const Field u = cut_bubble(spec, L * eps, 0.0, g, params);
        FracOperator op(g, params);
        return std::pair{op.seminorm_sq(u.values), lp_integral(u, params.two_star)};
    };

    BubbleNorms out;
    out.radii = radii;
    for (double L : radii) {
        const auto [a, m] = measure(L, h_rel);
        out.seminorm_at.push_back(a);
        out.mass_at.push_back(m);
    }
    const double ps = N - 2.0 * s, qs = N;
    const double pm = N, qm = N + 2.0;
    out.seminorm_sq = extrapolate3(radii, out.seminorm_at, ps, qs);
    out.mass = extrapolate3(radii, out.mass_at, pm, qm);
    const double sem1 = extrapolate2(radii[1], out.seminorm_at[1], radii[2], out.seminorm_at[2], ps);
    const double mass1 = extrapolate2(radii[1], out.mass_at[1], radii[2], out.mass_at[2], pm);

    const auto [a_fine, m_fine] = measure(radii[0], h_rel / 2.0);
    out.seminorm_uncertainty = std::abs(out.seminorm_sq - sem1) + std::abs(a_fine - out.seminorm_at[0]);
    out.mass_uncertainty = std::abs(out.mass - mass1) + std::abs(m_fine - out.mass_at[0]);
    return out;
}

NormalizationResult normalization_d_detail(const FracParams& params, const NormalizationOptions& opts) {
    params.require_critical_exponent();
    NormalizationResult res;
    res.profile = extrapolated_bubble_norms(params, 1.0, opts);
    const double ratio = res.profile.seminorm_sq / res.profile.mass;
    const double k = 1.0 / (params.two_star - 2.0);
    res.d = std::pow(ratio, k);
    const double rel_ratio =
        res.profile.seminorm_uncertainty / res.profile.seminorm_sq + res.profile.mass_uncertainty / res.profile.mass;
    res.rel_uncertainty = k * rel_ratio;
    if (res.rel_uncertainty > opts.max_rel_uncertainty)
        throw ComputationError("normalization_d: extrapolated relative uncertainty " +
                               std::to_string(res.rel_uncertainty) + " exceeds tolerance");
    return res;
}

double normalization_d(const FracParams& params, const NormalizationOptions& opts) {
    return normalization_d_detail(params, opts).d;
}

double default_alpha(const FracParams& params) {
    const double gap = params.N - 1.0 - 2.0 * params.s;
    if (!(gap > 0.0)) throw DomainError("s", "requires N - 1 - 2s > 0");
    return 1.25 * (params.N - 2.0 * params.s) / gap;
}

std::string to_string(CutoffKind k) {
    switch (k) {
        case CutoffKind::psi_bump: return "psi_bump";
        case CutoffKind::omega_transition: return "omega_transition";
        case CutoffKind::omega_delta: return "omega_delta";
        case CutoffKind::eta_theta: return "eta_theta";
        case CutoffKind::omega_theta_lambda: return "omega_theta_lambda";
    }
    return "unknown";
}

CutoffKind cutoff_kind_from_string(const std::string& s) {
    for (auto k : {CutoffKind::psi_bump, CutoffKind::omega_transition, CutoffKind::omega_delta, CutoffKind::eta_theta,
                   CutoffKind::omega_theta_lambda})
        if (to_string(k) == s) return k;
    throw DomainError("kind", "unknown cut-off kind '" + s + "'");
}

}  // namespace fb
