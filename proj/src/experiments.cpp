#include "fracbubble/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <spdlog/spdlog.h>

#include "fracbubble/error.hpp"
#include "fracbubble/oned.hpp"
#include "fracbubble/parallel.hpp"

namespace fb {

namespace {

constexpr double kPi = std::numbers::pi;

double psi_value(double r, double rho) { return 1.0 - smooth_step((r - rho) / rho); }

// ψ(x-z)·U_{ε,z}(x) at a point.
double cut_value(const BubbleSpec& spec, double rho, const double* x, int N, double s) {
    double r2 = 0.0;
    for (int a = 0; a < N; ++a) r2 += (x[a] - spec.z[a]) * (x[a] - spec.z[a]);
    const double p = psi_value(std::sqrt(r2), rho);
    return p == 0.0 ? 0.0 : p * spec.value(x, N, s);
}

// Grid of spacing ≤ h_max centered on `center`, with an odd node count so the
// center is a node.
Grid odd_grid(const std::vector<double>& center, double half, double h_max) {
    int n = static_cast<int>(std::ceil(2.0 * half / h_max - 1e-9)) + 1;
    if (n % 2 == 0) ++n;
    return Grid::centered(center, half, n);
}

Grid shifted(const Grid& g, const std::vector<double>& by) {
    Grid out = g;
    for (int a = 0; a < g.dim; ++a) out.origin[a] += by[a];
    return out;
}

// ∫ g(0',x_N) dx_N where g is grid data interpolated (multi-)linearly in x'
// at x' = 0. `weight(x_N, node_value)` maps the interpolated value to the integrand.
double axis_line_sum(const Field& f, const std::function<double(double, double)>& weight) {
    const Grid& g = f.grid;
    const int N = g.dim;
    const int last = N - 1;
    std::vector<int> i0(N, 0);
    std::vector<double> w(N, 0.0);
    for (int a = 0; a < last; ++a) {
        const double t = -g.origin[a] / g.h;
        const int i = static_cast<int>(std::floor(t));
        if (i < 0 || i + 1 >= g.extents[a]) {
            if (std::abs(t - std::round(t)) < 1e-9 && std::lround(t) >= 0 && std::lround(t) < g.extents[a]) {
                i0[a] = static_cast<int>(std::lround(t));
                w[a] = 0.0;
                continue;
            }
            return 0.0;
        }
        i0[a] = i;
        w[a] = t - i;
    }
    double acc = 0.0;
    const int corners = 1 << last;
    for (int k = 0; k < g.extents[last]; ++k) {
        double val = 0.0;
        for (int c = 0; c < corners; ++c) {
            std::array<int, 3> idx{0, 0, 0};
            double cw = 1.0;
            bool skip = false;
            for (int a = 0; a < last; ++a) {
                const int bit = (c >> a) & 1;
                cw *= bit ? w[a] : 1.0 - w[a];
                idx[a] = i0[a] + bit;
                if (idx[a] >= g.extents[a]) skip = true;
            }
            if (cw == 0.0 || skip) continue;
            idx[last] = k;
            val += cw * f.values[g.flat(idx)];
        }
        acc += weight(g.origin[last] + k * g.h, val);
    }
    return acc * g.h;
}

// ∫ g(x_N) over [lo, hi] for a bubble line integrand of width ~ε.
double bubble_line_integral(const std::function<double(double)>& g, double lo, double hi, double eps) {
    if (!(hi > lo)) return 0.0;
    const int panels = std::clamp(static_cast<int>(std::ceil((hi - lo) / (0.25 * eps))), 16, 4096);
    return integrate_1d(g, lo, hi, panels);
}

nlohmann::json vec_json(const std::vector<double>& v) {
    nlohmann::json j = nlohmann::json::array();
    for (double x : v) j.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
    return j;
}

// Factorized effect of a thin cut-off ω(x') on v = ψU near the axis x' = 0:
//   [ωv]² ≈ [v]² - defect2·∫(v Lv)(0',t)dt + cross·∫v(0',t)²dt
//   ‖ωv‖^{2*} ≈ ‖v‖^{2*} - defectp·∫v(0',t)^{2*}dt
struct SlabModel {
    double cross = 0.0;
    double defect2 = 0.0;
    double defectp = 0.0;
};

SlabModel slab_model_delta(const FracParams& p, double delta) {
    const int N = p.N;
    SlabModel m;
    m.cross = p.c_kernel / 2.0 * transverse_kernel_factor(N, p.s) * slab_profile_energy(N, p.s) *
              std::pow(delta, N - 1 - 2.0 * p.s);
    m.defect2 = std::pow(delta, N - 1) * slab_profile_defect(N, 2.0);
    m.defectp = std::pow(delta, N - 1) * slab_profile_defect(N, p.two_star);
    return m;
}

// ω(x₁) = 1 - η_θ(|x₁|/λ) for N = 2, s = 1/2.
SlabModel slab_model_borderline(const FracParams& p, double theta, double lambda, double kink) {
    auto omega = [&](double x) { return 1.0 - eta_theta_radial(std::abs(x) / lambda, theta, kink); };
    // Q(ω) = ∬(ω(a)-ω(b))²/|a-b|² = 2π [ω]²_{1/2}.
    const double Q = 2.0 * kPi * half_seminorm_sq_1d(omega, lambda, lambda / theta);
    auto defect = [&](double q) {
        // ∫₀^{R_θ} (1 - (1-η(t))^q) dt = 1 + ∫₀^{log R_θ} (...)(e^a) e^a da.
        const double tail = integrate_1d(
            [&](double a) {
                const double t = std::exp(a);
                return (1.0 - std::pow(1.0 - eta_theta_radial(t, theta, kink), q)) * t;
            },
            0.0, std::log(1.0 / theta), 64);
        return 2.0 * lambda * (1.0 + tail);
    };
    SlabModel m;
    m.cross = p.c_kernel / 2.0 * transverse_kernel_factor(2, 0.5) * Q;
    m.defect2 = defect(2.0);
    m.defectp = defect(p.two_star);
    return m;
}

}  // namespace

nlohmann::json to_json(const RateReport& r) {
    nlohmann::json j;
    j["name"] = r.name;
    j["variable"] = r.variable;
    j["samples"] = vec_json(r.samples);
    nlohmann::json cols = nlohmann::json::object();
    for (std::size_t c = 0; c < r.columns.size() && c < r.measured.size(); ++c) cols[r.columns[c]] = vec_json(r.measured[c]);
    j["measured"] = cols;
    j["fit_x"] = vec_json(r.fit_x);
    j["fit_y"] = vec_json(r.fit_y);
    j["slope"] = r.slope;
    j["expected"] = r.expected;
    j["rel_error"] = r.rel_error;
    j["tolerance"] = r.tolerance;
    j["fit_residual"] = r.fit_residual;
    j["monotone"] = r.monotone;
    j["pass"] = r.pass;
    j["method"] = r.method;
    return j;
}

SlopeFit fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DomainError("y", "length must match x");
    if (x.size() < 2) throw DomainError("x", "need at least two points");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) throw DomainError("x", "values must be positive");
        if (!(y[i] > 0.0) || !std::isfinite(y[i]))
            throw ComputationError("fit_log_slope: non-positive value " + std::to_string(y[i]) + " at point " +
                                   std::to_string(i));
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i] / n;
        my += ly[i] / n;
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx < 1e-12) throw DomainError("x", "sweep values must not all coincide");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < lx.size(); ++i)
        fit.residual = std::max(fit.residual, std::abs(ly[i] - fit.intercept - fit.slope * lx[i]));
    return fit;
}

void finalize_rate(RateReport& r) {
    const SlopeFit fit = fit_log_slope(r.fit_x, r.fit_y);
    r.slope = fit.slope;
    r.fit_residual = fit.residual;
    r.rel_error = std::abs(fit.slope - r.expected) / std::abs(r.expected);
    r.pass = r.rel_error <= r.tolerance && r.fit_residual < 0.1;
}

RateSweep run_rate_sweep(const FracParams& params, double eps, const std::vector<double>& deltas,
                         const std::vector<double>& z, const RateSweepOptions& opts) {
    params.require_critical_exponent();
    const int N = params.N;
    const double s = params.s;
    if (N < 2) throw DomainError("N", "slab cut-off needs N >= 2");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps", "must lie in (0,1)");
    if (static_cast<int>(z.size()) != N) throw DomainError("z", "length must equal N");
    if (deltas.size() < 3) throw DomainError("deltas", "need at least three values");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0 && deltas[i] < eps)) throw DomainError("deltas", "require 0 < delta < eps");
        if (i > 0 && std::abs(deltas[i - 1] / deltas[i] - 2.0) > 1e-9)
            throw DomainError("deltas", "must halve from one entry to the next");
    }
    const double rho = opts.rho > 0.0 ? opts.rho : eps;
    const double d = opts.d > 0.0 ? opts.d : normalization_d(params);
    const double B = params.bubble_energy();
    const BubbleSpec spec{eps, z, d};

    RateSweep out;
    out.deltas = deltas;
    for (double delta : deltas) {
        const double h = std::min(delta / 4.0, eps / 8.0);
        const Grid g = Grid::covering(z, 2.0 * rho + 4.0 * h, h);
        FracOperator op(g, params, opts.op);
        const Field u = truncated_bubble(spec, rho, delta, g, params);
        const Field v = cut_bubble(spec, rho, 0.0, g, params);
        out.h.push_back(g.h);
        out.seminorm_u.push_back(op.seminorm_sq(u.values));
        out.seminorm_v.push_back(op.seminorm_sq(v.values));
        out.mass_u.push_back(lp_integral(u, params.two_star));
        out.mass_v.push_back(lp_integral(v, params.two_star));
        spdlog::debug("rate sweep delta={} h={} [u]^2={} [v]^2={}", delta, g.h, out.seminorm_u.back(),
                      out.seminorm_v.back());
    }

    const std::size_t n = deltas.size();
    const double pw = std::pow(2.0, N - 1);
    std::vector<double> Delta(n), G(n, std::nan("")), literal(n), D(n), deficit(n);
    for (std::size_t i = 0; i < n; ++i) {
        Delta[i] = out.seminorm_u[i] - out.seminorm_v[i];
        literal[i] = out.seminorm_u[i] - B;
        D[i] = out.mass_v[i] - out.mass_u[i];
        deficit[i] = B - out.mass_u[i];
    }
    for (std::size_t i = 0; i + 1 < n; ++i) G[i] = pw * Delta[i + 1] - Delta[i];

    RateReport& e = out.energy;
    e.name = "upper_energy";
    e.variable = "delta";
    e.samples = deltas;
    e.columns = {"h", "seminorm_u", "seminorm_v", "excess_over_bubble", "delta_energy", "G"};
    e.measured = {out.h, out.seminorm_u, out.seminorm_v, literal, Delta, G};
    e.expected = N - 1 - 2.0 * s;
    e.tolerance = opts.tolerance;
    e.method = "G(delta) = 2^{N-1} Delta(delta/2) - Delta(delta), Delta = [u_delta]^2 - [psi U]^2 on the same grid";
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(G[i] > 0.0))
            throw ComputationError("upper energy sweep: G(" + std::to_string(deltas[i]) + ") = " + std::to_string(G[i]) +
                                   " is not positive; the cut energy is below discretization noise");
        e.fit_x.push_back(deltas[i]);
        e.fit_y.push_back(G[i]);
        if (i > 0 && G[i] > G[i - 1]) e.monotone = false;
    }
    finalize_rate(e);
    e.pass = e.pass && e.monotone;

    RateReport& m = out.mass;
    m.name = "lower_mass";
    m.variable = "delta";
    m.samples = deltas;
    m.columns = {"h", "mass_u", "mass_v", "deficit_from_bubble", "mass_removed"};
    m.measured = {out.h, out.mass_u, out.mass_v, deficit, D};
    m.expected = N - 1.0;
    m.tolerance = opts.tolerance;
    m.method = "D(delta) = ||psi U||^{2*} - ||u_delta||^{2*} on the same grid";
    for (std::size_t i = 0; i < n; ++i) {
        if (!(D[i] > 0.0))
            throw ComputationError("lower mass sweep: removed mass at delta = " + std::to_string(deltas[i]) +
                                   " is not positive");
        if (i > 0 && D[i] > D[i - 1]) m.monotone = false;
        m.fit_x.push_back(deltas[i]);
        m.fit_y.push_back(D[i]);
    }
    finalize_rate(m);
    m.pass = m.pass && m.monotone;
    return out;
}

RateReport verify_upper_energy(const FracParams& params, double eps, const std::vector<double>& deltas,
                               const std::vector<double>& z, const RateSweepOptions& opts) {
    return run_rate_sweep(params, eps, deltas, z, opts).energy;
}

RateReport verify_lower_mass(const FracParams& params, double eps, const std::vector<double>& deltas,
                             const std::vector<double>& z, const RateSweepOptions& opts) {
    return run_rate_sweep(params, eps, deltas, z, opts).mass;
}

CapacityReport verify_capacity_decay(const std::vector<double>& thetas, const std::vector<double>& lambdas,
                                     double kink) {
    if (thetas.size() < 2) throw DomainError("thetas", "need at least two values");
    for (double t : thetas)
        if (!(t > 0.0 && t < 1.0)) throw DomainError("thetas", "values must lie in (0,1)");
    for (double l : lambdas)
        if (!(l > 0.0)) throw DomainError("lambdas", "values must be positive");
    CapacityReport out;
    RateReport& r = out.report;
    r.name = "capacity_decay";
    r.variable = "theta";
    r.samples = thetas;
    r.columns = {"seminorm_sq", "m_theta"};
    r.measured.assign(2, {});
    r.expected = 1.0;
    r.tolerance = 1.0;
    r.method = "[eta_theta]^2_{1/2} on R by log-variable quadrature; pass when max m / min m <= 2, "
               "slope of [eta_theta]^2 against 1/|log theta| is informative";
    double mmin = INFINITY, mmax = 0.0;
    for (double theta : thetas) {
        auto f = [theta, kink](double x) { return eta_theta_radial(std::abs(x), theta, kink); };
        const double q = half_seminorm_sq_1d(f, 1.0, 1.0 / theta);
        const double m = q * std::abs(std::log(theta));
        r.measured[0].push_back(q);
        r.measured[1].push_back(m);
        r.fit_x.push_back(1.0 / std::abs(std::log(theta)));
        r.fit_y.push_back(q);
        mmin = std::min(mmin, m);
        mmax = std::max(mmax, m);
    }
    for (std::size_t i = 1; i < thetas.size(); ++i)
        if ((thetas[i] < thetas[i - 1]) != (r.measured[0][i] < r.measured[0][i - 1])) r.monotone = false;
    finalize_rate(r);
    r.rel_error = mmax / mmin;
    r.pass = mmax / mmin <= 2.0;

    const double theta0 = thetas.front();
    const double ref = r.measured[0].front();
    for (double lam : lambdas) {
        auto f = [theta0, kink, lam](double x) { return eta_theta_radial(std::abs(x) / lam, theta0, kink); };
        const double q = half_seminorm_sq_1d(f, lam, lam / theta0);
        out.lambdas.push_back(lam);
        out.scaled_rel_diff.push_back(std::abs(q - ref) / ref);
    }
    return out;
}

double transverse_kernel_factor(int N, double s) {
    // ∫_R (1+τ²)^{-a} dτ = √π Γ(a-1/2)/Γ(a), a = (N+2s)/2.
    const double a = (N + 2.0 * s) / 2.0;
    return std::sqrt(kPi) * std::exp(std::lgamma(a - 0.5) - std::lgamma(a));
}

double slab_profile_energy(int N, double s) {
    auto omega = [](double r) { return smooth_step(r - 1.0); };
    if (N == 2) return kernel_energy_1d([&](double t) { return omega(std::abs(t)); }, s, -2.0, 2.0, 1.0);
    if (N == 3) return kernel_energy_radial_2d(omega, s, 2.0, 1.0);
    throw DomainError("N", "slab profile needs N in {2,3}");
}

double slab_profile_defect(int N, double p) {
    auto g = [p](double r) { return 1.0 - std::pow(smooth_step(r - 1.0), p); };
    if (N == 2) return 2.0 * integrate_1d(g, 0.0, 2.0, 32);
    if (N == 3) return 2.0 * kPi * integrate_1d([&](double r) { return r * g(r); }, 0.0, 2.0, 32);
    throw DomainError("N", "slab profile needs N in {2,3}");
}

BorderlineReport verify_borderline(const FracParams& params, const std::vector<double>& eps_list,
                                   const BorderlineOptions& opts) {
    if (params.N != 2 || params.s != 0.5) throw DomainError("params", "borderline case is N = 2, s = 1/2");
    if (eps_list.empty()) throw DomainError("eps", "empty list");
    if (!(opts.alpha > 0.0)) throw DomainError("alpha", "must be positive");
    const double d = opts.d > 0.0 ? opts.d : normalization_d(params);
    const double B = params.bubble_energy();
    const double two_star = params.two_star;
    // Smallest ε with θ = exp(-ε^{-α}) ≥ 1e-4.
    const double eps_min = std::pow(std::log(1e4), -1.0 / opts.alpha);

    BorderlineReport rep;
    rep.slack = opts.slack;
    rep.pass = true;
    for (double eps_in : eps_list) {
        if (!(eps_in > 0.0 && eps_in < 1.0)) throw DomainError("eps", "values must lie in (0,1)");
        BorderlineRow row;
        row.eps = std::max(eps_in, eps_min);
        row.clamped = row.eps > eps_in;
        if (row.clamped) spdlog::warn("borderline: eps {} clamped to {} so that theta >= 1e-4", eps_in, row.eps);
        const double eps = row.eps;
        row.theta = std::exp(-std::pow(eps, -opts.alpha));
        row.lambda = std::pow(eps, 1.0 + opts.alpha) * row.theta;

        const double rho = opts.rho_over_eps * eps;
        const double h = opts.h_over_eps * eps;
        const std::vector<double> z{0.0, opts.R};
        const Grid g = odd_grid(z, 2.0 * rho + 4.0 * h, h);
        FracOperator op(g, params);
        const BubbleSpec spec{eps, z, d};
        const Field v = cut_bubble(spec, rho, 0.0, g, params);
        const std::vector<double> Lv = op.apply(v.values);
        row.seminorm_v = op.inner(v.values, Lv);
        row.mass_v = lp_integral(v, two_star);

        auto vline = [&](double x2) {
            const double x[2]{0.0, x2};
            return cut_value(spec, rho, x, 2, 0.5);
        };
        const double lo = opts.R - 2.0 * rho, hi = opts.R + 2.0 * rho;
        const double I2 = bubble_line_integral([&](double t) { return vline(t) * vline(t); }, lo, hi, eps);
        const double Ip =
            bubble_line_integral([&](double t) { return std::pow(std::abs(vline(t)), two_star); }, lo, hi, eps);
        const double Ib = axis_line_sum(Field(g, Lv), [&](double x2, double lv) { return vline(x2) * lv; });

        const SlabModel m = slab_model_borderline(params, row.theta, row.lambda, opts.kink);
        row.capacity_term = m.cross * I2;
        row.bulk_term = m.defect2 * Ib;
        row.mass_loss = m.defectp * Ip;
        row.seminorm_u = row.seminorm_v - row.bulk_term + row.capacity_term;
        row.mass_u = row.mass_v - row.mass_loss;
        row.energy_excess = (row.seminorm_u - B) / B;
        row.mass_deficit = (B - row.mass_u) / B;
        row.pass = row.energy_excess <= opts.slack && row.mass_deficit <= opts.slack;
        rep.pass = rep.pass && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

nlohmann::json to_json(const BorderlineReport& r) {
    nlohmann::json j;
    j["slack"] = r.slack;
    j["pass"] = r.pass;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows)
        j["rows"].push_back({{"eps", row.eps},
                             {"theta", row.theta},
                             {"lambda", row.lambda},
                             {"clamped", row.clamped},
                             {"seminorm_v", row.seminorm_v},
                             {"mass_v", row.mass_v},
                             {"capacity_term", row.capacity_term},
                             {"bulk_term", row.bulk_term},
                             {"mass_loss", row.mass_loss},
                             {"seminorm_u", row.seminorm_u},
                             {"mass_u", row.mass_u},
                             {"energy_excess", row.energy_excess},
                             {"mass_deficit", row.mass_deficit},
                             {"pass", row.pass}});
    return j;
}

SphereMapResult build_sphere_map(const FracParams& params, double eps, const DomainSpec& domain,
                                 const SphereMapOptions& opts) {
    params.require_critical_exponent();
    domain.validate();
    const int N = params.N;
    const double s = params.s;
    if (domain.N != N) throw DomainError("domain.N", "must equal N");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps", "must lie in (0,1)");
    if (N == 2 && opts.n_samples < 8) throw DomainError("n_samples", "need at least 8 samples on S^1");

    SphereMapResult res;
    res.eps = eps;
    res.borderline = N - 1 - 2.0 * s <= 0.0;
    if (res.borderline && !(N == 2 && s == 0.5))
        throw DomainError("params", "cut-off construction needs N - 1 > 2s or (N, s) = (2, 1/2)");
    const double kink = 0.1;
    const double alpha = opts.alpha > 0.0 ? opts.alpha : (res.borderline ? 1.5 : default_alpha(params));
    if (res.borderline) {
        res.theta = std::exp(-std::pow(eps, -alpha));
        res.lambda = std::pow(eps, 1.0 + alpha) * res.theta;
        if (!(res.lambda > 0.0 && res.theta > res.lambda))
            throw DomainError("eps", "theta underflows for this eps and alpha");
        res.delta = res.lambda / res.theta;  // outer edge λR_θ of the cut-off
    } else {
        res.delta = std::pow(eps, alpha);
    }
    res.rho = opts.rho > 0.0 ? opts.rho : 0.95 * domain.rho_bound();
    if (res.rho > domain.rho_bound() * (1.0 + 1e-12)) throw DomainError("rho", "exceeds min(R/10, (R2-R1)/2)");
    res.R = domain.mid_radius();
    const double d = opts.d > 0.0 ? opts.d : normalization_d(params);
    const double two_star = params.two_star;
    const double h_max = opts.h_over_eps * eps;
    const double half = 2.0 * res.rho + 4.0 * h_max;
    const Grid base = Grid::covering(std::vector<double>(N, 0.0), half, h_max);
    res.h = base.h;
    res.slab_subgrid = res.delta < 4.0 * base.h;
    FracOperator op(base, params, opts.op);

    SlabModel slab;
    if (res.slab_subgrid)
        slab = res.borderline ? slab_model_borderline(params, res.theta, res.lambda, kink)
                              : slab_model_delta(params, res.delta);

    // Cut-off applied at grid nodes.
    auto nodal = [&](const BubbleSpec& spec, const Grid& g) {
        if (!res.borderline) return cut_bubble(spec, res.rho, res.delta, g, params);
        Field u = cut_bubble(spec, res.rho, 0.0, g, params);
        for (std::size_t f = 0; f < u.size(); ++f)
            if (u.values[f] != 0.0)
                u.values[f] *= 1.0 - eta_theta_radial(std::abs(g.point(f)[0]) / res.lambda, res.theta, kink);
        return u;
    };

    std::vector<std::vector<double>> dirs;
    if (N == 2) {
        for (int k = 0; k < opts.n_samples; ++k) {
            const double t = 2.0 * kPi * k / opts.n_samples;
            dirs.push_back({std::cos(t), std::sin(t)});
        }
    } else {
        for (const auto& v : icosphere(opts.ico_level).vertices) dirs.push_back({v[0], v[1], v[2]});
    }

    for (const auto& x : dirs) {
        SphereMapSample smp;
        smp.direction = x;
        for (double c : x) smp.z.push_back(res.R * c);
        const Grid g = shifted(base, smp.z);
        const BubbleSpec spec{eps, smp.z, d};
        const Field u = res.slab_subgrid ? cut_bubble(spec, res.rho, 0.0, g, params) : nodal(spec, g);
        const std::vector<double> Lu = op.apply(u.values);
        double E = op.inner(u.values, Lu);
        double M = lp_integral(u, two_star);
        std::vector<double> num(N, 0.0);
        const double hN = std::pow(g.h, N);
        for (std::size_t f = 0; f < u.size(); ++f) {
            const double w = std::pow(std::abs(u.values[f]), two_star);
            if (w == 0.0) continue;
            const auto p = g.point(f);
            double r2 = 0.0;
            for (int a = 0; a < N; ++a) r2 += p[a] * p[a];
            if (r2 <= domain.R3 * domain.R3)
                for (int a = 0; a < N; ++a) num[a] += p[a] * w * hN;
        }

        double tz2 = 0.0;
        for (int a = 0; a + 1 < N; ++a) tz2 += smp.z[a] * smp.z[a];
        if (res.slab_subgrid && tz2 < 4.0 * res.rho * res.rho) {
            auto vline = [&](double xn) {
                double p[3]{0.0, 0.0, 0.0};
                p[N - 1] = xn;
                return cut_value(spec, res.rho, p, N, s);
            };
            const double reach = std::sqrt(4.0 * res.rho * res.rho - tz2);
            const double lo = smp.z[N - 1] - reach, hi = smp.z[N - 1] + reach;
            const double I2 = bubble_line_integral([&](double t) { return vline(t) * vline(t); }, lo, hi, eps);
            const double Ip = bubble_line_integral([&](double t) { return std::pow(std::abs(vline(t)), two_star); },
                                                   lo, hi, eps);
            const double Ix = bubble_line_integral(
                [&](double t) { return t * std::pow(std::abs(vline(t)), two_star); }, std::max(lo, -domain.R3),
                std::min(hi, domain.R3), eps);
            const double Ib = axis_line_sum(Field(g, Lu), [&](double xn, double lv) { return vline(xn) * lv; });
            E += slab.cross * I2 - slab.defect2 * Ib;
            M -= slab.defectp * Ip;
            num[N - 1] -= slab.defectp * Ix;
        }
        if (!(E > 0.0 && M > 0.0)) throw ComputationError("sphere map: non-positive norms at a sample");
        smp.seminorm_sq = E;
        smp.mass = M;
        smp.energy = s / N * std::pow(E / std::pow(M, 2.0 / two_star), N / (2.0 * s));
        smp.beta.resize(N);
        double bn = 0.0;
        for (int a = 0; a < N; ++a) {
            smp.beta[a] = num[a] / M;
            bn += smp.beta[a] * smp.beta[a];
        }
        bn = std::sqrt(bn);
        if (!(bn > 0.0)) throw ComputationError("sphere map: zero barycenter");
        double dist2 = 0.0;
        for (int a = 0; a < N; ++a) {
            smp.beta_bar.push_back(smp.beta[a] / bn);
            dist2 += (smp.beta_bar[a] - x[a]) * (smp.beta_bar[a] - x[a]);
        }
        smp.dist = std::sqrt(dist2);
        if (opts.keep_fields) smp.phi = nehari_project(res.slab_subgrid ? nodal(spec, g) : u, op);
        res.max_energy = std::max(res.max_energy, smp.energy);
        res.max_dist = std::max(res.max_dist, smp.dist);
        res.samples.push_back(std::move(smp));
    }

    std::vector<SphereSample> ss;
    for (const auto& smp : res.samples) ss.push_back({smp.direction, smp.beta_bar});
    res.degree = sphere_map_degree(ss);
    return res;
}

nlohmann::json to_json(const SphereMapResult& r) {
    nlohmann::json j;
    j["eps"] = r.eps;
    j["delta"] = r.delta;
    j["rho"] = r.rho;
    j["R"] = r.R;
    j["h"] = r.h;
    j["borderline"] = r.borderline;
    j["theta"] = r.theta;
    j["lambda"] = r.lambda;
    j["slab_subgrid"] = r.slab_subgrid;
    j["max_energy"] = r.max_energy;
    j["max_dist"] = r.max_dist;
    j["degree"] = r.degree;
    j["samples"] = nlohmann::json::array();
    for (const auto& smp : r.samples)
        j["samples"].push_back({{"direction", vec_json(smp.direction)},
                                {"z", vec_json(smp.z)},
                                {"seminorm_sq", smp.seminorm_sq},
                                {"mass", smp.mass},
                                {"energy", smp.energy},
                                {"beta", vec_json(smp.beta)},
                                {"beta_bar", vec_json(smp.beta_bar)},
                                {"dist", smp.dist}});
    return j;
}

BarycenterCheck check_barycenter_lower_bound(const FracParams& params, const DomainSpec& domain,
                                             const std::vector<Field>& fields, double margin, OperatorOptions op) {
    params.require_critical_exponent();
    domain.validate();
    if (fields.empty()) throw DomainError("fields", "empty list");
    if (!(margin >= 0.0)) throw DomainError("margin", "must be non-negative");
    std::map<std::pair<std::vector<int>, double>, std::unique_ptr<FracOperator>> cache;
    BarycenterCheck out;
    out.min_margin = INFINITY;
    bool any = false, ok = true;
    for (const Field& u : fields) {
        if (u.grid.dim != params.N) throw DomainError("fields", "grid dimension must equal N");
        u.check_finite();
        auto key = std::make_pair(u.grid.extents, u.grid.h);
        auto& slot = cache[key];
        if (!slot) {
            Grid g0 = u.grid;
            std::fill(g0.origin.begin(), g0.origin.end(), 0.0);
            slot = std::make_unique<FracOperator>(g0, params, op);
        }
        const EnergyReport e = EnergyReport::from(slot->seminorm_sq(u.values), lp_integral(u, params.two_star),
                                                  params.two_star);
        const bool on_nehari = std::abs(e.nehari_residual) <= 1e-8 * std::max(1.0, e.seminorm_sq);
        const bool low = e.energy <= params.c_inf + margin;
        const bool rejected = !(on_nehari && low);
        const auto beta = barycenter(u, domain.R3, params.two_star);
        double bn = 0.0;
        for (double b : beta) bn += b * b;
        bn = std::sqrt(bn);
        out.beta_norms.push_back(bn);
        out.energies.push_back(e.energy);
        out.rejected.push_back(rejected);
        if (rejected) continue;
        any = true;
        out.min_margin = std::min(out.min_margin, bn - domain.R0 / 2.0);
        ok = ok && bn >= domain.R0 / 2.0;
    }
    out.pass = any && ok;
    return out;
}

}  // namespace fb
