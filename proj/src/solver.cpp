#include "fracbubble/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <spdlog/spdlog.h>

#include "fracbubble/error.hpp"
#include "fracbubble/experiments.hpp"
#include "fracbubble/nehari.hpp"

namespace fb {

namespace {

double weighted_dot(const std::vector<double>& a, const std::vector<double>& b, const std::vector<std::size_t>& nodes,
                    double hN) {
    double acc = 0.0;
    for (std::size_t f : nodes) acc += a[f] * b[f];
    return acc * hN;
}

double power_sum(const std::vector<double>& u, double p) {
    double acc = 0.0;
    for (double v : u) acc += std::pow(std::abs(v), p);
    return acc;
}

// |u|^{p-2} u
double nonlinearity(double v, double p) { return v == 0.0 ? 0.0 : std::pow(std::abs(v), p - 2.0) * v; }

}  // namespace

Grid solver_grid(const DomainSpec& spec) {
    spec.validate();
    return Grid::centered(std::vector<double>(spec.N, 0.0), spec.R2, spec.resolution);
}

DomainMask build_domain_mask(const DomainSpec& spec, const Grid& grid) {
    spec.validate();
    grid.validate();
    if (grid.dim != spec.N) throw DomainError("grid.dim", "must equal N");
    for (int a = 0; a < grid.dim; ++a) {
        const double lo = grid.origin[a];
        const double hi = grid.origin[a] + (grid.extents[a] - 1) * grid.h;
        if (lo > -spec.R2 + 1e-12 || hi < spec.R2 - 1e-12)
            throw DomainError("grid", "grid nodes must span [-R2, R2] on every axis");
    }
    if (!(grid.h < spec.delta / 2.0)) throw DomainError("grid.h", "slit unresolved: need h < delta/2");
    DomainMask m;
    m.grid = grid;
    m.interior.assign(grid.size(), 0);
    for (std::size_t f = 0; f < grid.size(); ++f) {
        const auto x = grid.point(f);
        if (spec.contains(x.data())) {
            m.interior[f] = 1;
            m.nodes.push_back(f);
        }
    }
    if (m.nodes.empty()) throw DomainError("domain", "mask has no interior nodes");
    return m;
}

std::vector<double> discrete_gradient(const std::vector<double>& u, const FracOperator& op, const DomainMask& mask) {
    if (u.size() != mask.grid.size()) throw DomainError("u", "size must match the mask grid");
    const double p = op.params().two_star;
    const std::vector<double> Lu = op.apply(u);
    std::vector<double> g(u.size(), 0.0);
    for (std::size_t f : mask.nodes) g[f] = Lu[f] - nonlinearity(u[f], p);
    return g;
}

double discrete_energy(const std::vector<double>& u, const FracOperator& op) {
    const double p = op.params().two_star;
    const double hN = std::pow(op.grid().h, op.grid().dim);
    return op.seminorm_sq(u) / 2.0 - hN * power_sum(u, p) / p;
}

IterateStats iterate_stats(const std::vector<double>& u, const Grid& grid) {
    IterateStats st;
    for (double v : u) st.max_abs = std::max(st.max_abs, std::abs(v));
    if (st.max_abs == 0.0) return st;
    std::size_t count = 0;
    for (double v : u)
        if (std::abs(v) >= st.max_abs / 2.0) ++count;
    const int N = grid.dim;
    const double vol = static_cast<double>(count) * std::pow(grid.h, N);
    const double unit_ball = std::pow(std::numbers::pi, N / 2.0) / std::tgamma(N / 2.0 + 1.0);
    st.support_radius = std::pow(vol / unit_ball, 1.0 / N);
    return st;
}

ConcentrationReport diagnose_concentration(const std::vector<IterateStats>& history, double h, int N, double s) {
    if (history.size() < 2) throw DomainError("history", "need at least two recorded iterates");
    if (!(h > 0.0)) throw DomainError("h", "must be positive");
    ConcentrationReport r;
    const IterateStats& first = history.front();
    const IterateStats& last = history.back();
    r.amplitude = last.max_abs;
    r.amplitude_threshold = std::pow(h, -(N - 2.0 * s) / 2.0) / 4.0;
    r.support_radius = last.support_radius;
    r.radius_threshold = 4.0 * h;
    const bool grew = last.max_abs > first.max_abs * (1.0 + 1e-9) && last.max_abs > r.amplitude_threshold;
    const bool shrank =
        last.support_radius < first.support_radius * (1.0 - 1e-9) && last.support_radius < r.radius_threshold;
    r.flag = grew || shrank;
    if (grew) r.reason = "amplitude grew past h^{-(N-2s)/2}/4";
    if (shrank) r.reason += std::string(r.reason.empty() ? "" : "; ") + "support radius shrank below 4h";
    return r;
}

double gradient_check(const std::vector<double>& u, const FracOperator& op, const DomainMask& mask, int n_dirs,
                      std::uint64_t seed) {
    if (n_dirs < 1) throw DomainError("n_dirs", "must be positive");
    const double p = op.params().two_star;
    const double hN = std::pow(op.grid().h, op.grid().dim);
    const std::vector<double> Lu = op.apply(u);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    double un = 0.0;
    for (std::size_t f : mask.nodes) un += u[f] * u[f];
    un = std::sqrt(un);
    double worst = 0.0;
    for (int k = 0; k < n_dirs; ++k) {
        std::vector<double> w(u.size(), 0.0);
        double wn = 0.0;
        for (std::size_t f : mask.nodes) {
            w[f] = normal(rng);
            wn += w[f] * w[f];
        }
        wn = std::sqrt(wn);
        const double scale = un > 0.0 ? un / wn : 1.0 / wn;
        for (double& v : w) v *= scale;
        double lin = 0.0, nl = 0.0;
        for (std::size_t f : mask.nodes) {
            lin += Lu[f] * w[f];
            nl += nonlinearity(u[f], p) * w[f];
        }
        lin *= hN;
        nl *= hN;
        const double analytic = lin - nl;
        const double t = 1e-4;
        std::vector<double> up(u), um(u);
        for (std::size_t f : mask.nodes) {
            up[f] += t * w[f];
            um[f] -= t * w[f];
        }
        const double fd = (discrete_energy(up, op) - discrete_energy(um, op)) / (2.0 * t);
        const double denom = std::abs(lin) + std::abs(nl);
        worst = std::max(worst, denom > 0.0 ? std::abs(fd - analytic) / denom : std::abs(fd - analytic));
    }
    return worst;
}

SolveResult solve_from(const Field& start, const DomainSpec& spec, const FracParams& params, const SolveOptions& opts) {
    params.require_critical_exponent();
    if (spec.N != params.N) throw DomainError("domain.N", "must equal N");
    if (!(opts.tol > 0.0)) throw DomainError("tol", "must be positive");
    if (opts.max_iter < 0) throw DomainError("max_iter", "must be non-negative");
    const Grid grid = solver_grid(spec);
    const DomainMask mask = build_domain_mask(spec, grid);
    FracOperator op(grid, params, opts.op);
    const double p = params.two_star;
    const int N = params.N;
    const double s = params.s;
    const double hN = std::pow(grid.h, N);

    Field moved = start.grid.same_as(grid) ? start : resample_linear(start, grid);
    std::vector<double> u(grid.size(), 0.0);
    for (std::size_t f : mask.nodes) u[f] = std::abs(moved.values[f]);

    // Nehari projection reusing L: returns I(Tu) and rescales u, Lu in place.
    std::vector<double> Lu = op.apply(u);
    auto project = [&](std::vector<double>& v, std::vector<double>& Lv) {
        const double E = weighted_dot(v, Lv, mask.nodes, hN);
        const double M = hN * power_sum(v, p);
        const double lam = nehari_scale(E, M, p);
        for (double& x : v) x *= lam;
        for (double& x : Lv) x *= lam;
        const double E2 = E * lam * lam;
        const double M2 = M * std::pow(lam, p);
        return std::make_pair(E2 / 2.0 - M2 / p, (E2 - M2) / E2);
    };
    auto [I, residual] = project(u, Lu);
    if (std::abs(residual) > 1e-10) throw ComputationError("solver: Nehari residual after projection too large");

    SolveResult res;
    std::mt19937_64 pick(opts.seed);
    const int random_check = 1 + static_cast<int>(pick() % 200);
    double tau = 0.0;
    std::vector<double> g(u.size(), 0.0), gT(u.size(), 0.0), w(u.size(), 0.0);
    int it = 0;
    for (;; ++it) {
        const double E = weighted_dot(u, Lu, mask.nodes, hN);
        std::vector<double> dG(u.size(), 0.0);
        for (std::size_t f : mask.nodes) {
            const double nl = nonlinearity(u[f], p);
            g[f] = Lu[f] - nl;
            dG[f] = 2.0 * Lu[f] - p * nl;
        }
        const double mu = weighted_dot(dG, g, mask.nodes, hN) / weighted_dot(dG, u, mask.nodes, hN);
        for (std::size_t f : mask.nodes) gT[f] = g[f] - mu * u[f];
        const double gT_norm = std::sqrt(weighted_dot(gT, gT, mask.nodes, hN));
        const double g_norm = std::sqrt(weighted_dot(g, g, mask.nodes, hN));
        const double descent = weighted_dot(g, gT, mask.nodes, hN);

        IterateStats st = iterate_stats(u, grid);
        st.iteration = it;
        st.energy = I;
        st.manifold_gradient = gT_norm / std::sqrt(E);
        st.step = tau;
        res.history.push_back(st);
        if (it % 200 == 0)
            spdlog::debug("solver it={} I={} |grad_N|={} max={} r_half={}", it, I, st.manifold_gradient, st.max_abs,
                          st.support_radius);
        res.manifold_gradient = st.manifold_gradient;
        res.free_gradient = g_norm / std::sqrt(E);

        if (opts.gradient_checks && (it == 0 || it == random_check))
            res.gradient_checks.push_back({it, gradient_check(u, op, mask, 5, opts.seed + static_cast<std::uint64_t>(it))});

        if (res.manifold_gradient <= opts.tol) {
            res.converged = true;
            break;
        }
        if (it >= opts.max_iter) {
            res.message = "max_iter exceeded";
            break;
        }

        tau = tau > 0.0 ? 2.0 * tau : 1.0 / E;
        bool accepted = false;
        for (int k = 0; k <= 30; ++k, tau /= 2.0) {
            for (std::size_t f : mask.nodes) w[f] = std::abs(u[f] - tau * gT[f]);
            std::vector<double> Lw = op.apply(w);
            std::vector<double> trial = w;
            const auto [It, rt] = project(trial, Lw);
            if (It <= I - 1e-4 * tau * descent) {
                if (std::abs(rt) > 1e-10) throw ComputationError("solver: Nehari residual after projection too large");
                if (It > I) throw ComputationError("solver: energy increased along an accepted step");
                u.swap(trial);
                Lu.swap(Lw);
                I = It;
                residual = rt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            res.message = "line search failed after 30 halvings";
            break;
        }
    }

    res.iterations = it;
    if (opts.gradient_checks && (res.gradient_checks.empty() || res.gradient_checks.back().iteration != it))
        res.gradient_checks.push_back({it, gradient_check(u, op, mask, 5, opts.seed + static_cast<std::uint64_t>(it))});

    res.solution = Field(grid, u);
    res.energy = I;
    res.nehari_residual = residual;
    res.positivity_min = *std::min_element(u.begin(), u.end());
    const double Ef = gagliardo_seminorm_sq(res.solution, params, SeminormMode::fourier, 1.0, opts.op);
    res.energy_uncertainty = std::abs(I - (Ef / 2.0 - hN * power_sum(u, p) / p));
    if (res.history.size() >= 2) res.concentration = diagnose_concentration(res.history, grid.h, N, s);
    const double c_inf = params.c_inf;
    res.in_window = I > c_inf * (1.0 - opts.slack) && I < 2.0 * c_inf * (1.0 + opts.slack);
    res.above_c_inf = I > c_inf;
    bool grad_ok = true;
    for (const auto& gc : res.gradient_checks) grad_ok = grad_ok && gc.max_rel_error <= 1e-5;
    res.success = res.converged && res.in_window && res.above_c_inf && res.positivity_min >= 0.0 &&
                  !res.concentration.flag && grad_ok;
    if (res.message.empty()) res.message = res.success ? "converged" : "converged outside the success criteria";
    spdlog::info("solver: {} after {} iterations, I = {}, c_inf = {}", res.message, it, I, c_inf);
    return res;
}

SolveResult solve_critical_point(const DomainSpec& spec, const FracParams& params, const SolveOptions& opts) {
    SphereMapOptions so;
    so.n_samples = opts.start_samples;
    so.alpha = opts.start_alpha;
    so.keep_fields = true;
    so.op = opts.op;
    const SphereMapResult map = build_sphere_map(params, opts.start_eps, spec, so);
    std::size_t best = 0;
    double best_dist = INFINITY;
    for (std::size_t k = 0; k < map.samples.size(); ++k) {
        const auto& bb = map.samples[k].beta_bar;
        double d2 = 0.0;
        for (std::size_t a = 0; a < bb.size(); ++a) {
            const double e = (a + 1 == bb.size()) ? 1.0 : 0.0;
            d2 += (bb[a] - e) * (bb[a] - e);
        }
        if (d2 < best_dist) {
            best_dist = d2;
            best = k;
        }
    }
    SolveResult res = solve_from(map.samples[best].phi, spec, params, opts);
    res.start_point = map.samples[best].z;
    return res;
}

nlohmann::json to_json(const ConcentrationReport& r) {
    return {{"flag", r.flag},
            {"amplitude", r.amplitude},
            {"amplitude_threshold", r.amplitude_threshold},
            {"support_radius", r.support_radius},
            {"radius_threshold", r.radius_threshold},
            {"reason", r.reason}};
}

nlohmann::json to_json(const SolveResult& r) {
    nlohmann::json j;
    j["energy"] = r.energy;
    j["energy_uncertainty"] = r.energy_uncertainty;
    j["nehari_residual"] = r.nehari_residual;
    j["manifold_gradient"] = r.manifold_gradient;
    j["free_gradient"] = r.free_gradient;
    j["positivity_min"] = r.positivity_min;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["in_window"] = r.in_window;
    j["above_c_inf"] = r.above_c_inf;
    j["concentration"] = to_json(r.concentration);
    j["gradient_checks"] = nlohmann::json::array();
    for (const auto& g : r.gradient_checks)
        j["gradient_checks"].push_back({{"iteration", g.iteration}, {"max_rel_error", g.max_rel_error}});
    j["start_point"] = r.start_point;
    j["success"] = r.success;
    j["message"] = r.message;
    nlohmann::json h = nlohmann::json::array();
    for (const auto& st : r.history)
        h.push_back({{"iteration", st.iteration},
                     {"energy", st.energy},
                     {"max_abs", st.max_abs},
                     {"support_radius", st.support_radius},
                     {"manifold_gradient", st.manifold_gradient},
                     {"step", st.step}});
    j["history"] = h;
    return j;
}

}  // namespace fb
