#include "commands.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "config.hpp"
#include "fracbubble/bubbles.hpp"
#include "fracbubble/experiments.hpp"
#include "fracbubble/fraccore.hpp"
#include "fracbubble/solver.hpp"
#include "output.hpp"

namespace fbcli {

namespace {

fb::FracParams read_params(ConfigReader& c, int N0, double s0) {
    const int N = c.integer("N", N0);
    const double s = c.number("s", s0);
    if (N < 1 || N > 3) throw fb::DomainError(c.field("N"), "must be 1, 2 or 3");
    if (!(s > 0.0 && s < 1.0)) throw fb::DomainError(c.field("s"), "must lie in (0,1)");
    return fb::FracParams(N, s);
}

fb::DomainSpec read_domain(ConfigReader c, int N, const fb::DomainSpec& defaults) {
    fb::DomainSpec d = defaults;
    d.N = c.integer("N", N);
    d.R0 = c.number("R0", d.R0);
    d.R1 = c.number("R1", d.R1);
    d.R2 = c.number("R2", d.R2);
    d.R3 = c.number("R3", d.R3);
    d.delta = c.number("delta", d.delta);
    d.resolution = c.integer("resolution", d.resolution);
    c.finish();
    if (d.N != N) throw fb::DomainError(c.field("N"), "must equal the top-level N");
    d.validate();
    return d;
}

nlohmann::json domain_json(const fb::DomainSpec& d) {
    return {{"N", d.N}, {"R0", d.R0}, {"R1", d.R1},          {"R2", d.R2},
            {"R3", d.R3}, {"delta", d.delta}, {"resolution", d.resolution}};
}

fb::OperatorOptions read_operator(ConfigReader& c) {
    fb::OperatorOptions op;
    const std::string key = "fast_path";
    if (c.has(key)) op.path = c.boolean(key, true) ? fb::ConvolutionPath::fft : fb::ConvolutionPath::dense;
    return op;
}

nlohmann::json params_json(const fb::FracParams& p) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    return {{"N", p.N},
            {"s", p.s},
            {"two_star", num(p.two_star)},
            {"C", p.c_kernel},
            {"S", num(p.s_sharp)},
            {"c_inf", num(p.c_inf)},
            {"bubble_energy", num(p.bubble_energy())}};
}

void write_rate(OutputDir& out, const fb::RateReport& r) {
    out.json(r.name + ".json", fb::to_json(r));
    out.text(r.name + ".csv", rate_csv(r));
    out.text(r.name + ".svg", rate_svg(r));
}

}  // namespace

int cmd_constants(const Context& ctx) {
    ConfigReader c(ctx.config, "config");
    int N = c.integer("N", 2);
    double s = c.number("s", 0.5);
    c.finish();
    if (ctx.n) N = *ctx.n;
    if (ctx.s) s = *ctx.s;
    if (N < 1 || N > 3) throw fb::DomainError("N", "must be 1, 2 or 3");
    if (!(s > 0.0 && s < 1.0)) throw fb::DomainError("s", "must lie in (0,1)");
    const fb::FracParams p(N, s);
    const fb::KernelConstant kc = fb::kernel_constant_detail(N, s);
    nlohmann::json j = params_json(p);
    j["C_error_estimate"] = kc.error_estimate;
    OutputDir out(ctx.out);
    out.json("constants.json", j);
    out.manifest("constants");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_bubble_energy(const Context& ctx) {
    ConfigReader c(ctx.config, "config");
    const fb::FracParams p = read_params(c, 2, 0.5);
    p.require_critical_exponent();
    fb::NormalizationOptions no;
    no.eps = c.number("eps", 0.3);
    no.radii = c.numbers("radii", {});
    no.h = c.number("h_over_eps", 0.0);
    no.max_rel_uncertainty = c.number("max_rel_uncertainty", 0.01);
    const double tol = c.number("tolerance", 0.01);
    c.finish();

    const fb::NormalizationResult nr = fb::normalization_d_detail(p, no);
    const fb::BubbleNorms bn = fb::extrapolated_bubble_norms(p, nr.d, no);
    const double B = p.bubble_energy();
    const double rayleigh = bn.seminorm_sq / std::pow(bn.mass, 2.0 / p.two_star);
    nlohmann::json j;
    j["params"] = params_json(p);
    j["eps"] = no.eps;
    j["d"] = nr.d;
    j["d_rel_uncertainty"] = nr.rel_uncertainty;
    j["seminorm_sq"] = bn.seminorm_sq;
    j["seminorm_uncertainty"] = bn.seminorm_uncertainty;
    j["mass"] = bn.mass;
    j["mass_uncertainty"] = bn.mass_uncertainty;
    j["radii"] = bn.radii;
    j["seminorm_at"] = bn.seminorm_at;
    j["mass_at"] = bn.mass_at;
    j["seminorm_rel_error"] = std::abs(bn.seminorm_sq - B) / B;
    j["mass_rel_error"] = std::abs(bn.mass - B) / B;
    j["rayleigh_quotient"] = rayleigh;
    j["rayleigh_rel_error"] = std::abs(rayleigh - p.s_sharp) / p.s_sharp;
    const bool pass = j["seminorm_rel_error"].get<double>() <= tol && j["mass_rel_error"].get<double>() <= tol &&
                      j["rayleigh_rel_error"].get<double>() <= tol;
    j["tolerance"] = tol;
    j["pass"] = pass;
    OutputDir out(ctx.out);
    out.json("bubble_energy.json", j);
    out.manifest("bubble-energy");
    return pass ? 0 : 1;
}

int cmd_verify_estimates(const Context& ctx) {
    ConfigReader c(ctx.config, "config");
    const fb::FracParams p = read_params(c, 2, 0.25);
    const double eps = c.number("eps", 0.2);
    fb::RateSweepOptions ro;
    ro.rho = c.number("rho", 0.2);
    ro.tolerance = c.number("tolerance", 0.15);
    ro.d = c.number("d", 0.0);
    ro.op = read_operator(c);
    std::vector<double> z = c.numbers("z", {});
    if (z.empty()) {
        z.assign(p.N, 0.0);
        z.back() = 2.5;
    }
    const std::vector<double> ratios = c.numbers("deltas_over_eps", {8, 16, 32, 64, 128});
    const bool with_rates = c.boolean("rates", true);
    const bool with_borderline = c.has("borderline");
    ConfigReader bc = c.child("borderline");
    fb::BorderlineOptions bo;
    std::vector<double> b_eps;
    if (with_borderline) {
        b_eps = bc.numbers("eps", {0.3});
        bo.alpha = bc.number("alpha", bo.alpha);
        bo.R = bc.number("R", bo.R);
        bo.rho_over_eps = bc.number("rho_over_eps", bo.rho_over_eps);
        bo.h_over_eps = bc.number("h_over_eps", bo.h_over_eps);
        bo.slack = bc.number("slack", bo.slack);
        bo.kink = bc.number("kink", bo.kink);
        bc.finish();
    }
    c.finish();
    if (!with_rates && !with_borderline)
        throw fb::DomainError("config.rates", "nothing to run without rates or a borderline section");

    std::vector<double> deltas;
    for (double r : ratios) {
        if (!(r > 1.0)) throw fb::DomainError("config.deltas_over_eps", "ratios must exceed 1");
        deltas.push_back(eps / r);
    }
    OutputDir out(ctx.out);
    bool pass = true;
    if (with_rates) {
        const fb::RateSweep sweep = fb::run_rate_sweep(p, eps, deltas, z, ro);
        write_rate(out, sweep.energy);
        write_rate(out, sweep.mass);
        pass = sweep.energy.pass && sweep.mass.pass;
        spdlog::info("upper energy slope {} (expected {}), lower mass slope {} (expected {})", sweep.energy.slope,
                     sweep.energy.expected, sweep.mass.slope, sweep.mass.expected);
    }
    if (with_borderline) {
        const fb::BorderlineReport br = fb::verify_borderline(fb::FracParams(2, 0.5), b_eps, bo);
        out.json("borderline.json", fb::to_json(br));
        pass = pass && br.pass;
    }
    out.manifest("verify-estimates");
    return pass ? 0 : 1;
}

int cmd_capacity(const Context& ctx) {
    ConfigReader c(ctx.config, "config");
    const std::vector<double> thetas = c.numbers("thetas", {1e-1, 1e-2, 1e-3, 1e-4});
    const std::vector<double> lambdas = c.numbers("lambdas", {0.1});
    const double kink = c.number("kink", 0.1);
    const double scale_tol = c.number("scale_tolerance", 0.01);
    c.finish();
    const fb::CapacityReport cr = fb::verify_capacity_decay(thetas, lambdas, kink);
    bool scale_ok = true;
    for (double d : cr.scaled_rel_diff) scale_ok = scale_ok && d <= scale_tol;
    OutputDir out(ctx.out);
    write_rate(out, cr.report);
    out.json("scale_invariance.json",
             {{"lambdas", cr.lambdas}, {"rel_diff", cr.scaled_rel_diff}, {"tolerance", scale_tol}, {"pass", scale_ok}});
    out.manifest("capacity");
    return cr.report.pass && scale_ok ? 0 : 1;
}

int cmd_sphere_map(const Context& ctx) {
    ConfigReader c(ctx.config, "config");
    const fb::FracParams p = read_params(c, 2, 0.25);
    p.require_critical_exponent();
    const double eps = c.number("eps", 0.1);
    fb::DomainSpec dd;
    dd.R0 = 6.0;
    dd.R1 = 8.0;
    dd.R2 = 16.0;
    dd.R3 = 18.0;
    const fb::DomainSpec domain = read_domain(c.child("domain"), p.N, dd);
    fb::SphereMapOptions so;
    so.alpha = c.number("alpha", 0.0);
    so.rho = c.number("rho", 0.0);
    so.h_over_eps = c.number("h_over_eps", so.h_over_eps);
    so.n_samples = c.integer("n_samples", so.n_samples);
    so.ico_level = c.integer("ico_level", so.ico_level);
    so.d = c.number("d", 0.0);
    so.op = read_operator(c);
    const double energy_slack = c.number("energy_slack", 0.2);
    const double margin = c.number("barycenter_margin", energy_slack * p.c_inf);
    c.finish();
    if (p.N == 2 && so.n_samples < 16) throw fb::DomainError("config.n_samples", "need at least 16 samples on S^1");

    const fb::SphereMapResult r = fb::build_sphere_map(p, eps, domain, so);
    std::vector<fb::Field> fields;
    for (const auto& smp : r.samples) fields.push_back(smp.phi);
    const fb::BarycenterCheck bc = fb::check_barycenter_lower_bound(p, domain, fields, margin, so.op);

    const bool energy_ok = r.max_energy <= p.c_inf * (1.0 + energy_slack);
    const bool pass = r.degree == 1 && r.max_dist < 1.0 && energy_ok && bc.pass;
    nlohmann::json j = fb::to_json(r);
    j["params"] = params_json(p);
    j["domain"] = domain_json(domain);
    j["energy_bound"] = p.c_inf * (1.0 + energy_slack);
    j["energy_ok"] = energy_ok;
    j["pass"] = pass;
    std::ostringstream csv;
    csv.precision(17);
    csv << "index,z_angle_or_vertex,seminorm_sq,mass,energy,beta_norm,dist\n";
    for (std::size_t k = 0; k < r.samples.size(); ++k) {
        const auto& smp = r.samples[k];
        double bn = 0.0;
        for (double b : smp.beta) bn += b * b;
        const double tag = p.N == 2 ? std::atan2(smp.direction[1], smp.direction[0]) : static_cast<double>(k);
        csv << k << "," << tag << "," << smp.seminorm_sq << "," << smp.mass << "," << smp.energy << ","
            << std::sqrt(bn) << "," << smp.dist << "\n";
    }
    nlohmann::json bj;
    bj["beta_norms"] = bc.beta_norms;
    bj["energies"] = bc.energies;
    bj["rejected"] = bc.rejected;
    bj["min_margin"] = std::isfinite(bc.min_margin) ? nlohmann::json(bc.min_margin) : nlohmann::json(nullptr);
    bj["energy_margin"] = margin;
    bj["R0_half"] = domain.R0 / 2.0;
    bj["pass"] = bc.pass;

    OutputDir out(ctx.out);
    out.json("sphere_map.json", j);
    out.text("sphere_map.csv", csv.str());
    out.json("barycenter.json", bj);
    out.manifest("sphere-map");
    return pass ? 0 : 1;
}

int cmd_solve(const Context& ctx) {
    ConfigReader c(ctx.config, "config");
    const fb::FracParams p = read_params(c, 2, 0.5);
    p.require_critical_exponent();
    const fb::DomainSpec domain = read_domain(c.child("domain"), p.N, fb::DomainSpec{});
    fb::SolveOptions so;
    so.tol = c.number("tol", so.tol);
    so.max_iter = c.integer("max_iter", so.max_iter);
    so.slack = c.number("slack", so.slack);
    so.start_eps = c.number("start_eps", so.start_eps);
    so.start_samples = c.integer("start_samples", so.start_samples);
    so.start_alpha = c.number("start_alpha", so.start_alpha);
    so.gradient_checks = c.boolean("gradient_checks", so.gradient_checks);
    so.op = read_operator(c);
    so.seed = ctx.seed;
    c.finish();

    const fb::SolveResult r = fb::solve_critical_point(domain, p, so);
    nlohmann::json j = fb::to_json(r);
    j["params"] = params_json(p);
    j["domain"] = domain_json(domain);
    j["window"] = {p.c_inf * (1.0 - so.slack), 2.0 * p.c_inf * (1.0 + so.slack)};
    OutputDir out(ctx.out);
    out.json("solve.json", j);
    out.field("solution.bin", r.solution);
    out.text("solution.svg", heatmap_svg(r.solution));
    out.manifest("solve");
    return r.success ? 0 : 1;
}

}  // namespace fbcli
