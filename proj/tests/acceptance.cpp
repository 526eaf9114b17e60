// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "fracbubble/bubbles.hpp"
#include "fracbubble/experiments.hpp"
#include "fracbubble/fields.hpp"
#include "fracbubble/fraccore.hpp"
#include "fracbubble/parallel.hpp"
#include "fracbubble/solver.hpp"

namespace fs = std::filesystem;
using namespace fb;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Runs one criterion, adds the runtime budget to its verdict and prints its line.
bool criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs < budget_s;
    const bool pass = o.pass && in_budget;
    std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << name << "; " << o.detail
              << "; runtime " << fmt(secs) << " s (budget " << fmt(budget_s) << " s"
              << (in_budget ? "" : ", exceeded") << ")" << std::endl;
    return pass;
}

Outcome constants() {
    const FracParams p(2, 0.5);
    const double e_c = std::abs(p.c_inf - kPi / 4.0);
    const double e_s = std::abs(p.s_sharp - std::sqrt(kPi));
    const double e_k = std::abs(kernel_constant(1, 0.5) * kPi - 1.0);
    return {e_c <= 1e-10 && e_s <= 1e-10 && e_k <= 1e-8,
            "|c_inf - pi/4| = " + fmt(e_c) + ", |S - sqrt(pi)| = " + fmt(e_s) + " (tol 1e-10), C(1,1/2) rel err " +
                fmt(e_k) + " (tol 1e-8)"};
}

Outcome seminorm_engine() {
    // [e^{-x²/2}]²_{1/2} = Γ(1) = 1 on the line.
    const FracParams p1(1, 0.5);
    const Grid g1 = Grid::centered({0.0}, 12.0, 4097);
    Field gauss(g1);
    for (std::size_t i = 0; i < gauss.size(); ++i) {
        const double x = g1.point(i)[0];
        gauss.values[i] = std::exp(-x * x / 2.0);
    }
    const double line = gagliardo_seminorm_sq(gauss, p1, SeminormMode::kernel);
    const double e_line = std::abs(line - 1.0);

    const FracParams p2(2, 0.5);
    const Grid g2 = Grid::centered({0.0, 0.0}, 2.0, 128);
    Field bump(g2);
    for (std::size_t i = 0; i < bump.size(); ++i) {
        const auto x = g2.point(i);
        const double r2 = x[0] * x[0] + x[1] * x[1];
        bump.values[i] = r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
    }
    const double k = gagliardo_seminorm_sq(bump, p2, SeminormMode::kernel);
    const double f = gagliardo_seminorm_sq(bump, p2, SeminormMode::fourier);
    const double e_bump = std::abs(k - f) / f;
    return {e_line <= 0.01 && e_bump <= 0.02, "Gaussian [g]^2 = " + fmt(line) + " (rel err " + fmt(e_line) +
                                                   ", tol 0.01); 2D bump kernel " + fmt(k) + " vs Fourier " + fmt(f) +
                                                   " (rel diff " + fmt(e_bump) + ", tol 0.02)"};
}

Outcome talenti_identities() {
    const FracParams p(2, 0.5);
    NormalizationOptions no;
    no.eps = 0.3;
    const NormalizationResult nr = normalization_d_detail(p, no);
    const BubbleNorms bn = extrapolated_bubble_norms(p, nr.d, no);
    const double B = p.bubble_energy();
    const double e_sem = std::abs(bn.seminorm_sq - B) / B;
    const double e_mass = std::abs(bn.mass - B) / B;
    const double rq = bn.seminorm_sq / std::pow(bn.mass, 2.0 / p.two_star);
    const double e_rq = std::abs(rq - p.s_sharp) / p.s_sharp;
    return {e_sem <= 0.01 && e_mass <= 0.01 && e_rq <= 0.01,
            "d = " + fmt(nr.d) + "; [U]^2 rel err " + fmt(e_sem) + ", mass rel err " + fmt(e_mass) +
                ", Rayleigh quotient rel err " + fmt(e_rq) + " (tol 0.01 each)"};
}

Outcome truncation_rates() {
    const FracParams p(2, 0.25);
    const double eps = 0.2;
    std::vector<double> deltas;
    for (double r : {8.0, 16.0, 32.0, 64.0, 128.0}) deltas.push_back(eps / r);
    RateSweepOptions o;
    o.rho = 0.2;
    o.tolerance = 0.15;
    const RateSweep sw = run_rate_sweep(p, eps, deltas, {0.0, 2.5}, o);
    return {sw.energy.pass && sw.mass.pass,
            "energy slope " + fmt(sw.energy.slope) + " vs N-1-2s = " + fmt(sw.energy.expected) + " (rel err " +
                fmt(sw.energy.rel_error) + (sw.energy.monotone ? "" : ", non-monotone") + "), mass slope " +
                fmt(sw.mass.slope) + " vs N-1 = " + fmt(sw.mass.expected) + " (rel err " + fmt(sw.mass.rel_error) +
                "), tol 0.15"};
}

Outcome capacity() {
    const CapacityReport c = verify_capacity_decay({1e-1, 1e-2, 1e-3, 1e-4}, {0.1, 10.0});
    double worst = 0.0;
    for (double d : c.scaled_rel_diff) worst = std::max(worst, d);
    return {c.report.pass && worst <= 0.01, "max m / min m = " + fmt(c.report.rel_error) +
                                                " (limit 2), scale invariance rel diff " + fmt(worst) + " (tol 0.01)"};
}

Outcome borderline() {
    BorderlineOptions o;
    o.alpha = 1.5;
    o.slack = 0.15;
    const BorderlineReport r = verify_borderline(FracParams(2, 0.5), {0.3}, o);
    const BorderlineRow& row = r.rows.at(0);
    return {r.pass, "eps = " + fmt(row.eps) + ", theta = " + fmt(row.theta) + ": energy excess " +
                        fmt(row.energy_excess) + ", mass deficit " + fmt(row.mass_deficit) +
                        " (fractions of (N/s)c_inf, slack 0.15)"};
}

Outcome sphere_map() {
    const FracParams p(2, 0.25);
    DomainSpec dom;
    dom.N = 2;
    dom.R0 = 6.0;
    dom.R1 = 8.0;
    dom.R2 = 16.0;
    dom.R3 = 18.0;
    dom.delta = 0.1;
    SphereMapOptions o;
    o.n_samples = 32;
    const SphereMapResult r = build_sphere_map(p, 0.1, dom, o);
    std::vector<Field> fields;
    for (const auto& smp : r.samples) fields.push_back(smp.phi);
    const BarycenterCheck bc = check_barycenter_lower_bound(p, dom, fields, 0.2 * p.c_inf, o.op);
    const double bound = 1.2 * p.c_inf;
    const bool pass = r.degree == 1 && r.max_dist < 1.0 && r.max_energy <= bound && bc.pass;
    return {pass, "degree " + std::to_string(r.degree) + ", max |beta_bar - z/R| = " + fmt(r.max_dist) +
                      " (limit 1), max energy " + fmt(r.max_energy) + " vs 1.2 c_inf = " + fmt(bound) +
                      ", barycenter bound " + (bc.pass ? "holds" : "fails") + " (min margin " +
                      fmt(bc.min_margin) + ")"};
}

Outcome solver() {
    const FracParams p(2, 0.5);
    DomainSpec dom;
    dom.N = 2;
    dom.R0 = 1.0;
    dom.R1 = 2.0;
    dom.R2 = 3.0;
    dom.R3 = 4.0;
    dom.delta = 0.1;
    dom.resolution = 128;
    SolveOptions o;
    o.tol = 1e-6;
    o.op.path = ConvolutionPath::fft;
    const SolveResult r = solve_critical_point(dom, p, o);
    double worst_check = 0.0;
    for (const auto& g : r.gradient_checks) worst_check = std::max(worst_check, g.max_rel_error);
    const bool window = r.energy > 0.9 * p.c_inf && r.energy < 2.2 * p.c_inf;
    const bool pass = r.converged && r.manifold_gradient <= 1e-6 && r.positivity_min >= 0.0 && window &&
                      r.energy > p.c_inf && !r.concentration.flag && !r.gradient_checks.empty() &&
                      worst_check <= 1e-5;
    return {pass, std::string(r.converged ? "converged" : "not converged") + " in " + std::to_string(r.iterations) +
                      " iterations (manifold gradient " + fmt(r.manifold_gradient) + ", tol 1e-6), level " +
                      fmt(r.energy) + " vs c_inf = " + fmt(p.c_inf) + " (window " + fmt(0.9 * p.c_inf) + ".." +
                      fmt(2.2 * p.c_inf) + ", must exceed c_inf), min value " + fmt(r.positivity_min) +
                      ", concentration " + (r.concentration.flag ? "flagged (" + r.concentration.reason + ")" : "none") +
                      ", gradient check " + fmt(worst_check) + " (tol 1e-5)"};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

int run_cli(const std::string& cmd, const fs::path& config, const fs::path& out) {
    const std::string line = std::string(FRACBUBBLE_CLI) + " " + cmd + " --workers 1 --seed 1 --config '" +
                             config.string() + "' --out '" + out.string() + "' > /dev/null 2>&1";
    const int status = std::system(line.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
    const std::vector<std::pair<std::string, std::string>> runs{
        {"constants", "constants.json"},   {"bubble-energy", "bubble_energy.json"},
        {"verify-estimates", "verify_estimates.json"}, {"verify-estimates", "borderline.json"},
        {"capacity", "capacity.json"},
        {"sphere-map", "sphere_map.json"}, {"solve", "solve.json"},
    };
    const fs::path root = fs::temp_directory_path() / "fracbubble_acceptance";
    fs::remove_all(root);
    bool all = true;
    std::string detail;
    for (const auto& [cmd, cfg] : runs) {
        const fs::path config = fs::path(FRACBUBBLE_CONFIG_DIR) / cfg;
        const fs::path dir = root / fs::path(cfg).stem();
        const int a = run_cli(cmd, config, dir / "a");
        const int b = run_cli(cmd, config, dir / "b");
        const std::string ma = slurp(dir / "a" / "manifest.json");
        const std::string mb = slurp(dir / "b" / "manifest.json");
        const bool same = a == b && a != 2 && !ma.empty() && ma == mb;
        all = all && same;
        detail += (detail.empty() ? "" : ", ") + cfg + (same ? " identical" : " differs");
    }
    return {all, detail};
}

}  // namespace

int main() {
    set_worker_count(1);
    int failed = 0;
    failed += !criterion(1, "constants", 1.0, constants);
    failed += !criterion(2, "seminorm engine", 30.0, seminorm_engine);
    failed += !criterion(3, "Talenti identities", 120.0, talenti_identities);
    failed += !criterion(4, "truncation rates", 120.0, truncation_rates);
    failed += !criterion(5, "capacity decay", 10.0, capacity);
    failed += !criterion(6, "borderline bubble", 60.0, borderline);
    failed += !criterion(7, "sphere map", 300.0, sphere_map);
    failed += !criterion(8, "slit annulus solver", 900.0, solver);
    failed += !criterion(9, "determinism", 3600.0, determinism);
    std::cout << (9 - failed) << "/9 criteria pass" << std::endl;
    return failed == 0 ? 0 : 1;
}
