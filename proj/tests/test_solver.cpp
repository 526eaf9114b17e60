#include <doctest.h>

#include <cmath>
#include <random>

#include "fracbubble/error.hpp"
#include "fracbubble/solver.hpp"

using namespace fb;

namespace {

DomainSpec small_domain() {
    DomainSpec d;
    d.N = 2;
    d.R0 = 1.0;
    d.R1 = 2.0;
    d.R2 = 3.0;
    d.R3 = 4.0;
    d.delta = 0.3;
    d.resolution = 48;
    return d;
}

std::vector<double> smooth_interior(const DomainMask& m, double amp) {
    std::vector<double> u(m.grid.size(), 0.0);
    for (std::size_t i : m.nodes) {
        const auto x = m.grid.point(i);
        const double r = std::hypot(x[0], x[1]);
        u[i] = amp * std::sin(3.1415926535 * (r - 2.0)) * (1.0 + 0.3 * x[0] / r);
    }
    return u;
}

IterateStats stats(int it, double amp, double radius) {
    IterateStats s;
    s.iteration = it;
    s.max_abs = amp;
    s.support_radius = radius;
    return s;
}

}  // namespace

TEST_CASE("domain mask follows the slit annulus") {
    const DomainSpec d = small_domain();
    const DomainMask m = build_domain_mask(d, solver_grid(d));
    CHECK(m.grid.h < d.delta / 2.0);
    for (std::size_t i = 0; i < m.grid.size(); ++i) {
        const auto x = m.grid.point(i);
        CHECK(bool(m.interior[i]) == d.contains(x.data()));
    }
    const double in[2] = {2.5, 0.0}, slit[2] = {0.1, 2.5}, below[2] = {0.1, -2.5}, out[2] = {0.0, 3.5};
    CHECK(d.contains(in));
    CHECK_FALSE(d.contains(slit));
    CHECK(d.contains(below));
    CHECK_FALSE(d.contains(out));
    CHECK(std::is_sorted(m.nodes.begin(), m.nodes.end()));

    DomainSpec coarse = d;
    coarse.resolution = 16;
    CHECK_THROWS_AS(build_domain_mask(coarse, solver_grid(coarse)), DomainError);
    CHECK_THROWS_AS(build_domain_mask(d, Grid::centered({0.0, 0.0}, 2.0, 48)), DomainError);
    DomainSpec bad = d;
    bad.R1 = 0.5;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("discrete gradient is the derivative of the discrete energy") {
    const FracParams p(2, 0.25);
    const DomainSpec d = small_domain();
    const DomainMask m = build_domain_mask(d, solver_grid(d));
    const FracOperator op(m.grid, p);
    const std::vector<double> u = smooth_interior(m, 0.8);
    const auto g = discrete_gradient(u, op, m);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!m.interior[i]) CHECK(g[i] == 0.0);

    const auto zero = discrete_gradient(std::vector<double>(m.grid.size(), 0.0), op, m);
    for (double v : zero) CHECK(v == 0.0);

    // d/dt I(u + t w) at t = 0 against h^N⟨∇I, w⟩ by a fourth-order difference.
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    std::vector<double> w(m.grid.size(), 0.0);
    for (std::size_t i : m.nodes) w[i] = nd(rng);
    auto at = [&](double t) {
        std::vector<double> v = u;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += t * w[i];
        return discrete_energy(v, op);
    };
    const double t = 1e-3;
    const double fd = (8.0 * (at(t) - at(-t)) - (at(2 * t) - at(-2 * t))) / (12.0 * t);
    const double an = op.inner(g, w);
    CHECK(fd == doctest::Approx(an).epsilon(1e-7));

    CHECK(gradient_check(u, op, m, 4, 9) < 1e-6);
}

TEST_CASE("concentration diagnosis") {
    const double h = 0.05;
    const double amp_thr = std::pow(h, -(2 - 0.5) / 2.0) / 4.0;
    const ConcentrationReport calm =
        diagnose_concentration({stats(0, 1.0, 0.5), stats(100, 1.1, 0.45)}, h, 2, 0.25);
    CHECK_FALSE(calm.flag);
    CHECK(calm.amplitude_threshold == doctest::Approx(amp_thr));
    CHECK(calm.radius_threshold == doctest::Approx(4 * h));
    const ConcentrationReport tall =
        diagnose_concentration({stats(0, 1.0, 0.5), stats(100, 2.0 * amp_thr, 0.45)}, h, 2, 0.25);
    CHECK(tall.flag);
    const ConcentrationReport thin =
        diagnose_concentration({stats(0, 1.0, 0.5), stats(100, 1.0, 2.0 * h)}, h, 2, 0.25);
    CHECK(thin.flag);
    // Already tall at the start: not a concentration of the descent.
    const ConcentrationReport born =
        diagnose_concentration({stats(0, 2.0 * amp_thr, 0.1), stats(100, 2.0 * amp_thr, 0.1)}, h, 2, 0.25);
    CHECK_FALSE(born.flag);
    CHECK_THROWS_AS(diagnose_concentration({stats(0, 1.0, 0.5)}, h, 2, 0.25), DomainError);
}

TEST_CASE("iterate statistics") {
    const Grid g = Grid::centered({0.0, 0.0}, 2.0, 81);
    std::vector<double> u(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.point(i);
        if (std::hypot(x[0], x[1]) < 1.0) u[i] = 3.0;
    }
    const IterateStats s = iterate_stats(u, g);
    CHECK(s.max_abs == 3.0);
    CHECK(s.support_radius == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("projected descent on a coarse grid") {
    const FracParams p(2, 0.25);
    const DomainSpec d = small_domain();
    SolveOptions o;
    o.tol = 1e-3;
    o.max_iter = 400;
    o.start_eps = 0.4;
    o.start_samples = 16;
    const SolveResult r = solve_critical_point(d, p, o);
    REQUIRE(r.history.size() >= 2);
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i].energy <= r.history[i - 1].energy + 1e-12);
    CHECK(r.positivity_min >= 0.0);
    CHECK(std::abs(r.nehari_residual) < 1e-8);
    CHECK(r.energy > 0.0);
    REQUIRE(r.gradient_checks.size() >= 2);
    for (const auto& c : r.gradient_checks) CHECK(c.max_rel_error < 1e-5);
    CHECK(r.start_point.size() == 2);
    // Nodes outside Ω stay zero.
    const DomainMask m = build_domain_mask(d, r.solution.grid);
    for (std::size_t i = 0; i < m.grid.size(); ++i)
        if (!m.interior[i]) CHECK(r.solution.values[i] == 0.0);

    if (r.converged) {
        const SolveResult again = solve_from(r.solution, d, p, o);
        CHECK(again.iterations == 0);
        CHECK(again.energy == doctest::Approx(r.energy).epsilon(1e-10));
    }
}
