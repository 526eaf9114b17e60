#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fracbubble/error.hpp"
#include "fracbubble/fraccore.hpp"

using namespace fb;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed form of the singular-kernel normalization from the Fourier symbol.
double c_closed_form(int N, double s) {
    return std::pow(2.0, 2.0 * s) * s * std::tgamma((N + 2.0 * s) / 2.0) /
           (std::pow(kPi, N / 2.0) * std::tgamma(1.0 - s));
}

// Dirichlet beta β(x) = Σ (-1)^k (2k+1)^{-x}, by pairing terms.
double dirichlet_beta(double x) {
    double acc = 0.0;
    for (int k = 0; k < 2000000; k += 2) acc += std::pow(2.0 * k + 1.0, -x) - std::pow(2.0 * k + 3.0, -x);
    return acc;
}

}  // namespace

TEST_CASE("critical exponent") {
    CHECK(critical_exponent(2, 0.5) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(critical_exponent(3, 0.5) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(critical_exponent(2, 0.25) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(critical_exponent(1, 0.5), DomainError);
}

TEST_CASE("sharp constant and least energy in the half-Laplacian plane case") {
    const FracParams p(2, 0.5);
    CHECK(std::abs(p.s_sharp - std::sqrt(kPi)) < 1e-10);
    CHECK(std::abs(p.c_inf - kPi / 4.0) < 1e-10);
    CHECK(p.bubble_energy() == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("three-dimensional half-Laplacian constants against rounded reference values") {
    const FracParams p(3, 0.5);
    CHECK(p.s_sharp == doctest::Approx(2.70246).epsilon(1e-4));
    CHECK(p.c_inf == doctest::Approx(3.2895).epsilon(2e-4));
}

TEST_CASE("least energy is (s/N) S^{N/(2s)} for every admissible pair") {
    for (int N : {1, 2, 3})
        for (double s : {0.05, 0.2, 0.25, 0.45, 0.5, 0.75, 0.95}) {
            if (N <= 2.0 * s) continue;
            const FracParams p(N, s);
            CHECK(p.c_inf == doctest::Approx(s / N * std::pow(p.s_sharp, N / (2.0 * s))).epsilon(1e-14));
            CHECK(p.two_star == doctest::Approx(2.0 * N / (N - 2.0 * s)).epsilon(1e-15));
        }
}

TEST_CASE("kernel normalization by quadrature matches the closed form") {
    for (int N : {1, 2, 3})
        for (double s : {0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) {
            const KernelConstant kc = kernel_constant_detail(N, s);
            const double ref = c_closed_form(N, s);
            CHECK(std::abs(kc.value - ref) / ref < 1e-10);
            CHECK(kc.error_estimate < 1e-8 * ref);
        }
    CHECK(std::abs(kernel_constant(1, 0.5) - 1.0 / kPi) * kPi < 1e-8);
}

TEST_CASE("FracParams validation") {
    CHECK_THROWS_AS(FracParams(2, 0.0), DomainError);
    CHECK_THROWS_AS(FracParams(2, 1.0), DomainError);
    CHECK_THROWS_AS(FracParams(2, -0.3), DomainError);
    CHECK_THROWS_AS(FracParams(0, 0.5), DomainError);
    try {
        FracParams(2, 1.5);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(e.field() == "s");
    }
    const FracParams line(1, 0.5);
    CHECK_FALSE(line.has_critical_exponent());
    CHECK(std::isnan(line.two_star));
    CHECK_THROWS_AS(line.require_critical_exponent(), DomainError);
    CHECK(line.c_kernel == doctest::Approx(1.0 / kPi).epsilon(1e-12));
}

TEST_CASE("lattice zeta: one dimension is twice the Riemann zeta") {
    CHECK(lattice_zeta(1, 2.0) == doctest::Approx(kPi * kPi / 3.0).epsilon(1e-12));
    CHECK(lattice_zeta(1, 4.0) == doctest::Approx(std::pow(kPi, 4) / 45.0).epsilon(1e-12));
    CHECK(lattice_zeta(1, 0.0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(lattice_zeta(1, -1.0) == doctest::Approx(-1.0 / 6.0).epsilon(1e-12));
    CHECK(lattice_zeta(1, 0.5) == doctest::Approx(2.0 * std::riemann_zeta(0.5)).epsilon(1e-11));
}

TEST_CASE("lattice zeta: square lattice is 4 zeta(x) beta(x) at sigma = 2x") {
    for (double x : {1.5, 2.0, 3.0}) {
        const double ref = 4.0 * std::riemann_zeta(x) * dirichlet_beta(x);
        CHECK(lattice_zeta(2, 2.0 * x) == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("lattice zeta: cubic lattice against a direct sum") {
    const double sigma = 9.0;
    const int M = 40;
    double direct = 0.0;
    for (int i = -M; i <= M; ++i)
        for (int j = -M; j <= M; ++j)
            for (int k = -M; k <= M; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                direct += std::pow(double(i * i + j * j + k * k), -sigma / 2.0);
            }
    CHECK(lattice_zeta(3, sigma) == doctest::Approx(direct).epsilon(1e-8));
    CHECK_THROWS_AS(lattice_zeta(2, 2.0), DomainError);
}

TEST_CASE("bootstrap exponents follow the recursion") {
    const FracParams p(2, 0.25);
    const auto e = bootstrap_exponents(2, 0.25, 6);
    REQUIRE(e.size() == 6);
    CHECK(e[0] == doctest::Approx(p.two_star * (p.two_star + 1.0) / 2.0));
    for (std::size_t k = 0; k + 1 < e.size(); ++k) {
        CHECK(e[k + 1] == doctest::Approx(p.gamma_sq() * (e[k] + 2.0 - p.two_star)));
        CHECK(e[k + 1] > e[k]);
    }
}

TEST_CASE("sphere areas and reciprocal gamma") {
    CHECK(sphere_area(1) == doctest::Approx(2.0));
    CHECK(sphere_area(2) == doctest::Approx(2.0 * kPi));
    CHECK(sphere_area(3) == doctest::Approx(4.0 * kPi));
    CHECK(rgamma(0.0) == 0.0);
    CHECK(rgamma(-2.0) == 0.0);
    CHECK(rgamma(5.0) == doctest::Approx(1.0 / 24.0));
}
