#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fracbubble/bubbles.hpp"
#include "fracbubble/error.hpp"

using namespace fb;

namespace {

constexpr double kPi = std::numbers::pi;

// ∫(1+|x|²)^{-N} dx, the L^{2*} mass of the unit profile.
double profile_mass(int N) { return std::pow(kPi, N / 2.0) * std::tgamma(N / 2.0) / std::tgamma(double(N)); }

// Extremal profile: [φ]² = S‖φ‖²_{2*}, so d^{2*}‖φ‖^{2*} = (N/s)c∞ fixes d.
double d_oracle(const FracParams& p) { return std::pow(p.bubble_energy() / profile_mass(p.N), 1.0 / p.two_star); }

}  // namespace

TEST_CASE("smooth step and smooth clamp") {
    CHECK(smooth_step(-0.5) == 0.0);
    CHECK(smooth_step(0.0) == 0.0);
    CHECK(smooth_step(1.0) == 1.0);
    CHECK(smooth_step(3.0) == 1.0);
    double prev = 0.0;
    for (int k = 0; k <= 200; ++k) {
        const double t = k / 200.0;
        CHECK(smooth_step(t) + smooth_step(1.0 - t) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(smooth_step(t) >= prev);
        prev = smooth_step(t);
    }
    const double w = 0.1;
    CHECK(smooth_clamp(-1.0, w) == 0.0);
    CHECK(smooth_clamp(2.0, w) == 1.0);
    CHECK(smooth_clamp(0.5, w) == doctest::Approx(0.5));
    const double slope = (smooth_clamp(0.6, w) - smooth_clamp(0.4, w)) / 0.2;
    CHECK(slope == doctest::Approx(1.0 / (1.0 - w)).epsilon(1e-12));
}

TEST_CASE("cut-off profiles take their plateau values") {
    CutoffSpec psi{CutoffKind::psi_bump};
    psi.rho = 0.3;
    CHECK(cutoff_profile(psi, {0.29, 0.0}) == 1.0);
    CHECK(cutoff_profile(psi, {0.0, 0.61}) == 0.0);
    const double mid = cutoff_profile(psi, {0.45, 0.0});
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);

    CutoffSpec om{CutoffKind::omega_delta};
    om.delta = 0.01;
    CHECK(cutoff_profile(om, {0.009, 5.0}) == 0.0);
    CHECK(cutoff_profile(om, {-0.021, -5.0}) == 1.0);
    CHECK(cutoff_profile(om, {0.015, 0.0}) == doctest::Approx(0.5));

    CutoffSpec ot{CutoffKind::omega_transition};
    CHECK(cutoff_profile(ot, {0.0, 0.5, 0.0}) == 0.0);
    CHECK(cutoff_profile(ot, {1.5, 1.5, 0.0}) == 1.0);
}

TEST_CASE("eta_theta is one inside, zero past R_theta and logarithmic between") {
    const double theta = 1e-3;
    CHECK(eta_theta_radial(0.5, theta) == 1.0);
    CHECK(eta_theta_radial(1.0, theta) == 1.0);
    CHECK(eta_theta_radial(1.0 / theta, theta) == 0.0);
    CHECK(eta_theta_radial(1e6, theta) == 0.0);
    // Geometric midpoint of [1, R_θ] is the centre of the log ramp.
    CHECK(eta_theta_radial(std::sqrt(1.0 / theta), theta) == doctest::Approx(0.5).epsilon(1e-12));
    const double a = eta_theta_radial(10.0, theta), b = eta_theta_radial(100.0, theta);
    CHECK(a - b == doctest::Approx(1.0 / (3.0 * (1.0 - 0.1))).epsilon(1e-12));

    CutoffSpec ol{CutoffKind::omega_theta_lambda};
    ol.theta = theta;
    ol.lambda = 0.01;
    for (double x : {0.001, 0.05, 1.0, 30.0})
        CHECK(cutoff_profile(ol, {x, 0.0}) == doctest::Approx(1.0 - eta_theta_radial(x / ol.lambda, theta)));
}

TEST_CASE("cut-off kind names round trip") {
    for (auto k : {CutoffKind::psi_bump, CutoffKind::omega_transition, CutoffKind::omega_delta, CutoffKind::eta_theta,
                   CutoffKind::omega_theta_lambda})
        CHECK(cutoff_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(cutoff_kind_from_string("bump"), DomainError);
}

TEST_CASE("cut-off and bubble validation") {
    CutoffSpec bad{CutoffKind::psi_bump};
    bad.rho = -1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CutoffSpec th{CutoffKind::eta_theta};
    th.theta = 1.5;
    CHECK_THROWS_AS(th.validate(), DomainError);
    BubbleSpec b{0.0, {0.0, 0.0}};
    CHECK_THROWS_AS(b.validate(2), DomainError);
    BubbleSpec wrong_dim{1.0, {0.0}};
    CHECK_THROWS_AS(wrong_dim.validate(2), DomainError);
}

TEST_CASE("Talenti bubble values") {
    const FracParams p(2, 0.25);
    const BubbleSpec b{0.2, {0.1, -0.3}, 1.7};
    const Grid g = Grid::centered({0.1, -0.3}, 1.0, 81);
    const Field u = talenti(b, g, p);
    const double peak = 1.7 * std::pow(1.0 / 0.2, (2 - 0.5) / 2.0);
    CHECK(u.max_abs() == doctest::Approx(peak).epsilon(1e-12));
    for (std::size_t i = 0; i < g.size(); i += 37) {
        const auto x = g.point(i);
        const double r2 = std::pow(x[0] - 0.1, 2) + std::pow(x[1] + 0.3, 2);
        CHECK(u.values[i] == doctest::Approx(1.7 * std::pow(0.2 / (0.04 + r2), 0.75)).epsilon(1e-13));
    }
}

TEST_CASE("truncated bubble vanishes on the slit and matches the product formula") {
    const FracParams p(2, 0.25);
    const BubbleSpec b{0.2, {0.0, 0.5}, 1.0};
    const double rho = 0.2, delta = 0.05;
    const Grid g = Grid::centered({0.0, 0.5}, 0.5, 81);
    const Field u = truncated_bubble(b, rho, delta, g, p);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.point(i);
        const double r = std::hypot(x[0], x[1] - 0.5);
        if (std::abs(x[0]) <= delta || r >= 2 * rho) CHECK(u.values[i] == 0.0);
        if (std::abs(x[0]) >= 2 * delta && r <= rho)
            CHECK(u.values[i] == doctest::Approx(b.value(x.data(), 2, 0.25)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(truncated_bubble(b, rho, 0.3, g, p), DomainError);
    CHECK_THROWS_AS(truncated_bubble(b, rho, 0.01, g, p), DomainError);
}

TEST_CASE("normalization d agrees with the extremal identity") {
    for (auto [N, s] : {std::pair{2, 0.25}, std::pair{2, 0.5}}) {
        const FracParams p(N, s);
        const NormalizationResult r = normalization_d_detail(p);
        const double ref = d_oracle(p);
        CAPTURE(s);
        CHECK(std::abs(r.d - ref) / ref < 1e-2);
        CHECK(r.rel_uncertainty < 1e-2);
        CHECK(r.profile.mass == doctest::Approx(profile_mass(N)).epsilon(1e-3));
    }
}

TEST_CASE("default alpha") {
    CHECK(default_alpha(FracParams(2, 0.25)) == doctest::Approx(1.25 * 1.5 / 0.5));
    CHECK(default_alpha(FracParams(3, 0.5)) == doctest::Approx(1.25 * 2.0 / 1.0));
}
