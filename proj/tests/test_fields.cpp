#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "fracbubble/error.hpp"
#include "fracbubble/fields.hpp"

using namespace fb;

namespace {

constexpr double kPi = std::numbers::pi;

Field gaussian(const Grid& g, double scale = 1.0) {
    Field u(g);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto p = g.point(i);
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) r2 += p[a] * p[a];
        u.values[i] = std::exp(-r2 / (2.0 * scale * scale));
    }
    return u;
}

// ∫|ξ|^{2s} e^{-|ξ|²} dξ: the seminorm of e^{-|x|²/2}, whose unitary transform is e^{-|ξ|²/2}.
double gaussian_seminorm(int N, double s) { return sphere_area(N) * std::tgamma((N + 2.0 * s) / 2.0) / 2.0; }

// (-Δ)^s e^{-|x|²/2} = 2^s Γ(N/2+s)/Γ(N/2) · M(N/2+s, N/2, -|x|²/2), Kummer series.
double gaussian_frac_laplacian(int N, double s, double r) {
    const double a = N / 2.0 + s, b = N / 2.0, z = -r * r / 2.0;
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 400; ++k) {
        term *= (a + k) / (b + k) * z / (k + 1.0);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum) && k > 5) break;
    }
    return std::pow(2.0, s) * std::tgamma(a) / std::tgamma(b) * sum;
}

Field random_field(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field u(g);
    for (double& v : u.values) v = dist(rng);
    return u;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace

TEST_CASE("grid construction and indexing") {
    const Grid g = Grid::centered({0.0, 1.0}, 2.0, 9);
    CHECK(g.h == doctest::Approx(0.5));
    CHECK(g.size() == 81);
    const auto p = g.point(g.flat({8, 0, 0}));
    CHECK(p[0] == doctest::Approx(2.0));
    CHECK(p[1] == doctest::Approx(-1.0));
    CHECK(g.stride(1) == 1);
    CHECK(g.stride(0) == 9);
    for (std::size_t i = 0; i < g.size(); i += 7) CHECK(g.flat(g.multi(i)) == i);
    const Grid c = Grid::covering({0.0, 0.0, 0.0}, 1.0, 0.3);
    CHECK(c.h <= 0.3);
    CHECK(c.origin[0] <= -1.0 + 1e-12);
}

TEST_CASE("Gaussian seminorm matches the Fourier closed form in both modes") {
    for (auto [N, s] : {std::pair{2, 0.25}, std::pair{2, 0.5}, std::pair{2, 0.75}}) {
        const FracParams p(N, s);
        const Grid g = Grid::centered({0.0, 0.0}, 9.0, 181);
        const Field u = gaussian(g);
        const double ref = gaussian_seminorm(N, s);
        const double kern = gagliardo_seminorm_sq(u, p, SeminormMode::kernel);
        const double four = gagliardo_seminorm_sq(u, p, SeminormMode::fourier);
        CAPTURE(s);
        CHECK(std::abs(kern - ref) / ref < 2e-3);
        CHECK(std::abs(four - ref) / ref < 1e-5);
    }
}

TEST_CASE("Gaussian seminorm in three dimensions") {
    const FracParams p(3, 0.5);
    const Grid g = Grid::centered({0.0, 0.0, 0.0}, 7.0, 57);
    const Field u = gaussian(g);
    const double ref = gaussian_seminorm(3, 0.5);
    CHECK(std::abs(gagliardo_seminorm_sq(u, p, SeminormMode::kernel) - ref) / ref < 1e-2);
    CHECK(std::abs(gagliardo_seminorm_sq(u, p, SeminormMode::fourier) - ref) / ref < 1e-4);
}

TEST_CASE("pointwise fractional Laplacian of a Gaussian") {
    for (double s : {0.25, 0.5}) {
        const FracParams p(2, s);
        const Grid g = Grid::centered({0.0, 0.0}, 10.0, 201);
        const Field u = gaussian(g);
        const Field Lu = apply_frac_laplacian(u, p);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto x = g.point(i);
            const double r = std::hypot(x[0], x[1]);
            if (r > 3.0) continue;
            worst = std::max(worst, std::abs(Lu.values[i] - gaussian_frac_laplacian(2, s, r)));
        }
        CAPTURE(s);
        CHECK(worst / gaussian_frac_laplacian(2, s, 0.0) < 5e-3);
    }
}

TEST_CASE("dense and FFT convolution agree") {
    const FracParams p(2, 0.3);
    const Grid g = Grid::centered({0.2, -0.1}, 1.0, 23);
    const Field u = random_field(g, 7);
    const FracOperator dense(g, p, {ConvolutionPath::dense});
    const FracOperator fft(g, p, {ConvolutionPath::fft});
    CHECK_FALSE(dense.uses_fft());
    CHECK(fft.uses_fft());
    const auto a = dense.apply(u.values), b = fft.apply(u.values);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(a[i]));
    }
    CHECK(diff < 1e-11 * scale);

    const FracParams p3(3, 0.4);
    const Grid g3 = Grid::centered({0.0, 0.0, 0.0}, 1.0, 9);
    const Field u3 = random_field(g3, 8);
    const auto a3 = FracOperator(g3, p3, {ConvolutionPath::dense}).apply(u3.values);
    const auto b3 = FracOperator(g3, p3, {ConvolutionPath::fft}).apply(u3.values);
    for (std::size_t i = 0; i < a3.size(); ++i) CHECK(a3[i] == doctest::Approx(b3[i]).epsilon(1e-10));
}

TEST_CASE("operator is symmetric and positive") {
    for (int N : {2, 3}) {
        const FracParams p(N, 0.35);
        const Grid g = N == 2 ? Grid::centered({0.0, 0.0}, 1.0, 15) : Grid::centered({0.0, 0.0, 0.0}, 1.0, 7);
        const FracOperator op(g, p);
        for (unsigned seed = 1; seed <= 4; ++seed) {
            const Field u = random_field(g, seed), v = random_field(g, seed + 100);
            const double uv = dot(v.values, op.apply(u.values)), vu = dot(u.values, op.apply(v.values));
            CHECK(uv == doctest::Approx(vu).epsilon(1e-12));
            CHECK(op.seminorm_sq(u.values) > 0.0);
        }
    }
}

TEST_CASE("seminorm scales exactly like lambda^{N-2s}") {
    const FracParams p(2, 0.25);
    const Field u = gaussian(Grid::centered({0.0, 0.0}, 4.0, 41));
    Field v = u;
    const double lambda = 2.5;
    v.grid.h *= lambda;
    for (auto& o : v.grid.origin) o *= lambda;
    const double a = gagliardo_seminorm_sq(u, p, SeminormMode::kernel, 1.0);
    const double b = gagliardo_seminorm_sq(v, p, SeminormMode::kernel, 1.0);
    CHECK(b == doctest::Approx(std::pow(lambda, 2.0 - 0.5) * a).epsilon(1e-12));
}

TEST_CASE("seminorm rejects fields that do not decay at the grid faces") {
    const FracParams p(2, 0.25);
    const Field u = gaussian(Grid::centered({0.0, 0.0}, 2.0, 21));
    CHECK(boundary_layer_ratio(u) > 1e-3);
    CHECK_THROWS_AS(gagliardo_seminorm_sq(u, p), DomainError);
}

TEST_CASE("exterior of a box: one-dimensional closed form") {
    for (double s : {0.1, 0.5, 0.9}) {
        const double lo = 0.3, hi = 1.7;
        CHECK(box_exterior_integral(1, s, &lo, &hi) ==
              doctest::Approx((std::pow(lo, -2 * s) + std::pow(hi, -2 * s)) / (2 * s)).epsilon(1e-12));
    }
}

TEST_CASE("exterior of a box: two-dimensional ray-exit quadrature") {
    // ∫_{R²\box}|x-y|^{-2-2s}dy = ∫₀^{2π} r_exit(φ)^{-2s}/(2s) dφ.
    const double s = 0.3;
    const double lo[2] = {0.4, 1.1}, hi[2] = {2.0, 0.25};
    const int n = 400000;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double phi = 2.0 * kPi * (k + 0.5) / n;
        const double c = std::cos(phi), sn = std::sin(phi);
        double r = INFINITY;
        if (c > 0) r = std::min(r, hi[0] / c);
        if (c < 0) r = std::min(r, -lo[0] / c);
        if (sn > 0) r = std::min(r, hi[1] / sn);
        if (sn < 0) r = std::min(r, -lo[1] / sn);
        acc += std::pow(r, -2.0 * s) / (2.0 * s);
    }
    acc *= 2.0 * kPi / n;
    CHECK(box_exterior_integral(2, s, lo, hi) == doctest::Approx(acc).epsilon(1e-7));
}

TEST_CASE("norms") {
    const Grid g = Grid::centered({0.0, 0.0}, 8.0, 161);
    const Field u = gaussian(g);
    CHECK(lp_integral(u, 2.0) == doctest::Approx(kPi).epsilon(1e-10));
    CHECK(lp_norm(u, 4.0) == doctest::Approx(std::pow(kPi / 2.0, 0.25)).epsilon(1e-10));
}

TEST_CASE("binary round trip is exact") {
    const Field u = random_field(Grid::centered({0.5, 0.0, -1.0}, 1.5, 6), 3);
    const auto path = std::filesystem::temp_directory_path() / "fracbubble_roundtrip.bin";
    write_binary(u, path.string());
    const Field v = read_binary(path.string());
    std::filesystem::remove(path);
    CHECK(v.grid.same_as(u.grid));
    CHECK(v.values == u.values);
    CHECK_THROWS(read_binary((std::filesystem::temp_directory_path() / "fracbubble_missing.bin").string()));
}

TEST_CASE("linear resampling reproduces affine functions inside the hull") {
    const Grid src = Grid::centered({0.0, 0.0}, 2.0, 11);
    Field u(src);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto x = src.point(i);
        u.values[i] = 1.0 + 2.0 * x[0] - 0.5 * x[1];
    }
    const Grid dst = Grid::centered({0.1, -0.2}, 1.3, 17);
    const Field v = resample_linear(u, dst);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto x = dst.point(i);
        CHECK(v.values[i] == doctest::Approx(1.0 + 2.0 * x[0] - 0.5 * x[1]).epsilon(1e-12));
    }
    const Field far = resample_linear(u, Grid::centered({10.0, 10.0}, 1.0, 5));
    CHECK(far.max_abs() == 0.0);
}
