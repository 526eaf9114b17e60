#include "fracbubble/fraccore.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracbubble/error.hpp"

namespace fb {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dim_order(int N, double s) {
    if (N < 1) throw DomainError("N", "dimension must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("s", "order must lie in (0,1)");
}

void check_subcritical(int N, double s) {
    check_dim_order(N, s);
    if (!(N > 2.0 * s)) throw DomainError("s", "requires N > 2s");
}

// ∫₀¹ (1-cos t) t^{-1-2s} dt via the alternating Taylor series.
double radial_inner(double s) {
    double sum = 0.0;
    double fact = 1.0;  // (2k)!
    for (int k = 1; k < 40; ++k) {
        fact *= (2.0 * k - 1.0) * (2.0 * k);
        const double term = 1.0 / (fact * (2.0 * k - 2.0 * s));
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// ∫₁^∞ (1-cos t) t^{-1-2s} dt. The cosine part is Re ∫₁^∞ e^{it} t^{-1-2s} dt,
// deformed onto t = 1 + iy: Re[i e^{i} ∫₀^∞ e^{-y} (1+iy)^{-1-2s} dy].
double radial_outer(double s, double* err) {
    using cd = std::complex<double>;
    boost::math::quadrature::exp_sinh<double> integrator;
    const double p = -1.0 - 2.0 * s;
    auto piece = [&](bool imag_part) {
        double e = 0.0;
        const double v = integrator.integrate(
            [&](double y) {
                const cd w = std::exp(-y) * std::pow(cd(1.0, y), p);
                return imag_part ? w.imag() : w.real();
            },
            1e-14, &e);
        *err += e;
        return v;
    };
    const cd integral(piece(false), piece(true));
    const cd rotated = cd(0.0, 1.0) * std::exp(cd(0.0, 1.0)) * integral;
    return 1.0 / (2.0 * s) - rotated.real();
}

// ∫_{S^{N-1}} |ω₁|^{2s} dω.
double angular_factor(int N, double s, double* err) {
    if (N == 1) return 2.0;
    boost::math::quadrature::tanh_sinh<double> integrator;
    double e = 0.0;
    const double inner = integrator.integrate(
        [&](double th) { return std::pow(std::cos(th), 2.0 * s) * std::pow(std::sin(th), N - 2.0); }, 0.0,
        kPi / 2.0, 1e-14, &e);
    const double surf = sphere_area(N - 1);
    *err += surf * 2.0 * e;
    return surf * 2.0 * inner;
}

// ∫₁^∞ t^{a-1} e^{-x t} dt for x > 0.
double upper_tail(double a, double x) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate([&](double u) { return std::exp((a - 1.0) * std::log1p(u) - x * (1.0 + u)); },
                                1e-15);
}

}  // namespace

double rgamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    return 1.0 / std::tgamma(x);
}

double sphere_area(int n) {
    if (n < 1) throw DomainError("n", "sphere dimension must be >= 1");
    return 2.0 * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0);
}

double critical_exponent(int N, double s) {
    check_subcritical(N, s);
    return 2.0 * N / (N - 2.0 * s);
}

double sharp_sobolev_constant(int N, double s) {
    if (N < 1) throw DomainError("N", "dimension must be >= 1");
    if (!(s > 0.0 && s < N / 2.0)) throw DomainError("s", "requires 0 < s < N/2");
    const double log_ratio = std::lgamma((N + 2.0 * s) / 2.0) - std::lgamma((N - 2.0 * s) / 2.0);
    const double log_shape = std::lgamma(N / 2.0) - std::lgamma(static_cast<double>(N));
    return std::pow(2.0, 2.0 * s) * std::pow(kPi, s) * std::exp(log_ratio + (2.0 * s / N) * log_shape);
}

double minimal_energy(int N, double s) {
    const double S = sharp_sobolev_constant(N, s);
    return (s / N) * std::pow(S, N / (2.0 * s));
}

KernelConstant kernel_constant_detail(int N, double s) {
    check_dim_order(N, s);
    double err = 0.0;
    const double radial = radial_inner(s) + radial_outer(s, &err);
    double ang_err = 0.0;
    const double angular = angular_factor(N, s, &ang_err);
    const double integral = radial * angular;
    const double integral_err = err * angular + ang_err * radial + 1e-15 * integral;
    KernelConstant out;
    out.value = 1.0 / integral;
    out.error_estimate = integral_err / (integral * integral);
    if (out.error_estimate > 1e-8 * out.value)
        throw ComputationError("kernel_constant: achieved relative error " +
                               std::to_string(out.error_estimate / out.value) + " exceeds 1e-8");
    return out;
}

double kernel_constant(int N, double s) { return kernel_constant_detail(N, s).value; }

std::vector<double> bootstrap_exponents(int N, double s, int count) {
    if (count < 1) throw DomainError("count", "must be >= 1");
    const double ts = critical_exponent(N, s);
    const double g2 = ts / 2.0;
    std::vector<double> p(static_cast<std::size_t>(count));
    p[0] = ts * (ts + 1.0) / 2.0;
    for (int n = 1; n < count; ++n) p[n] = g2 * (p[n - 1] + 2.0 - ts);
    return p;
}

double lattice_zeta(int N, double sigma) {
    if (N < 1 || N > 3) throw DomainError("N", "lattice_zeta supports N in {1,2,3}");
    if (std::abs(sigma - N) < 1e-12) throw DomainError("sigma", "pole at sigma = N");

    static std::mutex mu;
    static std::map<std::pair<int, double>, double> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({N, sigma});
        if (it != cache.end()) return it->second;
    }

    // Multiplicity of each |j|² over the cube |j_k| ≤ M; terms beyond decay like e^{-π M²}.
    const int M = 5;
    std::map<int, int> shells;
    const int lo1 = -M, hi1 = M;
    const int lo2 = N >= 2 ? -M : 0, hi2 = N >= 2 ? M : 0;
    const int lo3 = N >= 3 ? -M : 0, hi3 = N >= 3 ? M : 0;
    for (int a = lo1; a <= hi1; ++a)
        for (int b = lo2; b <= hi2; ++b)
            for (int c = lo3; c <= hi3; ++c) {
                const int r2 = a * a + b * b + c * c;
                if (r2 > 0) ++shells[r2];
            }
    double F = 0.0;
    for (const auto& [r2, mult] : shells) {
        const double x = kPi * r2;
        F += mult * (upper_tail(sigma / 2.0, x) + upper_tail((N - sigma) / 2.0, x));
    }
    const double value =
        std::pow(kPi, sigma / 2.0) * ((F + 2.0 / (sigma - N)) * rgamma(sigma / 2.0) - rgamma(sigma / 2.0 + 1.0));
    std::lock_guard<std::mutex> lock(mu);
    cache[{N, sigma}] = value;
    return value;
}

FracParams::FracParams(int N_, double s_) : N(N_), s(s_) {
    check_dim_order(N, s);
    c_kernel = kernel_constant(N, s);
    if (!has_critical_exponent()) {
        two_star = s_sharp = c_inf = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    two_star = critical_exponent(N, s);
    s_sharp = sharp_sobolev_constant(N, s);
    c_inf = (s / N) * std::pow(s_sharp, N / (2.0 * s));
}

void FracParams::require_critical_exponent() const {
    if (!has_critical_exponent()) throw DomainError("s", "requires N > 2s");
}

}  // namespace fb
