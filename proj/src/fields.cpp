#include "fracbubble/fields.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <fftw3.h>
#include <spdlog/spdlog.h>

#include "fracbubble/error.hpp"
#include "fracbubble/parallel.hpp"

namespace fb {

namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& planner_mutex() {
    static std::mutex mu;
    return mu;
}

// ∫₀^φ cos^m(t) dt for 0 ≤ φ < π/2.
double cos_power_integral(double m, double phi) {
    if (phi <= 0.0) return 0.0;
    const double b = (m + 1.0) / 2.0;
    const double x = std::sin(phi) * std::sin(phi);
    return 0.5 * boost::math::beta(0.5, b) * boost::math::ibeta(0.5, b, x);
}

// Solid-angle weight of one quadrant of a face in 3D, in units where the face
// sits at distance 1: ∫₀^{atan(a/D)} cos^{2s}φ · G_{1+2s}(atan(b cosφ / D)) dφ.
double face_quadrant_3d(double s, double D, double a, double b) {
    const double top = std::atan(a / D);
    return boost::math::quadrature::gauss<double, 20>::integrate(
        [&](double phi) {
            return std::pow(std::cos(phi), 2.0 * s) * cos_power_integral(1.0 + 2.0 * s, std::atan(b * std::cos(phi) / D));
        },
        0.0, top);
}

}  // namespace

double box_exterior_integral(int N, double s, const double* lo, const double* hi) {
    const double inv2s = 1.0 / (2.0 * s);
    if (N == 1) return (std::pow(lo[0], -2.0 * s) + std::pow(hi[0], -2.0 * s)) * inv2s;
    double total = 0.0;
    if (N == 2) {
        for (int a = 0; a < 2; ++a) {
            const int b = 1 - a;
            for (double D : {lo[a], hi[a]})
                total += std::pow(D, -2.0 * s) * (cos_power_integral(2.0 * s, std::atan(lo[b] / D)) +
                                                  cos_power_integral(2.0 * s, std::atan(hi[b] / D)));
        }
        return total * inv2s;
    }
    if (N == 3) {
        for (int a = 0; a < 3; ++a) {
            const int b = (a + 1) % 3, c = (a + 2) % 3;
            for (double D : {lo[a], hi[a]}) {
                double q = 0.0;
                for (double p1 : {lo[b], hi[b]})
                    for (double p2 : {lo[c], hi[c]}) q += face_quadrant_3d(s, D, p1, p2);
                total += std::pow(D, -2.0 * s) * q;
            }
        }
        return total * inv2s;
    }
    throw DomainError("N", "box_exterior_integral supports N <= 3");
}

struct FracOperator::FftState {
    std::vector<int> padded;
    std::size_t real_size = 0;
    std::size_t complex_size = 0;
    double* rbuf = nullptr;
    fftw_complex* cbuf = nullptr;
    std::vector<std::complex<double>> kernel_hat;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    ~FftState() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (rbuf) fftw_free(rbuf);
        if (cbuf) fftw_free(cbuf);
    }
};

FracOperator::FracOperator(const Grid& grid, const FracParams& params, OperatorOptions opts)
    : grid_(grid), params_(params) {
    grid_.validate();
    if (grid_.dim != params_.N) throw DomainError("grid.dim", "must equal N");
    const int N = params_.N;
    const double s = params_.s;
    const double h = grid_.h;
    const std::size_t M = grid_.size();

    use_fft_ = opts.path == ConvolutionPath::fft ||
               (opts.path == ConvolutionPath::automatic && M > opts.fft_threshold);
    kappa_ = -lattice_zeta(N, N + 2.0 * s - 2.0);

    // h^N K(offset·h) = h^{-2s} |offset|^{-N-2s}, zero at the origin.
    auto kval = [&](int d0, int d1, int d2) {
        const double r2 = double(d0) * d0 + double(d1) * d1 + double(d2) * d2;
        if (r2 == 0.0) return 0.0;
        return std::pow(h, -2.0 * s) * std::pow(r2, -(N + 2.0 * s) / 2.0);
    };

    if (use_fft_) {
        fft_ = std::make_unique<FftState>();
        auto& F = *fft_;
        F.real_size = 1;
        for (int a = 0; a < N; ++a) {
            F.padded.push_back(2 * grid_.extents[a]);
            F.real_size *= static_cast<std::size_t>(F.padded.back());
        }
        F.complex_size = F.real_size / F.padded.back() * (F.padded.back() / 2 + 1);
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            F.rbuf = fftw_alloc_real(F.real_size);
            F.cbuf = fftw_alloc_complex(F.complex_size);
            F.forward = fftw_plan_dft_r2c(N, F.padded.data(), F.rbuf, F.cbuf, FFTW_ESTIMATE);
            F.backward = fftw_plan_dft_c2r(N, F.padded.data(), F.cbuf, F.rbuf, FFTW_ESTIMATE);
        }
        std::vector<int> P(3, 1);
        for (int a = 0; a < N; ++a) P[a] = F.padded[a];
        for (int i0 = 0; i0 < P[0]; ++i0) {
            const int d0 = i0 < P[0] / 2 ? i0 : i0 - P[0];
            for (int i1 = 0; i1 < P[1]; ++i1) {
                const int d1 = N > 1 ? (i1 < P[1] / 2 ? i1 : i1 - P[1]) : 0;
                for (int i2 = 0; i2 < P[2]; ++i2) {
                    const int d2 = N > 2 ? (i2 < P[2] / 2 ? i2 : i2 - P[2]) : 0;
                    F.rbuf[(std::size_t(i0) * P[1] + i1) * P[2] + i2] = kval(d0, d1, d2);
                }
            }
        }
        fftw_execute(F.forward);
        F.kernel_hat.resize(F.complex_size);
        const double scale = 1.0 / static_cast<double>(F.real_size);
        for (std::size_t k = 0; k < F.complex_size; ++k)
            F.kernel_hat[k] = std::complex<double>(F.cbuf[k][0], F.cbuf[k][1]) * scale;
    } else {
        ktable_.resize(M);
        for (std::size_t f = 0; f < M; ++f) {
            const auto d = grid_.multi(f);
            ktable_[f] = kval(d[0], d[1], d[2]);
        }
    }

    // Exterior tail against the box [origin - h/2, origin + (n - 1/2) h].
    tail_.assign(M, 0.0);
    if (N <= 2) {
        parallel_for(M, [&](std::size_t f) {
            const auto idx = grid_.multi(f);
            double lo[3], hi[3];
            for (int a = 0; a < N; ++a) {
                lo[a] = (idx[a] + 0.5) * h;
                hi[a] = (grid_.extents[a] - idx[a] - 0.5) * h;
            }
            tail_[f] = box_exterior_integral(N, s, lo, hi);
        });
    } else {
        // Face quadrants depend only on half-integer index triples; tabulate once.
        const int nmax = *std::max_element(grid_.extents.begin(), grid_.extents.end());
        const std::size_t n3 = static_cast<std::size_t>(nmax);
        std::vector<double> quad(n3 * n3 * n3, 0.0);
        parallel_for(n3 * n3, [&](std::size_t ab) {
            const std::size_t iD = ab / n3, ia = ab % n3;
            for (std::size_t ib = 0; ib < n3; ++ib)
                quad[(iD * n3 + ia) * n3 + ib] = face_quadrant_3d(s, iD + 0.5, ia + 0.5, ib + 0.5);
        });
        parallel_for(M, [&](std::size_t f) {
            const auto idx = grid_.multi(f);
            int lo[3], hi[3];
            for (int a = 0; a < 3; ++a) {
                lo[a] = idx[a];
                hi[a] = grid_.extents[a] - idx[a] - 1;
            }
            double total = 0.0;
            for (int a = 0; a < 3; ++a) {
                const int b = (a + 1) % 3, c = (a + 2) % 3;
                for (int D : {lo[a], hi[a]}) {
                    double q = 0.0;
                    for (int p1 : {lo[b], hi[b]})
                        for (int p2 : {lo[c], hi[c]}) q += quad[(std::size_t(D) * n3 + p1) * n3 + p2];
                    total += std::pow((D + 0.5) * h, -2.0 * s) * q;
                }
            }
            tail_[f] = total / (2.0 * s);
        });
    }

    std::vector<double> ones(M, 1.0);
    convolve(ones, diag_);
    for (std::size_t f = 0; f < M; ++f) diag_[f] += tail_[f];
}

FracOperator::~FracOperator() = default;

void FracOperator::convolve(const std::vector<double>& u, std::vector<double>& out) const {
    if (use_fft_)
        convolve_fft(u, out);
    else
        convolve_dense(u, out);
}

void FracOperator::convolve_dense(const std::vector<double>& u, std::vector<double>& out) const {
    const std::size_t M = grid_.size();
    out.assign(M, 0.0);
    const int N = grid_.dim;
    parallel_for(M, [&](std::size_t i) {
        const auto xi = grid_.multi(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            if (u[j] == 0.0) continue;
            const auto xj = grid_.multi(j);
            std::array<int, 3> d{0, 0, 0};
            for (int a = 0; a < N; ++a) d[a] = std::abs(xi[a] - xj[a]);
            acc += ktable_[grid_.flat(d)] * u[j];
        }
        out[i] = acc;
    });
}

void FracOperator::convolve_fft(const std::vector<double>& u, std::vector<double>& out) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto& F = *fft_;
    const int N = grid_.dim;
    std::vector<int> n(3, 1), P(3, 1);
    for (int a = 0; a < N; ++a) {
        n[a] = grid_.extents[a];
        P[a] = F.padded[a];
    }
    std::fill(F.rbuf, F.rbuf + F.real_size, 0.0);
    for (int i0 = 0; i0 < n[0]; ++i0)
        for (int i1 = 0; i1 < n[1]; ++i1)
            for (int i2 = 0; i2 < n[2]; ++i2)
                F.rbuf[(std::size_t(i0) * P[1] + i1) * P[2] + i2] = u[(std::size_t(i0) * n[1] + i1) * n[2] + i2];
    fftw_execute(F.forward);
    for (std::size_t k = 0; k < F.complex_size; ++k) {
        const std::complex<double> v = std::complex<double>(F.cbuf[k][0], F.cbuf[k][1]) * F.kernel_hat[k];
        F.cbuf[k][0] = v.real();
        F.cbuf[k][1] = v.imag();
    }
    fftw_execute(F.backward);
    out.assign(u.size(), 0.0);
    for (int i0 = 0; i0 < n[0]; ++i0)
        for (int i1 = 0; i1 < n[1]; ++i1)
            for (int i2 = 0; i2 < n[2]; ++i2)
                out[(std::size_t(i0) * n[1] + i1) * n[2] + i2] = F.rbuf[(std::size_t(i0) * P[1] + i1) * P[2] + i2];
}

void FracOperator::apply_split(const std::vector<double>& u, std::vector<double>& offsite,
                               std::vector<double>& local) const {
    if (u.size() != grid_.size()) throw DomainError("u", "size does not match operator grid");
    const int N = grid_.dim;
    const double C = params_.c_kernel;
    const double h = grid_.h;
    const std::size_t M = u.size();
    std::vector<double> conv;
    convolve(u, conv);
    offsite.resize(M);
    local.resize(M);
    const double lap_coef = C * std::pow(h, 2.0 - 2.0 * params_.s) * kappa_ / (2.0 * N) / (h * h);
    for (std::size_t f = 0; f < M; ++f) offsite[f] = C * (diag_[f] * u[f] - conv[f]);
    for (std::size_t f = 0; f < M; ++f) {
        const auto idx = grid_.multi(f);
        double lap = 0.0;
        for (int a = 0; a < N; ++a) {
            const std::size_t st = grid_.stride(a);
            const double up = idx[a] + 1 < grid_.extents[a] ? u[f + st] : 0.0;
            const double dn = idx[a] > 0 ? u[f - st] : 0.0;
            lap += 2.0 * u[f] - up - dn;
        }
        local[f] = lap_coef * lap;
    }
}

std::vector<double> FracOperator::apply(const std::vector<double>& u) const {
    std::vector<double> off, loc;
    apply_split(u, off, loc);
    for (std::size_t f = 0; f < off.size(); ++f) off[f] += loc[f];
    return off;
}

double FracOperator::inner(const std::vector<double>& u, const std::vector<double>& v) const {
    double acc = 0.0;
    for (std::size_t f = 0; f < u.size(); ++f) acc += u[f] * v[f];
    return acc * std::pow(grid_.h, grid_.dim);
}

double FracOperator::seminorm_sq(const std::vector<double>& u) const { return inner(u, apply(u)); }

namespace {

double seminorm_fourier(const Field& u, const FracParams& params) {
    const Grid& g = u.grid;
    const int N = g.dim;
    const double s = params.s;
    std::vector<int> n(3, 1), P(3, 1);
    std::size_t real_size = 1;
    for (int a = 0; a < N; ++a) {
        n[a] = g.extents[a];
        P[a] = 2 * n[a];
        real_size *= P[a];
    }
    const int Pl = P[N - 1];
    const std::size_t complex_size = real_size / Pl * (Pl / 2 + 1);
    double* rbuf;
    fftw_complex* cbuf;
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        rbuf = fftw_alloc_real(real_size);
        cbuf = fftw_alloc_complex(complex_size);
        std::vector<int> dims(P.begin(), P.begin() + N);
        plan = fftw_plan_dft_r2c(N, dims.data(), rbuf, cbuf, FFTW_ESTIMATE);
    }
    std::fill(rbuf, rbuf + real_size, 0.0);
    for (int i0 = 0; i0 < n[0]; ++i0)
        for (int i1 = 0; i1 < n[1]; ++i1)
            for (int i2 = 0; i2 < n[2]; ++i2)
                rbuf[(std::size_t(i0) * P[1] + i1) * P[2] + i2] = u.values[(std::size_t(i0) * n[1] + i1) * n[2] + i2];
    fftw_execute(plan);

    const double norm = std::pow(g.h, N) / std::pow(2.0 * kPi, N / 2.0);
    std::vector<double> dxi(3, 0.0);
    for (int a = 0; a < N; ++a) dxi[a] = 2.0 * kPi / (P[a] * g.h);
    const double cell = std::pow(dxi[0], N);  // isotropic spacing
    const int half = Pl / 2 + 1;
    double acc = 0.0;
    for (std::size_t k = 0; k < complex_size; ++k) {
        std::size_t rest = k;
        const int kl = static_cast<int>(rest % half);
        rest /= half;
        double xi2 = 0.0;
        int idx[3] = {0, 0, 0};
        idx[N - 1] = kl;
        for (int a = N - 2; a >= 0; --a) {
            idx[a] = static_cast<int>(rest % P[a]);
            rest /= P[a];
        }
        for (int a = 0; a < N; ++a) {
            const int m = idx[a] <= P[a] / 2 ? idx[a] : idx[a] - P[a];
            xi2 += (m * dxi[a]) * (m * dxi[a]);
        }
        const double weight = (kl == 0 || kl == Pl / 2) ? 1.0 : 2.0;
        const double amp2 = (cbuf[k][0] * cbuf[k][0] + cbuf[k][1] * cbuf[k][1]) * norm * norm;
        acc += weight * std::pow(xi2, s) * amp2;
    }
    const double u0 = cbuf[0][0] * norm;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
        fftw_free(rbuf);
        fftw_free(cbuf);
    }
    return acc * cell - std::pow(dxi[0], N + 2.0 * s) * lattice_zeta(N, -2.0 * s) * u0 * u0;
}

}  // namespace

double gagliardo_seminorm_sq(const Field& u, const FracParams& params, SeminormMode mode, double max_boundary_ratio,
                             OperatorOptions opts) {
    u.grid.validate();
    u.check_finite();
    if (u.grid.dim != params.N) throw DomainError("u.grid.dim", "must equal N");
    const double ratio = boundary_layer_ratio(u);
    if (ratio > max_boundary_ratio)
        throw DomainError("u", "boundary layer max|u| is " + std::to_string(ratio) +
                                   " of max|u|; enlarge the grid box");
    if (mode == SeminormMode::fourier) return seminorm_fourier(u, params);
    FracOperator op(u.grid, params, opts);
    return op.seminorm_sq(u.values);
}

double lp_integral(const Field& u, double p) {
    if (!(p >= 1.0)) throw DomainError("p", "exponent must be >= 1");
    double acc = 0.0;
    for (double v : u.values) acc += std::pow(std::abs(v), p);
    return acc * std::pow(u.grid.h, u.grid.dim);
}

double lp_norm(const Field& u, double p) { return std::pow(lp_integral(u, p), 1.0 / p); }

FracLaplacianResult apply_frac_laplacian_report(const Field& u, const FracParams& params, OperatorOptions opts) {
    u.check_finite();
    FracOperator op(u.grid, params, opts);
    std::vector<double> off, loc;
    op.apply_split(u.values, off, loc);
    const double top = u.max_abs();
    std::size_t significant = 0, flagged = 0;
    FracLaplacianResult res;
    res.value = Field(u.grid);
    for (std::size_t f = 0; f < u.size(); ++f) {
        res.value.values[f] = off[f] + loc[f];
        if (top > 0.0 && std::abs(u.values[f]) >= 1e-3 * top) {
            ++significant;
            if (std::abs(loc[f]) > 0.1 * std::abs(off[f])) ++flagged;
        }
    }
    res.coarse_fraction = significant ? double(flagged) / double(significant) : 0.0;
    res.too_coarse = res.coarse_fraction > 0.01;
    if (res.too_coarse)
        spdlog::warn("apply_frac_laplacian: local correction dominates at {:.1f}% of sites; grid too coarse",
                     100.0 * res.coarse_fraction);
    return res;
}

Field apply_frac_laplacian(const Field& u, const FracParams& params, OperatorOptions opts) {
    return apply_frac_laplacian_report(u, params, opts).value;
}

}  // namespace fb
