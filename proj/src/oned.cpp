#include "fracbubble/oned.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracbubble/error.hpp"
#include "fracbubble/parallel.hpp"

namespace fb {

namespace {

struct Nodes {
    std::vector<double> x, w;
};

// Composite 8-point Gauss-Legendre nodes on [lo, hi] with panels of width ≤ panel.
Nodes composite(double lo, double hi, double panel) {
    using GL = boost::math::quadrature::gauss<double, 8>;
    const auto& abs = GL::abscissa();
    const auto& wts = GL::weights();
    const int np = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel)));
    const double width = (hi - lo) / np;
    Nodes n;
    for (int p = 0; p < np; ++p) {
        const double mid = lo + (p + 0.5) * width;
        for (std::size_t k = 0; k < abs.size(); ++k) {
            const double off = abs[k] * width / 2.0;
            const double wk = wts[k] * width / 2.0;
            if (abs[k] == 0.0) {
                n.x.push_back(mid);
                n.w.push_back(wk);
            } else {
                n.x.push_back(mid - off);
                n.w.push_back(wk);
                n.x.push_back(mid + off);
                n.w.push_back(wk);
            }
        }
    }
    return n;
}

}  // namespace

double half_seminorm_sq_1d(const std::function<double(double)>& f, double x_lo, double x_hi,
                           const LogQuadratureOptions& opts) {
    if (!(x_lo > 0.0 && x_hi >= x_lo)) throw DomainError("x_lo", "need 0 < x_lo <= x_hi");
    const double a0 = std::log(x_lo) - opts.margin;
    const double a1 = std::log(x_hi) + opts.margin;
    const Nodes A = composite(a0, a1, opts.panel);
    // Even panel count about 0 keeps t = 0 off the node set.
    const Nodes T = composite(-opts.margin, opts.margin, opts.panel);

    std::vector<double> gp(A.x.size()), gm(A.x.size());
    for (std::size_t i = 0; i < A.x.size(); ++i) {
        gp[i] = f(std::exp(A.x[i]));
        gm[i] = f(-std::exp(A.x[i]));
    }
    std::vector<double> partial(A.x.size(), 0.0);
    parallel_for(A.x.size(), [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < T.x.size(); ++j) {
            const double t = T.x[j];
            const double b = A.x[i] - t;
            const double e = std::exp(b);
            const double dp = gp[i] - f(e);
            const double dm = gm[i] - f(-e);
            const double dx = gp[i] - f(-e);
            const double sh = 2.0 * std::sinh(t / 2.0);
            const double ch = 2.0 * std::cosh(t / 2.0);
            acc += T.w[j] * ((dp * dp + dm * dm) / (sh * sh) + 2.0 * dx * dx / (ch * ch));
        }
        partial[i] = A.w[i] * acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    const double c1 = 1.0 / std::numbers::pi;  // C(1,1/2)
    return 0.5 * c1 * total;
}

double integrate_1d(const std::function<double(double)>& g, double a, double b, int panels) {
    double acc = 0.0;
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
        acc += boost::math::quadrature::gauss<double, 20>::integrate(g, a + p * w, a + (p + 1) * w);
    return acc;
}

double kernel_energy_1d(const std::function<double(double)>& f, double s, double a, double b, double outside) {
    if (!(b > a)) throw DomainError("b", "need b > a");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("s", "order must lie in (0,1)");
    const double len = b - a;
    // F(t) = ∫ (f(x) - f(x+t))² dx; for t ≥ len the two copies are disjoint.
    auto F = [&](double t) {
        return integrate_1d(
            [&](double x) {
                const double d = f(x) - f(x + t);
                return d * d;
            },
            a - t, b, 32);
    };
    const double f_inf = 2.0 * integrate_1d(
                                   [&](double x) {
                                       const double d = f(x) - outside;
                                       return d * d;
                                   },
                                   a, b, 32);
    boost::math::quadrature::tanh_sinh<double> ts;
    const double near = ts.integrate([&](double t) { return t > 1e-9 ? F(t) * std::pow(t, -1.0 - 2.0 * s) : 0.0; }, 0.0, len, 1e-10);
    const double tail = f_inf * std::pow(len, -2.0 * s) / (2.0 * s);
    return 2.0 * (near + tail);
}

double kernel_energy_radial_2d(const std::function<double(double)>& f, double s, double r_max, double outside) {
    if (!(r_max > 0.0)) throw DomainError("r_max", "must be positive");
    // By rotation invariance the inner integral depends on |y| only:
    // 2π ∫₀^∞ r^{-1-2s} F(r) dr, F(r) = ∫_{R²} (f(|a|) - f(|a + r e₁|))² da.
    auto F = [&](double r) {
        return integrate_1d(
            [&](double a1) {
                return integrate_1d(
                    [&](double a2) {
                        const double d = f(std::hypot(a1, a2)) - f(std::hypot(a1 + r, a2));
                        return d * d;
                    },
                    -r_max, r_max, 8);
            },
            -r_max - r, r_max, 8);
    };
    const double f_inf = 2.0 * 2.0 * std::numbers::pi * integrate_1d(
                                                            [&](double rr) {
                                                                const double d = f(rr) - outside;
                                                                return rr * d * d;
                                                            },
                                                            0.0, r_max, 16);
    const double span = 2.0 * r_max;
    boost::math::quadrature::tanh_sinh<double> ts;
    const double near =
        ts.integrate([&](double r) { return r > 1e-9 ? F(r) * std::pow(r, -1.0 - 2.0 * s) : 0.0; }, 0.0, span, 1e-8);
    const double tail = f_inf * std::pow(span, -2.0 * s) / (2.0 * s);
    return 2.0 * std::numbers::pi * (near + tail);
}

}  // namespace fb
