#include "fracbubble/nehari.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "fracbubble/error.hpp"

namespace fb {

namespace {

constexpr double kPi = std::numbers::pi;

using Vec3 = std::array<double, 3>;

Vec3 normalized(const Vec3& v) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return {v[0] / n, v[1] / n, v[2] / n};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Signed solid angle of the spherical triangle (a, b, c) of unit vectors.
double solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double num = dot(a, cross(b, c));
    const double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    return 2.0 * std::atan2(num, den);
}

double winding(const std::vector<std::array<double, 2>>& dirs) {
    double total = 0.0;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        const auto& a = dirs[k];
        const auto& b = dirs[(k + 1) % dirs.size()];
        const double step = std::atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1]);
        if (std::abs(step) >= kPi / 2.0)
            throw ComputationError("sphere_map_degree: consecutive directions " + std::to_string(k) +
                                   " are >= pi/2 apart; refine the sampling");
        total += step;
    }
    return total / (2.0 * kPi);
}

}  // namespace

EnergyReport EnergyReport::from(double seminorm_sq, double mass, double two_star) {
    EnergyReport r;
    r.seminorm_sq = seminorm_sq;
    r.mass = mass;
    r.energy = seminorm_sq / 2.0 - mass / two_star;
    r.nehari_residual = seminorm_sq - mass;
    return r;
}

EnergyReport energy(const Field& u, const FracOperator& op) {
    op.params().require_critical_exponent();
    return EnergyReport::from(op.seminorm_sq(u.values), lp_integral(u, op.params().two_star), op.params().two_star);
}

EnergyReport energy(const Field& u, const FracParams& params, OperatorOptions opts) {
    FracOperator op(u.grid, params, opts);
    return energy(u, op);
}

double nehari_scale(double seminorm_sq, double mass, double two_star) {
    if (!(mass > 0.0) || !(seminorm_sq > 0.0)) throw DomainError("u", "projection needs a nonzero field");
    return std::pow(seminorm_sq / mass, 1.0 / (two_star - 2.0));
}

Field nehari_project(const Field& u, const FracOperator& op) {
    const EnergyReport r = energy(u, op);
    const double lam = nehari_scale(r.seminorm_sq, r.mass, op.params().two_star);
    Field out = u;
    for (double& v : out.values) v *= lam;
    return out;
}

Field nehari_project(const Field& u, const FracParams& params, OperatorOptions opts) {
    FracOperator op(u.grid, params, opts);
    return nehari_project(u, op);
}

std::vector<double> barycenter(const Field& u, double R3, double two_star) {
    const int N = u.grid.dim;
    std::vector<double> num(N, 0.0);
    double den = 0.0;
    for (std::size_t f = 0; f < u.size(); ++f) {
        const double w = std::pow(std::abs(u.values[f]), two_star);
        if (w == 0.0) continue;
        den += w;
        const auto x = u.grid.point(f);
        double r2 = 0.0;
        for (int a = 0; a < N; ++a) r2 += x[a] * x[a];
        if (r2 <= R3 * R3)
            for (int a = 0; a < N; ++a) num[a] += x[a] * w;
    }
    if (!(den > 0.0)) throw DomainError("u", "barycenter of the zero field");
    for (double& v : num) v /= den;
    return num;
}

Icosphere icosphere(int level) {
    if (level < 0 || level > 6) throw DomainError("level", "must lie in [0,6]");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    Icosphere ico;
    for (const Vec3& v : std::vector<Vec3>{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                                           {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                                           {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}})
        ico.vertices.push_back(normalized(v));
    ico.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            const Vec3& p = ico.vertices[a];
            const Vec3& q = ico.vertices[b];
            ico.vertices.push_back(normalized({p[0] + q[0], p[1] + q[1], p[2] + q[2]}));
            const int id = static_cast<int>(ico.vertices.size()) - 1;
            mid[key] = id;
            return id;
        };
        std::vector<std::array<int, 3>> next;
        for (const auto& f : ico.faces) {
            const int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        ico.faces = std::move(next);
    }
    return ico;
}

int sphere_map_degree(const std::vector<SphereSample>& samples) {
    if (samples.empty()) throw DomainError("samples", "empty sample list");
    const std::size_t N = samples.front().point.size();
    for (const auto& s : samples) {
        if (s.point.size() != N || s.image.size() != N) throw DomainError("samples", "inconsistent dimensions");
        double n2 = 0.0;
        for (double v : s.image) n2 += v * v;
        if (!(n2 > 0.0)) throw ComputationError("sphere_map_degree: zero image vector");
    }
    if (N == 2) {
        if (samples.size() < 3) throw DomainError("samples", "need at least 3 samples on S^1");
        std::vector<std::array<double, 2>> pts, imgs;
        for (const auto& s : samples) {
            pts.push_back({s.point[0], s.point[1]});
            imgs.push_back({s.image[0], s.image[1]});
        }
        const double wp = winding(pts);
        const double wi = winding(imgs);
        const double base = std::round(wp);
        if (std::abs(base) != 1.0) throw DomainError("samples", "sample points must traverse S^1 once");
        const double deg = wi / base;
        if (std::abs(deg - std::round(deg)) > 1e-9) throw ComputationError("sphere_map_degree: non-integer winding");
        return static_cast<int>(std::lround(deg));
    }
    if (N == 3) {
        int level = -1;
        for (int l = 0; l <= 6; ++l)
            if (static_cast<std::size_t>(10 * (1 << (2 * l)) + 2) == samples.size()) level = l;
        if (level < 0) throw DomainError("samples", "N = 3 expects the vertex set of an icosphere");
        const Icosphere ico = icosphere(level);
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const Vec3 p{samples[k].point[0], samples[k].point[1], samples[k].point[2]};
            if (dot(p, ico.vertices[k]) < 1.0 - 1e-9)
                throw DomainError("samples", "points must follow icosphere vertex order");
        }
        std::vector<Vec3> img(samples.size());
        for (std::size_t k = 0; k < samples.size(); ++k)
            img[k] = normalized({samples[k].image[0], samples[k].image[1], samples[k].image[2]});
        double total = 0.0;
        for (const auto& f : ico.faces) {
            for (int e = 0; e < 3; ++e)
                if (dot(img[f[e]], img[f[(e + 1) % 3]]) <= 0.0)
                    throw ComputationError("sphere_map_degree: adjacent images are >= pi/2 apart; refine");
            total += solid_angle(img[f[0]], img[f[1]], img[f[2]]);
        }
        const double deg = total / (4.0 * kPi);
        if (std::abs(deg - std::round(deg)) > 0.1)
            throw ComputationError("sphere_map_degree: degree " + std::to_string(deg) + " not near an integer");
        return static_cast<int>(std::lround(deg));
    }
    throw DomainError("N", "sphere_map_degree supports N in {2,3}");
}

}  // namespace fb
