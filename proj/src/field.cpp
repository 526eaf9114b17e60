#include "fracbubble/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <ostream>

#include "fracbubble/error.hpp"

namespace fb {

static_assert(std::endian::native == std::endian::little, "binary field format assumes a little-endian host");

Grid Grid::centered(const std::vector<double>& center, double half_width, int n) {
    if (n < 2) throw DomainError("extents", "need at least 2 nodes per axis");
    Grid g;
    g.dim = static_cast<int>(center.size());
    g.h = 2.0 * half_width / (n - 1);
    for (double c : center) {
        g.origin.push_back(c - half_width);
        g.extents.push_back(n);
    }
    g.validate();
    return g;
}

Grid Grid::covering(const std::vector<double>& center, double half_width, double h_max) {
    const int n = static_cast<int>(std::ceil(2.0 * half_width / h_max - 1e-9)) + 1;
    return centered(center, half_width, n);
}

std::size_t Grid::size() const {
    std::size_t m = 1;
    for (int e : extents) m *= static_cast<std::size_t>(e);
    return m;
}

void Grid::validate() const {
    if (dim < 1 || dim > 3) throw DomainError("grid.dim", "must be 1, 2 or 3");
    if (static_cast<int>(origin.size()) != dim || static_cast<int>(extents.size()) != dim)
        throw DomainError("grid", "origin/extents length must equal dim");
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("grid.h", "spacing must be positive");
    for (int e : extents)
        if (e < 2) throw DomainError("grid.extents", "need at least 2 nodes per axis");
    if (size() > (std::size_t{1} << 27)) throw DomainError("grid.extents", "exceeds memory budget");
}

std::size_t Grid::stride(int a) const {
    std::size_t st = 1;
    for (int b = dim - 1; b > a; --b) st *= static_cast<std::size_t>(extents[b]);
    return st;
}

std::array<int, 3> Grid::multi(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % extents[a]);
        flat /= extents[a];
    }
    return idx;
}

std::size_t Grid::flat(const std::array<int, 3>& idx) const {
    std::size_t f = 0;
    for (int a = 0; a < dim; ++a) f = f * extents[a] + idx[a];
    return f;
}

std::array<double, 3> Grid::point(std::size_t flat_index) const {
    const auto idx = multi(flat_index);
    std::array<double, 3> x{0, 0, 0};
    for (int a = 0; a < dim; ++a) x[a] = origin[a] + h * idx[a];
    return x;
}

bool Grid::same_as(const Grid& o) const {
    return dim == o.dim && h == o.h && origin == o.origin && extents == o.extents;
}

Field::Field(Grid g) : grid(std::move(g)), values(grid.size(), 0.0) {}

Field::Field(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.size()) throw DomainError("values", "size does not match grid");
}

double Field::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double Field::min() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : values) m = std::min(m, v);
    return m;
}

void Field::check_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError("values", "field contains non-finite entries");
}

double boundary_layer_ratio(const Field& u) {
    const double top = u.max_abs();
    if (top == 0.0) return 0.0;
    double edge = 0.0;
    const Grid& g = u.grid;
    for (std::size_t f = 0; f < u.size(); ++f) {
        const auto idx = g.multi(f);
        bool on_face = false;
        for (int a = 0; a < g.dim; ++a)
            if (idx[a] == 0 || idx[a] == g.extents[a] - 1) on_face = true;
        if (on_face) edge = std::max(edge, std::abs(u.values[f]));
    }
    return edge / top;
}

void write_binary(const Field& u, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ComputationError("cannot open " + path + " for writing");
    auto put_i = [&](std::int64_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); };
    auto put_d = [&](double v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); };
    put_i(u.grid.dim);
    for (int e : u.grid.extents) put_i(e);
    for (double o : u.grid.origin) put_d(o);
    put_d(u.grid.h);
    os.write(reinterpret_cast<const char*>(u.values.data()),
             static_cast<std::streamsize>(u.values.size() * sizeof(double)));
}

Field read_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DomainError("field", "cannot open " + path);
    auto get_i = [&] {
        std::int64_t v = 0;
        is.read(reinterpret_cast<char*>(&v), sizeof v);
        return v;
    };
    auto get_d = [&] {
        double v = 0;
        is.read(reinterpret_cast<char*>(&v), sizeof v);
        return v;
    };
    Grid g;
    g.dim = static_cast<int>(get_i());
    if (g.dim < 1 || g.dim > 3) throw DomainError("field", "bad header in " + path);
    for (int a = 0; a < g.dim; ++a) g.extents.push_back(static_cast<int>(get_i()));
    for (int a = 0; a < g.dim; ++a) g.origin.push_back(get_d());
    g.h = get_d();
    g.validate();
    std::vector<double> v(g.size());
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!is) throw DomainError("field", "truncated file " + path);
    return Field(std::move(g), std::move(v));
}

void write_csv(const Field& u, std::ostream& os) {
    const char* names[] = {"x1", "x2", "x3"};
    for (int a = 0; a < u.grid.dim; ++a) os << names[a] << ',';
    os << "u\n";
    os.precision(17);
    for (std::size_t f = 0; f < u.size(); ++f) {
        const auto x = u.grid.point(f);
        for (int a = 0; a < u.grid.dim; ++a) os << x[a] << ',';
        os << u.values[f] << '\n';
    }
}

Field resample_linear(const Field& u, const Grid& target) {
    if (u.grid.dim != target.dim) throw DomainError("target.dim", "must match the source grid");
    target.validate();
    const Grid& g = u.grid;
    const int N = g.dim;
    Field out(target);
    for (std::size_t f = 0; f < out.size(); ++f) {
        const auto x = target.point(f);
        std::array<int, 3> i0{0, 0, 0};
        std::array<double, 3> w{0.0, 0.0, 0.0};
        bool inside = true;
        for (int a = 0; a < N && inside; ++a) {
            const double t = (x[a] - g.origin[a]) / g.h;
            if (t < -1e-9 || t > g.extents[a] - 1 + 1e-9) inside = false;
            const int i = std::clamp(static_cast<int>(std::floor(t)), 0, g.extents[a] - 2);
            i0[a] = i;
            w[a] = std::clamp(t - i, 0.0, 1.0);
        }
        if (!inside) continue;
        double acc = 0.0;
        for (int c = 0; c < (1 << N); ++c) {
            std::array<int, 3> idx{0, 0, 0};
            double cw = 1.0;
            for (int a = 0; a < N; ++a) {
                const int bit = (c >> a) & 1;
                cw *= bit ? w[a] : 1.0 - w[a];
                idx[a] = i0[a] + bit;
            }
            if (cw != 0.0) acc += cw * u.values[g.flat(idx)];
        }
        out.values[f] = acc;
    }
    return out;
}

}  // namespace fb
