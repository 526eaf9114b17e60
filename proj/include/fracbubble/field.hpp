#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace fb {

/// Uniform isotropic Cartesian grid in 1..3 dimensions.
///
/// Node (i₀,…,i_{dim-1}) sits at origin + h·i. Storage is row-major
/// (last axis fastest). The grid box is the union of the node cells,
/// i.e. [origin - h/2, origin + (n - 1/2)h] per axis.
struct Grid {
    int dim = 0;
    std::vector<double> origin;
    double h = 0.0;
    std::vector<int> extents;

    /// Grid with `n` nodes per axis centered on `center` covering [center-half, center+half].
    static Grid centered(const std::vector<double>& center, double half_width, int n);
    /// Grid of spacing at most `h_max` covering [center-half, center+half] per axis.
    static Grid covering(const std::vector<double>& center, double half_width, double h_max);

    std::size_t size() const;
    void validate() const;
    /// Coordinates of node with flat index `flat`.
    std::array<double, 3> point(std::size_t flat) const;
    /// Multi-index of flat index.
    std::array<int, 3> multi(std::size_t flat) const;
    std::size_t flat(const std::array<int, 3>& idx) const;
    /// Stride of axis `a` in flat storage.
    std::size_t stride(int a) const;
    bool same_as(const Grid& o) const;
};

/// Function sampled on a Grid; zero outside the grid box by convention.
struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(Grid g);
    Field(Grid g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double max_abs() const;
    double min() const;
    void check_finite() const;
};

/// Multilinear interpolation of u at the nodes of `target`; zero outside u's node hull.
Field resample_linear(const Field& u, const Grid& target);

/// Largest |u| over nodes on the grid faces divided by max|u| (0 for u ≡ 0).
double boundary_layer_ratio(const Field& u);

/// Little-endian binary layout: int64 dim, int64 extents[dim], double origin[dim],
/// double h, then double values row-major.
void write_binary(const Field& u, const std::string& path);
Field read_binary(const std::string& path);
/// CSV with one row per node: coordinates then value.
void write_csv(const Field& u, std::ostream& os);

}  // namespace fb
