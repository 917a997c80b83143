#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace plap {

/// Uniform structured node grid on an axis-aligned box in 2 or 3 dimensions.
///
/// Nodes are stored row-major with the x index outermost:
///   flat = (i * ny + j) * nz + k   (nz = 1 in 2D).
/// All nodes on the box faces are boundary nodes; fields with homogeneous
/// Dirichlet conditions are represented by zero values there.
class Grid {
public:
    Grid(int dim,
         std::array<int, 3> nodes,
         std::array<double, 3> lo,
         std::array<double, 3> hi)
        : dim_(dim), nodes_(nodes), lo_(lo), hi_(hi) {
        if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("Grid: dimension must be 2 or 3");
        if (dim_ == 2) { nodes_[2] = 1; lo_[2] = 0.0; hi_[2] = 0.0; }
        for (int a = 0; a < dim_; ++a) {
            if (nodes_[a] < 3) throw std::invalid_argument("Grid: need at least 3 nodes per axis");
            if (!(hi_[a] > lo_[a])) throw std::invalid_argument("Grid: extent must have positive length per axis");
            spacing_[a] = (hi_[a] - lo_[a]) / static_cast<double>(nodes_[a] - 1);
        }
        if (dim_ == 2) spacing_[2] = 1.0;  // unused, keeps cell_volume a plain product
        boundary_.resize(node_count());
        for (std::size_t n = 0; n < node_count(); ++n) {
            const auto c = node_multi_index(n);
            bool b = false;
            for (int a = 0; a < dim_; ++a)
                b = b || c[a] == 0 || c[a] == nodes_[a] - 1;
            boundary_[n] = b ? 1 : 0;
        }
    }

    /// Unit square/cube with the same cell count along every axis.
    static std::shared_ptr<const Grid> unit_box(int dim, int cells_per_axis) {
        const int n = cells_per_axis + 1;
        return std::make_shared<const Grid>(dim,
                                            std::array<int, 3>{n, n, n},
                                            std::array<double, 3>{0.0, 0.0, 0.0},
                                            std::array<double, 3>{1.0, 1.0, 1.0});
    }

    int dim() const { return dim_; }
    int nodes(int axis) const { return nodes_[axis]; }
    int cells(int axis) const { return axis < dim_ ? nodes_[axis] - 1 : 1; }
    double spacing(int axis) const { return spacing_[axis]; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }

    std::size_t node_count() const {
        return static_cast<std::size_t>(nodes_[0]) * nodes_[1] * nodes_[2];
    }
    std::size_t cell_count() const {
        return static_cast<std::size_t>(cells(0)) * cells(1) * cells(2);
    }
    std::size_t interior_count() const {
        std::size_t m = 1;
        for (int a = 0; a < dim_; ++a) m *= static_cast<std::size_t>(nodes_[a] - 2);
        return m;
    }

    /// Volume of one cell, h_x * h_y (* h_z).
    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim_; ++a) v *= spacing_[a];
        return v;
    }

    bool isotropic(double rel_tol = 1e-12) const {
        for (int a = 1; a < dim_; ++a)
            if (std::abs(spacing_[a] - spacing_[0]) > rel_tol * spacing_[0]) return false;
        return true;
    }

    std::size_t node_index(int i, int j, int k = 0) const {
        return (static_cast<std::size_t>(i) * nodes_[1] + j) * nodes_[2] + k;
    }
    std::array<int, 3> node_multi_index(std::size_t flat) const {
        const int k = static_cast<int>(flat % nodes_[2]);
        const std::size_t ij = flat / nodes_[2];
        const int j = static_cast<int>(ij % nodes_[1]);
        const int i = static_cast<int>(ij / nodes_[1]);
        return {i, j, k};
    }
    std::array<double, 3> node_position(std::size_t flat) const {
        const auto c = node_multi_index(flat);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int a = 0; a < dim_; ++a) x[a] = lo_[a] + spacing_[a] * c[a];
        return x;
    }

    bool is_boundary(std::size_t flat) const { return boundary_[flat] != 0; }

    /// Structural equality: same dimension, node counts, and extent.
    bool same_layout(const Grid& other, double tol = 1e-12) const {
        if (dim_ != other.dim_) return false;
        for (int a = 0; a < dim_; ++a) {
            if (nodes_[a] != other.nodes_[a]) return false;
            if (std::abs(lo_[a] - other.lo_[a]) > tol) return false;
            if (std::abs(hi_[a] - other.hi_[a]) > tol) return false;
        }
        return true;
    }

private:
    int dim_;
    std::array<int, 3> nodes_;
    std::array<double, 3> lo_, hi_, spacing_;
    std::vector<std::uint8_t> boundary_;
};

/// Nodal scalar field on a Grid. Boundary values are forced to zero on
/// construction (the discrete homogeneous Dirichlet convention); all values
/// must be finite. Immutable after construction.
class GridFunction {
public:
    explicit GridFunction(std::shared_ptr<const Grid> grid)
        : grid_(std::move(grid)), v_(grid_->node_count(), 0.0) {}

    GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values)
        : grid_(std::move(grid)), v_(std::move(values)) {
        if (v_.size() != grid_->node_count())
            throw std::invalid_argument("GridFunction: value count does not match grid");
        for (std::size_t n = 0; n < v_.size(); ++n) {
            if (grid_->is_boundary(n)) v_[n] = 0.0;
            else if (!std::isfinite(v_[n]))
                throw std::invalid_argument("GridFunction: non-finite value");
        }
    }

    /// Sample a callable of position; boundary nodes are clamped to zero.
    template <class F>
    static GridFunction sample(std::shared_ptr<const Grid> grid, F&& f) {
        std::vector<double> v(grid->node_count());
        for (std::size_t n = 0; n < v.size(); ++n) {
            const auto x = grid->node_position(n);
            v[n] = grid->is_boundary(n) ? 0.0 : f(x);
        }
        return GridFunction(std::move(grid), std::move(v));
    }

    const Grid& grid() const { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
    std::span<const double> values() const { return v_; }
    double operator[](std::size_t n) const { return v_[n]; }
    std::size_t size() const { return v_.size(); }

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> v_;
};

/// Per-cell gradient samples (one length-dim vector per cell), taken at cell
/// centers from the multilinear interpolant of the corner values.
class CellField {
public:
    CellField(std::shared_ptr<const Grid> grid, std::vector<std::array<double, 3>> g)
        : grid_(std::move(grid)), g_(std::move(g)) {
        if (g_.size() != grid_->cell_count())
            throw std::invalid_argument("CellField: entry count does not match cell count");
    }

    const Grid& grid() const { return *grid_; }
    std::span<const std::array<double, 3>> entries() const { return g_; }
    const std::array<double, 3>& operator[](std::size_t c) const { return g_[c]; }
    std::size_t size() const { return g_.size(); }

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<std::array<double, 3>> g_;
};

namespace detail {

/// Visit all cells; fn(cell_flat, corner_nodes) gets the 2^dim corner node
/// indices ordered by bit mask (bit a set = +1 step along axis a).
template <class F>
inline void for_each_cell(const Grid& g, F&& fn) {
    const int d = g.dim();
    const int ncorner = 1 << d;
    const int cx = g.cells(0), cy = g.cells(1), cz = g.cells(2);
    std::array<std::size_t, 8> corner{};
    std::size_t cell = 0;
    for (int i = 0; i < cx; ++i)
        for (int j = 0; j < cy; ++j)
            for (int k = 0; k < cz; ++k, ++cell) {
                for (int b = 0; b < ncorner; ++b)
                    corner[b] = g.node_index(i + (b & 1), j + ((b >> 1) & 1),
                                             d == 3 ? k + ((b >> 2) & 1) : 0);
                fn(cell, std::span<const std::size_t>(corner.data(), ncorner));
            }
}

/// Weight of corner b in the cell-center gradient along axis: +-1 / (2^{d-1} h).
inline double corner_sign(int b, int axis) { return (b >> axis) & 1 ? 1.0 : -1.0; }

/// Deterministic uniform double in [-1, 1) from raw generator bits; avoids
/// the implementation-defined std::uniform_real_distribution.
template <class Rng>
double uniform_pm1(Rng& rng) {
    return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace detail

/// Gradient of the multilinear interpolant at each cell center; exact for
/// affine fields.
inline CellField cell_gradient(const GridFunction& u) {
    const Grid& g = u.grid();
    const int d = g.dim();
    const double inv_scale = 1.0 / static_cast<double>(1 << (d - 1));
    std::array<double, 3> inv_h{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) inv_h[a] = inv_scale / g.spacing(a);

    std::vector<std::array<double, 3>> out(g.cell_count(), {0.0, 0.0, 0.0});
    detail::for_each_cell(g, [&](std::size_t cell, std::span<const std::size_t> corner) {
        std::array<double, 3> grad{0.0, 0.0, 0.0};
        for (int b = 0; b < static_cast<int>(corner.size()); ++b) {
            const double ub = u[corner[b]];
            for (int a = 0; a < d; ++a) grad[a] += detail::corner_sign(b, a) * ub;
        }
        for (int a = 0; a < d; ++a) grad[a] *= inv_h[a];
        out[cell] = grad;
    });
    return CellField(u.grid_ptr(), std::move(out));
}

/// Midpoint quadrature: sum of per-cell scalars times the cell volume.
inline double integrate_cells(std::span<const double> w, const Grid& g) {
    if (w.size() != g.cell_count())
        throw std::invalid_argument("integrate_cells: one scalar per cell required");
    double s = 0.0;
    for (double x : w) s += x;
    return s * g.cell_volume();
}

/// Nodal L^q norm: (sum_i |u_i|^q h^N)^{1/q}, q >= 1.
inline double lq_norm(const GridFunction& u, double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("lq_norm: q must satisfy q >= 1");
    double s = 0.0;
    for (double x : u.values()) s += std::pow(std::abs(x), q);
    return std::pow(s * u.grid().cell_volume(), 1.0 / q);
}

/// Discrete W^{1,p}_0 seminorm: (sum_cells |grad u|^p h^N)^{1/p}, p > 1.
inline double w1p_seminorm(const GridFunction& u, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("w1p_seminorm: p must satisfy p > 1");
    const CellField cf = cell_gradient(u);
    const int d = u.grid().dim();
    double s = 0.0;
    for (const auto& grad : cf.entries()) {
        double g2 = 0.0;
        for (int a = 0; a < d; ++a) g2 += grad[a] * grad[a];
        s += std::pow(g2, 0.5 * p);
    }
    return std::pow(s * u.grid().cell_volume(), 1.0 / p);
}

inline GridFunction positive_part(const GridFunction& u) {
    std::vector<double> v(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) v[n] = std::max(u[n], 0.0);
    return GridFunction(u.grid_ptr(), std::move(v));
}

inline GridFunction negative_part(const GridFunction& u) {
    std::vector<double> v(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) v[n] = std::max(-u[n], 0.0);
    return GridFunction(u.grid_ptr(), std::move(v));
}

// Small field algebra used throughout the solvers. Both operands must live on
// structurally identical grids; boundary zeros are preserved automatically.

inline void require_same_layout(const GridFunction& a, const GridFunction& b) {
    if (!a.grid().same_layout(b.grid()))
        throw std::invalid_argument("fields live on different grids");
}

inline double dot(const GridFunction& a, const GridFunction& b) {
    require_same_layout(a, b);
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * b[n];
    return s;
}

inline double norm2(const GridFunction& a) { return std::sqrt(dot(a, a)); }

inline double linf_norm(const GridFunction& a) {
    double m = 0.0;
    for (double x : a.values()) m = std::max(m, std::abs(x));
    return m;
}

/// a + s * b
inline GridFunction add_scaled(const GridFunction& a, double s, const GridFunction& b) {
    require_same_layout(a, b);
    std::vector<double> v(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) v[n] = a[n] + s * b[n];
    return GridFunction(a.grid_ptr(), std::move(v));
}

inline GridFunction difference(const GridFunction& a, const GridFunction& b) {
    return add_scaled(a, -1.0, b);
}

inline GridFunction scaled(const GridFunction& a, double s) {
    std::vector<double> v(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) v[n] = s * a[n];
    return GridFunction(a.grid_ptr(), std::move(v));
}

/// Evaluate the multilinear interpolant of u at an arbitrary point of its box.
inline double interpolate_at(const GridFunction& u, const std::array<double, 3>& x) {
    const Grid& g = u.grid();
    const int d = g.dim();
    std::array<int, 3> cell{0, 0, 0};
    std::array<double, 3> loc{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) {
        const double xi = (x[a] - g.lo(a)) / g.spacing(a);
        cell[a] = std::clamp(static_cast<int>(xi), 0, g.cells(a) - 1);
        loc[a] = std::clamp(xi - cell[a], 0.0, 1.0);
    }
    double v = 0.0;
    for (int b = 0; b < (1 << d); ++b) {
        double w = 1.0;
        for (int a = 0; a < d; ++a) w *= (b >> a) & 1 ? loc[a] : 1.0 - loc[a];
        v += w * u[g.node_index(cell[0] + (b & 1), cell[1] + ((b >> 1) & 1),
                               d == 3 ? cell[2] + ((b >> 2) & 1) : 0)];
    }
    return v;
}

/// Transfer a field to another grid over the same box by sampling the
/// multilinear interpolant (used for continuation across refinements).
inline GridFunction interpolate_to(const GridFunction& u, std::shared_ptr<const Grid> target) {
    return GridFunction::sample(std::move(target),
                                [&](const std::array<double, 3>& x) { return interpolate_at(u, x); });
}

// ---------------------------------------------------------------------------
// Field dump format: one header line
//     plapfield N nx [ny [nz]] h
// followed by node values in row-major order, one per line. Requires
// isotropic spacing (the header carries a single h); values round-trip to
// full double precision.

inline void write_field(std::ostream& os, const GridFunction& u) {
    const Grid& g = u.grid();
    if (!g.isotropic())
        throw std::invalid_argument("write_field: dump format requires isotropic spacing");
    os.precision(17);
    os << "plapfield " << g.dim();
    for (int a = 0; a < g.dim(); ++a) os << ' ' << g.nodes(a);
    os << ' ' << g.spacing(0) << '\n';
    for (double x : u.values()) os << x << '\n';
}

inline GridFunction read_field(std::istream& is) {
    std::string tag;
    is >> tag;
    if (tag != "plapfield") throw std::runtime_error("read_field: missing plapfield header");
    int dim = 0;
    is >> dim;
    if (dim != 2 && dim != 3) throw std::runtime_error("read_field: bad dimension");
    std::array<int, 3> nodes{1, 1, 1};
    for (int a = 0; a < dim; ++a) is >> nodes[a];
    double h = 0.0;
    is >> h;
    if (!is || !(h > 0.0)) throw std::runtime_error("read_field: bad header");
    std::array<double, 3> lo{0.0, 0.0, 0.0}, hi{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) hi[a] = h * (nodes[a] - 1);
    auto grid = std::make_shared<const Grid>(dim, nodes, lo, hi);
    std::vector<double> v(grid->node_count());
    for (auto& x : v)
        if (!(is >> x)) throw std::runtime_error("read_field: truncated value list");
    return GridFunction(std::move(grid), std::move(v));
}

}  // namespace plap
