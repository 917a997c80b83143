#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "plap/grid.hpp"

namespace plap {

/// Radial singular datum f(x) = |x - x0|^{-alpha} with the distance clamped
/// below by cap_radius, so the nodal values are bounded by cap_radius^{-alpha}
/// and increase pointwise as the cap shrinks (|f_n| <= |f|, f_n up to f).
/// f is in L^m iff alpha m < N, which the cap-tied-to-h refinement sequence
/// probes empirically.
inline GridFunction make_singular_f(std::shared_ptr<const Grid> grid, double alpha,
                                    std::array<double, 3> center, double cap_radius) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("make_singular_f: alpha must be >= 0");
    if (!(cap_radius > 0.0)) throw std::invalid_argument("make_singular_f: cap_radius must be > 0");
    for (int a = 0; a < grid->dim(); ++a)
        if (!(center[a] > grid->lo(a) && center[a] < grid->hi(a)))
            throw std::invalid_argument("make_singular_f: center must lie strictly inside the domain");
    return GridFunction::sample(std::move(grid), [&](const std::array<double, 3>& x) {
        double d2 = 0.0;
        for (int a = 0; a < 3; ++a) d2 += (x[a] - center[a]) * (x[a] - center[a]);
        return std::pow(std::max(std::sqrt(d2), cap_radius), -alpha);
    });
}

/// Default singularity placement: domain center shifted by half a cell along
/// each axis, so no node coincides with the pole.
inline std::array<double, 3> default_singularity_center(const Grid& grid) {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (int a = 0; a < grid.dim(); ++a)
        c[a] = 0.5 * (grid.lo(a) + grid.hi(a)) + 0.5 * grid.spacing(a);
    return c;
}

/// Smooth datum: amplitude times the product of sines vanishing on the faces.
inline GridFunction make_smooth_f(std::shared_ptr<const Grid> grid, double amplitude) {
    const Grid& g = *grid;
    return GridFunction::sample(std::move(grid), [&](const std::array<double, 3>& x) {
        double s = amplitude;
        for (int a = 0; a < g.dim(); ++a) {
            const double xi = (x[a] - g.lo(a)) / (g.hi(a) - g.lo(a));
            s *= std::sin(std::numbers::pi * xi);
        }
        return s;
    });
}

}  // namespace plap
