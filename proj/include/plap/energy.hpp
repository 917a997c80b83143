#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "plap/grid.hpp"

namespace plap {

/// Parameters of the coupled system
///   -div(|grad u|^{p-2} grad u) + A phi^{theta+1} |u|^{r-2} u = f
///   -div(|grad phi|^{p-2} grad phi) = |u|^r phi^theta
/// plus the gradient regularization eps used by all p-Dirichlet terms.
/// A = 0 is accepted as the uncoupled control configuration.
struct CouplingParams {
    double p;
    double A;
    double r;
    double theta;
    double eps;

    static constexpr double kAutoEps = -1.0;

    CouplingParams(double p_, double A_, double r_, double theta_, double eps_ = kAutoEps)
        : p(p_), A(A_), r(r_), theta(theta_), eps(eps_) {
        if (!(p > 1.0)) throw std::invalid_argument("CouplingParams: p must satisfy p > 1");
        if (!(A >= 0.0)) throw std::invalid_argument("CouplingParams: A must satisfy A >= 0");
        if (!(r > 1.0)) throw std::invalid_argument("CouplingParams: r must satisfy r > 1");
        if (!(theta >= 0.0 && theta < p - 1.0))
            throw std::invalid_argument("CouplingParams: theta must satisfy 0 <= theta < p - 1");
        if (eps == kAutoEps) eps = p < 2.0 ? 1e-8 : 0.0;
        if (!(eps >= 0.0)) throw std::invalid_argument("CouplingParams: eps must satisfy eps >= 0");
    }
};

/// Raised when the singular case p < 2, eps = 0 meets a cell with zero
/// gradient, where |grad u|^{p-2} is undefined.
class DegenerateGradientError : public std::runtime_error {
public:
    DegenerateGradientError()
        : std::runtime_error("degenerate configuration: p < 2, eps = 0 and a cell with zero gradient") {}
};

namespace detail {

/// sign(z) |z|^{e}; 0 at z = 0 (continuous extension, valid for e > 0).
inline double signed_pow(double z, double e) {
    if (z == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(z), e), z);
}

/// d/dz (z^+)^{e+1} = (e+1) z^e on z > 0, 0 on z <= 0.
inline double pos_pow_derivative(double z, double e) {
    return z > 0.0 ? std::pow(z, e) : 0.0;
}

}  // namespace detail

/// (1/p) sum_cells (|grad u|^2 + eps^2)^{p/2} h^N.
/// With eps = 0 this equals (1/p) w1p_seminorm(u, p)^p.
inline double p_dirichlet(const GridFunction& u, double p, double eps) {
    if (!(p > 1.0)) throw std::invalid_argument("p_dirichlet: p must satisfy p > 1");
    const CellField cf = cell_gradient(u);
    const int d = u.grid().dim();
    const double e2 = eps * eps;
    double s = 0.0;
    for (const auto& grad : cf.entries()) {
        double g2 = e2;
        for (int a = 0; a < d; ++a) g2 += grad[a] * grad[a];
        s += std::pow(g2, 0.5 * p);
    }
    return s * u.grid().cell_volume() / p;
}

/// Exact gradient of p_dirichlet with respect to interior nodal values;
/// boundary entries are zero. Throws DegenerateGradientError for p < 2,
/// eps = 0 on a cell with vanishing gradient.
inline GridFunction grad_p_dirichlet(const GridFunction& u, double p, double eps) {
    if (!(p > 1.0)) throw std::invalid_argument("grad_p_dirichlet: p must satisfy p > 1");
    const Grid& g = u.grid();
    const int d = g.dim();
    const double e2 = eps * eps;
    const double hN = g.cell_volume();
    const double inv_scale = 1.0 / static_cast<double>(1 << (d - 1));
    std::array<double, 3> inv_h{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) inv_h[a] = inv_scale / g.spacing(a);

    std::vector<double> out(g.node_count(), 0.0);
    detail::for_each_cell(g, [&](std::size_t, std::span<const std::size_t> corner) {
        std::array<double, 3> grad{0.0, 0.0, 0.0};
        for (int b = 0; b < static_cast<int>(corner.size()); ++b) {
            const double ub = u[corner[b]];
            for (int a = 0; a < d; ++a) grad[a] += detail::corner_sign(b, a) * ub;
        }
        double g2 = e2;
        for (int a = 0; a < d; ++a) {
            grad[a] *= inv_h[a];
            g2 += grad[a] * grad[a];
        }
        if (g2 == 0.0) {
            if (p < 2.0) throw DegenerateGradientError();
            return;  // weight is 0 for p > 2, flux is 0 for p = 2
        }
        const double w = std::pow(g2, 0.5 * (p - 2.0)) * hN;
        for (int b = 0; b < static_cast<int>(corner.size()); ++b) {
            double flux = 0.0;
            for (int a = 0; a < d; ++a) flux += detail::corner_sign(b, a) * inv_h[a] * grad[a];
            out[corner[b]] += w * flux;
        }
    });
    return GridFunction(u.grid_ptr(), std::move(out));  // ctor zeroes boundary rows
}

namespace detail {

/// Action of the p-Dirichlet Hessian at u on direction w (same quadrature).
inline GridFunction p_dirichlet_hess_vec(const GridFunction& u, const GridFunction& w,
                                         double p, double eps) {
    const Grid& g = u.grid();
    const int d = g.dim();
    const double e2 = eps * eps;
    const double hN = g.cell_volume();
    const double inv_scale = 1.0 / static_cast<double>(1 << (d - 1));
    std::array<double, 3> inv_h{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) inv_h[a] = inv_scale / g.spacing(a);

    std::vector<double> out(g.node_count(), 0.0);
    for_each_cell(g, [&](std::size_t, std::span<const std::size_t> corner) {
        std::array<double, 3> gu{0.0, 0.0, 0.0}, gw{0.0, 0.0, 0.0};
        for (int b = 0; b < static_cast<int>(corner.size()); ++b) {
            for (int a = 0; a < d; ++a) {
                gu[a] += corner_sign(b, a) * u[corner[b]];
                gw[a] += corner_sign(b, a) * w[corner[b]];
            }
        }
        double g2 = e2, guw = 0.0;
        for (int a = 0; a < d; ++a) {
            gu[a] *= inv_h[a];
            gw[a] *= inv_h[a];
            g2 += gu[a] * gu[a];
            guw += gu[a] * gw[a];
        }
        if (g2 == 0.0) return;  // p >= 2 callers only
        const double w0 = std::pow(g2, 0.5 * (p - 2.0));
        const double w1 = (p - 2.0) * std::pow(g2, 0.5 * (p - 4.0)) * guw;
        std::array<double, 3> flux{0.0, 0.0, 0.0};
        for (int a = 0; a < d; ++a) flux[a] = (w0 * gw[a] + w1 * gu[a]) * hN;
        for (int b = 0; b < static_cast<int>(corner.size()); ++b) {
            double acc = 0.0;
            for (int a = 0; a < d; ++a) acc += corner_sign(b, a) * inv_h[a] * flux[a];
            out[corner[b]] += acc;
        }
    });
    return GridFunction(u.grid_ptr(), std::move(out));
}

/// Diagonal of the p-Dirichlet Hessian at u (Jacobi preconditioner data).
inline GridFunction p_dirichlet_hess_diag(const GridFunction& u, double p, double eps) {
    const Grid& g = u.grid();
    const int d = g.dim();
    const double e2 = eps * eps;
    const double hN = g.cell_volume();
    const double inv_scale = 1.0 / static_cast<double>(1 << (d - 1));
    std::array<double, 3> inv_h{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) inv_h[a] = inv_scale / g.spacing(a);

    std::vector<double> out(g.node_count(), 0.0);
    for_each_cell(g, [&](std::size_t, std::span<const std::size_t> corner) {
        std::array<double, 3> gu{0.0, 0.0, 0.0};
        for (int b = 0; b < static_cast<int>(corner.size()); ++b)
            for (int a = 0; a < d; ++a) gu[a] += corner_sign(b, a) * u[corner[b]];
        double g2 = e2, ee = 0.0;
        for (int a = 0; a < d; ++a) {
            gu[a] *= inv_h[a];
            g2 += gu[a] * gu[a];
            ee += inv_h[a] * inv_h[a];
        }
        if (g2 == 0.0) return;
        const double w0 = std::pow(g2, 0.5 * (p - 2.0));
        const double w1 = (p - 2.0) * std::pow(g2, 0.5 * (p - 4.0));
        for (int b = 0; b < static_cast<int>(corner.size()); ++b) {
            double ge = 0.0;
            for (int a = 0; a < d; ++a) ge += gu[a] * corner_sign(b, a) * inv_h[a];
            out[corner[b]] += (w0 * ee + w1 * ge * ge) * hN;
        }
    });
    return GridFunction(u.grid_ptr(), std::move(out));
}

/// I1(z) = (1/p) int |grad z|^p + (A/r) int (psi^+)^{theta+1} |z|^r - int f z,
/// with the psi-dependent weights precomputed once per sub-solve.
struct I1Objective {
    double p, eps, r;
    std::vector<double> coupling_w;  // (A/r) (psi^+_i)^{theta+1} h^N
    std::vector<double> load;        // f_i h^N
    std::shared_ptr<const Grid> grid;

    I1Objective(const GridFunction& psi, const GridFunction& f, const CouplingParams& prm)
        : p(prm.p), eps(prm.eps), r(prm.r), grid(f.grid_ptr()) {
        require_same_layout(psi, f);
        const double hN = grid->cell_volume();
        coupling_w.resize(f.size());
        load.resize(f.size());
        for (std::size_t n = 0; n < f.size(); ++n) {
            const double pp = std::max(psi[n], 0.0);
            coupling_w[n] = (prm.A / prm.r) * std::pow(pp, prm.theta + 1.0) * hN;
            load[n] = f[n] * hN;
        }
    }

    double value(const GridFunction& z) const {
        double s = p_dirichlet(z, p, eps);
        for (std::size_t n = 0; n < z.size(); ++n)
            s += coupling_w[n] * std::pow(std::abs(z[n]), r) - load[n] * z[n];
        return s;
    }

    GridFunction gradient(const GridFunction& z) const {
        GridFunction gpd = grad_p_dirichlet(z, p, eps);
        std::vector<double> v(gpd.values().begin(), gpd.values().end());
        for (std::size_t n = 0; n < z.size(); ++n) {
            if (z.grid().is_boundary(n)) continue;
            v[n] += r * coupling_w[n] * signed_pow(z[n], r - 1.0) - load[n];
        }
        return GridFunction(z.grid_ptr(), std::move(v));
    }

    // C^2 whenever the degenerate p < 2 case is regularized; r >= 2 keeps the
    // zero-order curvature bounded
    bool has_hess_vec() const { return (p >= 2.0 || eps > 0.0) && r >= 2.0; }

    GridFunction hess_vec(const GridFunction& z, const GridFunction& dir) const {
        GridFunction h = p_dirichlet_hess_vec(z, dir, p, eps);
        std::vector<double> v(h.values().begin(), h.values().end());
        for (std::size_t n = 0; n < z.size(); ++n) {
            if (z.grid().is_boundary(n)) continue;
            const double curv = r * (r - 1.0) * coupling_w[n] * std::pow(std::abs(z[n]), r - 2.0);
            v[n] += curv * dir[n];
        }
        return GridFunction(z.grid_ptr(), std::move(v));
    }

    GridFunction hess_diag(const GridFunction& z) const {
        GridFunction h = p_dirichlet_hess_diag(z, p, eps);
        std::vector<double> v(h.values().begin(), h.values().end());
        for (std::size_t n = 0; n < z.size(); ++n) {
            if (z.grid().is_boundary(n)) continue;
            v[n] += r * (r - 1.0) * coupling_w[n] * std::pow(std::abs(z[n]), r - 2.0);
        }
        return GridFunction(z.grid_ptr(), std::move(v));
    }
};

/// I3(eta) = ((theta+1)/p) int |grad eta|^p - int (eta^+)^{theta+1} |v|^r,
/// with the |v|^r weights precomputed once per sub-solve.
struct I3Objective {
    double p, eps, theta;
    std::vector<double> coupling_w;  // |v_i|^r h^N
    std::shared_ptr<const Grid> grid;

    I3Objective(const GridFunction& v, const CouplingParams& prm)
        : p(prm.p), eps(prm.eps), theta(prm.theta), grid(v.grid_ptr()) {
        const double hN = grid->cell_volume();
        coupling_w.resize(v.size());
        for (std::size_t n = 0; n < v.size(); ++n)
            coupling_w[n] = std::pow(std::abs(v[n]), prm.r) * hN;
    }

    double value(const GridFunction& eta) const {
        double s = (theta + 1.0) * p_dirichlet(eta, p, eps);
        for (std::size_t n = 0; n < eta.size(); ++n)
            s -= coupling_w[n] * std::pow(std::max(eta[n], 0.0), theta + 1.0);
        return s;
    }

    GridFunction gradient(const GridFunction& eta) const {
        GridFunction gpd = grad_p_dirichlet(eta, p, eps);
        std::vector<double> v(gpd.values().begin(), gpd.values().end());
        for (std::size_t n = 0; n < eta.size(); ++n) {
            if (eta.grid().is_boundary(n)) continue;
            v[n] = (theta + 1.0) * (v[n] - coupling_w[n] * pos_pow_derivative(eta[n], theta));
        }
        return GridFunction(eta.grid_ptr(), std::move(v));
    }

    // theta = 0: the coupling is piecewise linear (zero curvature under the
    // kink convention), so the Hessian is the p-Dirichlet one alone. The
    // sublinear theta > 0 coupling is left to gradient methods.
    bool has_hess_vec() const { return theta == 0.0 && (p >= 2.0 || eps > 0.0); }

    GridFunction hess_vec(const GridFunction& eta, const GridFunction& dir) const {
        return p_dirichlet_hess_vec(eta, dir, p, eps);
    }

    GridFunction hess_diag(const GridFunction& eta) const {
        return p_dirichlet_hess_diag(eta, p, eps);
    }
};

}  // namespace detail

/// The saddle functional
///   J(z, eta) = (1/p) int |grad z|^p - A(theta+1)/(pr) int |grad eta|^p
///             + (A/r) int (eta^+)^{theta+1} |z|^r - int f z.
/// On a finite grid every term is finite, so the +infinity branch of the
/// continuum definition never occurs.
inline double J_value(const GridFunction& z, const GridFunction& eta, const GridFunction& f,
                      const CouplingParams& prm) {
    require_same_layout(z, eta);
    require_same_layout(z, f);
    const double hN = z.grid().cell_volume();
    double s = p_dirichlet(z, prm.p, prm.eps);
    s -= prm.A * (prm.theta + 1.0) / prm.r * p_dirichlet(eta, prm.p, prm.eps);
    for (std::size_t n = 0; n < z.size(); ++n) {
        const double ep = std::max(eta[n], 0.0);
        s += (prm.A / prm.r) * std::pow(ep, prm.theta + 1.0) * std::pow(std::abs(z[n]), prm.r) * hN;
        s -= f[n] * z[n] * hN;
    }
    return s;
}

/// I1(z) = J(z, psi) minus the z-independent psi term.
inline double I1_value(const GridFunction& z, const GridFunction& psi, const GridFunction& f,
                       const CouplingParams& prm) {
    require_same_layout(z, psi);
    return detail::I1Objective(psi, f, prm).value(z);
}

/// Exact nodal gradient of I1 (zero at boundary nodes).
inline GridFunction I1_grad(const GridFunction& z, const GridFunction& psi, const GridFunction& f,
                            const CouplingParams& prm) {
    require_same_layout(z, psi);
    return detail::I1Objective(psi, f, prm).gradient(z);
}

/// I3(eta) = ((theta+1)/p) int |grad eta|^p - int (eta^+)^{theta+1} |v|^r.
inline double I3_value(const GridFunction& eta, const GridFunction& v, const CouplingParams& prm) {
    require_same_layout(eta, v);
    return detail::I3Objective(v, prm).value(eta);
}

/// Exact nodal gradient of I3. The coupling term contributes
/// -(theta+1) (eta^+)^theta |v|^r at nodes with eta > 0 and 0 elsewhere
/// (the derivative of (eta^+)^{theta+1} is taken as 0 at eta = 0).
inline GridFunction I3_grad(const GridFunction& eta, const GridFunction& v,
                            const CouplingParams& prm) {
    require_same_layout(eta, v);
    return detail::I3Objective(v, prm).gradient(eta);
}

}  // namespace plap
