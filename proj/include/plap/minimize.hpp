#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "plap/grid.hpp"

namespace plap {

enum class Method { gradient_descent, nonlinear_cg, newton_damped };

struct ArmijoParams {
    double c1 = 1e-4;        // sufficient-decrease constant, in (0,1)
    double backtrack = 0.5;  // step shrink factor, in (0,1)
};

struct SolverOptions {
    double tol = 1e-8;            // relative gradient-norm stopping tolerance
    std::size_t max_iters = 5000;
    ArmijoParams armijo{};
    Method method = Method::nonlinear_cg;
    std::size_t cg_restart = 0;   // 0 = auto

    void validate() const {
        if (!(tol > 0.0)) throw std::invalid_argument("SolverOptions: tol must be > 0");
        if (max_iters < 1) throw std::invalid_argument("SolverOptions: max_iters must be >= 1");
        if (!(armijo.c1 > 0.0 && armijo.c1 < 1.0))
            throw std::invalid_argument("SolverOptions: Armijo c1 must lie in (0,1)");
        if (!(armijo.backtrack > 0.0 && armijo.backtrack < 1.0))
            throw std::invalid_argument("SolverOptions: backtrack factor must lie in (0,1)");
    }
};

struct MinimizeResult {
    GridFunction x;
    double value = 0.0;
    double grad_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> value_history;  // accepted values, nonincreasing
};

namespace detail {

template <class Obj>
concept HasHessDiag = requires(const Obj& o, const GridFunction& x) {
    { o.hess_diag(x) } -> std::same_as<GridFunction>;
};

/// Inexact Newton direction by (Jacobi-preconditioned) CG on the Hessian
/// action, truncated early; falls back to steepest descent off the convex
/// slice.
template <class Obj>
GridFunction newton_direction(const Obj& obj, const GridFunction& x, const GridFunction& g) {
    std::vector<double> inv_diag(x.size(), 1.0);
    if constexpr (HasHessDiag<Obj>) {
        const GridFunction diag = obj.hess_diag(x);
        for (std::size_t n = 0; n < x.size(); ++n)
            if (diag[n] > 0.0) inv_diag[n] = 1.0 / diag[n];
    }
    auto precondition = [&](const GridFunction& r) {
        std::vector<double> z(r.size());
        for (std::size_t n = 0; n < r.size(); ++n) z[n] = inv_diag[n] * r[n];
        return GridFunction(r.grid_ptr(), std::move(z));
    };

    GridFunction d(x.grid_ptr());
    GridFunction res = scaled(g, -1.0);
    GridFunction z = precondition(res);
    GridFunction q = z;
    double rz = dot(res, z);
    const double target = 1e-4 * dot(res, res);
    const int max_cg = 400;
    for (int it = 0; it < max_cg && dot(res, res) > target; ++it) {
        GridFunction hq = obj.hess_vec(x, q);
        const double qhq = dot(q, hq);
        if (!(qhq > 0.0)) break;  // nonconvex slice, keep what we have
        const double alpha = rz / qhq;
        d = add_scaled(d, alpha, q);
        res = add_scaled(res, -alpha, hq);
        z = precondition(res);
        const double rz_new = dot(res, z);
        q = add_scaled(z, rz_new / rz, q);
        rz = rz_new;
    }
    if (dot(d, g) >= 0.0) return scaled(g, -1.0);  // not a descent direction
    return d;
}

}  // namespace detail

/// Descent minimization of obj over the interior nodal values of x0.
/// Obj needs: double value(const GridFunction&), GridFunction gradient(...),
/// bool has_hess_vec(), GridFunction hess_vec(x, dir).
///
/// Line search: one secant refinement of the trial step (exact on quadratics,
/// which keeps nonlinear CG at linear-CG speed for p = 2) guarded by Armijo
/// backtracking, so accepted values are nonincreasing.
template <class Obj>
MinimizeResult minimize(const Obj& obj, GridFunction x0, double grad_tol_abs,
                        const SolverOptions& opts) {
    opts.validate();
    const Method method =
        (opts.method == Method::newton_damped && !obj.has_hess_vec()) ? Method::nonlinear_cg
                                                                      : opts.method;
    const std::size_t restart_every =
        opts.cg_restart > 0
            ? opts.cg_restart
            : std::max<std::size_t>(100, 2 * static_cast<std::size_t>(std::sqrt(
                                              static_cast<double>(x0.grid().interior_count()))));

    MinimizeResult out{std::move(x0), 0.0, 0.0, 0, false, {}};
    GridFunction g = obj.gradient(out.x);
    out.value = obj.value(out.x);
    out.grad_norm = norm2(g);
    out.value_history.push_back(out.value);

    GridFunction dir = scaled(g, -1.0);
    double gg = dot(g, g);
    double step_hint = 1.0;
    std::size_t since_restart = 0;

    for (out.iterations = 0; out.iterations < opts.max_iters; ++out.iterations) {
        if (out.grad_norm <= grad_tol_abs) {
            out.converged = true;
            return out;
        }

        double dphi0 = dot(g, dir);
        if (!(dphi0 < 0.0)) {  // stale direction, restart with steepest descent
            dir = scaled(g, -1.0);
            dphi0 = -gg;
            since_restart = 0;
        }

        // Secant step toward the root of t -> <grad(x + t d), d>.
        double t = step_hint;
        {
            GridFunction gt = obj.gradient(add_scaled(out.x, t, dir));
            const double dphit = dot(gt, dir);
            if (std::isfinite(dphit) && dphit > dphi0) {
                const double ts = t * dphi0 / (dphi0 - dphit);
                if (std::isfinite(ts) && ts > 0.0)
                    t = std::clamp(ts, 0.1 * t, 10.0 * t);
            }
        }

        // Armijo backtracking from the secant trial. Near the floor where the
        // requested decrease is below the value's ulp, a step is also accepted
        // on strict gradient decrease with a roundoff-guarded value bound.
        const double value_ulp_guard = 16.0 * std::numeric_limits<double>::epsilon() *
                                       (1.0 + std::abs(out.value));
        double f_new = std::numeric_limits<double>::infinity();
        double gg_new = 0.0;
        GridFunction x_new = out.x;
        GridFunction g_new = g;
        bool accepted = false;
        bool have_grad = false;
        for (int bt = 0; bt < 60; ++bt) {
            x_new = add_scaled(out.x, t, dir);
            f_new = obj.value(x_new);
            have_grad = false;
            if (std::isfinite(f_new)) {
                if (f_new <= out.value + opts.armijo.c1 * t * dphi0) {
                    accepted = true;
                    break;
                }
                if (f_new <= out.value + value_ulp_guard &&
                    -opts.armijo.c1 * t * dphi0 < value_ulp_guard) {
                    g_new = obj.gradient(x_new);
                    gg_new = dot(g_new, g_new);
                    have_grad = true;
                    if (gg_new < gg) {
                        accepted = true;
                        break;
                    }
                }
            }
            t *= opts.armijo.backtrack;
        }
        if (!accepted) {
            if (dot(dir, g) + gg == 0.0) break;  // already steepest descent: give up
            dir = scaled(g, -1.0);
            since_restart = 0;
            step_hint = std::max(step_hint * opts.armijo.backtrack, 1e-14);
            continue;
        }

        if (!have_grad) {
            g_new = obj.gradient(x_new);
            gg_new = dot(g_new, g_new);
        }

        switch (method) {
            case Method::gradient_descent:
                dir = scaled(g_new, -1.0);
                break;
            case Method::nonlinear_cg: {
                ++since_restart;
                if (since_restart >= restart_every) {
                    dir = scaled(g_new, -1.0);
                    since_restart = 0;
                } else {
                    const double beta =
                        std::max(0.0, (gg_new - dot(g_new, g)) / gg);  // Polak-Ribiere+
                    dir = add_scaled(scaled(g_new, -1.0), beta, dir);
                }
                break;
            }
            case Method::newton_damped:
                dir = detail::newton_direction(obj, x_new, g_new);
                break;
        }

        out.x = std::move(x_new);
        out.value = f_new;
        g = std::move(g_new);
        gg = gg_new;
        out.grad_norm = std::sqrt(gg);
        out.value_history.push_back(out.value);
        step_hint = std::clamp(2.0 * t, 1e-14, 1e14);
    }

    out.converged = out.grad_norm <= grad_tol_abs;
    return out;
}

}  // namespace plap
