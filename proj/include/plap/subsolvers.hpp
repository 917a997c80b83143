#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "plap/energy.hpp"
#include "plap/grid.hpp"
#include "plap/minimize.hpp"

namespace plap {

/// First eigenpair of the discrete p-Laplacian: lambda1 minimizes the
/// Rayleigh quotient int |grad v|^p / int |v|^p; phi1 >= 0 with
/// lq_norm(phi1, p) = 1.
struct EigenPair {
    double lambda1;
    GridFunction phi1;
};

struct SubsolveResult {
    GridFunction field;
    bool converged = false;
    std::size_t iterations = 0;
    double grad_norm = 0.0;   // Euclidean norm of the nodal gradient at exit
    double value = 0.0;       // objective value at `field`
    double raw_value = 0.0;   // objective value before positive-part clamping (solve_T)
};

/// Minimizes I1(.; psi, f) — the unique weak solution v = S(psi) of
///   -div(|grad v|^{p-2} grad v) + A (psi^+)^{theta+1} |v|^{r-2} v = f.
/// Stops when ||I1_grad||_2 <= tol * max(1, ||f||_2 h^N). Non-convergence is
/// reported through the flag; the best iterate is returned either way.
inline SubsolveResult solve_S(const GridFunction& psi, const GridFunction& f,
                              const CouplingParams& prm, const SolverOptions& opts,
                              const GridFunction* initial = nullptr) {
    detail::I1Objective obj(psi, f, prm);
    double fnorm = 0.0;
    for (double x : f.values()) fnorm += x * x;
    const double scale = std::max(1.0, std::sqrt(fnorm) * f.grid().cell_volume());
    GridFunction x0 = initial ? *initial : GridFunction(f.grid_ptr());
    MinimizeResult r = minimize(obj, std::move(x0), opts.tol * scale, opts);
    return {std::move(r.x), r.converged, r.iterations, r.grad_norm, r.value, r.value};
}

/// Quantities of the one-dimensional slice I3(t phi1) = c1 t^p - c2 t^{theta+1}:
///   c1 = (theta+1) lambda1 / p * int phi1^p,   c2 = int phi1^{theta+1} |v|^r,
/// and its exact positive minimizer t_star = ((theta+1) c2 / (p c1))^{1/(p-1-theta)}.
/// t_star = 0 when v vanishes.
struct ScalingInit {
    double t_star;
    double c1;
    double c2;
};

inline ScalingInit scaling_init(const GridFunction& v, const CouplingParams& prm,
                                const EigenPair& eigen) {
    require_same_layout(v, eigen.phi1);
    const double hN = v.grid().cell_volume();
    double int_phi_p = 0.0, c2 = 0.0;
    for (std::size_t n = 0; n < v.size(); ++n) {
        const double ph = eigen.phi1[n];
        int_phi_p += std::pow(std::abs(ph), prm.p);
        c2 += std::pow(std::max(ph, 0.0), prm.theta + 1.0) * std::pow(std::abs(v[n]), prm.r);
    }
    int_phi_p *= hN;
    c2 *= hN;
    const double c1 = (prm.theta + 1.0) * eigen.lambda1 / prm.p * int_phi_p;
    if (c2 <= 0.0) return {0.0, c1, c2};
    const double t_star =
        std::pow((prm.theta + 1.0) * c2 / (prm.p * c1), 1.0 / (prm.p - 1.0 - prm.theta));
    return {t_star, c1, c2};
}

/// Minimizes I3(.; v) and clamps the minimizer to its positive part — the
/// operator zeta = T(v) solving -div(|grad zeta|^{p-2} grad zeta) = |v|^r zeta^theta.
///
/// The descent starts from t_star phi1 (or the warm start, whichever has the
/// lower I3), so on exit I3(zeta) <= min(0, I3(t_star phi1)) and zeta is
/// nontrivial whenever v is. If clamping raised the energy the descent is
/// restarted from the clamped iterate, so the returned field also satisfies
/// I3(zeta^+) <= I3(zeta_raw).
inline SubsolveResult solve_T(const GridFunction& v, const CouplingParams& prm,
                              const EigenPair& eigen, const SolverOptions& opts,
                              const GridFunction* initial = nullptr) {
    detail::I3Objective obj(v, prm);
    if (linf_norm(v) == 0.0) {
        GridFunction zero(v.grid_ptr());
        return {std::move(zero), true, 0, 0.0, 0.0, 0.0};
    }

    const ScalingInit si = scaling_init(v, prm, eigen);
    GridFunction x0 = scaled(eigen.phi1, si.t_star);
    double f0 = obj.value(x0);
    if (initial) {
        const double fw = obj.value(*initial);
        if (fw < f0) {
            x0 = *initial;
            f0 = fw;
        }
    }
    const double scale = std::max(1.0, norm2(obj.gradient(x0)));
    const double gtol = opts.tol * scale;

    MinimizeResult r = minimize(obj, std::move(x0), gtol, opts);
    GridFunction clamped = positive_part(r.x);
    double clamped_value = obj.value(clamped);
    // Clamping must not increase the energy; if roundoff says otherwise,
    // restart the descent from the clamped point.
    for (int round = 0; round < 4 && clamped_value > r.value; ++round) {
        r = minimize(obj, std::move(clamped), gtol, opts);
        clamped = positive_part(r.x);
        clamped_value = obj.value(clamped);
    }
    return {std::move(clamped), r.converged, r.iterations,
            norm2(obj.gradient(r.x)), clamped_value, r.value};
}

namespace detail {

struct RayleighQuotient {
    double p, eps;

    double numerator(const GridFunction& v) const { return p * p_dirichlet(v, p, eps); }
    double denominator(const GridFunction& v) const {
        double s = 0.0;
        for (double x : v.values()) s += std::pow(std::abs(x), p);
        return s * v.grid().cell_volume();
    }
    double value(const GridFunction& v) const { return numerator(v) / denominator(v); }

    GridFunction gradient(const GridFunction& v) const {
        // grad R = (num' - R den') / den; entries at boundary nodes stay zero.
        const double den = denominator(v);
        const double lam = numerator(v) / den;
        const double hN = v.grid().cell_volume();
        GridFunction gpd = grad_p_dirichlet(v, p, eps);
        std::vector<double> g(v.size(), 0.0);
        for (std::size_t n = 0; n < v.size(); ++n) {
            if (v.grid().is_boundary(n)) continue;
            const double dden = p * signed_pow(v[n], p - 1.0) * hN;
            g[n] = (p * gpd[n] - lam * dden) / den;
        }
        return GridFunction(v.grid_ptr(), std::move(g));
    }
};

}  // namespace detail

/// Projected gradient descent on the p-Rayleigh quotient with L^p
/// renormalization each accepted step, started from the positive product-of-
/// sines bubble. Returns the quotient and the normalized positive minimizer.
inline EigenPair first_eigenpair(std::shared_ptr<const Grid> grid, double p, double eps,
                                 const SolverOptions& opts) {
    opts.validate();
    if (!(p > 1.0)) throw std::invalid_argument("first_eigenpair: p must satisfy p > 1");
    const detail::RayleighQuotient rq{p, eps};

    GridFunction x = GridFunction::sample(grid, [&](const std::array<double, 3>& pos) {
        double s = 1.0;
        for (int a = 0; a < grid->dim(); ++a) {
            const double xi = (pos[a] - grid->lo(a)) / (grid->hi(a) - grid->lo(a));
            s *= std::sin(std::numbers::pi * xi);
        }
        return s;
    });
    auto renormalize = [&](const GridFunction& v) { return scaled(v, 1.0 / lq_norm(v, p)); };
    x = renormalize(x);

    double lam = rq.value(x);
    double step = 1.0;
    bool converged = false;
    bool at_floor = false;
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        GridFunction g = rq.gradient(x);
        double gnorm = norm2(g);
        if (gnorm <= opts.tol * std::max(1.0, lam)) {
            converged = true;
            break;
        }
        // Armijo on the quotient, with a gradient-decrease acceptance once the
        // requested decrease falls below the quotient's ulp.
        const double ulp_guard = 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + lam);
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            GridFunction trial = renormalize(add_scaled(x, -step, g));
            const double ltrial = rq.value(trial);
            if (ltrial <= lam - opts.armijo.c1 * step * gnorm * gnorm) {
                x = std::move(trial);
                lam = ltrial;
                accepted = true;
                break;
            }
            if (ltrial <= lam + ulp_guard && opts.armijo.c1 * step * gnorm * gnorm < ulp_guard) {
                const double gtrial = norm2(rq.gradient(trial));
                if (gtrial < gnorm) {
                    x = std::move(trial);
                    lam = ltrial;
                    accepted = true;
                    break;
                }
            }
            step *= opts.armijo.backtrack;
        }
        if (!accepted) {  // quotient and gradient both flat to roundoff
            at_floor = true;
            break;
        }
        step *= 2.0;
    }

    // Sign convention phi1 > 0; clamp roundoff-negative nodes and renormalize.
    double mean = 0.0;
    for (double v : x.values()) mean += v;
    if (mean < 0.0) x = scaled(x, -1.0);
    x = renormalize(positive_part(x));
    lam = rq.value(x);
    if (!converged) {
        // At the double-precision floor the quotient itself is converged to
        // ulp even when the gradient target was stricter than representable.
        const double floor_guard =
            std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + lam);
        if (!(at_floor && norm2(rq.gradient(x)) <= floor_guard))
            throw std::runtime_error("first_eigenpair: no convergence within max_iters");
    }
    return {lam, std::move(x)};
}

}  // namespace plap
