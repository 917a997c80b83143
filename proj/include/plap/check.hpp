#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "plap/data.hpp"
#include "plap/energy.hpp"
#include "plap/exponents.hpp"
#include "plap/grid.hpp"
#include "plap/subsolvers.hpp"

namespace plap {

struct CheckResult {
    std::string name;
    double tolerance;
    double measured;
    bool pass;
};

struct CheckOptions {
    // Overrides the gradient regularization in every eps-aware check. The
    // gradient/finite-difference checks stay consistent under any eps (they
    // compare an energy against its own derivative), while the analytic
    // oracles (homogeneity, eigenvalue) detect a corrupted eps.
    double eps_override = CouplingParams::kAutoEps;
    std::uint64_t seed = 7u;
};

namespace detail {

inline GridFunction random_interior(const std::shared_ptr<const Grid>& grid, std::mt19937_64& rng) {
    std::vector<double> v(grid->node_count());
    for (auto& x : v) x = uniform_pm1(rng);
    return GridFunction(grid, std::move(v));
}

template <class Value, class Gradient>
double fd_gradient_mismatch(const Value& value, const Gradient& gradient, const GridFunction& x,
                            std::mt19937_64& rng, int n_dirs) {
    const double tau = 1e-6;
    double worst = 0.0;
    const GridFunction g = gradient(x);
    for (int i = 0; i < n_dirs; ++i) {
        GridFunction w = random_interior(x.grid_ptr(), rng);
        w = scaled(w, 1.0 / norm2(w));
        const double fd = (value(add_scaled(x, tau, w)) - value(add_scaled(x, -tau, w))) / (2.0 * tau);
        const double an = dot(g, w);
        worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
    }
    return worst;
}

}  // namespace detail

/// Self-verification battery behind the `check` CLI command. Each entry
/// reports its tolerance and measured value; the battery passes iff all do.
/// A check that throws is recorded as failed, not propagated.
inline std::vector<CheckResult> run_check_battery(const CheckOptions& copts = {}) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(copts.seed);
    auto pick_eps = [&](double dflt) {
        return copts.eps_override == CouplingParams::kAutoEps ? dflt : copts.eps_override;
    };
    auto guarded = [&out](const char* name, double tol, auto&& body) {
        try {
            const double measured = body();
            out.push_back({name, tol, measured, measured <= tol});
        } catch (const std::exception&) {
            out.push_back({name, tol, std::numeric_limits<double>::quiet_NaN(), false});
        }
    };

    // closed-form identities among the summability exponents
    guarded("exponent-identities", 1e-12, [&] {
        double worst = 0.0;
        for (double r : {1.5, 3.0, 6.0, 11.0}) {
            for (double m : {1.05, 1.3, 2.0}) {
                worst = std::max(worst, std::abs(s_exponent(m, 1.5, r) -
                                                 (r + gamma_exponent(m, 1.5, r))));
            }
            worst = std::max(worst, std::abs(m2_exponent(3.0, 2.0, r, 0.0) -
                                             m1_exponent(3.0, 2.0, r)));
            worst = std::max(worst, std::abs(m1_exponent(3.0, 2.0, r) - 6.0 * r / (5.0 + 4.0 * r)));
            worst = std::max(worst, std::abs(s_exponent(dual_exponent(r + 1.0), 2.0, r) - (r + 1.0)));
        }
        worst = std::max(worst, std::abs(r_threshold(3.0, 2.0) - (sobolev_conjugate(3.0, 2.0) - 1.0)));
        worst = std::max(worst,
                         std::abs(*t_exponent(3.0, dual_exponent(sobolev_conjugate(3.0, 2.0)), 2.0) -
                                  sobolev_conjugate(3.0, 2.0)));
        return worst;
    });

    // finite differences against the analytic gradients
    guarded("gradient-finite-difference", 1e-5, [&] {
        auto grid = Grid::unit_box(2, 8);
        const GridFunction f = make_smooth_f(grid, 3.0);
        double worst = 0.0;
        for (double p : {1.5, 3.0}) {
            const double eps = pick_eps(p < 2.0 ? 1e-2 : 0.0);
            const CouplingParams prm(p, 2.0, 3.0, 0.25, eps);
            const GridFunction x = detail::random_interior(grid, rng);
            const GridFunction psi = detail::random_interior(grid, rng);
            worst = std::max(
                worst, detail::fd_gradient_mismatch(
                           [&](const GridFunction& z) { return p_dirichlet(z, p, eps); },
                           [&](const GridFunction& z) { return grad_p_dirichlet(z, p, eps); }, x,
                           rng, 5));
            worst = std::max(
                worst, detail::fd_gradient_mismatch(
                           [&](const GridFunction& z) { return I1_value(z, psi, f, prm); },
                           [&](const GridFunction& z) { return I1_grad(z, psi, f, prm); }, x, rng, 5));
            const GridFunction eta = positive_part(detail::random_interior(grid, rng));
            worst = std::max(
                worst, detail::fd_gradient_mismatch(
                           [&](const GridFunction& z) { return I3_value(z, x, prm); },
                           [&](const GridFunction& z) { return I3_grad(z, x, prm); },
                           add_scaled(eta, 0.5, make_smooth_f(grid, 1.0)), rng, 5));
        }
        return worst;
    });

    // midpoint quadrature integrates the unit volume exactly
    guarded("quadrature-volume", 1e-14, [&] {
        auto grid = Grid::unit_box(2, 13);
        std::vector<double> ones(grid->cell_count(), 1.0);
        return std::abs(integrate_cells(ones, *grid) - 1.0);
    });

    // (p-1)-homogeneity of the p-Laplace sub-solve, p = 3 (eps-sensitive)
    guarded("p-homogeneity-p3", 1e-4, [&] {
        auto grid = Grid::unit_box(3, 6);
        const CouplingParams prm(3.0, 1.0, 2.0, 0.0, pick_eps(0.0));
        SolverOptions opts;
        opts.tol = 1e-11;
        const GridFunction psi(grid);
        const GridFunction f = make_smooth_f(grid, 1.0);
        const double lambda = 7.0;
        const GridFunction v1 = solve_S(psi, f, prm, opts).field;
        const GridFunction v2 = solve_S(psi, scaled(f, lambda), prm, opts).field;
        const GridFunction pred = scaled(v1, std::pow(lambda, 1.0 / (prm.p - 1.0)));
        return w1p_seminorm(difference(v2, pred), prm.p) /
               std::max(1e-300, w1p_seminorm(v2, prm.p));
    });

    // Poisson oracle: p = 2 solve against the separated-variables solution;
    // reported as the deviation of the error ratio from the O(h^2) value 4
    guarded("poisson-oracle-ratio", 1.0, [&] {
        const double pi = std::numbers::pi;
        double err[2];
        int idx = 0;
        for (int cells : {16, 32}) {
            auto grid = Grid::unit_box(2, cells);
            const CouplingParams prm(2.0, 1.0, 2.0, 0.0, pick_eps(0.0));
            SolverOptions opts;
            opts.tol = 1e-11;
            const GridFunction f = GridFunction::sample(grid, [&](const std::array<double, 3>& x) {
                return 2.0 * pi * pi * std::sin(pi * x[0]) * std::sin(pi * x[1]);
            });
            const GridFunction u = solve_S(GridFunction(grid), f, prm, opts).field;
            const GridFunction exact = GridFunction::sample(grid, [&](const std::array<double, 3>& x) {
                return std::sin(pi * x[0]) * std::sin(pi * x[1]);
            });
            err[idx++] = linf_norm(difference(u, exact));
        }
        return std::abs(err[0] / err[1] - 4.0);
    });

    // first eigenvalue of -Laplace on the unit square
    guarded("eigenvalue-oracle", 0.02, [&] {
        auto grid = Grid::unit_box(2, 32);
        SolverOptions opts;
        opts.tol = 1e-9;
        opts.max_iters = 20000;
        const EigenPair ep = first_eigenpair(grid, 2.0, pick_eps(0.0), opts);
        const double exact = 2.0 * std::numbers::pi * std::numbers::pi;
        return std::abs(ep.lambda1 - exact) / exact;
    });

    return out;
}

}  // namespace plap
