#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "plap/energy.hpp"
#include "plap/grid.hpp"
#include "plap/subsolvers.hpp"

namespace plap {

/// The a priori bounded quantities tracked along the iteration:
/// ||u||_{L^{r+1}}, ||u||_{W^{1,p}}, ||phi||_{W^{1,p}},
/// int phi^{theta+1} |u|^r, int |u|^{r+1} phi^theta.
struct LemmaQuantities {
    double lq_u_r1;
    double w1p_u;
    double w1p_phi;
    double int_phi_ur;
    double int_ur1_phitheta;
};

inline LemmaQuantities lemma_quantities(const GridFunction& u, const GridFunction& phi,
                                        const CouplingParams& prm) {
    require_same_layout(u, phi);
    const double hN = u.grid().cell_volume();
    double c1 = 0.0, c2 = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) {
        const double au = std::abs(u[n]);
        const double ph = std::max(phi[n], 0.0);
        c1 += std::pow(ph, prm.theta + 1.0) * std::pow(au, prm.r);
        c2 += std::pow(au, prm.r + 1.0) * std::pow(ph, prm.theta);
    }
    return {lq_norm(u, prm.r + 1.0), w1p_seminorm(u, prm.p), w1p_seminorm(phi, prm.p),
            c1 * hN, c2 * hN};
}

/// Relative defect of the energy identity int |grad phi|^p = int |u|^r phi^{theta+1}
/// (testing the phi-equation with phi itself). Near zero only at discrete
/// stationarity, which makes it a convergence certificate.
inline double energy_identity_residual(const GridFunction& u, const GridFunction& phi,
                                       const CouplingParams& prm) {
    require_same_layout(u, phi);
    const double lhs = std::pow(w1p_seminorm(phi, prm.p), prm.p);
    double rhs = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n)
        rhs += std::pow(std::abs(u[n]), prm.r) * std::pow(std::max(phi[n], 0.0), prm.theta + 1.0);
    rhs *= u.grid().cell_volume();
    return std::abs(lhs - rhs) / std::max(1.0, lhs);
}

/// max |u|/phi over interior nodes with phi >= floor; +infinity when no node
/// qualifies. Empirical probe of the comparison hypothesis |u| <= c phi.
inline double comparison_constant(const GridFunction& u, const GridFunction& phi, double floor) {
    require_same_layout(u, phi);
    if (!(floor > 0.0)) throw std::invalid_argument("comparison_constant: floor must be > 0");
    double c = -1.0;
    for (std::size_t n = 0; n < u.size(); ++n) {
        if (u.grid().is_boundary(n) || phi[n] < floor) continue;
        c = std::max(c, std::abs(u[n]) / phi[n]);
    }
    return c < 0.0 ? std::numeric_limits<double>::infinity() : c;
}

struct TraceRow {
    std::size_t k;
    double dphi_rel;   // undamped fixed-point residual, relative W^{1,p}
    double J;
    double res_S;
    double res_T;
    double norm_u_r1;
    double norm_u_w1p;
    double norm_phi_w1p;
    double int_phi_ur;
    double int_ur1_phitheta;
    double energy_id_res;
};

struct SolveTrace {
    std::vector<TraceRow> rows;
};

struct FixedPointOptions {
    double fp_tol = 1e-6;        // relative W^{1,p} change of phi
    std::size_t max_outer = 200;
    double omega = 1.0;          // Picard relaxation, in (0,1]
    enum class Init { zero, scaled_eigen } init = Init::zero;

    void validate() const {
        if (!(fp_tol > 0.0)) throw std::invalid_argument("FixedPointOptions: fp_tol must be > 0");
        if (max_outer < 1) throw std::invalid_argument("FixedPointOptions: max_outer must be >= 1");
        if (!(omega > 0.0 && omega <= 1.0))
            throw std::invalid_argument("FixedPointOptions: omega must lie in (0,1]");
    }
};

struct SolutionPair {
    GridFunction u;
    GridFunction phi;
    bool converged = false;
    SolveTrace trace;
};

/// Picard iteration phi_{k+1} = T(S(phi_k)) from phi_0 = 0 (optionally from
/// t_star phi1, or from an explicit warm start such as a coarser solution).
/// Each outer step records the diagnostics of the current pair.
/// Non-convergence is data, not failure: the trace is returned either way.
inline SolutionPair solve_system(const GridFunction& f, const CouplingParams& prm,
                                 const SolverOptions& opts, const FixedPointOptions& fp,
                                 const GridFunction* phi_init = nullptr,
                                 const GridFunction* u_init = nullptr) {
    fp.validate();
    const auto grid = f.grid_ptr();
    // phi1 only seeds the T-solves; a loose eigen tolerance is enough and
    // keeps the projected gradient descent cheap on fine grids
    SolverOptions eigen_opts = opts;
    eigen_opts.tol = std::max(opts.tol, 1e-6);
    eigen_opts.max_iters = std::max<std::size_t>(opts.max_iters, 20000);
    const EigenPair eigen = first_eigenpair(grid, prm.p, prm.eps, eigen_opts);

    GridFunction phi(grid);
    GridFunction u(grid);
    if (u_init) u = *u_init;
    if (phi_init) {
        phi = positive_part(*phi_init);
    } else if (fp.init == FixedPointOptions::Init::scaled_eigen) {
        const SubsolveResult s0 = solve_S(phi, f, prm, opts);
        phi = scaled(eigen.phi1, scaling_init(s0.field, prm, eigen).t_star);
        u = s0.field;
    }

    SolveTrace trace;
    bool converged = false;
    for (std::size_t k = 1; k <= fp.max_outer; ++k) {
        const SubsolveResult s = solve_S(phi, f, prm, opts, &u);
        u = s.field;
        const SubsolveResult t = solve_T(u, prm, eigen, opts, &phi);

        const double dphi = w1p_seminorm(difference(t.field, phi), prm.p);
        const double nphi = w1p_seminorm(t.field, prm.p);
        const double rel = nphi > 0.0 ? dphi / nphi : (dphi > 0.0 ? dphi : 0.0);

        phi = fp.omega == 1.0 ? t.field : add_scaled(scaled(phi, 1.0 - fp.omega), fp.omega, t.field);

        const LemmaQuantities lq = lemma_quantities(u, phi, prm);
        trace.rows.push_back({k, rel, J_value(u, phi, f, prm), s.grad_norm, t.grad_norm,
                              lq.lq_u_r1, lq.w1p_u, lq.w1p_phi, lq.int_phi_ur,
                              lq.int_ur1_phitheta, energy_identity_residual(u, phi, prm)});
        // a converged pair requires both sub-solves at tolerance, not just a
        // stationary phi-map
        if (rel <= fp.fp_tol && s.converged && t.converged) {
            converged = true;
            break;
        }
    }

    // Re-solve the u-equation so the returned pair is (S(phi), phi).
    const SubsolveResult s_final = solve_S(phi, f, prm, opts, &u);
    return {s_final.field, std::move(phi), converged, std::move(trace)};
}

struct SaddleReport {
    std::size_t n_probes;
    double amplitude;
    double slack;
    double worst_u_margin;    // min over probes of J(u + a w, phi) - J(u, phi)
    double worst_phi_margin;  // max over probes of J(u, phi + a w) - J(u, phi)
    bool pass;
};

namespace detail {

template <class Rng>
GridFunction random_probe_direction(const std::shared_ptr<const Grid>& grid, double p, Rng& rng) {
    std::vector<double> v(grid->node_count());
    for (auto& x : v) x = uniform_pm1(rng);
    GridFunction w(grid, std::move(v));
    const double n = w1p_seminorm(w, p);
    return scaled(w, 1.0 / n);
}

}  // namespace detail

/// Verifies the saddle structure at a converged pair: J must not decrease
/// under u-perturbations nor increase under phi-perturbations, within
/// slack = 1e-8 (1 + |J|) + quad_allowance * amplitude^2.
inline SaddleReport saddle_check(const GridFunction& u, const GridFunction& phi,
                                 const GridFunction& f, const CouplingParams& prm,
                                 std::size_t n_probes, double amplitude,
                                 std::uint64_t seed = 20240901u, double quad_allowance = 1.0) {
    std::mt19937_64 rng(seed);
    const double j0 = J_value(u, phi, f, prm);
    const double slack = 1e-8 * (1.0 + std::abs(j0)) + quad_allowance * amplitude * amplitude;
    double worst_u = std::numeric_limits<double>::infinity();
    double worst_phi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_probes; ++i) {
        const GridFunction w = detail::random_probe_direction(u.grid_ptr(), prm.p, rng);
        worst_u = std::min(worst_u, J_value(add_scaled(u, amplitude, w), phi, f, prm) - j0);
        worst_phi = std::max(worst_phi, J_value(u, add_scaled(phi, amplitude, w), f, prm) - j0);
    }
    const bool pass = worst_u >= -slack && worst_phi <= slack;
    return {n_probes, amplitude, slack, worst_u, worst_phi, pass};
}

}  // namespace plap
