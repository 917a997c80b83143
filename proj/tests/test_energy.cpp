#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "plap/energy.hpp"
#include "plap/grid.hpp"

using namespace plap;

namespace {

GridFunction random_field(const std::shared_ptr<const Grid>& grid, unsigned seed,
                          double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::vector<double> v(grid->node_count());
    for (auto& x : v) x = scale * (2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0);
    return GridFunction(grid, std::move(v));
}

// Literal 2D re-implementation of the energy quadrature: bilinear corner
// differences evaluated cell by cell, no shared code with the library path.
double p_dirichlet_oracle_2d(const GridFunction& u, double p, double eps) {
    const Grid& g = u.grid();
    const double hx = g.spacing(0), hy = g.spacing(1);
    double s = 0.0;
    for (int i = 0; i + 1 < g.nodes(0); ++i)
        for (int j = 0; j + 1 < g.nodes(1); ++j) {
            const double u00 = u[g.node_index(i, j)];
            const double u10 = u[g.node_index(i + 1, j)];
            const double u01 = u[g.node_index(i, j + 1)];
            const double u11 = u[g.node_index(i + 1, j + 1)];
            const double gx = (u10 - u00 + u11 - u01) / (2.0 * hx);
            const double gy = (u01 - u00 + u11 - u10) / (2.0 * hy);
            s += std::pow(gx * gx + gy * gy + eps * eps, 0.5 * p) * hx * hy;
        }
    return s / p;
}

double J_oracle_2d(const GridFunction& z, const GridFunction& eta, const GridFunction& f,
                   const CouplingParams& prm) {
    const Grid& g = z.grid();
    double s = p_dirichlet_oracle_2d(z, prm.p, prm.eps) -
               prm.A * (prm.theta + 1.0) / (prm.p * prm.r) *
                   (prm.p * p_dirichlet_oracle_2d(eta, prm.p, prm.eps));
    const double hN = g.spacing(0) * g.spacing(1);
    for (std::size_t n = 0; n < z.size(); ++n) {
        s += prm.A / prm.r * std::pow(std::max(eta[n], 0.0), prm.theta + 1.0) *
             std::pow(std::abs(z[n]), prm.r) * hN;
        s -= f[n] * z[n] * hN;
    }
    return s;
}

template <class Value>
double fd_directional(const Value& value, const GridFunction& x, const GridFunction& w,
                      double tau) {
    return (value(add_scaled(x, tau, w)) - value(add_scaled(x, -tau, w))) / (2.0 * tau);
}

}  // namespace

TEST_CASE("coupling parameter invariants", "[energy]") {
    CHECK_NOTHROW(CouplingParams(1.5, 1.0, 6.0, 0.3, 1e-8));
    CHECK_NOTHROW(CouplingParams(2.0, 0.0, 2.0, 0.0));  // A = 0: uncoupled control arm
    CHECK_THROWS_AS(CouplingParams(1.0, 1.0, 2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(CouplingParams(2.0, -1.0, 2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(CouplingParams(2.0, 1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(CouplingParams(2.0, 1.0, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CouplingParams(2.0, 1.0, 2.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(CouplingParams(2.0, 1.0, 2.0, 0.0, -1e-3), std::invalid_argument);

    CHECK(CouplingParams(1.5, 1.0, 2.0, 0.0).eps == 1e-8);  // auto eps for p < 2
    CHECK(CouplingParams(2.5, 1.0, 2.0, 0.0).eps == 0.0);
}

TEST_CASE("p-Dirichlet energy", "[energy]") {
    auto g = Grid::unit_box(2, 8);
    CHECK(p_dirichlet(GridFunction(g), 2.0, 0.0) == 0.0);

    const GridFunction u = random_field(g, 3u);
    const double w = w1p_seminorm(u, 2.0);
    CHECK(p_dirichlet(u, 2.0, 0.0) == Catch::Approx(0.5 * w * w).epsilon(1e-13));

    CHECK(p_dirichlet(u, 1.5, 0.1) ==
          Catch::Approx(p_dirichlet_oracle_2d(u, 1.5, 0.1)).epsilon(1e-13));

    // nondecreasing in eps; eps = 0 recovers the plain seminorm power
    double prev = p_dirichlet(u, 1.5, 0.0);
    CHECK(prev == Catch::Approx(std::pow(w1p_seminorm(u, 1.5), 1.5) / 1.5).epsilon(1e-13));
    for (double eps : {1e-4, 1e-2, 1.0}) {
        const double cur = p_dirichlet(u, 1.5, eps);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("p-Dirichlet gradient: zero field and degenerate signalling", "[energy]") {
    auto g = Grid::unit_box(2, 8);
    const GridFunction zero(g);
    CHECK(linf_norm(grad_p_dirichlet(zero, 2.0, 0.0)) == 0.0);
    CHECK(linf_norm(grad_p_dirichlet(zero, 3.0, 0.0)) == 0.0);
    CHECK_THROWS_AS(grad_p_dirichlet(zero, 1.5, 0.0), DegenerateGradientError);
    CHECK_NOTHROW(grad_p_dirichlet(zero, 1.5, 1e-8));
}

TEST_CASE("finite differences confirm the analytic gradients", "[energy]") {
    auto g = Grid::unit_box(2, 8);
    const double tau = 1e-6;
    std::mt19937_64 seed_rng(17u);

    const GridFunction f = random_field(g, 100u, 2.0);
    for (auto [p, eps] : {std::pair{1.5, 1e-2}, {2.0, 0.0}, {3.0, 0.0}}) {
        const CouplingParams prm(p, 1.7, 3.0, 0.4, eps);
        for (int trial = 0; trial < 4; ++trial) {
            const unsigned s = static_cast<unsigned>(seed_rng());
            const GridFunction x = random_field(g, s);
            GridFunction w = random_field(g, s + 1);
            w = scaled(w, 1.0 / norm2(w));

            const double fd_pd = fd_directional(
                [&](const GridFunction& z) { return p_dirichlet(z, p, eps); }, x, w, tau);
            CHECK(fd_pd == Catch::Approx(dot(grad_p_dirichlet(x, p, eps), w))
                               .epsilon(1e-5).margin(1e-9));

            const GridFunction psi = random_field(g, s + 2);
            const double fd_i1 = fd_directional(
                [&](const GridFunction& z) { return I1_value(z, psi, f, prm); }, x, w, tau);
            CHECK(fd_i1 == Catch::Approx(dot(I1_grad(x, psi, f, prm), w))
                               .epsilon(1e-5).margin(1e-9));

            // I3 probed at strictly positive eta per its kink convention
            const GridFunction eta = add_scaled(positive_part(random_field(g, s + 3)), 1.0,
                                                GridFunction::sample(g, [](const auto&) {
                                                    return 0.5;
                                                }));
            const GridFunction v = random_field(g, s + 4);
            const double fd_i3 = fd_directional(
                [&](const GridFunction& z) { return I3_value(z, v, prm); }, eta, w, tau);
            CHECK(fd_i3 == Catch::Approx(dot(I3_grad(eta, v, prm), w))
                               .epsilon(1e-5).margin(1e-9));
        }
    }
}

TEST_CASE("J value and its decomposition", "[energy]") {
    auto g = Grid::unit_box(2, 8);
    // eps = 0 here: values (unlike gradients) never need the regularization,
    // and the zero-field identities below hold exactly only without it
    const CouplingParams prm(1.5, 2.0, 6.0, 0.3, 0.0);
    const GridFunction zero(g);
    const GridFunction f = random_field(g, 40u, 3.0);
    const GridFunction z = random_field(g, 41u);
    const GridFunction eta = random_field(g, 42u);

    CHECK(J_value(zero, zero, f, prm) == 0.0);

    // z = 0 forces J = -A(theta+1)/(pr) int |grad eta|^p <= 0
    const double j0 = J_value(zero, eta, f, prm);
    CHECK(j0 <= 0.0);
    CHECK(j0 == Catch::Approx(-prm.A * (prm.theta + 1.0) / (prm.p * prm.r) * prm.p *
                              p_dirichlet(eta, prm.p, prm.eps)).epsilon(1e-13));

    CHECK(J_value(z, eta, f, prm) == Catch::Approx(J_oracle_2d(z, eta, f, prm)).epsilon(1e-12));

    // J(z, eta) = I1(z; eta, f) - A(theta+1)/(pr) int |grad eta|^p, same quadrature
    const double expected = I1_value(z, eta, f, prm) -
                            prm.A * (prm.theta + 1.0) / (prm.p * prm.r) * prm.p *
                                p_dirichlet(eta, prm.p, prm.eps);
    CHECK(J_value(z, eta, f, prm) == Catch::Approx(expected).epsilon(1e-13));
}

TEST_CASE("I1 is convex along segments", "[energy]") {
    auto g = Grid::unit_box(2, 8);
    const CouplingParams prm(1.5, 1.0, 4.0, 0.2, 1e-6);
    const GridFunction f = random_field(g, 50u, 2.0);
    const GridFunction psi = random_field(g, 51u);
    for (unsigned s = 0; s < 8; ++s) {
        const GridFunction z1 = random_field(g, 60u + s);
        const GridFunction z2 = random_field(g, 70u + s);
        const GridFunction mid = scaled(add_scaled(z1, 1.0, z2), 0.5);
        const double lhs = I1_value(mid, psi, f, prm);
        const double rhs = 0.5 * (I1_value(z1, psi, f, prm) + I1_value(z2, psi, f, prm));
        CHECK(lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("positive-part clamping never raises I3 on 2D grids", "[energy]") {
    // cellwise the center gradient depends only on the two diagonal
    // differences, and clamping is 1-Lipschitz on each
    auto g = Grid::unit_box(2, 8);
    const CouplingParams prm(1.5, 1.0, 6.0, 0.3, 1e-8);
    for (unsigned s = 0; s < 16; ++s) {
        const GridFunction v = random_field(g, 200u + s, 2.0);
        const GridFunction eta = random_field(g, 300u + s, 3.0);
        CHECK(I3_value(positive_part(eta), v, prm) <=
              I3_value(eta, v, prm) + 1e-12 * (1.0 + std::abs(I3_value(eta, v, prm))));
    }
}

TEST_CASE("maximizing J in its second slot is minimizing I3", "[energy]") {
    // (A/r) I3(eta) = -J(v, eta) + (1/p) int |grad v|^p - int f v
    auto g = Grid::unit_box(2, 8);
    const CouplingParams prm(1.5, 2.5, 5.0, 0.2, 1e-8);
    const GridFunction f = random_field(g, 80u, 2.0);
    const GridFunction v = random_field(g, 81u);
    const double hN = g->cell_volume();
    double fv = 0.0;
    for (std::size_t n = 0; n < v.size(); ++n) fv += f[n] * v[n] * hN;
    const double offset = p_dirichlet(v, prm.p, prm.eps) - fv;
    for (unsigned s = 0; s < 6; ++s) {
        const GridFunction eta = random_field(g, 90u + s);
        CHECK(prm.A / prm.r * I3_value(eta, v, prm) ==
              Catch::Approx(-J_value(v, eta, f, prm) + offset).epsilon(1e-11).margin(1e-12));
    }
}
