#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "plap/grid.hpp"

using namespace plap;
using std::numbers::pi;

namespace {

GridFunction random_field(const std::shared_ptr<const Grid>& grid, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> v(grid->node_count());
    for (auto& x : v) x = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
    return GridFunction(grid, std::move(v));
}

}  // namespace

TEST_CASE("grid structure and boundary mask", "[grid]") {
    auto g = Grid::unit_box(2, 8);
    CHECK(g->dim() == 2);
    CHECK(g->nodes(0) == 9);
    CHECK(g->cells(0) == 8);
    CHECK(g->node_count() == 81);
    CHECK(g->cell_count() == 64);
    CHECK(g->interior_count() == 49);
    CHECK(g->spacing(0) == Catch::Approx(1.0 / 8.0));
    CHECK(g->cell_volume() == Catch::Approx(1.0 / 64.0));

    std::size_t boundary_nodes = 0;
    for (std::size_t n = 0; n < g->node_count(); ++n) {
        const auto c = g->node_multi_index(n);
        const bool on_face = c[0] == 0 || c[0] == 8 || c[1] == 0 || c[1] == 8;
        CHECK(g->is_boundary(n) == on_face);
        boundary_nodes += g->is_boundary(n);
    }
    CHECK(boundary_nodes == 81 - 49);

    CHECK_THROWS_AS(Grid(2, {2, 5, 1}, {0, 0, 0}, {1, 1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Grid(4, {5, 5, 5}, {0, 0, 0}, {1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Grid(2, {5, 5, 1}, {0, 0, 0}, {0, 1, 0}), std::invalid_argument);
}

TEST_CASE("grid function enforces zero boundary and finite values", "[grid]") {
    auto g = Grid::unit_box(2, 4);
    std::vector<double> v(g->node_count(), 1.0);
    GridFunction u(g, v);
    for (std::size_t n = 0; n < u.size(); ++n)
        CHECK(u[n] == (g->is_boundary(n) ? 0.0 : 1.0));

    v[12] = std::numeric_limits<double>::quiet_NaN();  // interior node
    CHECK_THROWS_AS(GridFunction(g, v), std::invalid_argument);
}

TEST_CASE("cell gradient is zero on the zero field", "[grid]") {
    auto g = Grid::unit_box(2, 6);
    const CellField cf = cell_gradient(GridFunction(g));
    for (const auto& grad : cf.entries()) {
        CHECK(grad[0] == 0.0);
        CHECK(grad[1] == 0.0);
    }
}

TEST_CASE("cell gradient reproduces affine fields on fully interior cells", "[grid]") {
    auto g2 = Grid::unit_box(2, 8);
    const GridFunction ux = GridFunction::sample(g2, [](const std::array<double, 3>& x) {
        return x[0];
    });
    const CellField cf = cell_gradient(ux);
    std::size_t cell = 0;
    for (int i = 0; i < g2->cells(0); ++i)
        for (int j = 0; j < g2->cells(1); ++j, ++cell) {
            if (i < 1 || i >= g2->cells(0) - 1 || j < 1 || j >= g2->cells(1) - 1) continue;
            CHECK(cf[cell][0] == Catch::Approx(1.0).margin(1e-14));
            CHECK(cf[cell][1] == Catch::Approx(0.0).margin(1e-14));
        }

    auto g3 = Grid::unit_box(3, 5);
    const GridFunction w = GridFunction::sample(g3, [](const std::array<double, 3>& x) {
        return 2.0 * x[0] - x[1] + 3.0 * x[2];
    });
    const CellField cf3 = cell_gradient(w);
    cell = 0;
    for (int i = 0; i < g3->cells(0); ++i)
        for (int j = 0; j < g3->cells(1); ++j)
            for (int k = 0; k < g3->cells(2); ++k, ++cell) {
                const bool interior = i >= 1 && i < g3->cells(0) - 1 && j >= 1 &&
                                      j < g3->cells(1) - 1 && k >= 1 && k < g3->cells(2) - 1;
                if (!interior) continue;
                CHECK(cf3[cell][0] == Catch::Approx(2.0).margin(1e-13));
                CHECK(cf3[cell][1] == Catch::Approx(-1.0).margin(1e-13));
                CHECK(cf3[cell][2] == Catch::Approx(3.0).margin(1e-13));
            }
}

TEST_CASE("cell gradient matches analytic derivative of sin*sin", "[grid]") {
    auto g = Grid::unit_box(2, 64);
    const GridFunction u = GridFunction::sample(g, [](const std::array<double, 3>& x) {
        return std::sin(pi * x[0]) * std::sin(pi * x[1]);
    });
    const CellField cf = cell_gradient(u);
    const double h = g->spacing(0);
    double worst = 0.0;
    std::size_t cell = 0;
    for (int i = 0; i < g->cells(0); ++i)
        for (int j = 0; j < g->cells(1); ++j, ++cell) {
            const double xc = (i + 0.5) * h, yc = (j + 0.5) * h;
            const double gx = pi * std::cos(pi * xc) * std::sin(pi * yc);
            const double gy = pi * std::sin(pi * xc) * std::cos(pi * yc);
            worst = std::max({worst, std::abs(cf[cell][0] - gx), std::abs(cf[cell][1] - gy)});
        }
    CHECK(worst < 5e-3);
}

TEST_CASE("cell quadrature", "[grid]") {
    auto g = Grid::unit_box(2, 64);
    std::vector<double> ones(g->cell_count(), 1.0);
    CHECK(integrate_cells(ones, *g) == Catch::Approx(1.0).epsilon(1e-14));

    std::vector<double> zeros(g->cell_count(), 0.0);
    CHECK(integrate_cells(zeros, *g) == 0.0);

    // midpoint samples of sin(pi x) sin(pi y): the analytic integral is 4/pi^2
    std::vector<double> w(g->cell_count());
    const double h = g->spacing(0);
    std::size_t cell = 0;
    for (int i = 0; i < g->cells(0); ++i)
        for (int j = 0; j < g->cells(1); ++j, ++cell)
            w[cell] = std::sin(pi * (i + 0.5) * h) * std::sin(pi * (j + 0.5) * h);
    CHECK(integrate_cells(w, *g) == Catch::Approx(4.0 / (pi * pi)).margin(1e-3));

    CHECK_THROWS_AS(integrate_cells(ones, *Grid::unit_box(2, 8)), std::invalid_argument);
}

TEST_CASE("nodal Lq norm", "[grid]") {
    auto g = Grid::unit_box(2, 64);
    CHECK(lq_norm(GridFunction(g), 2.0) == 0.0);

    const GridFunction ones = GridFunction::sample(g, [](const std::array<double, 3>&) {
        return 1.0;
    });
    CHECK(lq_norm(ones, 1.0) == Catch::Approx(1.0).margin(5e-2));

    const GridFunction u = GridFunction::sample(g, [](const std::array<double, 3>& x) {
        return std::sin(pi * x[0]) * std::sin(pi * x[1]);
    });
    CHECK(lq_norm(u, 2.0) == Catch::Approx(0.5).margin(1e-3));

    const GridFunction v = random_field(g, 21u);
    const double n1 = lq_norm(v, 3.5);
    CHECK(lq_norm(scaled(v, -2.5), 3.5) == Catch::Approx(2.5 * n1).epsilon(1e-13));

    CHECK_THROWS_AS(lq_norm(u, 0.9), std::invalid_argument);
}

TEST_CASE("W1p seminorm", "[grid]") {
    auto g = Grid::unit_box(2, 64);
    CHECK(w1p_seminorm(GridFunction(g), 1.5) == 0.0);

    const GridFunction u = GridFunction::sample(g, [](const std::array<double, 3>& x) {
        return std::sin(pi * x[0]) * std::sin(pi * x[1]);
    });
    CHECK(w1p_seminorm(u, 2.0) == Catch::Approx(pi / std::sqrt(2.0)).margin(1e-2));

    const GridFunction v = random_field(g, 22u);
    CHECK(w1p_seminorm(scaled(v, 3.0), 1.5) == Catch::Approx(3.0 * w1p_seminorm(v, 1.5)).epsilon(1e-13));

    CHECK_THROWS_AS(w1p_seminorm(u, 1.0), std::invalid_argument);
}

TEST_CASE("positive and negative parts", "[grid]") {
    auto g = Grid::unit_box(2, 8);
    const GridFunction m3 = GridFunction::sample(g, [](const std::array<double, 3>&) {
        return -3.0;
    });
    CHECK(linf_norm(positive_part(m3)) == 0.0);
    const GridFunction neg = negative_part(m3);
    for (std::size_t n = 0; n < neg.size(); ++n)
        CHECK(neg[n] == (g->is_boundary(n) ? 0.0 : 3.0));

    const GridFunction nn = positive_part(random_field(g, 5u));
    CHECK(linf_norm(difference(positive_part(nn), nn)) == 0.0);

    const GridFunction u = random_field(g, 9u);
    const GridFunction up = positive_part(u), um = negative_part(u);
    for (std::size_t n = 0; n < u.size(); ++n) {
        CHECK(up[n] - um[n] == u[n]);
        CHECK(up[n] + um[n] == std::abs(u[n]));
    }
}

TEST_CASE("field dump round trip", "[grid]") {
    auto g = Grid::unit_box(2, 6);
    const GridFunction u = random_field(g, 33u);
    std::stringstream ss;
    write_field(ss, u);
    const GridFunction back = read_field(ss);
    REQUIRE(back.grid().same_layout(u.grid()));
    for (std::size_t n = 0; n < u.size(); ++n) CHECK(back[n] == u[n]);

    auto g3 = Grid::unit_box(3, 4);
    const GridFunction w = random_field(g3, 34u);
    std::stringstream s3;
    write_field(s3, w);
    const GridFunction back3 = read_field(s3);
    REQUIRE(back3.grid().same_layout(w.grid()));
    for (std::size_t n = 0; n < w.size(); ++n) CHECK(back3[n] == w[n]);

    // single-h header: anisotropic grids are not representable
    auto aniso = std::make_shared<const Grid>(2, std::array<int, 3>{5, 9, 1},
                                              std::array<double, 3>{0, 0, 0},
                                              std::array<double, 3>{1, 1, 0});
    std::stringstream sa;
    CHECK_THROWS_AS(write_field(sa, GridFunction(aniso)), std::invalid_argument);

    std::stringstream bad("plapfield 2 5\n");
    CHECK_THROWS(read_field(bad));
}
