#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "plap/data.hpp"
#include "plap/energy.hpp"
#include "plap/fixedpoint.hpp"
#include "plap/grid.hpp"
#include "plap/minimize.hpp"

namespace plap {

/// Flat key=value run configuration ('#' starts a comment). Unknown keys are
/// rejected by name; component invariants are enforced when the grid, the
/// coupling parameters, or the datum are built.
struct RunConfig {
    int dim = 2;
    std::array<int, 3> cells{32, 32, 32};
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> hi{1.0, 1.0, 1.0};

    double p = 2.0;
    double A = 1.0;
    double r = 2.0;
    double theta = 0.0;
    double eps = CouplingParams::kAutoEps;

    SolverOptions solver{};
    FixedPointOptions fixed_point{};

    std::string data_kind = "smooth";  // smooth | singular
    double amplitude = 1.0;
    double alpha = 0.0;
    std::array<double, 3> center{-1.0, -1.0, -1.0};  // <0 on axis 0 = auto
    double cap_radius = 0.0;                          // 0 = auto (h/2)

    std::uint64_t seed = 0;
    std::string out_dir;

    static RunConfig parse(std::istream& is);
    static RunConfig parse_file(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot open config file: " + path);
        return parse(f);
    }

    std::shared_ptr<const Grid> make_grid() const {
        std::array<int, 3> nodes{cells[0] + 1, cells[1] + 1, cells[2] + 1};
        return std::make_shared<const Grid>(dim, nodes, lo, hi);
    }

    CouplingParams make_params() const { return CouplingParams(p, A, r, theta, eps); }

    GridFunction make_data(std::shared_ptr<const Grid> grid) const {
        if (data_kind == "smooth") return make_smooth_f(std::move(grid), amplitude);
        if (data_kind == "singular") {
            auto c = center;
            if (c[0] < 0.0) c = default_singularity_center(*grid);
            const double cap = cap_radius > 0.0 ? cap_radius : 0.5 * grid->spacing(0);
            return make_singular_f(std::move(grid), alpha, c, cap);
        }
        throw std::invalid_argument("data must be 'smooth' or 'singular', got '" + data_kind + "'");
    }
};

namespace detail {

inline Method parse_method(const std::string& s) {
    if (s == "gradient_descent") return Method::gradient_descent;
    if (s == "nonlinear_cg") return Method::nonlinear_cg;
    if (s == "newton_damped") return Method::newton_damped;
    throw std::invalid_argument("unknown method '" + s + "'");
}

}  // namespace detail

inline RunConfig RunConfig::parse(std::istream& is) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string trimmed;
        for (char ch : line)
            if (!std::isspace(static_cast<unsigned char>(ch))) trimmed += ch;
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key=value");
        const std::string key = trimmed.substr(0, eq);
        const std::string val = trimmed.substr(eq + 1);
        auto as_double = [&] {
            try {
                return std::stod(val);
            } catch (...) {
                throw std::runtime_error("config key '" + key + "': bad number '" + val + "'");
            }
        };
        auto as_int = [&] { return static_cast<int>(std::llround(as_double())); };

        if (key == "N") cfg.dim = as_int();
        else if (key == "cells") cfg.cells = {as_int(), as_int(), as_int()};
        else if (key == "cells_x") cfg.cells[0] = as_int();
        else if (key == "cells_y") cfg.cells[1] = as_int();
        else if (key == "cells_z") cfg.cells[2] = as_int();
        else if (key == "lo_x") cfg.lo[0] = as_double();
        else if (key == "lo_y") cfg.lo[1] = as_double();
        else if (key == "lo_z") cfg.lo[2] = as_double();
        else if (key == "hi_x") cfg.hi[0] = as_double();
        else if (key == "hi_y") cfg.hi[1] = as_double();
        else if (key == "hi_z") cfg.hi[2] = as_double();
        else if (key == "p") cfg.p = as_double();
        else if (key == "A") cfg.A = as_double();
        else if (key == "r") cfg.r = as_double();
        else if (key == "theta") cfg.theta = as_double();
        else if (key == "eps") cfg.eps = as_double();
        else if (key == "tol") cfg.solver.tol = as_double();
        else if (key == "max_iters") cfg.solver.max_iters = static_cast<std::size_t>(as_int());
        else if (key == "armijo_c1") cfg.solver.armijo.c1 = as_double();
        else if (key == "backtrack") cfg.solver.armijo.backtrack = as_double();
        else if (key == "method") cfg.solver.method = detail::parse_method(val);
        else if (key == "fp_tol") cfg.fixed_point.fp_tol = as_double();
        else if (key == "max_outer") cfg.fixed_point.max_outer = static_cast<std::size_t>(as_int());
        else if (key == "omega") cfg.fixed_point.omega = as_double();
        else if (key == "fp_init")
            cfg.fixed_point.init = val == "scaled_eigen" ? FixedPointOptions::Init::scaled_eigen
                                                         : FixedPointOptions::Init::zero;
        else if (key == "data") cfg.data_kind = val;
        else if (key == "amplitude") cfg.amplitude = as_double();
        else if (key == "alpha") cfg.alpha = as_double();
        else if (key == "center_x") cfg.center[0] = as_double();
        else if (key == "center_y") cfg.center[1] = as_double();
        else if (key == "center_z") cfg.center[2] = as_double();
        else if (key == "cap_radius") cfg.cap_radius = as_double();
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(val));
        else if (key == "out") cfg.out_dir = val;
        else
            throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" +
                                     key + "'");
    }
    return cfg;
}

}  // namespace plap
