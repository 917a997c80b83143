// plap — command-line front end for the coupled p-Laplacian system solver.
//
// Subcommands:
//   exponents  evaluate all summability exponents and classify the regime
//   solve      run the fixed-point solver on a config; dump fields + trace CSV
//   sweep      re-run a config along one axis (h | m | alpha | A), long CSV
//   eigen      first eigenpair of -Delta_p on a box grid
//   check      built-in verification battery

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "plap/check.hpp"
#include "plap/data.hpp"
#include "plap/energy.hpp"
#include "plap/exponents.hpp"
#include "plap/fixedpoint.hpp"
#include "plap/grid.hpp"
#include "plap/run_config.hpp"
#include "plap/subsolvers.hpp"
#include "plap/trace_csv.hpp"

namespace {

constexpr const char* kSweepHeader =
    "axis,value,status,outer_iters,norm_u_r1,norm_u_w1p,norm_phi_w1p,int_phi_ur,"
    "int_ur1_phitheta,comparison_c,energy_id_res";

void write_field_file(const std::filesystem::path& path, const plap::GridFunction& u) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    plap::write_field(os, u);
}

int run_exponents(int N, double p, double r, double theta, double m, const std::string& csv_path) {
    const plap::RegimeReport rep = plap::classify(plap::RegimeInput(N, p, r, theta, m));
    auto row = [](const std::string& k, double v) {
        std::cout << "  " << std::left << std::setw(18) << k << std::setprecision(12) << v << '\n';
    };
    std::cout << "regime: " << plap::regime_name(rep.regime) << '\n';
    row("p*", rep.pstar);
    row("(p*)'", rep.pstar_dual);
    row("(r+1)'", rep.r1_dual);
    row("m1", rep.m1);
    row("m2", rep.m2);
    row("s", rep.s);
    row("gamma", rep.gamma);
    if (rep.t) row("t", *rep.t);
    else std::cout << "  " << std::left << std::setw(18) << "t" << "undefined (m >= N/p)\n";
    row("r-threshold", rep.r_thresh);
    std::cout << "  " << std::left << std::setw(18) << "best summability";
    switch (rep.best) {
        case plap::BestSummability::bounded: std::cout << "L^inf (bounded)\n"; break;
        case plap::BestSummability::lebesgue_s:
            std::cout << "L^s, s = " << std::setprecision(12) << rep.s << '\n';
            break;
        case plap::BestSummability::lebesgue_t:
            std::cout << "L^t, t = " << std::setprecision(12) << *rep.t << '\n';
            break;
        case plap::BestSummability::none: std::cout << "none established\n"; break;
    }
    std::cout << "satisfied hypotheses:\n";
    if (rep.satisfied.empty()) std::cout << "  (none)\n";
    for (const auto& h : rep.satisfied) std::cout << "  " << h << '\n';

    if (!csv_path.empty()) {
        std::ofstream os(csv_path);
        os << "N,p,r,theta,m,regime,pstar,pstar_dual,r1_dual,m1,m2,s,gamma,t,r_threshold\n";
        os.precision(17);
        os << N << ',' << p << ',' << r << ',' << theta << ',' << m << ','
           << plap::regime_name(rep.regime) << ',' << rep.pstar << ',' << rep.pstar_dual << ','
           << rep.r1_dual << ',' << rep.m1 << ',' << rep.m2 << ',' << rep.s << ',' << rep.gamma
           << ',' << (rep.t ? *rep.t : std::numeric_limits<double>::quiet_NaN()) << ','
           << rep.r_thresh << '\n';
    }
    return 0;
}

int run_solve(const plap::RunConfig& cfg, const std::filesystem::path& out) {
    std::filesystem::create_directories(out);
    const auto grid = cfg.make_grid();
    const plap::CouplingParams prm = cfg.make_params();
    const plap::GridFunction f = cfg.make_data(grid);

    const plap::SolutionPair sol = plap::solve_system(f, prm, cfg.solver, cfg.fixed_point);
    write_field_file(out / "u.field", sol.u);
    write_field_file(out / "phi.field", sol.phi);
    {
        std::ofstream os(out / "trace.csv");
        if (!os) throw std::runtime_error("cannot open for writing: " + (out / "trace.csv").string());
        plap::write_trace_csv(os, sol.trace);
    }
    const auto& last = sol.trace.rows.back();
    std::cout << (sol.converged ? "converged" : "NOT converged") << " after "
              << sol.trace.rows.size() << " outer iterations\n"
              << "  J = " << last.J << ", energy identity residual = " << last.energy_id_res
              << "\n  outputs in " << out.string() << '\n';
    return sol.converged ? 0 : 2;
}

struct SweepRow {
    double value;
    std::string csv;
};

SweepRow run_sweep_point(plap::RunConfig cfg, const std::string& axis, double value) {
    if (axis == "h") {
        const int cells = value < 1.0 ? static_cast<int>(std::llround(1.0 / value))
                                      : static_cast<int>(std::llround(value));
        cfg.cells = {cells, cells, cells};
    } else if (axis == "m") {
        // Roughness tied to the target class: alpha just inside L^m membership.
        cfg.alpha = 0.98 * static_cast<double>(cfg.dim) / value;
    } else if (axis == "alpha") {
        cfg.alpha = value;
    } else if (axis == "A") {
        cfg.A = value;
    } else {
        throw std::runtime_error("unknown sweep axis '" + axis + "' (expected h|m|alpha|A)");
    }

    std::ostringstream os;
    os.precision(17);
    os << axis << ',' << value << ',';
    try {
        const auto grid = cfg.make_grid();
        const plap::CouplingParams prm = cfg.make_params();
        const plap::GridFunction f = cfg.make_data(grid);
        const plap::SolutionPair sol = plap::solve_system(f, prm, cfg.solver, cfg.fixed_point);
        const plap::LemmaQuantities lq = plap::lemma_quantities(sol.u, sol.phi, prm);
        const double floor = 1e-6 * std::max(plap::linf_norm(sol.phi),
                                             std::numeric_limits<double>::min());
        const double comp = plap::comparison_constant(sol.u, sol.phi, floor);
        os << (sol.converged ? "ok" : "non_converged") << ',' << sol.trace.rows.size() << ','
           << lq.lq_u_r1 << ',' << lq.w1p_u << ',' << lq.w1p_phi << ',' << lq.int_phi_ur << ','
           << lq.int_ur1_phitheta << ',' << comp << ','
           << plap::energy_identity_residual(sol.u, sol.phi, prm);
    } catch (const std::exception& e) {
        std::string what = e.what();
        for (auto& c : what)
            if (c == ',' || c == '\n') c = ';';
        os << "error:" << what << ",0,nan,nan,nan,nan,nan,nan,nan";
    }
    return {value, os.str()};
}

int run_sweep(const plap::RunConfig& cfg, const std::string& axis, const std::vector<double>& values,
              const std::filesystem::path& out, unsigned jobs) {
    std::filesystem::create_directories(out);
    std::vector<SweepRow> rows(values.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < values.size(); ++i)
            rows[i] = run_sweep_point(cfg, axis, values[i]);
    } else {
        std::vector<std::future<SweepRow>> fut;
        fut.reserve(values.size());
        for (double v : values)
            fut.push_back(std::async(std::launch::async, run_sweep_point, cfg, axis, v));
        for (std::size_t i = 0; i < fut.size(); ++i) rows[i] = fut[i].get();
    }
    const auto path = out / "sweep.csv";
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << kSweepHeader << '\n';
    for (const auto& r : rows) os << r.csv << '\n';
    std::cout << "wrote " << rows.size() << " rows to " << path.string() << '\n';
    return 0;
}

int run_eigen(int N, int cells, double p, double eps, double tol, const std::string& out_path) {
    auto grid = plap::Grid::unit_box(N, cells);
    plap::SolverOptions opts;
    opts.tol = tol;
    opts.max_iters = 50000;
    const plap::EigenPair ep =
        plap::first_eigenpair(grid, p, eps == plap::CouplingParams::kAutoEps ? (p < 2.0 ? 1e-8 : 0.0) : eps,
                              opts);
    std::cout << "lambda1 = " << std::setprecision(12) << ep.lambda1 << '\n';
    if (!out_path.empty()) {
        write_field_file(out_path, ep.phi1);
        std::cout << "phi1 written to " << out_path << '\n';
    }
    return 0;
}

int run_check(double eps_override) {
    plap::CheckOptions co;
    co.eps_override = eps_override;
    const auto results = plap::run_check_battery(co);
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << std::left << std::setw(30) << r.name
                  << " measured " << std::scientific << std::setprecision(3) << r.measured
                  << "  tol " << r.tolerance << std::defaultfloat << '\n';
        all = all && r.pass;
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled p-Laplacian system solver"};
    app.require_subcommand(1);

    int N = 2;
    double p = 2.0, r = 2.0, theta = 0.0, m = 2.0;
    std::string csv_path;
    auto* exp_cmd = app.add_subcommand("exponents", "summability exponents and regime");
    exp_cmd->add_option("--N", N, "space dimension");
    exp_cmd->add_option("--p", p, "p-Laplacian exponent");
    exp_cmd->add_option("--r", r, "coupling power r");
    exp_cmd->add_option("--theta", theta, "coupling power theta");
    exp_cmd->add_option("--m", m, "Lebesgue exponent of the datum");
    exp_cmd->add_option("--csv", csv_path, "also write one CSV row here");

    std::string config_path, out_dir = ".";
    auto* solve_cmd = app.add_subcommand("solve", "fixed-point solve from a config file");
    solve_cmd->add_option("--config", config_path, "key=value config file")->required();
    solve_cmd->add_option("--out", out_dir, "output directory");

    std::string axis;
    std::vector<double> values;
    unsigned jobs = 1;
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "one-axis experiment sweep");
    sweep_cmd->add_option("--config", config_path, "key=value config file")->required();
    sweep_cmd->add_option("--axis", axis, "h | m | alpha | A")->required();
    sweep_cmd->add_option("--values", values, "comma-separated axis values")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--out", out_dir, "output directory");
    sweep_cmd->add_option("--jobs", jobs, "concurrent runs");
    sweep_cmd->add_option("--seed", seed_override, "override the config RNG seed")
        ->each([&](const std::string&) { seed_set = true; });

    int eig_cells = 64;
    double eig_eps = plap::CouplingParams::kAutoEps, eig_tol = 1e-8;
    std::string eig_out;
    auto* eigen_cmd = app.add_subcommand("eigen", "first eigenpair of -Delta_p");
    eigen_cmd->add_option("--N", N, "space dimension");
    eigen_cmd->add_option("--cells", eig_cells, "cells per axis");
    eigen_cmd->add_option("--p", p, "p-Laplacian exponent");
    eigen_cmd->add_option("--eps", eig_eps, "gradient regularization");
    eigen_cmd->add_option("--tol", eig_tol, "gradient tolerance");
    eigen_cmd->add_option("--out", eig_out, "dump phi1 to this file");

    double check_eps = plap::CouplingParams::kAutoEps;
    auto* check_cmd = app.add_subcommand("check", "built-in verification battery");
    check_cmd->add_option("--eps", check_eps, "override gradient regularization");

    CLI11_PARSE(app, argc, argv);

    try {
        if (exp_cmd->parsed()) return run_exponents(N, p, r, theta, m, csv_path);
        if (solve_cmd->parsed()) return run_solve(plap::RunConfig::parse_file(config_path), out_dir);
        if (sweep_cmd->parsed()) {
            plap::RunConfig cfg = plap::RunConfig::parse_file(config_path);
            if (seed_set) cfg.seed = seed_override;
            return run_sweep(cfg, axis, values, out_dir, jobs);
        }
        if (eigen_cmd->parsed()) return run_eigen(N, eig_cells, p, eig_eps, eig_tol, eig_out);
        if (check_cmd->parsed()) return run_check(check_eps);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
