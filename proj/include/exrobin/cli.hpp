#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "exrobin/io.hpp"
#include "exrobin/oracle.hpp"
#include "exrobin/sweep.hpp"

namespace exrobin {

/// Parsed command line / config file of one run.
struct RunConfig {
    std::string command;  // solve | sweep | verify | oracle
    int n = 3;
    double p = 2.0;
    double beta = 1.0;
    std::string weight_spec = "powerlaw:c0=1,l=4";
    double rmax = 0.0;  // 0: default schedule (100, 200, 400)
    double tol = 1e-10;
    double lambda_tol = 1e-8;
    double beta_min = 0.01;
    double beta_max = 100.0;
    int points = 25;
    bool log_spaced = false;
    double gamma = 2.0;
    double delta = 0.0;  // 0: envelope delta from the proof rule
    std::string out, report, plot_data;
};

/// Parses "powerlaw:c0=<v>,l=<v>" or "table:<path>".
inline RadialWeight parse_weight_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    if (kind == "table") {
        if (colon == std::string::npos || colon + 1 >= spec.size())
            throw std::invalid_argument("weight: table form is table:<csv-path>");
        return RadialWeight::from_csv(spec.substr(colon + 1));
    }
    if (kind != "powerlaw")
        throw std::invalid_argument("weight: unknown kind '" + kind +
                                    "', expected powerlaw:c0=<v>,l=<v> or table:<path>");
    double c0 = 1.0, l = 0.0;
    bool have_l = false;
    std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("weight: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const double val = std::stod(item.substr(eq + 1));
        if (key == "c0") c0 = val;
        else if (key == "l") { l = val; have_l = true; }
        else throw std::invalid_argument("weight: unknown key '" + key + "'");
    }
    if (!have_l) throw std::invalid_argument("weight: powerlaw needs l=<v>");
    return RadialWeight::power_law(c0, l);
}

namespace detail {

inline void apply_config_file(RunConfig& rc, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;
    if (!j.is_object()) throw std::invalid_argument("config: expected a flat JSON object");
    for (const auto& [key, val] : j.items()) {
        if (key == "n") rc.n = val.get<int>();
        else if (key == "p") rc.p = val.get<double>();
        else if (key == "beta") rc.beta = val.get<double>();
        else if (key == "weight") rc.weight_spec = val.get<std::string>();
        else if (key == "rmax") rc.rmax = val.get<double>();
        else if (key == "tol") rc.tol = val.get<double>();
        else if (key == "lambda-tol") rc.lambda_tol = val.get<double>();
        else if (key == "beta-min") rc.beta_min = val.get<double>();
        else if (key == "beta-max") rc.beta_max = val.get<double>();
        else if (key == "points") rc.points = val.get<int>();
        else if (key == "log") rc.log_spaced = val.get<bool>();
        else if (key == "gamma") rc.gamma = val.get<double>();
        else if (key == "delta") rc.delta = val.get<double>();
        else if (key == "out") rc.out = val.get<std::string>();
        else if (key == "report") rc.report = val.get<std::string>();
        else if (key == "plot-data") rc.plot_data = val.get<std::string>();
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

}  // namespace detail

/// Builds the RunConfig from argv. Config-file values are applied first,
/// explicit flags override them.
inline RunConfig parse_args(const std::vector<std::string>& args) {
    RunConfig rc;

    // pre-scan for --config so flags can override its values
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a file path");
            detail::apply_config_file(rc, args[i + 1]);
        }
    }

    CLI::App app{"weighted p-Laplacian Robin eigensolver on the exterior unit ball"};
    app.require_subcommand(1);
    std::string config_path;

    auto add_problem_flags = [&](CLI::App* cmd) {
        cmd->add_option("--n", rc.n, "space dimension N");
        cmd->add_option("--p", rc.p, "p-Laplacian exponent, 1 < p < N");
        cmd->add_option("--beta", rc.beta, "Robin parameter (0 = Neumann)");
        cmd->add_option("--weight", rc.weight_spec, "powerlaw:c0=<v>,l=<v> or table:<csv>");
        cmd->add_option("--rmax", rc.rmax, "final truncation radius (schedule R/4, R/2, R)");
        cmd->add_option("--tol", rc.tol, "ODE integrator tolerance");
        cmd->add_option("--lambda-tol", rc.lambda_tol, "relative eigenvalue bracket tolerance");
        cmd->add_option("--gamma", rc.gamma, "envelope transition exponent (>= 2)");
        cmd->add_option("--delta", rc.delta, "envelope modulation width override");
        cmd->add_option("--out", rc.out, "output path");
        cmd->add_option("--plot-data", rc.plot_data, "plot-data output path");
        cmd->add_option("--config", config_path, "flat JSON config file");
    };

    CLI::App* solve = app.add_subcommand("solve", "compute the principal eigenpair");
    add_problem_flags(solve);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "sweep the Robin parameter");
    add_problem_flags(sweep_cmd);
    sweep_cmd->add_option("--beta-min", rc.beta_min, "smallest beta");
    sweep_cmd->add_option("--beta-max", rc.beta_max, "largest beta");
    sweep_cmd->add_option("--points", rc.points, "number of sweep points");
    sweep_cmd->add_flag("--log", rc.log_spaced, "log-spaced beta grid");

    CLI::App* verify = app.add_subcommand("verify", "solve and run the full verification battery");
    add_problem_flags(verify);
    verify->add_option("--report", rc.report, "verification report JSON path");

    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "closed-form eigenpair of the N=3, p=2, g=r^-4 instance");
    oracle_cmd->add_option("--beta", rc.beta, "Robin parameter (>= 0)");
    oracle_cmd->add_option("--out", rc.out, "output path");
    oracle_cmd->add_option("--config", config_path, "flat JSON config file");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::printf("%s", app.help().c_str());
        throw;
    }

    for (CLI::App* cmd : {solve, sweep_cmd, verify, oracle_cmd})
        if (cmd->parsed()) rc.command = cmd->get_name();

    // validation before any solve
    if (rc.command != "oracle") {
        if (rc.n < 2) throw std::invalid_argument("invalid --n: dimension must be >= 2");
        if (!(rc.p > 1.0) || !(rc.p < static_cast<double>(rc.n)))
            throw std::invalid_argument("invalid --p: requires 1 < p < N");
    }
    if (!(rc.beta >= 0.0)) throw std::invalid_argument("invalid --beta: must be >= 0");
    if (rc.points < 1) throw std::invalid_argument("invalid --points: must be >= 1");
    if (rc.rmax != 0.0 && !(rc.rmax > 4.0))
        throw std::invalid_argument("invalid --rmax: must exceed 4");
    if (!(rc.tol > 0.0) || !(rc.lambda_tol > 0.0))
        throw std::invalid_argument("invalid tolerance: must be positive");
    if (rc.command == "sweep") {
        if (!(rc.beta_min > 0.0) || !(rc.beta_max >= rc.beta_min))
            throw std::invalid_argument("invalid sweep grid: need 0 < beta-min <= beta-max");
        if (rc.points > 1 && rc.beta_max == rc.beta_min)
            throw std::invalid_argument("invalid sweep grid: beta-min equals beta-max");
    }
    for (const std::string& path : {rc.out, rc.report, rc.plot_data}) {
        if (path.empty()) continue;
        namespace fs = std::filesystem;
        const fs::path dir = fs::path(path).has_parent_path() ? fs::path(path).parent_path()
                                                              : fs::path(".");
        if (!fs::is_directory(dir))
            throw std::invalid_argument("output path '" + path + "': directory does not exist");
    }
    return rc;
}

inline RunConfig parse_args(int argc, const char* const* argv) {
    return parse_args(std::vector<std::string>(argv + 1, argv + argc));
}

namespace detail {

inline SolverConfig solver_config_of(const RunConfig& rc) {
    SolverConfig cfg;
    cfg.ode_tol = rc.tol;
    cfg.lambda_tol = rc.lambda_tol;
    if (rc.rmax > 0.0) cfg.r_max_schedule = {0.25 * rc.rmax, 0.5 * rc.rmax, rc.rmax};
    return cfg;
}

inline std::vector<double> sweep_grid(const RunConfig& rc) {
    std::vector<double> betas(static_cast<std::size_t>(rc.points));
    if (rc.points == 1) {
        betas[0] = rc.beta_min;
        return betas;
    }
    for (int i = 0; i < rc.points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(rc.points - 1);
        betas[static_cast<std::size_t>(i)] =
            rc.log_spaced ? rc.beta_min * std::pow(rc.beta_max / rc.beta_min, t)
                          : rc.beta_min + (rc.beta_max - rc.beta_min) * t;
    }
    betas.back() = rc.beta_max;
    return betas;
}

inline EnvelopeParams envelope_params_of(const RunConfig& rc, const EigenSolution& sol,
                                         double rho0) {
    EnvelopeParams params;
    params.gamma = rc.gamma;
    params.length_scale = sol.beta > 0.0 ? char_length(sol.beta, rc.n) : 1.0;
    params.critical_radius = std::max(sol.r_star, 1.0 + 1e-9);
    const double ell = std::min(params.length_scale, std::max(sol.r_star - 1.0, 1e-6));
    params.delta = rc.delta > 0.0 ? rc.delta
                                  : std::max(1e-6, rho0 > 0.0 ? std::min(0.5 * rho0, 0.5 * ell)
                                                              : 0.5 * ell);
    return params;
}

}  // namespace detail

/// Executes the configured pipeline. Returns the process exit status:
/// 0 iff everything requested ran and every requested check passed.
inline int run(const RunConfig& rc) {
    if (rc.command == "oracle") {
        const OracleEigenpair o = closed_form_oracle(rc.beta);
        std::printf("lambda1 = %.10f\nr_star = %.10f\nphi1 = %.10f\ndlambda_dbeta = %.10f\n",
                    o.lambda1, o.rstar, o.phi_at_1, o.dlambda_dbeta);
        if (!rc.out.empty()) {
            nlohmann::json j = {{"beta", o.beta},
                                {"k", o.k},
                                {"lambda1", o.lambda1},
                                {"rstar", o.rstar},
                                {"phi1", o.phi_at_1},
                                {"dlambda_dbeta", o.dlambda_dbeta}};
            write_atomic(rc.out, j.dump(2) + "\n");
        }
        return 0;
    }

    ProblemSpec spec{rc.n, rc.p, rc.beta, parse_weight_spec(rc.weight_spec)};
    spec.validate();
    const SolverConfig cfg = detail::solver_config_of(rc);

    if (rc.command == "solve" || rc.command == "verify") {
        const EigenSolution sol =
            rc.beta == 0.0 ? solve_neumann(spec, cfg) : solve_principal(spec, cfg);
        std::printf("lambda1 = %.10f  r_star = %.10f  phi1 = %.10f  [%s]\n", sol.lambda1,
                    sol.r_star, sol.phi_at_1, to_string(sol.boundary_kind));

        std::optional<VerificationReport> report;
        double rho0 = 0.0;
        if (rc.command == "verify") {
            const WeightDiagnostics diag = diagnostics(spec.weight, rc.n, rc.p);
            report = run_all_checks(sol, spec, diag, rc.gamma, rc.delta);
            for (const auto& c : report->checks)
                std::printf("%s %s margin=%.6g%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                            c.margin, c.note.empty() ? "" : "  ", c.note.c_str());
            if (const auto* nd = report->find("nondegeneracy"))
                if (nd->constants.count("rho0")) rho0 = nd->constants.at("rho0");
        }
        if (!rc.out.empty())
            write_atomic(rc.out,
                         solution_to_json(sol, spec, report ? &*report : nullptr).dump(2) + "\n");
        if (!rc.report.empty() && report)
            write_atomic(rc.report, report_to_json(*report).dump(2) + "\n");
        if (!rc.plot_data.empty())
            write_atomic(rc.plot_data,
                         solution_plot_data(sol, spec, detail::envelope_params_of(rc, sol, rho0)));
        if (report && !report->all_pass()) {
            std::fprintf(stderr, "verification failed%s\n",
                         report->hard_failed() ? " (hard check)" : "");
            return 1;
        }
        return 0;
    }

    if (rc.command == "sweep") {
        const SweepCurve curve = sweep(spec, detail::sweep_grid(rc), cfg);
        if (!rc.out.empty()) write_atomic(rc.out, curve_to_csv(curve));
        if (!rc.plot_data.empty()) write_atomic(rc.plot_data, curve_plot_data(curve));
        VerificationReport rep;
        rep.checks.push_back(check_monotone_concave(curve, 1e-6));
        rep.checks.push_back(check_derivative_formula(curve));
        rep.checks.push_back(check_limits(curve));
        bool ok = true;
        for (const auto& c : rep.checks) {
            std::printf("%s %s margin=%.6g%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                        c.margin, c.note.empty() ? "" : "  ", c.note.c_str());
            ok = ok && c.pass;
        }
        std::printf("neumann_lambda = %.10f  dirichlet_lambda = %.10f\n", curve.neumann_lambda,
                    curve.dirichlet_lambda);
        return ok ? 0 : 1;
    }

    throw std::invalid_argument("unknown command '" + rc.command + "'");
}

/// Entry point used by the binary: parse, run, map errors to one-line
/// messages and a nonzero status.
inline int cli_main(int argc, char** argv) {
    try {
        return run(parse_args(std::vector<std::string>(argv + 1, argv + argc)));
    } catch (const CLI::CallForHelp&) {
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

}  // namespace exrobin
