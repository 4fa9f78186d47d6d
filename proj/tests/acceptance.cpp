// Acceptance suite: runs every top-level criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "exrobin/oracle.hpp"
#include "exrobin/sweep.hpp"
#include "exrobin/verifier.hpp"

using namespace exrobin;

namespace {

int g_failures = 0;

void report(int idx, bool pass, const std::string& what) {
    std::printf("%s  criterion %2d: %s\n", pass ? "PASS" : "FAIL", idx, what.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const RadialWeight kW4 = RadialWeight::power_law(1.0, 4.0);
const ProblemSpec kOracleSpec{3, 2.0, 1.0, kW4};

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const auto oracle = closed_form_oracle(1.0);

    // 1. oracle eigenvalue within 1e-6 relative, runtime <= 5 s
    EigenSolution sol1;
    {
        const auto t0 = std::chrono::steady_clock::now();
        sol1 = solve_principal(kOracleSpec);
        const double dt = seconds_since(t0);
        const double rel = std::abs(sol1.lambda1 - oracle.lambda1) / oracle.lambda1;
        report(1, rel <= 1e-6 && dt <= 5.0,
               fmt("oracle eigenvalue: lambda1=%.8f vs k^2=%.8f, rel=%.2e, %.2f s", sol1.lambda1,
                   oracle.lambda1, rel, dt));
    }

    // 2. endpoints within 1e-6 relative; lambda(beta) strictly between
    std::vector<std::pair<double, EigenSolution>> beta_solutions;
    {
        ProblemSpec nspec = kOracleSpec;
        nspec.robin_beta = 0.0;
        const auto ns = solve_neumann(nspec);
        const auto ds = solve_dirichlet(kOracleSpec);
        const double rel_n = std::abs(ns.lambda1 - oracle_neumann_lambda()) / oracle_neumann_lambda();
        const double rel_d =
            std::abs(ds.lambda1 - oracle_dirichlet_lambda()) / oracle_dirichlet_lambda();
        bool between = true;
        for (double beta : {0.01, 0.1, 1.0, 10.0, 100.0}) {
            ProblemSpec spec = kOracleSpec;
            spec.robin_beta = beta;
            beta_solutions.emplace_back(beta, solve_principal(spec));
            const double lam = beta_solutions.back().second.lambda1;
            between = between && ns.lambda1 < lam && lam < ds.lambda1;
        }
        report(2, rel_n <= 1e-6 && rel_d <= 1e-6 && between,
               fmt("endpoints: neumann=%.8f (rel %.1e), dirichlet=%.8f (rel %.1e), strictly "
                   "between at 5 betas: %s",
                   ns.lambda1, rel_n, ds.lambda1, rel_d, between ? "yes" : "no"));
    }

    // 3. derivative formula at beta = 1: central difference vs omega phi(1)^2
    {
        const double h = 1e-3;
        ProblemSpec lo = kOracleSpec, hi = kOracleSpec;
        lo.robin_beta = 1.0 - h;
        hi.robin_beta = 1.0 + h;
        const double numeric =
            (solve_principal(hi).lambda1 - solve_principal(lo).lambda1) / (2.0 * h);
        const double formula = sphere_area(3) * sol1.phi_at_1 * sol1.phi_at_1;
        const double rel = std::abs(numeric - formula) / formula;
        const bool near_ref = std::abs(numeric - 1.34597) < 2e-3 && std::abs(formula - 1.34597) < 2e-3;
        report(3, rel <= 1e-3 && near_ref,
               fmt("derivative formula: numeric=%.6f, omega*phi1^2=%.6f, rel=%.2e", numeric,
                   formula, rel));
    }

    // 4. critical point location and uniqueness of the F sign change
    std::vector<std::pair<std::string, EigenSolution>> instances;
    {
        const double rstar_err = std::abs(sol1.r_star - oracle.rstar);
        instances.emplace_back("N3p2l4", sol1);
        for (auto& [beta, s] : beta_solutions)
            instances.emplace_back(fmt("beta=%g", beta), s);
        ProblemSpec n4{4, 2.0, 1.0, RadialWeight::power_law(1.0, 5.0)};
        ProblemSpec n5{5, 3.0, 1.0, RadialWeight::power_law(1.0, 6.0)};
        instances.emplace_back("N4p2l5", solve_principal(n4));
        instances.emplace_back("N5p3l6", solve_principal(n5));
        bool unique = true;
        std::string offender;
        for (const auto& [name, s] : instances) {
            if (s.trajectory.events.f_sign_changes != 1) {
                unique = false;
                offender = name;
            }
        }
        report(4, rstar_err <= 1e-5 && unique,
               fmt("critical point: |rstar-2k/pi|=%.2e, single F sign change on %zu instances%s%s",
                   rstar_err, instances.size(), unique ? "" : "; FAILED at ",
                   offender.c_str()));
    }

    // 5. boundary-value and critical-point bounds on the oracle instance
    {
        const bool phi_bounds = 0.14105 <= sol1.phi_at_1 && sol1.phi_at_1 < 0.32753;
        const bool rstar_bounds_lit = 1.10924 <= sol1.r_star && sol1.r_star <= 1.44687;
        const auto [vb, fi] = verify_value_bounds(sol1, kOracleSpec);
        const auto rb = verify_rstar_bounds(sol1, kOracleSpec);
        const bool margins = vb.pass && rb.pass && vb.constants.at("margin_upper_pm1") > 0.0;
        report(5, phi_bounds && rstar_bounds_lit && margins,
               fmt("value/critical bounds: 0.14105 <= phi1=%.5f < 0.32753, 1.10924 <= rstar=%.5f "
                   "<= 1.44687, upper margin %.2e",
                   sol1.phi_at_1, sol1.r_star, vb.constants.at("margin_upper_pm1")));
    }

    // 6. decay exponents on three instances, R_max >= 400, <= 60 s total
    {
        const auto t0 = std::chrono::steady_clock::now();
        struct Case { int n; double p, l; };
        bool ok = true;
        std::string detail;
        for (const Case c : {Case{3, 2.0, 4.0}, Case{4, 2.0, 5.0}, Case{5, 3.0, 6.0}}) {
            ProblemSpec spec{c.n, c.p, 1.0, RadialWeight::power_law(1.0, c.l)};
            const auto s = solve_principal(spec);
            const auto dec = verify_decay(s, spec);
            const auto [uniq, far] = verify_rstar_and_farfield(s, spec);
            const double vslope = dec.constants.at("slope_fit");
            const double gslope = far.constants.at("gradient_slope_fit");
            const double vq = (c.n - c.p) / (c.p - 1.0), gq = (c.n - 1.0) / (c.p - 1.0);
            const bool c_ok = std::abs(vslope + vq) <= 0.05 && std::abs(gslope + gq) <= 0.05;
            ok = ok && c_ok;
            detail += fmt("[N%dp%gl%g: %.3f/%.3f] ", c.n, c.p, c.l, vslope, gslope);
        }
        const double dt = seconds_since(t0);
        report(6, ok && dt <= 60.0, fmt("decay exponents %s(%.1f s)", detail.c_str(), dt));
    }

    // 7. 25-point log sweep: monotone, concave, matches the oracle to 1e-6
    {
        std::vector<double> betas(25);
        for (int i = 0; i < 25; ++i) betas[i] = 0.01 * std::pow(1e4, i / 24.0);
        betas.back() = 100.0;
        const auto curve = sweep(kOracleSpec, betas);
        double worst = 0.0;
        for (std::size_t i = 0; i < betas.size(); ++i) {
            const double ref = closed_form_oracle(betas[i]).lambda1;
            worst = std::max(worst, std::abs(curve.lambdas[i] - ref) / ref);
        }
        const auto mono = check_monotone_concave(curve, 1e-6);
        report(7, worst <= 1e-6 && mono.pass,
               fmt("sweep: 25 log points, worst oracle mismatch %.2e, monotone+concave: %s", worst,
                   mono.pass ? "yes" : "no"));
    }

    // 8. property suite at p = 3 (no closed form)
    {
        ProblemSpec spec{5, 3.0, 1.0, RadialWeight::power_law(1.0, 6.0)};
        const auto s = solve_principal(spec);
        const double rq = variational_crosscheck(spec, 1500, 150.0);
        const double rel_var = std::abs(rq - s.lambda1) / s.lambda1;
        const auto energy = verify_energy_identity(s, spec);
        const auto [vb, fi] = verify_value_bounds(s, spec);
        const auto slope_rec = verify_robin_slope(s, spec);
        const auto nd = verify_nondegeneracy(s, spec);
        const double exp_err = std::abs(nd.constants.at("exponent_fit") - 0.5);
        const bool ok = rel_var <= 1e-3 && energy.constants.at("residual") <= 1e-6 &&
                        fi.constants.at("residual") <= 1e-6 &&
                        slope_rec.constants.at("residual") <= 1e-8 && exp_err <= 0.05;
        report(8, ok,
               fmt("p=3 properties: var rel %.2e, energy %.1e, fundamental %.1e, robin %.1e, "
                   "exponent 0.5%+.3f",
                   rel_var, energy.constants.at("residual"), fi.constants.at("residual"),
                   slope_rec.constants.at("residual"),
                   nd.constants.at("exponent_fit") - 0.5));
    }

    // 9. unified envelope sandwich for beta in {0.1, 1, 10} with gamma = 2
    {
        bool ok = true;
        std::string detail;
        for (double beta : {0.1, 1.0, 10.0}) {
            ProblemSpec spec = kOracleSpec;
            spec.robin_beta = beta;
            const auto s = solve_principal(spec);
            const auto nd = verify_nondegeneracy(s, spec);
            EnvelopeParams params;
            params.gamma = 2.0;
            params.length_scale = char_length(beta, 3);
            params.critical_radius = s.r_star;
            const double ell = std::min(params.length_scale, s.r_star - 1.0);
            params.delta = std::min(0.5 * nd.constants.at("rho0"), 0.5 * ell);
            const auto env = verify_unified_envelope(s, spec, params);
            ok = ok && env.pass && env.constants.at("C1") > 0.0 &&
                 std::isfinite(env.constants.at("C2"));
            detail += fmt("[beta=%g: C1=%.3g C2=%.3g] ", beta, env.constants.at("C1"),
                          env.constants.at("C2"));
        }
        report(9, ok, fmt("unified envelope %s", detail.c_str()));
    }

    // 10. determinism: repeated verify runs produce byte-identical reports
    {
        if (cli.empty()) {
            report(10, false, "determinism: CLI path not supplied (argv[1])");
        } else {
            namespace fs = std::filesystem;
            const auto dir = fs::temp_directory_path();
            const auto r1 = (dir / "exrobin_acc_rep1.json").string();
            const auto r2 = (dir / "exrobin_acc_rep2.json").string();
            const std::string base = cli +
                " verify --n 3 --p 2 --beta 1 --weight powerlaw:c0=1,l=4 --report ";
            const int e1 = std::system((base + r1 + " > /dev/null").c_str());
            const int e2 = std::system((base + r2 + " > /dev/null").c_str());
            std::ifstream f1(r1, std::ios::binary), f2(r2, std::ios::binary);
            std::stringstream s1, s2;
            s1 << f1.rdbuf();
            s2 << f2.rdbuf();
            const bool ok = e1 == 0 && e2 == 0 && s1.str().size() > 0 && s1.str() == s2.str();
            report(10, ok,
                   fmt("determinism: two verify runs, %zu bytes, byte-identical: %s",
                       s1.str().size(), ok ? "yes" : "no"));
            fs::remove(r1);
            fs::remove(r2);
        }
    }

    std::printf("%d/10 criteria passed\n", 10 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
