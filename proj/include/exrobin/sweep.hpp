#pragma once

#include <cstdio>
#include <cstdlib>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "exrobin/eigensolver.hpp"
#include "exrobin/verifier.hpp"

namespace exrobin {

/// The lambda_1(beta) curve with endpoint eigenvalues and both derivative
/// routes: numeric (sliding quadratic in log beta) and the boundary-trace
/// formula omega_{N-1} phi(1; beta)^p.
struct SweepCurve {
    int dimension = 3;
    double exponent = 2.0;
    std::vector<double> betas, lambdas, phi1s, rstars;
    std::vector<double> derivative_numeric, derivative_formula;
    std::vector<double> linf_drift;  ///< sup_r |phi_i - phi_{i-1}| vs the previous beta (first = 0)
    double neumann_lambda = 0.0;
    double neumann_phi1 = 0.0;
    double dirichlet_lambda = 0.0;
};

namespace detail {

inline int sweep_thread_cap() {
    if (const char* env = std::getenv("EIGENSOLVER_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Derivative at x of the quadratic through three (x_i, y_i).
inline double quadratic_derivative_at(double x, const double* xs, const double* ys) {
    return ys[0] * (2 * x - xs[1] - xs[2]) / ((xs[0] - xs[1]) * (xs[0] - xs[2])) +
           ys[1] * (2 * x - xs[0] - xs[2]) / ((xs[1] - xs[0]) * (xs[1] - xs[2])) +
           ys[2] * (2 * x - xs[0] - xs[1]) / ((xs[2] - xs[0]) * (xs[2] - xs[1]));
}

}  // namespace detail

/// One principal solve per beta (dispatched concurrently up to
/// EIGENSOLVER_THREADS) plus the Neumann and Dirichlet endpoint solves.
/// Results are collected by index, so the curve is independent of dispatch
/// order.
inline SweepCurve sweep(const ProblemSpec& spec_template, const std::vector<double>& betas,
                        const SolverConfig& config = {}) {
    if (betas.empty()) throw std::invalid_argument("sweep: empty beta grid");
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0.0)) throw std::invalid_argument("sweep: betas must be positive");
        if (i > 0 && !(betas[i] > betas[i - 1]))
            throw std::invalid_argument("sweep: betas must be increasing");
    }

    SweepCurve curve;
    curve.dimension = spec_template.dimension;
    curve.exponent = spec_template.exponent;
    curve.betas = betas;
    const std::size_t n = betas.size();
    curve.lambdas.resize(n);
    curve.phi1s.resize(n);
    curve.rstars.resize(n);

    auto solve_one = [&](double beta) {
        ProblemSpec spec = spec_template;
        spec.robin_beta = beta;
        return solve_principal(spec, config);
    };

    // fixed probe grid for the eigenfunction drift diagnostic
    const double probe_rmax = 0.9 * config.r_max_schedule.back();
    std::vector<double> probe(64);
    for (std::size_t i = 0; i < probe.size(); ++i)
        probe[i] = std::exp(std::log(probe_rmax) * static_cast<double>(i) /
                            static_cast<double>(probe.size() - 1));
    std::vector<std::vector<double>> profiles(n);

    const int cap = detail::sweep_thread_cap();
    std::size_t next = 0;
    while (next < n) {
        const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(cap), n - next);
        std::vector<std::future<EigenSolution>> futs;
        futs.reserve(batch);
        for (std::size_t j = 0; j < batch; ++j)
            futs.push_back(std::async(std::launch::async, solve_one, betas[next + j]));
        for (std::size_t j = 0; j < batch; ++j) {
            try {
                EigenSolution sol = futs[j].get();
                curve.lambdas[next + j] = sol.lambda1;
                curve.phi1s[next + j] = sol.phi_at_1;
                curve.rstars[next + j] = sol.r_star;
                const auto samples = resample(sol.trajectory, probe);
                auto& prof = profiles[next + j];
                prof.reserve(samples.size());
                for (const auto& [phi, dphi] : samples) prof.push_back(phi);
            } catch (const std::exception& e) {
                throw std::runtime_error("sweep: solve failed at beta = " +
                                         std::to_string(betas[next + j]) + ": " + e.what());
            }
        }
        next += batch;
    }

    // L-infinity drift between adjacent-beta eigenfunctions
    curve.linf_drift.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        double d = 0.0;
        for (std::size_t k = 0; k < probe.size(); ++k)
            d = std::max(d, std::abs(profiles[i][k] - profiles[i - 1][k]));
        curve.linf_drift[i] = d;
    }

    {
        ProblemSpec spec = spec_template;
        spec.robin_beta = 0.0;
        const EigenSolution ns = solve_neumann(spec, config);
        curve.neumann_lambda = ns.lambda1;
        curve.neumann_phi1 = ns.phi_at_1;
        curve.dirichlet_lambda = solve_dirichlet(spec_template, config).lambda1;
    }

    // derivative routes: trace formula pointwise, numeric from a sliding
    // quadratic in log beta (the sweep grids are geometric)
    const double omega = sphere_area(curve.dimension);
    const double p = curve.exponent;
    curve.derivative_formula.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        curve.derivative_formula[i] = omega * std::pow(curve.phi1s[i], p);

    curve.derivative_numeric.resize(n);
    if (n == 1) {
        curve.derivative_numeric[0] = curve.derivative_formula[0];
    } else if (n == 2) {
        const double d = (curve.lambdas[1] - curve.lambdas[0]) / (betas[1] - betas[0]);
        curve.derivative_numeric = {d, d};
    } else {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = std::log(betas[i]);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t w = std::clamp<std::size_t>(i, 1, n - 2) - 1;
            curve.derivative_numeric[i] =
                detail::quadratic_derivative_at(x[i], &x[w], &curve.lambdas[w]) / betas[i];
        }
    }
    return curve;
}

/// First differences strictly positive; second divided differences in beta
/// bounded by tol (concavity). Concavity is vacuous with fewer than 3 points.
inline CheckRecord check_monotone_concave(const SweepCurve& curve, double tol) {
    CheckRecord rec;
    rec.name = "sweep_monotone_concave";
    const auto& b = curve.betas;
    const auto& l = curve.lambdas;
    const std::size_t n = b.size();
    double min_diff_rel = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < n; ++i)
        min_diff_rel = std::min(min_diff_rel, (l[i + 1] - l[i]) / l[i]);
    double max_sdd = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double d1 = (l[i] - l[i - 1]) / (b[i] - b[i - 1]);
        const double d2 = (l[i + 1] - l[i]) / (b[i + 1] - b[i]);
        max_sdd = std::max(max_sdd, (d2 - d1) / (b[i + 1] - b[i - 1]));
    }
    const bool mono = n < 2 || min_diff_rel > 0.0;
    const bool concave = n < 3 || max_sdd <= tol;
    rec.pass = mono && concave;
    rec.margin = n < 2 ? 1.0 : std::min(min_diff_rel, n < 3 ? min_diff_rel : tol - max_sdd);
    rec.constants = {{"min_first_diff_rel", n < 2 ? 0.0 : min_diff_rel},
                     {"max_second_divided", n < 3 ? 0.0 : max_sdd},
                     {"tol", tol}};
    if (n < 3) rec.note = "concavity vacuous with fewer than 3 points";
    return rec;
}

/// |numeric - formula| / formula <= 1e-3 at interior points whose stencil
/// truncation error is small enough to make the comparison meaningful;
/// coarser points are reported, not failed.
inline CheckRecord check_derivative_formula(const SweepCurve& curve) {
    CheckRecord rec;
    rec.name = "sweep_derivative_formula";
    const std::size_t n = curve.betas.size();
    if (n < 3) {
        rec.pass = true;
        rec.note = "needs >= 3 points";
        return rec;
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::log(curve.betas[i]);

    double worst = 0.0;
    int enforced = 0, coarse = 0;
    bool all_ok = true;
    auto third_divided = [&](std::size_t w) {
        const double f01 = (curve.lambdas[w + 1] - curve.lambdas[w]) / (x[w + 1] - x[w]);
        const double f12 = (curve.lambdas[w + 2] - curve.lambdas[w + 1]) / (x[w + 2] - x[w + 1]);
        const double f23 = (curve.lambdas[w + 3] - curve.lambdas[w + 2]) / (x[w + 3] - x[w + 2]);
        const double f012 = (f12 - f01) / (x[w + 2] - x[w]);
        const double f123 = (f23 - f12) / (x[w + 3] - x[w + 1]);
        return 6.0 * (f123 - f012) / (x[w + 3] - x[w]);
    };
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double formula = curve.derivative_formula[i];
        const double rel = std::abs(curve.derivative_numeric[i] - formula) / formula;
        // stencil truncation estimate from a shifted third divided difference
        double err_est = std::numeric_limits<double>::infinity();
        if (n >= 4) {
            const std::size_t w = std::min(i >= 1 ? i - 1 : 0, n - 4);
            const double h = 0.5 * (x[i + 1] - x[i - 1]);
            err_est = std::abs(third_divided(w)) * h * h / 6.0 / curve.betas[i];
        }
        if (err_est > 0.3e-3 * formula) {
            ++coarse;
            continue;
        }
        ++enforced;
        worst = std::max(worst, rel);
        all_ok = all_ok && rel <= 1e-3;
    }
    if (enforced == 0) {
        rec.pass = true;
        rec.note = "spacing too coarse for central differences";
        rec.constants = {{"n_coarse", static_cast<double>(coarse)}};
        return rec;
    }
    rec.pass = all_ok;
    rec.margin = 1e-3 - worst;
    rec.constants = {{"worst_rel", worst},
                     {"n_enforced", static_cast<double>(enforced)},
                     {"n_coarse", static_cast<double>(coarse)}};
    return rec;
}

/// Endpoint limits: strict lambda^N < lambda(beta) < lambda^D everywhere,
/// the Neumann gap bounded by beta_min times the boundary-trace constant of
/// the Neumann eigenfunction, and a Dirichlet gap decreasing in beta.
inline CheckRecord check_limits(const SweepCurve& curve, double slack = 1e-3) {
    CheckRecord rec;
    rec.name = "sweep_limits";
    const auto& b = curve.betas;
    const auto& l = curve.lambdas;
    const std::size_t n = b.size();
    if (n < 2) {
        rec.pass = true;
        rec.note = "needs >= 2 points";
        return rec;
    }
    if (b.back() / b.front() < 1e4) rec.note = "warning: sweep spans fewer than 4 decades";

    double strict_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        strict_margin = std::min(strict_margin, (l[i] - curve.neumann_lambda) / l[i]);
        strict_margin = std::min(strict_margin, (curve.dirichlet_lambda - l[i]) / l[i]);
    }

    const double c_trace =
        sphere_area(curve.dimension) * std::pow(curve.neumann_phi1, curve.exponent);
    const double neumann_gap = l.front() - curve.neumann_lambda;
    const double trace_bound = b.front() * c_trace * (1.0 + slack);
    const bool neumann_ok = neumann_gap > 0.0 && neumann_gap <= trace_bound;

    const double gap_hi = curve.dirichlet_lambda - l.back();
    const double gap_prev = curve.dirichlet_lambda - l[n - 2];
    const bool dirichlet_ok = gap_hi > 0.0 && gap_hi < gap_prev;

    rec.pass = strict_margin > 0.0 && neumann_ok && dirichlet_ok;
    rec.margin = std::min({strict_margin, (trace_bound - neumann_gap) / trace_bound,
                           (gap_prev - gap_hi) / gap_prev});
    rec.constants = {{"strict_margin", strict_margin},
                     {"neumann_gap", neumann_gap},
                     {"trace_bound", trace_bound},
                     {"c_trace", c_trace},
                     {"dirichlet_gap", gap_hi}};
    return rec;
}

/// Boundary-layer rescaling Psi(1+t) = (phi(1+t) - phi(1)) / (phi(1) beta^{1/(p-1)}):
/// the deviation sup_{t <= t_max} |Psi(1+t) - t| must fit under the
/// K t_max^{1+alpha} / beta^{1/(p-1)} envelope from the boundary expansion,
/// shrinking as beta grows.
inline CheckRecord check_boundary_layer_rescaling(const EigenSolution& sol,
                                                  const ProblemSpec& spec, double t_max) {
    CheckRecord rec;
    rec.name = "boundary_layer_rescaling";
    if (sol.boundary_kind != BoundaryKind::Robin || !(sol.beta >= 10.0)) {
        rec.pass = true;
        rec.note = "skipped: requires beta >= 10";
        return rec;
    }
    const double s = robin_slope(sol.beta, spec.exponent);
    const auto expansion = verify_boundary_expansion(sol, spec);
    const double kfit = expansion.constants.count("K") ? expansion.constants.at("K") : 0.0;
    const double alpha =
        expansion.constants.count("alpha_fit") ? expansion.constants.at("alpha_fit") : 1.0;

    TrajectoryInterpolant interp(sol.trajectory);
    double sup_dev = 0.0;
    for (double t : detail::log_spaced(1e-5, t_max, 61)) {
        const double psi = (interp.phi(1.0 + t) - sol.phi_at_1) / (sol.phi_at_1 * s);
        sup_dev = std::max(sup_dev, std::abs(psi - t));
    }
    const double bound = 1.5 * kfit * std::pow(t_max, 1.0 + alpha) / (sol.phi_at_1 * s) + 1e-12;
    rec.pass = sup_dev <= bound;
    rec.margin = (bound - sup_dev) / bound;
    rec.constants = {{"sup_dev", sup_dev},
                     {"bound", bound},
                     {"K", kfit},
                     {"alpha", alpha},
                     {"beta", sol.beta},
                     {"t_max", t_max}};
    return rec;
}

/// CSV export: '#'-prefixed endpoint metadata, then a header row and one row
/// per beta.
inline std::string curve_to_csv(const SweepCurve& curve) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "# neumann_lambda = %.17g\n", curve.neumann_lambda);
    out += buf;
    std::snprintf(buf, sizeof buf, "# dirichlet_lambda = %.17g\n", curve.dirichlet_lambda);
    out += buf;
    out += "beta,lambda1,phi1,rstar,dlambda_numeric,dlambda_formula\n";
    for (std::size_t i = 0; i < curve.betas.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", curve.betas[i],
                      curve.lambdas[i], curve.phi1s[i], curve.rstars[i],
                      curve.derivative_numeric[i], curve.derivative_formula[i]);
        out += buf;
    }
    return out;
}

}  // namespace exrobin
