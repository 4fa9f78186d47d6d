#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "exrobin/core.hpp"
#include "exrobin/eigensolver.hpp"
#include "exrobin/weight.hpp"

namespace exrobin {

/// One verified statement: pass/fail, a signed margin (positive iff the
/// inequality holds, in the natural scale of the bound), and the fitted or
/// computed constants it exhibits.
struct CheckRecord {
    std::string name;
    bool pass = false;
    double margin = 0.0;
    std::map<std::string, double> constants;
    std::string note;
};

struct VerificationReport {
    std::vector<CheckRecord> checks;

    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
    }

    /// Hard checks are exact identities of the eigenpair; their failure means
    /// the solution itself is wrong, not that a fitted constant is poor.
    bool hard_failed() const {
        for (const auto& c : checks)
            if (!c.pass && (c.name == "energy_identity" || c.name == "robin_slope" ||
                            c.name == "rstar_uniqueness" || c.name == "fundamental_identity_residual"))
                return true;
        return false;
    }

    const CheckRecord* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

namespace detail {

inline std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> out(n);
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i)
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

}  // namespace detail

/// omega (int |phi'|^p r^{N-1} + tail) + beta omega phi(1)^p = lambda_1,
/// the variational identity J(phi) = lambda_1 G(phi) with G = 1.
inline CheckRecord verify_energy_identity(const EigenSolution& sol, const ProblemSpec& spec) {
    const int N = spec.dimension;
    const double p = spec.exponent;
    const double omega = sphere_area(N);
    TrajectoryInterpolant interp(sol.trajectory);
    const double body = interp.integrate(
        [&](double r) { return std::pow(r, N - 1) * std::pow(std::abs(interp.dphi(r)), p); },
        interp.r_min(), interp.r_max());
    const double j_total = omega * (body + gradient_energy_tail(sol.trajectory, spec, sol.lambda1)) +
                           sol.beta * omega * std::pow(std::abs(sol.phi_at_1), p);
    const double residual = std::abs(j_total - sol.lambda1) / sol.lambda1;
    CheckRecord rec;
    rec.name = "energy_identity";
    rec.pass = residual <= 1e-6;
    rec.margin = 1e-6 - residual;
    rec.constants = {{"j_total", j_total}, {"lambda1", sol.lambda1}, {"residual", residual}};
    return rec;
}

/// Boundary condition as an identity: phi'(1) = beta^{1/(p-1)} phi(1)
/// (phi'(1) = 0 for Neumann, phi(1) = 0 for Dirichlet).
inline CheckRecord verify_robin_slope(const EigenSolution& sol, const ProblemSpec& spec) {
    CheckRecord rec;
    rec.name = "robin_slope";
    const double dphi1 = sol.trajectory.dphi.front();
    if (sol.boundary_kind == BoundaryKind::Dirichlet) {
        const double residual = std::abs(sol.phi_at_1);
        rec.pass = residual <= 1e-12;
        rec.margin = 1e-12 - residual;
        rec.constants = {{"residual", residual}};
        rec.note = "dirichlet: phi(1) = 0";
        return rec;
    }
    const double slope = robin_slope(sol.beta, spec.exponent);
    const double residual = std::abs(dphi1 - slope * sol.phi_at_1) / sol.phi_at_1;
    rec.pass = residual <= 1e-8;
    rec.margin = 1e-8 - residual;
    rec.constants = {{"residual", residual}, {"slope", slope}, {"dphi_at_1", dphi1}};
    return rec;
}

/// Far-field sandwich C1 r^{-q} <= phi <= C2 r^{-q} with q = (N-p)/(p-1):
/// least-squares slope of log phi vs log r over [0.1, 0.5] R_max must match
/// -q within 0.05, and the compensated values phi r^q must stay positive
/// and bounded.
inline CheckRecord verify_decay(const EigenSolution& sol, const ProblemSpec& spec) {
    const int N = spec.dimension;
    const double p = spec.exponent;
    const double q = (N - p) / (p - 1.0);
    const double rmax = sol.trajectory.r_max();
    if (rmax < 100.0 * sol.r_star)
        throw std::invalid_argument("verify_decay: window too short, needs R_max >= 100 r_*");
    const double lo = 0.1 * rmax, hi = 0.5 * rmax;
    std::vector<double> xs, ys;
    double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0;
    for (std::size_t i = 0; i < sol.trajectory.size(); ++i) {
        const double r = sol.trajectory.r[i], phi = sol.trajectory.phi[i];
        if (r < lo || r > hi || phi <= 0.0) continue;
        xs.push_back(std::log(r));
        ys.push_back(std::log(phi));
        const double comp = phi * std::pow(r, q);
        c1 = std::min(c1, comp);
        c2 = std::max(c2, comp);
    }
    if (xs.size() < 8) throw std::invalid_argument("verify_decay: window too short");
    const auto [slope, intercept] = detail::fit_line(xs, ys);
    (void)intercept;
    CheckRecord rec;
    rec.name = "decay_sandwich";
    const double dev = std::abs(slope + q);
    rec.pass = dev <= 0.05 && c1 > 0.0 && std::isfinite(c2);
    rec.margin = 0.05 - dev;
    rec.constants = {{"C1", c1}, {"C2", c2}, {"slope_fit", slope}, {"target_slope", -q}};
    return rec;
}

/// Near-boundary expansion phi(1+t) = phi(1)(1 + beta^{1/(p-1)} t) + O(t^{1+alpha}):
/// the residual must fit a log-log slope of at least 1 + alpha_min with
/// alpha_min = 0.5; K is the fitted prefactor.
inline CheckRecord verify_boundary_expansion(const EigenSolution& sol, const ProblemSpec& spec) {
    TrajectoryInterpolant interp(sol.trajectory);
    const double phi1 = sol.phi_at_1;
    // linear model phi(1)(1 + beta^{1/(p-1)} t); for the Dirichlet endpoint
    // phi(1) = 0 and the expansion is about the unit boundary slope instead
    const double dphi1 = sol.boundary_kind == BoundaryKind::Dirichlet
                             ? sol.trajectory.dphi.front()
                             : robin_slope(sol.beta, spec.exponent) * phi1;
    const double scale = std::max({phi1, dphi1, 1e-30});
    CheckRecord rec;
    rec.name = "boundary_expansion";

    std::vector<double> xs, ys;
    double kmax = 0.0;
    const auto ts = detail::log_spaced(1e-4, 1e-1, 61);
    for (double t : ts) {
        const double rho = std::abs(interp.phi(1.0 + t) - (phi1 + dphi1 * t));
        if (rho < 1e-13 * scale) continue;
        xs.push_back(std::log(t));
        ys.push_back(std::log(rho));
    }
    if (xs.size() < 5) {
        rec.pass = true;
        rec.margin = 0.0;
        rec.note = "vacuous: residual at the floating-point floor";
        return rec;
    }
    const auto [slope, intercept] = detail::fit_line(xs, ys);
    (void)intercept;
    const double alpha_fit = std::min(slope - 1.0, 1.0);
    for (std::size_t i = 0; i < xs.size(); ++i)
        kmax = std::max(kmax, std::exp(ys[i]) / std::pow(std::exp(xs[i]), 1.0 + alpha_fit));
    rec.pass = slope >= 1.5;
    rec.margin = slope - 1.5;
    rec.constants = {{"K", kmax}, {"alpha_fit", alpha_fit}, {"slope_fit", slope}};
    return rec;
}

/// Gradient bounds in the boundary layer: (1/2) beta^{1/(p-1)} phi(1) <= |phi'|
/// on dist < delta_probe, with the upper form M beta^{1/(p-1)} phi(1)(1 + C t^alpha)
/// fitted. delta_probe defaults to the Hoelder-constant rule from the proof of
/// the near-boundary estimate, with Lambda fitted from the trajectory.
inline CheckRecord verify_gradient_boundary(const EigenSolution& sol, const ProblemSpec& spec,
                                            double delta_probe = 0.0) {
    CheckRecord rec;
    rec.name = "gradient_boundary";
    if (sol.boundary_kind != BoundaryKind::Robin || !(sol.beta > 0.0)) {
        rec.pass = true;
        rec.note = "skipped: requires a finite Robin parameter";
        return rec;
    }
    if (delta_probe > 0.0 && delta_probe >= sol.r_star - 1.0)
        throw std::invalid_argument(
            "verify_gradient_boundary: probe region must precede the critical point");
    const double p = spec.exponent;
    const double s = robin_slope(sol.beta, p);
    TrajectoryInterpolant interp(sol.trajectory);
    const double base = s * sol.phi_at_1;  // |phi'(1)| by the boundary condition

    // fitted Hoelder data for phi' near the boundary
    const double tcap = std::min(0.1, 0.9 * (sol.r_star - 1.0));
    std::vector<double> xs, ys;
    for (double t : detail::log_spaced(1e-4, tcap, 41)) {
        const double diff = std::abs(interp.dphi(1.0 + t) - interp.dphi(1.0));
        if (diff < 1e-14 * std::max(base, 1e-30)) continue;
        xs.push_back(std::log(t));
        ys.push_back(std::log(diff));
    }
    double alpha = 1.0, lambda_hoelder = 0.0;
    if (xs.size() >= 5) {
        const auto [sl, ic] = detail::fit_line(xs, ys);
        alpha = std::clamp(sl, 0.1, 1.0);
        (void)ic;
        for (std::size_t i = 0; i < xs.size(); ++i)
            lambda_hoelder =
                std::max(lambda_hoelder, std::exp(ys[i]) / std::pow(std::exp(xs[i]), alpha));
    }
    double delta = delta_probe;
    if (delta == 0.0) {
        delta = 0.9 * (sol.r_star - 1.0);
        if (lambda_hoelder > 0.0)
            delta = std::min(delta, std::pow(base / (2.0 * lambda_hoelder), 1.0 / alpha));
    }

    double min_grad = std::numeric_limits<double>::infinity(), max_grad = 0.0, c_fit = 0.0;
    for (double t : detail::log_spaced(1e-4, delta, 41)) {
        const double g = std::abs(interp.dphi(1.0 + t));
        min_grad = std::min(min_grad, g);
        max_grad = std::max(max_grad, g);
        c_fit = std::max(c_fit, (g / base - 1.0) / std::pow(t, alpha));
    }
    const double lower = 0.5 * base;
    rec.pass = min_grad >= lower;
    rec.margin = (min_grad - lower) / lower;
    rec.constants = {{"m", 0.5},
                     {"M", std::max(1.0, max_grad / base)},
                     {"C", std::max(0.0, c_fit)},
                     {"alpha", alpha},
                     {"Lambda", lambda_hoelder},
                     {"delta_probe", delta}};
    return rec;
}

/// (i) F changes sign exactly once (uniqueness of the critical radius);
/// (ii) far-field gradient sandwich on r >= 2 r_*, with the fitted decay
/// slope of |phi'| reported alongside.
inline std::pair<CheckRecord, CheckRecord> verify_rstar_and_farfield(const EigenSolution& sol,
                                                                     const ProblemSpec& spec) {
    const int N = spec.dimension;
    const double p = spec.exponent;
    const auto& traj = sol.trajectory;

    CheckRecord uniq;
    uniq.name = "rstar_uniqueness";
    if (sol.boundary_kind == BoundaryKind::Neumann) {
        uniq.pass = traj.events.f_sign_changes == 0;
        uniq.margin = uniq.pass ? 1.0 : -1.0;
        uniq.note = "neumann: maximum on the boundary, no interior sign change";
        uniq.constants = {{"f_sign_changes", static_cast<double>(traj.events.f_sign_changes)}};
    } else {
        TrajectoryInterpolant interp(traj);
        const double f_at = traj.events.f_zero_rstar ? interp.flux(*traj.events.f_zero_rstar)
                                                     : std::numeric_limits<double>::infinity();
        double fscale = 0.0;
        for (double f : traj.flux) fscale = std::max(fscale, std::abs(f));
        const bool ok = traj.events.f_zero_rstar.has_value() && traj.events.f_sign_changes == 1 &&
                        std::abs(f_at) <= 1e-9 * fscale && sol.r_star > 1.0;
        uniq.pass = ok;
        uniq.margin = ok ? 1.0 : -1.0;
        uniq.constants = {{"rstar", sol.r_star},
                          {"f_sign_changes", static_cast<double>(traj.events.f_sign_changes)},
                          {"f_at_rstar", f_at}};
    }

    CheckRecord far;
    far.name = "gradient_farfield";
    const double rmax = traj.r_max();
    if (rmax < 4.0 * sol.r_star)
        throw std::invalid_argument("verify_rstar_and_farfield: needs R_max >= 4 r_*");
    const double ge = (N - 1.0) / (p - 1.0);  // gradient decay exponent
    double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0;
    std::vector<double> xs, ys;
    const double fit_lo = 0.1 * rmax, fit_hi = 0.5 * rmax;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double r = traj.r[i];
        if (r < 2.0 * sol.r_star) continue;
        const double a = std::abs(traj.dphi[i]);
        if (a == 0.0) continue;
        c1 = std::min(c1, a * std::pow(r, ge));
        c2 = std::max(c2, a * std::pow(r, ge) / log_factor_h(r, N, p));
        if (r >= fit_lo && r <= fit_hi) {
            xs.push_back(std::log(r));
            ys.push_back(std::log(a));
        }
    }
    double slope = 0.0;
    if (xs.size() >= 8) slope = detail::fit_line(xs, ys).first;
    far.pass = c1 > 0.0 && std::isfinite(c2) && c2 > 0.0;
    far.margin = c1;
    far.constants = {{"C1_hat", c1}, {"C2_hat", c2}, {"gradient_slope_fit", slope},
                     {"target_slope", -ge}};
    return {uniq, far};
}

/// Local growth |phi'(r)| >= c0 |r - r_*|^{1/(p-1)} near the critical radius,
/// with the explicit c0 = (lambda_1 g(r_*) phi(r_*)^{p-1} / 4)^{1/(p-1)};
/// rho_0 is the largest verified neighborhood, required >= 1e-2.
inline CheckRecord verify_nondegeneracy(const EigenSolution& sol, const ProblemSpec& spec) {
    CheckRecord rec;
    rec.name = "nondegeneracy";
    if (!(sol.r_star > 1.0)) {
        rec.pass = true;
        rec.note = "skipped: boundary maximum (no interior critical point)";
        return rec;
    }
    const double p = spec.exponent;
    const double e = 1.0 / (p - 1.0);
    TrajectoryInterpolant interp(sol.trajectory);
    const double phi_star = interp.phi(sol.r_star);
    const double c0 =
        std::pow(sol.lambda1 * spec.weight(sol.r_star) * std::pow(phi_star, p - 1.0) / 4.0, e);

    const double rho_cap = std::min(sol.r_star - 1.0, sol.trajectory.r_max() - sol.r_star);
    const auto offsets = detail::log_spaced(1e-4, 0.999 * rho_cap, 121);
    double rho0 = 0.0;
    for (double tau : offsets) {
        const bool left_ok = std::abs(interp.dphi(sol.r_star - tau)) >= c0 * std::pow(tau, e);
        const bool right_ok = std::abs(interp.dphi(sol.r_star + tau)) >= c0 * std::pow(tau, e);
        if (!(left_ok && right_ok)) break;
        rho0 = tau;
    }

    // exponent and prefactor of |phi'| ~ const |r - r_*|^{1/(p-1)}
    std::vector<double> xs, ys;
    for (double tau : detail::log_spaced(1e-4, std::min(std::max(rho0, 2e-4), 1e-2), 41)) {
        for (double sgn_off : {-1.0, 1.0}) {
            const double a = std::abs(interp.dphi(sol.r_star + sgn_off * tau));
            if (a <= 0.0) continue;
            xs.push_back(std::log(tau));
            ys.push_back(std::log(a));
        }
    }
    double exponent_fit = 0.0, prefactor = 0.0;
    if (xs.size() >= 5) {
        const auto [sl, ic] = detail::fit_line(xs, ys);
        exponent_fit = sl;
        prefactor = std::exp(ic);
    }
    rec.pass = rho0 >= 1e-2;
    rec.margin = rho0 - 1e-2;
    rec.constants = {{"c0", c0},
                     {"rho0", rho0},
                     {"exponent_fit", exponent_fit},
                     {"target_exponent", e},
                     {"fitted_prefactor", prefactor},
                     {"phi_rstar", phi_star}};
    return rec;
}

/// Value bounds C_g/K(beta) <= phi(1) < (lambda_1/(beta omega))^{1/(p-1)}
/// together with the 1/p-exponent variant from the proof chain, plus the
/// exact flux identity beta phi(1)^{p-1} = lambda_1 int_1^{r_*} s^{N-1} g phi^{p-1} ds.
inline std::pair<CheckRecord, CheckRecord> verify_value_bounds(const EigenSolution& sol,
                                                               const ProblemSpec& spec) {
    const int N = spec.dimension;
    const double p = spec.exponent;
    const double omega = sphere_area(N);

    CheckRecord vb;
    vb.name = "value_bounds";
    const double l = spec.weight.tail_exponent();
    if (sol.boundary_kind == BoundaryKind::Dirichlet) {
        vb.pass = true;
        vb.note = "skipped: Dirichlet endpoint has no finite beta";
    } else if (!(l > static_cast<double>(N))) {
        vb.pass = true;
        vb.note = "skipped: requires weight tail l > N";
        vb.constants = {{"skipped", 1.0}};
    } else {
        const double ig = weighted_moment(spec.weight, N);
        const double cg = std::pow(omega * ig, -1.0 / p);
        const double lower = cg / k_beta(sol.beta, N, p);
        const double margin_lower = (sol.phi_at_1 - lower) / sol.phi_at_1;
        vb.constants = {{"C_g", cg}, {"lower_bound", lower}, {"margin_lower", margin_lower}};
        if (sol.beta > 0.0) {
            const double base = sol.lambda1 / (sol.beta * omega);
            const double upper_pm1 = std::pow(base, 1.0 / (p - 1.0));
            const double upper_p = std::pow(base, 1.0 / p);
            const double margin_pm1 = (upper_pm1 - sol.phi_at_1) / sol.phi_at_1;
            const double margin_p = (upper_p - sol.phi_at_1) / sol.phi_at_1;
            vb.constants["upper_bound_pm1"] = upper_pm1;
            vb.constants["upper_bound_p"] = upper_p;
            vb.constants["margin_upper_pm1"] = margin_pm1;
            vb.constants["margin_upper_p"] = margin_p;
            vb.constants["holds_pm1"] = margin_pm1 > 0.0 ? 1.0 : 0.0;
            vb.constants["holds_p"] = margin_p > 0.0 ? 1.0 : 0.0;
            // the 1/p variant follows from the proof chain and is the binding assertion
            vb.pass = margin_lower > 0.0 && margin_p > 0.0;
            vb.margin = std::min(margin_lower, margin_p);
        } else {
            vb.pass = margin_lower > 0.0;
            vb.margin = margin_lower;
            vb.note = "neumann: upper bound vacuous as beta -> 0";
        }
    }

    CheckRecord fi;
    fi.name = "fundamental_identity_residual";
    const double f1 = sol.trajectory.flux.front();
    if (sol.boundary_kind == BoundaryKind::Neumann) {
        fi.pass = std::abs(f1) == 0.0;
        fi.margin = fi.pass ? 1.0 : -1.0;
        fi.note = "neumann: F(1) = 0, identity vacuous";
    } else {
        TrajectoryInterpolant interp(sol.trajectory);
        const double rhs = sol.lambda1 * interp.integrate(
                                             [&](double r) {
                                                 return std::pow(r, N - 1) * spec.weight(r) *
                                                        signed_pow(interp.phi(r), p - 1.0);
                                             },
                                             1.0, sol.r_star);
        const double residual = std::abs(f1 - rhs) / std::abs(f1);
        fi.pass = residual <= 1e-6;
        fi.margin = 1e-6 - residual;
        fi.constants = {{"flux_at_1", f1}, {"rhs", rhs}, {"residual", residual}};
    }
    return {vb, fi};
}

/// Geometric bounds on the critical radius from the flux identity.
inline CheckRecord verify_rstar_bounds(const EigenSolution& sol, const ProblemSpec& spec) {
    CheckRecord rec;
    rec.name = "rstar_bounds";
    if (sol.boundary_kind != BoundaryKind::Robin) {
        rec.pass = true;
        rec.note = "skipped: requires a finite Robin parameter";
        return rec;
    }
    const int N = spec.dimension;
    const double p = spec.exponent;
    double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double r = 1.0 + (sol.r_star - 1.0) * static_cast<double>(i) / 2000.0;
        const double g = spec.weight(r);
        gmin = std::min(gmin, g);
        gmax = std::max(gmax, g);
    }
    const double kb = k_beta(sol.beta, N, p);
    const double lower =
        std::pow(1.0 + N * sol.beta / (sol.lambda1 * gmax * std::pow(kb, p - 1.0)), 1.0 / N);
    const double upper = std::pow(1.0 + N * sol.beta / (sol.lambda1 * gmin), 1.0 / N);
    const double margin_lower = (sol.r_star - lower) / sol.r_star;
    const double margin_upper = (upper - sol.r_star) / sol.r_star;
    rec.pass = margin_lower >= 0.0 && margin_upper >= 0.0;
    rec.margin = std::min(margin_lower, margin_upper);
    rec.constants = {{"lower", lower}, {"upper", upper}, {"g_min", gmin}, {"g_max", gmax}};
    return rec;
}

/// Unified envelopes: exhibits C1, C2 with
///   C1 sigma(r) B(r) <= |phi'(r)| <= C2 [tau(r-1) beta^{1/(p-1)} + (1-tau(r-1)) r^{-(N-1)/(p-1)} h(r)]
/// where B blends the boundary gradient scale into the far-field decay.
/// Nodes within 1e-6 of r_* are excluded (both sides vanish there with
/// matched rates).
inline CheckRecord verify_unified_envelope(const EigenSolution& sol, const ProblemSpec& spec,
                                           const EnvelopeParams& params) {
    CheckRecord rec;
    rec.name = "unified_envelope";
    if (sol.boundary_kind != BoundaryKind::Robin) {
        rec.pass = true;
        rec.note = "skipped: requires a finite Robin parameter";
        return rec;
    }
    params.validate();
    const int N = spec.dimension;
    const double p = spec.exponent;
    const double s = robin_slope(sol.beta, p);
    const double ge = (N - 1.0) / (p - 1.0);

    auto upper_env = [&](double r) {
        const double tau = transition_tau(r - 1.0, params);
        return tau * s + (1.0 - tau) * std::pow(r, -ge) * log_factor_h(r, N, p);
    };
    auto lower_env = [&](double r) {
        const double tau = transition_tau(r - 1.0, params);
        const double blend = tau * s + (1.0 - tau) * std::pow(r, -ge);
        return modulation_sigma(r, params.critical_radius, params.delta, p) * blend;
    };

    const auto& traj = sol.trajectory;
    double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double r = traj.r[i];
        if (std::abs(r - sol.r_star) < 1e-6) continue;
        const double a = std::abs(traj.dphi[i]);
        const double gl = lower_env(r);
        if (gl > 0.0) c1 = std::min(c1, a / gl);
        c2 = std::max(c2, a / upper_env(r));
    }
    // pointwise sandwich re-assertion with the exhibited constants
    bool sandwich = true;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double r = traj.r[i];
        if (std::abs(r - sol.r_star) < 1e-6) continue;
        const double a = std::abs(traj.dphi[i]);
        if (a < c1 * lower_env(r) * (1.0 - 1e-12) || a > c2 * upper_env(r) * (1.0 + 1e-12)) {
            sandwich = false;
            break;
        }
    }
    rec.pass = c1 > 0.0 && std::isfinite(c2) && c2 > 0.0 && sandwich;
    rec.margin = c1;
    rec.constants = {{"C1", c1},
                     {"C2", c2},
                     {"conditioning", c2 / c1},
                     {"delta", params.delta},
                     {"L", params.length_scale},
                     {"gamma", params.gamma}};
    return rec;
}

/// Hardy-Sobolev ratio H = 1 / (|g|_{(N/p,inf)} int |grad phi|^p): reported,
/// not bounded (the inequality constant C(N,p) is not explicit); the check
/// asserts a strictly positive gradient energy and finite H.
inline CheckRecord verify_hardy_sobolev(const EigenSolution& sol, const ProblemSpec& spec,
                                        const WeightDiagnostics& diag) {
    const int N = spec.dimension;
    const double p = spec.exponent;
    const double omega = sphere_area(N);
    TrajectoryInterpolant interp(sol.trajectory);
    const double body = interp.integrate(
        [&](double r) { return std::pow(r, N - 1) * std::pow(std::abs(interp.dphi(r)), p); },
        interp.r_min(), interp.r_max());
    const double grad_energy =
        omega * (body + gradient_energy_tail(sol.trajectory, spec, sol.lambda1));
    const double h = 1.0 / (diag.lorentz_quasinorm * grad_energy);
    CheckRecord rec;
    rec.name = "hardy_sobolev_ratio";
    rec.pass = grad_energy > 0.0 && std::isfinite(h);
    rec.margin = grad_energy;
    rec.constants = {{"H", h},
                     {"gradient_energy", grad_energy},
                     {"quasinorm", diag.lorentz_quasinorm},
                     {"lambda_minus_boundary", sol.lambda1 - sol.beta * omega *
                                                   std::pow(std::abs(sol.phi_at_1), p)}};
    return rec;
}

/// Runs the full battery in a fixed order. delta_override > 0 replaces the
/// proof-rule choice delta = min(rho_0/2, min(L, r_*-1)/2).
inline VerificationReport run_all_checks(const EigenSolution& sol, const ProblemSpec& spec,
                                         const WeightDiagnostics& diag, double gamma = 2.0,
                                         double delta_override = 0.0) {
    VerificationReport report;
    report.checks.push_back(verify_energy_identity(sol, spec));
    report.checks.push_back(verify_robin_slope(sol, spec));
    report.checks.push_back(verify_decay(sol, spec));
    report.checks.push_back(verify_boundary_expansion(sol, spec));
    report.checks.push_back(verify_gradient_boundary(sol, spec));
    auto [uniq, far] = verify_rstar_and_farfield(sol, spec);
    report.checks.push_back(std::move(uniq));
    report.checks.push_back(std::move(far));
    auto nondeg = verify_nondegeneracy(sol, spec);
    const double rho0 =
        nondeg.constants.count("rho0") ? nondeg.constants.at("rho0") : 0.0;
    report.checks.push_back(nondeg);
    auto [vb, fi] = verify_value_bounds(sol, spec);
    report.checks.push_back(std::move(vb));
    report.checks.push_back(std::move(fi));
    report.checks.push_back(verify_rstar_bounds(sol, spec));
    if (sol.boundary_kind == BoundaryKind::Robin && sol.beta > 0.0 && sol.r_star > 1.0) {
        EnvelopeParams params;
        params.gamma = gamma;
        params.length_scale = char_length(sol.beta, spec.dimension);
        params.critical_radius = sol.r_star;
        const double ell = std::min(params.length_scale, sol.r_star - 1.0);
        params.delta = delta_override > 0.0
                           ? delta_override
                           : std::max(1e-6, std::min(0.5 * rho0, 0.5 * ell));
        report.checks.push_back(verify_unified_envelope(sol, spec, params));
    } else {
        CheckRecord skip;
        skip.name = "unified_envelope";
        skip.pass = true;
        skip.note = "skipped: requires a finite Robin parameter";
        report.checks.push_back(std::move(skip));
    }
    report.checks.push_back(verify_hardy_sobolev(sol, spec, diag));
    return report;
}

}  // namespace exrobin
