#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "exrobin/eigensolver.hpp"
#include "exrobin/oracle.hpp"

using namespace exrobin;
using Catch::Approx;

namespace {
const RadialWeight kW4 = RadialWeight::power_law(1.0, 4.0);
const ProblemSpec kOracleSpec{3, 2.0, 1.0, kW4};

Trajectory shoot(const ProblemSpec& spec, double lambda, double phi1, double rmax) {
    IntegrateOptions opts;
    opts.tol = 1e-10;
    opts.quadratures = false;
    const double f1 = spec.robin_beta * std::pow(phi1, spec.exponent - 1.0);
    return integrate_from(spec, lambda, {1.0, phi1, f1}, rmax, opts);
}

// discrete Rayleigh quotient on the same geometric-grid conventions as the
// variational route, for minimality comparisons
double discrete_quotient(const ProblemSpec& spec, int n, double rtrunc,
                         const std::function<double(double)>& profile) {
    const int N = spec.dimension;
    const double p = spec.exponent;
    const double q = (N - p) / (p - 1.0);
    const double l = spec.weight.tail_exponent();
    std::vector<double> r(n), u(n);
    for (int i = 0; i < n; ++i) {
        r[i] = std::exp(std::log(rtrunc) * i / (n - 1));
        u[i] = profile(r[i]);
    }
    double num = spec.robin_beta * std::pow(std::abs(u[0]), p);
    double den = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double h = r[i + 1] - r[i];
        const double rm = std::sqrt(r[i] * r[i + 1]);
        num += std::pow(rm, N - 1) * h * std::pow(std::abs((u[i + 1] - u[i]) / h), p);
        den += 0.5 * h * (std::pow(r[i], N - 1) * spec.weight(r[i]) * std::pow(std::abs(u[i]), p) +
                          std::pow(r[i + 1], N - 1) * spec.weight(r[i + 1]) *
                              std::pow(std::abs(u[i + 1]), p));
    }
    num += std::pow(q, p - 1.0) * std::pow(std::abs(u[n - 1]), p) * std::pow(rtrunc, N - p);
    den += spec.weight(rtrunc) * std::pow(std::abs(u[n - 1]), p) * std::pow(rtrunc, N) /
           (l + p * q - N);
    return num / den;
}

}  // namespace

TEST_CASE("shot classification", "[solver]") {
    // lambda above the eigenvalue: interior zero
    CHECK(classify_shot(shoot(kOracleSpec, 9.0, 1.0, 100.0), 3, 2.0, 0.5) == ShotClass::Overshoot);
    // lambda below: solution tends to a positive constant, log-derivative -> 0
    CHECK(classify_shot(shoot(kOracleSpec, 1.0, 1.0, 100.0), 3, 2.0, 0.5) == ShotClass::Undershoot);
    CHECK(classify_shot(shoot(kOracleSpec, 0.0, 1.0, 100.0), 3, 2.0, 0.5) == ShotClass::Undershoot);
    // at the eigenvalue the terminal state decays at the eigenrate: ambiguous
    const auto o = closed_form_oracle(1.0);
    CHECK(classify_shot(shoot(kOracleSpec, o.lambda1, 1.0, 100.0), 3, 2.0, 0.5) ==
          ShotClass::Ambiguous);
    CHECK_THROWS_AS(classify_shot(shoot(kOracleSpec, 0.0, 1.0, 10.0), 3, 2.0, 1.5),
                    std::invalid_argument);
}

TEST_CASE("classification is scale invariant", "[solver]") {
    for (double lambda : {1.0, 3.0, 5.0, 9.0}) {
        const auto a = classify_shot(shoot(kOracleSpec, lambda, 1.0, 100.0), 3, 2.0, 0.5);
        const auto b = classify_shot(shoot(kOracleSpec, lambda, 5.0, 100.0), 3, 2.0, 0.5);
        CHECK(a == b);
    }
}

TEST_CASE("principal solve agrees with the oracle", "[solver]") {
    const auto sol = solve_principal(kOracleSpec);
    const auto o = closed_form_oracle(1.0);
    CHECK(std::abs(sol.lambda1 - o.lambda1) / o.lambda1 <= 1e-6);
    CHECK(std::abs(sol.r_star - o.rstar) <= 1e-5);
    CHECK(std::abs(sol.phi_at_1 - o.phi_at_1) <= 1e-5);
    CHECK(sol.normalization_residual <= 1e-8);
    CHECK(sol.boundary_kind == BoundaryKind::Robin);
    CHECK(sol.bracket.second - sol.bracket.first <= 1e-8 * sol.bracket.second);

    // truncation monotonicity across the schedule
    REQUIRE(sol.lambda_by_rmax.size() >= 3);
    for (std::size_t i = 1; i < sol.lambda_by_rmax.size(); ++i)
        CHECK(sol.lambda_by_rmax[i] <=
              sol.lambda_by_rmax[i - 1] * (1.0 + 50.0 * 1e-8));
    CHECK(std::abs(sol.lambda_extrapolated - o.lambda1) / o.lambda1 <= 1e-6);

    // Robin boundary identity on the normalized trajectory
    CHECK(std::abs(sol.trajectory.dphi.front() - 1.0 * sol.phi_at_1) <= 1e-8 * sol.phi_at_1);

    // positivity of the principal eigenfunction
    for (double phi : sol.trajectory.phi) CHECK(phi > 0.0);
}

TEST_CASE("bracket validity at the largest truncation radius", "[solver]") {
    const auto sol = solve_principal(kOracleSpec);
    const auto lo_shot = shoot(kOracleSpec, sol.bracket.first, 1.0, sol.r_max_used);
    const auto hi_shot = shoot(kOracleSpec, sol.bracket.second, 1.0, sol.r_max_used);
    const double rate = 1.0;  // (N-p)/(p-1)
    // low side: no zero and sub-eigenrate terminal decay
    CHECK_FALSE(lo_shot.events.first_phi_zero.has_value());
    CHECK(terminal_logderiv(lo_shot) < rate);
    // high side: zero or eigenrate-fast terminal decay
    CHECK((hi_shot.events.first_phi_zero.has_value() || terminal_logderiv(hi_shot) >= rate));
}

TEST_CASE("energy identity of the normalized pair", "[solver]") {
    const auto sol = solve_principal(kOracleSpec);
    const auto& t = sol.trajectory;
    const double omega = sphere_area(3);
    const double tail = gradient_energy_tail(t, kOracleSpec, sol.lambda1);
    const double j = omega * (t.gradient_energy.back() + tail) +
                     sol.beta * omega * std::pow(sol.phi_at_1, 2.0);
    CHECK(j == Approx(sol.lambda1).epsilon(1e-6));
}

TEST_CASE("beta monotonicity", "[solver]") {
    ProblemSpec s1 = kOracleSpec;
    ProblemSpec s2 = kOracleSpec;
    s2.robin_beta = 2.0;
    const double l1 = solve_principal(s1).lambda1;
    const double l2 = solve_principal(s2).lambda1;
    CHECK(l2 > l1);
    CHECK(l2 == Approx(closed_form_oracle(2.0).lambda1).epsilon(1e-6));
}

TEST_CASE("neumann endpoint", "[solver]") {
    ProblemSpec spec = kOracleSpec;
    spec.robin_beta = 0.0;
    const auto sol = solve_neumann(spec);
    CHECK(sol.lambda1 == Approx(oracle_neumann_lambda()).epsilon(1e-6));
    CHECK(sol.lambda1 > 0.0);
    CHECK(sol.r_star == 1.0);
    CHECK(sol.trajectory.flux.front() == 0.0);
    // lambda^N below every Robin value
    for (double beta : {0.05, 1.0, 20.0}) {
        ProblemSpec rs = kOracleSpec;
        rs.robin_beta = beta;
        CHECK(sol.lambda1 < solve_principal(rs).lambda1);
    }
}

TEST_CASE("dirichlet endpoint", "[solver]") {
    const auto sol = solve_dirichlet(kOracleSpec);
    CHECK(sol.lambda1 == Approx(oracle_dirichlet_lambda()).epsilon(1e-6));
    CHECK(sol.phi_at_1 == 0.0);
    CHECK(sol.r_star == Approx(2.0).margin(1e-5));
    // r_* is the maximum location
    TrajectoryInterpolant interp(sol.trajectory);
    const double at_star = interp.phi(sol.r_star);
    for (double r : {1.2, 1.7, 2.4, 3.0, 10.0}) CHECK(interp.phi(r) <= at_star);
    // Robin values stay strictly below
    for (double beta : {0.1, 1.0, 10.0, 100.0}) {
        ProblemSpec rs = kOracleSpec;
        rs.robin_beta = beta;
        CHECK(solve_principal(rs).lambda1 < sol.lambda1);
    }
}

TEST_CASE("dirichlet limit of large beta", "[solver]") {
    ProblemSpec spec = kOracleSpec;
    spec.robin_beta = 1e6;
    const auto sol = solve_principal(spec);
    CHECK(std::abs(sol.lambda1 - oracle_dirichlet_lambda()) <= 1e-2);
}

TEST_CASE("normalize", "[solver]") {
    const auto o = closed_form_oracle(1.0);
    // unnormalized trajectory at the true eigenvalue, phi(1) = 1
    const auto raw = integrate(kOracleSpec, o.lambda1, 1.0, 400.0, 1e-10);
    auto [normalized, residual] = normalize(raw, kOracleSpec);
    CHECK(residual <= 1e-7);
    // the rescaled profile carries the closed-form amplitude: phi = A sin(k/r)
    CHECK(normalized.phi.front() == Approx(o.phi_at_1).margin(1e-6));
    const double scale = normalized.phi.front() / raw.phi.front();
    CHECK(scale == Approx(o.phi_at_1).margin(1e-6));  // A sin k for unit start

    // homogeneity: normalizing a trajectory started at phi1 = 5 gives the
    // same profile, so the eigenvalue is scale-free
    const auto raw5 = integrate(kOracleSpec, o.lambda1, 5.0, 400.0, 1e-10);
    auto [normalized5, residual5] = normalize(raw5, kOracleSpec);
    CHECK(residual5 <= 1e-7);
    CHECK(normalized5.phi.front() == Approx(normalized.phi.front()).epsilon(1e-9));

    CHECK_THROWS_AS(normalize(shoot(kOracleSpec, o.lambda1, 1.0, 50.0), kOracleSpec),
                    std::invalid_argument);  // no quadrature columns
}

TEST_CASE("solver rejects inadmissible setups", "[solver]") {
    ProblemSpec bad = kOracleSpec;
    bad.weight = RadialWeight::power_law(1.0, 2.0);  // l = p: closure proxy fails
    CHECK_THROWS_AS(solve_principal(bad), std::invalid_argument);

    ProblemSpec neumann_beta = kOracleSpec;
    neumann_beta.robin_beta = 0.0;
    CHECK_THROWS_AS(solve_principal(neumann_beta), std::invalid_argument);
}

TEST_CASE("variational cross-check", "[solver]") {
    const auto o = closed_form_oracle(1.0);
    const double rq = variational_crosscheck(kOracleSpec, 2000, 200.0);
    CHECK(std::abs(rq - o.lambda1) / o.lambda1 <= 1e-3);

    // minimality: the converged quotient does not exceed the quotient of the
    // exact oracle profile on the same grid
    const double oracle_rq = discrete_quotient(
        kOracleSpec, 2000, 200.0, [&](double r) { return oracle_phi(o, r); });
    CHECK(rq <= oracle_rq * (1.0 + 1e-8));

    // Neumann variant from the cold start
    ProblemSpec nspec = kOracleSpec;
    nspec.robin_beta = 0.0;
    CHECK(std::abs(variational_crosscheck(nspec, 2000, 200.0) - oracle_neumann_lambda()) /
              oracle_neumann_lambda() <=
          1e-3);
}

TEST_CASE("tabulated weight reproduces the power-law solve", "[solver]") {
    // log-log linear interpolation represents r^{-4} exactly, so the closed
    // form still applies end to end (table, tail fit, quadratures, solve)
    std::vector<double> radii, values;
    for (int i = 0; i <= 400; ++i) {
        const double r = std::pow(10.0, 3.0 * i / 400.0);
        radii.push_back(r);
        values.push_back(std::pow(r, -4.0));
    }
    ProblemSpec spec{3, 2.0, 1.0, RadialWeight::tabulated(radii, values)};
    const auto sol = solve_principal(spec);
    const auto o = closed_form_oracle(1.0);
    CHECK(std::abs(sol.lambda1 - o.lambda1) / o.lambda1 <= 1e-6);
    CHECK(std::abs(sol.r_star - o.rstar) <= 1e-5);
    CHECK(std::abs(sol.phi_at_1 - o.phi_at_1) <= 1e-5);
}

TEST_CASE("randomized admissible instances satisfy the solver invariants", "[solver]") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 3 + static_cast<int>(uni(rng) * 3.0);  // N in {3,4,5}
        const double p = 1.6 + uni(rng) * (n - 1.0 - 1.7);
        const double l = p + 1.2 + 2.5 * uni(rng);
        const double c0 = 0.5 + 1.5 * uni(rng);
        const double beta = std::pow(10.0, -1.0 + 2.0 * uni(rng));
        ProblemSpec spec{n, p, beta, RadialWeight::power_law(c0, l)};
        INFO("N=" << n << " p=" << p << " l=" << l << " c0=" << c0 << " beta=" << beta);

        const auto sol = solve_principal(spec);
        CHECK(sol.lambda1 > 0.0);
        CHECK(sol.trajectory.events.f_sign_changes == 1);
        CHECK(sol.r_star > 1.0);
        CHECK(sol.normalization_residual <= 1e-7);
        for (double phi : sol.trajectory.phi) CHECK(phi > 0.0);
        for (std::size_t i = 1; i < sol.lambda_by_rmax.size(); ++i)
            CHECK(sol.lambda_by_rmax[i] <= sol.lambda_by_rmax[i - 1] * (1.0 + 5e-7));

        // energy identity from the trajectory quadratures
        const double omega = sphere_area(n);
        const auto& t = sol.trajectory;
        const double j = omega * (t.gradient_energy.back() + gradient_energy_tail(t, spec, sol.lambda1)) +
                         beta * omega * std::pow(sol.phi_at_1, p);
        CHECK(j == Approx(sol.lambda1).epsilon(1e-6));

        // endpoint ordering
        const double lam_n = solve_neumann(spec).lambda1;
        const double lam_d = solve_dirichlet(spec).lambda1;
        CHECK(lam_n < sol.lambda1);
        CHECK(sol.lambda1 < lam_d);
    }
}

TEST_CASE("p != 2 instance: shooting, variational, identities", "[solver]") {
    ProblemSpec spec{5, 3.0, 1.0, RadialWeight::power_law(1.0, 6.0)};
    const auto sol = solve_principal(spec);
    CHECK(sol.normalization_residual <= 1e-8);

    // shooting vs variational (cold start; also matches the warm start)
    const double rq = variational_crosscheck(spec, 1500, 150.0);
    CHECK(std::abs(rq - sol.lambda1) / sol.lambda1 <= 1e-3);
    const double rq_warm = variational_crosscheck(spec, 1500, 150.0, &sol.trajectory);
    CHECK(std::abs(rq_warm - rq) / rq <= 1e-6);  // multi-start agreement

    // Robin slope residual
    const double slope = robin_slope(1.0, 3.0);
    CHECK(std::abs(sol.trajectory.dphi.front() - slope * sol.phi_at_1) <= 1e-8 * sol.phi_at_1);

    // energy identity via the trajectory quadratures
    const double omega = sphere_area(5);
    const auto& t = sol.trajectory;
    const double j = omega * (t.gradient_energy.back() + gradient_energy_tail(t, spec, sol.lambda1)) +
                     omega * std::pow(sol.phi_at_1, 3.0);
    CHECK(j == Approx(sol.lambda1).epsilon(1e-6));
}
