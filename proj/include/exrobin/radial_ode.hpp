#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "exrobin/core.hpp"
#include "exrobin/numerics.hpp"

namespace exrobin {

/// One point of the first-order system (phi, F) with F = r^{N-1}|phi'|^{p-2}phi'.
/// The flux variable is C^1 through critical points where phi' vanishes,
/// which is what makes the formulation usable for p != 2.
struct OdeState {
    double r = 1.0;
    double phi = 1.0;
    double flux = 0.0;
};

/// phi' recovered from the flux: sign(F) (|F| / r^{N-1})^{1/(p-1)}.
inline double phi_prime_from_flux(double flux, double r, int N, double p) {
    const double rn = std::pow(r, N - 1);
    if (p == 2.0) return flux / rn;
    return signed_pow(flux / rn, 1.0 / (p - 1.0));
}

/// Right-hand side of the radial system:
///   dphi/dr = sign(F) (|F| / r^{N-1})^{1/(p-1)}
///   dF/dr   = -lambda r^{N-1} g(r) |phi|^{p-2} phi
inline std::pair<double, double> vector_field(const OdeState& state, double lambda,
                                              const ProblemSpec& spec) {
    const double rn = std::pow(state.r, spec.dimension - 1);
    const double g = spec.weight(state.r);
    double dphi, drive;
    if (spec.exponent == 2.0) {
        dphi = state.flux / rn;
        drive = state.phi;
    } else {
        dphi = signed_pow(state.flux / rn, 1.0 / (spec.exponent - 1.0));
        drive = signed_pow(state.phi, spec.exponent - 1.0);
    }
    return {dphi, -lambda * rn * g * drive};
}

struct OdeEvents {
    std::optional<double> first_phi_zero;  ///< first interior zero of phi (halts integration)
    std::optional<double> f_zero_rstar;    ///< first zero crossing of F (the critical radius)
    int f_sign_changes = 0;                ///< total strict sign changes of F across nodes
};

struct StepStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    double max_error_estimate = 0.0;  ///< largest accepted local error, in units of the tolerance
};

/// A radial solution record: node grids of r, phi, phi', F and F', cumulative
/// quadratures of the constraint / gradient-energy / flux-drive densities,
/// plus detected events. Immutable after construction; safe to share.
struct Trajectory {
    int dimension = 3;
    double exponent = 2.0;
    std::vector<double> r, phi, dphi, flux, flux_slope;
    std::vector<double> weight_mass;      ///< int_1^r s^{N-1} g |phi|^p ds
    std::vector<double> gradient_energy;  ///< int_1^r s^{N-1} |phi'|^p ds
    std::vector<double> weight_drive;     ///< int_1^r s^{N-1} g |phi|^{p-2} phi ds
    OdeEvents events;
    StepStats stats;

    std::size_t size() const { return r.size(); }
    double r_max() const { return r.back(); }
};

struct IntegrateOptions {
    double tol = 1e-10;          ///< per-step relative error target
    double max_ratio = 1.05;     ///< cap r_{i+1}/r_i
    double boundary_cap = 1e-3;  ///< max step while r < boundary_zone
    double boundary_zone = 1.1;
    bool quadratures = true;     ///< carry the three cumulative integrals
};

namespace detail {

// Dormand-Prince 5(4) coefficients.
struct Dopri5 {
    static constexpr std::array<double, 7> c = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr std::array<std::array<double, 6>, 7> a = {{
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
    }};
    static constexpr std::array<double, 7> err = {71.0 / 57600,      0.0,        -71.0 / 16695,
                                                  71.0 / 1920,       -17253.0 / 339200,
                                                  22.0 / 525,        -1.0 / 40};
};

constexpr std::size_t kMaxComponents = 5;
using StateVec = std::array<double, kMaxComponents>;

/// Cubic Hermite value on [r0, r1] from endpoint values and slopes.
inline double hermite_value(double r, double r0, double r1, double y0, double y1, double d0,
                            double d1) {
    const double h = r1 - r0, s = (r - r0) / h, s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * h * d1;
}

}  // namespace detail

/// Integrates the radial system from an arbitrary initial state with an
/// adaptive embedded Runge-Kutta scheme (Dormand-Prince 5(4)).
///
/// Integration halts early at the first interior zero of phi; both that zero
/// and the first zero crossing of F are located by bisection on the local
/// dense output, refined to 10 machine epsilons in r.
inline Trajectory integrate_from(const ProblemSpec& spec, double lambda, OdeState init,
                                 double r_end, const IntegrateOptions& opts = {}) {
    spec.validate();
    if (!(lambda >= 0.0)) throw std::invalid_argument("integrate: lambda must be >= 0");
    if (!(r_end > init.r)) throw std::invalid_argument("integrate: R_max must exceed the start radius");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");

    const int N = spec.dimension;
    const double p = spec.exponent;
    const std::size_t ncomp = opts.quadratures ? 5 : 2;

    auto rhs = [&](double r, const detail::StateVec& y, detail::StateVec& dy) {
        const OdeState s{r, y[0], y[1]};
        const auto [dphi, dflux] = vector_field(s, lambda, spec);
        dy[0] = dphi;
        dy[1] = dflux;
        if (ncomp == 5) {
            const double rn = std::pow(r, N - 1);
            const double g = spec.weight(r);
            const double aphi = std::abs(y[0]);
            dy[2] = rn * g * std::pow(aphi, p);
            dy[3] = rn * std::pow(std::abs(dphi), p);
            dy[4] = rn * g * signed_pow(y[0], p - 1.0);
        }
    };

    Trajectory traj;
    traj.dimension = N;
    traj.exponent = p;

    detail::StateVec y{init.phi, init.flux, 0.0, 0.0, 0.0};
    detail::StateVec scale{std::abs(init.phi), std::abs(init.flux), 0.0, 0.0, 0.0};
    double r = init.r;

    detail::StateVec k[7];
    rhs(r, y, k[0]);

    auto push_node = [&](double rr, const detail::StateVec& yy, const detail::StateVec& ff) {
        traj.r.push_back(rr);
        traj.phi.push_back(yy[0]);
        traj.dphi.push_back(ff[0]);
        traj.flux.push_back(yy[1]);
        traj.flux_slope.push_back(ff[1]);
        if (ncomp == 5) {
            traj.weight_mass.push_back(yy[2]);
            traj.gradient_energy.push_back(yy[3]);
            traj.weight_drive.push_back(yy[4]);
        }
    };
    push_node(r, y, k[0]);

    double h = std::min({1e-4, opts.boundary_cap, r_end - r});
    const double hmin_factor = 1e-14;

    while (r < r_end) {
        double hcap = (opts.max_ratio - 1.0) * r;
        if (r < opts.boundary_zone) hcap = std::min(hcap, opts.boundary_cap);
        h = std::min({h, hcap, r_end - r});
        if (h < hmin_factor * r)
            throw std::runtime_error("integrate: step-size underflow at r = " + std::to_string(r));

        // one Dormand-Prince step
        detail::StateVec ytmp{}, ynew{}, err_vec{};
        for (int stage = 1; stage < 7; ++stage) {
            for (std::size_t c = 0; c < ncomp; ++c) {
                double acc = 0.0;
                for (int j = 0; j < stage; ++j) acc += detail::Dopri5::a[stage][j] * k[j][c];
                ytmp[c] = y[c] + h * acc;
            }
            rhs(r + detail::Dopri5::c[stage] * h, ytmp, k[stage]);
        }
        ynew = ytmp;  // stage 7 uses the 5th-order weights, so ytmp is the solution
        for (std::size_t c = 0; c < ncomp; ++c) {
            double acc = 0.0;
            for (int j = 0; j < 7; ++j) acc += detail::Dopri5::err[j] * k[j][c];
            err_vec[c] = h * acc;
        }

        // error control over the dynamical pair (phi, F) only; the cumulative
        // quadratures are integrated passively and inherit the step accuracy
        double err = 0.0;
        for (std::size_t c = 0; c < 2; ++c) {
            const double sc = 1e-30 + opts.tol * std::max({scale[c], std::abs(y[c]), std::abs(ynew[c])});
            const double e = err_vec[c] / sc;
            err += e * e;
        }
        err = std::sqrt(0.5 * err);

        if (!std::isfinite(err) || !std::isfinite(ynew[0]) || !std::isfinite(ynew[1]))
            throw std::runtime_error("integrate: non-finite state near r = " + std::to_string(r));

        if (err > 1.0) {
            ++traj.stats.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }

        ++traj.stats.accepted;
        traj.stats.max_error_estimate = std::max(traj.stats.max_error_estimate, err);
        const double r_new = r + h;
        detail::StateVec& f_new = k[6];  // FSAL: stage 7 is the derivative at (r_new, ynew)

        const double phi0 = y[0], phi1 = ynew[0];
        const double f0 = y[1], f1 = ynew[1];

        // F sign change: locate the critical radius on the step's dense output
        if (sgn(f0) != 0.0 && sgn(f1) != 0.0 && sgn(f0) != sgn(f1)) {
            const double rz = detail::bisect(
                [&](double rr) {
                    return detail::hermite_value(rr, r, r_new, f0, f1, k[0][1], f_new[1]);
                },
                r, r_new, 10.0 * std::numeric_limits<double>::epsilon() * r_new);
            ++traj.events.f_sign_changes;
            if (!traj.events.f_zero_rstar) traj.events.f_zero_rstar = rz;
        }

        // first zero of phi: truncate the trajectory there and stop
        if (phi0 > 0.0 && phi1 <= 0.0) {
            double rz = r_new;
            if (phi1 < 0.0)
                rz = detail::bisect(
                    [&](double rr) {
                        return detail::hermite_value(rr, r, r_new, phi0, phi1, k[0][0], f_new[0]);
                    },
                    r, r_new, 10.0 * std::numeric_limits<double>::epsilon() * r_new);
            traj.events.first_phi_zero = rz;
            detail::StateVec yz{}, fz{};
            for (std::size_t c = 0; c < ncomp; ++c)
                yz[c] = detail::hermite_value(rz, r, r_new, y[c], ynew[c], k[0][c], f_new[c]);
            yz[0] = 0.0;
            rhs(rz, yz, fz);
            push_node(rz, yz, fz);
            return traj;
        }

        y = ynew;
        r = r_new;
        k[0] = f_new;
        for (std::size_t c = 0; c < ncomp; ++c) scale[c] = std::max(scale[c], std::abs(y[c]));
        push_node(r, y, k[0]);

        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    }
    return traj;
}

/// Integration with the Robin initial condition phi(1) = phi1,
/// F(1) = beta phi1^{p-1} (equivalently phi'(1) = beta^{1/(p-1)} phi1).
inline Trajectory integrate(const ProblemSpec& spec, double lambda, double phi1, double r_max,
                            double tol) {
    if (!(phi1 > 0.0)) throw std::invalid_argument("integrate: phi1 must be positive");
    IntegrateOptions opts;
    opts.tol = tol;
    const double f1 = spec.robin_beta * std::pow(phi1, spec.exponent - 1.0);
    return integrate_from(spec, lambda, OdeState{1.0, phi1, f1}, r_max, opts);
}

/// Cubic Hermite view of a trajectory; phi' is recovered from the
/// interpolated flux so the |r - r_*|^{1/(p-1)} structure near the critical
/// point is represented exactly.
class TrajectoryInterpolant {
public:
    explicit TrajectoryInterpolant(const Trajectory& traj)
        : N_(traj.dimension),
          p_(traj.exponent),
          nodes_(traj.r),
          phi_(traj.r, traj.phi, traj.dphi),
          flux_(traj.r, traj.flux, traj.flux_slope) {}

    double r_min() const { return nodes_.front(); }
    double r_max() const { return nodes_.back(); }
    double phi(double r) const { return phi_(r); }
    double flux(double r) const { return flux_(r); }
    double dphi(double r) const { return phi_prime_from_flux(flux_(r), r, N_, p_); }

    /// Composite Gauss quadrature of f(r) over [lo, hi] with one panel per
    /// node interval; f may call back into phi/dphi.
    template <typename F>
    double integrate(F&& f, double lo, double hi) const {
        lo = std::max(lo, r_min());
        hi = std::min(hi, r_max());
        if (!(hi > lo)) return 0.0;
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), lo);
        double a = lo, acc = 0.0;
        for (; it != nodes_.end() && *it < hi; ++it) {
            acc += detail::gauss7(f, a, *it);
            a = *it;
        }
        acc += detail::gauss7(f, a, hi);
        return acc;
    }

private:
    int N_;
    double p_;
    std::vector<double> nodes_;
    HermiteSpline phi_, flux_;
};

/// Samples (phi, phi') at the requested radii by monotone-grid cubic
/// interpolation of (phi, F), recovering phi' from F.
inline std::vector<std::pair<double, double>> resample(const Trajectory& traj,
                                                       std::span<const double> radii) {
    TrajectoryInterpolant interp(traj);
    std::vector<std::pair<double, double>> out;
    out.reserve(radii.size());
    for (double r : radii) {
        if (r < interp.r_min() || r > interp.r_max())
            throw std::out_of_range("resample: radius outside trajectory span");
        out.emplace_back(interp.phi(r), interp.dphi(r));
    }
    return out;
}

}  // namespace exrobin
