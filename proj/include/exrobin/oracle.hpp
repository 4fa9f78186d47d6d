#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "exrobin/numerics.hpp"

namespace exrobin {

/// Closed-form principal eigenpair for the instance N = 3, p = 2,
/// g(r) = r^{-4}. The substitution s = 1/r turns the radial equation into
/// psi'' + lambda psi = 0 on (0, 1], so phi(r) = A sin(k/r) with k the
/// smallest root in (pi/2, pi] of k cos k + beta sin k = 0, lambda_1 = k^2,
/// r_* = 2k/pi, and A fixed by 4 pi A^2 int_0^1 sin^2(ks) ds = 1.
struct OracleEigenpair {
    double beta = 0.0;
    double k = 0.0;
    double lambda1 = 0.0;
    double rstar = 0.0;
    double amplitude = 0.0;       ///< A
    double phi_at_1 = 0.0;        ///< A sin k
    double dlambda_dbeta = 0.0;   ///< 2 k k' by implicit differentiation
};

inline OracleEigenpair closed_form_oracle(double beta) {
    if (!(beta >= 0.0)) throw std::invalid_argument("closed_form_oracle: beta must be >= 0");
    using std::numbers::pi;
    double k;
    if (beta == 0.0) {
        k = 0.5 * pi;  // Neumann endpoint: cos k = 0
    } else {
        k = detail::bisect([&](double x) { return x * std::cos(x) + beta * std::sin(x); },
                           0.5 * pi, pi, 1e-16);
    }
    OracleEigenpair o;
    o.beta = beta;
    o.k = k;
    o.lambda1 = k * k;
    o.rstar = 2.0 * k / pi;
    o.amplitude = 1.0 / std::sqrt(4.0 * pi * (0.5 - std::sin(2.0 * k) / (4.0 * k)));
    o.phi_at_1 = o.amplitude * std::sin(k);
    const double kp = -std::sin(k) / (std::cos(k) - k * std::sin(k) + beta * std::cos(k));
    o.dlambda_dbeta = 2.0 * k * kp;
    return o;
}

/// Normalized eigenfunction phi(r) = A sin(k/r).
inline double oracle_phi(const OracleEigenpair& o, double r) {
    return o.amplitude * std::sin(o.k / r);
}

/// phi'(r) = -A k cos(k/r) / r^2.
inline double oracle_dphi(const OracleEigenpair& o, double r) {
    return -o.amplitude * o.k * std::cos(o.k / r) / (r * r);
}

/// Neumann endpoint eigenvalue pi^2/4 (root equation degenerates to cos k = 0).
inline double oracle_neumann_lambda() {
    return 0.25 * std::numbers::pi * std::numbers::pi;
}

/// Dirichlet endpoint eigenvalue pi^2 (sin k = 0).
inline double oracle_dirichlet_lambda() {
    return std::numbers::pi * std::numbers::pi;
}

}  // namespace exrobin
