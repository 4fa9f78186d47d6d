#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "exrobin/weight.hpp"

namespace exrobin {

/// One eigenvalue problem instance on the exterior of the unit ball:
/// -div(|grad u|^{p-2} grad u) = lambda g |u|^{p-2} u with the Robin
/// condition |grad u|^{p-2} du/dnu + beta |u|^{p-2} u = 0 on the sphere.
/// beta = 0 encodes the Neumann endpoint.
struct ProblemSpec {
    int dimension = 3;        ///< N >= 2
    double exponent = 2.0;    ///< p with 1 < p < N
    double robin_beta = 1.0;  ///< beta >= 0
    RadialWeight weight = RadialWeight::power_law(1.0, 4.0);

    void validate() const {
        if (dimension < 2) throw std::invalid_argument("ProblemSpec: dimension must be >= 2");
        if (!(exponent > 1.0) || !(exponent < static_cast<double>(dimension)))
            throw std::invalid_argument("ProblemSpec: requires 1 < p < N");
        if (!(robin_beta >= 0.0)) throw std::invalid_argument("ProblemSpec: beta must be >= 0");
    }
};

/// Parameters of the unified gradient envelopes.
struct EnvelopeParams {
    double gamma = 2.0;          ///< transition sharpness, >= 2
    double delta = 0.1;          ///< modulation width, > 0
    double length_scale = 1.0;   ///< L = beta^{-1/(N-1)}
    double critical_radius = 1.5;  ///< r_* > 1

    void validate() const {
        if (!(gamma >= 2.0)) throw std::invalid_argument("EnvelopeParams: gamma must be >= 2");
        if (!(delta > 0.0)) throw std::invalid_argument("EnvelopeParams: delta must be positive");
        if (!(length_scale > 0.0)) throw std::invalid_argument("EnvelopeParams: L must be positive");
        if (!(critical_radius > 1.0)) throw std::invalid_argument("EnvelopeParams: r_* must exceed 1");
    }
};

/// Robin slope beta^{1/(p-1)}, the value of phi'(1)/phi(1).
inline double robin_slope(double beta, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("robin_slope: requires p > 1");
    if (!(beta >= 0.0)) throw std::invalid_argument("robin_slope: requires beta >= 0");
    return beta == 0.0 ? 0.0 : std::pow(beta, 1.0 / (p - 1.0));
}

/// Far-field exponents: value decay (N-p)/(p-1), gradient decay (N-1)/(p-1).
inline std::pair<double, double> decay_exponents(int N, double p) {
    if (!(p > 1.0) || !(p < static_cast<double>(N)))
        throw std::invalid_argument("decay_exponents: requires 1 < p < N");
    return {(N - p) / (p - 1.0), (N - 1.0) / (p - 1.0)};
}

/// Characteristic penetration depth L = beta^{-1/(N-1)}.
inline double char_length(double beta, int N) {
    if (!(beta > 0.0)) throw std::invalid_argument("char_length: requires beta > 0");
    return std::pow(beta, -1.0 / (N - 1.0));
}

/// Transition weight tau(r) = (1 + (r/L)^gamma)^{-1}; tau(0) = 1, tau(L) = 1/2.
inline double transition_tau(double r, const EnvelopeParams& params) {
    if (!(r >= 0.0)) throw std::invalid_argument("transition_tau: requires r >= 0");
    return 1.0 / (1.0 + std::pow(r / params.length_scale, params.gamma));
}

/// Critical-point modulation sigma(r) = (|r - r_*| / (|r - r_*| + delta))^{1/(p-1)}.
inline double modulation_sigma(double r, double rstar, double delta, double p) {
    if (!(delta > 0.0)) throw std::invalid_argument("modulation_sigma: requires delta > 0");
    const double d = std::abs(r - rstar);
    return std::pow(d / (d + delta), 1.0 / (p - 1.0));
}

/// Logarithmic envelope factor h(r) = max{1, (log r)^{(N-p)/(N(p-1))}}.
inline double log_factor_h(double r, int N, double p) {
    if (!(r >= 1.0)) throw std::invalid_argument("log_factor_h: requires r >= 1");
    const double e = (N - p) / (N * (p - 1.0));
    return std::max(1.0, std::pow(std::log(r), e));
}

/// Boundary-value bound factor K(beta) = 1 + ((p-1)/(N-p)) beta^{1/(p-1)}.
inline double k_beta(double beta, int N, double p) {
    if (!(p > 1.0) || !(p < static_cast<double>(N)))
        throw std::invalid_argument("k_beta: requires 1 < p < N");
    return 1.0 + (p - 1.0) / (N - p) * robin_slope(beta, p);
}

}  // namespace exrobin
