#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "exrobin/numerics.hpp"

namespace exrobin {

enum class WeightKind { PowerLaw, Tabulated };

/// Surface area of the unit sphere in R^N, 2 pi^{N/2} / Gamma(N/2).
inline double sphere_area(int dimension) {
    if (dimension < 2) throw std::invalid_argument("sphere_area: dimension must be >= 2");
    const double half = 0.5 * static_cast<double>(dimension);
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

/// Radial weight g(r) on [1, inf), strictly positive and decaying.
///
/// PowerLaw weights are g(r) = C0 r^{-l}. Tabulated weights interpolate
/// log g linearly in log r between samples and extend past the last sample
/// with a power-law tail whose exponent is fitted over the last decade.
class RadialWeight {
public:
    static RadialWeight power_law(double c0, double l) {
        if (!(c0 > 0.0)) throw std::invalid_argument("RadialWeight: amplitude C0 must be positive");
        RadialWeight w;
        w.kind_ = WeightKind::PowerLaw;
        w.c0_ = c0;
        w.l_ = l;
        return w;
    }

    static RadialWeight tabulated(std::vector<double> radii, std::vector<double> values) {
        if (radii.size() != values.size() || radii.size() < 4)
            throw std::invalid_argument("RadialWeight: table needs >= 4 (r, g) samples");
        if (radii.front() != 1.0)
            throw std::invalid_argument("RadialWeight: first table radius must be 1.0");
        for (std::size_t i = 0; i < radii.size(); ++i) {
            if (!(values[i] > 0.0))
                throw std::invalid_argument("RadialWeight: table values must be strictly positive");
            if (i > 0 && !(radii[i] > radii[i - 1]))
                throw std::invalid_argument("RadialWeight: table radii must be strictly increasing");
        }
        RadialWeight w;
        w.kind_ = WeightKind::Tabulated;
        w.log_r_.reserve(radii.size());
        w.log_g_.reserve(radii.size());
        for (std::size_t i = 0; i < radii.size(); ++i) {
            w.log_r_.push_back(std::log(radii[i]));
            w.log_g_.push_back(std::log(values[i]));
        }
        w.c0_ = values.front();
        w.fit_tail();
        return w;
    }

    /// Loads a two-column CSV with header "r,g", radii ascending from 1.0.
    static RadialWeight from_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("RadialWeight: cannot open '" + path + "'");
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("RadialWeight: '" + path + "' is empty");
        if (line != "r,g" && line != "r,g\r")
            throw std::runtime_error("RadialWeight: '" + path + "' line 1: expected header 'r,g'");
        std::vector<double> radii, values;
        int lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line == "\r") continue;
            std::istringstream row(line);
            double r = 0, g = 0;
            char comma = 0;
            if (!(row >> r >> comma >> g) || comma != ',')
                throw std::runtime_error("RadialWeight: '" + path + "' line " + std::to_string(lineno) +
                                         ": expected 'r,g' pair");
            if (!radii.empty() && r <= radii.back())
                throw std::runtime_error("RadialWeight: '" + path + "' line " + std::to_string(lineno) +
                                         ": radii must be strictly increasing");
            radii.push_back(r);
            values.push_back(g);
        }
        return tabulated(std::move(radii), std::move(values));
    }

    WeightKind kind() const { return kind_; }
    double amplitude() const { return c0_; }

    /// Tail exponent l of g(r) ~ coeff * r^{-l} for large r (exact for PowerLaw).
    double tail_exponent() const { return kind_ == WeightKind::PowerLaw ? l_ : tail_l_; }
    double tail_coefficient() const { return kind_ == WeightKind::PowerLaw ? c0_ : tail_c_; }

    double operator()(double r) const {
        if (!(r >= 1.0)) throw std::invalid_argument("RadialWeight: evaluation requires r >= 1");
        if (kind_ == WeightKind::PowerLaw) return c0_ * std::pow(r, -l_);
        const double x = std::log(r);
        if (x >= log_r_.back()) return tail_c_ * std::exp(-tail_l_ * x);
        auto it = std::upper_bound(log_r_.begin(), log_r_.end(), x);
        std::size_t i = static_cast<std::size_t>(std::distance(log_r_.begin(), it));
        i = std::clamp<std::size_t>(i, 1, log_r_.size() - 1) - 1;
        const double t = (x - log_r_[i]) / (log_r_[i + 1] - log_r_[i]);
        return std::exp((1.0 - t) * log_g_[i] + t * log_g_[i + 1]);
    }

    /// True when the samples (and tail) are non-increasing in r.
    bool decreasing() const {
        if (kind_ == WeightKind::PowerLaw) return l_ >= 0.0;
        for (std::size_t i = 1; i < log_g_.size(); ++i)
            if (log_g_[i] > log_g_[i - 1]) return false;
        return tail_l_ >= 0.0;
    }

private:
    RadialWeight() = default;

    void fit_tail() {
        // fit log g = log c - l log r over the last decade of samples
        const double cutoff = log_r_.back() - std::numbers::ln10;
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < log_r_.size(); ++i) {
            if (log_r_[i] >= cutoff) {
                xs.push_back(log_r_[i]);
                ys.push_back(log_g_[i]);
            }
        }
        if (xs.size() < 2) {
            xs = {log_r_[log_r_.size() - 2], log_r_.back()};
            ys = {log_g_[log_g_.size() - 2], log_g_.back()};
        }
        auto [slope, intercept] = detail::fit_line(xs, ys);
        tail_l_ = -slope;
        // pin the tail to the last sample so g is continuous
        tail_c_ = std::exp(log_g_.back() + tail_l_ * log_r_.back());
        (void)intercept;
    }

    WeightKind kind_ = WeightKind::PowerLaw;
    double c0_ = 1.0;
    double l_ = 0.0;
    std::vector<double> log_r_, log_g_;
    double tail_l_ = 0.0, tail_c_ = 1.0;
};

/// Lorentz / Lebesgue diagnostics of a weight, plus admissibility flags.
struct WeightDiagnostics {
    double lorentz_quasinorm = 0.0;  ///< sup_t t^{p/N} g*(t)
    double lebesgue_norm = 0.0;      ///< ||g||_{L^{N/p}}
    double moment_Ig = 0.0;          ///< int_1^inf r^{N-1} g dr, +inf when divergent
    double cg_constant = 0.0;        ///< (omega_{N-1} I_g)^{-1/p}, 0 when I_g diverges
    bool admissible_classA = false;  ///< finite quasinorm with vanishing grid tails
    bool admissible_thm14a = false;  ///< tail exponent l > N (finite moment)
};

namespace detail {

/// Radius r_s where g(r_s) = s for a decreasing weight; the level set
/// {g > s} is the annulus 1 < r < r_s. Returns 1 when s >= g(1).
inline double level_radius(const RadialWeight& w, double s) {
    if (s >= w(1.0)) return 1.0;
    // bracket in log r, expanding until g < s
    double lo = 0.0, hi = std::numbers::ln10;
    while (w(std::exp(hi)) > s) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e4) return std::numeric_limits<double>::infinity();
    }
    const double x = bisect([&](double t) { return w(std::exp(t)) - s; }, lo, hi, 1e-15);
    return std::exp(x);
}

/// Distribution function alpha(s) = |{g > s}| on the exterior domain.
inline double distribution_volume(const RadialWeight& w, int N, double s) {
    const double rs = level_radius(w, s);
    if (std::isinf(rs)) return std::numeric_limits<double>::infinity();
    return sphere_area(N) / N * (std::pow(rs, N) - 1.0);
}

}  // namespace detail

/// Decreasing rearrangement g*(t) of the weight over the exterior domain.
inline double rearrangement(const RadialWeight& weight, int N, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("rearrangement: t must be positive");
    if (!weight.decreasing())
        throw std::invalid_argument("rearrangement: non-monotone tabulated weights are unsupported");
    const double omega = sphere_area(N);
    if (weight.kind() == WeightKind::PowerLaw) {
        // closed form from the level-set volume of {g > s}
        return weight.amplitude() *
               std::pow(N * t / omega + 1.0, -weight.tail_exponent() / static_cast<double>(N));
    }
    // invert the distribution function numerically
    const double top = weight(1.0);
    double slo = top, shi = top;
    while (detail::distribution_volume(weight, N, slo) < t) {
        slo *= 0.5;
        if (slo < 1e-300) return 0.0;
    }
    const double x =
        detail::bisect([&](double ls) { return detail::distribution_volume(weight, N, std::exp(ls)) - t; },
                       std::log(slo), std::log(shi), 1e-14);
    return std::exp(x);
}

/// Lorentz quasinorm |g|_{(N/p, inf)} = sup_t t^{p/N} g*(t), evaluated on a
/// geometric t-grid over [1e-6, 1e12] with 200-per-decade refinement around
/// the maximizer. Returns +inf when the sup grows without plateau.
inline double lorentz_quasinorm(const RadialWeight& weight, int N, double p) {
    if (!(p > 1.0 && p < static_cast<double>(N)))
        throw std::invalid_argument("lorentz_quasinorm: requires 1 < p < N");
    const double e = p / static_cast<double>(N);
    auto value = [&](double log10_t) {
        const double t = std::pow(10.0, log10_t);
        return std::pow(t, e) * rearrangement(weight, N, t);
    };
    constexpr double kLo = -6.0, kHi = 12.0;
    double best = -1.0, best_x = kLo;
    for (double x = kLo; x <= kHi + 1e-12; x += 0.1) {
        const double v = value(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    if (best_x >= kHi - 0.05 && value(kHi) > value(kHi - 1.0))
        return std::numeric_limits<double>::infinity();  // still growing at the grid end
    const double wlo = std::max(kLo, best_x - 1.0), whi = std::min(kHi, best_x + 1.0);
    for (double x = wlo; x <= whi + 1e-12; x += 0.005) {
        const double v = value(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    // golden-section polish around the refined maximizer
    double a = std::max(kLo, best_x - 0.005), b = std::min(kHi, best_x + 0.005);
    constexpr double kInvPhi = 0.6180339887498949;
    double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
    for (int i = 0; i < 60; ++i) {
        if (value(c) > value(d)) b = d; else a = c;
        c = b - kInvPhi * (b - a);
        d = a + kInvPhi * (b - a);
    }
    return std::max(best, value(0.5 * (a + b)));
}

/// Weighted moment I_g = int_1^inf r^{N-1} g(r) dr via adaptive quadrature on
/// [1, R_cut] plus the analytic power-law tail; +inf when the tail diverges.
inline double weighted_moment(const RadialWeight& weight, int N) {
    const double l = weight.tail_exponent();
    if (l <= static_cast<double>(N)) return std::numeric_limits<double>::infinity();
    constexpr double kRCut = 1e6;
    // substitute r = e^x so the integrand decays exponentially
    auto f = [&](double x) {
        const double r = std::exp(x);
        return std::pow(r, N) * weight(r);
    };
    const double body = detail::adaptive_simpson(f, 0.0, std::log(kRCut), 1e-14);
    const double tail = weight(kRCut) * std::pow(kRCut, N) / (l - static_cast<double>(N));
    return body + tail;
}

/// Assembles the full diagnostic record for a weight.
inline WeightDiagnostics diagnostics(const RadialWeight& weight, int N, double p) {
    WeightDiagnostics d;
    const double omega = sphere_area(N);
    d.lorentz_quasinorm = lorentz_quasinorm(weight, N, p);
    d.moment_Ig = weighted_moment(weight, N);
    d.cg_constant = std::isfinite(d.moment_Ig) ? std::pow(omega * d.moment_Ig, -1.0 / p) : 0.0;

    // ||g||_{N/p}: finite iff the tail exponent exceeds p
    const double q = static_cast<double>(N) / p;
    const double l = weight.tail_exponent();
    if (l * q > static_cast<double>(N)) {
        auto f = [&](double x) {
            const double r = std::exp(x);
            return std::pow(r, N) * std::pow(weight(r), q);
        };
        const double body = detail::adaptive_simpson(f, 0.0, std::log(1e6), 1e-14);
        const double tail = std::pow(weight(1e6), q) * std::pow(1e6, N) / (l * q - static_cast<double>(N));
        d.lebesgue_norm = std::pow(omega * (body + tail), 1.0 / q);
    } else {
        d.lebesgue_norm = std::numeric_limits<double>::infinity();
    }

    // class-A proxy: finite quasinorm and t^{p/N} g*(t) vanishing at both grid
    // ends. A small end value qualifies outright; otherwise the compensated
    // rearrangement must be strictly falling into the end (a plateau, as at
    // l = p, means the closure condition fails).
    if (std::isfinite(d.lorentz_quasinorm) && d.lorentz_quasinorm > 0.0) {
        const double e = p / static_cast<double>(N);
        auto value = [&](double t) { return std::pow(t, e) * rearrangement(weight, N, t); };
        const double lo = value(1e-6), lo_in = value(1e-5);
        const double hi = value(1e12), hi_in = value(1e11);
        const bool lo_ok = lo < 0.05 * d.lorentz_quasinorm || lo < 0.5 * lo_in;
        const bool hi_ok = hi < 0.05 * d.lorentz_quasinorm || hi < 0.995 * hi_in;
        d.admissible_classA = lo_ok && hi_ok;
    }
    d.admissible_thm14a = l > static_cast<double>(N) && std::isfinite(d.moment_Ig);
    return d;
}

}  // namespace exrobin
