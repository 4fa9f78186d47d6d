#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace exrobin {

/// Sign with sgn(0) = 0.
inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

/// |x|^e preserving the sign of x (odd extension of the power map).
inline double signed_pow(double x, double e) {
    return x == 0.0 ? 0.0 : sgn(x) * std::pow(std::abs(x), e);
}

namespace detail {

/// Bisection on [lo, hi] with f(lo), f(hi) of opposite (or zero) sign.
/// Runs until the bracket width falls below abs_tol or 200 iterations.
template <typename F>
double bisect(F&& f, double lo, double hi, double abs_tol) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    double fhi = f(hi);
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) throw std::invalid_argument("bisect: endpoints do not bracket a root");
    for (int i = 0; i < 200 && (hi - lo) > abs_tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

/// Adaptive Simpson quadrature with absolute/relative mixed control.
template <typename F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 50) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// 7-point Gauss-Legendre rule on [-1, 1]; exact through degree 13.
inline constexpr std::array<double, 7> kGaussNodes = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
inline constexpr std::array<double, 7> kGaussWeights = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694,
    0.3818300505051189, 0.2797053914892767, 0.1294849661688697};

/// Integrates f over [a, b] with a single 7-point Gauss-Legendre panel.
template <typename F>
double gauss7(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i) acc += kGaussWeights[i] * f(c + h * kGaussNodes[i]);
    return acc * h;
}

/// Least-squares line fit y = slope*x + intercept.
inline std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    const double slope = (n * sxy - sx * sy) / denom;
    return {slope, (sy - slope * sx) / n};
}

}  // namespace detail

/// Piecewise cubic Hermite interpolant on a strictly increasing grid with
/// caller-supplied nodal derivatives.
class HermiteSpline {
public:
    HermiteSpline() = default;
    HermiteSpline(std::vector<double> x, std::vector<double> y, std::vector<double> dy)
        : x_(std::move(x)), y_(std::move(y)), dy_(std::move(dy)) {
        if (x_.size() < 2 || x_.size() != y_.size() || x_.size() != dy_.size())
            throw std::invalid_argument("HermiteSpline: inconsistent grids");
        for (std::size_t i = 1; i < x_.size(); ++i)
            if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("HermiteSpline: abscissae not increasing");
    }

    double front() const { return x_.front(); }
    double back() const { return x_.back(); }

    double operator()(double t) const {
        const auto [i, s, h] = locate(t);
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y_[i] + (s3 - 2 * s2 + s) * h * dy_[i] +
               (-2 * s3 + 3 * s2) * y_[i + 1] + (s3 - s2) * h * dy_[i + 1];
    }

    double derivative(double t) const {
        const auto [i, s, h] = locate(t);
        const double s2 = s * s;
        return ((6 * s2 - 6 * s) * y_[i] + (3 * s2 - 4 * s + 1) * h * dy_[i] +
                (-6 * s2 + 6 * s) * y_[i + 1] + (3 * s2 - 2 * s) * h * dy_[i + 1]) / h;
    }

private:
    std::tuple<std::size_t, double, double> locate(double t) const {
        if (t < x_.front() || t > x_.back())
            throw std::out_of_range("HermiteSpline: query outside grid");
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        std::size_t i = static_cast<std::size_t>(std::distance(x_.begin(), it));
        i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
        const double h = x_[i + 1] - x_[i];
        return {i, (t - x_[i]) / h, h};
    }

    std::vector<double> x_, y_, dy_;
};

}  // namespace exrobin
