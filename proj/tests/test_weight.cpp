#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "exrobin/weight.hpp"

using namespace exrobin;
using Catch::Approx;

namespace {

// Test-side oracle: rearrangement by direct numerical inversion of the
// distribution function alpha(s) = |{g > s}|, independent of the library's
// closed form.
double rearrangement_by_inversion(const RadialWeight& w, int N, double t) {
    const double omega = sphere_area(N);
    auto volume = [&](double s) {
        // level radius by bisection on g
        if (s >= w(1.0)) return 0.0;
        double lo = 1.0, hi = 10.0;
        while (w(hi) > s) hi *= 2.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = std::sqrt(lo * hi);
            (w(mid) > s ? lo : hi) = mid;
        }
        const double rs = std::sqrt(lo * hi);
        return omega / N * (std::pow(rs, N) - 1.0);
    };
    double shi = w(1.0), slo = shi;
    while (volume(slo) < t) slo *= 0.5;
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(slo * shi);
        (volume(mid) < t ? shi : slo) = mid;
    }
    return std::sqrt(slo * shi);
}

// Test-side oracle: dense grid search for the Lorentz quasinorm.
double quasinorm_by_grid(const RadialWeight& w, int N, double p) {
    double best = 0.0;
    for (double x = -6.0; x <= 12.0; x += 1.0 / 200.0) {
        const double t = std::pow(10.0, x);
        best = std::max(best, std::pow(t, p / N) * rearrangement(w, N, t));
    }
    return best;
}

std::filesystem::path write_temp_csv(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("power-law rearrangement", "[weight]") {
    const auto w = RadialWeight::power_law(1.0, 4.0);
    // essential sup: g*(t) -> g(1) as t -> 0+
    CHECK(rearrangement(w, 3, 1e-12) == Approx(1.0).epsilon(1e-6));
    // level set {g > s} = {1 < r < 2} has volume 4pi/3 (2^3 - 1)
    const double t = 4.0 * std::numbers::pi / 3.0 * 7.0;
    CHECK(rearrangement(w, 3, t) == Approx(0.0625).epsilon(1e-12));
    CHECK(rearrangement(w, 3, 1e30) == Approx(0.0).margin(1e-12));

    // closed form against numerical inversion of the distribution function
    for (double tt : {0.1, 1.0, 10.0, 1e3, 1e6}) {
        CHECK(rearrangement(w, 3, tt) ==
              Approx(rearrangement_by_inversion(w, 3, tt)).epsilon(1e-9));
    }
}

TEST_CASE("rearrangement is non-increasing and equimeasurable", "[weight]") {
    const auto w = RadialWeight::power_law(2.0, 5.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double x = -6.0; x <= 10.0; x += 0.25) {
        const double v = rearrangement(w, 3, std::pow(10.0, x));
        CHECK(v <= prev);
        prev = v;
    }
    // |{g > s}| computed geometrically equals |{g* > s}| from inverting g*
    const double omega = sphere_area(3);
    for (double s : {1e-6, 1e-3, 0.05, 0.5, 1.5, 1.99}) {
        const double rs = std::pow(2.0 / s, 1.0 / 5.0);
        const double vol_geometric = omega / 3.0 * (std::pow(rs, 3) - 1.0);
        // invert g* by bisection on t
        double lo = 1e-18, hi = 1e18;
        for (int i = 0; i < 200; ++i) {
            const double mid = std::sqrt(lo * hi);
            (rearrangement(w, 3, mid) > s ? lo : hi) = mid;
        }
        const double vol_rearranged = std::sqrt(lo * hi);
        CHECK(vol_rearranged == Approx(vol_geometric).epsilon(1e-8));
    }
}

TEST_CASE("lorentz quasinorm", "[weight]") {
    const auto w4 = RadialWeight::power_law(1.0, 4.0);
    const double qn4 = lorentz_quasinorm(w4, 3, 2.0);
    CHECK(std::isfinite(qn4));
    CHECK(qn4 > 0.0);
    CHECK(qn4 == Approx(quasinorm_by_grid(w4, 3, 2.0)).epsilon(1e-4));
    // analytic maximizer: t = omega p / (N (l - p)), value at (N t / omega + 1) = l/(l-p)
    const double tm = sphere_area(3) * 2.0 / (3.0 * 2.0);
    const double analytic = std::pow(tm, 2.0 / 3.0) * std::pow(2.0, -4.0 / 3.0);
    CHECK(qn4 == Approx(analytic).epsilon(1e-10));

    // faster decay moves the maximizer inward
    const auto w6 = RadialWeight::power_law(1.0, 6.0);
    const double qn6 = lorentz_quasinorm(w6, 3, 2.0);
    CHECK(std::isfinite(qn6));
    CHECK(qn6 == Approx(quasinorm_by_grid(w6, 3, 2.0)).epsilon(1e-4));

    // scaling: |c g| = c |g|
    for (double c : {0.5, 3.0, 100.0}) {
        CHECK(lorentz_quasinorm(RadialWeight::power_law(c, 4.0), 3, 2.0) ==
              Approx(c * qn4).epsilon(1e-9));
    }
}

TEST_CASE("weighted moment", "[weight]") {
    CHECK(weighted_moment(RadialWeight::power_law(1.0, 4.0), 3) == Approx(1.0).epsilon(1e-10));
    CHECK(weighted_moment(RadialWeight::power_law(2.0, 5.0), 3) == Approx(1.0).epsilon(1e-10));
    CHECK(std::isinf(weighted_moment(RadialWeight::power_law(1.0, 3.0), 3)));
    // generic analytic value C0/(l-N)
    CHECK(weighted_moment(RadialWeight::power_law(0.7, 6.5), 4) ==
          Approx(0.7 / 2.5).epsilon(1e-10));
}

TEST_CASE("diagnostics assembly", "[weight]") {
    const auto d = diagnostics(RadialWeight::power_law(1.0, 4.0), 3, 2.0);
    CHECK(d.cg_constant == Approx(std::pow(4.0 * std::numbers::pi, -0.5)).epsilon(1e-10));
    CHECK(d.admissible_classA);
    CHECK(d.admissible_thm14a);
    CHECK(std::isfinite(d.lebesgue_norm));

    // p < l <= N: admissible for the variational theory, moment diverges
    const auto d25 = diagnostics(RadialWeight::power_law(1.0, 2.5), 3, 2.0);
    CHECK(d25.admissible_classA);
    CHECK_FALSE(d25.admissible_thm14a);
    CHECK(std::isinf(d25.moment_Ig));

    // l < p: not admissible
    const auto d1 = diagnostics(RadialWeight::power_law(1.0, 1.0), 3, 2.0);
    CHECK_FALSE(d1.admissible_classA);

    // l = p: the compensated rearrangement plateaus, closure condition fails
    const auto dp = diagnostics(RadialWeight::power_law(1.0, 2.0), 3, 2.0);
    CHECK_FALSE(dp.admissible_classA);
}

TEST_CASE("tabulated weights from csv", "[weight]") {
    // samples of 2 r^{-4.5} on a geometric grid
    std::string csv = "r,g\n";
    char buf[64];
    for (int i = 0; i <= 120; ++i) {
        const double r = std::pow(10.0, 3.0 * i / 120.0);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r, 2.0 * std::pow(r, -4.5));
        csv += buf;
    }
    const auto path = write_temp_csv("exrobin_weight_ok.csv", csv);
    const auto w = RadialWeight::from_csv(path.string());
    CHECK(w.kind() == WeightKind::Tabulated);
    CHECK(w(1.0) == Approx(2.0).epsilon(1e-12));
    CHECK(w(31.7) == Approx(2.0 * std::pow(31.7, -4.5)).epsilon(1e-6));
    CHECK(w.tail_exponent() == Approx(4.5).epsilon(1e-6));
    // extrapolation beyond the table follows the fitted tail
    CHECK(w(1e5) == Approx(2.0 * std::pow(1e5, -4.5)).epsilon(1e-4));
    CHECK(weighted_moment(w, 3) == Approx(2.0 / 1.5).epsilon(1e-4));
    CHECK(rearrangement(w, 3, 1.0) ==
          Approx(rearrangement_by_inversion(w, 3, 1.0)).epsilon(1e-8));
    std::filesystem::remove(path);
}

TEST_CASE("csv rejects malformed tables", "[weight]") {
    const auto bad_order =
        write_temp_csv("exrobin_weight_bad1.csv", "r,g\n1.0,1.0\n3.0,0.5\n2.0,0.7\n5.0,0.1\n");
    CHECK_THROWS_WITH(RadialWeight::from_csv(bad_order.string()),
                      Catch::Matchers::ContainsSubstring("line 4"));
    std::filesystem::remove(bad_order);

    const auto bad_header = write_temp_csv("exrobin_weight_bad2.csv", "radius,weight\n1.0,1.0\n");
    CHECK_THROWS_WITH(RadialWeight::from_csv(bad_header.string()),
                      Catch::Matchers::ContainsSubstring("header"));
    std::filesystem::remove(bad_header);

    CHECK_THROWS_AS(RadialWeight::tabulated({1.0, 2.0, 3.0, 4.0}, {1.0, -0.5, 0.1, 0.01}),
                    std::invalid_argument);
    CHECK_THROWS_AS(RadialWeight::tabulated({1.5, 2.0, 3.0, 4.0}, {1.0, 0.5, 0.1, 0.01}),
                    std::invalid_argument);
}

TEST_CASE("rearrangement rejects non-monotone tables", "[weight]") {
    const auto w = RadialWeight::tabulated({1.0, 2.0, 3.0, 4.0, 5.0}, {1.0, 0.5, 0.8, 0.2, 0.1});
    CHECK_THROWS_AS(rearrangement(w, 3, 1.0), std::invalid_argument);
}
