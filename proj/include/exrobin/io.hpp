#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "exrobin/eigensolver.hpp"
#include "exrobin/sweep.hpp"
#include "exrobin/verifier.hpp"

namespace exrobin {

/// Writes content via a temp file in the same directory plus rename, so a
/// reader never observes a partial file.
inline void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
    const fs::path tmp = dir / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw std::runtime_error("rename to '" + path + "' failed: " + ec.message());
}

inline nlohmann::json weight_to_json(const RadialWeight& w) {
    nlohmann::json j;
    if (w.kind() == WeightKind::PowerLaw) {
        j["kind"] = "powerlaw";
        j["c0"] = w.amplitude();
        j["l"] = w.tail_exponent();
    } else {
        j["kind"] = "table";
        j["tail_exponent"] = w.tail_exponent();
    }
    return j;
}

inline nlohmann::json report_to_json(const VerificationReport& report) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : report.checks) {
        nlohmann::json j;
        j["name"] = c.name;
        j["pass"] = c.pass;
        j["margin"] = c.margin;
        j["constants"] = c.constants;
        if (!c.note.empty()) j["note"] = c.note;
        arr.push_back(std::move(j));
    }
    return arr;
}

inline nlohmann::json solution_to_json(const EigenSolution& sol, const ProblemSpec& spec,
                                       const VerificationReport* checks = nullptr) {
    nlohmann::json j;
    j["lambda1"] = sol.lambda1;
    j["bracket"] = {sol.bracket.first, sol.bracket.second};
    j["phi1"] = sol.phi_at_1;
    j["rstar"] = sol.r_star;
    j["R_max"] = sol.r_max_used;
    j["boundary_kind"] = to_string(sol.boundary_kind);
    j["problem"] = {{"n", spec.dimension},
                    {"p", spec.exponent},
                    {"beta", sol.beta},
                    {"weight", weight_to_json(spec.weight)}};
    nlohmann::json nodes = nlohmann::json::array();
    const auto& t = sol.trajectory;
    for (std::size_t i = 0; i < t.size(); ++i)
        nodes.push_back({{"r", t.r[i]}, {"phi", t.phi[i]}, {"dphi", t.dphi[i]}, {"F", t.flux[i]}});
    j["nodes"] = std::move(nodes);
    if (checks) j["checks"] = report_to_json(*checks);
    return j;
}

/// Plot-ready columns for a solution: r, phi, phi', and the two envelope
/// shapes evaluated with the given parameters. Header on line 1, '#'-prefixed.
inline std::string solution_plot_data(const EigenSolution& sol, const ProblemSpec& spec,
                                      const EnvelopeParams& params) {
    const int N = spec.dimension;
    const double p = spec.exponent;
    const double s = robin_slope(sol.beta, p);
    const double ge = (N - 1.0) / (p - 1.0);
    std::string out = "# r phi dphi g_lower g_upper\n";
    char buf[256];
    const auto& t = sol.trajectory;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = t.r[i];
        const double tau = transition_tau(r - 1.0, params);
        const double blend = tau * s + (1.0 - tau) * std::pow(r, -ge);
        const double gl = modulation_sigma(r, params.critical_radius, params.delta, p) * blend;
        const double gu = tau * s + (1.0 - tau) * std::pow(r, -ge) * log_factor_h(r, N, p);
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g\n", r, t.phi[i], t.dphi[i],
                      gl, gu);
        out += buf;
    }
    return out;
}

/// Plot-ready columns for a sweep curve: beta, lambda1, and the endpoint
/// eigenvalues as horizontal bounds.
inline std::string curve_plot_data(const SweepCurve& curve) {
    std::string out = "# beta lambda1 neumann_lambda dirichlet_lambda\n";
    char buf[256];
    for (std::size_t i = 0; i < curve.betas.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", curve.betas[i],
                      curve.lambdas[i], curve.neumann_lambda, curve.dirichlet_lambda);
        out += buf;
    }
    return out;
}

}  // namespace exrobin
