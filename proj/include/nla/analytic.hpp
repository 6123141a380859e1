// analytic.hpp
// Closed-form recurrences for cascaded noiseless linear amplification of a
// single-photon/vacuum mixture (single rail) and of the two-party
// single-photon entangled state.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nla/errors.hpp"

namespace nla {

enum class Flavor { kSps, kSpe };

inline std::string_view to_string(Flavor f) { return f == Flavor::kSps ? "sps" : "spe"; }

inline Flavor parse_flavor(std::string_view s) {
    if (s == "sps" || s == "SPS") return Flavor::kSps;
    if (s == "spe" || s == "SPE") return Flavor::kSpe;
    throw InvalidArgument("unknown flavor '" + std::string(s) + "' (expected sps or spe)");
}

struct StepResult {
    double eta_out = 0.0;
    double probability = 0.0;
};

struct NlaStageResult {
    int index = 0;  // 1-based
    double eta = 0.0;
    double gain = 0.0;
    double stage_probability = 0.0;
    double cumulative_probability = 0.0;
};

struct CascadeTrace {
    double initial_eta = 0.0;
    std::vector<double> transmittances;
    std::vector<NlaStageResult> stages;
    Flavor flavor = Flavor::kSps;

    double final_eta() const { return stages.empty() ? initial_eta : stages.back().eta; }
    double cumulative_probability() const {
        return stages.empty() ? 1.0 : stages.back().cumulative_probability;
    }
};

namespace detail {

inline void check_unit_interval(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
}

// Single-side acceptance weight (1-t) eta + (1-eta) t. In this form t = 1/2
// yields exactly 1/2 and eta in {0, 1} are exact fixed points.
inline double single_side_weight(double eta, double t) { return (1.0 - t) * eta + (1.0 - eta) * t; }

inline double amplified_eta(double eta, double t) {
    const double den = single_side_weight(eta, t);
    if (den <= 0.0) throw DegenerateInput("degenerate input: heralding impossible (eta=" +
                                          std::to_string(eta) + ", t=" + std::to_string(t) + ")");
    return (1.0 - t) * eta / den;
}

}  // namespace detail

/// One single-rail unit: returns the heralded photon weight and the
/// heralding probability t + eta - 2 t eta.
inline StepResult nla_step_sps(double eta, double t) {
    detail::check_unit_interval(eta, "eta");
    detail::check_unit_interval(t, "transmittance");
    return {detail::amplified_eta(eta, t), detail::single_side_weight(eta, t)};
}

/// One two-sided unit on the entangled mixture. The fidelity map is the same
/// as for a single rail; both sides must herald, giving (1 - 2 eta) t^2 + eta t.
inline StepResult nla_step_spe(double eta, double t) {
    detail::check_unit_interval(eta, "eta");
    detail::check_unit_interval(t, "transmittance");
    // (1 - 2 eta) t^2 + eta t, grouped to give exactly 1/4 at t = 1/2
    const double p = eta * t * (1.0 - t) + (1.0 - eta) * t * t;
    if (p <= 0.0) throw DegenerateInput("degenerate input: joint heralding impossible (eta=" +
                                        std::to_string(eta) + ", t=" + std::to_string(t) + ")");
    return {detail::amplified_eta(eta, t), p};
}

inline StepResult nla_step(Flavor f, double eta, double t) {
    return f == Flavor::kSps ? nla_step_sps(eta, t) : nla_step_spe(eta, t);
}

/// Per-stage amplification factor g = (1 - t) / (eta - 2 eta t + t).
inline double gain(double eta, double t) {
    detail::check_unit_interval(eta, "eta");
    detail::check_unit_interval(t, "transmittance");
    const double den = detail::single_side_weight(eta, t);
    if (den <= 0.0) throw DegenerateInput("degenerate input: gain undefined");
    return (1.0 - t) / den;
}

/// Iterates the unit over `ts`, one entry per stage. Stage gains use the
/// closed-form factor, independently of the eta ratio.
inline CascadeTrace cascade(Flavor flavor, double eta0, const std::vector<double>& ts) {
    detail::check_unit_interval(eta0, "initial eta");
    CascadeTrace trace{eta0, ts, {}, flavor};
    double eta = eta0;
    double cumulative = 1.0;
    int n = 0;
    for (double t : ts) {
        const auto step = nla_step(flavor, eta, t);
        cumulative *= step.probability;
        trace.stages.push_back({++n, step.eta_out, gain(eta, t), step.probability, cumulative});
        eta = step.eta_out;
    }
    return trace;
}

inline CascadeTrace cascade_sps(double eta0, const std::vector<double>& ts) {
    return cascade(Flavor::kSps, eta0, ts);
}

inline CascadeTrace cascade_spe(double eta0, const std::vector<double>& ts) {
    return cascade(Flavor::kSpe, eta0, ts);
}

/// G = eta_N / eta_0. Undefined for a vacuum input.
inline double total_gain(const CascadeTrace& trace) {
    if (trace.stages.empty()) return 1.0;
    if (trace.initial_eta <= 0.0) throw InvalidArgument("total gain undefined for initial eta = 0");
    return trace.final_eta() / trace.initial_eta;
}

/// Product of the per-stage gains; equals total_gain() whenever it is defined.
inline double gain_product(const CascadeTrace& trace) {
    double g = 1.0;
    for (const auto& s : trace.stages) g *= s.gain;
    return g;
}

}  // namespace nla
