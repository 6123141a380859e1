// optics.hpp
// Beam splitters with fixed sign conventions and photon-number-resolving
// heralded detection.

#pragma once

#include <cmath>
#include <algorithm>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nla/fock.hpp"

namespace nla {

/// Variable beam splitter with transmittance t:
///   in_1 -> sqrt(t) out_1 + sqrt(1-t) out_2
///   in_2 -> sqrt(1-t) out_1 - sqrt(t) out_2
/// Output 1 is the transmitted arm. At t = 1/2 this is bs_matrix().
inline Matrix2 vbs_matrix(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("transmittance must lie in [0, 1]");
    const double st = std::sqrt(t);
    const double sr = std::sqrt(1.0 - t);
    return {{{Complex{st, 0.0}, Complex{sr, 0.0}}, {Complex{sr, 0.0}, Complex{-st, 0.0}}}};
}

/// Balanced beam splitter: in_1 -> (c1 + c2)/sqrt2, in_2 -> (c1 - c2)/sqrt2.
inline Matrix2 bs_matrix() {
    const double h = 1.0 / std::sqrt(2.0);
    return {{{Complex{h, 0.0}, Complex{h, 0.0}}, {Complex{h, 0.0}, Complex{-h, 0.0}}}};
}

struct BeamSplitterElement {
    std::pair<ModeLabel, ModeLabel> in_modes;
    std::pair<ModeLabel, ModeLabel> out_modes;
    double transmittance = 0.5;

    Matrix2 matrix() const { return vbs_matrix(transmittance); }

    /// Mixes the input modes and relabels them as the output modes.
    PureState apply(const PureState& s) const {
        auto mixed = apply_two_mode_unitary(s, in_modes.first, in_modes.second, matrix());
        return mixed.renamed({{in_modes.first, out_modes.first}, {in_modes.second, out_modes.second}});
    }
};

/// Accepts a detection event based on the total photon count registered on
/// `detector_modes`. Detectors are photon-number resolving.
struct DetectionRule {
    std::vector<ModeLabel> detector_modes;
    std::function<bool(int)> accept;
    std::string description;

    bool accepts(const FockBasisState& pattern) const {
        int total = 0;
        for (const auto& m : detector_modes) {
            auto it = pattern.find(m);
            if (it != pattern.end()) total += it->second;
        }
        return accept(total);
    }

    static DetectionRule exactly(int n, std::vector<ModeLabel> modes) {
        return {std::move(modes), [n](int c) { return c == n; }, "exactly " + std::to_string(n)};
    }
    static DetectionRule not_exactly(int n, std::vector<ModeLabel> modes) {
        return {std::move(modes), [n](int c) { return c != n; }, "not " + std::to_string(n)};
    }
    static DetectionRule at_least(int n, std::vector<ModeLabel> modes) {
        return {std::move(modes), [n](int c) { return c >= n; }, "at least " + std::to_string(n)};
    }
};

/// Feed-forward applied to the heralded state: when `trigger_mode` registered
/// an odd photon count, a phase shift of `phase` is applied to `target_mode`.
struct PhaseCorrection {
    ModeLabel trigger_mode;
    ModeLabel target_mode;
    double phase = std::numbers::pi;
};

struct HeraldResult {
    double success_probability = 0.0;
    Ensemble out;
};

namespace detail {

inline std::vector<ModeLabel> union_of_detectors(std::span<const DetectionRule> rules) {
    std::vector<ModeLabel> modes;
    for (const auto& r : rules)
        for (const auto& m : r.detector_modes)
            if (std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
    return modes;
}

inline bool accepted(std::span<const DetectionRule> rules, const FockBasisState& pattern) {
    for (const auto& r : rules)
        if (!r.accepts(pattern)) return false;
    return true;
}

// Unnormalized kept mixture plus its total weight.
inline std::pair<double, Ensemble> select(const Ensemble& e, std::span<const DetectionRule> rules,
                                          std::span<const PhaseCorrection> feed_forward) {
    const auto modes = union_of_detectors(rules);
    double kept = 0.0;
    Ensemble out;
    for (const auto& c : e.components) {
        if (c.probability <= 0.0) continue;
        for (auto& outcome : measure_modes(c.state, modes)) {
            if (!accepted(rules, outcome.pattern)) continue;
            PureState residual = std::move(outcome.residual);
            for (const auto& ff : feed_forward) {
                auto it = outcome.pattern.find(ff.trigger_mode);
                if (it != outcome.pattern.end() && it->second % 2 == 1)
                    residual = apply_phase(residual, ff.target_mode, ff.phase);
            }
            // The residual is sub-normalized and carries the outcome probability.
            kept += c.probability * outcome.probability;
            out.components.push_back({c.probability, std::move(residual)});
        }
    }
    return {kept, std::move(out)};
}

}  // namespace detail

/// Probability that every rule accepts; never throws on zero.
inline double acceptance_probability(const Ensemble& e, std::span<const DetectionRule> rules) {
    return detail::select(e, rules, {}).first / e.total_weight();
}

inline double acceptance_probability(const Ensemble& e, const DetectionRule& rule) {
    return acceptance_probability(e, std::span<const DetectionRule>(&rule, 1));
}

/// Post-selects the mixture on a joint detection event (all rules must
/// accept). The detector modes are consumed; the output is the renormalized
/// conditional mixture on the surviving modes.
inline HeraldResult herald(const Ensemble& e, std::span<const DetectionRule> rules,
                           std::span<const PhaseCorrection> feed_forward = {}) {
    const double total = e.total_weight();
    if (total <= 0.0) throw InvalidArgument("herald: empty mixture");
    auto [kept, out] = detail::select(e, rules, feed_forward);
    const double p = kept / total;
    if (p < 1e-15) throw HeraldNeverSucceeds("heralding never succeeds for this input");
    return {p, out.normalized()};
}

inline HeraldResult herald(const Ensemble& e, const DetectionRule& rule) {
    return herald(e, std::span<const DetectionRule>(&rule, 1));
}

}  // namespace nla
