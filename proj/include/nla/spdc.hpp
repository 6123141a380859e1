// spdc.hpp
// Perturbative double-pass SPDC source and the two-level single-rail
// amplification experiment driven by its four-photon term.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nla/analytic.hpp"
#include "nla/circuit.hpp"
#include "nla/fock.hpp"
#include "nla/optics.hpp"

namespace nla {

/// Unnormalized expansion of the two-pass pair source in the pump amplitude
/// p, over modes (a1, b1, a2, b2):
///   |0> + p (a1+ b1+ + a2+ b2+)|0> + p^2 (a1+ b1+ a2+ b2+ + (a1+ b1+)^2 + (a2+ b2+)^2)|0>
/// truncated at `order`.
struct SpdcExpansion {
    double pump_amplitude = 0.0;
    int order = 0;
    PureState terms;
};

inline const std::vector<ModeLabel>& spdc_modes() {
    static const std::vector<ModeLabel> modes{"a1", "b1", "a2", "b2"};
    return modes;
}

inline SpdcExpansion spdc_expansion(double p, int order) {
    if (!(p >= 0.0)) throw InvalidArgument("pump amplitude must be non-negative");
    if (order < 0 || order > 2) throw InvalidArgument("SPDC expansion supports orders 0, 1 and 2 only");
    PureState s(spdc_modes(), kDefaultCutoff);
    s.add({0, 0, 0, 0}, Complex{1.0, 0.0});
    if (order >= 1) {
        s.add({1, 1, 0, 0}, Complex{p, 0.0});
        s.add({0, 0, 1, 1}, Complex{p, 0.0});
    }
    if (order >= 2) {
        const double p2 = p * p;
        s.add({1, 1, 1, 1}, Complex{p2, 0.0});
        // (a+)^2 (b+)^2 |0> = sqrt2 * sqrt2 |2,2>
        s.add({2, 2, 0, 0}, Complex{2.0 * p2, 0.0});
        s.add({0, 0, 2, 2}, Complex{2.0 * p2, 0.0});
    }
    return {p, order, std::move(s)};
}

struct CoincidenceSelection {
    PureState state;          // normalized |1,1,1,1>
    double selection_weight;  // squared amplitude before normalization
};

/// Keeps the one-photon-in-every-mode term, as a four-fold coincidence would.
inline CoincidenceSelection coincidence_select(const SpdcExpansion& e) {
    if (e.order < 2) throw InvalidArgument("coincidence selection needs the second-order term");
    const Complex amp = e.terms.amplitude({{"a1", 1}, {"b1", 1}, {"a2", 1}, {"b2", 1}});
    const double w = std::norm(amp);
    if (w <= 0.0) throw InvalidArgument("expansion has no four-photon coincidence component");
    PureState s(spdc_modes(), e.terms.cutoff());
    s.add({1, 1, 1, 1}, amp);
    return {s.normalized(), w};
}

/// VBS settings of the two-level experiment: t1 prepares the lossy input,
/// t2 and t3 are the ancilla splitters of the two amplifier stages.
struct Fig8Config {
    double t1 = 0.5;
    double t2 = 0.2;
    double t3 = 0.2;

    /// With `require_amplifying`, t2 and t3 must be below 1/2.
    void validate(bool require_amplifying = true) const {
        if (!(t1 > 0.0 && t1 < 1.0)) throw InvalidArgument("t1 must lie in (0, 1)");
        for (double t : {t2, t3})
            if (!(t > 0.0 && t < 1.0)) throw InvalidArgument("t2 and t3 must lie in (0, 1)");
        if (require_amplifying && (t2 >= 0.5 || t3 >= 0.5))
            throw InvalidArgument("amplification requires transmittance t2 < 1/2 and t3 < 1/2");
    }
};

struct Fig8Result {
    double prepared_eta = 0.0;
    double final_eta = 0.0;
    double success_prob = 0.0;
    std::vector<double> per_stage_probs;  // target herald, stage 1, stage 2
};

/// Photon a1 is attenuated by VBS1 into a3 (a4 is lost), b1 heralds it.
inline CircuitSpec build_fig8_preparation(double t1) {
    CircuitSpec spec{spdc_modes(), {"a3", "a2", "b2"}, {}};
    spec.elements.emplace_back(Detect{{DetectionRule::exactly(1, {"b1"})}, {}});
    spec.elements.emplace_back(InjectVacuum{"v1"});
    spec.elements.emplace_back(ApplyBeamSplitter{{{"a1", "v1"}, {"a3", "a4"}, t1}});
    spec.elements.emplace_back(Discard{{"a4"}});
    spec.validate();
    return spec;
}

/// Stage 1: b2 through VBS2 into (b4 -> BS1, b3 kept), BS1 mixes a3 and b4
/// onto d1, d2. Stage 2: a2 through VBS3 into (a6 -> BS2, a5 kept), BS2
/// mixes b3 and a6 onto d3, d4. The amplified photon leaves in a5.
inline CircuitSpec build_fig8_amplifier(double t2, double t3) {
    CircuitSpec spec{{"a3", "a2", "b2"}, {"a5"}, {}};
    auto& el = spec.elements;
    el.emplace_back(InjectVacuum{"v2"});
    el.emplace_back(ApplyBeamSplitter{{{"b2", "v2"}, {"b4", "b3"}, t2}});
    el.emplace_back(ApplyBeamSplitter{{{"a3", "b4"}, {"d1", "d2"}, 0.5}});
    el.emplace_back(Detect{{DetectionRule::exactly(1, {"d1", "d2"})}, {{"d2", "b3"}}});
    el.emplace_back(InjectVacuum{"v3"});
    el.emplace_back(ApplyBeamSplitter{{{"a2", "v3"}, {"a6", "a5"}, t3}});
    el.emplace_back(ApplyBeamSplitter{{{"b3", "a6"}, {"d3", "d4"}, 0.5}});
    el.emplace_back(Detect{{DetectionRule::exactly(1, {"d3", "d4"})}, {{"d4", "a5"}}});
    spec.validate();
    return spec;
}

inline Fig8Result simulate_fig8(const Fig8Config& cfg, bool require_amplifying = true) {
    cfg.validate(require_amplifying);
    // Any p > 0 gives the same post-selected state.
    const auto source = coincidence_select(spdc_expansion(1.0, 2));
    const Ensemble input{{{1.0, source.state}}};

    const auto prep = run_circuit(build_fig8_preparation(cfg.t1), input);
    Fig8Result r;
    r.prepared_eta = single_rail_fidelity(prep.output, "a3");

    const auto amp = run_circuit(build_fig8_amplifier(cfg.t2, cfg.t3), prep.output);
    r.final_eta = single_rail_fidelity(amp.output, "a5");
    r.per_stage_probs = prep.per_stage_probs;
    r.per_stage_probs.insert(r.per_stage_probs.end(), amp.per_stage_probs.begin(), amp.per_stage_probs.end());
    r.success_prob = prep.success_probability * amp.success_probability;
    return r;
}

}  // namespace nla
