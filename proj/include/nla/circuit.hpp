// circuit.hpp
// Element-level description of NLA units and cascades, and a brute-force
// Fock-space runner used as an oracle for the closed forms in analytic.hpp.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nla/analytic.hpp"
#include "nla/fock.hpp"
#include "nla/optics.hpp"

namespace nla {

/// A fresh photon sent through a VBS(t): sqrt(t)|1,0> + sqrt(1-t)|0,1> on
/// (transmitted, reflected).
struct InjectAncilla {
    ModeLabel transmitted;
    ModeLabel reflected;
    double transmittance = 0.5;
};

struct InjectVacuum {
    ModeLabel mode;
};

struct ApplyBeamSplitter {
    BeamSplitterElement element;
};

/// Joint post-selection: every rule must accept. Detector modes are consumed.
struct Detect {
    std::vector<DetectionRule> rules;
    std::vector<PhaseCorrection> feed_forward;
};

/// Unobserved loss: the modes are measured and every outcome is kept.
struct Discard {
    std::vector<ModeLabel> modes;
};

using CircuitElement = std::variant<InjectAncilla, InjectVacuum, ApplyBeamSplitter, Detect, Discard>;

struct CircuitSpec {
    std::vector<ModeLabel> inputs;
    std::vector<ModeLabel> outputs;
    std::vector<CircuitElement> elements;

    std::size_t detect_count() const {
        return static_cast<std::size_t>(std::count_if(elements.begin(), elements.end(), [](const auto& e) {
            return std::holds_alternative<Detect>(e);
        }));
    }

    /// Checks the mode bookkeeping: every label is created once, referenced
    /// only while live, and the outputs are exactly the live modes at the end.
    void validate() const {
        std::set<ModeLabel> live(inputs.begin(), inputs.end());
        std::set<ModeLabel> seen = live;
        if (live.size() != inputs.size()) throw ModeError("duplicate input mode");

        auto create = [&](const ModeLabel& m) {
            if (!seen.insert(m).second) throw ModeError("mode collision: '" + m + "' declared twice");
            live.insert(m);
        };
        auto consume = [&](const ModeLabel& m) {
            if (live.erase(m) == 0) throw ModeError("mode '" + m + "' is not live");
        };

        for (const auto& el : elements) {
            std::visit(
                [&](const auto& e) {
                    using T = std::decay_t<decltype(e)>;
                    if constexpr (std::is_same_v<T, InjectAncilla>) {
                        if (!(e.transmittance > 0.0 && e.transmittance < 1.0))
                            throw InvalidArgument("ancilla transmittance must lie in (0, 1)");
                        create(e.transmitted);
                        create(e.reflected);
                    } else if constexpr (std::is_same_v<T, InjectVacuum>) {
                        create(e.mode);
                    } else if constexpr (std::is_same_v<T, ApplyBeamSplitter>) {
                        const auto& bs = e.element;
                        consume(bs.in_modes.first);
                        consume(bs.in_modes.second);
                        // Outputs may reuse the input labels.
                        for (const auto& m : {bs.out_modes.first, bs.out_modes.second}) {
                            if (m == bs.in_modes.first || m == bs.in_modes.second) live.insert(m);
                            else create(m);
                        }
                    } else if constexpr (std::is_same_v<T, Detect>) {
                        std::set<ModeLabel> detected;
                        for (const auto& r : e.rules)
                            for (const auto& m : r.detector_modes) detected.insert(m);
                        for (const auto& m : detected) consume(m);
                        for (const auto& ff : e.feed_forward) {
                            if (!detected.contains(ff.trigger_mode))
                                throw ModeError("feed-forward trigger '" + ff.trigger_mode + "' is not detected");
                            if (!live.contains(ff.target_mode))
                                throw ModeError("feed-forward target '" + ff.target_mode + "' is not live");
                        }
                    } else {
                        for (const auto& m : e.modes) consume(m);
                    }
                },
                el);
        }
        const std::set<ModeLabel> out(outputs.begin(), outputs.end());
        if (out != live) throw ModeError("declared outputs do not match the live modes after the circuit");
    }

    /// Sequential composition: `next` consumes this circuit's outputs.
    CircuitSpec then(const CircuitSpec& next) const {
        if (next.inputs != outputs) throw ModeError("cannot chain circuits: output/input mismatch");
        CircuitSpec out{inputs, next.outputs, elements};
        out.elements.insert(out.elements.end(), next.elements.begin(), next.elements.end());
        out.validate();
        return out;
    }
};

/// One amplifier unit acting on `input_mode`. Mode names are suffixed by
/// `stage_tag`; the amplified output is "b2_<tag>".
inline CircuitSpec build_nla_unit(const ModeLabel& input_mode, double t, const std::string& stage_tag) {
    if (!(t > 0.0 && t < 1.0)) throw InvalidArgument("circuit transmittance must lie in (0, 1)");
    const ModeLabel b1 = "b1_" + stage_tag, b2 = "b2_" + stage_tag;
    const ModeLabel c1 = "c1_" + stage_tag, c2 = "c2_" + stage_tag;
    CircuitSpec spec{{input_mode}, {b2}, {}};
    spec.elements.emplace_back(InjectAncilla{b1, b2, t});
    spec.elements.emplace_back(ApplyBeamSplitter{{{input_mode, b1}, {c1, c2}, 0.5}});
    // A click on c2 flips the relative sign between the photon and vacuum
    // branches; the correction restores it.
    spec.elements.emplace_back(Detect{{DetectionRule::exactly(1, {c1, c2})}, {{c2, b2}}});
    spec.validate();
    return spec;
}

/// N units in series on a single rail; unit n is tagged "<prefix><n>".
inline CircuitSpec build_sps_cascade(const ModeLabel& input_mode, const std::vector<double>& ts,
                                     const std::string& prefix = "s") {
    CircuitSpec spec{{input_mode}, {input_mode}, {}};
    for (std::size_t n = 0; n < ts.size(); ++n) {
        const ModeLabel current = spec.outputs.front();
        spec = spec.then(build_nla_unit(current, ts[n], prefix + std::to_string(n + 1)));
    }
    return spec;
}

/// One stage on both parties, accepted only when both sides herald.
inline CircuitSpec build_spe_stage(const ModeLabel& mode_a, const ModeLabel& mode_b, double t,
                                   const std::string& stage_tag) {
    auto side_a = build_nla_unit(mode_a, t, "A" + stage_tag);
    auto side_b = build_nla_unit(mode_b, t, "B" + stage_tag);
    CircuitSpec spec{{mode_a, mode_b}, {side_a.outputs.front(), side_b.outputs.front()}, {}};
    Detect joint;
    for (const auto* side : {&side_a, &side_b}) {
        for (const auto& el : side->elements) {
            if (const auto* d = std::get_if<Detect>(&el)) {
                joint.rules.insert(joint.rules.end(), d->rules.begin(), d->rules.end());
                joint.feed_forward.insert(joint.feed_forward.end(), d->feed_forward.begin(), d->feed_forward.end());
            } else {
                spec.elements.push_back(el);
            }
        }
    }
    spec.elements.emplace_back(std::move(joint));
    spec.validate();
    return spec;
}

inline CircuitSpec build_spe_cascade(const ModeLabel& mode_a, const ModeLabel& mode_b,
                                     const std::vector<double>& ts) {
    CircuitSpec spec{{mode_a, mode_b}, {mode_a, mode_b}, {}};
    for (std::size_t n = 0; n < ts.size(); ++n) {
        auto stage = build_spe_stage(spec.outputs[0], spec.outputs[1], ts[n], std::to_string(n + 1));
        spec = spec.then(stage);
    }
    return spec;
}

/// When the Detect elements are evaluated.
enum class HeraldTiming {
    /// Post-select at each Detect and renormalize before continuing.
    kStageWise,
    /// Run every other element first, then one joint post-selection over all
    /// Detect rules. Feed-forward corrections are not applied in this mode,
    /// so only phase-insensitive quantities are comparable.
    kEndOfLine,
};

struct RunOptions {
    int cutoff = kDefaultCutoff;
    HeraldTiming timing = HeraldTiming::kStageWise;
    /// Called after each stage-wise Detect with its 0-based index and the
    /// renormalized heralded mixture.
    std::function<void(std::size_t, const Ensemble&)> on_herald;
};

struct OracleResult {
    double success_probability = 1.0;
    Ensemble output;
    std::vector<double> per_stage_probs;
};

namespace detail {

inline Ensemble map_components(const Ensemble& e, const std::function<PureState(const PureState&)>& f) {
    Ensemble out;
    out.components.reserve(e.components.size());
    for (const auto& c : e.components) out.components.push_back({c.probability, f(c.state)});
    return out;
}

inline PureState ancilla_state(const InjectAncilla& a, int cutoff) {
    auto s = PureState::basis({{a.transmitted, 1}, {a.reflected, 0}}, cutoff);
    return apply_two_mode_unitary(s, a.transmitted, a.reflected, vbs_matrix(a.transmittance));
}

}  // namespace detail

/// Runs `spec` on `input` (whose register must equal spec.inputs).
inline OracleResult run_circuit(const CircuitSpec& spec, const Ensemble& input, const RunOptions& opts = {}) {
    spec.validate();
    input.validate();
    {
        auto reg = input.components.front().state.modes();
        auto want = spec.inputs;
        std::sort(reg.begin(), reg.end());
        std::sort(want.begin(), want.end());
        if (reg != want) throw ModeError("input register does not match the circuit inputs");
    }

    Ensemble state = detail::map_components(input, [&](const PureState& s) { return s.with_cutoff(opts.cutoff); });
    OracleResult result;
    Detect deferred;
    std::size_t stage = 0;

    for (const auto& el : spec.elements) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, InjectAncilla>) {
                    const auto anc = detail::ancilla_state(e, opts.cutoff);
                    state = detail::map_components(state, [&](const PureState& s) { return tensor(s, anc); });
                } else if constexpr (std::is_same_v<T, InjectVacuum>) {
                    const auto vac = PureState::vacuum({e.mode}, opts.cutoff);
                    state = detail::map_components(state, [&](const PureState& s) { return tensor(s, vac); });
                } else if constexpr (std::is_same_v<T, ApplyBeamSplitter>) {
                    state = detail::map_components(state, [&](const PureState& s) { return e.element.apply(s); });
                } else if constexpr (std::is_same_v<T, Detect>) {
                    if (opts.timing == HeraldTiming::kEndOfLine) {
                        deferred.rules.insert(deferred.rules.end(), e.rules.begin(), e.rules.end());
                        return;
                    }
                    auto h = herald(state, e.rules, e.feed_forward);
                    result.per_stage_probs.push_back(h.success_probability);
                    result.success_probability *= h.success_probability;
                    state = std::move(h.out);
                    if (opts.on_herald) opts.on_herald(stage, state);
                    ++stage;
                } else {
                    Ensemble out;
                    for (const auto& c : state.components)
                        for (auto& o : measure_modes(c.state, e.modes))
                            out.components.push_back({c.probability, std::move(o.residual)});
                    state = std::move(out);
                }
            },
            el);
    }

    if (opts.timing == HeraldTiming::kEndOfLine && !deferred.rules.empty()) {
        auto h = herald(state, deferred.rules);
        result.per_stage_probs.push_back(h.success_probability);
        result.success_probability = h.success_probability;
        state = std::move(h.out);
    }
    result.output = std::move(state);
    return result;
}

/// eta |1><1| + (1 - eta) |0><0| on one mode.
inline Ensemble sps_mixture(double eta, const ModeLabel& mode, int cutoff = kDefaultCutoff) {
    detail::check_unit_interval(eta, "eta");
    return {{{eta, PureState::basis({{mode, 1}}, cutoff)}, {1.0 - eta, PureState::basis({{mode, 0}}, cutoff)}}};
}

/// (|10> + |01>)/sqrt2 on (mode_a, mode_b).
inline PureState spe_target(const ModeLabel& mode_a, const ModeLabel& mode_b, int cutoff = kDefaultCutoff) {
    PureState phi({mode_a, mode_b}, cutoff);
    const double h = 1.0 / std::sqrt(2.0);
    phi.add(PureState::Occupation{1, 0}, Complex{h, 0.0});
    phi.add(PureState::Occupation{0, 1}, Complex{h, 0.0});
    return phi;
}

/// eta |phi><phi| + (1 - eta) |vac><vac| on (mode_a, mode_b).
inline Ensemble spe_mixture(double eta, const ModeLabel& mode_a, const ModeLabel& mode_b,
                            int cutoff = kDefaultCutoff) {
    detail::check_unit_interval(eta, "eta");
    return {{{eta, spe_target(mode_a, mode_b, cutoff)}, {1.0 - eta, PureState::vacuum({mode_a, mode_b}, cutoff)}}};
}

struct SpsOracleResult : OracleResult {
    double fidelity = 0.0;
    std::vector<double> stage_fidelities;
};

struct SpeOracleResult : OracleResult {
    double entangled_fidelity = 0.0;
    std::vector<double> stage_fidelities;
    /// Per stage: the smallest overlap |<phi|psi>|^2 among heralded components
    /// carrying a photon. 1 means the entangled part stayed coherent.
    std::vector<double> stage_coherence;
};

inline SpsOracleResult run_sps_cascade_circuit(double eta0, const std::vector<double>& ts,
                                               int cutoff = kDefaultCutoff) {
    if (cutoff < 2) throw InvalidArgument("single-rail cascade needs a cutoff of at least 2");
    const ModeLabel input = "a1";
    const auto spec = build_sps_cascade(input, ts);
    SpsOracleResult r;
    RunOptions opts;
    opts.cutoff = cutoff;
    opts.on_herald = [&](std::size_t stage, const Ensemble& e) {
        r.stage_fidelities.push_back(single_rail_fidelity(e, "b2_s" + std::to_string(stage + 1)));
    };
    static_cast<OracleResult&>(r) = run_circuit(spec, sps_mixture(eta0, input, cutoff), opts);
    r.fidelity = single_rail_fidelity(r.output, spec.outputs.front());
    return r;
}

namespace detail {

inline double min_photon_coherence(const Ensemble& e, const PureState& phi) {
    double worst = 1.0;
    for (const auto& c : e.components) {
        if (c.probability <= 0.0 || c.state.max_photons() == 0) continue;
        Ensemble single{{{1.0, c.state}}};
        worst = std::min(worst, fidelity(single, phi));
    }
    return worst;
}

}  // namespace detail

inline SpeOracleResult run_spe_cascade_circuit(double eta0, const std::vector<double>& ts,
                                               int cutoff = kDefaultCutoff) {
    // One signal photon plus one ancilla per side is in flight at a joint detection.
    if (cutoff < 3) throw InvalidArgument("two-party cascade needs a cutoff of at least 3");
    const auto spec = build_spe_cascade("A", "B", ts);
    SpeOracleResult r;
    RunOptions opts;
    opts.cutoff = cutoff;
    opts.on_herald = [&](std::size_t stage, const Ensemble& e) {
        const auto tag = std::to_string(stage + 1);
        const auto phi = spe_target("b2_A" + tag, "b2_B" + tag, cutoff);
        r.stage_fidelities.push_back(fidelity(e, phi));
        r.stage_coherence.push_back(detail::min_photon_coherence(e, phi));
    };
    static_cast<OracleResult&>(r) = run_circuit(spec, spe_mixture(eta0, "A", "B", cutoff), opts);
    r.entangled_fidelity = fidelity(r.output, spe_target(spec.outputs[0], spec.outputs[1], cutoff));
    return r;
}

struct GridPoint {
    double eta = 0.0;
    double t = 0.0;
    int n = 1;
};

struct ComparisonReport {
    Flavor flavor = Flavor::kSps;
    std::size_t points = 0;
    double max_fidelity_deviation = 0.0;
    double max_probability_deviation = 0.0;
    GridPoint worst_fidelity_point;
    GridPoint worst_probability_point;
    double tolerance = 1e-10;

    bool passed() const {
        return max_fidelity_deviation < tolerance && max_probability_deviation < tolerance;
    }
};

/// Runs the circuit oracle and the closed form at every grid point (a
/// constant transmittance over n stages) and records the worst deviations.
inline ComparisonReport compare_oracle_vs_analytic(const std::vector<GridPoint>& grid, Flavor flavor) {
    if (grid.empty()) throw InvalidArgument("comparison grid is empty");
    ComparisonReport rep;
    rep.flavor = flavor;
    for (const auto& pt : grid) {
        if (pt.n < 1) throw InvalidArgument("grid stage count must be at least 1");
        const std::vector<double> ts(static_cast<std::size_t>(pt.n), pt.t);
        const auto trace = cascade(flavor, pt.eta, ts);
        double fid = 0.0, prob = 0.0;
        if (flavor == Flavor::kSps) {
            const auto o = run_sps_cascade_circuit(pt.eta, ts);
            fid = o.fidelity;
            prob = o.success_probability;
        } else {
            const auto o = run_spe_cascade_circuit(pt.eta, ts);
            fid = o.entangled_fidelity;
            prob = o.success_probability;
        }
        const double df = std::abs(fid - trace.final_eta());
        const double dp = std::abs(prob - trace.cumulative_probability());
        if (df > rep.max_fidelity_deviation || rep.points == 0) {
            rep.max_fidelity_deviation = std::max(rep.max_fidelity_deviation, df);
            rep.worst_fidelity_point = pt;
        }
        if (dp > rep.max_probability_deviation || rep.points == 0) {
            rep.max_probability_deviation = std::max(rep.max_probability_deviation, dp);
            rep.worst_probability_point = pt;
        }
        ++rep.points;
    }
    return rep;
}

}  // namespace nla
