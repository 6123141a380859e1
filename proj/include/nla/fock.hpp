// fock.hpp
// Sparse truncated Fock-space states over labeled optical modes, classical
// mixtures of them, and the two-mode linear-optical primitives that act on them.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "nla/errors.hpp"

namespace nla {

using Complex = std::complex<double>;
using ModeLabel = std::string;

/// Occupation numbers keyed by mode label. Used both for basis kets and for
/// detection patterns.
using FockBasisState = std::map<ModeLabel, int>;

/// Column j holds the image of the j-th input creation operator:
/// in_j^dagger -> sum_i m[i][j] out_i^dagger.
using Matrix2 = std::array<std::array<Complex, 2>, 2>;

inline constexpr int kDefaultCutoff = 4;
inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kProbabilityTolerance = 1e-12;
// Amplitudes below this magnitude are exact cancellations up to rounding.
inline constexpr double kPruneThreshold = 1e-15;

namespace detail {

inline double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

inline double binomial(int n, int k) {
    return factorial(n) / (factorial(k) * factorial(n - k));
}

inline Complex ipow(Complex z, int n) {
    Complex r{1.0, 0.0};
    for (int k = 0; k < n; ++k) r *= z;
    return r;
}

}  // namespace detail

/// Sparse superposition over occupation vectors aligned with a mode register.
///
/// The squared norm of the amplitudes is the state's weight: states produced
/// by projective events (see measure_modes) are sub-normalized and carry the
/// event probability this way. The register order is insertion order.
class PureState {
public:
    using Occupation = std::vector<int>;
    using Terms = std::map<Occupation, Complex>;

    PureState() = default;

    explicit PureState(std::vector<ModeLabel> modes, int cutoff = kDefaultCutoff)
        : modes_(std::move(modes)), cutoff_(cutoff) {
        if (cutoff_ < 0) throw InvalidArgument("photon cutoff must be non-negative");
        auto sorted = modes_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ModeError("duplicate mode label in register");
    }

    /// Single basis ket with unit amplitude, register in the given order.
    static PureState basis(const std::vector<std::pair<ModeLabel, int>>& occupations,
                           int cutoff = kDefaultCutoff) {
        std::vector<ModeLabel> modes;
        Occupation occ;
        for (const auto& [mode, n] : occupations) {
            modes.push_back(mode);
            occ.push_back(n);
        }
        PureState s(std::move(modes), cutoff);
        s.add(occ, Complex{1.0, 0.0});
        return s;
    }

    /// Vacuum on the given register.
    static PureState vacuum(std::vector<ModeLabel> modes, int cutoff = kDefaultCutoff) {
        PureState s(std::move(modes), cutoff);
        s.add(Occupation(s.modes_.size(), 0), Complex{1.0, 0.0});
        return s;
    }

    const std::vector<ModeLabel>& modes() const { return modes_; }
    const Terms& terms() const { return terms_; }
    int cutoff() const { return cutoff_; }
    bool empty() const { return terms_.empty(); }

    bool has_mode(const ModeLabel& m) const {
        return std::find(modes_.begin(), modes_.end(), m) != modes_.end();
    }

    std::size_t index_of(const ModeLabel& m) const {
        auto it = std::find(modes_.begin(), modes_.end(), m);
        if (it == modes_.end()) throw ModeError("mode '" + m + "' not in register");
        return static_cast<std::size_t>(it - modes_.begin());
    }

    /// Adds `amp` to the coefficient of the ket `occ` (register order).
    PureState& add(const Occupation& occ, Complex amp) {
        if (occ.size() != modes_.size())
            throw ModeError("occupation vector does not match register size");
        int total = 0;
        for (int n : occ) {
            if (n < 0) throw InvalidArgument("negative photon number");
            total += n;
        }
        if (total > cutoff_)
            throw CutoffOverflow("basis state with " + std::to_string(total) +
                                 " photons exceeds cutoff " + std::to_string(cutoff_));
        auto& slot = terms_[occ];
        slot += amp;
        if (std::abs(slot) < kPruneThreshold) terms_.erase(occ);
        return *this;
    }

    /// Adds `amp` to the ket given by label occupations; unlisted modes are 0.
    PureState& add_ket(const FockBasisState& ket, Complex amp) { return add(to_occupation(ket), amp); }

    Complex amplitude(const FockBasisState& ket) const {
        auto it = terms_.find(to_occupation(ket));
        return it == terms_.end() ? Complex{} : it->second;
    }

    FockBasisState to_labels(const Occupation& occ) const {
        FockBasisState out;
        for (std::size_t i = 0; i < modes_.size(); ++i) out[modes_[i]] = occ[i];
        return out;
    }

    Occupation to_occupation(const FockBasisState& ket) const {
        Occupation occ(modes_.size(), 0);
        for (const auto& [mode, n] : ket) occ[index_of(mode)] = n;
        return occ;
    }

    /// Squared norm of the amplitudes.
    double weight() const {
        double w = 0.0;
        for (const auto& [_, a] : terms_) w += std::norm(a);
        return w;
    }

    PureState scaled(Complex c) const {
        PureState out(modes_, cutoff_);
        for (const auto& [occ, a] : terms_) out.add(occ, a * c);
        return out;
    }

    PureState normalized() const {
        const double w = weight();
        if (w <= 0.0) throw InvalidArgument("cannot normalize a zero state");
        return scaled(Complex{1.0 / std::sqrt(w), 0.0});
    }

    int max_photons() const {
        int m = 0;
        for (const auto& [occ, _] : terms_) m = std::max(m, std::accumulate(occ.begin(), occ.end(), 0));
        return m;
    }

    /// Relabels modes; `mapping` pairs are applied simultaneously.
    PureState renamed(const std::vector<std::pair<ModeLabel, ModeLabel>>& mapping) const {
        auto modes = modes_;
        for (const auto& [from, to] : mapping) modes[index_of(from)] = to;
        PureState out(std::move(modes), cutoff_);
        out.terms_ = terms_;
        return out;
    }

    /// Same state with a different cutoff; fails if some ket no longer fits.
    PureState with_cutoff(int cutoff) const {
        PureState out(modes_, cutoff);
        for (const auto& [occ, a] : terms_) out.add(occ, a);
        return out;
    }

private:
    std::vector<ModeLabel> modes_;
    int cutoff_ = kDefaultCutoff;
    Terms terms_;
};

/// Classical mixture of pure states; stands in for a density operator whose
/// every component is known.
struct Ensemble {
    struct Component {
        double probability = 0.0;
        PureState state;
    };

    std::vector<Component> components;

    double total_weight() const {
        double w = 0.0;
        for (const auto& c : components) w += c.probability * c.state.weight();
        return w;
    }

    /// Rescales the component probabilities so the mixture has unit trace.
    Ensemble normalized() const {
        const double w = total_weight();
        if (w <= 0.0) throw InvalidArgument("cannot normalize an empty mixture");
        Ensemble out;
        for (const auto& c : components) {
            const double cw = c.state.weight();
            if (cw <= 0.0 || c.probability <= 0.0) continue;
            out.components.push_back({c.probability * cw / w, c.state.normalized()});
        }
        return out;
    }

    void validate() const {
        if (components.empty()) throw InvalidArgument("ensemble has no components");
        const auto& reg = components.front().state.modes();
        for (const auto& c : components) {
            if (c.probability < 0.0) throw InvalidArgument("negative mixture weight");
            auto a = c.state.modes();
            auto b = reg;
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            if (a != b) throw ModeError("ensemble components do not share a mode register");
        }
    }
};

/// Product state on the union register. Registers must be disjoint; the
/// result uses the smaller of the two cutoffs.
inline PureState tensor(const PureState& a, const PureState& b) {
    for (const auto& m : b.modes())
        if (a.has_mode(m)) throw ModeError("tensor: mode '" + m + "' appears in both factors");
    auto modes = a.modes();
    modes.insert(modes.end(), b.modes().begin(), b.modes().end());
    PureState out(std::move(modes), std::min(a.cutoff(), b.cutoff()));
    for (const auto& [oa, xa] : a.terms()) {
        for (const auto& [ob, xb] : b.terms()) {
            auto occ = oa;
            occ.insert(occ.end(), ob.begin(), ob.end());
            out.add(occ, xa * xb);
        }
    }
    return out;
}

inline bool is_unitary(const Matrix2& u, double tol = kNormTolerance) {
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            Complex s{};
            for (int k = 0; k < 2; ++k) s += std::conj(u[k][i]) * u[k][j];
            if (std::abs(s - Complex{i == j ? 1.0 : 0.0, 0.0}) > tol) return false;
        }
    }
    return true;
}

/// Linear-optical two-mode transformation acting on modes (m1, m2) in place.
///
/// For a ket with n1, n2 photons, (u00 x + u10 y)^n1 (u01 x + u11 y)^n2 is
/// expanded binomially and the monomials x^k y^l re-normalized by sqrt(k! l!).
inline PureState apply_two_mode_unitary(const PureState& s, const ModeLabel& m1,
                                        const ModeLabel& m2, const Matrix2& u) {
    if (m1 == m2) throw ModeError("two-mode unitary needs two distinct modes");
    if (!is_unitary(u)) throw InvalidArgument("two-mode matrix is not unitary");
    const std::size_t i1 = s.index_of(m1);
    const std::size_t i2 = s.index_of(m2);

    PureState out(s.modes(), s.cutoff());
    for (const auto& [occ, amp] : s.terms()) {
        const int n1 = occ[i1];
        const int n2 = occ[i2];
        const int n = n1 + n2;
        const double in_norm = std::sqrt(detail::factorial(n1) * detail::factorial(n2));
        std::vector<Complex> coeff(static_cast<std::size_t>(n) + 1);
        for (int j1 = 0; j1 <= n1; ++j1) {
            const Complex f1 = detail::binomial(n1, j1) * detail::ipow(u[0][0], j1) *
                               detail::ipow(u[1][0], n1 - j1);
            for (int j2 = 0; j2 <= n2; ++j2) {
                const Complex f2 = detail::binomial(n2, j2) * detail::ipow(u[0][1], j2) *
                                   detail::ipow(u[1][1], n2 - j2);
                coeff[static_cast<std::size_t>(j1 + j2)] += f1 * f2;
            }
        }
        for (int k = 0; k <= n; ++k) {
            const Complex c = coeff[static_cast<std::size_t>(k)];
            if (c == Complex{}) continue;
            auto next = occ;
            next[i1] = k;
            next[i2] = n - k;
            const double out_norm = std::sqrt(detail::factorial(k) * detail::factorial(n - k));
            out.add(next, amp * c * (out_norm / in_norm));
        }
    }
    return out;
}

/// Phase shifter: multiplies each ket by exp(i * phase * n_mode).
inline PureState apply_phase(const PureState& s, const ModeLabel& mode, double phase) {
    const std::size_t idx = s.index_of(mode);
    PureState out(s.modes(), s.cutoff());
    for (const auto& [occ, amp] : s.terms()) out.add(occ, amp * std::polar(1.0, phase * occ[idx]));
    return out;
}

struct MeasurementOutcome {
    FockBasisState pattern;
    double probability = 0.0;
    /// Conditional state on the unmeasured modes; its weight equals `probability`.
    PureState residual;
};

/// Photon-number measurement of `modes`, enumerating every outcome with
/// non-zero probability. Outcomes are ordered by pattern.
inline std::vector<MeasurementOutcome> measure_modes(const PureState& s,
                                                     const std::vector<ModeLabel>& modes) {
    if (modes.empty()) return {{FockBasisState{}, s.weight(), s}};

    std::vector<std::size_t> measured;
    for (const auto& m : modes) measured.push_back(s.index_of(m));
    std::vector<ModeLabel> rest_modes;
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < s.modes().size(); ++i) {
        if (std::find(measured.begin(), measured.end(), i) == measured.end()) {
            rest.push_back(i);
            rest_modes.push_back(s.modes()[i]);
        }
    }

    std::map<PureState::Occupation, PureState> residuals;
    for (const auto& [occ, amp] : s.terms()) {
        PureState::Occupation key, rem;
        for (auto i : measured) key.push_back(occ[i]);
        for (auto i : rest) rem.push_back(occ[i]);
        auto it = residuals.try_emplace(key, rest_modes, s.cutoff()).first;
        it->second.add(rem, amp);
    }

    std::vector<MeasurementOutcome> out;
    for (auto& [key, residual] : residuals) {
        const double p = residual.weight();
        if (p <= 0.0) continue;
        FockBasisState pattern;
        for (std::size_t k = 0; k < modes.size(); ++k) pattern[modes[k]] = key[k];
        out.push_back({std::move(pattern), p, std::move(residual)});
    }
    return out;
}

/// <a|b> over identical registers (order may differ).
inline Complex inner_product(const PureState& a, const PureState& b) {
    if (a.modes().size() != b.modes().size()) throw ModeError("inner product: register mismatch");
    std::vector<std::size_t> perm;
    for (const auto& m : a.modes()) perm.push_back(b.index_of(m));
    Complex s{};
    for (const auto& [occ_b, xb] : b.terms()) {
        PureState::Occupation occ_a(occ_b.size());
        for (std::size_t i = 0; i < perm.size(); ++i) occ_a[i] = occ_b[perm[i]];
        auto it = a.terms().find(occ_a);
        if (it != a.terms().end()) s += std::conj(it->second) * xb;
    }
    return s;
}

/// Equality of normalized rays: global phase is ignored.
inline bool equal_up_to_phase(const PureState& a, const PureState& b, double tol = kNormTolerance) {
    const double wa = a.weight();
    const double wb = b.weight();
    if (wa <= 0.0 || wb <= 0.0) return wa == wb;
    return std::abs(std::abs(inner_product(a, b)) / std::sqrt(wa * wb) - 1.0) < tol;
}

/// <target| rho |target> for the mixture reduced to the target's modes,
/// normalized by the mixture's total weight. `target` must be normalized.
inline double fidelity(const Ensemble& e, const PureState& target) {
    double f = 0.0;
    for (const auto& c : e.components) {
        const auto& s = c.state;
        const double w = s.weight();
        if (w <= 0.0 || c.probability <= 0.0) continue;
        std::vector<std::size_t> tidx;
        for (const auto& m : target.modes()) tidx.push_back(s.index_of(m));
        // Group amplitudes by the occupation of the traced-out modes.
        std::map<PureState::Occupation, Complex> projected;
        for (const auto& [occ, amp] : s.terms()) {
            PureState::Occupation key = occ;
            PureState::Occupation sub;
            for (auto i : tidx) {
                sub.push_back(occ[i]);
                key[i] = -1;
            }
            auto it = target.terms().find(sub);
            if (it != target.terms().end()) projected[key] += std::conj(it->second) * amp;
        }
        double overlap = 0.0;
        for (const auto& [_, z] : projected) overlap += std::norm(z);
        f += c.probability * overlap;
    }
    return f / e.total_weight();
}

/// Weight of the one-photon component of mode `m` after tracing out every
/// other mode. Rejects outputs that are not a photon/vacuum mixture.
inline double single_rail_fidelity(const Ensemble& e, const ModeLabel& m,
                                   double tol = kNormTolerance) {
    double f = 0.0;
    for (const auto& c : e.components) {
        const auto& s = c.state;
        const double w = s.weight();
        if (w <= 0.0 || c.probability <= 0.0) continue;
        const std::size_t idx = s.index_of(m);
        // rho(n, n') = sum_rest psi(n, rest) conj(psi(n', rest))
        std::map<PureState::Occupation, std::map<int, Complex>> by_rest;
        for (const auto& [occ, amp] : s.terms()) {
            auto rest = occ;
            rest[idx] = -1;
            by_rest[rest][occ[idx]] += amp;
        }
        std::map<std::pair<int, int>, Complex> rho;
        for (const auto& [_, col] : by_rest)
            for (const auto& [n, x] : col)
                for (const auto& [np, y] : col) rho[{n, np}] += x * std::conj(y);

        double one = 0.0;
        for (const auto& [nn, v] : rho) {
            const auto [n, np] = nn;
            if (n != np && std::abs(v) / w > tol)
                throw InvalidArgument("single-rail fidelity: coherence between photon numbers in mode '" +
                                      m + "'");
            if (n == np && n >= 2 && std::abs(v) / w > tol)
                throw InvalidArgument("single-rail fidelity: multi-photon support in mode '" + m + "'");
            if (n == 1 && np == 1) one = v.real();
        }
        f += c.probability * one;
    }
    return f / e.total_weight();
}

}  // namespace nla
