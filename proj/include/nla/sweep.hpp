// sweep.hpp
// Parameter sweeps, cascade iteration tables and their CSV/JSON encodings.
// Backs the nla_cli tool.

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nla/analytic.hpp"
#include "nla/circuit.hpp"
#include "nla/errors.hpp"
#include "nla/spdc.hpp"

namespace nla {

/// Malformed or inconsistent command-line / file configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A self-check or oracle comparison exceeded its tolerance.
class VerificationFailure : public Error {
public:
    using Error::Error;
};

enum class OutputFormat { kCsv, kJson };

inline OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::kCsv;
    if (s == "json") return OutputFormat::kJson;
    throw ConfigError("unknown output format '" + s + "' (expected csv or json)");
}

struct TGrid {
    double min = 0.01;
    double max = 0.99;
    int steps = 99;

    /// Evenly spaced, endpoints included. One step yields {min}. Interior
    /// points are snapped to 1e-12 so that, e.g., the midpoint of 0.01..0.99
    /// is the double 0.5 rather than its neighbour.
    std::vector<double> values() const {
        std::vector<double> out;
        if (steps == 1) return {min};
        for (int i = 0; i < steps; ++i) {
            if (i == 0) out.push_back(min);
            else if (i == steps - 1) out.push_back(max);
            else out.push_back(std::round((min + (max - min) * i / (steps - 1)) * 1e12) / 1e12);
        }
        return out;
    }
};

struct SweepConfig {
    std::vector<double> etas{0.2, 0.6, 0.9};
    TGrid t_grid;
    std::vector<int> n_values{1, 2, 3, 4, 5};
    Flavor flavor = Flavor::kSps;
    OutputFormat output_format = OutputFormat::kCsv;
    std::optional<std::string> output_path;

    void validate() const {
        if (etas.empty()) throw ConfigError("eta list is empty");
        for (double e : etas)
            if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("eta values must lie in [0, 1]");
        if (t_grid.steps < 1) throw ConfigError("t-steps must be at least 1");
        if (!(t_grid.min > 0.0 && t_grid.max < 1.0 && t_grid.min <= t_grid.max))
            throw ConfigError("t grid must satisfy 0 < t-min <= t-max < 1");
        if (n_values.empty()) throw ConfigError("n list is empty");
        for (int n : n_values)
            if (n < 1) throw ConfigError("n values must be at least 1");
    }
};

/// Default grid of the oracle verification run.
inline SweepConfig default_verify_config() {
    SweepConfig c;
    c.etas.clear();
    for (int i = 1; i <= 19; ++i) c.etas.push_back(0.05 * i);
    c.t_grid = {0.1, 0.45, 8};
    c.n_values = {1, 2, 3, 4, 5};
    return c;
}

/// Overlays the keys present in a JSON config object:
/// eta, t_min, t_max, t_steps, n, flavor, format, out.
inline void apply_json_config(SweepConfig& c, const nlohmann::json& j) {
    try {
        if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
        if (j.contains("eta")) {
            const auto& e = j.at("eta");
            c.etas = e.is_array() ? e.get<std::vector<double>>() : std::vector<double>{e.get<double>()};
        }
        if (j.contains("t_min")) c.t_grid.min = j.at("t_min").get<double>();
        if (j.contains("t_max")) c.t_grid.max = j.at("t_max").get<double>();
        if (j.contains("t_steps")) c.t_grid.steps = j.at("t_steps").get<int>();
        if (j.contains("n")) {
            const auto& n = j.at("n");
            c.n_values = n.is_array() ? n.get<std::vector<int>>() : std::vector<int>{n.get<int>()};
        }
        if (j.contains("flavor")) c.flavor = parse_flavor(j.at("flavor").get<std::string>());
        if (j.contains("format")) c.output_format = parse_format(j.at("format").get<std::string>());
        if (j.contains("out")) c.output_path = j.at("out").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("bad config value: ") + ex.what());
    } catch (const InvalidArgument& ex) {
        throw ConfigError(ex.what());
    }
}

inline SweepConfig load_config_file(SweepConfig base, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + ex.what());
    }
    apply_json_config(base, j);
    return base;
}

struct SweepRow {
    double eta0 = 0.0;
    double t = 0.0;
    int n = 0;
    double eta_n = 0.0;
    double gain_total = 0.0;
    double p_cumulative = 0.0;
};

struct IterateRow {
    int n = 0;
    double eta_n = 0.0;
    double p_cumulative = 0.0;
};

/// Closed-form rows ordered eta0-major, then t, then n. gain_total is the
/// product of stage gains (finite also for eta0 = 0).
inline std::vector<SweepRow> run_sweep(const SweepConfig& c) {
    c.validate();
    int n_max = 0;
    for (int n : c.n_values) n_max = std::max(n_max, n);
    std::vector<SweepRow> rows;
    for (double eta0 : c.etas) {
        for (double t : c.t_grid.values()) {
            const auto trace = cascade(c.flavor, eta0, std::vector<double>(static_cast<std::size_t>(n_max), t));
            for (int n : c.n_values) {
                double g = 1.0;
                for (int k = 0; k < n; ++k) g *= trace.stages[static_cast<std::size_t>(k)].gain;
                const auto& st = trace.stages[static_cast<std::size_t>(n - 1)];
                rows.push_back({eta0, t, n, st.eta, g, st.cumulative_probability});
            }
        }
    }
    return rows;
}

/// Re-derives every row by direct iteration of the single-stage formulas
/// and throws VerificationFailure on a mismatch above `tol`.
inline void self_check(const std::vector<SweepRow>& rows, Flavor flavor, double tol = 1e-12) {
    for (const auto& r : rows) {
        double eta = r.eta0, p = 1.0;
        for (int k = 0; k < r.n; ++k) {
            const double single = r.t + eta - 2.0 * eta * r.t;
            p *= flavor == Flavor::kSps ? single : (1.0 - 2.0 * eta) * r.t * r.t + eta * r.t;
            eta = (1.0 - r.t) * eta / single;
        }
        bool ok = std::abs(eta - r.eta_n) <= tol && std::abs(p - r.p_cumulative) <= tol;
        if (r.eta0 > 0.0) ok = ok && std::abs(r.gain_total - eta / r.eta0) <= tol * std::max(1.0, r.gain_total);
        if (!ok) {
            std::ostringstream msg;
            msg << "self-check failed at eta0=" << r.eta0 << " t=" << r.t << " n=" << r.n;
            throw VerificationFailure(msg.str());
        }
    }
}

inline std::vector<IterateRow> run_iterate(Flavor flavor, double eta0, double t, int n_max) {
    if (n_max < 1) throw ConfigError("n must be at least 1");
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("t must lie in (0, 1)");
    if (!(eta0 >= 0.0 && eta0 <= 1.0)) throw ConfigError("eta must lie in [0, 1]");
    const auto trace = cascade(flavor, eta0, std::vector<double>(static_cast<std::size_t>(n_max), t));
    std::vector<IterateRow> rows;
    for (const auto& s : trace.stages) rows.push_back({s.index, s.eta, s.cumulative_probability});
    return rows;
}

/// Decimal rendering with 12 significant digits.
inline std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline constexpr const char* kSweepCsvHeader = "eta0,t,n,eta_n,gain_total,p_cumulative";
inline constexpr const char* kIterateCsvHeader = "n,eta_n,p_cumulative";

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = std::string(kSweepCsvHeader) + "\n";
    for (const auto& r : rows) {
        out += format_number(r.eta0) + "," + format_number(r.t) + "," + std::to_string(r.n) + "," +
               format_number(r.eta_n) + "," + format_number(r.gain_total) + "," + format_number(r.p_cumulative) +
               "\n";
    }
    return out;
}

inline nlohmann::json sweep_json(const std::vector<SweepRow>& rows) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back({{"eta0", r.eta0},
                       {"t", r.t},
                       {"n", r.n},
                       {"eta_n", r.eta_n},
                       {"gain_total", r.gain_total},
                       {"p_cumulative", r.p_cumulative}});
    return arr;
}

inline std::string iterate_csv(const std::vector<IterateRow>& rows) {
    std::string out = std::string(kIterateCsvHeader) + "\n";
    for (const auto& r : rows)
        out += std::to_string(r.n) + "," + format_number(r.eta_n) + "," + format_number(r.p_cumulative) + "\n";
    return out;
}

inline nlohmann::json iterate_json(const std::vector<IterateRow>& rows) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) arr.push_back({{"n", r.n}, {"eta_n", r.eta_n}, {"p_cumulative", r.p_cumulative}});
    return arr;
}

/// File name used for one eta0 slice of a CSV sweep written to a directory.
inline std::string sweep_csv_filename(Flavor flavor, double eta0) {
    return std::string(to_string(flavor)) + "_eta" + format_number(eta0) + ".csv";
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
    out << text;
    if (!out) throw ConfigError("failed writing output file '" + path.string() + "'");
}

/// Writes a CSV sweep as one file per eta0 inside `dir` (created if needed).
/// Returns the written paths in eta order.
inline std::vector<std::filesystem::path> write_sweep_csv_dir(const std::vector<SweepRow>& rows, Flavor flavor,
                                                              const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw ConfigError("cannot create output directory '" + dir.string() + "'");
    std::vector<std::filesystem::path> written;
    std::size_t i = 0;
    while (i < rows.size()) {
        std::size_t j = i;
        while (j < rows.size() && rows[j].eta0 == rows[i].eta0) ++j;
        const std::vector<SweepRow> slice(rows.begin() + static_cast<std::ptrdiff_t>(i),
                                          rows.begin() + static_cast<std::ptrdiff_t>(j));
        auto path = dir / sweep_csv_filename(flavor, rows[i].eta0);
        write_text(path, sweep_csv(slice));
        written.push_back(std::move(path));
        i = j;
    }
    return written;
}

inline std::vector<GridPoint> verify_grid(const SweepConfig& c) {
    c.validate();
    std::vector<GridPoint> grid;
    for (double eta : c.etas)
        for (double t : c.t_grid.values())
            for (int n : c.n_values) grid.push_back({eta, t, n});
    return grid;
}

inline nlohmann::json report_json(const ComparisonReport& r) {
    auto point = [](const GridPoint& p) { return nlohmann::json{{"eta", p.eta}, {"t", p.t}, {"n", p.n}}; };
    return {{"flavor", std::string(to_string(r.flavor))},
            {"points", r.points},
            {"max_fidelity_deviation", r.max_fidelity_deviation},
            {"max_probability_deviation", r.max_probability_deviation},
            {"worst_fidelity_point", point(r.worst_fidelity_point)},
            {"worst_probability_point", point(r.worst_probability_point)},
            {"tolerance", r.tolerance},
            {"passed", r.passed()}};
}

/// Analytic and circuit per-stage data for the two-party cascade.
inline nlohmann::json spe_json(double eta0, double t, int n) {
    if (n < 1) throw ConfigError("n must be at least 1");
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("t must lie in (0, 1)");
    if (!(eta0 >= 0.0 && eta0 <= 1.0)) throw ConfigError("eta must lie in [0, 1]");
    const std::vector<double> ts(static_cast<std::size_t>(n), t);
    const auto trace = cascade_spe(eta0, ts);
    const auto oracle = run_spe_cascade_circuit(eta0, ts);
    auto stages = nlohmann::json::array();
    double cumulative = 1.0;
    double max_dev = 0.0;
    for (std::size_t k = 0; k < trace.stages.size(); ++k) {
        const auto& s = trace.stages[k];
        cumulative *= oracle.per_stage_probs[k];
        max_dev = std::max({max_dev, std::abs(s.eta - oracle.stage_fidelities[k]),
                            std::abs(s.cumulative_probability - cumulative)});
        stages.push_back({{"n", s.index},
                          {"eta_n", s.eta},
                          {"stage_probability", s.stage_probability},
                          {"p_cumulative", s.cumulative_probability},
                          {"circuit_eta_n", oracle.stage_fidelities[k]},
                          {"circuit_p_cumulative", cumulative},
                          {"coherence", oracle.stage_coherence[k]}});
    }
    return {{"eta0", eta0}, {"t", t}, {"stages", stages}, {"max_deviation", max_dev}};
}

inline nlohmann::json fig8_json(const Fig8Config& cfg, const Fig8Result& r) {
    const auto trace = cascade_sps(cfg.t1, {cfg.t2, cfg.t3});
    const double a_eta = trace.final_eta();
    const double a_p = trace.cumulative_probability();
    return {{"t1", cfg.t1},
            {"t2", cfg.t2},
            {"t3", cfg.t3},
            {"circuit", {{"prepared_eta", r.prepared_eta}, {"final_eta", r.final_eta}, {"success_prob", r.success_prob}}},
            {"analytic", {{"prepared_eta", cfg.t1}, {"final_eta", a_eta}, {"success_prob", a_p}}},
            {"deviation",
             {{"prepared_eta", std::abs(r.prepared_eta - cfg.t1)},
              {"final_eta", std::abs(r.final_eta - a_eta)},
              {"success_prob", std::abs(r.success_prob - a_p)}}}};
}

}  // namespace nla
