// nla_cli: sweeps, cascade tables, oracle verification and the two-level
// SPDC experiment for cascaded noiseless linear amplification.
//
// Exit codes: 0 success, 2 configuration error, 3 verification failure,
// 4 numeric / degenerate input.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nla/analytic.hpp"
#include "nla/circuit.hpp"
#include "nla/spdc.hpp"
#include "nla/sweep.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitVerification = 3;
constexpr int kExitNumeric = 4;

// Flags shared by sweep and verify. Unset flags leave the config untouched,
// so they override values read from --config.
struct GridFlags {
    std::vector<double> eta;
    double t_min = 0, t_max = 0;
    int t_steps = 0;
    std::vector<int> n;
    std::string flavor, format, out, config;
    CLI::Option *eta_opt{}, *t_min_opt{}, *t_max_opt{}, *t_steps_opt{}, *n_opt{}, *flavor_opt{}, *format_opt{},
        *out_opt{};

    void attach(CLI::App* app) {
        eta_opt = app->add_option("--eta", eta, "Initial fidelities")->delimiter(',');
        t_min_opt = app->add_option("--t-min", t_min, "Smallest transmittance");
        t_max_opt = app->add_option("--t-max", t_max, "Largest transmittance");
        t_steps_opt = app->add_option("--t-steps", t_steps, "Number of transmittance points");
        n_opt = app->add_option("--n", n, "Cascade lengths")->delimiter(',');
        flavor_opt = app->add_option("--flavor", flavor, "sps or spe");
        format_opt = app->add_option("--format", format, "csv or json");
        out_opt = app->add_option("--out", out, "Output path (directory for csv sweeps)");
        app->add_option("--config", config, "JSON config file; flags override it");
    }

    nla::SweepConfig resolve(nla::SweepConfig base) const {
        if (!config.empty()) base = nla::load_config_file(base, config);
        if (*eta_opt) base.etas = eta;
        if (*t_min_opt) base.t_grid.min = t_min;
        if (*t_max_opt) base.t_grid.max = t_max;
        if (*t_steps_opt) base.t_grid.steps = t_steps;
        if (*n_opt) base.n_values = n;
        try {
            if (*flavor_opt) base.flavor = nla::parse_flavor(flavor);
        } catch (const nla::InvalidArgument& e) {
            throw nla::ConfigError(e.what());
        }
        if (*format_opt) base.output_format = nla::parse_format(format);
        if (*out_opt) base.output_path = out;
        base.validate();
        return base;
    }
};

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) std::cout << text;
    else nla::write_text(out, text);
}

int run_sweep(const GridFlags& flags) {
    const auto cfg = flags.resolve(nla::SweepConfig{});
    const auto rows = nla::run_sweep(cfg);
    nla::self_check(rows, cfg.flavor);
    if (cfg.output_format == nla::OutputFormat::kJson) {
        emit(nla::sweep_json(rows).dump(2) + "\n", cfg.output_path.value_or(""));
    } else if (cfg.output_path) {
        for (const auto& p : nla::write_sweep_csv_dir(rows, cfg.flavor, *cfg.output_path))
            std::cerr << "wrote " << p.string() << "\n";
    } else {
        std::cout << nla::sweep_csv(rows);
    }
    return 0;
}

int run_verify(const GridFlags& flags) {
    const auto cfg = flags.resolve(nla::default_verify_config());
    const auto report = nla::compare_oracle_vs_analytic(nla::verify_grid(cfg), cfg.flavor);
    emit(nla::report_json(report).dump(2) + "\n", cfg.output_path.value_or(""));
    return report.passed() ? 0 : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cascaded noiseless linear amplification: analytic sweeps and Fock-space oracle"};
    app.require_subcommand(1);

    GridFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "Fidelity vs transmittance for several cascade lengths");
    sweep_flags.attach(sweep);

    GridFlags verify_flags;
    auto* verify = app.add_subcommand("verify", "Compare the circuit oracle with the closed forms");
    verify_flags.attach(verify);

    double it_eta = 0.2, it_t = 0.2;
    int it_n = 5;
    std::string it_flavor = "sps", it_format = "csv", it_out;
    auto* iterate = app.add_subcommand("iterate", "Fidelity and cumulative probability per stage");
    iterate->add_option("--eta", it_eta, "Initial fidelity")->capture_default_str();
    iterate->add_option("--t", it_t, "Transmittance of every stage")->capture_default_str();
    iterate->add_option("--n", it_n, "Number of stages")->capture_default_str();
    iterate->add_option("--flavor", it_flavor, "sps or spe")->capture_default_str();
    iterate->add_option("--format", it_format, "csv or json")->capture_default_str();
    iterate->add_option("--out", it_out, "Output file");

    double spe_eta = 0.2, spe_t = 0.2;
    int spe_n = 3;
    std::string spe_out;
    auto* spe = app.add_subcommand("spe", "Two-party cascade: closed form vs circuit, with coherence");
    spe->add_option("--eta", spe_eta, "Initial entangled fidelity")->capture_default_str();
    spe->add_option("--t", spe_t, "Transmittance of every stage")->capture_default_str();
    spe->add_option("--n", spe_n, "Number of stages per party")->capture_default_str();
    spe->add_option("--out", spe_out, "Output file");

    nla::Fig8Config fig8_cfg{0.2, 0.2, 0.2};
    bool allow_non_amplifying = false;
    std::string fig8_out;
    auto* fig8 = app.add_subcommand("fig8", "Two-level amplification driven by a double-pass SPDC source");
    fig8->add_option("--t1", fig8_cfg.t1, "Preparation VBS transmittance")->capture_default_str();
    fig8->add_option("--t2", fig8_cfg.t2, "Stage-1 ancilla VBS transmittance")->capture_default_str();
    fig8->add_option("--t3", fig8_cfg.t3, "Stage-2 ancilla VBS transmittance")->capture_default_str();
    fig8->add_flag("--allow-non-amplifying", allow_non_amplifying, "Accept t2, t3 >= 1/2");
    fig8->add_option("--out", fig8_out, "Output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*sweep) return run_sweep(sweep_flags);
        if (*verify) return run_verify(verify_flags);
        if (*iterate) {
            const auto flavor = nla::parse_flavor(it_flavor);
            const auto rows = nla::run_iterate(flavor, it_eta, it_t, it_n);
            const auto text = nla::parse_format(it_format) == nla::OutputFormat::kJson
                                  ? nla::iterate_json(rows).dump(2) + "\n"
                                  : nla::iterate_csv(rows);
            emit(text, it_out);
            return 0;
        }
        if (*spe) {
            const auto j = nla::spe_json(spe_eta, spe_t, spe_n);
            emit(j.dump(2) + "\n", spe_out);
            return j.at("max_deviation").get<double>() < 1e-10 ? 0 : kExitVerification;
        }
        if (*fig8) {
            const auto r = nla::simulate_fig8(fig8_cfg, !allow_non_amplifying);
            const auto j = nla::fig8_json(fig8_cfg, r);
            emit(j.dump(2) + "\n", fig8_out);
            return j.at("deviation").at("final_eta").get<double>() < 1e-12 &&
                           j.at("deviation").at("success_prob").get<double>() < 1e-12
                       ? 0
                       : kExitVerification;
        }
    } catch (const nla::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nla::VerificationFailure& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return kExitVerification;
    } catch (const nla::DegenerateInput& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const nla::HeraldNeverSucceeds& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const nla::InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nla::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
