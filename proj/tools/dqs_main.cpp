#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dqs/fock.hpp"
#include "dqs/sweep.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

std::string join_args(int argc, char** argv) {
    std::ostringstream out;
    for (int i = 0; i < argc; ++i) {
        out << (i ? " " : "") << argv[i];
    }
    return out.str();
}

void write_sidecar(const std::string& out_path, const std::string& command,
                   std::size_t rows) {
    nlohmann::ordered_json meta;
    meta["tool"] = "dqs";
    meta["version"] = kVersion;
    meta["command"] = command;
    meta["rows"] = rows;
    const auto now = std::chrono::system_clock::now();
    meta["created_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    std::ofstream sidecar(out_path + ".meta.json", std::ios::binary);
    sidecar << meta.dump(2) << '\n';
}

int emit(const dqs::SweepSpec& spec, const dqs::SweepResult& result,
         const std::string& out_path, const std::string& format,
         const std::string& command) {
    std::ostringstream data;
    if (format == "csv") {
        dqs::write_csv(data, spec, result);
    } else if (format == "json") {
        dqs::write_json(data, spec, result);
    } else {
        std::cerr << "error: unknown format '" << format << "'\n";
        return dqs::kSpecError;
    }
    if (out_path.empty()) {
        std::cout << data.str();
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return dqs::kSpecError;
        }
        out << data.str();
        write_sidecar(out_path, command, result.rows.size());
    }
    return result.any_degenerate ? dqs::kDegenerateEncountered : dqs::kOk;
}

struct AxisFlags {
    std::string m, r, gain_db, x, x0, xm, eta1, eta2;
};

void apply_axis_flags(dqs::SweepSpec& spec, const AxisFlags& flags) {
    if (!flags.m.empty()) spec.modes = dqs::parse_axis(flags.m);
    if (!flags.r.empty()) spec.r = dqs::parse_axis(flags.r);
    if (!flags.gain_db.empty()) spec.gain_db = dqs::parse_axis(flags.gain_db);
    if (!flags.x.empty()) spec.x = dqs::parse_axis(flags.x);
    if (!flags.x0.empty()) {
        spec.x0 = dqs::parse_axis(flags.x0);
        spec.xm.clear();
    }
    if (!flags.xm.empty()) {
        spec.xm = dqs::parse_axis(flags.xm);
        spec.x0.clear();
    }
    if (!flags.eta1.empty()) spec.eta1 = dqs::parse_axis(flags.eta1);
    if (!flags.eta2.empty()) spec.eta2 = dqs::parse_axis(flags.eta2);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian engine for OPA-assisted distributed displacement sensing"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    const std::string command = join_args(argc, argv);

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "evaluate a parameter grid");
    AxisFlags axes;
    std::string scheme_name = "single";
    std::string denominator = "lossless-opt";
    std::string report = "full";
    std::string out_path;
    std::string format = "csv";
    std::string spec_path;
    std::string dump_path;
    bool strict = false;
    sweep->add_option("--scheme", scheme_name, "single | scheme1 | scheme2");
    sweep->add_option("--m", axes.m, "mode count axis");
    sweep->add_option("--r", axes.r, "probe squeezing axis");
    sweep->add_option("--gain-db", axes.gain_db, "OPA gain axis in dB (G = e^{2 r_m})");
    sweep->add_option("--x", axes.x, "unknown displacement axis");
    sweep->add_option("--x0", axes.x0, "gain-scaled reference displacement axis");
    sweep->add_option("--xm", axes.xm, "reference displacement axis");
    sweep->add_option("--eta1", axes.eta1, "transmissivity after encoding");
    sweep->add_option("--eta2", axes.eta2, "transmissivity before measurement");
    sweep->add_option("--ratio-denominator", denominator, "lossless-opt | lossy-opt");
    sweep->add_option("--report", report, "full | photons");
    sweep->add_option("--out", out_path, "output file (stdout when omitted)");
    sweep->add_option("--format", format, "csv | json");
    sweep->add_option("--spec", spec_path, "read a key=value sweep spec file");
    sweep->add_option("--dump-spec", dump_path, "write the resolved spec and exit");
    sweep->add_flag("--strict", strict, "abort on the first degenerate scenario");

    // ---- figure ----
    auto* figure = app.add_subcommand("figure", "emit the data grid behind a figure panel");
    std::string figure_name;
    std::string fig_out;
    std::string fig_format = "csv";
    figure->add_option("name", figure_name, "panel name (fig3a..fig6b)")->required();
    figure->add_option("--out", fig_out, "output file (default <name>.csv)");
    figure->add_option("--format", fig_format, "csv | json");

    // ---- oracle-check ----
    auto* oracle = app.add_subcommand(
        "oracle-check", "triple-route cross-check on truncated-basis presets");
    std::vector<std::string> preset_names;
    double tol_override = 0.0;
    int cutoff_override = 0;
    bool all_presets = false;
    oracle->add_option("preset", preset_names, "preset names (default: 'default')");
    oracle->add_flag("--all", all_presets, "run every preset");
    oracle->add_option("--tol", tol_override, "override the pass tolerance");
    oracle->add_option("--cutoff", cutoff_override, "override the per-mode cutoff");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) {
            dqs::SweepSpec spec;
            if (!spec_path.empty()) {
                std::ifstream in(spec_path);
                if (!in) {
                    std::cerr << "error: cannot read spec '" << spec_path << "'\n";
                    return dqs::kSpecError;
                }
                std::ostringstream text;
                text << in.rdbuf();
                spec = dqs::parse_spec_text(text.str());
            } else {
                spec.x0.clear();
            }
            spec.scheme = dqs::scheme_from_string(scheme_name);
            apply_axis_flags(spec, axes);
            if (denominator == "lossless-opt") {
                spec.ratio_denominator = dqs::OptimalConvention::Lossless;
            } else if (denominator == "lossy-opt") {
                spec.ratio_denominator = dqs::OptimalConvention::LossyEta1;
            } else {
                std::cerr << "error: unknown ratio denominator '" << denominator << "'\n";
                return dqs::kSpecError;
            }
            if (report == "full") {
                spec.report = dqs::SweepSpec::Report::Full;
            } else if (report == "photons") {
                spec.report = dqs::SweepSpec::Report::Photons;
            } else {
                std::cerr << "error: unknown report mode '" << report << "'\n";
                return dqs::kSpecError;
            }
            spec.validate();
            if (!dump_path.empty()) {
                std::ofstream out(dump_path, std::ios::binary);
                if (!out) {
                    std::cerr << "error: cannot write '" << dump_path << "'\n";
                    return dqs::kSpecError;
                }
                out << dqs::dump_spec(spec);
                return dqs::kOk;
            }
            const dqs::SweepResult result = dqs::run_sweep(spec, strict);
            return emit(spec, result, out_path, format, command);
        }

        if (*figure) {
            const dqs::SweepSpec spec = dqs::figure_spec(figure_name);
            const dqs::SweepResult result = dqs::run_sweep(spec, false);
            const std::string path = fig_out.empty()
                                         ? figure_name + (fig_format == "json" ? ".json" : ".csv")
                                         : fig_out;
            return emit(spec, result, path, fig_format, command);
        }

        if (*oracle) {
            if (all_presets) {
                preset_names = dqs::oracle_preset_names();
            } else if (preset_names.empty()) {
                preset_names = {"default"};
            }
            bool all_pass = true;
            for (const auto& name : preset_names) {
                dqs::OraclePreset preset = dqs::oracle_preset(name);
                if (tol_override > 0.0) {
                    preset.tol = tol_override;
                }
                if (cutoff_override > 0) {
                    preset.cutoff = cutoff_override;
                }
                const dqs::OracleCheckRow row = dqs::run_oracle_check(preset);
                all_pass = all_pass && row.pass;
                std::cout << (row.pass ? "[PASS] " : "[FAIL] ") << row.name
                          << ": max relative deviation mean=" << dqs::format_double(row.max_mean_deviation)
                          << " variance=" << dqs::format_double(row.max_variance_deviation)
                          << " error=" << dqs::format_double(row.max_error_deviation)
                          << " (tol " << dqs::format_double(row.tol) << ", cutoff "
                          << preset.cutoff << ")\n";
            }
            return all_pass ? dqs::kOk : dqs::kToleranceBreach;
        }
    } catch (const dqs::CutoffInsufficientError& e) {
        std::cerr << "error: cutoff insufficient: " << e.what() << '\n';
        return dqs::kCutoffInsufficient;
    } catch (const dqs::DegenerateScenarioError& e) {
        std::cerr << "error: degenerate scenario: " << e.what() << '\n';
        return dqs::kDegenerateEncountered;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return dqs::kSpecError;
    }
    return dqs::kOk;
}
