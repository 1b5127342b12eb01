#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dqs/protocols.hpp"

namespace dqs {

/// Process exit codes shared by the command-line front end.
enum ExitCode : int {
    kOk = 0,
    kSpecError = 2,
    kToleranceBreach = 3,
    kDegenerateEncountered = 4,
    kCutoffInsufficient = 5,
};

/// Parse one axis: a scalar ("1.5"), a comma list ("0,0.5,1"), an inclusive
/// linear range "start:stop:step" (endpoints within half a step), or a
/// log-spaced range "start:stop:countL".
std::vector<double> parse_axis(const std::string& text);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// Grid sweep over scenario parameters. Axes are materialized value lists;
/// rows are emitted in row-major order over (m, r, gain_db, x, ref, eta1, eta2).
struct SweepSpec {
    Scheme scheme = Scheme::SingleMode;
    std::vector<double> modes = {1.0};
    std::vector<double> r = {0.0};
    std::vector<double> gain_db = {0.0};
    std::vector<double> x = {0.0};
    std::vector<double> x0;  // exactly one of x0 / xm must be set
    std::vector<double> xm;
    std::vector<double> eta1 = {1.0};
    std::vector<double> eta2 = {1.0};
    OptimalConvention ratio_denominator = OptimalConvention::Lossless;
    enum class Report { Full, Photons } report = Report::Full;

    void validate() const;
    bool lossy() const;
    std::size_t grid_size() const;
};

struct ResultRow {
    std::string scheme;
    int m = 1;
    double r = 0.0;
    double gain_db = 0.0;
    double x = 0.0;
    double x0 = 0.0;
    double x_m = 0.0;
    double eta1 = 1.0;
    double eta2 = 1.0;
    double error = 0.0;
    double error_closed_form = 0.0;
    double optimal = 0.0;
    double ratio = 0.0;
    double mean_photons = 0.0;
    double ratio_lossless_opt = 0.0;
    double ratio_lossy_opt = 0.0;
    bool degenerate = false;
};

struct SweepResult {
    std::vector<ResultRow> rows;
    bool any_degenerate = false;
};

/// Evaluates the grid (in parallel, capped by DQS_THREADS) in deterministic
/// row order. With strict = true the first degenerate scenario throws.
SweepResult run_sweep(const SweepSpec& spec, bool strict = false);

/// CSV per RFC 4180 ('.' decimal, LF endings); the header row carries the
/// ResultRow field names, plus both ratio conventions when the sweep is lossy.
void write_csv(std::ostream& out, const SweepSpec& spec, const SweepResult& result);
void write_json(std::ostream& out, const SweepSpec& spec, const SweepResult& result);

/// Key-value serialization of a resolved spec; parse(dump(spec)) reproduces
/// the identical grid.
std::string dump_spec(const SweepSpec& spec);
SweepSpec parse_spec_text(const std::string& text);

/// Named figure-data presets (fig3a..fig6b) with the caption parameters baked in.
SweepSpec figure_spec(const std::string& name);
std::vector<std::string> figure_names();

/// Triple-route cross-check (engine vs closed form vs truncated basis).
struct OraclePreset {
    std::string name;
    SensingScenario scenario;
    int cutoff = 60;
    double tol = 1e-7;
};

OraclePreset oracle_preset(const std::string& name);
std::vector<std::string> oracle_preset_names();

struct OracleCheckRow {
    std::string name;
    double engine_mean = 0.0, engine_variance = 0.0, engine_error = 0.0;
    double closed_mean = 0.0, closed_variance = 0.0, closed_error = 0.0;
    double fock_mean = 0.0, fock_variance = 0.0, fock_error = 0.0;
    double max_mean_deviation = 0.0;      // max pairwise relative deviation
    double max_variance_deviation = 0.0;
    double max_error_deviation = 0.0;
    double tol = 0.0;
    bool pass = false;
};

OracleCheckRow run_oracle_check(const OraclePreset& preset);

/// Number of worker threads: DQS_THREADS when set (>= 1), else the hardware
/// concurrency.
int thread_budget();

/// Index-parallel loop with deterministic result placement.
void parallel_for_index(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace dqs
