#include "dqs/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "dqs/closed_form.hpp"
#include "dqs/fock.hpp"

namespace dqs {

namespace {

using ordered_json = nlohmann::ordered_json;

double parse_double(const std::string& text) {
    double value = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || result.ptr != end) {
        throw std::invalid_argument("cannot parse number: '" + text + "'");
    }
    return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string::size_type pos = 0;
    while (true) {
        const auto next = text.find(sep, pos);
        if (next == std::string::npos) {
            parts.push_back(text.substr(pos));
            return parts;
        }
        parts.push_back(text.substr(pos, next - pos));
        pos = next + 1;
    }
}

const char* report_name(SweepSpec::Report report) {
    return report == SweepSpec::Report::Full ? "full" : "photons";
}

const char* convention_name(OptimalConvention convention) {
    return convention == OptimalConvention::Lossless ? "lossless-opt" : "lossy-opt";
}

}  // namespace

std::vector<double> parse_axis(const std::string& text) {
    if (text.empty()) {
        throw std::invalid_argument("empty axis specification");
    }
    if (text.find(':') == std::string::npos) {
        std::vector<double> values;
        for (const auto& part : split(text, ',')) {
            values.push_back(parse_double(part));
        }
        return values;
    }
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
        throw std::invalid_argument("range must be start:stop:step or start:stop:countL");
    }
    const double start = parse_double(parts[0]);
    const double stop = parse_double(parts[1]);
    std::string third = parts[2];
    const bool log_spaced = !third.empty() && (third.back() == 'L' || third.back() == 'l');
    if (log_spaced) {
        third.pop_back();
        const double count_d = parse_double(third);
        const int count = static_cast<int>(count_d);
        if (count < 2 || count_d != count) {
            throw std::invalid_argument("log range needs an integer count >= 2");
        }
        if (start <= 0.0 || stop <= 0.0) {
            throw std::invalid_argument("log range endpoints must be positive");
        }
        std::vector<double> values(count);
        const double ls = std::log(start);
        const double le = std::log(stop);
        for (int i = 0; i < count; ++i) {
            values[i] = std::exp(ls + (le - ls) * i / (count - 1));
        }
        values.front() = start;
        values.back() = stop;
        return values;
    }
    const double step = parse_double(third);
    if (step <= 0.0) {
        throw std::invalid_argument("range step must be positive");
    }
    if (stop < start) {
        throw std::invalid_argument("range stop must be >= start");
    }
    std::vector<double> values;
    // Inclusive of the endpoint within half a step.
    const long long count = static_cast<long long>(std::floor((stop - start) / step + 0.5)) + 1;
    for (long long i = 0; i < count; ++i) {
        const double v = start + step * static_cast<double>(i);
        if (v > stop + 0.5 * step) {
            break;
        }
        values.push_back(v);
    }
    return values;
}

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

void SweepSpec::validate() const {
    const auto nonempty = [](const std::vector<double>& axis, const char* name) {
        if (axis.empty()) {
            throw std::invalid_argument(std::string("axis '") + name + "' is empty");
        }
    };
    nonempty(modes, "m");
    nonempty(r, "r");
    nonempty(gain_db, "gain_db");
    nonempty(x, "x");
    nonempty(eta1, "eta1");
    nonempty(eta2, "eta2");
    if (x0.empty() == xm.empty()) {
        throw std::invalid_argument("exactly one of x0 / xm must be given");
    }
    if (scheme == Scheme::Weighted) {
        throw std::invalid_argument("sweeps cover the single/scheme1/scheme2 pipelines");
    }
    for (double m : modes) {
        if (m < 1.0 || m != std::floor(m)) {
            throw std::invalid_argument("mode counts must be positive integers");
        }
        if (scheme == Scheme::SingleMode && m != 1.0) {
            throw std::invalid_argument("single-mode sweeps require m = 1");
        }
    }
}

bool SweepSpec::lossy() const {
    const auto below_one = [](const std::vector<double>& axis) {
        return std::any_of(axis.begin(), axis.end(), [](double v) { return v < 1.0; });
    };
    return below_one(eta1) || below_one(eta2);
}

std::size_t SweepSpec::grid_size() const {
    const std::vector<double>& ref = x0.empty() ? xm : x0;
    return modes.size() * r.size() * gain_db.size() * x.size() * ref.size() *
           eta1.size() * eta2.size();
}

int thread_budget() {
    if (const char* env = std::getenv("DQS_THREADS")) {
        const int requested = std::atoi(env);
        if (requested >= 1) {
            return requested;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for_index(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const int workers = std::min<std::size_t>(thread_budget(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    return;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

SweepResult run_sweep(const SweepSpec& spec, bool strict) {
    spec.validate();
    const bool use_x0 = !spec.x0.empty();
    const std::vector<double>& ref = use_x0 ? spec.x0 : spec.xm;

    struct Dims {
        std::size_t m, r, g, x, ref, e1, e2;
    } n{spec.modes.size(), spec.r.size(),    spec.gain_db.size(), spec.x.size(),
        ref.size(),        spec.eta1.size(), spec.eta2.size()};

    SweepResult result;
    result.rows.resize(spec.grid_size());
    std::atomic<bool> any_degenerate{false};

    parallel_for_index(result.rows.size(), [&](std::size_t index) {
        std::size_t rest = index;
        const std::size_t i2 = rest % n.e2; rest /= n.e2;
        const std::size_t i1 = rest % n.e1; rest /= n.e1;
        const std::size_t iref = rest % n.ref; rest /= n.ref;
        const std::size_t ix = rest % n.x; rest /= n.x;
        const std::size_t ig = rest % n.g; rest /= n.g;
        const std::size_t ir = rest % n.r; rest /= n.r;
        const std::size_t im = rest;

        ResultRow row;
        row.scheme = to_string(spec.scheme);
        row.m = static_cast<int>(spec.modes[im]);
        row.r = spec.r[ir];
        row.gain_db = spec.gain_db[ig];
        row.x = spec.x[ix];
        row.eta1 = spec.eta1[i1];
        row.eta2 = spec.eta2[i2];
        const double rm = closed_form::gain_db_to_rm(row.gain_db);
        const RefDisplacement rd =
            use_x0 ? ref_x0(ref[iref]) : ref_xm(ref[iref]);

        SensingScenario scenario;
        switch (spec.scheme) {
            case Scheme::SingleMode:
                scenario = make_single_mode(row.r, rm, row.x, rd, row.eta1, row.eta2);
                break;
            case Scheme::Scheme1:
                scenario = make_scheme1(row.m, row.r, rm, row.x, rd, row.eta1, row.eta2);
                break;
            case Scheme::Scheme2:
                scenario = make_scheme2(row.m, row.r, rm, row.x, rd, row.eta1, row.eta2);
                break;
            case Scheme::Weighted:
                break;  // rejected by validate()
        }
        row.x_m = scenario.ref_displacement;
        row.x0 = scenario.x0();
        try {
            const SensitivityReport rep = evaluate(scenario, spec.ratio_denominator);
            row.error = rep.error_engine;
            row.error_closed_form = rep.error_closed_form.value_or(
                std::numeric_limits<double>::quiet_NaN());
            row.optimal = rep.optimal;
            row.ratio = rep.ratio;
            row.mean_photons = rep.mean_photons;
            row.ratio_lossless_opt = rep.error_engine / rep.optimal_lossless;
            row.ratio_lossy_opt = rep.error_engine / rep.optimal_lossy;
        } catch (const DegenerateScenarioError&) {
            if (strict) {
                throw;
            }
            row.degenerate = true;
            row.optimal = closed_form::optimal_bound(row.r, row.m, row.eta1);
            any_degenerate.store(true);
        }
        result.rows[index] = std::move(row);
    });
    result.any_degenerate = any_degenerate.load();
    return result;
}

namespace {

std::vector<std::string> column_names(const SweepSpec& spec) {
    std::vector<std::string> cols = {"scheme", "M",    "r",    "gain_db", "x",
                                     "x0",     "x_m",  "eta1", "eta2"};
    if (spec.report == SweepSpec::Report::Photons) {
        cols.push_back("mean_photons");
        return cols;
    }
    cols.insert(cols.end(), {"error", "error_closed_form", "optimal", "ratio",
                             "mean_photons"});
    if (spec.lossy()) {
        cols.insert(cols.end(), {"ratio_lossless_opt", "ratio_lossy_opt"});
    }
    return cols;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string cell(const ResultRow& row, const std::string& column) {
    const bool deg = row.degenerate;
    if (column == "scheme") return row.scheme;
    if (column == "M") return std::to_string(row.m);
    if (column == "r") return format_double(row.r);
    if (column == "gain_db") return format_double(row.gain_db);
    if (column == "x") return format_double(row.x);
    if (column == "x0") return format_double(row.x0);
    if (column == "x_m") return format_double(row.x_m);
    if (column == "eta1") return format_double(row.eta1);
    if (column == "eta2") return format_double(row.eta2);
    if (column == "optimal") return format_double(row.optimal);
    if (deg) return "degenerate";
    if (column == "error") return format_double(row.error);
    if (column == "error_closed_form") return format_double(row.error_closed_form);
    if (column == "ratio") return format_double(row.ratio);
    if (column == "mean_photons") return format_double(row.mean_photons);
    if (column == "ratio_lossless_opt") return format_double(row.ratio_lossless_opt);
    if (column == "ratio_lossy_opt") return format_double(row.ratio_lossy_opt);
    throw std::logic_error("unknown column " + column);
}

}  // namespace

void write_csv(std::ostream& out, const SweepSpec& spec, const SweepResult& result) {
    const auto cols = column_names(spec);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out << (c ? "," : "") << csv_quote(cols[c]);
    }
    out << '\n';
    for (const auto& row : result.rows) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out << (c ? "," : "") << csv_quote(cell(row, cols[c]));
        }
        out << '\n';
    }
}

void write_json(std::ostream& out, const SweepSpec& spec, const SweepResult& result) {
    const auto cols = column_names(spec);
    ordered_json rows = ordered_json::array();
    for (const auto& row : result.rows) {
        ordered_json obj;
        for (const auto& col : cols) {
            if (col == "scheme") {
                obj[col] = row.scheme;
            } else if (col == "M") {
                obj[col] = row.m;
            } else {
                const std::string value = cell(row, col);
                if (value == "degenerate") {
                    obj[col] = value;
                } else {
                    obj[col] = parse_double(value);
                }
            }
        }
        rows.push_back(std::move(obj));
    }
    out << rows.dump(2) << '\n';
}

std::string dump_spec(const SweepSpec& spec) {
    spec.validate();
    std::ostringstream out;
    const auto axis = [&](const char* name, const std::vector<double>& values) {
        if (values.empty()) {
            return;
        }
        out << name << '=';
        for (std::size_t i = 0; i < values.size(); ++i) {
            out << (i ? "," : "") << format_double(values[i]);
        }
        out << '\n';
    };
    out << "scheme=" << to_string(spec.scheme) << '\n';
    axis("m", spec.modes);
    axis("r", spec.r);
    axis("gain_db", spec.gain_db);
    axis("x", spec.x);
    axis("x0", spec.x0);
    axis("xm", spec.xm);
    axis("eta1", spec.eta1);
    axis("eta2", spec.eta2);
    out << "ratio_denominator=" << convention_name(spec.ratio_denominator) << '\n';
    out << "report=" << report_name(spec.report) << '\n';
    return out.str();
}

SweepSpec parse_spec_text(const std::string& text) {
    SweepSpec spec;
    spec.x0.clear();
    spec.xm.clear();
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("spec line is not key=value: '" + line + "'");
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "scheme") {
            spec.scheme = scheme_from_string(value);
        } else if (key == "m") {
            spec.modes = parse_axis(value);
        } else if (key == "r") {
            spec.r = parse_axis(value);
        } else if (key == "gain_db") {
            spec.gain_db = parse_axis(value);
        } else if (key == "x") {
            spec.x = parse_axis(value);
        } else if (key == "x0") {
            spec.x0 = parse_axis(value);
        } else if (key == "xm") {
            spec.xm = parse_axis(value);
        } else if (key == "eta1") {
            spec.eta1 = parse_axis(value);
        } else if (key == "eta2") {
            spec.eta2 = parse_axis(value);
        } else if (key == "ratio_denominator") {
            if (value == "lossless-opt") {
                spec.ratio_denominator = OptimalConvention::Lossless;
            } else if (value == "lossy-opt") {
                spec.ratio_denominator = OptimalConvention::LossyEta1;
            } else {
                throw std::invalid_argument("unknown ratio denominator: " + value);
            }
        } else if (key == "report") {
            if (value == "full") {
                spec.report = SweepSpec::Report::Full;
            } else if (value == "photons") {
                spec.report = SweepSpec::Report::Photons;
            } else {
                throw std::invalid_argument("unknown report mode: " + value);
            }
        } else {
            throw std::invalid_argument("unknown spec key: " + key);
        }
    }
    spec.validate();
    return spec;
}

SweepSpec figure_spec(const std::string& name) {
    SweepSpec spec;
    spec.x0.clear();
    const double g50 = 50.0;
    if (name == "fig3a") {
        spec.scheme = Scheme::SingleMode;
        spec.r = {0.5, 1.0, 1.5, 2.0};
        spec.gain_db = parse_axis("0:60:0.5");
        spec.x = {0.01};
        spec.x0 = {1.0};
    } else if (name == "fig3b") {
        spec.scheme = Scheme::SingleMode;
        spec.r = parse_axis("0:3:0.05");
        spec.gain_db = {g50};
        spec.x = {0.01};
        spec.x0 = parse_axis("0:5:0.05");
    } else if (name == "fig3c") {
        spec.scheme = Scheme::SingleMode;
        spec.r = parse_axis("0:3:0.05");
        spec.gain_db = {g50};
        spec.x = parse_axis("-0.05:0.05:0.001");
        spec.x0 = {1.0};
        spec.report = SweepSpec::Report::Photons;
    } else if (name == "fig5a" || name == "fig5c") {
        spec.scheme = name == "fig5a" ? Scheme::Scheme1 : Scheme::Scheme2;
        spec.modes = {10.0};
        spec.r = parse_axis("0:3:0.05");
        spec.gain_db = {g50};
        spec.x = {0.01};
        spec.x0 = parse_axis("0:5:0.05");
    } else if (name == "fig5b" || name == "fig5d") {
        spec.scheme = name == "fig5b" ? Scheme::Scheme1 : Scheme::Scheme2;
        spec.modes = {10.0};
        spec.r = parse_axis("0:3:0.05");
        spec.gain_db = {g50};
        spec.x = parse_axis("-0.05:0.05:0.001");
        spec.x0 = {2.5};
        spec.report = SweepSpec::Report::Photons;
    } else if (name == "fig6a" || name == "fig6b") {
        spec.scheme = name == "fig6a" ? Scheme::Scheme1 : Scheme::Scheme2;
        spec.modes = {10.0};
        spec.r = {1.0};
        spec.gain_db = {g50};
        spec.x = {0.01};
        spec.x0 = {2.5};
        spec.eta1 = parse_axis("0.1:1:0.025");
        spec.eta2 = parse_axis("0.1:1:0.025");
        spec.ratio_denominator = OptimalConvention::LossyEta1;
    } else {
        std::ostringstream msg;
        msg << "unknown figure '" << name << "'; valid names:";
        for (const auto& valid : figure_names()) {
            msg << ' ' << valid;
        }
        throw std::invalid_argument(msg.str());
    }
    spec.validate();
    return spec;
}

std::vector<std::string> figure_names() {
    return {"fig3a", "fig3b", "fig3c", "fig5a", "fig5b", "fig5c", "fig5d",
            "fig6a", "fig6b"};
}

OraclePreset oracle_preset(const std::string& name) {
    OraclePreset preset;
    preset.name = name;
    if (name == "default") {
        preset.scenario = make_single_mode(0.2, 0.5, 0.1, ref_xm(1.0));
        preset.cutoff = 60;
        preset.tol = 1e-7;
    } else if (name == "lossy") {
        preset.scenario = make_single_mode(0.2, 0.5, 0.1, ref_xm(1.0), 0.6, 0.8);
        preset.cutoff = 60;
        preset.tol = 1e-6;
    } else if (name == "scheme1-m2") {
        preset.scenario = make_scheme1(2, 0.2, 0.4, 0.05, ref_xm(0.8));
        preset.cutoff = 30;
        preset.tol = 1e-6;
    } else if (name == "scheme2-m2") {
        preset.scenario = make_scheme2(2, 0.2, 0.4, 0.05, ref_xm(0.8));
        preset.cutoff = 30;
        preset.tol = 1e-6;
    } else if (name == "scheme2-m2-lossy") {
        preset.scenario = make_scheme2(2, 0.3, 0.6, 0.1, ref_xm(0.9), 0.8, 0.9);
        preset.cutoff = 36;
        preset.tol = 1e-6;
    } else {
        std::ostringstream msg;
        msg << "unknown oracle preset '" << name << "'; valid names:";
        for (const auto& valid : oracle_preset_names()) {
            msg << ' ' << valid;
        }
        throw std::invalid_argument(msg.str());
    }
    return preset;
}

std::vector<std::string> oracle_preset_names() {
    return {"default", "lossy", "scheme1-m2", "scheme2-m2", "scheme2-m2-lossy"};
}

namespace {

closed_form::Moments closed_route_moments(const SensingScenario& s) {
    const double r = s.probe_squeeze;
    const double rm = s.opa_gain_param;
    switch (s.scheme) {
        case Scheme::Scheme2:
            return closed_form::scheme2_moments(r, rm, s.signal, s.ref_displacement,
                                                s.modes, s.eta1, s.eta2);
        case Scheme::Scheme1: {
            closed_form::Moments m = closed_form::single_mode_moments(
                r, rm, s.signal, s.ref_displacement, s.eta1, s.eta2);
            m.derivative *= std::sqrt(static_cast<double>(s.modes));
            return m;
        }
        case Scheme::SingleMode:
        case Scheme::Weighted:
            return closed_form::single_mode_moments(r, rm, s.signal, s.ref_displacement,
                                                    s.eta1, s.eta2);
    }
    throw std::logic_error("unreachable");
}

double max_pairwise_deviation(double a, double b, double c) {
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (scale == 0.0) {
        return 0.0;
    }
    const double lo = std::min({a, b, c});
    const double hi = std::max({a, b, c});
    return (hi - lo) / scale;
}

}  // namespace

OracleCheckRow run_oracle_check(const OraclePreset& preset) {
    OracleCheckRow row;
    row.name = preset.name;
    row.tol = preset.tol;

    const SensitivityReport engine = evaluate(preset.scenario);
    row.engine_mean = engine.first_moment;
    row.engine_variance = engine.variance;
    row.engine_error = engine.error_engine;

    const closed_form::Moments closed = closed_route_moments(preset.scenario);
    row.closed_mean = closed.mean;
    row.closed_variance = closed.variance;
    row.closed_error = closed.variance / (closed.derivative * closed.derivative);

    const FockEvaluation fock = fock_evaluate(preset.scenario, preset.cutoff);
    row.fock_mean = fock.mean;
    row.fock_variance = fock.variance;
    row.fock_error = fock.error;

    row.max_mean_deviation =
        max_pairwise_deviation(row.engine_mean, row.closed_mean, row.fock_mean);
    row.max_variance_deviation = max_pairwise_deviation(
        row.engine_variance, row.closed_variance, row.fock_variance);
    row.max_error_deviation =
        max_pairwise_deviation(row.engine_error, row.closed_error, row.fock_error);
    row.pass = row.max_mean_deviation <= preset.tol &&
               row.max_variance_deviation <= preset.tol &&
               row.max_error_deviation <= preset.tol;
    return row;
}

}  // namespace dqs
