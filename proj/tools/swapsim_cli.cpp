// Copyright 2026 The swapsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end of libswapsim. Links only the C API.

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "swapsim/swapsim.h"

namespace {

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitUsage = 2,
    kExitConfig = 3,
    kExitIo = 4,
    kExitValidation = 5,
};

// Carries an exit code out of a subcommand.
struct CliFailure {
    int code;
};

int exit_code_for(swapsim_status st) {
    switch (st) {
        case SWAPSIM_OK:
            return kExitOk;
        case SWAPSIM_ERR_INVALID_ARGUMENT:
            return kExitUsage;
        case SWAPSIM_ERR_CONFIG_PARSE:
            return kExitConfig;
        case SWAPSIM_ERR_IO:
            return kExitIo;
        case SWAPSIM_ERR_VALIDATION:
            return kExitValidation;
        default:
            return kExitInternal;
    }
}

void check(swapsim_status st) {
    if (st != SWAPSIM_OK) {
        std::fprintf(stderr, "swapsim: %s\n", swapsim_last_error());
        throw CliFailure{exit_code_for(st)};
    }
}

[[noreturn]] void usage_error(const std::string &msg) {
    std::fprintf(stderr, "swapsim: %s\n", msg.c_str());
    throw CliFailure{kExitUsage};
}

struct ConfigHandle {
    swapsim_config *cfg = nullptr;
    ConfigHandle() = default;
    ConfigHandle(const ConfigHandle &) = delete;
    ConfigHandle &operator=(const ConfigHandle &) = delete;
    ~ConfigHandle() {
        swapsim_config_destroy(cfg);
    }
};

struct LogHandle {
    swapsim_event_log *log = nullptr;
    LogHandle() = default;
    LogHandle(const LogHandle &) = delete;
    LogHandle &operator=(const LogHandle &) = delete;
    ~LogHandle() {
        swapsim_log_destroy(log);
    }
};

struct SweepHandle {
    swapsim_sweep *sweep = nullptr;
    SweepHandle() = default;
    SweepHandle(const SweepHandle &) = delete;
    SweepHandle &operator=(const SweepHandle &) = delete;
    ~SweepHandle() {
        swapsim_sweep_destroy(sweep);
    }
};

struct CommonOptions {
    std::string config_path;
    std::string preset;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::uint64_t pulses = 1000000;
    unsigned jobs = 1;
    std::string out;
};

// Preset, then file, then --set overrides. A config file without --preset
// starts from the built-in defaults.
void load_config(const CommonOptions &o, ConfigHandle &h) {
    const char *preset = nullptr;
    if (!o.preset.empty()) {
        preset = o.preset.c_str();
    } else if (o.config_path.empty()) {
        preset = "paper_40mhz";
    }
    check(swapsim_config_create(preset, &h.cfg));
    if (!o.config_path.empty()) {
        check(swapsim_config_merge_file(h.cfg, o.config_path.c_str()));
    }
    for (const auto &kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            usage_error("--set expects key=value, got '" + kv + "'");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        check(swapsim_config_set(h.cfg, trim(kv.substr(0, eq)).c_str(), trim(kv.substr(eq + 1)).c_str()));
    }
    check(swapsim_config_resolve(h.cfg));
}

std::string config_dump(ConfigHandle &h) {
    std::size_t needed = 0;
    swapsim_config_dump(h.cfg, nullptr, 0, &needed);
    std::string text(needed, '\0');
    check(swapsim_config_dump(h.cfg, text.data(), text.size(), &needed));
    text.resize(needed - 1);
    return text;
}

std::string config_value(ConfigHandle &h, const char *key) {
    std::size_t needed = 0;
    swapsim_config_get(h.cfg, key, nullptr, 0, &needed);
    std::string value(needed, '\0');
    check(swapsim_config_get(h.cfg, key, value.data(), value.size(), &needed));
    value.resize(needed - 1);
    return value;
}

std::uint64_t config_hash(ConfigHandle &h) {
    std::uint64_t hash = 0;
    check(swapsim_config_hash(h.cfg, &hash));
    return hash;
}

std::uint64_t pick_seed(const CommonOptions &o) {
    if (o.seed) {
        return *o.seed;
    }
    const std::uint64_t s = swapsim_random_seed();
    std::fprintf(stderr, "swapsim: no --seed given, using seed = %" PRIu64 "\n", s);
    return s;
}

double parse_double(std::string_view s, const std::string &what) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
        usage_error("cannot parse " + what + " '" + std::string(s) + "'");
    }
    return v;
}

// "a,b,c" or "start:stop:step" (stop included), values in ns; returns seconds.
std::vector<double> parse_points(const std::string &text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::size_t pos = 0;
        while (true) {
            const auto next = text.find(':', pos);
            parts.push_back(parse_double(std::string_view(text).substr(pos, next - pos), "--points"));
            if (next == std::string::npos) {
                break;
            }
            pos = next + 1;
        }
        if (parts.size() != 3 || parts[2] <= 0.0 || parts[1] < parts[0]) {
            usage_error("--points range must be start:stop:step with step > 0 and stop >= start");
        }
        const auto n = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
        for (long i = 0; i <= n; ++i) {
            out.push_back((parts[0] + static_cast<double>(i) * parts[2]) * 1e-9);
        }
        return out;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto next = text.find(',', pos);
        if (next == std::string::npos) {
            next = text.size();
        }
        const auto item = std::string_view(text).substr(pos, next - pos);
        if (!item.empty()) {
            out.push_back(parse_double(item, "--points") * 1e-9);
        }
        pos = next + 1;
    }
    if (out.empty()) {
        usage_error("--points is empty");
    }
    return out;
}

// Accepts fs, ps, ns suffixes; a bare number is in ps. Returns seconds.
double parse_duration(const std::string &text) {
    struct Unit {
        std::string_view suffix;
        double scale;
    };
    static constexpr Unit kUnits[] = {{"fs", 1e-15}, {"ps", 1e-12}, {"ns", 1e-9}};
    std::string_view s = text;
    double scale = 1e-12;
    for (const auto &u : kUnits) {
        if (s.size() > u.suffix.size() && s.substr(s.size() - u.suffix.size()) == u.suffix) {
            s.remove_suffix(u.suffix.size());
            scale = u.scale;
            break;
        }
    }
    return parse_double(s, "jitter FWHM") * scale;
}

std::string format_frequency(double hz) {
    static constexpr std::pair<double, const char *> kUnits[] = {{1e12, "THz"}, {1e9, "GHz"}, {1e6, "MHz"}};
    char buf[64];
    for (const auto &[scale, name] : kUnits) {
        if (hz >= scale) {
            std::snprintf(buf, sizeof buf, "%.4g %s", hz / scale, name);
            return buf;
        }
    }
    std::snprintf(buf, sizeof buf, "%.4g Hz", hz);
    return buf;
}

void print_estimate(std::FILE *f, const char *key, const swapsim_estimate &e) {
    std::fprintf(f, "%s = %.6f\n%s_std_error = %.6f\n%s_n_events = %" PRIu64 "\n", key, e.value, key, e.std_error,
                 key, e.n_events);
}

int cmd_simulate(const CommonOptions &o) {
    ConfigHandle h;
    load_config(o, h);
    const std::uint64_t seed = pick_seed(o);
    const std::string out = o.out.empty() ? "events.csv" : o.out;

    LogHandle log;
    check(swapsim_simulate(h.cfg, o.pulses, seed, o.jobs, &log.log));
    check(swapsim_log_write(log.log, out.c_str()));

    swapsim_run_counts counts{};
    check(swapsim_log_counts(log.log, &counts));
    char axis = 0;
    check(swapsim_log_axis(log.log, &axis));

    std::string summary;
    char line[256];
    std::snprintf(line, sizeof line,
                  "pulses = %" PRIu64 "\naccepted = %" PRIu64 "\nclipped = %" PRIu64 "\nbackground = %" PRIu64 "\n",
                  counts.pulses, counts.accepted, counts.clipped, counts.background);
    summary += line;
    if (axis != 0 && counts.accepted > 0) {
        swapsim_estimate e{};
        check(swapsim_estimate_correlator(log.log, axis, &e));
        std::snprintf(line, sizeof line,
                      "correlator_axis = %c\ncorrelator = %.6f\ncorrelator_std_error = %.6f\n", axis, e.value,
                      e.std_error);
    } else if (axis != 0) {
        std::snprintf(line, sizeof line, "correlator_axis = %c\ncorrelator = n/a\n", axis);
    } else {
        std::snprintf(line, sizeof line, "correlator_axis = none\ncorrelator = n/a\n");
    }
    summary += line;

    const std::string manifest_path = out == "-" ? std::string() : out + ".manifest";
    std::string manifest;
    manifest += "tool = swapsim\n";
    manifest += std::string("version = ") + swapsim_version() + "\n";
    manifest += "subcommand = simulate\n";
    manifest += "config_path = " + o.config_path + "\n";
    manifest += "preset = " + (o.preset.empty() && o.config_path.empty() ? std::string("paper_40mhz") : o.preset) +
                "\n";
    std::snprintf(line, sizeof line, "seed = %" PRIu64 "\nconfig_hash = %016" PRIx64 "\n", seed, config_hash(h));
    manifest += line;
    manifest += "output = " + out + "\n";
    manifest += summary;
    manifest += "\n[config]\n" + config_dump(h);

    if (!manifest_path.empty()) {
        std::ofstream mf(manifest_path, std::ios::binary);
        mf << manifest;
        mf.flush();
        if (!mf) {
            std::fprintf(stderr, "swapsim: failed writing '%s'\n", manifest_path.c_str());
            return kExitIo;
        }
        std::fprintf(out == "-" ? stderr : stdout, "manifest = %s\n", manifest_path.c_str());
    }
    std::FILE *sf = out == "-" ? stderr : stdout;
    std::fprintf(sf, "seed = %" PRIu64 "\n%s", seed, summary.c_str());
    return kExitOk;
}

int cmd_sweep(const CommonOptions &o, const std::string &kind, const std::string &points, const std::string &basis) {
    ConfigHandle h;
    if (kind != "window" && kind != "deltat") {
        usage_error("--sweep must be window or deltat");
    }
    const auto values = parse_points(points);
    load_config(o, h);
    if (!basis.empty()) {
        check(swapsim_config_set(h.cfg, "analyzer.basis", basis.c_str()));
        check(swapsim_config_resolve(h.cfg));
    }
    const std::uint64_t seed = pick_seed(o);

    SweepHandle s;
    if (kind == "window") {
        check(swapsim_sweep_window(h.cfg, values.data(), values.size(), o.pulses, seed, o.jobs, &s.sweep));
    } else {
        check(swapsim_sweep_delta_t(h.cfg, values.data(), values.size(), o.pulses, seed, o.jobs, &s.sweep));
    }
    check(swapsim_sweep_write_csv(s.sweep, o.out.empty() ? "-" : o.out.c_str()));
    std::fprintf(stderr, "swapsim: seed = %" PRIu64 ", %zu points\n", seed, values.size());

    // Fringe fit for a delta_t sweep with active compensation.
    if (kind == "deltat" && values.size() >= 4 && config_value(h, "feedforward.enabled") == "true") {
        const double dw = 2.0 * std::numbers::pi *
                          parse_double(config_value(h, "feedforward.delta_omega_hz"), "delta_omega_hz");
        if (dw > 0.0) {
            swapsim_fringe_fit fit{};
            if (swapsim_sweep_fit_fringe(s.sweep, 0.5 * dw, 2.0 * dw, &fit) == SWAPSIM_OK) {
                std::fprintf(stderr, "swapsim: fringe period = %.4f ns, amplitude = %.4f\n", fit.period * 1e9,
                             fit.amplitude);
            }
        }
    }
    return kExitOk;
}

int cmd_witness(const CommonOptions &o) {
    ConfigHandle h;
    load_config(o, h);
    const std::uint64_t seed = pick_seed(o);
    swapsim_witness_report r{};
    check(swapsim_run_witness(h.cfg, o.pulses, seed, o.jobs, &r));
    std::printf("seed = %" PRIu64 "\nconfig_hash = %016" PRIx64 "\n", seed, config_hash(h));
    print_estimate(stdout, "Cx", r.correlators[0]);
    print_estimate(stdout, "Cy", r.correlators[1]);
    print_estimate(stdout, "Cz", r.correlators[2]);
    print_estimate(stdout, "W", r.witness);
    std::printf("verdict = %s\n", r.entangled ? "entangled" : "not demonstrated");
    return kExitOk;
}

int cmd_limits(const std::vector<std::string> &fwhms, double floor) {
    if (fwhms.empty()) {
        usage_error("--jitter-fwhm needs at least one value");
    }
    std::vector<double> values;
    for (const auto &f : fwhms) {
        const double v = parse_duration(f);
        if (!(v > 0.0)) {
            usage_error("jitter FWHM must be positive, got '" + f + "'");
        }
        values.push_back(v);
    }
    std::printf("# criterion = exp(-(dw sigma_c)^2 / 2) >= floor, sigma_c = sqrt(2) FWHM / 2.3548 (reconstructed)\n");
    std::printf("# floor = %g\n", floor);
    std::printf("jitter_fwhm_ps,delta_omega_max_hz,readable\n");
    for (double v : values) {
        double dw = 0.0;
        check(swapsim_jitter_limit(v, floor, &dw));
        const double hz = dw / (2.0 * std::numbers::pi);
        std::printf("%.6f,%.6e,%s\n", v * 1e12, hz, format_frequency(hz).c_str());
    }
    return kExitOk;
}

int cmd_oracle_check(const CommonOptions &o) {
    ConfigHandle h;
    load_config(o, h);
    const std::uint64_t seed = pick_seed(o);
    swapsim_oracle_report r{};
    check(swapsim_oracle_check(h.cfg, o.pulses, seed, o.jobs, &r));
    std::printf("seed = %" PRIu64 "\nconfig_hash = %016" PRIx64 "\n", seed, config_hash(h));
    for (const auto &a : r.axes) {
        std::printf("%c.monte_carlo = %.6f\n%c.oracle = %.6f\n%c.std_error = %.6f\n%c.n_events = %" PRIu64
                    "\n%c.deviation = %.6f\n%c.ratio = %.3f\n%c.pass = %s\n",
                    a.axis, a.monte_carlo, a.axis, a.oracle, a.axis, a.std_error, a.axis, a.n_events, a.axis,
                    a.deviation, a.axis, a.ratio, a.axis, a.pass ? "true" : "false");
    }
    std::printf("result = %s\n", r.pass ? "pass" : "fail");
    return r.pass ? kExitOk : kExitValidation;
}

int cmd_dump_config(const CommonOptions &o) {
    ConfigHandle h;
    load_config(o, h);
    const std::string text = config_dump(h);
    if (o.out.empty() || o.out == "-") {
        std::fputs(text.c_str(), stdout);
        return kExitOk;
    }
    std::ofstream f(o.out, std::ios::binary);
    f << text;
    f.flush();
    if (!f) {
        std::fprintf(stderr, "swapsim: failed writing '%s'\n", o.out.c_str());
        return kExitIo;
    }
    return kExitOk;
}

void add_config_options(CLI::App *cmd, CommonOptions &o) {
    cmd->add_option("config,--config,-c", o.config_path, "Configuration file (key = value)");
    cmd->add_option("--preset,-p", o.preset, "Base preset: ideal, paper_40mhz, paper_80mhz");
    cmd->add_option("--set,-s", o.sets, "Override one key, key=value (repeatable)")->allow_extra_args(false);
}

void add_run_options(CLI::App *cmd, CommonOptions &o) {
    // Integral values in scientific notation (1e9) are rewritten to plain digits.
    cmd->add_option("--pulses,-n", o.pulses, "Pump pulses per run, e.g. 1000000 or 1e9")
        ->transform([](std::string v) {
            double x = 0.0;
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec == std::errc() && ptr == v.data() + v.size() && x >= 1.0 && x < 9.2e18 && std::floor(x) == x) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.0f", x);
                return std::string(buf);
            }
            return v;
        })
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Master seed (random and printed if omitted)");
    cmd->add_option("--jobs,-j", o.jobs, "Worker threads, 0 = all cores; output does not depend on it");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Simulator of entanglement swapping between photons of different colors"};
    app.set_version_flag("--version", std::string(swapsim_version()));
    app.require_subcommand(1);

    CommonOptions o;
    std::string sweep_kind;
    std::string points;
    std::string basis;
    std::vector<std::string> fwhms;
    double floor = 0.71;

    auto *simulate = app.add_subcommand("simulate", "Run the Monte Carlo and write the event log");
    add_config_options(simulate, o);
    add_run_options(simulate, o);
    simulate->add_option("--out,-o", o.out, "Event log path, '-' for stdout (default events.csv)");

    auto *sweep = app.add_subcommand("sweep", "Visibility against the coincidence window or delta_t");
    add_config_options(sweep, o);
    add_run_options(sweep, o);
    sweep->add_option("--sweep", sweep_kind, "window or deltat")->required();
    sweep->add_option("--points", points, "Values in ns: a,b,c or start:stop:step")->required();
    sweep->add_option("--basis", basis, "Analyzer basis: hv, pm or rl (default: from config)");
    sweep->add_option("--out,-o", o.out, "CSV path (default stdout)");

    auto *witness = app.add_subcommand("witness", "Correlators on x, y, z and the witness value");
    add_config_options(witness, o);
    add_run_options(witness, o);

    auto *limits = app.add_subcommand("limits", "Jitter-limited maximal frequency separation");
    limits->add_option("--jitter-fwhm", fwhms, "Per-detector FWHM, e.g. 350ps, 30ps, 150fs")->required()->delimiter(',');
    limits->add_option("--floor", floor, "Visibility floor in (0, 1)");

    auto *oracle = app.add_subcommand("oracle-check", "Monte Carlo against the quadrature oracle");
    add_config_options(oracle, o);
    add_run_options(oracle, o);

    auto *dump = app.add_subcommand("dump-config", "Print the resolved canonical configuration");
    add_config_options(dump, o);
    dump->add_option("--out,-o", o.out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            return cmd_simulate(o);
        }
        if (sweep->parsed()) {
            return cmd_sweep(o, sweep_kind, points, basis);
        }
        if (witness->parsed()) {
            return cmd_witness(o);
        }
        if (limits->parsed()) {
            return cmd_limits(fwhms, floor);
        }
        if (oracle->parsed()) {
            return cmd_oracle_check(o);
        }
        if (dump->parsed()) {
            return cmd_dump_config(o);
        }
    } catch (const CliFailure &f) {
        return f.code;
    }
    return kExitUsage;
}
