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

#include "swapsim/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "swapsim/error.hpp"

namespace swapsim {

void ExperimentConfig::validate() const {
    auto check = [](bool ok, const std::string &what) {
        if (!ok) {
            fail(ErrorCode::Validation, what);
        }
    };
    try {
        source_a.mode.validate();
        source_b.mode.validate();
        pump.validate();
        feedforward.validate();
        analyzer.validate();
    } catch (const Error &e) {
        fail(ErrorCode::Validation, e.what());
    }
    for (const SourceConfig *s : {&source_a, &source_b}) {
        check(s->pair_probability >= 0.0 && s->pair_probability <= 0.5, "pair_probability must lie in [0, 0.5]");
    }
    check(std::isfinite(rep_rate) && rep_rate > 0.0, "rep_rate must be positive");
    for (double e : {detectors.bsm_efficiency, detectors.ab_efficiency}) {
        check(e >= 0.0 && e <= 1.0, "detector efficiencies must lie in [0, 1]");
    }
    for (double j : {detectors.bsm_jitter_fwhm, detectors.ab_jitter_fwhm}) {
        check(std::isfinite(j) && j >= 0.0, "detector jitter FWHM must be >= 0");
    }
    check(std::isfinite(coincidence_window) && coincidence_window > 0.0, "coincidence window must be positive");
    check(accepted_branches.phi_plus || accepted_branches.phi_minus, "at least one BSM branch must be accepted");
    check(mode_overlap >= 0.0 && mode_overlap <= 1.0, "mode_overlap must lie in [0, 1]");
}

namespace config {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void parse_error(const std::string &what) {
    fail(ErrorCode::ConfigParse, what);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string &key, const std::string &value) {
    double out = 0.0;
    const char *begin = value.data();
    const char *end = begin + value.size();
    if (!value.empty() && *begin == '+') {
        ++begin;
    }
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
        parse_error("key '" + key + "': '" + value + "' is not a finite number");
    }
    return out;
}

bool parse_bool(const std::string &key, const std::string &value) {
    if (value == "true" || value == "1" || value == "on" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "off" || value == "no") {
        return false;
    }
    parse_error("key '" + key + "': '" + value + "' is not a boolean");
}

std::string format_double(double v, int precision) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
    return std::string(buf, ptr);
}

// User unit to SI: si = user * mul / div. Powers of ten go in `div` so that
// "150" ns resolves to exactly the literal 150e-9.
struct Unit {
    double mul;
    double div;

    double to_si(double user) const {
        return user * mul / div;
    }
};

constexpr Unit kOne{1.0, 1.0};
constexpr Unit kNano{1.0, 1e9};
constexpr Unit kPico{1.0, 1e12};
constexpr Unit kCycles{kTwoPi, 1.0};
constexpr Unit kDegrees{std::numbers::pi, 180.0};

// Plain notation for ordinary magnitudes, shortest round-trip digits.
std::string format_plain(double v) {
    char buf[64];
    const double a = std::abs(v);
    const auto fmt = (a == 0.0 || (a >= 1e-4 && a < 1e15)) ? std::chars_format::fixed : std::chars_format::general;
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, fmt);
    return std::string(buf, ptr);
}

// Shortest decimal user value u that resolves to `si` exactly.
std::string format_scaled(double si, Unit unit) {
    const double user = si * unit.div / unit.mul;
    for (int p = 1; p <= 17; ++p) {
        const std::string s = format_double(user, p);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        if (unit.to_si(back) == si) {
            return format_plain(back);
        }
    }
    return format_plain(user);
}

struct NumberField {
    const char *key;
    Unit unit;
    std::function<double &(ExperimentConfig &)> ref;
};

const std::vector<NumberField> &number_fields() {
    static const std::vector<NumberField> fields = {
        {"coincidence_window_ns", kNano, [](ExperimentConfig &c) -> double & { return c.coincidence_window; }},
        {"detectors.ab_efficiency", kOne, [](ExperimentConfig &c) -> double & { return c.detectors.ab_efficiency; }},
        {"detectors.ab_jitter_fwhm_ps", kPico, [](ExperimentConfig &c) -> double & { return c.detectors.ab_jitter_fwhm; }},
        {"detectors.bsm_efficiency", kOne, [](ExperimentConfig &c) -> double & { return c.detectors.bsm_efficiency; }},
        {"detectors.bsm_jitter_fwhm_ps", kPico, [](ExperimentConfig &c) -> double & { return c.detectors.bsm_jitter_fwhm; }},
        {"feedforward.chain_latency_ns", kNano, [](ExperimentConfig &c) -> double & { return c.feedforward.chain_latency; }},
        {"feedforward.compensation_delay_ns", kNano,
         [](ExperimentConfig &c) -> double & { return c.feedforward.compensation_delay; }},
        {"feedforward.delta_omega_hz", kCycles, [](ExperimentConfig &c) -> double & { return c.feedforward.delta_omega_setting; }},
        {"feedforward.fixed_offset_ns", kNano, [](ExperimentConfig &c) -> double & { return c.feedforward.fixed_offset; }},
        {"feedforward.tac_range_ns", kNano, [](ExperimentConfig &c) -> double & { return c.feedforward.tac_range_max; }},
        {"feedforward.tac_resolution_ps", kPico, [](ExperimentConfig &c) -> double & { return c.feedforward.tac_resolution; }},
        {"mode_overlap", kOne, [](ExperimentConfig &c) -> double & { return c.mode_overlap; }},
        {"pump.width_ns", kNano, [](ExperimentConfig &c) -> double & { return c.pump.pulse_width; }},
        {"rep_rate_hz", kOne, [](ExperimentConfig &c) -> double & { return c.rep_rate; }},
        {"source_a.gamma_hz", kCycles, [](ExperimentConfig &c) -> double & { return c.source_a.mode.gamma; }},
        {"source_a.offset_hz", kCycles, [](ExperimentConfig &c) -> double & { return c.source_a.mode.omega_offset; }},
        {"source_a.pair_probability", kOne, [](ExperimentConfig &c) -> double & { return c.source_a.pair_probability; }},
        {"source_b.gamma_hz", kCycles, [](ExperimentConfig &c) -> double & { return c.source_b.mode.gamma; }},
        {"source_b.offset_hz", kCycles, [](ExperimentConfig &c) -> double & { return c.source_b.mode.omega_offset; }},
        {"source_b.pair_probability", kOne, [](ExperimentConfig &c) -> double & { return c.source_b.pair_probability; }},
    };
    return fields;
}

const NumberField *find_number(const std::string &key) {
    for (const auto &f : number_fields()) {
        if (key == f.key) {
            return &f;
        }
    }
    return nullptr;
}

const std::vector<std::string> kOtherKeys = {
    "analyzer.angle_a_deg", "analyzer.angle_b_deg", "analyzer.basis",        "bsm.accepted_branches",
    "bsm.frame_correction", "feedforward.delta_t_ns", "feedforward.enabled", "pump.shape",
    "sources.multipair",
};

bool is_known(const std::string &key) {
    if (find_number(key)) {
        return true;
    }
    for (const auto &k : kOtherKeys) {
        if (k == key) {
            return true;
        }
    }
    return false;
}

ExperimentConfig defaults() {
    ExperimentConfig c;
    c.source_a.mode = {kTwoPi * 5e6, 0.0};
    c.source_b.mode = {kTwoPi * 5e6, 0.0};
    return c;
}

std::string basis_name(const polarization::AnalyzerSetting &a) {
    using polarization::AnalyzerSetting;
    using polarization::Axis;
    if (a.circular) {
        return "rl";
    }
    if (a == AnalyzerSetting::for_axis(Axis::Z)) {
        return "hv";
    }
    if (a == AnalyzerSetting::for_axis(Axis::X)) {
        return "pm";
    }
    return "linear";
}

}  // namespace

ConfigText ConfigText::parse(std::string_view text) {
    ConfigText out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            parse_error("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty() || value.empty()) {
            parse_error("line " + std::to_string(line_no) + ": empty key or value");
        }
        if (!is_known(key)) {
            parse_error("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        out.entries_[key] = value;
    }
    return out;
}

void ConfigText::set(const std::string &key, const std::string &value) {
    if (!is_known(key)) {
        parse_error("unknown key '" + key + "'");
    }
    entries_[key] = std::string(trim(value));
}

void ConfigText::merge(const ConfigText &other) {
    for (const auto &[k, v] : other.entries_) {
        entries_[k] = v;
    }
}

const std::vector<std::string> &known_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto &f : number_fields()) {
            k.emplace_back(f.key);
        }
        k.insert(k.end(), kOtherKeys.begin(), kOtherKeys.end());
        std::sort(k.begin(), k.end());
        return k;
    }();
    return keys;
}

ExperimentConfig resolve(const ConfigText &text) {
    ExperimentConfig c = defaults();
    const auto &e = text.entries();
    auto get = [&](const std::string &key) -> const std::string * {
        auto it = e.find(key);
        return it == e.end() ? nullptr : &it->second;
    };

    for (const auto &f : number_fields()) {
        if (const std::string *v = get(f.key)) {
            f.ref(c) = f.unit.to_si(parse_number(f.key, *v));
        }
    }
    if (const std::string *v = get("pump.shape"); v && *v != "rectangular") {
        parse_error("key 'pump.shape': only 'rectangular' is supported");
    }
    if (const std::string *v = get("sources.multipair")) {
        c.multipair = parse_bool("sources.multipair", *v);
    }
    if (const std::string *v = get("feedforward.enabled")) {
        c.feedforward.enabled = parse_bool("feedforward.enabled", *v);
    }
    if (const std::string *v = get("bsm.frame_correction")) {
        c.frame_correction = parse_bool("bsm.frame_correction", *v);
    }
    if (const std::string *v = get("bsm.accepted_branches")) {
        if (*v == "phi+") {
            c.accepted_branches = {true, false};
        } else if (*v == "phi-") {
            c.accepted_branches = {false, true};
        } else if (*v == "both") {
            c.accepted_branches = {true, true};
        } else {
            parse_error("key 'bsm.accepted_branches': expected phi+, phi- or both");
        }
    }

    const std::string basis = get("analyzer.basis") ? *get("analyzer.basis") : "hv";
    using polarization::AnalyzerSetting;
    using polarization::Axis;
    if (basis == "hv") {
        c.analyzer = AnalyzerSetting::for_axis(Axis::Z);
    } else if (basis == "pm") {
        c.analyzer = AnalyzerSetting::for_axis(Axis::X);
    } else if (basis == "rl") {
        c.analyzer = AnalyzerSetting::for_axis(Axis::Y);
    } else if (basis == "linear") {
        c.analyzer = {};
        if (const std::string *v = get("analyzer.angle_a_deg")) {
            c.analyzer.angle_a = kDegrees.to_si(parse_number("analyzer.angle_a_deg", *v));
        }
        if (const std::string *v = get("analyzer.angle_b_deg")) {
            c.analyzer.angle_b = kDegrees.to_si(parse_number("analyzer.angle_b_deg", *v));
        }
    } else {
        parse_error("key 'analyzer.basis': expected hv, pm, rl or linear");
    }

    if (const std::string *v = get("feedforward.delta_t_ns")) {
        if (*v == "auto") {
            // Round-trip through the ns representation so dump() reproduces it.
            const std::string ns = format_double(feedforward::tuned_delta_t(c.feedforward) * 1e9, 17);
            c.feedforward.delta_t = kNano.to_si(parse_number("feedforward.delta_t_ns", ns));
        } else {
            c.feedforward.delta_t = kNano.to_si(parse_number("feedforward.delta_t_ns", *v));
        }
    }

    c.validate();
    return c;
}

std::string dump(const ExperimentConfig &cfg) {
    ExperimentConfig c = cfg;
    std::map<std::string, std::string> out;
    for (const auto &f : number_fields()) {
        out[f.key] = format_scaled(f.ref(c), f.unit);
    }
    out["analyzer.basis"] = basis_name(c.analyzer);
    out["analyzer.angle_a_deg"] = format_scaled(c.analyzer.angle_a, kDegrees);
    out["analyzer.angle_b_deg"] = format_scaled(c.analyzer.angle_b, kDegrees);
    out["bsm.accepted_branches"] =
        c.accepted_branches.phi_plus ? (c.accepted_branches.phi_minus ? "both" : "phi+") : "phi-";
    out["bsm.frame_correction"] = c.frame_correction ? "true" : "false";
    out["feedforward.delta_t_ns"] = format_scaled(c.feedforward.delta_t, kNano);
    out["feedforward.enabled"] = c.feedforward.enabled ? "true" : "false";
    out["pump.shape"] = "rectangular";
    out["sources.multipair"] = c.multipair ? "true" : "false";

    std::string text;
    for (const auto &[k, v] : out) {
        text += k;
        text += " = ";
        text += v;
        text += '\n';
    }
    return text;
}

std::uint64_t config_hash(const ExperimentConfig &cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::string> preset_names() {
    return {"ideal", "paper_40mhz", "paper_80mhz"};
}

ConfigText preset(std::string_view name) {
    // Identical, Fourier-limited sources with perfect detection.
    static constexpr std::string_view kIdeal = R"(
source_a.gamma_hz = 5e6
source_a.offset_hz = 0
source_a.pair_probability = 0.05
source_b.gamma_hz = 5e6
source_b.offset_hz = 0
source_b.pair_probability = 0.05
sources.multipair = false
pump.width_ns = 0.001
rep_rate_hz = 2e6
detectors.bsm_jitter_fwhm_ps = 0
detectors.bsm_efficiency = 1
detectors.ab_jitter_fwhm_ps = 0
detectors.ab_efficiency = 1
feedforward.enabled = false
feedforward.delta_omega_hz = 0
feedforward.delta_t_ns = auto
coincidence_window_ns = 300
analyzer.basis = pm
bsm.accepted_branches = phi+
mode_overlap = 1
)";
    // Measured cavity linewidths, 50 ns pump pulses at 2 MHz, 350 ps detectors.
    static constexpr std::string_view kDetunedCommon = R"(
source_a.gamma_hz = 4.2e6
source_a.pair_probability = 0.05
source_b.gamma_hz = 5.6e6
source_b.offset_hz = 0
source_b.pair_probability = 0.05
sources.multipair = true
pump.width_ns = 50
rep_rate_hz = 2e6
detectors.bsm_jitter_fwhm_ps = 350
detectors.bsm_efficiency = 0.6
detectors.ab_jitter_fwhm_ps = 350
detectors.ab_efficiency = 0.6
feedforward.enabled = true
feedforward.fixed_offset_ns = 150
feedforward.delta_t_ns = auto
feedforward.tac_range_ns = 300
feedforward.tac_resolution_ps = 0
feedforward.chain_latency_ns = 360
feedforward.compensation_delay_ns = 735
coincidence_window_ns = 300
analyzer.basis = pm
bsm.accepted_branches = phi+
mode_overlap = 0.93
)";
    ConfigText out;
    if (name == "ideal") {
        out = ConfigText::parse(kIdeal);
    } else if (name == "paper_40mhz" || name == "paper_80mhz") {
        out = ConfigText::parse(kDetunedCommon);
        const std::string mhz = name == "paper_40mhz" ? "40e6" : "80e6";
        out.set("source_a.offset_hz", mhz);
        out.set("feedforward.delta_omega_hz", mhz);
    } else {
        fail(ErrorCode::ConfigParse, "unknown preset '" + std::string(name) + "'");
    }
    return out;
}

ConfigText read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::Io, "cannot open config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ConfigText::parse(ss.str());
}

}  // namespace config
}  // namespace swapsim
