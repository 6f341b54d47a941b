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

#include "swapsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <thread>
#include <tuple>

#include "swapsim/config_io.hpp"
#include "swapsim/error.hpp"
#include "swapsim/feedforward.hpp"

namespace swapsim::engine {

namespace {

using modes::BsmBranch;
using polarization::TwoQubitDensity;

struct BlockResult {
    std::vector<FourfoldEvent> events;
    std::uint64_t clipped = 0;
    std::uint64_t background = 0;
};

// Number of pairs given at least one, capped at two: triple emission is not
// modeled.
int sample_pairs_given_any(double mean, Rng &rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double u = u01(rng);
    const double p1 = mean * std::exp(-mean) / -std::expm1(-mean);
    return u < p1 ? 1 : 2;
}

struct PairPhotons {
    PbsPhoton bsm;
    double true_time = 0.0;
    bool herald_detected = false;  // partner A or B photon
};

class BlockSimulator {
   public:
    BlockSimulator(const ExperimentConfig &cfg, const modes::CoherenceTable &table)
        : cfg_(cfg), table_(table), sigma_(jitter_sigma(cfg.detectors.bsm_jitter_fwhm)) {
        const double any_a = -std::expm1(-cfg.source_a.pair_probability);
        const double any_b = -std::expm1(-cfg.source_b.pair_probability);
        both_emit_ = any_a * any_b;
    }

    BlockResult run(std::uint64_t first, std::uint64_t last, std::uint64_t seed) const {
        BlockResult out;
        if (both_emit_ <= 0.0) {
            return out;
        }
        Rng rng(seed);
        std::geometric_distribution<std::uint64_t> skip(std::min(both_emit_, 1.0));
        std::uint64_t pulse = first;
        while (true) {
            // Only pulses where both sources fire can yield a four-fold.
            pulse += both_emit_ >= 1.0 ? 0 : skip(rng);
            if (pulse >= last) {
                break;
            }
            simulate_pulse(pulse, rng, out);
            ++pulse;
        }
        return out;
    }

   private:
    PairPhotons emit(const SourceConfig &src, Rng &rng) const {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::exponential_distribution<double> decay(src.mode.gamma);
        PairPhotons p;
        const double emission = u01(rng) * cfg_.pump.pulse_width;
        p.bsm.port = u01(rng) < 0.5 ? 1 : 2;
        p.bsm.detected = u01(rng) < cfg_.detectors.bsm_efficiency;
        p.true_time = emission + decay(rng);
        p.bsm.measured_time = p.true_time;
        if (sigma_ > 0.0) {
            std::normal_distribution<double> jitter(0.0, sigma_);
            p.bsm.measured_time += jitter(rng);
        }
        p.herald_detected = u01(rng) < cfg_.detectors.ab_efficiency;
        return p;
    }

    void simulate_pulse(std::uint64_t pulse, Rng &rng, BlockResult &out) const {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        int n_a = 1;
        int n_b = 1;
        if (cfg_.multipair) {
            n_a = sample_pairs_given_any(cfg_.source_a.pair_probability, rng);
            n_b = sample_pairs_given_any(cfg_.source_b.pair_probability, rng);
            if (n_a == 2 && n_b == 2) {
                return;
            }
        }

        std::vector<PairPhotons> pairs;
        pairs.reserve(3);
        bool herald_a = false;
        bool herald_b = false;
        for (int k = 0; k < n_a; ++k) {
            pairs.push_back(emit(cfg_.source_a, rng));
            herald_a |= pairs.back().herald_detected;
        }
        for (int k = 0; k < n_b; ++k) {
            pairs.push_back(emit(cfg_.source_b, rng));
            herald_b |= pairs.back().herald_detected;
        }
        std::vector<PbsPhoton> photons;
        photons.reserve(pairs.size());
        for (auto &p : pairs) {
            p.bsm.polarizer_sign = u01(rng) < 0.5 ? 1 : -1;
            photons.push_back(p.bsm);
        }
        const double outcome_draw = u01(rng);

        const auto accepted = bsm_accept(photons, cfg_.coincidence_window);
        if (!accepted || !herald_a || !herald_b || !cfg_.accepted_branches.contains(accepted->branch)) {
            return;
        }

        const PairPhotons &d1 = pairs[accepted->port1_index];
        const PairPhotons &d2 = pairs[accepted->port2_index];
        FourfoldEvent ev;
        ev.pulse_index = pulse;
        ev.true_t1 = d1.true_time;
        ev.true_t2 = d2.true_time;
        ev.measured_t1 = d1.bsm.measured_time;
        ev.measured_t2 = d2.bsm.measured_time;
        ev.bsm_branch = accepted->branch;
        ev.event_class = (n_a == 1 && n_b == 1) ? EventClass::Signal : EventClass::MultipairBackground;

        double phase = 0.0;
        if (cfg_.feedforward.enabled) {
            const auto tac = feedforward::tac_convert(ev.measured_t1 - ev.measured_t2, cfg_.feedforward);
            phase = feedforward::pockels_phase(tac.value, cfg_.feedforward);
            ev.clipped = tac.clipped;
        }
        if (cfg_.frame_correction && ev.bsm_branch == BsmBranch::PhiPlus) {
            phase += std::numbers::pi;
        }
        ev.pockels_phase_applied = phase;

        if (ev.event_class == EventClass::Signal) {
            TwoQubitDensity rho = modes::conditional_swap_state(ev.true_t1, ev.true_t2, cfg_.source_a.mode,
                                                                cfg_.source_b.mode, ev.bsm_branch);
            const double coherence = table_(ev.true_t1, ev.true_t2) * cfg_.mode_overlap;
            rho = polarization::dephase_vv_hh(rho, std::clamp(coherence, 0.0, 1.0));
            rho = polarization::apply_phase_on_A(rho, phase);
            const auto probs = polarization::outcome_probabilities(rho, cfg_.analyzer);
            int k = 0;
            double acc = probs[0];
            while (k < 3 && outcome_draw >= acc) {
                acc += probs[++k];
            }
            ev.outcome_a = k < 2 ? 1 : -1;
            ev.outcome_b = k % 2 == 0 ? 1 : -1;
        } else {
            std::tie(ev.outcome_a, ev.outcome_b) = sample_background_outcome(cfg_.analyzer, rng);
            ++out.background;
        }
        if (ev.clipped) {
            ++out.clipped;
        }
        out.events.push_back(ev);
    }

    const ExperimentConfig &cfg_;
    const modes::CoherenceTable &table_;
    double sigma_;
    double both_emit_ = 0.0;
};

}  // namespace

double jitter_sigma(double fwhm) {
    return fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
}

std::shared_ptr<const modes::CoherenceTable> make_table(const ExperimentConfig &cfg) {
    return std::make_shared<const modes::CoherenceTable>(cfg.pump, cfg.source_a.mode, cfg.source_b.mode);
}

EventLog run_experiment(const ExperimentConfig &cfg, std::uint64_t n_pulses, std::uint64_t seed,
                        const RunOptions &opts) {
    require(n_pulses > 0, "run_experiment needs at least one pulse");
    cfg.validate();

    auto table = opts.table;
    if (!table || !table->matches(cfg.pump, cfg.source_a.mode, cfg.source_b.mode)) {
        table = make_table(cfg);
    }

    const std::uint64_t n_blocks = (n_pulses + kBlockPulses - 1) / kBlockPulses;
    std::vector<BlockResult> results(n_blocks);
    const BlockSimulator sim(cfg, *table);

    unsigned jobs = opts.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.jobs;
    jobs = static_cast<unsigned>(std::min<std::uint64_t>(jobs, n_blocks));
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t b = next++; b < n_blocks; b = next++) {
            const std::uint64_t first = b * kBlockPulses;
            const std::uint64_t last = std::min(n_pulses, first + kBlockPulses);
            results[b] = sim.run(first, last, derive_seed(seed, b));
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(jobs);
        for (unsigned j = 0; j < jobs; ++j) {
            threads.emplace_back(worker);
        }
    }

    EventLog log;
    log.config = cfg;
    log.seed = seed;
    log.counts.pulses = n_pulses;
    std::size_t total = 0;
    for (const auto &r : results) {
        total += r.events.size();
    }
    log.events.reserve(total);
    for (auto &r : results) {
        log.events.insert(log.events.end(), r.events.begin(), r.events.end());
        log.counts.clipped += r.clipped;
        log.counts.background += r.background;
    }
    log.counts.accepted = log.events.size();
    return log;
}

std::optional<BsmAcceptance> bsm_accept(std::span<const PbsPhoton> photons, double window) {
    std::optional<std::size_t> port1, port2;
    for (std::size_t i = 0; i < photons.size(); ++i) {
        const PbsPhoton &p = photons[i];
        if (!p.detected) {
            continue;
        }
        auto &slot = p.port == 1 ? port1 : port2;
        if (slot) {
            return std::nullopt;
        }
        slot = i;
    }
    if (!port1 || !port2) {
        return std::nullopt;
    }
    const PbsPhoton &a = photons[*port1];
    const PbsPhoton &b = photons[*port2];
    if (std::abs(a.measured_time - b.measured_time) > window) {
        return std::nullopt;
    }
    const BsmBranch branch = a.polarizer_sign == b.polarizer_sign ? BsmBranch::PhiPlus : BsmBranch::PhiMinus;
    return BsmAcceptance{branch, *port1, *port2};
}

std::pair<int, int> sample_background_outcome(const polarization::AnalyzerSetting &, Rng &rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int a = u01(rng) < 0.5 ? 1 : -1;
    const int b = u01(rng) < 0.5 ? 1 : -1;
    return {a, b};
}

void write_event_log(const EventLog &log, std::ostream &out) {
    char line[256];
    std::snprintf(line, sizeof line,
                  "# swapsim event log config_hash=%016" PRIx64 " seed=%" PRIu64 " pulses=%" PRIu64 " accepted=%" PRIu64
                  " clipped=%" PRIu64 " background=%" PRIu64 "\n",
                  config::config_hash(log.config), log.seed, log.counts.pulses, log.counts.accepted,
                  log.counts.clipped, log.counts.background);
    out << line;
    out << "pulse_index,true_t1_ns,true_t2_ns,measured_t1_ns,measured_t2_ns,branch,class,phase_rad,outcome_A,outcome_B\n";
    for (const auto &ev : log.events) {
        // Assumes the "C" numeric locale.
        std::snprintf(line, sizeof line, "%" PRIu64 ",%.6f,%.6f,%.6f,%.6f,%s,%s,%.6f,%d,%d\n", ev.pulse_index,
                      ev.true_t1 * 1e9, ev.true_t2 * 1e9, ev.measured_t1 * 1e9, ev.measured_t2 * 1e9,
                      ev.bsm_branch == BsmBranch::PhiPlus ? "phi+" : "phi-",
                      ev.event_class == EventClass::Signal ? "signal" : "background", ev.pockels_phase_applied,
                      ev.outcome_a, ev.outcome_b);
        out << line;
    }
}

void write_event_log(const EventLog &log, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
    }
    write_event_log(log, out);
    out.flush();
    if (!out) {
        fail(ErrorCode::Io, "failed writing '" + path + "'");
    }
}

}  // namespace swapsim::engine
