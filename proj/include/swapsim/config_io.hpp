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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "swapsim/experiment_config.hpp"

namespace swapsim::config {

// Text configuration: one `dotted.key = value` per line, `#` starts a comment.
// Units are part of the key name (gamma_hz is gamma / 2 pi in Hz,
// width_ns is in nanoseconds, ...). Keys not given take the defaults of
// ExperimentConfig. `feedforward.delta_t_ns = auto` picks the knob value that
// makes the fixed part of the compensation phase a multiple of 2 pi.

/// Unresolved key = value entries, as written by the user.
class ConfigText {
   public:
    /// Throws Error(ConfigParse) on malformed lines or unknown keys.
    static ConfigText parse(std::string_view text);

    /// Later values override earlier ones. Throws Error(ConfigParse) on unknown keys.
    void set(const std::string &key, const std::string &value);
    void merge(const ConfigText &other);

    const std::map<std::string, std::string> &entries() const {
        return entries_;
    }

   private:
    std::map<std::string, std::string> entries_;
};

/// Every recognised key, in canonical order.
const std::vector<std::string> &known_keys();

/// Converts values to SI, resolves `auto`, validates. Throws Error(ConfigParse)
/// for unparsable values and Error(Validation) for out-of-range ones.
ExperimentConfig resolve(const ConfigText &text);

/// Canonical text of a resolved configuration: all keys, sorted, shortest
/// decimal that reproduces each value. Re-parses to an identical configuration.
std::string dump(const ExperimentConfig &cfg);

/// FNV-1a 64 of the canonical text; independent of key order in the source.
std::uint64_t config_hash(const ExperimentConfig &cfg);

std::vector<std::string> preset_names();
/// Built-in presets: `ideal`, `paper_40mhz`, `paper_80mhz`.
ConfigText preset(std::string_view name);

ConfigText read_file(const std::string &path);

}  // namespace swapsim::config
