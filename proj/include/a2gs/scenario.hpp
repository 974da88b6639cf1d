// SPDX-License-Identifier: Apache-2.0
//
// a2gs - air-to-ground switched-array channel sounder simulation and analysis
// Copyright (C) 2026 The a2gs authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "a2gs/array_geometry.hpp"
#include "a2gs/capture_sim.hpp"
#include "a2gs/channel_synth.hpp"
#include "a2gs/processing.hpp"
#include "a2gs/waveform.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace a2gs
{
    struct ArrayParams
    {
        int columns = 16;
        int rows = 4;
        double radius = 0.1091;
        double vertical_spacing = 0.0429;
        PatternParams pattern;
    };

    struct CaptureSettings
    {
        double snr_db = 30.0;
        bool noise = true;
        std::uint64_t seed = 7;
        int burst_count = 34;
        int burst_stride = 1; // capture every burst_stride-th burst
        int simos_used = 0;   // SIMO captures kept per burst, 0 keeps all
        double b2b_snr_db = 60.0;
        int b2b_snapshots = 20;
        std::uint64_t b2b_seed = 11;
    };

    struct ScenarioConfig
    {
        std::string name = "custom";
        TonePlan tones;
        TimingPlan timing;
        ArrayParams array;
        Scene scene;
        Trajectory trajectory;
        SystemParams system;
        AttenuatorModel attenuator;
        GateConfig gate;
        CaptureSettings capture;

        ArrayGeometry geometry() const;
        std::vector<double> timestamps() const;
        void validate() const;
    };

    // Named presets: "paper-static", "paper-hover", "paper-route".
    ScenarioConfig preset_scenario(std::string_view name);
    std::vector<std::string> preset_names();

    // Validates a JSON scenario document. Unknown keys are rejected; errors carry the field path.
    ScenarioConfig parse_scenario(const nlohmann::json &document);
    ScenarioConfig parse_scenario_text(std::string_view text);
    ScenarioConfig load_scenario(const std::string &path);

    // Fully expanded document; parse_scenario(scenario_to_json(c)) reproduces c.
    nlohmann::json scenario_to_json(const ScenarioConfig &config);
    nlohmann::json geometry_to_json(const ArrayParams &array);

    std::uint64_t fnv1a64(std::string_view bytes);
    std::uint64_t config_hash(const ScenarioConfig &config);
    std::uint64_t geometry_hash(const ArrayParams &array);
    std::string hash_hex(std::uint64_t hash);
}
