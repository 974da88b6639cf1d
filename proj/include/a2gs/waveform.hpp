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

#include <Eigen/Core>
#include <vector>

namespace a2gs
{
    inline constexpr double speed_of_light = 299792458.0;

    // Frequency grid of the sounding signal. Tones are centered on the carrier with
    // symmetric indexing: f_n = fc + (n - (N-1)/2) * df.
    struct TonePlan
    {
        double center_frequency = 3.5e9;
        double tone_spacing = 20e3;
        int tone_count = 1841;
        double nominal_bandwidth = 46e6;

        double frequency(int n) const
        {
            return center_frequency + (double(n) - 0.5 * double(tone_count - 1)) * tone_spacing;
        }

        // Offset of tone n from the first tone, n * df.
        double baseband_offset(int n) const { return double(n) * tone_spacing; }

        Eigen::VectorXd frequencies() const;

        double occupied_bandwidth() const { return double(tone_count) * tone_spacing; }
        double delay_resolution() const { return 1.0 / occupied_bandwidth(); }
        double max_unambiguous_delay() const { return 1.0 / tone_spacing; }
        double wavelength() const { return speed_of_light / center_frequency; }

        void validate() const;

        bool operator==(const TonePlan &) const = default;
    };

    // Switching schedule of the receive array.
    struct TimingPlan
    {
        double t_siso = 50e-6;
        int ports_per_simo = 128;
        int simos_per_burst = 3;
        double burst_rate = 20.0;

        double simo_duration() const { return t_siso * double(ports_per_simo); }

        void validate() const;

        bool operator==(const TimingPlan &) const = default;
    };

    TonePlan make_tone_plan(double center, double spacing, int count, double nominal_bandwidth = 46e6);

    // Start time of every SIMO snapshot: b / burst_rate + j * simo_duration.
    std::vector<double> snapshot_timestamps(const TimingPlan &timing, int burst_count);
}
