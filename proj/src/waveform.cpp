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

#include "a2gs/waveform.hpp"
#include "a2gs/error.hpp"

#include <cmath>
#include <sstream>

namespace a2gs
{
    Eigen::VectorXd TonePlan::frequencies() const
    {
        Eigen::VectorXd f(tone_count);
        for (int n = 0; n < tone_count; ++n)
            f(n) = frequency(n);
        return f;
    }

    void TonePlan::validate() const
    {
        require(tone_count >= 2, ErrorKind::invalid_argument, "tone_count must be at least 2");
        require(std::isfinite(tone_spacing) && tone_spacing > 0.0, ErrorKind::invalid_argument,
                "tone_spacing must be positive");
        require(std::isfinite(center_frequency) && center_frequency > occupied_bandwidth() / 2.0,
                ErrorKind::invalid_argument, "center_frequency must exceed half the occupied bandwidth");
        if (occupied_bandwidth() > nominal_bandwidth * (1.0 + 1e-12))
        {
            std::ostringstream msg;
            msg << "occupied bandwidth " << occupied_bandwidth() / 1e6 << " MHz exceeds the nominal "
                << nominal_bandwidth / 1e6 << " MHz";
            fail(ErrorKind::invalid_argument, msg.str());
        }
    }

    void TimingPlan::validate() const
    {
        require(t_siso > 0.0, ErrorKind::invalid_argument, "t_siso must be positive");
        require(ports_per_simo >= 1, ErrorKind::invalid_argument, "ports_per_simo must be at least 1");
        require(simos_per_burst >= 1, ErrorKind::invalid_argument, "simos_per_burst must be at least 1");
        require(burst_rate > 0.0, ErrorKind::invalid_argument, "burst_rate must be positive");
        require(double(simos_per_burst) * simo_duration() <= 1.0 / burst_rate,
                ErrorKind::invalid_argument, "a burst does not fit in its period (simos_per_burst * simo_duration > 1/burst_rate)");
    }

    TonePlan make_tone_plan(double center, double spacing, int count, double nominal_bandwidth)
    {
        TonePlan plan{center, spacing, count, nominal_bandwidth};
        plan.validate();
        return plan;
    }

    std::vector<double> snapshot_timestamps(const TimingPlan &timing, int burst_count)
    {
        timing.validate();
        require(burst_count >= 1, ErrorKind::invalid_argument, "burst_count must be at least 1");
        std::vector<double> out;
        out.reserve(std::size_t(burst_count) * std::size_t(timing.simos_per_burst));
        const double simo = timing.simo_duration();
        for (int b = 0; b < burst_count; ++b)
            for (int j = 0; j < timing.simos_per_burst; ++j)
                out.push_back(double(b) / timing.burst_rate + double(j) * simo);
        return out;
    }
}
