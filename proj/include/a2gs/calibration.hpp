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

#include "a2gs/capture_sim.hpp"
#include "a2gs/waveform.hpp"

#include <Eigen/Core>
#include <span>
#include <vector>

namespace a2gs
{
    // "Antenna + channel" transfer function H(f) per port (ports x tones).
    struct CalibratedResponse
    {
        Eigen::MatrixXcd h_f;
        double timestamp = 0.0;
        TxPose tx_pose;
        std::int64_t snapshot_index = 0;
    };

    // Reference tones below this many dB under the reference's median magnitude are rejected.
    inline constexpr double default_reference_floor_db = 120.0;

    // H(f) = Y_meas(f) / Y_ref(f) * G_att(f)
    // Validates the reference once and keeps G_att / Y_ref for a whole measurement series.
    class Calibrator
    {
    public:
        Calibrator(const CaptureRecord &ref, const AttenuatorModel &attenuator, const TonePlan &tones,
                   double reference_floor_db = default_reference_floor_db);

        CalibratedResponse operator()(const CaptureRecord &meas) const;

    private:
        Eigen::MatrixXcd factor_;
    };

    CalibratedResponse calibrate(const CaptureRecord &meas, const CaptureRecord &ref, const AttenuatorModel &attenuator,
                                 const TonePlan &tones, double reference_floor_db = default_reference_floor_db);

    // Element-wise mean of a series of B2B records; metadata of the first record is kept.
    CaptureRecord average_records(std::span<const CaptureRecord> records);

    struct StabilityReport
    {
        double amplitude_std_db = 0.0;
        double phase_std_deg = 0.0;
        std::vector<double> rel_amp_db;
        std::vector<double> rel_phase_deg;
    };

    // Per snapshot: c = mean over tones of tf / tf_first for the given port. Amplitude is
    // 20 log10 |c|, phase is arg c (unwrapped along the series). Stds are sample stds.
    StabilityReport stability_stats(std::span<const CaptureRecord> series, int port_id);
}
