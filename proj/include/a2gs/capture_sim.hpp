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
#include "a2gs/channel_synth.hpp"
#include "a2gs/waveform.hpp"

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace a2gs
{
    struct SystemParams
    {
        double ripple_db = 1.5;           // peak magnitude ripple of the shared chain
        double port_gain_db = 2.0;        // per-port switch-path gains drawn in +-port_gain_db (<= 3)
        double phase_drift_deg = 0.0;     // per-snapshot phase jitter
        double amplitude_jitter_db = 0.0; // per-snapshot amplitude jitter
        std::uint64_t seed = 1;
        bool ideal = false; // unit chain and port gains

        void validate() const;
    };

    // Receiver chain: one shared downconversion response on the tone grid and a scalar gain
    // per switch path.
    struct SystemResponse
    {
        Eigen::VectorXcd common_chain;
        Eigen::VectorXcd per_port_gain;
        double phase_drift_deg = 0.0;
        double amplitude_jitter_db = 0.0;

        // Whole-snapshot drift factor, i.i.d. per (seed, snapshot).
        std::complex<double> drift(std::uint64_t seed, std::int64_t snapshot_index) const;
    };

    SystemResponse make_system_response(const SystemParams &params, const TonePlan &tones, int port_count);

    struct AttenuatorModel
    {
        double nominal_loss_db = 30.0;
        double ripple_db = 0.0;

        // G_att(f) on the tone grid.
        Eigen::VectorXcd response(const TonePlan &tones) const;
        void validate() const;
    };

    struct NoiseSpec
    {
        bool enabled = true;
        double snr_db = 30.0;
        std::uint64_t seed = 7;
    };

    // One SIMO snapshot; tf is ports x tones.
    struct CaptureRecord
    {
        double timestamp = 0.0;
        TxPose tx_pose;
        Eigen::MatrixXcd tf;
        double snr_db = 0.0;
        std::uint64_t seed = 0;
        std::int64_t snapshot_index = 0;
    };

    // Antenna + channel transfer function (ports x tones). paths_per_port holds either one
    // path set shared by all ports or one per port.
    Eigen::MatrixXcd antenna_channel_response(std::span<const PathSet> paths_per_port, const ArrayGeometry &geometry,
                                              const TonePlan &tones);

    CaptureRecord simulate_snapshot(std::span<const PathSet> paths_per_port, const ArrayGeometry &geometry,
                                    const TonePlan &tones, const SystemResponse &system, const NoiseSpec &noise,
                                    std::int64_t snapshot_index);

    std::vector<CaptureRecord> simulate_b2b(const TonePlan &tones, const SystemResponse &system,
                                            const AttenuatorModel &attenuator, int snapshot_count,
                                            const NoiseSpec &noise);

    // Complex AWGN keyed on (seed, snapshot, port, tone).
    void add_noise(Eigen::MatrixXcd &tf, const NoiseSpec &noise, std::int64_t snapshot_index);
}
