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

#include "a2gs/calibration.hpp"
#include "a2gs/capture_file.hpp"
#include "a2gs/processing.hpp"
#include "a2gs/scenario.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace a2gs
{
    // Worker count: A2GS_THREADS if set (>= 1), otherwise the hardware concurrency.
    int thread_count();

    // Keeps the multi-megabyte per-snapshot matrices on the heap instead of fresh mmaps, which
    // otherwise page-fault on every snapshot. No-op outside glibc.
    void tune_allocator();

    // Runs body(i) for i in [0, n) on up to thread_count() workers. Each index is processed
    // exactly once; output order is the caller's responsibility (write into slot i).
    template <typename F>
    void parallel_for(std::size_t n, F &&body);

    // Paths seen by every port for a snapshot starting at time t. square_route advances the
    // TX through each port's switch slot t + k * t_siso; hover and static are frozen.
    std::vector<PathSet> snapshot_paths(const ScenarioConfig &config, const ArrayGeometry &geometry, double t);

    CaptureRecord synthesize_snapshot(const ScenarioConfig &config, const ArrayGeometry &geometry,
                                      const SystemResponse &system, double t, std::int64_t index);

    CaptureFile synthesize_capture(const ScenarioConfig &config);
    CaptureFile synthesize_b2b(const ScenarioConfig &config);

    // Calibrates every MEAS record against the mean of the B2B series.
    std::vector<CalibratedResponse> calibrate_capture(const CaptureFile &meas, const CaptureFile &b2b,
                                                      const AttenuatorModel &attenuator);
    CaptureFile to_capture_file(std::span<const CalibratedResponse> cal, const CaptureHeader &header);
    std::vector<CalibratedResponse> from_capture_file(const CaptureFile &file);

    std::vector<SnapshotMetrics> analyze_series(std::span<const CalibratedResponse> series, const ScenarioConfig &config,
                                                const AnalysisOptions &options = {});

    // CSV writers start with a "# a2gs config_hash=..." provenance line.
    void write_metrics_csv(std::ostream &out, std::span<const SnapshotMetrics> metrics, std::uint64_t config_hash);
    void write_route_csv(std::ostream &out, std::span<const RouteRow> rows, std::uint64_t config_hash);
    void write_stability_csv(std::ostream &out, const StabilityReport &report, std::uint64_t config_hash);

    // Means and stds per metric, laid out like the static/hover comparison table.
    nlohmann::json summarize(std::span<const SnapshotMetrics> metrics, const ScenarioConfig &config,
                             std::uint64_t source_config_hash);
}

#include "a2gs/detail/parallel.hpp"
