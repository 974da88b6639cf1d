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

#include "a2gs/pipeline.hpp"
#include "a2gs/error.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <ostream>
#include <thread>

#ifdef __GLIBC__
#include <malloc.h>
#endif

namespace a2gs
{
    using nlohmann::json;

    void tune_allocator()
    {
#ifdef __GLIBC__
        mallopt(M_MMAP_THRESHOLD, 256 << 20);
        mallopt(M_TRIM_THRESHOLD, 1024 << 20);
#endif
    }

    int thread_count()
    {
        int hw = int(std::thread::hardware_concurrency());
        if (hw < 1)
            hw = 1;
        if (const char *env = std::getenv("A2GS_THREADS"))
        {
            const int cap = std::atoi(env);
            if (cap >= 1)
                return std::min(cap, hw);
        }
        return hw;
    }

    std::vector<PathSet> snapshot_paths(const ScenarioConfig &config, const ArrayGeometry &geometry, double t)
    {
        const double wavelength = config.tones.wavelength();
        if (config.trajectory.kind != TrajectoryKind::square_route)
            return {synthesize_paths(config.scene, tx_pose_at(config.trajectory, t), wavelength)};

        std::vector<PathSet> out;
        out.reserve(std::size_t(geometry.port_count()));
        for (int k = 0; k < geometry.port_count(); ++k)
            out.push_back(synthesize_paths(config.scene, tx_pose_at(config.trajectory, t + double(k) * config.timing.t_siso),
                                           wavelength));
        return out;
    }

    CaptureRecord synthesize_snapshot(const ScenarioConfig &config, const ArrayGeometry &geometry,
                                      const SystemResponse &system, double t, std::int64_t index)
    {
        const std::vector<PathSet> paths = snapshot_paths(config, geometry, t);
        const NoiseSpec noise{config.capture.noise, config.capture.snr_db, config.capture.seed};
        CaptureRecord rec = simulate_snapshot(paths, geometry, config.tones, system, noise, index);
        rec.timestamp = t;
        rec.tx_pose = tx_pose_at(config.trajectory, t);
        return rec;
    }

    CaptureFile synthesize_capture(const ScenarioConfig &config)
    {
        config.validate();
        const ArrayGeometry geometry = config.geometry();
        const SystemResponse system = make_system_response(config.system, config.tones, geometry.port_count());
        const std::vector<double> times = config.timestamps();

        CaptureFile f;
        f.header = {RecordType::meas, config_hash(config), geometry_hash(config.array), geometry.port_count(), config.tones};
        f.records.resize(times.size());
        parallel_for(times.size(), [&](std::size_t i) {
            f.records[i] = synthesize_snapshot(config, geometry, system, times[i], std::int64_t(i));
        });
        return f;
    }

    CaptureFile synthesize_b2b(const ScenarioConfig &config)
    {
        config.validate();
        const ArrayGeometry geometry = config.geometry();
        const SystemResponse system = make_system_response(config.system, config.tones, geometry.port_count());
        const NoiseSpec noise{config.capture.noise, config.capture.b2b_snr_db, config.capture.b2b_seed};

        CaptureFile f;
        f.header = {RecordType::b2b, config_hash(config), geometry_hash(config.array), geometry.port_count(), config.tones};
        f.records = simulate_b2b(config.tones, system, config.attenuator, config.capture.b2b_snapshots, noise);
        // Back-to-back snapshots run at the burst rate.
        for (auto &r : f.records)
            r.timestamp = double(r.snapshot_index) / config.timing.burst_rate;
        return f;
    }

    std::vector<CalibratedResponse> calibrate_capture(const CaptureFile &meas, const CaptureFile &b2b,
                                                      const AttenuatorModel &attenuator)
    {
        require(meas.header.type == RecordType::meas, ErrorKind::invalid_argument, "expected a MEAS capture");
        require(b2b.header.type == RecordType::b2b, ErrorKind::invalid_argument, "reference must be a B2B capture");
        require(meas.header.ports == b2b.header.ports && meas.header.tones == b2b.header.tones,
                ErrorKind::dimension_mismatch, "measurement and reference captures have different dimensions");
        const Calibrator cal(average_records(b2b.records), attenuator, meas.header.tones);
        std::vector<CalibratedResponse> out(meas.records.size());
        parallel_for(out.size(), [&](std::size_t i) { out[i] = cal(meas.records[i]); });
        return out;
    }

    CaptureFile to_capture_file(std::span<const CalibratedResponse> cal, const CaptureHeader &header)
    {
        CaptureFile f;
        f.header = header;
        f.header.type = RecordType::calibrated;
        for (const auto &c : cal)
        {
            CaptureRecord r;
            r.tf = c.h_f;
            r.timestamp = c.timestamp;
            r.tx_pose = c.tx_pose;
            r.snapshot_index = c.snapshot_index;
            r.snr_db = std::numeric_limits<double>::infinity();
            f.records.push_back(std::move(r));
        }
        return f;
    }

    std::vector<CalibratedResponse> from_capture_file(const CaptureFile &file)
    {
        require(file.header.type == RecordType::calibrated, ErrorKind::invalid_argument,
                "expected a calibrated (CAL) capture; run `calibrate` first or pass --ref");
        std::vector<CalibratedResponse> out;
        for (const auto &r : file.records)
            out.push_back({r.tf, r.timestamp, r.tx_pose, r.snapshot_index});
        return out;
    }

    std::vector<SnapshotMetrics> analyze_series(std::span<const CalibratedResponse> series, const ScenarioConfig &config,
                                                const AnalysisOptions &options)
    {
        const ArrayGeometry geometry = config.geometry();
        std::vector<SnapshotMetrics> out(series.size());
        parallel_for(series.size(), [&](std::size_t i) {
            out[i] = analyze_snapshot(series[i], config.tones, geometry, config.gate, options);
        });
        return out;
    }

    namespace
    {
        double db(double x) { return x > 0.0 ? 10.0 * std::log10(x) : -std::numeric_limits<double>::infinity(); }

        void provenance(std::ostream &out, std::uint64_t hash)
        {
            out << "# a2gs config_hash=" << hash_hex(hash) << '\n';
        }

        json stats(const std::vector<double> &values)
        {
            std::vector<double> v;
            for (double x : values)
                if (std::isfinite(x))
                    v.push_back(x);
            json j = {{"count", v.size()}};
            if (v.empty())
                return j;
            double mean = 0.0;
            for (double x : v)
                mean += x;
            mean /= double(v.size());
            double var = 0.0;
            for (double x : v)
                var += (x - mean) * (x - mean);
            j["mean"] = mean;
            j["std"] = v.size() > 1 ? std::sqrt(var / double(v.size() - 1)) : 0.0;
            return j;
        }
    }

    void write_metrics_csv(std::ostream &out, std::span<const SnapshotMetrics> metrics, std::uint64_t config_hash)
    {
        provenance(out, config_hash);
        out << "snapshot_index,timestamp,tx_x,tx_y,tx_z,p_rx,p_rx_db,strongest_port,sigma_tau_s,sigma_tau_dbs,"
               "single_bin,los_bin_power_db,gamma12_db,gamma14_db,eigen_span_db,e1,e2,e3,e4\n";
        out << std::setprecision(12);
        for (const auto &m : metrics)
        {
            const auto &p = m.tx_pose.position;
            out << m.snapshot_index << ',' << m.timestamp << ',' << p.x() << ',' << p.y() << ',' << p.z() << ','
                << m.p_rx << ',' << db(m.p_rx) << ',' << m.delay_spread.strongest_port << ','
                << m.delay_spread.seconds << ',' << m.delay_spread.dbs << ',' << int(m.delay_spread.single_bin) << ','
                << m.los_bin_power_db << ',' << m.eigen.gamma12_db << ',' << m.eigen.gamma14_db << ','
                << m.eigen.span_db;
            for (Eigen::Index i = 0; i < 4; ++i)
            {
                out << ',';
                if (i < m.eigen.eigenvalues.size())
                    out << m.eigen.eigenvalues(i);
            }
            out << '\n';
        }
    }

    void write_route_csv(std::ostream &out, std::span<const RouteRow> rows, std::uint64_t config_hash)
    {
        provenance(out, config_hash);
        const Eigen::Index columns = rows.empty() ? 0 : rows.front().metrics.column_power.rows();
        out << "index,timestamp,tx_x,tx_y,tx_z,p_rx_db,sigma_tau_dbs,gamma12_db,gamma14_db,argmax_v_column,argmax_h_column";
        for (const char *pol : {"v", "h"})
            for (Eigen::Index c = 0; c < columns; ++c)
                out << ',' << pol << c << "_db";
        out << '\n' << std::setprecision(12);
        for (const auto &r : rows)
        {
            const auto &m = r.metrics;
            out << r.index << ',' << r.timestamp << ',' << r.position.x() << ',' << r.position.y() << ','
                << r.position.z() << ',' << db(m.p_rx) << ',' << m.delay_spread.dbs << ',' << m.eigen.gamma12_db << ','
                << m.eigen.gamma14_db << ',' << r.argmax_v_column << ',' << r.argmax_h_column;
            for (int pol = 0; pol < 2; ++pol)
                for (Eigen::Index c = 0; c < columns; ++c)
                    out << ',' << m.column_power(c, pol);
            out << '\n';
        }
    }

    void write_stability_csv(std::ostream &out, const StabilityReport &report, std::uint64_t config_hash)
    {
        provenance(out, config_hash);
        out << "snapshot_index,rel_amp_db,rel_phase_deg\n" << std::setprecision(12);
        for (std::size_t i = 0; i < report.rel_amp_db.size(); ++i)
            out << i << ',' << report.rel_amp_db[i] << ',' << report.rel_phase_deg[i] << '\n';
        out << "# amplitude_std_db=" << report.amplitude_std_db << " phase_std_deg=" << report.phase_std_deg << '\n';
    }

    json summarize(std::span<const SnapshotMetrics> metrics, const ScenarioConfig &config, std::uint64_t source_config_hash)
    {
        std::vector<double> g12, g14, dbs, los, prx, span;
        for (const auto &m : metrics)
        {
            g12.push_back(m.eigen.gamma12_db);
            g14.push_back(m.eigen.gamma14_db);
            dbs.push_back(m.delay_spread.dbs);
            los.push_back(m.los_bin_power_db);
            prx.push_back(db(m.p_rx));
            span.push_back(m.eigen.span_db);
        }
        return {{"scenario", config.name},
                {"config_hash", hash_hex(source_config_hash)},
                {"snapshots", metrics.size()},
                {"metrics",
                 {{"gamma12_db", stats(g12)},
                  {"gamma14_db", stats(g14)},
                  {"sigma_tau_dbs", stats(dbs)},
                  {"los_bin_power_db", stats(los)},
                  {"p_rx_db", stats(prx)},
                  {"eigen_span_db", stats(span)}}},
                {"notes",
                 {{"frequency_expectation",
                   "R averages " + std::to_string(config.tones.tone_count) +
                       " tones; with a large coherence bandwidth the number of independent frequency samples is "
                       "small, so R reflects diversity rather than a full-rank correlation estimate"}}}};
    }
}
