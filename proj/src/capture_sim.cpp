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

#include "a2gs/capture_sim.hpp"
#include "a2gs/detail/counter_rng.hpp"
#include "a2gs/error.hpp"

#include <boost/random/normal_distribution.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace a2gs
{
    namespace
    {
        constexpr std::uint64_t stream_chain = 0xC4A1;
        constexpr std::uint64_t stream_port = 0x9027;
        constexpr std::uint64_t stream_drift = 0xD21F;
        constexpr std::uint64_t stream_noise = 0x4E01;

        // Smooth random curve on [0, 1]: four cosines with random amplitude and phase,
        // scaled so that max |curve| = peak.
        Eigen::VectorXd smooth_curve(std::uint64_t key, int n, double peak)
        {
            Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
            if (peak == 0.0)
                return c;
            for (int m = 1; m <= 4; ++m)
            {
                const double amp = detail::uniform(detail::mix_key(key, std::uint64_t(m), 1)) / double(m);
                const double ph = 2.0 * std::numbers::pi * detail::uniform(detail::mix_key(key, std::uint64_t(m), 2));
                for (int i = 0; i < n; ++i)
                {
                    const double x = n > 1 ? double(i) / double(n - 1) : 0.0;
                    c(i) += amp * std::cos(2.0 * std::numbers::pi * double(m) * x + ph);
                }
            }
            return c * (peak / c.cwiseAbs().maxCoeff());
        }

        void check_paths(std::span<const PathSet> paths, int ports)
        {
            require(paths.size() == 1 || int(paths.size()) == ports, ErrorKind::dimension_mismatch,
                    "expected 1 or " + std::to_string(ports) + " path sets, got " + std::to_string(paths.size()));
            for (const auto &set : paths)
                for (const auto &p : set)
                    require(std::isfinite(p.delay) && p.jones_gain.allFinite() && p.arrival_direction.allFinite(),
                            ErrorKind::invalid_argument, "non-finite path parameters");
        }
    }

    void SystemParams::validate() const
    {
        require(ripple_db >= 0.0, ErrorKind::invalid_argument, "system.ripple_db must be non-negative");
        require(port_gain_db >= 0.0 && port_gain_db <= 3.0, ErrorKind::invalid_argument,
                "system.port_gain_db must lie in [0, 3]");
        require(phase_drift_deg >= 0.0 && amplitude_jitter_db >= 0.0, ErrorKind::invalid_argument,
                "system drift parameters must be non-negative");
    }

    std::complex<double> SystemResponse::drift(std::uint64_t seed, std::int64_t snapshot_index) const
    {
        if (phase_drift_deg == 0.0 && amplitude_jitter_db == 0.0)
            return 1.0;
        const auto [ga, gp] = detail::normal_pair(detail::mix_key(seed, stream_drift, std::uint64_t(snapshot_index)));
        const double mag = std::pow(10.0, amplitude_jitter_db * ga / 20.0);
        return std::polar(mag, phase_drift_deg * gp * std::numbers::pi / 180.0);
    }

    SystemResponse make_system_response(const SystemParams &params, const TonePlan &tones, int port_count)
    {
        params.validate();
        require(port_count >= 1, ErrorKind::invalid_argument, "port_count must be at least 1");
        SystemResponse s;
        s.phase_drift_deg = params.phase_drift_deg;
        s.amplitude_jitter_db = params.amplitude_jitter_db;
        const int n = tones.tone_count;
        if (params.ideal)
        {
            s.common_chain = Eigen::VectorXcd::Ones(n);
            s.per_port_gain = Eigen::VectorXcd::Ones(port_count);
            return s;
        }

        const Eigen::VectorXd mag_db = smooth_curve(detail::mix_key(params.seed, stream_chain, 1), n, params.ripple_db);
        const Eigen::VectorXd phase = smooth_curve(detail::mix_key(params.seed, stream_chain, 2), n, 0.5);
        // Bulk group delay of the chain, 0..200 ns.
        const double group_delay = 200e-9 * detail::uniform(detail::mix_key(params.seed, stream_chain, 3));
        s.common_chain.resize(n);
        for (int i = 0; i < n; ++i)
            s.common_chain(i) = std::polar(std::pow(10.0, mag_db(i) / 20.0),
                                           phase(i) - 2.0 * std::numbers::pi * tones.baseband_offset(i) * group_delay);

        s.per_port_gain.resize(port_count);
        for (int k = 0; k < port_count; ++k)
        {
            const double u = detail::uniform(detail::mix_key(params.seed, stream_port, std::uint64_t(k), 1));
            const double v = detail::uniform(detail::mix_key(params.seed, stream_port, std::uint64_t(k), 2));
            const double g_db = params.port_gain_db * (2.0 * u - 1.0);
            s.per_port_gain(k) = std::polar(std::pow(10.0, g_db / 20.0), 2.0 * std::numbers::pi * v);
        }
        return s;
    }

    void AttenuatorModel::validate() const
    {
        require(nominal_loss_db > 0.0, ErrorKind::invalid_argument, "attenuator loss must be positive (dB)");
        require(ripple_db >= 0.0, ErrorKind::invalid_argument, "attenuator ripple must be non-negative");
    }

    Eigen::VectorXcd AttenuatorModel::response(const TonePlan &tones) const
    {
        const int n = tones.tone_count;
        Eigen::VectorXcd g(n);
        for (int i = 0; i < n; ++i)
        {
            const double x = double(i) / double(n - 1);
            const double db = -nominal_loss_db + ripple_db * std::cos(2.0 * std::numbers::pi * 2.0 * x);
            g(i) = std::pow(10.0, db / 20.0);
        }
        return g;
    }

    Eigen::MatrixXcd antenna_channel_response(std::span<const PathSet> paths_per_port, const ArrayGeometry &geometry,
                                              const TonePlan &tones)
    {
        const int ports = geometry.port_count();
        const int n = tones.tone_count;
        check_paths(paths_per_port, ports);

        // One rotating phasor per (port, path); advancing all of them tone by tone keeps the
        // inner loop over contiguous ports.
        std::vector<Eigen::VectorXcd> z, step;
        const double f0 = tones.frequency(0);
        const double df = tones.tone_spacing;
        for (int k = 0; k < ports; ++k)
        {
            const PathSet &paths = paths_per_port.size() == 1 ? paths_per_port[0] : paths_per_port[std::size_t(k)];
            const Eigen::Vector3d &pos = geometry.ports[std::size_t(k)].position;
            for (std::size_t p = 0; p < paths.size(); ++p)
            {
                if (z.size() <= p)
                {
                    z.emplace_back(Eigen::VectorXcd::Zero(ports));
                    step.emplace_back(Eigen::VectorXcd::Ones(ports));
                }
                const PathComponent &path = paths[p];
                const std::complex<double> coef = port_gain(geometry, k, path.arrival_direction, path.jones_gain);
                // A plane wave from direction u reaches pos earlier by u.pos / c.
                const double tau = path.delay - path.arrival_direction.dot(pos) / speed_of_light;
                z[p](k) = coef * std::polar(1.0, -2.0 * std::numbers::pi * std::fmod(f0 * tau, 1.0));
                step[p](k) = std::polar(1.0, -2.0 * std::numbers::pi * df * tau);
            }
        }

        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(ports, n);
        for (int i = 0; i < n; ++i)
            for (std::size_t p = 0; p < z.size(); ++p)
            {
                h.col(i) += z[p];
                z[p] = z[p].cwiseProduct(step[p]);
            }
        return h;
    }

    void add_noise(Eigen::MatrixXcd &tf, const NoiseSpec &noise, std::int64_t snapshot_index)
    {
        if (!noise.enabled)
            return;
        const double peak = tf.cwiseAbs2().rowwise().mean().maxCoeff();
        const double variance = peak / std::pow(10.0, noise.snr_db / 10.0);
        const double scale = std::sqrt(0.5 * variance);
        const std::uint64_t base = detail::mix_key(noise.seed, stream_noise, std::uint64_t(snapshot_index));
        // Ziggurat normals: this is the hottest loop of capture synthesis.
        boost::random::normal_distribution<double> gauss;
        for (Eigen::Index n = 0; n < tf.cols(); ++n)
        {
            const std::uint64_t tone_key = detail::mix_key(base, std::uint64_t(n));
            for (Eigen::Index k = 0; k < tf.rows(); ++k)
            {
                detail::CounterEngine engine{tone_key + std::uint64_t(k)};
                const double a = gauss(engine);
                const double b = gauss(engine);
                tf(k, n) += std::complex<double>(scale * a, scale * b);
            }
        }
    }

    CaptureRecord simulate_snapshot(std::span<const PathSet> paths_per_port, const ArrayGeometry &geometry,
                                    const TonePlan &tones, const SystemResponse &system, const NoiseSpec &noise,
                                    std::int64_t snapshot_index)
    {
        const int ports = geometry.port_count();
        require(system.common_chain.size() == tones.tone_count, ErrorKind::dimension_mismatch,
                "system chain length does not match the tone plan");
        require(system.per_port_gain.size() == ports, ErrorKind::dimension_mismatch,
                "system port gains do not match the array");

        CaptureRecord rec;
        rec.tf = antenna_channel_response(paths_per_port, geometry, tones);
        const std::complex<double> drift = system.drift(noise.seed, snapshot_index);
        rec.tf.array().colwise() *= (system.per_port_gain * drift).array();
        rec.tf.array().rowwise() *= system.common_chain.transpose().array();
        add_noise(rec.tf, noise, snapshot_index);
        rec.snr_db = noise.enabled ? noise.snr_db : std::numeric_limits<double>::infinity();
        rec.seed = noise.seed;
        rec.snapshot_index = snapshot_index;
        return rec;
    }

    std::vector<CaptureRecord> simulate_b2b(const TonePlan &tones, const SystemResponse &system,
                                            const AttenuatorModel &attenuator, int snapshot_count,
                                            const NoiseSpec &noise)
    {
        require(snapshot_count >= 1, ErrorKind::invalid_argument, "snapshot_count must be at least 1");
        attenuator.validate();
        require(system.common_chain.size() == tones.tone_count, ErrorKind::dimension_mismatch,
                "system chain length does not match the tone plan");

        const Eigen::VectorXcd path = system.common_chain.cwiseProduct(attenuator.response(tones));
        const Eigen::MatrixXcd clean = system.per_port_gain * path.transpose();

        std::vector<CaptureRecord> out;
        out.reserve(std::size_t(snapshot_count));
        for (int s = 0; s < snapshot_count; ++s)
        {
            CaptureRecord rec;
            rec.tf = clean * system.drift(noise.seed, s);
            add_noise(rec.tf, noise, s);
            rec.snr_db = noise.enabled ? noise.snr_db : std::numeric_limits<double>::infinity();
            rec.seed = noise.seed;
            rec.snapshot_index = s;
            out.push_back(std::move(rec));
        }
        return out;
    }
}
