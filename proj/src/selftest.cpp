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

#include "a2gs/selftest.hpp"
#include "a2gs/pipeline.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace a2gs
{
    namespace
    {
        using Check = std::function<std::string()>;

        std::string fmt(const char *what, double value, double limit)
        {
            std::ostringstream s;
            s << what << " = " << value << " (limit " << limit << ")";
            return s.str();
        }

        // Reduced tone count keeps the suite fast; geometry and scene are the built-in presets.
        ScenarioConfig small_config(const char *preset)
        {
            ScenarioConfig c = preset_scenario(preset);
            c.tones.tone_count = 257;
            c.capture.burst_count = 2;
            c.capture.b2b_snapshots = 4;
            return c;
        }

        Eigen::MatrixXcd random_cir(std::mt19937_64 &rng, int ports, int bins)
        {
            std::normal_distribution<double> g;
            Eigen::MatrixXcd h(ports, bins);
            for (int k = 0; k < ports; ++k)
                for (int m = 0; m < bins; ++m)
                    h(k, m) = {1e-3 * g(rng), 1e-3 * g(rng)};
            for (int k = 0; k < ports; ++k)
                for (int t = 0; t < 3; ++t)
                    h(k, 2 + 3 * t + k % 2) += std::complex<double>(g(rng), g(rng)) / double(t + 1);
            return h;
        }

        std::string capture_bytes(const CaptureFile &f)
        {
            std::ostringstream s(std::ios::binary);
            write_capture(s, f);
            return s.str();
        }
    }

    std::vector<SelftestResult> run_selftest(std::ostream &log)
    {
        std::mt19937_64 rng(20260101);
        const ScenarioConfig cfg = small_config("paper-static");
        const ArrayGeometry geometry = cfg.geometry();
        const CaptureFile meas = synthesize_capture(cfg);
        const CaptureFile b2b = synthesize_b2b(cfg);
        const auto cal = calibrate_capture(meas, b2b, cfg.attenuator);

        std::vector<std::pair<std::string, Check>> checks;

        checks.emplace_back("timing identity", [] {
            const TimingPlan t;
            const auto ts = snapshot_timestamps(t, 2);
            if (t.simo_duration() != 0.0064 || t.ports_per_simo != 128)
                return std::string("SIMO duration is not 6.4 ms");
            for (std::size_t i = 1; i < ts.size(); ++i)
                if (!(ts[i] > ts[i - 1]))
                    return std::string("timestamps not strictly increasing");
            return std::string();
        });

        checks.emplace_back("tone grid symmetry", [] {
            const TonePlan p;
            const double err = std::abs(p.frequencies().mean() - p.center_frequency) / p.center_frequency;
            return err <= 1e-12 ? std::string() : fmt("relative mean offset", err, 1e-12);
        });

        checks.emplace_back("port indexing and cylinder", [&] {
            for (const auto &p : geometry.ports)
            {
                if (p.port_id != geometry.port_id(p.column, p.row, p.polarization))
                    return std::string("port_id mapping broken");
                if (std::abs(p.position.head<2>().norm() - geometry.radius) > 1e-12)
                    return std::string("port off the cylinder");
            }
            return std::string();
        });

        checks.emplace_back("pattern rotation and co/cross-pol order", [&] {
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            const double step = 2.0 * std::numbers::pi / double(geometry.columns);
            const Eigen::Matrix3d rot = Eigen::AngleAxisd(step, Eigen::Vector3d::UnitZ()).toRotationMatrix();
            for (int trial = 0; trial < 200; ++trial)
            {
                const Eigen::Vector3d d = Eigen::Vector3d(u(rng), u(rng), u(rng)).normalized();
                const int c = trial % (geometry.columns - 1);
                for (int pol = 0; pol < 2; ++pol)
                {
                    const Jones j = pol == 0 ? Jones(1.0, 0.0) : Jones(0.0, 1.0);
                    const auto g0 = port_gain(geometry, geometry.port_id(c, 0, Polarization(pol)), d, j);
                    const auto g1 = port_gain(geometry, geometry.port_id(c + 1, 0, Polarization(pol)), rot * d, j);
                    if (std::abs(g0 - g1) > 1e-12)
                        return fmt("rotation mismatch", std::abs(g0 - g1), 1e-12);
                    const auto cross = port_gain(geometry, geometry.port_id(c, 0, Polarization(1 - pol)), d, j);
                    if (std::abs(cross) > std::abs(g0))
                        return std::string("cross-pol exceeds co-pol");
                }
            }
            return std::string();
        });

        checks.emplace_back("path power bound and reciprocity", [&] {
            const double lambda = cfg.tones.wavelength();
            std::uniform_real_distribution<double> u(-30.0, 30.0);
            for (int trial = 0; trial < 50; ++trial)
            {
                const Eigen::Vector3d tx(u(rng), u(rng), 5.0 + std::abs(u(rng)));
                const PathSet paths = synthesize_paths(cfg.scene, tx, lambda);
                for (const auto &p : paths)
                    if (p.jones_gain.norm() > lambda / (4.0 * std::numbers::pi * p.delay * speed_of_light) * (1 + 1e-12))
                        return std::string("path exceeds the free-space bound");
                Scene swapped = cfg.scene;
                swapped.rx_position = tx;
                const PathSet back = synthesize_paths(swapped, cfg.scene.rx_position, lambda);
                if (back.size() != paths.size())
                    return std::string("reciprocal path count differs");
                for (std::size_t i = 0; i < paths.size(); ++i)
                    if (std::abs(back[i].delay - paths[i].delay) > 1e-15 * paths[i].delay + 1e-21)
                        return std::string("reciprocal delays differ");
            }
            return std::string();
        });

        checks.emplace_back("zero wobble equals static", [&] {
            Trajectory hover = cfg.trajectory;
            hover.kind = TrajectoryKind::hover;
            hover.hover.sigma_pos = 0.0;
            hover.hover.sigma_angle = 0.0;
            for (double t : cfg.timestamps())
            {
                const TxPose p = tx_pose_at(hover, t);
                if (p.position != cfg.trajectory.position || p.tilt != Eigen::Vector2d::Zero())
                    return std::string("hover with zero sigma moved");
            }
            return std::string();
        });

        checks.emplace_back("calibration identity and linearity", [&] {
            ScenarioConfig c = cfg;
            c.capture.noise = false;
            const CaptureFile m = synthesize_capture(c);
            const CaptureFile r = synthesize_b2b(c);
            const auto h = calibrate_capture(m, r, c.attenuator);
            const auto paths = snapshot_paths(c, geometry, m.records[0].timestamp);
            const Eigen::MatrixXcd truth = antenna_channel_response(paths, geometry, c.tones);
            const double err = (h[0].h_f - truth).cwiseAbs().cwiseQuotient(truth.cwiseAbs()).maxCoeff();
            if (err > 1e-10)
                return fmt("max relative error", err, 1e-10);
            CaptureRecord scaled = m.records[0];
            const std::complex<double> alpha(0.3, -1.7);
            scaled.tf *= alpha;
            const auto ref = average_records(r.records);
            const auto hs = calibrate(scaled, ref, c.attenuator, c.tones);
            const double lin = (hs.h_f - alpha * h[0].h_f).norm() / (alpha * h[0].h_f).norm();
            if (lin > 1e-13)
                return fmt("linearity error", lin, 1e-13);
            const auto self = calibrate(ref, ref, c.attenuator, c.tones);
            const Eigen::VectorXcd g = c.attenuator.response(c.tones);
            for (Eigen::Index k = 0; k < self.h_f.rows(); ++k)
                if ((self.h_f.row(k).transpose() - g).norm() > 1e-14 * g.norm())
                    return std::string("B2B self-calibration is not G_att");
            return std::string();
        });

        checks.emplace_back("Parseval (unitary IDFT)", [&] {
            for (const auto &h : cal)
            {
                const RawCir raw = cir_from_tf(h, cfg.tones);
                const double ef = h.h_f.squaredNorm();
                const double et = raw.h.squaredNorm();
                if (std::abs(ef - et) > 1e-12 * ef)
                    return fmt("relative energy difference", std::abs(ef - et) / ef, 1e-12);
            }
            return std::string();
        });

        checks.emplace_back("gating monotonicity", [&] {
            for (int trial = 0; trial < 20; ++trial)
            {
                RawCir raw{random_cir(rng, 8, 200), 27e-9};
                const GatedCir g = threshold_and_gate(raw, cfg.gate);
                if (rx_power(g) > raw.h.squaredNorm())
                    return std::string("gated power exceeds raw energy");
            }
            for (const auto &h : cal)
            {
                const RawCir raw = cir_from_tf(h, cfg.tones);
                if (rx_power(threshold_and_gate(raw, cfg.gate)) > raw.h.squaredNorm())
                    return std::string("gated power exceeds raw energy");
            }
            return std::string();
        });

        checks.emplace_back("P_RX per-port phase invariance", [&] {
            std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
            for (int trial = 0; trial < 20; ++trial)
            {
                RawCir raw{random_cir(rng, 8, 200), 27e-9};
                const double p0 = rx_power(threshold_and_gate(raw, cfg.gate));
                Eigen::VectorXcd rot(8);
                for (int k = 0; k < 8; ++k)
                    rot(k) = std::polar(1.0, ph(rng));
                raw.h = rot.asDiagonal() * raw.h;
                const double p1 = rx_power(threshold_and_gate(raw, cfg.gate));
                if (std::abs(p1 - p0) > 1e-12 * p0)
                    return fmt("relative change", std::abs(p1 - p0) / p0, 1e-12);
            }
            return std::string();
        });

        checks.emplace_back("delay spread shift and scale invariance", [&] {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (int trial = 0; trial < 100; ++trial)
            {
                Eigen::ArrayXd pdp(16), tau(16);
                for (int i = 0; i < 16; ++i)
                {
                    pdp(i) = u(rng);
                    tau(i) = 27e-9 * i;
                }
                const double s0 = rms_spread(pdp, tau);
                const double s1 = rms_spread(pdp, tau + 1.3e-6);
                const double s2 = rms_spread(pdp * 1e-7, tau);
                if (std::abs(s1 - s0) > 1e-9 * s0 || std::abs(s2 - s0) > 1e-12 * s0)
                    return std::string("delay spread changed under shift or scale");
            }
            return std::string();
        });

        checks.emplace_back("R Hermitian PSD with trace identity", [&] {
            for (const auto &h : cal)
            {
                const Eigen::MatrixXcd r = correlation_matrix(h.h_f);
                const double asym = (r - r.adjoint()).norm() / r.norm();
                const double trace = r.trace().real();
                const double expect = h.h_f.rowwise().squaredNorm().sum() / double(h.h_f.cols());
                if (asym > 1e-12)
                    return fmt("asymmetry", asym, 1e-12);
                if (std::abs(trace - expect) > 1e-12 * expect)
                    return fmt("trace relative error", std::abs(trace - expect) / expect, 1e-12);
                const EigenMetrics em = eigen_metrics(r);
                if (em.eigenvalues.minCoeff() < -1e-9 * trace)
                    return std::string("negative eigenvalue");
                for (Eigen::Index i = 1; i < em.eigenvalues.size(); ++i)
                    if (em.eigenvalues(i) > em.eigenvalues(i - 1))
                        return std::string("eigenvalues not sorted");
                if (!(em.gamma12_db <= em.gamma14_db))
                    return std::string("gamma12 > gamma14");
            }
            return std::string();
        });

        checks.emplace_back("capture file bit-exact round trip", [&] {
            CaptureFile q = meas;
            quantize(q);
            const std::string bytes = capture_bytes(q);
            std::istringstream in(bytes, std::ios::binary);
            const CaptureFile back = read_capture(in);
            if (back.records.size() != q.records.size())
                return std::string("record count changed");
            for (std::size_t i = 0; i < q.records.size(); ++i)
            {
                if (back.records[i].tf != q.records[i].tf || back.records[i].timestamp != q.records[i].timestamp ||
                    back.records[i].tx_pose.position != q.records[i].tx_pose.position)
                    return std::string("record content changed");
            }
            if (capture_bytes(back) != bytes)
                return std::string("rewritten bytes differ");
            std::size_t header_len = 0;
            for (int i = 0; i < 4; ++i)
                header_len |= std::size_t(static_cast<unsigned char>(bytes[std::size_t(8 + i)])) << (8 * i);
            if (bytes.size() != 12 + header_len + payload_bytes(q))
                return std::string("file length is not prefix + header + payload");
            return std::string();
        });

        checks.emplace_back("cross-run determinism", [&] {
            ScenarioConfig hover = small_config("paper-hover");
            if (capture_bytes(synthesize_capture(hover)) != capture_bytes(synthesize_capture(hover)))
                return std::string("hover captures differ between runs");
            if (capture_bytes(synthesize_capture(cfg)) != capture_bytes(meas))
                return std::string("static captures differ between runs");
            return std::string();
        });

        std::vector<SelftestResult> results;
        for (auto &[name, check] : checks)
        {
            SelftestResult r{name, false, {}};
            try
            {
                r.detail = check();
                r.passed = r.detail.empty();
            }
            catch (const std::exception &e)
            {
                r.detail = std::string("exception: ") + e.what();
            }
            log << (r.passed ? "PASS " : "FAIL ") << r.name;
            if (!r.passed)
                log << ": " << r.detail;
            log << '\n';
            results.push_back(std::move(r));
        }
        return results;
    }
}
