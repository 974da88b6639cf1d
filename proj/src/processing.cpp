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

#define EIGEN_FFTW_DEFAULT
#include "a2gs/processing.hpp"
#include "a2gs/error.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <bit>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

namespace a2gs
{
    namespace
    {
        // The FFTW planner is not thread-safe; the first transform of each object creates and
        // caches its plan, so only that call is serialized.
        std::mutex planner_mutex;

        std::size_t largest_prime_factor(std::size_t n)
        {
            std::size_t largest = 1;
            for (std::size_t p = 2; p * p <= n; ++p)
                for (; n % p == 0; n /= p)
                    largest = p;
            return std::max(largest, n);
        }

        // Unitary inverse DFT of one fixed length. Lengths with a large prime factor (1841 =
        // 7 x 263) go through Bluestein's chirp convolution on a power-of-two length: estimate plans
        // fall back to O(p^2) codelets there, and measured plans would not be reproducible.
        class UnitaryIdft
        {
        public:
            explicit UnitaryIdft(std::size_t n) : n_(n), scale_(std::sqrt(double(n)))
            {
                std::lock_guard lock(planner_mutex);
                if (largest_prime_factor(n) <= 7)
                {
                    work_.resize(n);
                    std::vector<std::complex<double>> probe(n);
                    fft_.inv(probe.data(), work_.data(), Eigen::Index(n));
                    return;
                }
                const std::size_t m = std::bit_ceil(2 * n - 1);
                // exp(i pi j^2 / n) with j^2 reduced mod 2n in integers
                chirp_.resize(Eigen::Index(n));
                for (std::size_t j = 0; j < n; ++j)
                    chirp_(Eigen::Index(j)) = std::polar(1.0, std::numbers::pi * double((j * j) % (2 * n)) / double(n));
                std::vector<std::complex<double>> kernel(m, 0.0);
                kernel[0] = 1.0;
                for (std::size_t j = 1; j < n; ++j)
                    kernel[j] = kernel[m - j] = std::conj(chirp_(Eigen::Index(j)));
                kernel_spectrum_.resize(Eigen::Index(m));
                fft_.fwd(kernel_spectrum_.data(), kernel.data(), Eigen::Index(m));
                // the unscaled inverse leaves a factor m; fold 1 / m here and 1 / sqrt(n) into the
                // output chirp
                fft_.SetFlag(Eigen::FFT<double>::Unscaled);
                kernel_spectrum_ /= double(m);
                out_chirp_ = chirp_ / scale_;
                work_.setZero(Eigen::Index(m));
                spectrum_.resize(Eigen::Index(m));
                conv_.resize(Eigen::Index(m));
                fft_.inv(conv_.data(), spectrum_.data(), Eigen::Index(m));
            }

            // Transforms n contiguous values from src into dst.
            void apply(const std::complex<double> *src, std::complex<double> *dst)
            {
                const Eigen::Index n = Eigen::Index(n_);
                if (chirp_.size() == 0)
                {
                    fft_.inv(dst, src, n);
                    Eigen::Map<Eigen::ArrayXcd>(dst, n) *= scale_;
                    return;
                }
                const Eigen::Index m = work_.size();
                // work_ past n stays zero; the convolution lands in conv_
                work_.head(n) = Eigen::Map<const Eigen::ArrayXcd>(src, n) * chirp_;
                fft_.fwd(spectrum_.data(), work_.data(), m);
                spectrum_ *= kernel_spectrum_;
                fft_.inv(conv_.data(), spectrum_.data(), m);
                Eigen::Map<Eigen::ArrayXcd>(dst, n) = conv_.head(n) * out_chirp_;
            }

            std::size_t size() const { return n_; }

        private:
            Eigen::FFT<double> fft_;
            std::size_t n_;
            double scale_;
            Eigen::ArrayXcd chirp_;
            Eigen::ArrayXcd out_chirp_;
            Eigen::ArrayXcd kernel_spectrum_;
            Eigen::ArrayXcd work_;
            Eigen::ArrayXcd spectrum_;
            Eigen::ArrayXcd conv_;
        };
    }

    void GateConfig::validate(double max_unambiguous_delay) const
    {
        require(noise_margin_db > 0.0 && peak_margin_db > 0.0, ErrorKind::invalid_argument,
                "gate margins must be positive");
        require(delay_gate > 0.0 && delay_gate < max_unambiguous_delay, ErrorKind::invalid_argument,
                "delay_gate must be positive and below the maximum unambiguous delay");
        require(noise_window_fraction > 0.0 && noise_window_fraction < 1.0, ErrorKind::invalid_argument,
                "noise_window_fraction must lie in (0, 1)");
    }

    RawCir cir_from_tf(const Eigen::MatrixXcd &h_f, const Eigen::VectorXd &frequencies, Window window)
    {
        const Eigen::Index n = h_f.cols();
        require(frequencies.size() == n, ErrorKind::dimension_mismatch, "frequency axis does not match the response");
        require(n >= 2, ErrorKind::invalid_argument, "need at least 2 tones");
        const double step = frequencies(1) - frequencies(0);
        require(step > 0.0, ErrorKind::invalid_argument, "tone grid must be increasing");
        for (Eigen::Index i = 1; i < n; ++i)
            require(std::abs((frequencies(i) - frequencies(i - 1)) - step) <= 1e-9 * step, ErrorKind::invalid_argument,
                    "tone grid is not uniform at tone " + std::to_string(i));

        Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
        if (window == Window::hann)
        {
            for (Eigen::Index i = 0; i < n; ++i)
                w(i) = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * double(i) / double(n - 1)));
            w /= std::sqrt(w.squaredNorm() / double(n));
        }

        RawCir out;
        out.delay_step = 1.0 / (double(n) * step);
        // Plans are costly for sizes with large prime factors; keep one transform per thread.
        thread_local std::unique_ptr<UnitaryIdft> cached;
        if (!cached || cached->size() != std::size_t(n))
            cached = std::make_unique<UnitaryIdft>(std::size_t(n));
        UnitaryIdft &idft = *cached;

        // Ports are strided in h_f; gather a block of them per pass over the tone axis.
        const Eigen::Index ports = h_f.rows();
        constexpr Eigen::Index block = 8;
        out.h.resize(ports, n);
        CirMatrix gathered(block, n);
        for (Eigen::Index k0 = 0; k0 < ports; k0 += block)
        {
            const Eigen::Index count = std::min(block, ports - k0);
            gathered.topRows(count) = h_f.middleRows(k0, count);
            if (window != Window::rect)
                gathered.topRows(count).array().rowwise() *= w.transpose().cast<std::complex<double>>().array();
            for (Eigen::Index k = 0; k < count; ++k)
                idft.apply(gathered.row(k).data(), out.h.row(k0 + k).data());
        }
        return out;
    }

    RawCir cir_from_tf(const Eigen::MatrixXcd &h_f, const TonePlan &tones, Window window)
    {
        require(h_f.cols() == tones.tone_count, ErrorKind::dimension_mismatch,
                "response tone count does not match the tone plan");
        return cir_from_tf(h_f, tones.frequencies(), window);
    }

    GatedCir threshold_and_gate(RawCir raw, const GateConfig &gate)
    {
        const Eigen::Index ports = raw.h.rows();
        const Eigen::Index bins = raw.h.cols();
        require(ports > 0 && bins > 0, ErrorKind::invalid_argument, "empty impulse response");
        gate.validate(double(bins) * raw.delay_step);

        GatedCir g;
        g.delay_step = raw.delay_step;
        g.noise_floor.resize(ports);
        g.threshold.resize(ports);
        g.valid.assign(std::size_t(ports), false);
        g.first_bin.assign(std::size_t(ports), -1);

        const Eigen::Index tail_start =
            std::min(bins - 1, Eigen::Index(std::floor((1.0 - gate.noise_window_fraction) * double(bins))));
        const double noise_factor = std::pow(10.0, gate.noise_margin_db / 10.0);
        const double peak_factor = std::pow(10.0, -gate.peak_margin_db / 10.0);
        // bins sitting on the gate edge up to rounding are kept
        const double gate_bins = gate.delay_gate / raw.delay_step + 1e-6;

        g.h_tau = raw.h;
        Eigen::ArrayXd power(bins);
        for (Eigen::Index k = 0; k < ports; ++k)
        {
            auto row = g.h_tau.row(k);
            power = row.cwiseAbs2().transpose().array();
            const double noise = power.tail(bins - tail_start).mean();
            const double peak = power.maxCoeff();
            const double threshold = std::max(noise * noise_factor, peak * peak_factor);
            g.noise_floor(k) = noise;
            g.threshold(k) = threshold;

            Eigen::Index first = -1;
            for (Eigen::Index m = 0; m < bins; ++m)
            {
                if (first >= 0 && double(m - first) > gate_bins)
                {
                    row.tail(bins - m).setZero();
                    break;
                }
                if (power(m) < threshold || power(m) == 0.0)
                    row(m) = 0.0;
                else if (first < 0)
                    first = m;
            }
            if (first < 0)
                continue;
            g.valid[std::size_t(k)] = true;
            g.first_bin[std::size_t(k)] = int(first);
        }
        g.raw = std::move(raw.h);
        return g;
    }

    double rx_power(const GatedCir &gated)
    {
        return gated.h_tau.cwiseAbs2().sum();
    }

    DelaySpread rms_delay_spread(const GatedCir &gated)
    {
        const Eigen::VectorXd energy = gated.port_energy();
        int best = -1;
        for (Eigen::Index k = 0; k < energy.size(); ++k)
            if (gated.valid[std::size_t(k)] && (best < 0 || energy(k) > energy(best)))
                best = int(k);
        require(best >= 0, ErrorKind::invalid_argument, "no port has a surviving delay bin");

        const Eigen::Index bins = gated.h_tau.cols();
        const Eigen::ArrayXd pdp = gated.h_tau.row(best).cwiseAbs2().transpose().array();
        const Eigen::ArrayXd delays = Eigen::ArrayXd::LinSpaced(bins, 0.0, double(bins - 1)) * gated.delay_step;

        DelaySpread d;
        d.strongest_port = best;
        d.seconds = rms_spread(pdp, delays);
        d.dbs = to_dbs(d.seconds);
        d.single_bin = (pdp > 0.0).count() <= 1;
        return d;
    }

    Eigen::MatrixXcd correlation_matrix(const Eigen::MatrixXcd &h_f)
    {
        require(h_f.cols() > 0, ErrorKind::invalid_argument, "empty response");
        Eigen::MatrixXcd r(h_f.rows(), h_f.rows());
        r.noalias() = h_f * h_f.adjoint();
        return r / double(h_f.cols());
    }

    EigenMetrics eigen_metrics(const Eigen::MatrixXcd &r)
    {
        require(r.rows() == r.cols() && r.rows() > 0, ErrorKind::dimension_mismatch, "R must be square");
        EigenMetrics m;
        m.r = r;
        const Eigen::MatrixXcd herm = 0.5 * (r + r.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
        require(solver.info() == Eigen::Success, ErrorKind::invalid_argument, "eigen decomposition failed");
        m.eigenvalues = solver.eigenvalues().reverse();

        const Eigen::Index n = m.eigenvalues.size();
        const double e1 = m.eigenvalues(0);
        const double trace = herm.trace().real();
        if (!(e1 > 0.0))
            return m;

        // Eigenvalues below this are numerically zero.
        const double zero = 1e-13 * trace;
        auto ratio_db = [&](double num, double den) {
            return den > zero ? 10.0 * std::log10(num / den) : std::numeric_limits<double>::infinity();
        };
        if (n >= 2)
            m.gamma12_db = ratio_db(e1, m.eigenvalues(1));
        if (n >= 4)
            m.gamma14_db = ratio_db(e1, m.eigenvalues(3));
        m.span_db = ratio_db(e1, m.eigenvalues(n - 1));
        return m;
    }

    Eigen::MatrixXd column_power_profile(const GatedCir &gated, const ArrayGeometry &geometry)
    {
        require(gated.h_tau.rows() == geometry.port_count(), ErrorKind::dimension_mismatch,
                "impulse response port count does not match the array");
        const Eigen::VectorXd energy = gated.port_energy();
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(geometry.columns, 2);
        for (const auto &p : geometry.ports)
            acc(p.column, int(p.polarization)) += energy(p.port_id);
        acc /= double(geometry.rows);
        return acc.unaryExpr([](double e) {
            return e > 0.0 ? 10.0 * std::log10(e) : -std::numeric_limits<double>::infinity();
        });
    }

    int argmax_column(const Eigen::MatrixXd &column_power, Polarization pol)
    {
        Eigen::Index best = 0;
        column_power.col(int(pol)).maxCoeff(&best);
        return int(best);
    }

    double los_bin_power(const GatedCir &gated, int port_id)
    {
        require(port_id >= 0 && port_id < gated.h_tau.rows(), ErrorKind::invalid_argument,
                "unknown port_id " + std::to_string(port_id));
        return gated.h_tau.row(port_id).cwiseAbs2().maxCoeff();
    }

    SnapshotMetrics analyze_snapshot(const CalibratedResponse &h, const TonePlan &tones, const ArrayGeometry &geometry,
                                     const GateConfig &gate, const AnalysisOptions &options)
    {
        require(h.h_f.rows() == geometry.port_count(), ErrorKind::dimension_mismatch,
                "response port count does not match the array");
        const GatedCir gated = threshold_and_gate(cir_from_tf(h.h_f, tones, options.window), gate);

        SnapshotMetrics m;
        m.snapshot_index = h.snapshot_index;
        m.timestamp = h.timestamp;
        m.tx_pose = h.tx_pose;
        m.p_rx = rx_power(gated);
        m.delay_spread = rms_delay_spread(gated);
        const int los_port = options.los_port >= 0 ? options.los_port : m.delay_spread.strongest_port;
        const double los = los_bin_power(gated, los_port);
        m.los_bin_power_db = los > 0.0 ? 10.0 * std::log10(los) : -std::numeric_limits<double>::infinity();
        m.column_power = column_power_profile(gated, geometry);
        if (options.eigen)
        {
            m.eigen = correlation_and_eigen(h.h_f);
            m.eigen.r.resize(0, 0);
        }
        return m;
    }

    std::vector<RouteRow> route_report(std::span<const SnapshotMetrics> snapshots)
    {
        require(!snapshots.empty(), ErrorKind::invalid_argument, "route report needs at least one snapshot");
        std::vector<RouteRow> rows;
        rows.reserve(snapshots.size());
        for (const auto &s : snapshots)
        {
            RouteRow r;
            r.index = s.snapshot_index;
            r.timestamp = s.timestamp;
            r.position = s.tx_pose.position;
            r.metrics = s;
            r.argmax_v_column = argmax_column(s.column_power, Polarization::V);
            r.argmax_h_column = argmax_column(s.column_power, Polarization::H);
            rows.push_back(std::move(r));
        }
        return rows;
    }
}
