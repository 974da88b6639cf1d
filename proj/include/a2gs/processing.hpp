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
#include "a2gs/calibration.hpp"
#include "a2gs/waveform.hpp"

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace a2gs
{
    enum class Window
    {
        rect,
        hann
    };

    struct GateConfig
    {
        double noise_margin_db = 6.0;
        double peak_margin_db = 20.0;
        double delay_gate = 2e-6;
        double noise_window_fraction = 0.2; // tail of the delay axis used for the noise floor

        void validate(double max_unambiguous_delay) const;
    };

    // Impulse responses h'_k(tau), ports x delay bins, row-major so each port's profile is contiguous.
    using CirMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    struct RawCir
    {
        CirMatrix h;
        double delay_step = 0.0;

        double delay(Eigen::Index bin) const { return double(bin) * delay_step; }
    };

    struct GatedCir
    {
        CirMatrix h_tau; // after thresholding and gating
        CirMatrix raw;
        Eigen::VectorXd noise_floor; // linear power per port
        Eigen::VectorXd threshold;   // P_lambda per port
        std::vector<bool> valid;     // false for ports with no surviving bin
        std::vector<int> first_bin;  // -1 for invalid ports
        double delay_step = 0.0;

        Eigen::VectorXd port_energy() const { return h_tau.cwiseAbs2().rowwise().sum(); }
    };

    // Unitary inverse DFT over the tone axis of each port. The Hann window is scaled to unit
    // mean power so that noise power per bin is unchanged; it trades sidelobe leakage for a
    // wider main lobe and a scalloping loss that depends on where a path falls between bins.
    RawCir cir_from_tf(const Eigen::MatrixXcd &h_f, const Eigen::VectorXd &frequencies, Window window = Window::rect);
    RawCir cir_from_tf(const Eigen::MatrixXcd &h_f, const TonePlan &tones, Window window = Window::rect);
    inline RawCir cir_from_tf(const CalibratedResponse &h, const TonePlan &tones, Window window = Window::rect)
    {
        return cir_from_tf(h.h_f, tones, window);
    }

    // P_lambda = max(noise_floor + noise_margin, peak - peak_margin); bins below it and bins
    // later than the first surviving bin + delay_gate are zeroed.
    GatedCir threshold_and_gate(RawCir raw, const GateConfig &gate);

    // Total gated energy over ports and delay bins.
    double rx_power(const GatedCir &gated);

    // RMS spread of a power delay profile, two-pass for accuracy.
    template <typename DerivedP, typename DerivedT>
    typename DerivedP::Scalar rms_spread(const Eigen::ArrayBase<DerivedP> &pdp, const Eigen::ArrayBase<DerivedT> &delays)
    {
        using Scalar = typename DerivedP::Scalar;
        const Scalar total = pdp.sum();
        if (!(total > Scalar(0)))
            return Scalar(0);
        const Scalar mean = (pdp * delays).sum() / total;
        const Scalar var = (pdp * (delays - mean).square()).sum() / total;
        return std::sqrt(std::max(var, Scalar(0)));
    }

    template <typename Scalar>
    Scalar to_dbs(Scalar seconds)
    {
        return seconds > Scalar(0) ? Scalar(10) * std::log10(seconds) : -std::numeric_limits<Scalar>::infinity();
    }

    struct DelaySpread
    {
        double seconds = 0.0;
        double dbs = -std::numeric_limits<double>::infinity();
        int strongest_port = -1;
        bool single_bin = false; // sigma = 0, dBs is the -inf sentinel
    };

    // Delay spread of the strongest port (largest gated energy, ties to the lowest port_id).
    DelaySpread rms_delay_spread(const GatedCir &gated);

    // gamma values: NaN when undefined (too few ports or a zero matrix), +inf when the
    // denominator eigenvalue is zero.
    struct EigenMetrics
    {
        Eigen::MatrixXcd r;
        Eigen::VectorXd eigenvalues; // descending
        double gamma12_db = std::numeric_limits<double>::quiet_NaN();
        double gamma14_db = std::numeric_limits<double>::quiet_NaN();
        double span_db = std::numeric_limits<double>::quiet_NaN(); // largest over smallest eigenvalue
    };

    // R = mean over tones of H(f) H(f)^H.
    Eigen::MatrixXcd correlation_matrix(const Eigen::MatrixXcd &h_f);
    EigenMetrics eigen_metrics(const Eigen::MatrixXcd &r);
    inline EigenMetrics correlation_and_eigen(const Eigen::MatrixXcd &h_f)
    {
        return eigen_metrics(correlation_matrix(h_f));
    }

    // Per (column, polarization): 10 log10 of the mean gated energy over the column's ports.
    Eigen::MatrixXd column_power_profile(const GatedCir &gated, const ArrayGeometry &geometry);

    // Column with the largest power for a polarization; ties to the lowest column.
    int argmax_column(const Eigen::MatrixXd &column_power, Polarization pol);

    // Power of the strongest gated bin of a port.
    double los_bin_power(const GatedCir &gated, int port_id);

    struct SnapshotMetrics
    {
        std::int64_t snapshot_index = 0;
        double timestamp = 0.0;
        TxPose tx_pose;
        double p_rx = 0.0;
        DelaySpread delay_spread;
        double los_bin_power_db = -std::numeric_limits<double>::infinity();
        EigenMetrics eigen; // r is dropped after analysis
        Eigen::MatrixXd column_power;
    };

    struct AnalysisOptions
    {
        Window window = Window::rect;
        bool eigen = true;
        int los_port = -1; // port for the LOS-bin power; -1 uses the strongest port
    };

    SnapshotMetrics analyze_snapshot(const CalibratedResponse &h, const TonePlan &tones, const ArrayGeometry &geometry,
                                     const GateConfig &gate, const AnalysisOptions &options = {});

    struct RouteRow
    {
        std::int64_t index = 0;
        double timestamp = 0.0;
        Eigen::Vector3d position = Eigen::Vector3d::Zero();
        SnapshotMetrics metrics;
        int argmax_v_column = -1;
        int argmax_h_column = -1;
    };

    // Location-indexed rows with the argmax column series.
    std::vector<RouteRow> route_report(std::span<const SnapshotMetrics> snapshots);
}
