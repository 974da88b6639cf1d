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

#include "a2gs/calibration.hpp"
#include "a2gs/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace a2gs
{
    namespace
    {
        double sample_std(const std::vector<double> &v)
        {
            if (v.size() < 2)
                return 0.0;
            double mean = 0.0;
            for (double x : v)
                mean += x;
            mean /= double(v.size());
            double acc = 0.0;
            for (double x : v)
                acc += (x - mean) * (x - mean);
            return std::sqrt(acc / double(v.size() - 1));
        }
    }

    Calibrator::Calibrator(const CaptureRecord &ref, const AttenuatorModel &attenuator, const TonePlan &tones,
                           double reference_floor_db)
    {
        require(ref.tf.cols() == tones.tone_count, ErrorKind::dimension_mismatch,
                "reference tone count does not match the tone plan");
        require(ref.tf.size() > 0, ErrorKind::dimension_mismatch, "empty reference");

        const Eigen::MatrixXd mag = ref.tf.cwiseAbs();
        std::vector<double> sorted(mag.data(), mag.data() + mag.size());
        std::nth_element(sorted.begin(), sorted.begin() + std::ptrdiff_t(sorted.size() / 2), sorted.end());
        const double median = sorted[sorted.size() / 2];
        const double floor = median * std::pow(10.0, -reference_floor_db / 20.0);
        for (Eigen::Index n = 0; n < mag.cols(); ++n)
            for (Eigen::Index k = 0; k < mag.rows(); ++k)
                if (!(mag(k, n) > floor))
                    fail(ErrorKind::calibration, "reference magnitude below floor at port " + std::to_string(k) +
                                                     ", tone " + std::to_string(n));

        const Eigen::RowVectorXcd g_att = attenuator.response(tones).transpose();
        factor_ = ref.tf.cwiseInverse();
        factor_.array().rowwise() *= g_att.array();
    }

    CalibratedResponse Calibrator::operator()(const CaptureRecord &meas) const
    {
        require(meas.tf.rows() == factor_.rows() && meas.tf.cols() == factor_.cols(), ErrorKind::dimension_mismatch,
                "measurement and reference dimensions differ");
        CalibratedResponse out;
        out.h_f = meas.tf.cwiseProduct(factor_);
        out.timestamp = meas.timestamp;
        out.tx_pose = meas.tx_pose;
        out.snapshot_index = meas.snapshot_index;
        return out;
    }

    CalibratedResponse calibrate(const CaptureRecord &meas, const CaptureRecord &ref, const AttenuatorModel &attenuator,
                                 const TonePlan &tones, double reference_floor_db)
    {
        require(meas.tf.cols() == tones.tone_count, ErrorKind::dimension_mismatch,
                "capture tone count does not match the tone plan");
        require(meas.tf.rows() == ref.tf.rows() && meas.tf.cols() == ref.tf.cols(), ErrorKind::dimension_mismatch,
                "measurement and reference dimensions differ");
        return Calibrator(ref, attenuator, tones, reference_floor_db)(meas);
    }

    CaptureRecord average_records(std::span<const CaptureRecord> records)
    {
        require(!records.empty(), ErrorKind::invalid_argument, "cannot average an empty record series");
        CaptureRecord out = records.front();
        for (std::size_t i = 1; i < records.size(); ++i)
        {
            require(records[i].tf.rows() == out.tf.rows() && records[i].tf.cols() == out.tf.cols(),
                    ErrorKind::dimension_mismatch, "record dimensions differ within the series");
            out.tf += records[i].tf;
        }
        out.tf /= double(records.size());
        return out;
    }

    StabilityReport stability_stats(std::span<const CaptureRecord> series, int port_id)
    {
        require(series.size() >= 2, ErrorKind::invalid_argument, "stability analysis needs at least 2 snapshots");
        const auto &first = series.front().tf;
        require(port_id >= 0 && port_id < first.rows(), ErrorKind::invalid_argument,
                "unknown port_id " + std::to_string(port_id));

        StabilityReport r;
        double previous = 0.0;
        for (const auto &rec : series)
        {
            require(rec.tf.rows() == first.rows() && rec.tf.cols() == first.cols(), ErrorKind::dimension_mismatch,
                    "record dimensions differ within the series");
            const std::complex<double> c = rec.tf.row(port_id).cwiseQuotient(first.row(port_id)).mean();
            double phase = std::arg(c) * 180.0 / std::numbers::pi;
            if (!r.rel_phase_deg.empty())
                phase = previous + std::remainder(phase - previous, 360.0);
            previous = phase;
            r.rel_amp_db.push_back(20.0 * std::log10(std::abs(c)));
            r.rel_phase_deg.push_back(phase);
        }
        r.amplitude_std_db = sample_std(r.rel_amp_db);
        r.phase_std_deg = sample_std(r.rel_phase_deg);
        return r;
    }
}
