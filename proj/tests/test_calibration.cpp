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

#include "catch_amalgamated.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include "a2gs/calibration.hpp"
#include "a2gs/pipeline.hpp"

#include <numbers>

using namespace a2gs;
using Catch::Approx;

namespace
{
    CaptureRecord flat(int ports, int tones, std::complex<double> value)
    {
        CaptureRecord r;
        r.tf = Eigen::MatrixXcd::Constant(ports, tones, value);
        return r;
    }
}

TEST_CASE("calibration arithmetic", "[calibration]")
{
    const TonePlan tones = make_tone_plan(3.5e9, 20e3, 16);
    const AttenuatorModel half{20.0 * std::log10(2.0), 0.0};
    const CalibratedResponse h = calibrate(flat(4, 16, 2.0), flat(4, 16, 4.0), half, tones);
    CHECK((h.h_f.array() - 0.25).abs().maxCoeff() < 1e-15);
}

TEST_CASE("calibrating a reference against itself yields G_att", "[calibration]")
{
    const TonePlan tones = make_tone_plan(3.5e9, 20e3, 101);
    const SystemResponse s = make_system_response(SystemParams{}, tones, 8);
    const AttenuatorModel att{30.0, 0.5};
    const auto b2b = simulate_b2b(tones, s, att, 1, NoiseSpec{false, 0.0, 0});
    const CalibratedResponse h = calibrate(b2b[0], b2b[0], att, tones);
    const Eigen::VectorXcd g = att.response(tones);
    for (int k = 0; k < 8; ++k)
        CHECK((h.h_f.row(k).transpose() - g).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(g.cwiseAbs().maxCoeff() == Approx(std::pow(10.0, -29.5 / 20.0)).epsilon(1e-9));
}

TEST_CASE("calibration is linear in the measurement", "[calibration][property]")
{
    const TonePlan tones = make_tone_plan(3.5e9, 20e3, 33);
    const Eigen::MatrixXcd y = Eigen::MatrixXcd::Random(6, 33);
    const Eigen::MatrixXcd ref = Eigen::MatrixXcd::Random(6, 33).array() + 2.0;
    CaptureRecord m, a, r;
    m.tf = y;
    const std::complex<double> alpha(0.3, -1.7);
    a.tf = alpha * y;
    r.tf = ref;
    const auto h1 = calibrate(m, r, AttenuatorModel{}, tones);
    const auto h2 = calibrate(a, r, AttenuatorModel{}, tones);
    CHECK((h2.h_f - alpha * h1.h_f).cwiseAbs().maxCoeff() < 1e-14 * h1.h_f.cwiseAbs().maxCoeff());
}

TEST_CASE("near-zero reference tones are rejected with their location", "[calibration]")
{
    const TonePlan tones = make_tone_plan(3.5e9, 20e3, 32);
    CaptureRecord ref = flat(5, 32, 1.0);
    ref.tf(3, 17) = 1e-13;
    const auto e = testutil::error_of([&] { calibrate(flat(5, 32, 1.0), ref, AttenuatorModel{}, tones); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::calibration);
    CHECK_THAT(e->message, Catch::Matchers::ContainsSubstring("port 3") && Catch::Matchers::ContainsSubstring("tone 17"));
    ref.tf(3, 17) = 1e-5; // 100 dB down passes the default floor
    CHECK_NOTHROW(calibrate(flat(5, 32, 1.0), ref, AttenuatorModel{}, tones));
    CHECK(testutil::error_of([&] { calibrate(flat(4, 32, 1.0), ref, AttenuatorModel{}, tones); }));
}

TEST_CASE("noiseless pipeline recovers the antenna and channel response", "[calibration][oracle]")
{
    ScenarioConfig c = preset_scenario("paper-static");
    c.tones = make_tone_plan(3.5e9, 20e3, 301);
    c.capture.noise = false;
    const ArrayGeometry g = c.geometry();
    const SystemResponse sys = make_system_response(c.system, c.tones, g.port_count());
    const CaptureRecord meas = synthesize_snapshot(c, g, sys, 0.0, 0);
    const CalibratedResponse h = calibrate(meas, average_records(synthesize_b2b(c).records), c.attenuator, c.tones);
    const PathSet paths = synthesize_paths(c.scene, c.trajectory.position, c.tones.wavelength());
    double worst = 0.0;
    for (int k = 0; k < g.port_count(); ++k)
        for (int n = 0; n < c.tones.tone_count; ++n)
        {
            const auto want = oracle::path_sum(paths, g, k, c.tones.frequency(n));
            worst = std::max(worst, std::abs(h.h_f(k, n) - want) / std::abs(want));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("stability of identical snapshots is exactly zero", "[calibration]")
{
    std::vector<CaptureRecord> s(10, flat(2, 8, std::polar(0.3, 1.0)));
    const StabilityReport r = stability_stats(s, 1);
    CHECK(r.amplitude_std_db == 0.0);
    CHECK(r.phase_std_deg == 0.0);
    CHECK(r.rel_amp_db[0] == 0.0);
    CHECK(r.rel_phase_deg[0] == 0.0);
}

TEST_CASE("deterministic phase ramps are reported per snapshot", "[calibration]")
{
    for (double step : {1.0, 170.0, -95.0})
    {
        std::vector<CaptureRecord> s;
        for (int i = 0; i < 12; ++i)
            s.push_back(flat(1, 8, std::polar(1.0, i * step * std::numbers::pi / 180.0)));
        const StabilityReport r = stability_stats(s, 0);
        for (int i = 0; i < 12; ++i)
            CHECK(r.rel_phase_deg[std::size_t(i)] == Approx(i * step).margin(1e-9));
    }
}

TEST_CASE("stability recovers injected drift", "[calibration]")
{
    const TonePlan tones;
    SystemParams p;
    p.amplitude_jitter_db = 0.007;
    p.phase_drift_deg = 0.6;
    const SystemResponse sys = make_system_response(p, tones, 1);
    const auto series = simulate_b2b(tones, sys, AttenuatorModel{}, 400, NoiseSpec{false, 0.0, 0});
    const StabilityReport r = stability_stats(series, 0);
    CHECK(r.amplitude_std_db == Approx(0.007).epsilon(0.1));
    CHECK(r.phase_std_deg == Approx(0.6).epsilon(0.1));
}

TEST_CASE("stability needs a series", "[calibration]")
{
    std::vector<CaptureRecord> one(1, flat(1, 4, 1.0));
    CHECK(testutil::error_of([&] { stability_stats(one, 0); }));
    CHECK(testutil::error_of([&] { stability_stats(std::vector<CaptureRecord>{}, 0); }));
    std::vector<CaptureRecord> two(2, flat(1, 4, 1.0));
    CHECK(testutil::error_of([&] { stability_stats(two, 1); }));
}

TEST_CASE("averaging B2B records", "[calibration]")
{
    std::vector<CaptureRecord> s{flat(2, 3, 1.0), flat(2, 3, 3.0)};
    CHECK((average_records(s).tf.array() - 2.0).abs().maxCoeff() == 0.0);
    CHECK(testutil::error_of([] { average_records(std::vector<CaptureRecord>{}); }));
}
