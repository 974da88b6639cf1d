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

#include "a2gs/capture_sim.hpp"

using namespace a2gs;
using Catch::Approx;

namespace
{
    SystemResponse ideal(const TonePlan &tones, int ports)
    {
        SystemParams p;
        p.ideal = true;
        return make_system_response(p, tones, ports);
    }

    const NoiseSpec quiet{false, 30.0, 1};
}

TEST_CASE("single LOS path gives a linear phase across tones", "[capture]")
{
    const TonePlan tones = make_tone_plan(3.5e9, 20e3, 257);
    const ArrayGeometry g = default_array();
    const PathSet paths = synthesize_paths(Scene{}, Eigen::Vector3d(12.0, 3.0, 0.5), tones.wavelength());
    const CaptureRecord r = simulate_snapshot(std::vector<PathSet>{paths}, g, tones, ideal(tones, 128), quiet, 0);
    REQUIRE(r.tf.rows() == 128);
    REQUIRE(r.tf.cols() == 257);
    for (int k = 0; k < 128; k += 9)
    {
        const std::complex<double> step = r.tf(k, 1) / r.tf(k, 0);
        for (int n = 1; n < 257; ++n)
            CHECK(std::abs(r.tf(k, n) / r.tf(k, n - 1) - step) < 1e-9);
        CHECK(std::abs(r.tf(k, 0) - oracle::path_sum(paths, g, k, tones.frequency(0))) < 1e-12 * std::abs(r.tf(k, 0)));
    }
}

TEST_CASE("identical ports give identical rows", "[capture]")
{
    const TonePlan tones = make_tone_plan(3.5e9, 20e3, 64);
    ArrayGeometry g = build_cylindrical_array(1, 1, 0.05, 0.04);
    g.ports[1] = g.ports[0];
    g.ports[1].port_id = 1;
    const PathSet paths = synthesize_paths(Scene{}, Eigen::Vector3d(5.0, 1.0, 2.0), tones.wavelength());
    const CaptureRecord r = simulate_snapshot(std::vector<PathSet>{paths}, g, tones, ideal(tones, 2), quiet, 0);
    CHECK(r.tf.row(0) == r.tf.row(1));
}

TEST_CASE("noise variance follows the strongest port", "[capture]")
{
    const TonePlan tones = make_tone_plan(3.5e9, 20e3, 1841);
    const ArrayGeometry g = default_array();
    const SystemResponse sys = make_system_response(SystemParams{}, tones, 128);
    const std::vector<PathSet> paths{synthesize_paths(Scene{}, Eigen::Vector3d(12.0, 0.0, 0.3), tones.wavelength())};
    const CaptureRecord clean = simulate_snapshot(paths, g, tones, sys, quiet, 4);
    const CaptureRecord noisy = simulate_snapshot(paths, g, tones, sys, NoiseSpec{true, 30.0, 9}, 4);
    const double peak = clean.tf.cwiseAbs2().rowwise().mean().maxCoeff();
    const double variance = (noisy.tf - clean.tf).cwiseAbs2().mean();
    CHECK(variance == Approx(peak / 1e3).epsilon(0.02));
    CHECK(noisy.snr_db == 30.0);
    CHECK(std::isinf(clean.snr_db));
}

TEST_CASE("added noise is circular unit-variance Gaussian and reproducible", "[capture][property]")
{
    // unit-power input at 0 dB SNR gives unit noise variance
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Ones(128, 1841);
    add_noise(x, NoiseSpec{true, 0.0, 21}, 7);
    const Eigen::ArrayXXcd z = x.array() - 1.0;
    const double count = double(z.size());
    const Eigen::ArrayXXd re = z.real(), im = z.imag();
    CHECK(std::abs(re.mean()) < 0.01);
    CHECK(std::abs(im.mean()) < 0.01);
    CHECK(re.square().mean() == Approx(0.5).epsilon(0.01));
    CHECK(im.square().mean() == Approx(0.5).epsilon(0.01));
    CHECK(std::abs((re * im).sum() / count) < 0.005);
    // normal fourth moment: E x^4 = 3 sigma^4
    CHECK(re.pow(4).mean() / 0.25 == Approx(3.0).epsilon(0.03));
    CHECK(im.pow(4).mean() / 0.25 == Approx(3.0).epsilon(0.03));

    Eigen::MatrixXcd again = Eigen::MatrixXcd::Ones(128, 1841);
    add_noise(again, NoiseSpec{true, 0.0, 21}, 7);
    CHECK((again.array() == x.array()).all());
    Eigen::MatrixXcd other = Eigen::MatrixXcd::Ones(128, 1841);
    add_noise(other, NoiseSpec{true, 0.0, 21}, 8);
    CHECK((other.array() != x.array()).all());
}

TEST_CASE("system response stays within its ripple and gain bounds", "[capture]")
{
    const TonePlan tones;
    for (std::uint64_t seed : {1u, 2u, 3u, 99u})
    {
        SystemParams p;
        p.seed = seed;
        p.port_gain_db = 3.0;
        const SystemResponse s = make_system_response(p, tones, 128);
        const Eigen::ArrayXd chain_db = 20.0 * s.common_chain.cwiseAbs().array().log10();
        CHECK(chain_db.abs().maxCoeff() <= 1.5 + 1e-9);
        CHECK(s.common_chain.cwiseAbs().minCoeff() > 0.0);
        const Eigen::ArrayXd gain_db = 20.0 * s.per_port_gain.cwiseAbs().array().log10();
        CHECK(gain_db.abs().maxCoeff() <= 3.0 + 1e-9);
    }
    SystemParams bad;
    bad.port_gain_db = 3.5;
    CHECK(testutil::error_of([&] { make_system_response(bad, tones, 128); }));
}

TEST_CASE("back-to-back records", "[capture]")
{
    const TonePlan tones = make_tone_plan(3.5e9, 20e3, 101);
    const SystemResponse s = make_system_response(SystemParams{}, tones, 8);
    const auto b2b = simulate_b2b(tones, s, AttenuatorModel{}, 5, quiet);
    REQUIRE(b2b.size() == 5);
    for (const auto &r : b2b)
        CHECK((r.tf.array() == b2b[0].tf.array()).all());

    const auto flat = simulate_b2b(tones, ideal(tones, 8), AttenuatorModel{}, 2, quiet);
    CHECK((flat[0].tf.cwiseAbs().array() - std::pow(10.0, -1.5)).abs().maxCoeff() < 1e-15);

    CHECK(testutil::error_of([&] { simulate_b2b(tones, s, AttenuatorModel{}, 0, quiet); }));
    CHECK(testutil::error_of([&] { simulate_b2b(tones, s, AttenuatorModel{0.0, 0.0}, 2, quiet); }));
}

TEST_CASE("snapshot simulation is deterministic", "[capture][property]")
{
    const TonePlan tones = make_tone_plan(3.5e9, 20e3, 257);
    const ArrayGeometry g = default_array();
    SystemParams p;
    p.phase_drift_deg = 0.6;
    p.amplitude_jitter_db = 0.01;
    const SystemResponse s = make_system_response(p, tones, 128);
    const std::vector<PathSet> paths{synthesize_paths(Scene{}, Eigen::Vector3d(8.0, 8.0, 3.0), tones.wavelength())};
    const NoiseSpec noise{true, 20.0, 5};
    const CaptureRecord a = simulate_snapshot(paths, g, tones, s, noise, 17);
    const CaptureRecord b = simulate_snapshot(paths, g, tones, s, noise, 17);
    const CaptureRecord c = simulate_snapshot(paths, g, tones, s, noise, 18);
    CHECK((a.tf.array() == b.tf.array()).all());
    CHECK(a.tf != c.tf);
}

TEST_CASE("inconsistent inputs are rejected", "[capture]")
{
    const TonePlan tones = make_tone_plan(3.5e9, 20e3, 64);
    const ArrayGeometry g = default_array();
    const std::vector<PathSet> paths{synthesize_paths(Scene{}, Eigen::Vector3d(8.0, 0.0, 0.0), tones.wavelength())};
    auto e = testutil::error_of([&] { simulate_snapshot(paths, g, tones, ideal(tones, 64), quiet, 0); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::dimension_mismatch);
    CHECK(testutil::error_of([&] { simulate_snapshot(paths, g, TonePlan{}, ideal(tones, 128), quiet, 0); }));

    std::vector<PathSet> two(2, paths[0]);
    CHECK(testutil::error_of([&] { simulate_snapshot(two, g, tones, ideal(tones, 128), quiet, 0); }));

    std::vector<PathSet> bad = paths;
    bad[0][0].jones_gain(0) = std::numeric_limits<double>::quiet_NaN();
    CHECK(testutil::error_of([&] { simulate_snapshot(bad, g, tones, ideal(tones, 128), quiet, 0); }));
}
