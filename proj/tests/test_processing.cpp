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

#include "a2gs/pipeline.hpp"
#include "a2gs/processing.hpp"

#include <numbers>
#include <random>

using namespace a2gs;
using Catch::Approx;

namespace
{
    RawCir raw_from(const Eigen::MatrixXcd &h, double step)
    {
        return RawCir{h, step};
    }

    Eigen::VectorXcd delayed_tone_response(const TonePlan &t, double tau)
    {
        Eigen::VectorXcd h(t.tone_count);
        for (int n = 0; n < t.tone_count; ++n)
            h(n) = std::polar(1.0, -2.0 * std::numbers::pi * std::fmod(t.frequency(n) * tau, 1.0));
        return h;
    }

    GatedCir gated_pdp(const std::vector<double> &power, double step)
    {
        GatedCir g;
        g.h_tau = Eigen::MatrixXcd::Zero(1, Eigen::Index(power.size()));
        for (std::size_t i = 0; i < power.size(); ++i)
            g.h_tau(0, Eigen::Index(i)) = std::sqrt(power[i]);
        g.delay_step = step;
        g.valid = {true};
        return g;
    }

    // sigma from the one-pass moment formula in long double
    double one_pass_spread(const std::vector<double> &p, double step)
    {
        long double s0 = 0, s1 = 0, s2 = 0;
        for (std::size_t i = 0; i < p.size(); ++i)
        {
            const long double t = (long double)i * step;
            s0 += p[i];
            s1 += p[i] * t;
            s2 += p[i] * t * t;
        }
        return double(std::sqrt(s2 / s0 - (s1 / s0) * (s1 / s0)));
    }
}

TEST_CASE("on-grid delay maps to a single bin", "[processing]")
{
    const TonePlan t = make_tone_plan(3.5e9, 20e3, 1841);
    const int bin = 37;
    const Eigen::MatrixXcd h = delayed_tone_response(t, bin * t.delay_resolution()).transpose();
    const RawCir c = cir_from_tf(h, t);
    CHECK(c.delay_step == Approx(t.delay_resolution()).epsilon(1e-15));
    const Eigen::ArrayXd p = c.h.row(0).cwiseAbs2().transpose().array();
    Eigen::Index arg;
    p.maxCoeff(&arg);
    CHECK(arg == bin);
    CHECK(p(bin) == Approx(1841.0).epsilon(1e-9));
    CHECK(p.sum() - p(bin) < 1e-12 * p(bin));
}

TEST_CASE("constant response is an impulse at zero delay", "[processing]")
{
    const TonePlan t = make_tone_plan(3.5e9, 20e3, 64);
    const RawCir c = cir_from_tf(Eigen::MatrixXcd::Constant(2, 64, {0.5, 0.5}), t);
    CHECK(std::abs(c.h(1, 0) - std::complex<double>(4.0, 4.0)) < 1e-12);
    CHECK(c.h.rightCols(63).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("inverse transform matches a direct DFT", "[processing][oracle]")
{
    for (int n : {7, 64, 257, 1841})
    {
        const TonePlan t = make_tone_plan(3.5e9, 20e3, n);
        const Eigen::MatrixXcd h = Eigen::MatrixXcd::Random(n < 300 ? 9 : 2, n);
        const RawCir c = cir_from_tf(h, t);
        for (int k = 0; k < c.h.rows(); ++k)
        {
            const Eigen::VectorXcd want = oracle::direct_idft(h.row(k).transpose());
            CHECK((c.h.row(k).transpose() - want).cwiseAbs().maxCoeff() < 1e-12 * std::sqrt(double(n)));
        }
    }
}

TEST_CASE("Parseval identity holds for both windows' transforms", "[processing][property]")
{
    const TonePlan t = make_tone_plan(3.5e9, 20e3, 1841);
    const Eigen::MatrixXcd h = Eigen::MatrixXcd::Random(8, 1841);
    const RawCir c = cir_from_tf(h, t);
    CHECK(c.h.squaredNorm() == Approx(h.squaredNorm()).epsilon(1e-12));

    const RawCir w = cir_from_tf(Eigen::MatrixXcd::Ones(1, 1841), t, Window::hann);
    CHECK(w.h.squaredNorm() == Approx(1841.0).epsilon(1e-12)); // unit mean power window
}

TEST_CASE("non-uniform grids are rejected", "[processing]")
{
    Eigen::VectorXd f = TonePlan{}.frequencies().head(16);
    f(7) += 1.0;
    const auto e = testutil::error_of([&] { cir_from_tf(Eigen::MatrixXcd::Ones(1, 16), f); });
    REQUIRE(e);
    CHECK_THAT(e->message, Catch::Matchers::ContainsSubstring("uniform"));
    CHECK(testutil::error_of([&] { cir_from_tf(Eigen::MatrixXcd::Ones(1, 15), TonePlan{}.frequencies().head(16)); }));
}

TEST_CASE("dual threshold picks the larger margin", "[processing]")
{
    const double step = 1e-8;
    for (auto [noise_db, peak_db, want_db] : {std::tuple{-80.0, -50.0, -70.0}, std::tuple{-60.0, -50.0, -54.0}})
    {
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Constant(1, 1000, std::sqrt(std::pow(10.0, noise_db / 10.0)));
        h(0, 10) = std::sqrt(std::pow(10.0, peak_db / 10.0));
        const GatedCir g = threshold_and_gate(raw_from(h, step), GateConfig{});
        CHECK(10.0 * std::log10(g.noise_floor(0)) == Approx(noise_db).margin(1e-9));
        CHECK(10.0 * std::log10(g.threshold(0)) == Approx(want_db).margin(1e-9));
    }
}

TEST_CASE("noiseless single path keeps exactly one bin", "[processing]")
{
    const TonePlan t = make_tone_plan(3.5e9, 20e3, 1841);
    const Eigen::MatrixXcd h = delayed_tone_response(t, 100 * t.delay_resolution()).transpose();
    const GatedCir g = threshold_and_gate(cir_from_tf(h, t), GateConfig{});
    CHECK((g.h_tau.array() != std::complex<double>(0.0)).count() == 1);
    CHECK(g.first_bin[0] == 100);
}

TEST_CASE("delay gate is anchored at the first surviving bin", "[processing]")
{
    const double step = 1e-7; // 2 us gate = 20 bins
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(1, 1000);
    h(0, 50) = 1.0;
    h(0, 70) = 0.5;  // exactly at the gate edge
    h(0, 71) = 0.5;  // beyond
    h(0, 300) = 0.9; // far beyond
    const GatedCir g = threshold_and_gate(raw_from(h, step), GateConfig{});
    CHECK(g.h_tau(0, 50) == 1.0);
    CHECK(g.h_tau(0, 70) == 0.5);
    CHECK(g.h_tau(0, 71) == 0.0);
    CHECK(g.h_tau(0, 300) == 0.0);
}

TEST_CASE("gating invariants on noisy impulse responses", "[processing][property]")
{
    std::mt19937_64 rng(23);
    std::normal_distribution<double> n01;
    const GateConfig gate;
    for (int trial = 0; trial < 20; ++trial)
    {
        Eigen::MatrixXcd h(4, 1841);
        for (Eigen::Index i = 0; i < h.size(); ++i)
            h(i) = {1e-3 * n01(rng), 1e-3 * n01(rng)};
        for (int k = 0; k < 4; ++k)
            for (int tap = 0; tap < 5; ++tap)
                h(k, 20 + 40 * tap + trial) += std::polar(std::pow(0.5, tap), double(tap));
        const RawCir raw = raw_from(h, 1.0 / 36.82e6);
        const GatedCir g = threshold_and_gate(raw, gate);
        CHECK(rx_power(g) <= raw.h.squaredNorm());
        for (int k = 0; k < 4; ++k)
        {
            REQUIRE(g.valid[std::size_t(k)]);
            const double last = raw.delay(g.first_bin[std::size_t(k)]) + gate.delay_gate;
            for (Eigen::Index m = 0; m < 1841; ++m)
            {
                const auto v = g.h_tau(k, m);
                if (v != 0.0)
                {
                    CHECK(std::norm(v) >= g.threshold(k));
                    CHECK(raw.delay(m) <= last);
                    CHECK(v == raw.h(k, m));
                }
            }
        }
    }
}

TEST_CASE("received power sums gated energy over ports and delays", "[processing]")
{
    GatedCir g;
    g.h_tau = Eigen::MatrixXcd::Zero(2, 4);
    g.h_tau(0, 1) = 1.0;
    g.h_tau(1, 0) = std::sqrt(2.0);
    g.h_tau(1, 3) = 1.0;
    CHECK(rx_power(g) == Approx(4.0).epsilon(1e-15));

    Eigen::MatrixXcd rot = g.h_tau;
    rot.row(0) *= std::polar(1.0, 0.3);
    rot.row(1) *= std::polar(1.0, -2.1);
    g.h_tau = rot;
    CHECK(rx_power(g) == Approx(4.0).epsilon(1e-15));

    const GatedCir empty = threshold_and_gate(raw_from(Eigen::MatrixXcd::Zero(3, 64), 1e-7), GateConfig{});
    CHECK(rx_power(empty) == 0.0);
    CHECK(std::none_of(empty.valid.begin(), empty.valid.end(), [](bool b) { return b; }));
    const auto e = testutil::error_of([&] { rms_delay_spread(empty); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::invalid_argument);
}

TEST_CASE("RMS delay spread reference values", "[processing]")
{
    const DelaySpread two = rms_delay_spread(gated_pdp({1.0, 0.0, 1.0}, 50e-9));
    CHECK(two.seconds == Approx(50e-9).epsilon(1e-12));
    CHECK(two.dbs == Approx(-73.0103).margin(5e-5));
    CHECK(to_dbs(1e-9) == -90.0);

    const DelaySpread single = rms_delay_spread(gated_pdp({0.0, 3.0, 0.0}, 50e-9));
    CHECK(single.seconds == 0.0);
    CHECK(single.single_bin);
    CHECK(std::isinf(single.dbs));
    CHECK(single.dbs < 0.0);
}

TEST_CASE("strongest port ties break to the lowest id", "[processing]")
{
    GatedCir g;
    g.h_tau = Eigen::MatrixXcd::Zero(3, 4);
    g.h_tau(1, 0) = 1.0;
    g.h_tau(2, 2) = 1.0;
    g.h_tau(2, 3) = 0.1; // port 2 slightly stronger
    g.h_tau(1, 1) = 0.1;
    g.delay_step = 1e-8;
    g.valid = {false, true, true};
    CHECK(rms_delay_spread(g).strongest_port == 1);
}

TEST_CASE("delay spread is shift and scale invariant", "[processing][property]")
{
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial)
    {
        std::vector<double> p(20);
        for (auto &x : p)
            x = u(rng) < 0.4 ? u(rng) : 0.0;
        p[3] = 1.0;
        const double base = rms_delay_spread(gated_pdp(p, 27e-9)).seconds;
        CHECK(base == Approx(one_pass_spread(p, 27e-9)).epsilon(1e-9));

        std::vector<double> shifted(7, 0.0);
        shifted.insert(shifted.end(), p.begin(), p.end());
        CHECK(rms_delay_spread(gated_pdp(shifted, 27e-9)).seconds == Approx(base).epsilon(1e-12));

        std::vector<double> scaled = p;
        for (auto &x : scaled)
            x *= 1e-7;
        CHECK(rms_delay_spread(gated_pdp(scaled, 27e-9)).seconds == Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("eigen metrics reference cases", "[processing]")
{
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(6, 6);
    r(0, 0) = 100.0;
    const EigenMetrics e = eigen_metrics(r);
    CHECK(e.gamma12_db == Approx(20.0).epsilon(1e-12));
    CHECK(e.gamma14_db == Approx(20.0).epsilon(1e-12));

    const Eigen::VectorXcd a = Eigen::VectorXcd::Random(5);
    const Eigen::MatrixXcd flat = a.replicate(1, 32);
    const EigenMetrics rank1 = correlation_and_eigen(flat);
    CHECK(rank1.eigenvalues(0) == Approx(a.squaredNorm()).epsilon(1e-12));
    CHECK(rank1.gamma12_db == std::numeric_limits<double>::infinity());
    CHECK(rank1.gamma14_db == std::numeric_limits<double>::infinity());

    const EigenMetrics zero = eigen_metrics(Eigen::MatrixXcd::Zero(4, 4));
    CHECK(std::isnan(zero.gamma12_db));
    CHECK(std::isnan(zero.gamma14_db));

    const EigenMetrics small = correlation_and_eigen(Eigen::MatrixXcd::Random(3, 10));
    CHECK(std::isfinite(small.gamma12_db));
    CHECK(std::isnan(small.gamma14_db));
}

TEST_CASE("correlation matrix properties", "[processing][property]")
{
    std::mt19937_64 rng(31);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 20; ++trial)
    {
        Eigen::MatrixXcd h(16, 64);
        for (Eigen::Index i = 0; i < h.size(); ++i)
            h(i) = {n01(rng), n01(rng)};
        h.row(trial % 16) *= 30.0;
        const Eigen::MatrixXcd r = correlation_matrix(h);
        const EigenMetrics e = eigen_metrics(r);
        CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * r.cwiseAbs().maxCoeff());
        const double trace = r.trace().real();
        CHECK(trace == Approx(h.cwiseAbs2().rowwise().mean().sum()).epsilon(1e-12));
        CHECK(e.eigenvalues.minCoeff() >= -1e-9 * trace);
        for (Eigen::Index k = 1; k < e.eigenvalues.size(); ++k)
            CHECK(e.eigenvalues(k) <= e.eigenvalues(k - 1));
        CHECK(e.gamma12_db <= e.gamma14_db);
        CHECK((r - oracle::correlation(h)).cwiseAbs().maxCoeff() <= 1e-12 * trace);
    }
}

TEST_CASE("column power profile", "[processing]")
{
    const ArrayGeometry g = default_array();
    GatedCir gated;
    gated.h_tau = Eigen::MatrixXcd::Constant(128, 4, 0.5); // energy 1 per port
    const Eigen::MatrixXd cp = column_power_profile(gated, g);
    REQUIRE(cp.rows() == 16);
    REQUIRE(cp.cols() == 2);
    CHECK(cp.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(argmax_column(cp, Polarization::V) == 0);

    gated.h_tau.row(g.port_id(9, 2, Polarization::H)) *= 4.0;
    const Eigen::MatrixXd cp2 = column_power_profile(gated, g);
    CHECK(argmax_column(cp2, Polarization::H) == 9);
    CHECK(cp2(9, 1) == Approx(10.0 * std::log10((3.0 + 16.0) / 4.0)).epsilon(1e-12));
    CHECK(argmax_column(cp2, Polarization::V) == 0);
    CHECK(los_bin_power(gated, g.port_id(9, 2, Polarization::H)) == Approx(4.0).epsilon(1e-15));

    GatedCir wrong;
    wrong.h_tau = Eigen::MatrixXcd::Zero(10, 4);
    CHECK(testutil::error_of([&] { column_power_profile(wrong, g); }));
}

TEST_CASE("gate configuration is validated", "[processing]")
{
    GateConfig g;
    CHECK_NOTHROW(g.validate(50e-6));
    g.delay_gate = 60e-6;
    CHECK(testutil::error_of([&] { g.validate(50e-6); }));
    g = {};
    g.noise_margin_db = 0.0;
    CHECK(testutil::error_of([&] { g.validate(50e-6); }));
    g = {};
    g.noise_window_fraction = 1.0;
    CHECK(testutil::error_of([&] { g.validate(50e-6); }));
}

TEST_CASE("static snapshot sees the drone on the east-facing column", "[processing][scenario]")
{
    ScenarioConfig c = preset_scenario("paper-static");
    const ArrayGeometry g = c.geometry();
    const SystemResponse sys = make_system_response(c.system, c.tones, g.port_count());
    const Calibrator cal(average_records(synthesize_b2b(c).records), c.attenuator, c.tones);

    std::vector<SnapshotMetrics> series;
    for (int i = 0; i < 3; ++i)
        series.push_back(analyze_snapshot(cal(synthesize_snapshot(c, g, sys, 0.05 * i, i)), c.tones, g, c.gate));
    const auto &m = series.front();
    CHECK(argmax_column(m.column_power, Polarization::V) == 4);
    CHECK(m.column_power(4, 0) - m.column_power(4, 1) == Approx(12.0).margin(1.5));
    CHECK(m.delay_spread.dbs > -80.0);
    CHECK(m.delay_spread.dbs < -75.0);
    CHECK(m.p_rx > 0.0);
    CHECK(g.port(m.delay_spread.strongest_port).column == 4);

    const auto rows = route_report(series);
    REQUIRE(rows.size() == 3);
    for (const auto &r : rows)
    {
        CHECK(r.argmax_v_column == 4);
        CHECK(r.position == c.trajectory.position);
    }
}
