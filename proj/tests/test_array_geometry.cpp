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
#include "test_util.hpp"

#include "a2gs/array_geometry.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

using namespace a2gs;
using Catch::Approx;

namespace
{
    Eigen::Vector3d direction(double azimuth, double elevation)
    {
        return {std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth), std::sin(elevation)};
    }

    const Jones v_wave(1.0, 0.0);
    const Jones h_wave(0.0, 1.0);
}

TEST_CASE("default array has 128 ports with the documented indexing", "[array]")
{
    const ArrayGeometry g = default_array();
    REQUIRE(g.port_count() == 128);
    CHECK(g.port_id(4, 0, Polarization::V) == 32);
    std::set<int> ids;
    for (int c = 0; c < 16; ++c)
        for (int r = 0; r < 4; ++r)
            for (Polarization p : {Polarization::V, Polarization::H})
            {
                const int id = g.port_id(c, r, p);
                const PortDescriptor &d = g.port(id);
                CHECK(d.port_id == id);
                CHECK(d.column == c);
                CHECK(d.row == r);
                CHECK(d.polarization == p);
                ids.insert(id);
            }
    CHECK(ids.size() == 128);
    CHECK(*ids.begin() == 0);
    CHECK(*ids.rbegin() == 127);
}

TEST_CASE("port positions follow the cylinder", "[array]")
{
    const ArrayGeometry g = default_array();
    const Eigen::Vector3d p0 = port_phase_center(g, 0);
    CHECK(p0.x() == Approx(0.1091).epsilon(1e-12));
    CHECK(std::abs(p0.y()) < 1e-15);
    CHECK(p0.z() == Approx(-0.0643).margin(1e-4));
    CHECK(p0.z() == Approx(-1.5 * 0.0429).epsilon(1e-12));
    for (int r = 0; r < 4; ++r)
        CHECK(g.port(g.port_id(0, r, Polarization::V)).position.z() == Approx((r - 1.5) * 0.0429).epsilon(1e-12));
    for (const auto &p : g.ports)
    {
        CHECK(std::abs(p.position.head<2>().norm() - 0.1091) < 1e-12);
        CHECK(p.boresight_azimuth == Approx(p.column * 2.0 * std::numbers::pi / 16).epsilon(1e-15));
    }
}

TEST_CASE("port lookups by id", "[array]")
{
    const ArrayGeometry g = default_array();
    CHECK(port_phase_center(g, 0) == g.port(0).position);
    CHECK(g.port(8).column == 1);
    CHECK(g.port(8).row == 0);
    CHECK(g.port(127).column == 15);
    CHECK(g.port(127).row == 3);
    CHECK(g.port(127).polarization == Polarization::H);
    const auto e = testutil::error_of([&] { port_phase_center(g, 128); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::invalid_argument);
    CHECK(testutil::error_of([&] { port_gain(g, -1, Eigen::Vector3d::UnitX(), v_wave); }));
}

TEST_CASE("single element array has two co-located ports", "[array]")
{
    const ArrayGeometry g = build_cylindrical_array(1, 1, 0.05, 0.04);
    REQUIRE(g.port_count() == 2);
    CHECK(g.ports[0].position == g.ports[1].position);
    CHECK(g.ports[0].polarization == Polarization::V);
    CHECK(g.ports[1].polarization == Polarization::H);
}

TEST_CASE("non-positive array dimensions are rejected", "[array]")
{
    CHECK(testutil::error_of([] { build_cylindrical_array(0, 4, 0.1, 0.04); }));
    CHECK(testutil::error_of([] { build_cylindrical_array(16, 0, 0.1, 0.04); }));
    CHECK(testutil::error_of([] { build_cylindrical_array(16, 4, 0.0, 0.04); }));
}

TEST_CASE("element pattern reference points", "[array]")
{
    PatternParams p;
    p.xpd_db = std::numeric_limits<double>::infinity();
    const ArrayGeometry g = build_cylindrical_array(16, 4, 0.1091, 0.0429, p);
    CHECK(std::abs(port_gain(g, 0, Eigen::Vector3d::UnitX(), v_wave) - 1.0) < 1e-15);
    CHECK(std::abs(port_gain(g, 1, Eigen::Vector3d::UnitX(), v_wave)) == 0.0);

    const ArrayGeometry d = default_array();
    CHECK(std::norm(port_gain(d, 1, Eigen::Vector3d::UnitX(), v_wave)) == Approx(std::pow(10.0, -1.2)).epsilon(1e-12));
    CHECK(std::norm(port_gain(d, 0, -Eigen::Vector3d::UnitX(), v_wave)) == Approx(1e-3).epsilon(1e-12));

    // 120 degree elevation beamwidth at -3 dB
    CHECK(element_power_pattern(d.pattern, 0.0, std::numbers::pi / 3) == Approx(0.5).epsilon(1e-12));
    CHECK(element_power_pattern(d.pattern, 0.0, 0.0) == 1.0);
}

TEST_CASE("polarization basis is orthonormal and transverse", "[array][property]")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> az(-std::numbers::pi, std::numbers::pi), el(-1.5, 1.5);
    for (int i = 0; i < 200; ++i)
    {
        const Eigen::Vector3d u = direction(az(rng), el(rng));
        const Eigen::Vector3d v = v_hat(u), h = h_hat(u);
        CHECK(std::abs(v.norm() - 1.0) < 1e-12);
        CHECK(std::abs(h.norm() - 1.0) < 1e-12);
        CHECK(std::abs(v.dot(h)) < 1e-12);
        CHECK(std::abs(v.dot(u)) < 1e-12);
        CHECK(std::abs(h.dot(u)) < 1e-12);
        CHECK(v.z() >= 0.0);
    }
}

TEST_CASE("rotating by one column step permutes columns", "[array][property]")
{
    const ArrayGeometry g = default_array();
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(2.0 * std::numbers::pi / 16, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> az(-std::numbers::pi, std::numbers::pi), el(-1.2, 1.2), ph(0.0, 6.28);
    for (int i = 0; i < 100; ++i)
    {
        const Eigen::Vector3d d = direction(az(rng), el(rng));
        const Jones j(std::polar(1.0, ph(rng)), std::polar(0.5, ph(rng)));
        for (int c = 0; c < 16; ++c)
            for (int r = 0; r < 4; ++r)
                for (Polarization p : {Polarization::V, Polarization::H})
                {
                    const auto a = port_gain(g, g.port_id(c, r, p), d, j);
                    const auto b = port_gain(g, g.port_id((c + 1) % 16, r, p), rot * d, j);
                    CHECK(std::abs(a - b) < 1e-12);
                }
    }
}

TEST_CASE("co-pol response dominates cross-pol", "[array][property]")
{
    const ArrayGeometry g = default_array();
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> az(-std::numbers::pi, std::numbers::pi), el(-1.5, 1.5);
    for (int i = 0; i < 200; ++i)
    {
        const Eigen::Vector3d d = direction(az(rng), el(rng));
        for (int c = 0; c < 16; ++c)
        {
            const int v = g.port_id(c, 0, Polarization::V), h = g.port_id(c, 0, Polarization::H);
            CHECK(std::abs(port_gain(g, v, d, v_wave)) >= std::abs(port_gain(g, h, d, v_wave)));
            CHECK(std::abs(port_gain(g, h, d, h_wave)) >= std::abs(port_gain(g, v, d, h_wave)));
        }
    }
}
