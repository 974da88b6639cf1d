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

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace a2gs
{
    // Planar polygonal reflector. gamma_v applies to the field component in the plane of
    // incidence, gamma_h to the component normal to it; cross_pol in [0, 1] rotates that
    // fraction of amplitude between the two before the coefficients are applied.
    struct Reflector
    {
        std::vector<Eigen::Vector3d> corners;
        std::complex<double> gamma_v{-1.0, 0.0};
        std::complex<double> gamma_h{-1.0, 0.0};
        double cross_pol = 0.0;
    };

    struct Scene
    {
        std::vector<Reflector> reflectors;
        Eigen::Vector3d rx_position = Eigen::Vector3d::Zero();
        double rx_mounting_rotation = 0.0; // array-frame azimuth 0 points at world azimuth rx_mounting_rotation

        void validate() const;
    };

    struct PathComponent
    {
        double delay = 0.0;                                          // seconds, referenced to the array center
        Jones jones_gain = Jones::Zero();                             // at the array center, no element pattern
        Eigen::Vector3d arrival_direction = Eigen::Vector3d::UnitX(); // array frame, pointing towards the source
        int bounce_count = 0;
    };

    using PathSet = std::vector<PathComponent>;

    // TX pose: position and the tilt of the vertical antenna axis (rotation about x, then y).
    struct TxPose
    {
        Eigen::Vector3d position = Eigen::Vector3d::Zero();
        Eigen::Vector2d tilt = Eigen::Vector2d::Zero();
    };

    enum class TrajectoryKind
    {
        static_point,
        hover,
        square_route
    };

    enum class Corner
    {
        nw,
        ne,
        se,
        sw
    };

    // Truncated AR(1) wobble on position and antenna tilt.
    struct HoverParams
    {
        double sigma_pos = 0.02;
        double sigma_angle = std::numbers::pi / 180.0;
        double rho = 0.9;
        std::uint64_t seed = 1;
        double index_rate = 60.0; // wobble samples per second (burst_rate * simos_per_burst)
    };

    // Square at constant speed and height; visits corners NW -> NE -> SE -> SW (east = +x, north = +y).
    struct SquareRouteParams
    {
        Eigen::Vector3d center{0.0, 0.0, 50.0};
        double side = 30.0;
        double speed = 2.0;
        Corner start = Corner::nw;
    };

    struct Trajectory
    {
        TrajectoryKind kind = TrajectoryKind::static_point;
        Eigen::Vector3d position = Eigen::Vector3d::Zero(); // static_point and hover base
        HoverParams hover;
        SquareRouteParams route;

        void validate() const;
    };

    inline constexpr int wobble_history = 512;

    // Snapshot index used by the wobble process for time t.
    std::int64_t wobble_index(const HoverParams &hover, double t);

    // Wobble offset for a given index: position (m) and tilt (rad).
    TxPose wobble_offset(const HoverParams &hover, std::int64_t index);

    TxPose tx_pose_at(const Trajectory &trajectory, double t);
    Eigen::Vector3d tx_position_at(const Trajectory &trajectory, double t);

    // Axis of the TX antenna for a given tilt.
    Eigen::Vector3d antenna_axis(const Eigen::Vector2d &tilt);

    // LOS plus one specular path per reflector whose image-source specular point falls inside
    // the polygon. Sorted by delay.
    PathSet synthesize_paths(const Scene &scene, const TxPose &tx, double wavelength);
    PathSet synthesize_paths(const Scene &scene, const Eigen::Vector3d &tx, double wavelength);

    // Rotation from world to array frame.
    Eigen::Matrix3d world_to_array(const Scene &scene);
}
