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

#include <Eigen/Core>
#include <complex>
#include <vector>

namespace a2gs
{
    enum class Polarization
    {
        V = 0,
        H = 1
    };

    // Complex (V, H) amplitude of a wave in the local basis of its arrival direction.
    using Jones = Eigen::Vector2cd;

    // Parametric element pattern: power = cos^q_az(delta_az) * cos^q_el(el), clamped below
    // by the back-lobe floor. Cross-pol leakage is set by the XPD (infinity disables it).
    struct PatternParams
    {
        double q_az = 1.0;
        double q_el = 1.0;
        double xpd_db = 12.0;
        double backlobe_db = -30.0;

        bool operator==(const PatternParams &) const = default;
    };

    struct PortDescriptor
    {
        int port_id = 0;
        int column = 0;
        int row = 0;
        Polarization polarization = Polarization::V;
        Eigen::Vector3d position = Eigen::Vector3d::Zero();
        double boresight_azimuth = 0.0;
    };

    struct ArrayGeometry
    {
        double radius = 0.1091;
        double vertical_spacing = 0.0429;
        int columns = 16;
        int rows = 4;
        PatternParams pattern;
        std::vector<PortDescriptor> ports;

        int port_count() const { return int(ports.size()); }

        // port_id = column * rows * 2 + row * 2 + pol
        int port_id(int column, int row, Polarization pol) const
        {
            return column * rows * 2 + row * 2 + int(pol);
        }

        const PortDescriptor &port(int port_id) const;
    };

    ArrayGeometry build_cylindrical_array(int columns, int rows, double radius, double vertical_spacing,
                                          const PatternParams &pattern = {});

    // 16 columns x 4 rows at half-wavelength spacing for 3.5 GHz.
    ArrayGeometry default_array();

    // Basis vectors of the (V, H) polarization frame for a wave arriving from `direction`
    // (unit vector pointing from the receiver towards the source). V is the projection of +z
    // onto the plane normal to the direction; H = phi-hat.
    Eigen::Vector3d v_hat(const Eigen::Vector3d &direction);
    Eigen::Vector3d h_hat(const Eigen::Vector3d &direction);

    double element_power_pattern(const PatternParams &pattern, double delta_azimuth, double elevation);

    // Complex response of a port to a plane wave with the given Jones vector. Direction is in
    // the array frame. The geometric phase of the port position is not included.
    std::complex<double> port_gain(const ArrayGeometry &geometry, int port_id, const Eigen::Vector3d &direction,
                                   const Jones &incident);

    const Eigen::Vector3d &port_phase_center(const ArrayGeometry &geometry, int port_id);
}
