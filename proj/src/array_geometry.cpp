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

#include "a2gs/array_geometry.hpp"
#include "a2gs/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace a2gs
{
    const PortDescriptor &ArrayGeometry::port(int id) const
    {
        if (id < 0 || id >= port_count())
            fail(ErrorKind::invalid_argument, "unknown port_id " + std::to_string(id));
        return ports[std::size_t(id)];
    }

    ArrayGeometry build_cylindrical_array(int columns, int rows, double radius, double vertical_spacing,
                                          const PatternParams &pattern)
    {
        require(columns >= 1, ErrorKind::invalid_argument, "columns must be at least 1");
        require(rows >= 1, ErrorKind::invalid_argument, "rows must be at least 1");
        require(radius > 0.0, ErrorKind::invalid_argument, "radius must be positive");
        require(vertical_spacing > 0.0 || rows == 1, ErrorKind::invalid_argument,
                "vertical_spacing must be positive");
        require(pattern.q_az >= 0.0 && pattern.q_el >= 0.0, ErrorKind::invalid_argument,
                "pattern exponents must be non-negative");
        require(pattern.xpd_db >= 0.0, ErrorKind::invalid_argument, "xpd_db must be non-negative");
        require(pattern.backlobe_db <= 0.0, ErrorKind::invalid_argument, "backlobe_db must not be positive");

        ArrayGeometry g;
        g.radius = radius;
        g.vertical_spacing = vertical_spacing;
        g.columns = columns;
        g.rows = rows;
        g.pattern = pattern;
        g.ports.reserve(std::size_t(columns * rows * 2));

        for (int c = 0; c < columns; ++c)
        {
            const double az = 2.0 * std::numbers::pi * double(c) / double(columns);
            for (int r = 0; r < rows; ++r)
            {
                const double z = (double(r) - 0.5 * double(rows - 1)) * vertical_spacing;
                const Eigen::Vector3d pos(radius * std::cos(az), radius * std::sin(az), z);
                for (int p = 0; p < 2; ++p)
                {
                    PortDescriptor d;
                    d.port_id = int(g.ports.size());
                    d.column = c;
                    d.row = r;
                    d.polarization = Polarization(p);
                    d.position = pos;
                    d.boresight_azimuth = az;
                    g.ports.push_back(d);
                }
            }
        }
        return g;
    }

    ArrayGeometry default_array()
    {
        return build_cylindrical_array(16, 4, 0.1091, 0.0429);
    }

    Eigen::Vector3d v_hat(const Eigen::Vector3d &direction)
    {
        // -theta-hat of the spherical frame
        const double r_xy = std::hypot(direction.x(), direction.y());
        const double phi = std::atan2(direction.y(), direction.x());
        const double cos_theta = direction.z();
        return Eigen::Vector3d(-cos_theta * std::cos(phi), -cos_theta * std::sin(phi), r_xy);
    }

    Eigen::Vector3d h_hat(const Eigen::Vector3d &direction)
    {
        const double phi = std::atan2(direction.y(), direction.x());
        return Eigen::Vector3d(-std::sin(phi), std::cos(phi), 0.0);
    }

    double element_power_pattern(const PatternParams &pattern, double delta_azimuth, double elevation)
    {
        const double floor = std::pow(10.0, pattern.backlobe_db / 10.0);
        const double ca = std::cos(delta_azimuth);
        const double ce = std::cos(elevation);
        double p = 0.0;
        if (ca > 0.0 && ce > 0.0)
            p = std::pow(ca, pattern.q_az) * std::pow(ce, pattern.q_el);
        return std::max(p, floor);
    }

    std::complex<double> port_gain(const ArrayGeometry &geometry, int port_id, const Eigen::Vector3d &direction,
                                   const Jones &incident)
    {
        const PortDescriptor &port = geometry.port(port_id);
        const double az = std::atan2(direction.y(), direction.x());
        const double el = std::atan2(direction.z(), std::hypot(direction.x(), direction.y()));
        const double amp = std::sqrt(element_power_pattern(geometry.pattern, az - port.boresight_azimuth, el));
        const double leak = std::isinf(geometry.pattern.xpd_db) ? 0.0 : std::pow(10.0, -geometry.pattern.xpd_db / 20.0);

        const int co = int(port.polarization);
        return amp * (incident(co) + leak * incident(1 - co));
    }

    const Eigen::Vector3d &port_phase_center(const ArrayGeometry &geometry, int port_id)
    {
        return geometry.port(port_id).position;
    }
}
