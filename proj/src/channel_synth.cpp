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

#include "a2gs/channel_synth.hpp"
#include "a2gs/detail/counter_rng.hpp"
#include "a2gs/error.hpp"
#include "a2gs/waveform.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <string>

namespace a2gs
{
    namespace
    {
        constexpr double plane_tolerance = 1e-9;

        struct FacetFrame
        {
            Eigen::Vector3d origin;
            Eigen::Vector3d normal;
            Eigen::Vector3d e1, e2;
            std::vector<Eigen::Vector2d> polygon;
        };

        FacetFrame facet_frame(const Reflector &r, std::size_t index)
        {
            const std::string name = "reflector " + std::to_string(index);
            require(r.corners.size() >= 3, ErrorKind::invalid_argument, name + ": needs at least 3 corners");

            // Newell normal; its norm is twice the polygon area.
            Eigen::Vector3d n = Eigen::Vector3d::Zero();
            for (std::size_t i = 0; i < r.corners.size(); ++i)
                n += r.corners[i].cross(r.corners[(i + 1) % r.corners.size()]);
            const double area = 0.5 * n.norm();
            double extent = 0.0;
            for (const auto &c : r.corners)
                extent = std::max(extent, (c - r.corners[0]).norm());
            require(area > 1e-12 * std::max(1.0, extent * extent), ErrorKind::invalid_argument,
                    name + ": degenerate facet (zero area)");
            n.normalize();

            for (const auto &c : r.corners)
                require(std::abs((c - r.corners[0]).dot(n)) <= plane_tolerance * std::max(1.0, extent),
                        ErrorKind::invalid_argument, name + ": corners are not coplanar");

            FacetFrame f;
            f.origin = r.corners[0];
            f.normal = n;
            f.e1 = (r.corners[1] - r.corners[0]).normalized();
            f.e2 = n.cross(f.e1);
            for (const auto &c : r.corners)
                f.polygon.emplace_back((c - f.origin).dot(f.e1), (c - f.origin).dot(f.e2));
            return f;
        }

        bool inside_polygon(const std::vector<Eigen::Vector2d> &poly, const Eigen::Vector2d &p)
        {
            bool inside = false;
            for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
            {
                const auto &a = poly[i];
                const auto &b = poly[j];
                if ((a.y() > p.y()) != (b.y() > p.y()))
                {
                    const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
                    if (p.x() < x)
                        inside = !inside;
                }
            }
            return inside;
        }

        // Unit field direction radiated by the TX antenna along unit propagation vector k.
        Eigen::Vector3d radiated_field(const Eigen::Vector3d &axis, const Eigen::Vector3d &k)
        {
            Eigen::Vector3d e = axis - axis.dot(k) * k;
            const double n = e.norm();
            if (n < 1e-12)
                return v_hat(-k); // along the antenna axis: use the nominal vertical basis
            return e / n;
        }

        Jones project(const Eigen::Vector3cd &field, const Eigen::Vector3d &arrival)
        {
            const Eigen::Vector3d v = v_hat(arrival);
            const Eigen::Vector3d h = h_hat(arrival);
            return Jones(v.cast<std::complex<double>>().dot(field), h.cast<std::complex<double>>().dot(field));
        }

        Eigen::Vector3d any_perpendicular(const Eigen::Vector3d &n)
        {
            const Eigen::Vector3d t = std::abs(n.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
            return n.cross(t).normalized();
        }
    }

    void Scene::validate() const
    {
        for (std::size_t i = 0; i < reflectors.size(); ++i)
        {
            const auto &r = reflectors[i];
            facet_frame(r, i);
            require(std::abs(r.gamma_v) <= 1.0 + 1e-12 && std::abs(r.gamma_h) <= 1.0 + 1e-12,
                    ErrorKind::invalid_argument, "reflector " + std::to_string(i) + ": |gamma| must not exceed 1");
            require(r.cross_pol >= 0.0 && r.cross_pol <= 1.0, ErrorKind::invalid_argument,
                    "reflector " + std::to_string(i) + ": cross_pol must lie in [0, 1]");
        }
    }

    void Trajectory::validate() const
    {
        switch (kind)
        {
        case TrajectoryKind::static_point:
            break;
        case TrajectoryKind::hover:
            require(hover.sigma_pos >= 0.0 && hover.sigma_angle >= 0.0, ErrorKind::invalid_argument,
                    "hover sigmas must be non-negative");
            require(hover.rho >= 0.0 && hover.rho < 1.0, ErrorKind::invalid_argument, "hover rho must lie in [0, 1)");
            require(hover.index_rate > 0.0, ErrorKind::invalid_argument, "hover index_rate must be positive");
            break;
        case TrajectoryKind::square_route:
            require(route.side > 0.0, ErrorKind::invalid_argument, "route side must be positive");
            require(route.speed > 0.0, ErrorKind::invalid_argument, "route speed must be positive");
            break;
        }
    }

    std::int64_t wobble_index(const HoverParams &hover, double t)
    {
        return std::int64_t(std::floor(t * hover.index_rate + 1e-9));
    }

    TxPose wobble_offset(const HoverParams &hover, std::int64_t index)
    {
        require(index >= 0, ErrorKind::invalid_argument, "wobble index must be non-negative");
        Eigen::Matrix<double, 5, 1> x;
        const std::int64_t start = std::max<std::int64_t>(0, index - wobble_history);
        const double innovation = std::sqrt(1.0 - hover.rho * hover.rho);
        for (int c = 0; c < 5; ++c)
            x(c) = detail::normal(detail::mix_key(hover.seed, std::uint64_t(start), std::uint64_t(c)));
        for (std::int64_t j = start + 1; j <= index; ++j)
            for (int c = 0; c < 5; ++c)
                x(c) = hover.rho * x(c) + innovation * detail::normal(detail::mix_key(hover.seed, std::uint64_t(j), std::uint64_t(c)));

        TxPose out;
        out.position = hover.sigma_pos * x.head<3>();
        out.tilt = hover.sigma_angle * x.tail<2>();
        const double max_pos = 6.0 * hover.sigma_pos;
        const double max_tilt = 6.0 * hover.sigma_angle;
        if (out.position.norm() > max_pos)
            out.position *= max_pos / out.position.norm();
        if (out.tilt.norm() > max_tilt)
            out.tilt *= max_tilt / out.tilt.norm();
        return out;
    }

    TxPose tx_pose_at(const Trajectory &trajectory, double t)
    {
        require(t >= 0.0, ErrorKind::invalid_argument, "time must be non-negative");
        TxPose pose;
        switch (trajectory.kind)
        {
        case TrajectoryKind::static_point:
            pose.position = trajectory.position;
            break;
        case TrajectoryKind::hover:
        {
            const TxPose w = wobble_offset(trajectory.hover, wobble_index(trajectory.hover, t));
            pose.position = trajectory.position + w.position;
            pose.tilt = w.tilt;
            break;
        }
        case TrajectoryKind::square_route:
        {
            const auto &r = trajectory.route;
            const double h = 0.5 * r.side;
            const Eigen::Vector2d corners[4] = {{-h, h}, {h, h}, {h, -h}, {-h, -h}};
            const double s = std::fmod(r.speed * t, 4.0 * r.side);
            const int edge = std::min(3, int(s / r.side));
            const double frac = (s - double(edge) * r.side) / r.side;
            const int a = (int(r.start) + edge) % 4;
            const int b = (a + 1) % 4;
            const Eigen::Vector2d xy = corners[a] + frac * (corners[b] - corners[a]);
            pose.position = r.center + Eigen::Vector3d(xy.x(), xy.y(), 0.0);
            break;
        }
        }
        return pose;
    }

    Eigen::Vector3d tx_position_at(const Trajectory &trajectory, double t)
    {
        return tx_pose_at(trajectory, t).position;
    }

    Eigen::Vector3d antenna_axis(const Eigen::Vector2d &tilt)
    {
        return (Eigen::AngleAxisd(tilt.y(), Eigen::Vector3d::UnitY()) *
                Eigen::AngleAxisd(tilt.x(), Eigen::Vector3d::UnitX()) * Eigen::Vector3d::UnitZ())
            .normalized();
    }

    Eigen::Matrix3d world_to_array(const Scene &scene)
    {
        return Eigen::AngleAxisd(-scene.rx_mounting_rotation, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    }

    PathSet synthesize_paths(const Scene &scene, const TxPose &tx, double wavelength)
    {
        const Eigen::Vector3d &rx = scene.rx_position;
        const double d = (tx.position - rx).norm();
        require(d > 1e-9, ErrorKind::invalid_argument, "TX and RX positions coincide");
        require(std::isfinite(d), ErrorKind::invalid_argument, "non-finite TX position");

        const Eigen::Matrix3d to_array = world_to_array(scene);
        const Eigen::Vector3d axis = antenna_axis(tx.tilt);
        const double k0 = wavelength / (4.0 * std::numbers::pi);
        PathSet paths;

        {
            const Eigen::Vector3d k = (rx - tx.position) / d;
            const Eigen::Vector3d arrival = -k;
            PathComponent los;
            los.delay = d / speed_of_light;
            los.jones_gain = (k0 / d) * project(radiated_field(axis, k).cast<std::complex<double>>(), arrival);
            los.arrival_direction = to_array * arrival;
            los.bounce_count = 0;
            paths.push_back(los);
        }

        for (std::size_t i = 0; i < scene.reflectors.size(); ++i)
        {
            const Reflector &refl = scene.reflectors[i];
            const FacetFrame f = facet_frame(refl, i);
            const double s_tx = (tx.position - f.origin).dot(f.normal);
            const double s_rx = (rx - f.origin).dot(f.normal);
            if (std::abs(s_tx) < plane_tolerance || std::abs(s_rx) < plane_tolerance)
                fail(ErrorKind::invalid_argument, "TX or RX lies on the plane of reflector " + std::to_string(i));
            if ((s_tx > 0.0) != (s_rx > 0.0))
                continue;

            const Eigen::Vector3d image = tx.position - 2.0 * s_tx * f.normal;
            const double t = std::abs(s_rx) / (std::abs(s_rx) + std::abs(s_tx));
            const Eigen::Vector3d spec = rx + t * (image - rx);
            const Eigen::Vector2d local((spec - f.origin).dot(f.e1), (spec - f.origin).dot(f.e2));
            if (!inside_polygon(f.polygon, local))
                continue;

            const double length = (image - rx).norm();
            const Eigen::Vector3d k_in = (spec - tx.position).normalized();
            const Eigen::Vector3d k_out = (rx - spec).normalized();

            Eigen::Vector3d s_vec = k_in.cross(f.normal);
            s_vec = s_vec.norm() < 1e-12 ? any_perpendicular(f.normal) : s_vec.normalized();
            const Eigen::Vector3d p_in = s_vec.cross(k_in);
            const Eigen::Vector3d p_out = s_vec.cross(k_out);

            const Eigen::Vector3d e = radiated_field(axis, k_in);
            const double e_p = e.dot(p_in);
            const double e_s = e.dot(s_vec);
            const double co = std::sqrt(1.0 - refl.cross_pol * refl.cross_pol);
            const std::complex<double> r_p = refl.gamma_v * (co * e_p - refl.cross_pol * e_s);
            const std::complex<double> r_s = refl.gamma_h * (refl.cross_pol * e_p + co * e_s);
            const Eigen::Vector3cd field = r_p * p_out.cast<std::complex<double>>() + r_s * s_vec.cast<std::complex<double>>();

            PathComponent p;
            p.delay = length / speed_of_light;
            p.jones_gain = (k0 / length) * project(field, -k_out);
            p.arrival_direction = to_array * (-k_out);
            p.bounce_count = 1;
            paths.push_back(p);
        }

        std::stable_sort(paths.begin(), paths.end(),
                         [](const PathComponent &a, const PathComponent &b) { return a.delay < b.delay; });
        return paths;
    }

    PathSet synthesize_paths(const Scene &scene, const Eigen::Vector3d &tx, double wavelength)
    {
        return synthesize_paths(scene, TxPose{tx, Eigen::Vector2d::Zero()}, wavelength);
    }
}
