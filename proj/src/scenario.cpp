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

#include "a2gs/scenario.hpp"
#include "a2gs/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace a2gs
{
    using nlohmann::json;

    namespace
    {
        [[noreturn]] void schema_error(const std::string &path, const std::string &what)
        {
            fail(ErrorKind::schema, path + ": " + what);
        }

        // Reads one JSON object, tracking which keys were consumed so leftovers can be rejected.
        class ObjectReader
        {
        public:
            ObjectReader(const json &j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                    schema_error(path_, "expected an object");
            }

            std::string field(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

            const json *find(const std::string &key)
            {
                auto it = j_.find(key);
                if (it == j_.end())
                    return nullptr;
                used_.insert(key);
                return &*it;
            }

            double number(const std::string &key, double def)
            {
                const json *v = find(key);
                if (!v)
                    return def;
                if (!v->is_number())
                    schema_error(field(key), "expected a number");
                const double x = v->get<double>();
                if (!std::isfinite(x))
                    schema_error(field(key), "must be finite");
                return x;
            }

            double positive(const std::string &key, double def)
            {
                const double x = number(key, def);
                if (!(x > 0.0))
                    schema_error(field(key), "must be positive");
                return x;
            }

            double non_negative(const std::string &key, double def)
            {
                const double x = number(key, def);
                if (x < 0.0)
                    schema_error(field(key), "must be non-negative");
                return x;
            }

            int integer(const std::string &key, int def, int min)
            {
                const json *v = find(key);
                if (!v)
                    return def;
                if (!v->is_number_integer())
                    schema_error(field(key), "expected an integer");
                const auto x = v->get<long long>();
                if (x < min || x > 1000000000LL)
                    schema_error(field(key), "must be at least " + std::to_string(min));
                return int(x);
            }

            std::uint64_t seed(const std::string &key, std::uint64_t def)
            {
                const json *v = find(key);
                if (!v)
                    return def;
                if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
                    schema_error(field(key), "expected a non-negative integer");
                return v->get<std::uint64_t>();
            }

            bool boolean(const std::string &key, bool def)
            {
                const json *v = find(key);
                if (!v)
                    return def;
                if (!v->is_boolean())
                    schema_error(field(key), "expected true or false");
                return v->get<bool>();
            }

            std::string string(const std::string &key, const std::string &def)
            {
                const json *v = find(key);
                if (!v)
                    return def;
                if (!v->is_string())
                    schema_error(field(key), "expected a string");
                return v->get<std::string>();
            }

            Eigen::Vector3d vec3(const std::string &key, const Eigen::Vector3d &def)
            {
                const json *v = find(key);
                if (!v)
                    return def;
                return parse_vec3(*v, field(key));
            }

            std::complex<double> complex(const std::string &key, std::complex<double> def)
            {
                const json *v = find(key);
                if (!v)
                    return def;
                if (v->is_number())
                    return {v->get<double>(), 0.0};
                if (v->is_array() && v->size() == 2 && (*v)[0].is_number() && (*v)[1].is_number())
                    return {(*v)[0].get<double>(), (*v)[1].get<double>()};
                schema_error(field(key), "expected a number or [re, im]");
            }

            void finish() const
            {
                for (auto it = j_.begin(); it != j_.end(); ++it)
                    if (!used_.count(it.key()))
                        schema_error(field(it.key()), "unknown key");
            }

            static Eigen::Vector3d parse_vec3(const json &v, const std::string &path)
            {
                if (!v.is_array() || v.size() != 3)
                    schema_error(path, "expected [x, y, z]");
                Eigen::Vector3d out;
                for (int i = 0; i < 3; ++i)
                {
                    if (!v[std::size_t(i)].is_number())
                        schema_error(path, "expected [x, y, z]");
                    out(i) = v[std::size_t(i)].get<double>();
                }
                return out;
            }

        private:
            const json &j_;
            std::string path_;
            std::set<std::string> used_;
        };

        json vec3_json(const Eigen::Vector3d &v) { return json::array({v.x(), v.y(), v.z()}); }
        json complex_json(std::complex<double> c) { return json::array({c.real(), c.imag()}); }

        const char *kind_name(TrajectoryKind k)
        {
            switch (k)
            {
            case TrajectoryKind::static_point:
                return "static_point";
            case TrajectoryKind::hover:
                return "hover";
            case TrajectoryKind::square_route:
                return "square_route";
            }
            return "";
        }

        const char *corner_name(Corner c)
        {
            static const char *names[] = {"nw", "ne", "se", "sw"};
            return names[int(c)];
        }

        Reflector box_face(std::initializer_list<Eigen::Vector3d> corners, std::complex<double> gv,
                           std::complex<double> gh, double xp)
        {
            Reflector r;
            r.corners.assign(corners.begin(), corners.end());
            r.gamma_v = gv;
            r.gamma_h = gh;
            r.cross_pol = xp;
            return r;
        }

        // Courtyard around the receiver: ground plane, a glass facade to the north and a
        // second building face to the west.
        Scene courtyard_scene()
        {
            Scene s;
            s.rx_position = Eigen::Vector3d(0.0, 0.0, 1.5);
            // Array column 4 faces east (world +x).
            s.rx_mounting_rotation = -std::numbers::pi / 2.0;
            s.reflectors.push_back(box_face({{-200, -200, 0}, {200, -200, 0}, {200, 200, 0}, {-200, 200, 0}},
                                            {-0.3, 0.0}, {-0.6, 0.0}, 0.0));
            s.reflectors.push_back(box_face({{-40, 20, 0}, {40, 20, 0}, {40, 20, 20}, {-40, 20, 20}},
                                            {0.5, 0.0}, {0.5, 0.0}, 0.1));
            s.reflectors.push_back(box_face({{-25, -30, 0}, {-25, 30, 0}, {-25, 30, 15}, {-25, -30, 15}},
                                            {0.35, 0.0}, {0.35, 0.0}, 0.1));
            return s;
        }

        void parse_tones(ObjectReader &r, TonePlan &t)
        {
            t.center_frequency = r.positive("center_frequency", t.center_frequency);
            t.tone_spacing = r.positive("tone_spacing", t.tone_spacing);
            t.tone_count = r.integer("tone_count", t.tone_count, 2);
            t.nominal_bandwidth = r.positive("nominal_bandwidth", t.nominal_bandwidth);
            r.finish();
        }

        void parse_timing(ObjectReader &r, TimingPlan &t)
        {
            t.t_siso = r.positive("t_siso", t.t_siso);
            t.ports_per_simo = r.integer("ports_per_simo", t.ports_per_simo, 1);
            t.simos_per_burst = r.integer("simos_per_burst", t.simos_per_burst, 1);
            t.burst_rate = r.positive("burst_rate", t.burst_rate);
            r.finish();
        }

        void parse_array(ObjectReader &r, ArrayParams &a)
        {
            a.columns = r.integer("columns", a.columns, 1);
            a.rows = r.integer("rows", a.rows, 1);
            a.radius = r.positive("radius", a.radius);
            a.vertical_spacing = r.positive("vertical_spacing", a.vertical_spacing);
            if (const json *p = r.find("pattern"))
            {
                ObjectReader pr(*p, r.field("pattern"));
                a.pattern.q_az = pr.non_negative("q_az", a.pattern.q_az);
                a.pattern.q_el = pr.non_negative("q_el", a.pattern.q_el);
                if (const json *x = pr.find("xpd_db"); x && x->is_null())
                    a.pattern.xpd_db = std::numeric_limits<double>::infinity();
                else
                    a.pattern.xpd_db = pr.non_negative("xpd_db", a.pattern.xpd_db);
                a.pattern.backlobe_db = pr.number("backlobe_db", a.pattern.backlobe_db);
                if (a.pattern.backlobe_db > 0.0)
                    schema_error(pr.field("backlobe_db"), "must not be positive");
                pr.finish();
            }
            r.finish();
        }

        Reflector parse_reflector(const json &j, const std::string &path)
        {
            ObjectReader r(j, path);
            Reflector out;
            const json *corners = r.find("corners");
            if (!corners || !corners->is_array() || corners->size() < 3)
                schema_error(r.field("corners"), "expected at least 3 [x, y, z] corners");
            for (std::size_t i = 0; i < corners->size(); ++i)
                out.corners.push_back(ObjectReader::parse_vec3((*corners)[i], r.field("corners") + "[" + std::to_string(i) + "]"));
            out.gamma_v = r.complex("gamma_v", out.gamma_v);
            out.gamma_h = r.complex("gamma_h", out.gamma_h);
            out.cross_pol = r.non_negative("cross_pol", out.cross_pol);
            r.finish();
            return out;
        }

        void parse_scene(ObjectReader &r, Scene &s)
        {
            s.rx_position = r.vec3("rx_position", s.rx_position);
            s.rx_mounting_rotation = r.number("rx_mounting_rotation", s.rx_mounting_rotation);
            if (const json *refl = r.find("reflectors"))
            {
                if (!refl->is_array())
                    schema_error(r.field("reflectors"), "expected an array");
                s.reflectors.clear();
                for (std::size_t i = 0; i < refl->size(); ++i)
                    s.reflectors.push_back(parse_reflector((*refl)[i], r.field("reflectors") + "[" + std::to_string(i) + "]"));
            }
            r.finish();
        }

        void parse_trajectory(ObjectReader &r, Trajectory &t)
        {
            const std::string kind = r.string("kind", kind_name(t.kind));
            if (kind == "static_point")
                t.kind = TrajectoryKind::static_point;
            else if (kind == "hover")
                t.kind = TrajectoryKind::hover;
            else if (kind == "square_route")
                t.kind = TrajectoryKind::square_route;
            else
                schema_error(r.field("kind"), "expected static_point, hover or square_route");

            t.position = r.vec3("position", t.position);
            t.hover.sigma_pos = r.non_negative("sigma_pos", t.hover.sigma_pos);
            t.hover.sigma_angle = r.non_negative("sigma_angle", t.hover.sigma_angle);
            t.hover.rho = r.non_negative("rho", t.hover.rho);
            if (t.hover.rho >= 1.0)
                schema_error(r.field("rho"), "must be below 1");
            t.hover.seed = r.seed("seed", t.hover.seed);
            t.route.center = r.vec3("center", t.route.center);
            t.route.side = r.positive("side", t.route.side);
            t.route.speed = r.positive("speed", t.route.speed);
            const std::string corner = r.string("start_corner", corner_name(t.route.start));
            if (corner == "nw")
                t.route.start = Corner::nw;
            else if (corner == "ne")
                t.route.start = Corner::ne;
            else if (corner == "se")
                t.route.start = Corner::se;
            else if (corner == "sw")
                t.route.start = Corner::sw;
            else
                schema_error(r.field("start_corner"), "expected nw, ne, se or sw");
            r.finish();
        }

        void parse_system(ObjectReader &r, SystemParams &s)
        {
            s.ripple_db = r.non_negative("ripple_db", s.ripple_db);
            s.port_gain_db = r.non_negative("port_gain_db", s.port_gain_db);
            if (s.port_gain_db > 3.0)
                schema_error(r.field("port_gain_db"), "must not exceed 3 dB");
            s.phase_drift_deg = r.non_negative("phase_drift_deg", s.phase_drift_deg);
            s.amplitude_jitter_db = r.non_negative("amplitude_jitter_db", s.amplitude_jitter_db);
            s.seed = r.seed("seed", s.seed);
            s.ideal = r.boolean("ideal", s.ideal);
            r.finish();
        }

        void parse_attenuator(ObjectReader &r, AttenuatorModel &a)
        {
            a.nominal_loss_db = r.positive("nominal_loss_db", a.nominal_loss_db);
            a.ripple_db = r.non_negative("ripple_db", a.ripple_db);
            r.finish();
        }

        void parse_gate(ObjectReader &r, GateConfig &g)
        {
            g.noise_margin_db = r.positive("noise_margin_db", g.noise_margin_db);
            g.peak_margin_db = r.positive("peak_margin_db", g.peak_margin_db);
            g.delay_gate = r.positive("delay_gate", g.delay_gate);
            g.noise_window_fraction = r.positive("noise_window_fraction", g.noise_window_fraction);
            if (g.noise_window_fraction >= 1.0)
                schema_error(r.field("noise_window_fraction"), "must be below 1");
            r.finish();
        }

        void parse_capture(ObjectReader &r, CaptureSettings &c)
        {
            c.snr_db = r.number("snr_db", c.snr_db);
            c.noise = r.boolean("noise", c.noise);
            c.seed = r.seed("seed", c.seed);
            c.burst_count = r.integer("burst_count", c.burst_count, 1);
            c.burst_stride = r.integer("burst_stride", c.burst_stride, 1);
            c.simos_used = r.integer("simos_used", c.simos_used, 0);
            c.b2b_snr_db = r.number("b2b_snr_db", c.b2b_snr_db);
            c.b2b_snapshots = r.integer("b2b_snapshots", c.b2b_snapshots, 1);
            c.b2b_seed = r.seed("b2b_seed", c.b2b_seed);
            r.finish();
        }

        template <typename F>
        void section(ObjectReader &root, const char *key, F &&parse)
        {
            if (const json *j = root.find(key))
            {
                ObjectReader r(*j, key);
                parse(r);
            }
        }

        // Re-raise validation failures as schema errors naming the section.
        template <typename F>
        void checked(const std::string &path, F &&f)
        {
            try
            {
                f();
            }
            catch (const Error &e)
            {
                schema_error(path, e.what());
            }
        }
    }

    ArrayGeometry ScenarioConfig::geometry() const
    {
        return build_cylindrical_array(array.columns, array.rows, array.radius, array.vertical_spacing, array.pattern);
    }

    std::vector<double> ScenarioConfig::timestamps() const
    {
        timing.validate();
        const int simos = capture.simos_used > 0 ? std::min(capture.simos_used, timing.simos_per_burst)
                                                 : timing.simos_per_burst;
        std::vector<double> out;
        for (int b = 0; b < capture.burst_count; ++b)
            for (int j = 0; j < simos; ++j)
                out.push_back(double(b * capture.burst_stride) / timing.burst_rate + double(j) * timing.simo_duration());
        return out;
    }

    void ScenarioConfig::validate() const
    {
        checked("tones", [&] { tones.validate(); });
        checked("timing", [&] { timing.validate(); });
        const int ports = array.columns * array.rows * 2;
        if (timing.ports_per_simo != ports)
            schema_error("timing.ports_per_simo", "must equal the array port count " + std::to_string(ports));
        checked("array", [&] { geometry(); });
        checked("scene", [&] { scene.validate(); });
        checked("trajectory", [&] { trajectory.validate(); });
        if (trajectory.kind == TrajectoryKind::hover &&
            std::abs(trajectory.hover.index_rate - timing.burst_rate * double(timing.simos_per_burst)) > 1e-12)
            schema_error("trajectory", "hover index rate must equal burst_rate * simos_per_burst");
        checked("system", [&] { system.validate(); });
        checked("attenuator", [&] { attenuator.validate(); });
        checked("gate", [&] { gate.validate(tones.max_unambiguous_delay()); });
    }

    std::vector<std::string> preset_names()
    {
        return {"paper-static", "paper-hover", "paper-route"};
    }

    ScenarioConfig preset_scenario(std::string_view name)
    {
        ScenarioConfig c;
        c.name = std::string(name);
        c.scene = courtyard_scene();
        c.trajectory.hover.index_rate = c.timing.burst_rate * double(c.timing.simos_per_burst);
        if (name == "paper-static" || name == "paper-hover")
        {
            // Drone about 12 m east of the receiver, antenna 1.8 m above ground.
            c.trajectory.position = Eigen::Vector3d(12.0, 0.0, 1.8);
            c.trajectory.kind = name == "paper-static" ? TrajectoryKind::static_point : TrajectoryKind::hover;
            // Tuned so the hover LOS-bin power std lands near 0.5 dB.
            if (name == "paper-hover")
                c.trajectory.hover.sigma_pos = 0.04;
        }
        else if (name == "paper-route")
        {
            c.trajectory.kind = TrajectoryKind::square_route;
            c.trajectory.route = SquareRouteParams{};
            // One lap (60 s) sampled once per second.
            c.capture.burst_count = 60;
            c.capture.burst_stride = 20;
            c.capture.simos_used = 1;
        }
        else
            fail(ErrorKind::schema, "preset: unknown preset '" + std::string(name) + "'");
        return c;
    }

    ScenarioConfig parse_scenario(const json &document)
    {
        ObjectReader root(document, "");
        ScenarioConfig c = preset_scenario("paper-static");
        c.name = "custom";
        if (const json *p = root.find("preset"))
        {
            if (!p->is_string())
                schema_error("preset", "expected a string");
            c = preset_scenario(p->get<std::string>());
        }
        c.name = root.string("name", c.name);
        section(root, "tones", [&](ObjectReader &r) { parse_tones(r, c.tones); });
        section(root, "timing", [&](ObjectReader &r) { parse_timing(r, c.timing); });
        section(root, "array", [&](ObjectReader &r) { parse_array(r, c.array); });
        section(root, "scene", [&](ObjectReader &r) { parse_scene(r, c.scene); });
        section(root, "trajectory", [&](ObjectReader &r) { parse_trajectory(r, c.trajectory); });
        section(root, "system", [&](ObjectReader &r) { parse_system(r, c.system); });
        section(root, "attenuator", [&](ObjectReader &r) { parse_attenuator(r, c.attenuator); });
        section(root, "gate", [&](ObjectReader &r) { parse_gate(r, c.gate); });
        section(root, "capture", [&](ObjectReader &r) { parse_capture(r, c.capture); });
        root.finish();
        c.trajectory.hover.index_rate = c.timing.burst_rate * double(c.timing.simos_per_burst);
        c.validate();
        return c;
    }

    ScenarioConfig parse_scenario_text(std::string_view text)
    {
        json doc;
        try
        {
            doc = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            fail(ErrorKind::schema, std::string("scenario is not valid JSON: ") + e.what());
        }
        return parse_scenario(doc);
    }

    ScenarioConfig load_scenario(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            fail(ErrorKind::io, "cannot open scenario file " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_scenario_text(ss.str());
    }

    json geometry_to_json(const ArrayParams &a)
    {
        json pattern = {{"q_az", a.pattern.q_az},
                        {"q_el", a.pattern.q_el},
                        {"backlobe_db", a.pattern.backlobe_db}};
        pattern["xpd_db"] = std::isinf(a.pattern.xpd_db) ? json(nullptr) : json(a.pattern.xpd_db);
        return {{"columns", a.columns},
                {"rows", a.rows},
                {"radius", a.radius},
                {"vertical_spacing", a.vertical_spacing},
                {"pattern", pattern}};
    }

    json scenario_to_json(const ScenarioConfig &c)
    {
        json refl = json::array();
        for (const auto &r : c.scene.reflectors)
        {
            json corners = json::array();
            for (const auto &p : r.corners)
                corners.push_back(vec3_json(p));
            refl.push_back({{"corners", corners},
                            {"gamma_v", complex_json(r.gamma_v)},
                            {"gamma_h", complex_json(r.gamma_h)},
                            {"cross_pol", r.cross_pol}});
        }
        const auto &t = c.trajectory;
        return {
            {"name", c.name},
            {"tones",
             {{"center_frequency", c.tones.center_frequency},
              {"tone_spacing", c.tones.tone_spacing},
              {"tone_count", c.tones.tone_count},
              {"nominal_bandwidth", c.tones.nominal_bandwidth}}},
            {"timing",
             {{"t_siso", c.timing.t_siso},
              {"ports_per_simo", c.timing.ports_per_simo},
              {"simos_per_burst", c.timing.simos_per_burst},
              {"burst_rate", c.timing.burst_rate}}},
            {"array", geometry_to_json(c.array)},
            {"scene",
             {{"rx_position", vec3_json(c.scene.rx_position)},
              {"rx_mounting_rotation", c.scene.rx_mounting_rotation},
              {"reflectors", refl}}},
            {"trajectory",
             {{"kind", kind_name(t.kind)},
              {"position", vec3_json(t.position)},
              {"sigma_pos", t.hover.sigma_pos},
              {"sigma_angle", t.hover.sigma_angle},
              {"rho", t.hover.rho},
              {"seed", t.hover.seed},
              {"center", vec3_json(t.route.center)},
              {"side", t.route.side},
              {"speed", t.route.speed},
              {"start_corner", corner_name(t.route.start)}}},
            {"system",
             {{"ripple_db", c.system.ripple_db},
              {"port_gain_db", c.system.port_gain_db},
              {"phase_drift_deg", c.system.phase_drift_deg},
              {"amplitude_jitter_db", c.system.amplitude_jitter_db},
              {"seed", c.system.seed},
              {"ideal", c.system.ideal}}},
            {"attenuator", {{"nominal_loss_db", c.attenuator.nominal_loss_db}, {"ripple_db", c.attenuator.ripple_db}}},
            {"gate",
             {{"noise_margin_db", c.gate.noise_margin_db},
              {"peak_margin_db", c.gate.peak_margin_db},
              {"delay_gate", c.gate.delay_gate},
              {"noise_window_fraction", c.gate.noise_window_fraction}}},
            {"capture",
             {{"snr_db", c.capture.snr_db},
              {"noise", c.capture.noise},
              {"seed", c.capture.seed},
              {"burst_count", c.capture.burst_count},
              {"burst_stride", c.capture.burst_stride},
              {"simos_used", c.capture.simos_used},
              {"b2b_snr_db", c.capture.b2b_snr_db},
              {"b2b_snapshots", c.capture.b2b_snapshots},
              {"b2b_seed", c.capture.b2b_seed}}}};
    }

    std::uint64_t fnv1a64(std::string_view bytes)
    {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char b : bytes)
        {
            h ^= b;
            h *= 0x100000001b3ull;
        }
        return h;
    }

    std::uint64_t config_hash(const ScenarioConfig &config)
    {
        return fnv1a64(scenario_to_json(config).dump());
    }

    std::uint64_t geometry_hash(const ArrayParams &array)
    {
        return fnv1a64(geometry_to_json(array).dump());
    }

    std::string hash_hex(std::uint64_t hash)
    {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
        return buf;
    }
}
