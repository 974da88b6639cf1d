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

#include "a2gs/capture_file.hpp"
#include "a2gs/error.hpp"
#include "a2gs/scenario.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace a2gs
{
    using nlohmann::json;

    namespace
    {
        void put_u32(std::string &buf, std::uint32_t v)
        {
            for (int i = 0; i < 4; ++i)
                buf.push_back(char((v >> (8 * i)) & 0xFFu));
        }

        std::uint32_t get_u32(const unsigned char *p)
        {
            return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
                   (std::uint32_t(p[3]) << 24);
        }

        void read_exact(std::istream &in, char *dst, std::size_t n, const char *what)
        {
            in.read(dst, std::streamsize(n));
            if (std::size_t(in.gcount()) != n)
                fail(ErrorKind::format, std::string("truncated capture file: ") + what);
        }

        RecordType parse_type(const std::string &s)
        {
            if (s == "MEAS")
                return RecordType::meas;
            if (s == "B2B")
                return RecordType::b2b;
            if (s == "CAL")
                return RecordType::calibrated;
            fail(ErrorKind::format, "unknown record type '" + s + "'");
        }

        std::uint64_t parse_hash(const json &j, const char *key)
        {
            const std::string s = j.at(key).get<std::string>();
            if (s.size() != 16)
                fail(ErrorKind::format, std::string("malformed ") + key);
            return std::stoull(s, nullptr, 16);
        }

        json header_json(const CaptureFile &f)
        {
            json records = json::array();
            for (const auto &r : f.records)
            {
                json rec = {{"timestamp", r.timestamp},
                            {"tx_position", {r.tx_pose.position.x(), r.tx_pose.position.y(), r.tx_pose.position.z()}},
                            {"tx_tilt", {r.tx_pose.tilt.x(), r.tx_pose.tilt.y()}},
                            {"seed", r.seed},
                            {"snapshot_index", r.snapshot_index}};
                rec["snr_db"] = std::isfinite(r.snr_db) ? json(r.snr_db) : json(nullptr);
                records.push_back(rec);
            }
            const auto &t = f.header.tones;
            return {{"record_type", record_type_name(f.header.type)},
                    {"config_hash", hash_hex(f.header.config_hash)},
                    {"geometry_hash", hash_hex(f.header.geometry_hash)},
                    {"snapshots", f.records.size()},
                    {"ports", f.header.ports},
                    {"tones", t.tone_count},
                    {"tone_plan",
                     {{"center_frequency", t.center_frequency},
                      {"tone_spacing", t.tone_spacing},
                      {"tone_count", t.tone_count},
                      {"nominal_bandwidth", t.nominal_bandwidth}}},
                    {"records", records}};
        }
    }

    const char *record_type_name(RecordType type)
    {
        switch (type)
        {
        case RecordType::meas:
            return "MEAS";
        case RecordType::b2b:
            return "B2B";
        case RecordType::calibrated:
            return "CAL";
        }
        return "";
    }

    std::size_t payload_bytes(const CaptureFile &file)
    {
        return file.records.size() * std::size_t(file.header.ports) * std::size_t(file.header.tones.tone_count) * 8;
    }

    void quantize(CaptureFile &file)
    {
        // Works on the interleaved re/im doubles. A per-element complex loop is
        // miscompiled by g++ 11 at -O3 (the vector epilogue drops the last element).
        for (auto &r : file.records)
        {
            Eigen::Map<Eigen::ArrayXd> flat(reinterpret_cast<double *>(r.tf.data()), 2 * r.tf.size());
            flat = flat.cast<float>().cast<double>();
        }
    }

    void write_capture(std::ostream &out, const CaptureFile &file)
    {
        const int ports = file.header.ports;
        const int tones = file.header.tones.tone_count;
        for (const auto &r : file.records)
            require(r.tf.rows() == ports && r.tf.cols() == tones, ErrorKind::dimension_mismatch,
                    "record dimensions do not match the capture header");

        const std::string header = header_json(file).dump();
        std::string prefix(capture_magic, 4);
        put_u32(prefix, capture_format_version);
        put_u32(prefix, std::uint32_t(header.size()));
        out.write(prefix.data(), std::streamsize(prefix.size()));
        out.write(header.data(), std::streamsize(header.size()));

        std::string buf(std::size_t(ports) * std::size_t(tones) * 8, '\0');
        for (const auto &r : file.records)
        {
            std::size_t o = 0;
            for (int k = 0; k < ports; ++k)
                for (int n = 0; n < tones; ++n)
                {
                    const std::complex<double> v = r.tf(k, n);
                    for (float part : {float(v.real()), float(v.imag())})
                    {
                        const auto bits = std::bit_cast<std::uint32_t>(part);
                        for (int i = 0; i < 4; ++i)
                            buf[o++] = char((bits >> (8 * i)) & 0xFFu);
                    }
                }
            out.write(buf.data(), std::streamsize(buf.size()));
        }
        if (!out)
            fail(ErrorKind::io, "failed writing capture stream");
    }

    void write_capture(const std::string &path, const CaptureFile &file)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            fail(ErrorKind::io, "cannot open " + path + " for writing");
        write_capture(out, file);
    }

    CaptureFile read_capture(std::istream &in)
    {
        unsigned char prefix[12];
        read_exact(in, reinterpret_cast<char *>(prefix), sizeof prefix, "prefix");
        if (std::memcmp(prefix, capture_magic, 4) != 0)
            fail(ErrorKind::format, "bad magic: not an A2GS capture file");
        const std::uint32_t version = get_u32(prefix + 4);
        if (version != capture_format_version)
            fail(ErrorKind::format, "unsupported capture format version " + std::to_string(version));
        const std::uint32_t header_len = get_u32(prefix + 8);
        std::string header(header_len, '\0');
        read_exact(in, header.data(), header_len, "header");

        CaptureFile f;
        json h;
        try
        {
            h = json::parse(header);
            f.header.type = parse_type(h.at("record_type").get<std::string>());
            f.header.config_hash = parse_hash(h, "config_hash");
            f.header.geometry_hash = parse_hash(h, "geometry_hash");
            f.header.ports = h.at("ports").get<int>();
            const auto &t = h.at("tone_plan");
            f.header.tones.center_frequency = t.at("center_frequency").get<double>();
            f.header.tones.tone_spacing = t.at("tone_spacing").get<double>();
            f.header.tones.tone_count = t.at("tone_count").get<int>();
            f.header.tones.nominal_bandwidth = t.at("nominal_bandwidth").get<double>();
            if (h.at("tones").get<int>() != f.header.tones.tone_count)
                fail(ErrorKind::format, "tone count disagrees with the tone plan");
            const auto &records = h.at("records");
            if (records.size() != h.at("snapshots").get<std::size_t>())
                fail(ErrorKind::format, "record metadata count disagrees with the snapshot count");
            for (const auto &r : records)
            {
                CaptureRecord rec;
                rec.timestamp = r.at("timestamp").get<double>();
                const auto &p = r.at("tx_position");
                rec.tx_pose.position = Eigen::Vector3d(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
                const auto &tl = r.at("tx_tilt");
                rec.tx_pose.tilt = Eigen::Vector2d(tl.at(0).get<double>(), tl.at(1).get<double>());
                rec.seed = r.at("seed").get<std::uint64_t>();
                rec.snapshot_index = r.at("snapshot_index").get<std::int64_t>();
                const auto &snr = r.at("snr_db");
                rec.snr_db = snr.is_null() ? std::numeric_limits<double>::infinity() : snr.get<double>();
                f.records.push_back(std::move(rec));
            }
        }
        catch (const json::exception &e)
        {
            fail(ErrorKind::format, std::string("malformed capture header: ") + e.what());
        }
        if (f.header.ports < 1 || f.header.tones.tone_count < 2)
            fail(ErrorKind::format, "capture header has invalid dimensions");

        const int ports = f.header.ports;
        const int tones = f.header.tones.tone_count;
        std::string buf(std::size_t(ports) * std::size_t(tones) * 8, '\0');
        for (auto &rec : f.records)
        {
            read_exact(in, buf.data(), buf.size(), "payload");
            rec.tf.resize(ports, tones);
            const auto *p = reinterpret_cast<const unsigned char *>(buf.data());
            for (int k = 0; k < ports; ++k)
                for (int n = 0; n < tones; ++n, p += 8)
                    rec.tf(k, n) = {double(std::bit_cast<float>(get_u32(p))), double(std::bit_cast<float>(get_u32(p + 4)))};
        }
        if (in.peek() != std::char_traits<char>::eof())
            fail(ErrorKind::format, "trailing bytes after the capture payload");
        return f;
    }

    CaptureFile read_capture(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            fail(ErrorKind::io, "cannot open capture file " + path);
        return read_capture(in);
    }

    HashCheck check_hashes(const CaptureHeader &header, std::uint64_t config_hash, std::uint64_t geometry_hash,
                           bool strict, std::ostream &warn)
    {
        HashCheck c;
        c.config_matches = header.config_hash == config_hash;
        c.geometry_matches = header.geometry_hash == geometry_hash;
        if (c.ok())
            return c;
        std::string msg = "capture provenance mismatch:";
        if (!c.config_matches)
            msg += " config hash " + hash_hex(header.config_hash) + " != " + hash_hex(config_hash);
        if (!c.geometry_matches)
            msg += " geometry hash " + hash_hex(header.geometry_hash) + " != " + hash_hex(geometry_hash);
        if (strict)
            fail(ErrorKind::hash_mismatch, msg);
        warn << "warning: " << msg << '\n';
        return c;
    }
}
