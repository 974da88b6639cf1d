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

#include "a2gs/capture_sim.hpp"
#include "a2gs/waveform.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace a2gs
{
    enum class RecordType
    {
        meas,
        b2b,
        calibrated
    };

    const char *record_type_name(RecordType type);

    inline constexpr char capture_magic[4] = {'A', '2', 'G', 'S'};
    inline constexpr std::uint32_t capture_format_version = 1;

    struct CaptureHeader
    {
        RecordType type = RecordType::meas;
        std::uint64_t config_hash = 0;
        std::uint64_t geometry_hash = 0;
        int ports = 0;
        TonePlan tones;
    };

    // Layout (all integers little-endian):
    //   "A2GS" | u32 version | u32 header length | header JSON (UTF-8) | payload
    // The payload holds the snapshots in time order, port-major with tones innermost, each
    // value as two IEEE-754 binary32 numbers (real, imaginary). Per-snapshot metadata
    // (timestamp, pose, seed, SNR) lives in the header's "records" array.
    struct CaptureFile
    {
        CaptureHeader header;
        std::vector<CaptureRecord> records;
    };

    void write_capture(std::ostream &out, const CaptureFile &file);
    void write_capture(const std::string &path, const CaptureFile &file);
    CaptureFile read_capture(std::istream &in);
    CaptureFile read_capture(const std::string &path);

    std::size_t payload_bytes(const CaptureFile &file);

    // Rounds every tf value to binary32, the precision stored on disk.
    void quantize(CaptureFile &file);

    struct HashCheck
    {
        bool config_matches = true;
        bool geometry_matches = true;
        bool ok() const { return config_matches && geometry_matches; }
    };

    // Compares header hashes with the expected ones. Mismatches print a warning to `warn`,
    // or throw with ErrorKind::hash_mismatch when strict.
    HashCheck check_hashes(const CaptureHeader &header, std::uint64_t config_hash, std::uint64_t geometry_hash,
                           bool strict, std::ostream &warn);
}
