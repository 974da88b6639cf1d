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

#include <stdexcept>
#include <string>

namespace a2gs
{
    // Error categories map one-to-one onto CLI exit codes.
    enum class ErrorKind
    {
        invalid_argument = 10,
        dimension_mismatch = 11,
        schema = 12,
        io = 13,
        format = 14,
        hash_mismatch = 15,
        calibration = 16
    };

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorKind kind, const std::string &what)
            : std::runtime_error(what), kind_(kind) {}

        ErrorKind kind() const noexcept { return kind_; }

    private:
        ErrorKind kind_;
    };

    [[noreturn]] inline void fail(ErrorKind kind, const std::string &what)
    {
        throw Error(kind, what);
    }

    inline void require(bool condition, ErrorKind kind, const std::string &what)
    {
        if (!condition)
            throw Error(kind, what);
    }
}
