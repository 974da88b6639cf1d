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

#include <iosfwd>
#include <string>
#include <vector>

namespace a2gs
{
    struct SelftestResult
    {
        std::string name;
        bool passed = false;
        std::string detail;
    };

    // Invariant suite over small synthetic scenarios. Prints one PASS/FAIL line per check.
    std::vector<SelftestResult> run_selftest(std::ostream &log);

    inline bool all_passed(const std::vector<SelftestResult> &results)
    {
        for (const auto &r : results)
            if (!r.passed)
                return false;
        return !results.empty();
    }
}
