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

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace a2gs::detail
{
    // Counter-based random numbers: every draw is a pure function of its key, so results do
    // not depend on evaluation order or thread count.
    constexpr std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    constexpr std::uint64_t mix_key(std::uint64_t a, std::uint64_t b)
    {
        return splitmix64(a ^ splitmix64(b + 0x632BE59BD9B4E019ull));
    }

    template <typename... Rest>
    constexpr std::uint64_t mix_key(std::uint64_t a, std::uint64_t b, Rest... rest)
    {
        return mix_key(mix_key(a, b), std::uint64_t(rest)...);
    }

    // Uniform in (0, 1), never exactly 0.
    inline double to_unit(std::uint64_t bits)
    {
        return (double(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    // Accepted point of Marsaglia's polar method: (x, y) uniform in the unit disc, s = x^2 + y^2.
    // Candidates come from successive counters of the key.
    struct PolarPoint
    {
        double x, y, s;
    };

    inline PolarPoint polar_point(std::uint64_t key)
    {
        for (std::uint64_t attempt = 0;; ++attempt)
        {
            const std::uint64_t bits = splitmix64(key + attempt * 0xD1B54A32D192ED03ull);
            const double x = double(std::int64_t(bits) >> 32) * 0x1.0p-31 + 0x1.0p-32;
            const double y = double(std::int32_t(std::uint32_t(bits))) * 0x1.0p-31 + 0x1.0p-32;
            const double s = x * x + y * y;
            if (s < 1.0 && s > 0.0)
                return {x, y, s};
        }
    }

    // Pair of independent standard normals from one key.
    inline std::pair<double, double> normal_pair(std::uint64_t key)
    {
        const PolarPoint p = polar_point(key);
        const double f = std::sqrt(-2.0 * std::log(p.s) / p.s);
        return {p.x * f, p.y * f};
    }

    // Uniform random bit generator over successive counters of one key, for use with standard
    // or Boost distributions without giving up counter-based reproducibility.
    struct CounterEngine
    {
        using result_type = std::uint64_t;
        std::uint64_t key;
        std::uint64_t counter = 0;

        static constexpr result_type min() { return 0; }
        static constexpr result_type max() { return ~result_type(0); }
        result_type operator()() { return splitmix64(key + (counter++) * 0xD1B54A32D192ED03ull); }
    };

    inline double normal(std::uint64_t key) { return normal_pair(key).first; }

    inline double uniform(std::uint64_t key) { return to_unit(splitmix64(key)); }

    // Circular complex Gaussian with E|z|^2 = variance.
    inline std::complex<double> complex_normal(std::uint64_t key, double variance)
    {
        const auto [a, b] = normal_pair(key);
        const double s = std::sqrt(0.5 * variance);
        return {s * a, s * b};
    }
}
