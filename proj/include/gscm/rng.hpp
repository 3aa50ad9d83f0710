// SPDX-License-Identifier: Apache-2.0
//
// gscm3d: 3D geometry-based stochastic channel model simulator
// Copyright (C) 2026 The gscm3d authors
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

#include <array>
#include <cstdint>
#include <span>
#include <utility>

namespace gscm {

/// Philox4x32-10 block cipher (Salmon et al. counter-based generator).
/// Maps a 128-bit counter and a 64-bit key to 128 random bits.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/// Tags separating the random draws of one simulation object.
enum class Stage : std::uint8_t
{
    Placement = 1,
    LosState = 2,
    EnvHeight = 3,
    Lsp = 4,
    Delays = 5,
    Powers = 6,
    Azimuth = 7,
    Zenith = 8,
    Coupling = 9,
    Xpr = 10,
    Phases = 11,
    ShadowFading = 12,
    Test = 255,
};

/// Sector value used for draws shared by all sectors of a site.
inline constexpr std::uint32_t kSiteLevel = 0xff;

/// Hierarchical key of a random substream.
struct StreamKey
{
    std::uint32_t drop = 0;
    std::uint32_t site = 0;   // < 65536
    std::uint32_t sector = 0; // < 256, kSiteLevel for site-wide draws
    std::uint32_t ue = 0;
    Stage stage = Stage::Test;
};

/// A deterministic random stream addressed by (seed, StreamKey).
///
/// Two streams built from the same seed and key produce the same sequence;
/// streams with distinct keys use disjoint Philox counter ranges. All
/// distribution transforms are implemented here so results do not depend on
/// the standard library implementation.
class RngStream
{
  public:
    RngStream(std::uint64_t seed, StreamKey key);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    /// Uniform on (lo, hi).
    double uniform(double lo, double hi);
    /// Standard normal (Box-Muller).
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    /// Uniform integer on [lo, hi] (inclusive), rejection sampled.
    int uniform_int(int lo, int hi);
    bool bernoulli(double p);

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::span<T> values)
    {
        for (std::size_t i = values.size(); i > 1; --i)
        {
            auto j = static_cast<std::size_t>(uniform_int(0, static_cast<int>(i - 1)));
            std::swap(values[i - 1], values[j]);
        }
    }

    /// Name of the pinned generator, recorded in run manifests.
    static constexpr const char* generator_name() { return "philox4x32-10"; }

  private:
    void refill();

    PhiloxKey key_{};
    PhiloxCounter base_{};
    std::uint32_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int pos_ = 4;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

} // namespace gscm
