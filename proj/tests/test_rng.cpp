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
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "gscm/rng.hpp"

using namespace gscm;

TEST_CASE("philox4x32-10 known-answer vectors")
{
    // reference outputs of the published Philox4x32-10 test vectors
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("same seed and key reproduce the sequence")
{
    const StreamKey key{3, 7, 1, 42, Stage::Lsp};
    RngStream a(99, key), b(99, key);
    for (int i = 0; i < 1000; ++i)
        REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct keys give distinct streams")
{
    std::set<std::uint64_t> firsts;
    std::vector<StreamKey> keys;
    for (std::uint32_t drop : {0u, 1u})
        for (std::uint32_t site : {0u, 1u, 18u})
            for (std::uint32_t sector : {0u, 2u, kSiteLevel})
                for (std::uint32_t ue : {0u, 569u})
                    for (Stage st : {Stage::Lsp, Stage::Phases})
                        keys.push_back({drop, site, sector, ue, st});
    for (const StreamKey& k : keys)
    {
        RngStream r(5, k);
        firsts.insert(r.next_u64());
    }
    CHECK(firsts.size() == keys.size());

    RngStream s1(1, keys[0]), s2(2, keys[0]);
    CHECK(s1.next_u64() != s2.next_u64());
}

TEST_CASE("adjacent streams are uncorrelated")
{
    RngStream a(7, {0, 0, 0, 0, Stage::Test}), b(7, {0, 0, 0, 1, Stage::Test});
    const int n = 100000;
    double sab = 0, sa = 0, sb = 0, saa = 0, sbb = 0;
    for (int i = 0; i < n; ++i)
    {
        const double x = a.uniform(), y = b.uniform();
        sab += x * y;
        sa += x;
        sb += y;
        saa += x * x;
        sbb += y * y;
    }
    const double cov = sab / n - (sa / n) * (sb / n);
    const double rho = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
    CHECK(std::abs(rho) < 0.02);
}

TEST_CASE("uniform stays in the open unit interval with the right moments")
{
    RngStream r(11, {});
    const int n = 200000;
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i)
    {
        const double u = r.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        s += u;
        ss += u * u;
    }
    CHECK(s / n == doctest::Approx(0.5).epsilon(0.005));
    CHECK(ss / n - (s / n) * (s / n) == doctest::Approx(1.0 / 12.0).epsilon(0.01));
}

TEST_CASE("normal draws have unit variance and zero mean")
{
    RngStream r(12, {});
    const int n = 200000;
    double s = 0, ss = 0, s4 = 0;
    for (int i = 0; i < n; ++i)
    {
        const double z = r.normal();
        s += z;
        ss += z * z;
        s4 += z * z * z * z;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(ss / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("uniform_int covers its range evenly")
{
    RngStream r(13, {});
    std::map<int, int> counts;
    const int n = 60000;
    for (int i = 0; i < n; ++i)
        ++counts[r.uniform_int(-1, 4)];
    REQUIRE(counts.size() == 6);
    CHECK(counts.begin()->first == -1);
    CHECK(counts.rbegin()->first == 4);
    const double expect = n / 6.0, sigma = std::sqrt(n * (1.0 / 6.0) * (5.0 / 6.0));
    for (const auto& [v, c] : counts)
        CHECK(std::abs(c - expect) < 4.0 * sigma);
}

TEST_CASE("shuffle is a permutation")
{
    RngStream r(14, {});
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    r.shuffle(std::span<int>(v));
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i)
        CHECK(sorted[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("bernoulli hits its probability")
{
    RngStream r(15, {});
    int hits = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        hits += r.bernoulli(0.3) ? 1 : 0;
    CHECK(std::abs(hits / double(n) - 0.3) < 3.0 * std::sqrt(0.21 / n) + 1e-12);
    RngStream q(16, {});
    for (int i = 0; i < 100; ++i)
    {
        CHECK(q.bernoulli(1.0));
        CHECK_FALSE(q.bernoulli(0.0));
    }
}
