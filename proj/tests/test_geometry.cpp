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

#include <cmath>
#include <map>
#include <set>

#include "gscm/error.hpp"
#include "gscm/geometry.hpp"

using namespace gscm;

TEST_CASE("layout site counts")
{
    const Scenario uma = Scenario::defaults(ScenarioKind::UMa);
    for (int r = 0; r <= 3; ++r)
    {
        const NetworkLayout l = build_layout(uma, r, false);
        CHECK(l.sites.size() == static_cast<std::size_t>(1 + 3 * r * (r + 1)));
        CHECK(l.sector_count() == 3 * l.sites.size());
    }
    CHECK(build_layout(uma, 0, true).sites.size() == 1);
    CHECK(build_layout(uma, 2, true).sector_count() == 57);
    CHECK_THROWS_AS(build_layout(uma, -1, false), ConfigError);
}

TEST_CASE("first ring sits at one inter-site distance")
{
    const NetworkLayout l = build_layout(Scenario::defaults(ScenarioKind::UMa), 1, false);
    REQUIRE(l.sites.size() == 7);
    const Point3 c = l.sites[0].position;
    for (std::size_t i = 1; i < 7; ++i)
    {
        const Vec3 d = l.sites[i].position - c;
        CHECK(std::hypot(d.x, d.y) == doctest::Approx(500.0).epsilon(1e-12));
    }
}

TEST_CASE("lattice pitch and sector bearings")
{
    const NetworkLayout l = build_layout(Scenario::defaults(ScenarioKind::UMi), 2, false);
    for (std::size_t i = 0; i < l.sites.size(); ++i)
    {
        double nearest = 1e9;
        for (std::size_t j = 0; j < l.sites.size(); ++j)
            if (i != j)
            {
                const Vec3 d = l.sites[i].position - l.sites[j].position;
                nearest = std::min(nearest, std::hypot(d.x, d.y));
            }
        CHECK(nearest == doctest::Approx(200.0).epsilon(1e-12));
        CHECK(l.sites[i].position.z == 10.0);
        std::set<long> bearings;
        for (double b : l.sites[i].bearings_deg)
            bearings.insert(std::lround(std::fmod(b + 360.0, 360.0)));
        CHECK(bearings.size() == 3);
    }
}

TEST_CASE("UE height examples")
{
    // direct evaluation of h = 3 (n_fl - 1) + 1.5
    CHECK(kFloorHeight * (1 - 1) + kMinUeHeight == 1.5);
    CHECK(kFloorHeight * (8 - 1) + kMinUeHeight == 22.5);

    RngStream rng(1, {});
    for (int i = 0; i < 1000; ++i)
    {
        const FloorDraw f = sample_ue_height(rng, false);
        CHECK(f.floor == 0);
        CHECK(f.building_floors == 0);
        CHECK(f.height == 1.5);
    }
}

TEST_CASE("indoor height distribution matches exact enumeration")
{
    // oracle: enumerate (N_fl, n_fl) pairs
    std::map<double, double> exact;
    for (int nb = 4; nb <= 8; ++nb)
        for (int nf = 1; nf <= nb; ++nf)
            exact[3.0 * (nf - 1) + 1.5] += (1.0 / 5.0) * (1.0 / nb);
    CHECK(exact[22.5] == doctest::Approx(0.025).epsilon(1e-12));
    CHECK(exact[1.5] == doctest::Approx(0.1769).epsilon(1e-3));

    RngStream rng(2024, {0, 0, 0, 0, Stage::Placement});
    const int n = 100000;
    std::map<double, int> counts;
    for (int i = 0; i < n; ++i)
    {
        const FloorDraw f = sample_ue_height(rng, true);
        REQUIRE(f.building_floors >= 4);
        REQUIRE(f.building_floors <= 8);
        REQUIRE(f.floor >= 1);
        REQUIRE(f.floor <= f.building_floors);
        REQUIRE(f.height == 3.0 * (f.floor - 1) + 1.5);
        ++counts[f.height];
    }
    CHECK(counts.size() == exact.size());
    for (const auto& [h, p] : exact)
    {
        const double freq = counts[h] / double(n);
        CHECK(std::abs(freq - p) <= 3.0 * std::sqrt(p * (1.0 - p) / n));
    }
    CHECK(std::abs(counts[22.5] / double(n) - 0.025) <= 0.003);
    CHECK(std::abs(counts[1.5] / double(n) - 0.1769) <= 0.005);
}

TEST_CASE("drop_ue respects indoor fraction, height support and minimum distance")
{
    const NetworkLayout l = build_layout(Scenario::defaults(ScenarioKind::UMa), 1, true);
    DropParams p;

    SUBCASE("outdoor only")
    {
        p.indoor_fraction = 0.0;
        for (std::uint32_t i = 0; i < 2000; ++i)
        {
            RngStream rng(3, {0, 0, 0, i, Stage::Placement});
            const UEState u = drop_ue(rng, l, 0, static_cast<int>(i % 3), p);
            CHECK_FALSE(u.indoor);
            CHECK(u.height == 1.5);
            CHECK(u.indoor_depth == 0.0);
        }
    }
    SUBCASE("indoor only covers every floor")
    {
        p.indoor_fraction = 1.0;
        std::set<double> heights;
        for (std::uint32_t i = 0; i < 10000; ++i)
        {
            RngStream rng(4, {0, 0, 0, i, Stage::Placement});
            const UEState u = drop_ue(rng, l, i % 7, static_cast<int>(i % 3), p);
            CHECK(u.indoor);
            CHECK(u.indoor_depth >= 0.0);
            CHECK(u.indoor_depth <= 25.0);
            heights.insert(u.height);
        }
        std::set<double> expect;
        for (int k = 0; k < 8; ++k)
            expect.insert(1.5 + 3.0 * k);
        CHECK(heights == expect);
    }
    SUBCASE("minimum distance")
    {
        p.min_distance_2d = 35.0;
        double min_d = 1e9;
        for (std::uint32_t i = 0; i < 10000; ++i)
        {
            RngStream rng(5, {0, 0, 0, i, Stage::Placement});
            const std::size_t site = i % 7;
            const UEState u = drop_ue(rng, l, site, static_cast<int>(i % 3), p);
            const Vec3 d = u.position - l.sites[site].position;
            min_d = std::min(min_d, std::hypot(d.x, d.y));
            CHECK(u.home_site == site);
        }
        CHECK(min_d >= 35.0);
    }
    SUBCASE("impossible constraint")
    {
        p.min_distance_2d = 10000.0;
        p.max_retries = 100;
        RngStream rng(6, {});
        CHECK_THROWS_AS(drop_ue(rng, l, 0, 0, p), GeometryError);
    }
    SUBCASE("bad fraction")
    {
        p.indoor_fraction = 1.5;
        RngStream rng(6, {});
        CHECK_THROWS_AS(drop_ue(rng, l, 0, 0, p), ConfigError);
    }
}

TEST_CASE("link geometry examples")
{
    const LinkGeometry a = compute_link_geometry({0, 0, 25}, 0.0, {100, 0, 1.5});
    CHECK(a.d_2d == doctest::Approx(100.0));
    CHECK(a.d_3d == doctest::Approx(std::sqrt(100.0 * 100.0 + 23.5 * 23.5)));
    CHECK(a.d_3d == doctest::Approx(102.72).epsilon(1e-4));
    CHECK(a.los_zod > 90.0);
    CHECK(a.los_aod == doctest::Approx(0.0));

    const LinkGeometry b = compute_link_geometry({0, 0, 25}, 0.0, {100, 0, 25});
    CHECK(b.los_zod == doctest::Approx(90.0).epsilon(1e-14));

    const LinkGeometry c = compute_link_geometry({0, 0, 10}, 0.0, {10, 0, 22.5});
    CHECK(c.los_zod < 90.0);

    CHECK_THROWS_AS(compute_link_geometry({5, 5, 25}, 0.0, {5, 5, 1.5}), GeometryError);
}

TEST_CASE("link geometry invariants")
{
    RngStream rng(8, {});
    for (int i = 0; i < 10000; ++i)
    {
        const Point3 enb{rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(5, 40)};
        const Point3 ue{rng.uniform(-500, 500), rng.uniform(-500, 500), 1.5 + 3.0 * rng.uniform_int(0, 7)};
        const double bearing = rng.uniform(-180, 180);
        const LinkGeometry g = compute_link_geometry(enb, bearing, ue);
        const double dh = enb.z - ue.z;
        CHECK(g.d_3d * g.d_3d == doctest::Approx(g.d_2d * g.d_2d + dh * dh).epsilon(1e-12));
        CHECK(g.d_3d >= g.d_2d);
        CHECK(g.d_3d >= std::abs(dh));
        CHECK(g.los_zod + g.los_zoa == 180.0);
        CHECK(g.los_zod >= 0.0);
        CHECK(g.los_zod <= 180.0);
        CHECK(g.los_aod > -180.0);
        CHECK(g.los_aod <= 180.0);
        CHECK(std::abs(wrap_azimuth_deg(g.los_aoa - g.los_aod_global)) == doctest::Approx(180.0));
    }
}

TEST_CASE("applicability limits")
{
    Scenario s = Scenario::defaults(ScenarioKind::UMa);
    CHECK(s.isd == 500.0);
    CHECK(s.enb_height == 25.0);
    CHECK(Scenario::defaults(ScenarioKind::UMi).enb_height == 10.0);
    CHECK(Scenario::defaults(ScenarioKind::UMi).isd == 200.0);
    CHECK_NOTHROW(s.check_applicability());
    s.carrier_hz = 28e9;
    CHECK_THROWS_AS(s.check_applicability(), RangeError);
    s.carrier_hz = 3.5e9;
    s.bandwidth_hz = 200e6;
    CHECK_THROWS_AS(s.check_applicability(), RangeError);
    CHECK(Scenario::defaults(ScenarioKind::UMa).wavelength() == doctest::Approx(0.149896229));
}

TEST_CASE("angle wrapping helpers")
{
    CHECK(wrap_azimuth_deg(180.0) == 180.0);
    CHECK(wrap_azimuth_deg(-180.0) == 180.0);
    CHECK(wrap_azimuth_deg(190.0) == doctest::Approx(-170.0));
    CHECK(fold_zenith_deg(-10.0) == doctest::Approx(10.0));
    CHECK(fold_zenith_deg(190.0) == doctest::Approx(170.0));
    CHECK(fold_zenith_deg(90.0) == 90.0);
}
