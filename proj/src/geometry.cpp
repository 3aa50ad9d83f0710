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
#include "gscm/geometry.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "gscm/error.hpp"

namespace gscm {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

Vec3 lattice_point(int q, int r, double isd)
{
    // a1 = (isd, 0), a2 = (isd/2, isd*sqrt(3)/2)
    return {isd * (q + 0.5 * r), isd * (std::numbers::sqrt3 / 2.0) * r, 0.0};
}

} // namespace

std::string_view to_string(ScenarioKind kind)
{
    return kind == ScenarioKind::UMa ? "UMa" : "UMi";
}

ScenarioKind scenario_from_string(std::string_view name)
{
    if (name == "UMa" || name == "3D-UMa")
        return ScenarioKind::UMa;
    if (name == "UMi" || name == "3D-UMi")
        return ScenarioKind::UMi;
    throw ConfigError(fmt::format("unknown scenario '{}' (expected UMa or UMi)", name));
}

Scenario Scenario::defaults(ScenarioKind kind)
{
    Scenario s;
    s.kind = kind;
    if (kind == ScenarioKind::UMi)
    {
        s.isd = 200.0;
        s.enb_height = 10.0;
    }
    return s;
}

double Scenario::wavelength() const
{
    return kSpeedOfLight / carrier_hz;
}

void Scenario::check_applicability() const
{
    if (!(carrier_hz >= kMinCarrierHz && carrier_hz <= kMaxCarrierHz))
        throw RangeError(fmt::format("carrier frequency {} Hz outside the 2-6 GHz applicability range", carrier_hz));
    if (!(bandwidth_hz > 0.0 && bandwidth_hz <= kMaxBandwidthHz))
        throw RangeError(fmt::format("bandwidth {} Hz outside the (0, 100 MHz] applicability range", bandwidth_hz));
}

NetworkLayout build_layout(const Scenario& scenario, int rings, bool wraparound)
{
    if (rings < 0)
        throw ConfigError("layout rings must be >= 0");
    NetworkLayout layout;
    layout.isd = scenario.isd;
    layout.enb_height = scenario.enb_height;
    layout.rings = rings;
    layout.wraparound = wraparound && rings > 0;

    // ring-by-ring walk on axial coordinates: centre first, then each ring
    // counter-clockwise starting from its east-most corner
    static constexpr int dirs[6][2] = {{-1, 1}, {-1, 0}, {0, -1}, {1, -1}, {1, 0}, {0, 1}};
    layout.sites.push_back(Site{Point3{0.0, 0.0, scenario.enb_height}});
    for (int k = 1; k <= rings; ++k)
    {
        int q = k, r = 0;
        for (const auto& d : dirs)
        {
            for (int step = 0; step < k; ++step)
            {
                Vec3 p = lattice_point(q, r, scenario.isd);
                p.z = scenario.enb_height;
                layout.sites.push_back(Site{p});
                q += d[0];
                r += d[1];
            }
        }
    }

    if (layout.wraparound)
    {
        // a cluster of 1 + 3r(r+1) sites tiles the plane with translation
        // (r+1) a1 + r a2 and its 60 degree rotations
        const Vec3 t0 = lattice_point(rings + 1, rings, scenario.isd);
        for (int k = 0; k < 6; ++k)
            layout.wrap_shifts.push_back(Rotation::about_z(60.0 * k).apply(t0));
    }
    return layout;
}

FloorDraw sample_ue_height(RngStream& rng, bool indoor, int min_floors, int max_floors)
{
    if (!indoor)
        return {};
    FloorDraw d;
    d.building_floors = rng.uniform_int(min_floors, max_floors);
    d.floor = rng.uniform_int(1, d.building_floors);
    d.height = kFloorHeight * (d.floor - 1) + kMinUeHeight;
    return d;
}

UEState drop_ue(RngStream& rng, const NetworkLayout& layout, std::size_t site, int sector,
                const DropParams& params)
{
    if (site >= layout.sites.size() || sector < 0 || sector > 2)
        throw GeometryError("drop_ue: site/sector index out of range");
    if (!(params.indoor_fraction >= 0.0 && params.indoor_fraction <= 1.0))
        throw ConfigError("drop_ue: indoor_fraction must lie in [0, 1]");

    const Site& s = layout.sites[site];
    const double apothem = layout.isd / 2.0;
    const double circumradius = layout.isd / std::numbers::sqrt3;
    const double bearing = s.bearings_deg[static_cast<std::size_t>(sector)];

    Vec3 offset;
    bool placed = false;
    for (int attempt = 0; attempt < params.max_retries && !placed; ++attempt)
    {
        offset = {rng.uniform(-circumradius, circumradius), rng.uniform(-apothem, apothem), 0.0};
        // hexagon with flat sides facing the six neighbours
        bool inside = true;
        for (int k = 0; k < 6 && inside; ++k)
        {
            const double a = deg2rad(60.0 * k);
            inside = offset.x * std::cos(a) + offset.y * std::sin(a) <= apothem;
        }
        if (!inside)
            continue;
        const double d2 = std::hypot(offset.x, offset.y);
        if (d2 < params.min_distance_2d)
            continue;
        const double rel = wrap_azimuth_deg(rad2deg(std::atan2(offset.y, offset.x)) - bearing);
        placed = rel > -60.0 && rel <= 60.0;
    }
    if (!placed)
        throw GeometryError(fmt::format("drop_ue: degenerate geometry, no admissible position after {} attempts "
                                        "(isd={}, min_distance={})",
                                        params.max_retries, layout.isd, params.min_distance_2d));

    UEState ue;
    ue.home_site = site;
    ue.home_sector = sector;
    ue.indoor = rng.bernoulli(params.indoor_fraction);
    const FloorDraw floor = sample_ue_height(rng, ue.indoor, params.min_floors, params.max_floors);
    ue.floor = floor.floor;
    ue.building_floors = floor.building_floors;
    ue.height = floor.height;
    ue.indoor_depth = ue.indoor ? rng.uniform(0.0, params.max_indoor_depth) : 0.0;
    const double heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
    ue.velocity = {params.ue_speed_mps * std::cos(heading), params.ue_speed_mps * std::sin(heading), 0.0};
    ue.position = {s.position.x + offset.x, s.position.y + offset.y, ue.height};
    return ue;
}

LinkGeometry compute_link_geometry(const Point3& enb_position, double bearing_deg, const Point3& ue_position)
{
    if (!enb_position.finite() || !ue_position.finite())
        throw GeometryError("compute_link_geometry: non-finite position");
    const Vec3 d = ue_position - enb_position;
    LinkGeometry g;
    g.d_2d = std::hypot(d.x, d.y);
    if (g.d_2d < 1e-9)
        throw GeometryError("compute_link_geometry: eNB and UE horizontally coincident, bearing undefined");
    g.d_3d = d.norm();
    g.enb_position = enb_position;
    g.los_aod_global = rad2deg(std::atan2(d.y, d.x));
    g.los_aod = wrap_azimuth_deg(g.los_aod_global - bearing_deg);
    g.los_aoa = wrap_azimuth_deg(g.los_aod_global + 180.0);
    // atan2 keeps the zenith well conditioned near the horizon
    g.los_zod = rad2deg(std::atan2(g.d_2d, d.z));
    g.los_zoa = 180.0 - g.los_zod;
    return g;
}

LinkGeometry compute_link_geometry(const NetworkLayout& layout, std::size_t site, int sector, const UEState& ue)
{
    if (site >= layout.sites.size() || sector < 0 || sector > 2)
        throw GeometryError("compute_link_geometry: site/sector index out of range");
    const Site& s = layout.sites[site];
    Point3 best = s.position;
    double best_d = std::numeric_limits<double>::infinity();
    for (const Vec3& shift : layout.wrap_shifts)
    {
        const Point3 p = s.position + shift;
        const double d = std::hypot(ue.position.x - p.x, ue.position.y - p.y);
        if (d < best_d)
        {
            best_d = d;
            best = p;
        }
    }
    return compute_link_geometry(best, s.bearings_deg[static_cast<std::size_t>(sector)], ue.position);
}

} // namespace gscm
