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
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gscm/rng.hpp"
#include "gscm/vec3.hpp"

namespace gscm {

enum class ScenarioKind
{
    UMa,
    UMi
};

std::string_view to_string(ScenarioKind kind);
ScenarioKind scenario_from_string(std::string_view name);

/// Deployment scenario. Defaults: UMa 500 m ISD / 25 m eNB, UMi 200 m ISD / 10 m eNB.
struct Scenario
{
    ScenarioKind kind = ScenarioKind::UMa;
    double isd = 500.0;
    double enb_height = 25.0;
    double carrier_hz = 2.0e9;
    double bandwidth_hz = 10.0e6;

    static Scenario defaults(ScenarioKind kind);
    double wavelength() const;
    /// Throws RangeError outside 2-6 GHz carrier / 100 MHz bandwidth.
    void check_applicability() const;
};

inline constexpr double kMinCarrierHz = 2.0e9;
inline constexpr double kMaxCarrierHz = 6.0e9;
inline constexpr double kMaxBandwidthHz = 100.0e6;
inline constexpr double kMinUeHeight = 1.5;
inline constexpr double kMaxUeHeight = 22.5;
inline constexpr double kFloorHeight = 3.0;

struct Site
{
    Point3 position;
    std::array<double, 3> bearings_deg{30.0, 150.0, 270.0};
};

/// Hexagonal site grid, three sectors per site.
struct NetworkLayout
{
    double isd = 0.0;
    double enb_height = 0.0;
    int rings = 0;
    bool wraparound = false;
    std::vector<Site> sites;
    /// Translations of the layout copies used for wraparound (first entry is the origin).
    std::vector<Vec3> wrap_shifts{Vec3{}};

    std::size_t sector_count() const { return 3 * sites.size(); }
};

/// 1 + 3 r (r + 1) sites at pitch isd. Wraparound needs at least one ring and is
/// silently disabled for a single site.
NetworkLayout build_layout(const Scenario& scenario, int rings, bool wraparound);

struct FloorDraw
{
    int floor = 0;           // n_fl, 0 for outdoor
    int building_floors = 0; // N_fl, 0 for outdoor
    double height = kMinUeHeight;
};

/// Outdoor: (0, 0, 1.5). Indoor: N_fl ~ U{min_floors..max_floors}, n_fl ~ U{1..N_fl},
/// h = 3 (n_fl - 1) + 1.5.
FloorDraw sample_ue_height(RngStream& rng, bool indoor, int min_floors = 4, int max_floors = 8);

struct DropParams
{
    double indoor_fraction = 0.8;
    double min_distance_2d = 35.0;
    double max_indoor_depth = 25.0;
    double ue_speed_mps = 3.0 / 3.6;
    int min_floors = 4;
    int max_floors = 8;
    int max_retries = 100000;
};

struct UEState
{
    Point3 position;
    bool indoor = false;
    int floor = 0;
    int building_floors = 0;
    double height = kMinUeHeight;
    double indoor_depth = 0.0;
    Vec3 velocity;
    std::size_t home_site = 0;
    int home_sector = 0;
};

/// Drops one UE uniformly over the hexagonal cell wedge served by (site, sector),
/// keeping at least min_distance_2d to the site. Throws GeometryError when the
/// rejection sampler exhausts max_retries.
UEState drop_ue(RngStream& rng, const NetworkLayout& layout, std::size_t site, int sector,
                const DropParams& params);

struct LinkGeometry
{
    double d_2d = 0.0;
    double d_3d = 0.0;
    double los_aod = 0.0;        // azimuth of the UE seen from the eNB, sector frame
    double los_aod_global = 0.0; // same, global frame
    double los_aoa = 0.0;        // azimuth of the eNB seen from the UE, global frame
    double los_zod = 90.0;       // 0 = up, 90 = horizon, 180 = down
    double los_zoa = 90.0;
    Point3 enb_position;         // position actually used (wraparound image)
};

/// Geometry between an eNB at enb_position with sector bearing and a UE.
/// Throws GeometryError when the two are horizontally coincident.
LinkGeometry compute_link_geometry(const Point3& enb_position, double bearing_deg, const Point3& ue_position);

/// Uses the wraparound image of the site nearest to the UE.
LinkGeometry compute_link_geometry(const NetworkLayout& layout, std::size_t site, int sector, const UEState& ue);

} // namespace gscm
