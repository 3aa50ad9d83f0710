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
#include "gscm/largescale.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "gscm/error.hpp"

namespace gscm {

namespace {

constexpr double kSpeedOfLight = 3.0e8; // the ITU breakpoint formula uses c = 3e8

void check_height(double h_ue)
{
    if (!(h_ue >= kMinUeHeight && h_ue <= kMaxUeHeight))
        throw RangeError(fmt::format("UE height {} m outside the [1.5, 22.5] m applicability range", h_ue));
}

void check_distance(const PathlossModel& model, double d_3d)
{
    if (!(d_3d >= model.min_distance && d_3d <= model.max_distance))
        throw RangeError(fmt::format("3D distance {} m outside the pathloss validity range [{}, {}] m", d_3d,
                                     model.min_distance, model.max_distance));
}

} // namespace

std::string_view to_string(LosType type)
{
    switch (type)
    {
    case LosType::Type1:
        return "type1";
    case LosType::Type2:
        return "type2";
    default:
        return "none";
    }
}

LosProbability los_probability_parts(const Scenario& scenario, double d_2d, double h_ue, const LosCurveSet& c)
{
    if (!(d_2d >= 0.0))
        throw RangeError("LOS probability: negative 2D distance");
    check_height(h_ue);
    if (c.forced_probability >= 0.0)
        return {std::min(c.forced_probability, 1.0), 0.0};

    const double near = std::min(c.near_distance / d_2d, 1.0);
    const double e = std::exp(-d_2d / c.decay_distance);
    LosProbability p;
    p.type1 = near * (1.0 - e) + e;
    if (scenario.kind == ScenarioKind::UMa && c.height_dependent && h_ue > c.h_threshold &&
        d_2d > c.g_min_distance)
    {
        const double g = c.g_coeff * d_2d * d_2d * d_2d * std::exp(-d_2d / c.g_decay);
        const double ch = std::pow((h_ue - c.h_threshold) / c.h_scale, c.h_exponent) * g;
        p.type2 = std::min(p.type1 * ch, 1.0 - p.type1);
    }
    return p;
}

double los_probability(const Scenario& scenario, double d_2d, double h_ue, const LosCurveSet& curves)
{
    return los_probability_parts(scenario, d_2d, h_ue, curves).total();
}

LosState draw_los_state(RngStream& rng, const Scenario& scenario, double d_2d, double h_ue, const LosCurveSet& curves)
{
    const LosProbability p = los_probability_parts(scenario, d_2d, h_ue, curves);
    const double u = rng.uniform();
    if (u >= p.total())
        return {false, LosType::None};
    return {true, u < p.type1 ? LosType::Type1 : LosType::Type2};
}

double environmental_height(RngStream& rng, LosType type, double h_ue)
{
    switch (type)
    {
    case LosType::Type1:
        return 1.0;
    case LosType::Type2: {
        const double top = h_ue - 1.5;
        if (top < 12.0)
            throw GeometryError(
                fmt::format("type-2 LOS requires h_ue - 1.5 >= 12 m for the environmental height, got h_ue = {}", h_ue));
        const int levels = static_cast<int>(std::floor((top - 12.0) / 3.0 + 1e-9));
        return 12.0 + 3.0 * rng.uniform_int(0, levels);
    }
    default:
        throw GeometryError("environmental height is only defined for LOS links");
    }
}

double breakpoint_distance(double h_bs, double h_ue, double h_e, double carrier_hz)
{
    if (!(h_ue > h_e) || !(h_bs > h_e))
        throw GeometryError(fmt::format(
            "breakpoint distance: environmental height {} m not below eNB ({} m) and UE ({} m)", h_e, h_bs, h_ue));
    return 4.0 * (h_bs - h_e) * (h_ue - h_e) * carrier_hz / kSpeedOfLight;
}

double pathloss_los(const PathlossModel& m, double d_3d, double h_bs, double h_ue, double h_e, double carrier_hz)
{
    check_distance(m, d_3d);
    const double f_ghz = carrier_hz / 1e9;
    const double d_bp = breakpoint_distance(h_bs, h_ue, h_e, carrier_hz);
    const double dh = h_bs - h_ue;
    const double bp_sq = d_bp * d_bp + dh * dh; // squared 3D distance at the breakpoint
    if (d_3d * d_3d <= bp_sq)
        return m.los_near_slope * std::log10(d_3d) + m.los_intercept + m.los_freq_coeff * std::log10(f_ghz);
    return m.los_far_slope * std::log10(d_3d) + m.los_intercept + m.los_freq_coeff * std::log10(f_ghz) -
           m.los_bp_coeff * std::log10(bp_sq);
}

double pathloss_nlos_unclamped(const PathlossModel& m, double d_3d, double h_bs, double h_ue, double carrier_hz)
{
    check_distance(m, d_3d);
    check_height(h_ue);
    const double f_ghz = carrier_hz / 1e9;
    double base = 0.0;
    if (m.nlos_form == NlosForm::ItuUma)
    {
        const double w = m.street_width, h = m.building_height;
        base = 161.04 - 7.1 * std::log10(w) + 7.5 * std::log10(h) -
               (24.37 - 3.7 * (h / h_bs) * (h / h_bs)) * std::log10(h_bs) +
               (43.42 - 3.1 * std::log10(h_bs)) * (std::log10(d_3d) - 3.0) + 20.0 * std::log10(f_ghz) -
               (3.2 * std::pow(std::log10(17.625), 2) - 4.97);
    }
    else
    {
        base = m.nlos_slope * std::log10(d_3d) + m.nlos_intercept + m.nlos_freq_coeff * std::log10(f_ghz);
    }
    return base - m.height_gain_db_per_m * (h_ue - kMinUeHeight);
}

double pathloss_nlos(const PathlossModel& m, const LinkGeometry& link, double h_bs, double h_ue, double carrier_hz)
{
    const double nlos = pathloss_nlos_unclamped(m, link.d_3d, h_bs, h_ue, carrier_hz);
    const double los = pathloss_los(m, link.d_3d, h_bs, h_ue, m.nlos_clamp_env_height, carrier_hz);
    return std::max(nlos, los);
}

PathlossBreakdown o2i_total(double outdoor_pl_db, double d_in, bool indoor, const PathlossModel& m)
{
    if (d_in < 0.0)
        throw RangeError("indoor depth must be non-negative");
    PathlossBreakdown b;
    b.outdoor_db = outdoor_pl_db;
    if (indoor)
    {
        b.wall_db = m.wall_loss_db;
        b.indoor_db = m.indoor_loss_db_per_m * d_in;
    }
    b.total_db = b.outdoor_db + b.wall_db + b.indoor_db;
    return b;
}

PathlossBreakdown link_pathloss(const PathlossModel& m, const LinkGeometry& link, double h_bs, double h_ue,
                                double carrier_hz, const LosState& los, double h_e, bool indoor, double d_in)
{
    double outdoor = 0.0;
    double height_gain = 0.0;
    if (los.los)
    {
        outdoor = pathloss_los(m, link.d_3d, h_bs, h_ue, h_e, carrier_hz);
    }
    else
    {
        outdoor = pathloss_nlos(m, link, h_bs, h_ue, carrier_hz);
        height_gain = -m.height_gain_db_per_m * (h_ue - kMinUeHeight);
    }
    PathlossBreakdown b = o2i_total(outdoor, d_in, indoor, m);
    b.height_gain_db = height_gain;
    return b;
}

double shadow_fading(RngStream& rng, double sigma_db)
{
    if (sigma_db < 0.0)
        throw RangeError("shadow fading sigma must be non-negative");
    if (sigma_db == 0.0)
        return 0.0;
    return sigma_db * rng.normal();
}

} // namespace gscm
