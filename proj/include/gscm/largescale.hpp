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

#include <string_view>

#include "gscm/geometry.hpp"
#include "gscm/rng.hpp"

namespace gscm {

enum class LosType
{
    None,
    Type1,
    Type2
};

std::string_view to_string(LosType type);

struct LosState
{
    bool los = false;
    LosType type = LosType::None;
};

/// Data-driven LOS probability curves.
///
/// type-1(d) = min(near / d, 1) (1 - exp(-d / decay)) + exp(-d / decay)
/// type-2(d, h) = type-1(d) C(d, h), where
///   C = ((h - h_threshold) / h_scale)^h_exponent g(d)  for h > h_threshold, else 0
///   g = g_coeff d^3 exp(-d / g_decay)                   for d > g_min_distance, else 0
/// height_dependent = false disables type-2 entirely.
struct LosCurveSet
{
    double near_distance = 18.0;
    double decay_distance = 63.0;
    bool height_dependent = true;
    double h_threshold = 13.0;
    double h_scale = 10.0;
    double h_exponent = 1.5;
    double g_coeff = 1.25e-6;
    double g_decay = 150.0;
    double g_min_distance = 18.0;
    /// Replaces the curves by a constant total probability (type-1 only) when in [0, 1].
    double forced_probability = -1.0;
};

struct LosProbability
{
    double type1 = 0.0;
    double type2 = 0.0;
    double total() const { return type1 + type2; }
};

/// Both components; total is clamped to 1 by scaling type-2. Throws RangeError
/// for d_2d < 0 or h_ue outside [1.5, 22.5].
LosProbability los_probability_parts(const Scenario& scenario, double d_2d, double h_ue, const LosCurveSet& curves);
double los_probability(const Scenario& scenario, double d_2d, double h_ue, const LosCurveSet& curves);

/// Bernoulli draw against the total probability; a LOS link is type-2 with
/// probability type2 / (type1 + type2).
LosState draw_los_state(RngStream& rng, const Scenario& scenario, double d_2d, double h_ue, const LosCurveSet& curves);

/// Type-1: 1 m. Type-2: uniform over {12, 15, ..., h_ue - 1.5}.
/// Throws GeometryError for LosType::None or a type-2 UE below 13.5 m.
double environmental_height(RngStream& rng, LosType type, double h_ue);

/// d_BP = 4 (h_bs - h_e)(h_ue - h_e) f / c. Throws GeometryError when either
/// effective height is not positive.
double breakpoint_distance(double h_bs, double h_ue, double h_e, double carrier_hz);

enum class NlosForm
{
    /// ITU-R UMa NLOS form with street width / building height.
    ItuUma,
    /// a log10(d_3d) + b + c log10(f_GHz)
    LogDistance
};

struct PathlossModel
{
    // LOS two-slope model, f in GHz
    double los_near_slope = 22.0;
    double los_far_slope = 40.0;
    double los_intercept = 28.0;
    double los_freq_coeff = 20.0;
    double los_bp_coeff = 9.0;

    NlosForm nlos_form = NlosForm::ItuUma;
    double street_width = 20.0;
    double building_height = 20.0;
    double nlos_slope = 36.7;
    double nlos_intercept = 22.7;
    double nlos_freq_coeff = 26.0;

    /// Height-gain coefficient alpha (dB/m): PL_NLOS -= alpha (h_ue - 1.5).
    double height_gain_db_per_m = 0.6;
    /// Environmental height used for the LOS bound of NLOS links.
    double nlos_clamp_env_height = 1.0;

    double min_distance = 10.0;
    double max_distance = 5000.0;

    // outdoor-to-indoor
    double wall_loss_db = 20.0;
    double indoor_loss_db_per_m = 0.5;
};

/// Two-slope LOS pathloss on d_3d: near slope below the breakpoint, continuous at it.
double pathloss_los(const PathlossModel& model, double d_3d, double h_bs, double h_ue, double h_e, double carrier_hz);

/// NLOS pathloss before the LOS bound, including the height-gain term.
double pathloss_nlos_unclamped(const PathlossModel& model, double d_3d, double h_bs, double h_ue, double carrier_hz);

/// max(NLOS, LOS) at the same geometry.
double pathloss_nlos(const PathlossModel& model, const LinkGeometry& link, double h_bs, double h_ue, double carrier_hz);

struct PathlossBreakdown
{
    double outdoor_db = 0.0;
    double wall_db = 0.0;
    double indoor_db = 0.0;
    double height_gain_db = 0.0; // -alpha (h - 1.5) for NLOS, already inside outdoor_db
    double total_db = 0.0;
};

/// outdoor + wall + k d_in for indoor UEs; outdoor only otherwise.
PathlossBreakdown o2i_total(double outdoor_pl_db, double d_in, bool indoor, const PathlossModel& model);

/// Complete pathloss for a link in the given LOS state.
PathlossBreakdown link_pathloss(const PathlossModel& model, const LinkGeometry& link, double h_bs, double h_ue,
                                double carrier_hz, const LosState& los, double h_e, bool indoor, double d_in);

/// Zero-mean Gaussian in dB.
double shadow_fading(RngStream& rng, double sigma_db);

} // namespace gscm
