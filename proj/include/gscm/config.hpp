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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gscm/antenna.hpp"
#include "gscm/fastfading.hpp"
#include "gscm/geometry.hpp"
#include "gscm/largescale.hpp"
#include "gscm/statistics.hpp"

namespace gscm {

/// All model parameters of one scenario.
struct ScenarioParams
{
    Scenario scenario;
    double min_distance_2d = 35.0;
    double downtilt_deg = 12.0;
    LosCurveSet los;
    PathlossModel pathloss;
    ElevationModel elevation;
    std::array<LspTable, 3> lsp; // indexed by Propagation
    AngleScaling scaling;

    const LspTable& table(Propagation p) const { return lsp[static_cast<std::size_t>(p)]; }
};

struct RunConfig
{
    std::uint64_t seed = 0;
    std::vector<ScenarioKind> scenarios{ScenarioKind::UMa, ScenarioKind::UMi};
    double carrier_hz = 2.0e9;
    double bandwidth_hz = 10.0e6;

    int rings = 2;
    bool wraparound = true;

    int drops = 1;
    int ues_per_sector = 10;
    DropParams drop; // min_distance_2d is taken from the scenario parameters

    PolarizationModel polarization = PolarizationModel::SlantedDipole;
    bool polarized = true;
    ArrayGeometry tx; // wavelength and orientation set per scenario / sector
    ArrayGeometry rx;

    bool subclusters = true;
    double prune_below_db = 25.0;
    int samples = 1;
    double sample_interval_s = 1e-3;

    BinningOptions binning;
    ZsdEstimator zsd_estimator = ZsdEstimator::Linear;

    std::string out_dir = "out";
    bool emit_records = true;
    bool emit_cir = false;
    bool emit_stats = true;

    std::map<ScenarioKind, ScenarioParams> params;

    const ScenarioParams& scenario_params(ScenarioKind kind) const { return params.at(kind); }
};

struct Diagnostic
{
    std::string file;
    int line = 0; // 1-based, 0 when unknown
    int column = 0;
    std::string message;

    std::string to_string() const;
};

struct ValidationResult
{
    std::optional<RunConfig> config;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return config.has_value() && diagnostics.empty(); }
};

/// Parses and validates a run configuration; relative include paths resolve
/// against base_dir. Never throws for content errors.
ValidationResult parse_config(const std::string& text, const std::string& file_name,
                              const std::filesystem::path& base_dir);
ValidationResult load_config(const std::filesystem::path& path);

/// Parameter tables built from the embedded defaults only.
ScenarioParams default_scenario_params(ScenarioKind kind);

/// Fully resolved configuration as YAML, every default spelled out. The hash
/// form leaves out the seed and the output section.
std::string resolved_yaml(const RunConfig& config, bool for_hash = false);

/// FNV-1a 64 of the hash form of the resolved configuration.
std::uint64_t config_hash(const RunConfig& config);

std::uint64_t fnv1a64(std::string_view data);

} // namespace gscm
