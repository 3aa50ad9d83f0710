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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gscm/channel.hpp"
#include "gscm/config.hpp"
#include "gscm/statistics.hpp"

namespace gscm {

/// Layout and UEs of one (scenario, drop).
struct DropState
{
    ScenarioKind kind = ScenarioKind::UMa;
    std::uint32_t drop = 0;
    NetworkLayout layout;
    std::vector<UEState> ues; // index = UE id
};

/// Site-level state of one (site, UE) pair, shared by the site's three sectors.
struct SiteLink
{
    std::uint32_t site = 0;
    std::uint32_t ue = 0;
    LinkGeometry geometry;
    LosState los;
    double h_e = 0.0;
    PathlossBreakdown pathloss;
    Propagation propagation = Propagation::NLOS;
    LargeScaleParams lsp;
    double zsd = 0.0;
    double mean_zod = 0.0;
};

struct SimulationResult
{
    std::vector<DropState> drops;
    std::vector<std::vector<SiteLink>> site_links; // parallel to drops, (ue, site) order
    std::vector<LinkRecord> records;               // (scenario, drop, ue, cell) order
};

/// Root seed of one scenario's substreams.
std::uint64_t scenario_seed(std::uint64_t seed, ScenarioKind kind);

/// Stream key of a site-level draw.
StreamKey site_key(std::uint32_t drop, std::uint32_t site, std::uint32_t ue, Stage stage);

/// Drops all UEs of one (scenario, drop).
DropState drop_ues(const RunConfig& config, ScenarioKind kind, std::uint32_t drop);

/// LOS state, pathloss, LSPs and zenith summary of one (site, UE) pair.
SiteLink evaluate_site_link(const RunConfig& config, const DropState& state, std::uint32_t site, std::uint32_t ue);

/// Cluster set of a (site, UE) pair; regenerates exactly what evaluate_site_link used.
ClusterSet site_clusters(const RunConfig& config, const DropState& state, const SiteLink& link);

/// Every drop of every scenario. Per-link work runs on `workers` OpenMP threads;
/// the result does not depend on the worker count.
SimulationResult simulate(const RunConfig& config, int workers);

/// Channel tensor of a serving record.
ChannelTensor serving_channel(const RunConfig& config, const DropState& state, const SiteLink& link,
                              std::uint32_t sector, int workers);

std::string ues_csv(const SimulationResult& result);
std::string lsps_csv(const SimulationResult& result);
std::string links_csv(const std::vector<LinkRecord>& records);

/// CIR link id: drop << 48 | cell << 24 | ue.
std::uint64_t cir_link_id(std::uint32_t drop, std::uint32_t cell, std::uint32_t ue);

struct RunReport
{
    std::vector<std::filesystem::path> files;
    std::size_t ue_rows = 0;
    std::size_t link_rows = 0;
};

/// Simulates and writes the enabled outputs plus manifest.json and the resolved config.
RunReport run(const RunConfig& config, const std::filesystem::path& out_dir, int workers);

/// Re-aggregates stats.json and distributions.csv from a links.csv.
std::vector<std::filesystem::path> run_stats(const std::filesystem::path& links_path,
                                             const std::filesystem::path& out_dir, const BinningOptions& binning);

} // namespace gscm
