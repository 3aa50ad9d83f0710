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
#include "gscm/simulation.hpp"

#include <algorithm>
#include <exception>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "gscm/error.hpp"

namespace gscm {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

ArrayGeometry tx_array(const RunConfig& c, const ScenarioParams& p, double bearing_deg)
{
    ArrayGeometry a = c.tx;
    a.wavelength = p.scenario.wavelength();
    a.orientation = {bearing_deg, p.downtilt_deg};
    return a;
}

ArrayGeometry rx_array(const RunConfig& c, const ScenarioParams& p)
{
    ArrayGeometry a = c.rx;
    a.wavelength = p.scenario.wavelength();
    return a;
}

// Runs body(i) for i in [0, n) on `workers` threads; rethrows the failure with the lowest index.
template <typename F>
void parallel_for(std::size_t n, int workers, F&& body)
{
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(dynamic, 16)
    for (std::int64_t i = 0; i < count; ++i)
    {
        try
        {
            body(static_cast<std::size_t>(i));
        }
        catch (...)
        {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const std::exception_ptr& e : errors)
        if (e)
            std::rethrow_exception(e);
}

std::string g9(double v)
{
    return format_g9(v);
}

void write_file(const std::filesystem::path& path, const std::string& data)
{
    std::ofstream out(path, std::ios::binary);
    out << data;
    if (!out)
        throw Error(fmt::format("cannot write {}", path.string()));
}

} // namespace

std::uint64_t scenario_seed(std::uint64_t seed, ScenarioKind kind)
{
    return splitmix64(seed ^ (0xa5a5a5a5ULL + static_cast<std::uint64_t>(kind)));
}

StreamKey site_key(std::uint32_t drop, std::uint32_t site, std::uint32_t ue, Stage stage)
{
    return {drop, site, kSiteLevel, ue, stage};
}

DropState drop_ues(const RunConfig& c, ScenarioKind kind, std::uint32_t drop)
{
    const ScenarioParams& p = c.scenario_params(kind);
    DropState s;
    s.kind = kind;
    s.drop = drop;
    s.layout = build_layout(p.scenario, c.rings, c.wraparound);
    DropParams dp = c.drop;
    dp.min_distance_2d = p.min_distance_2d;
    const std::uint64_t seed = scenario_seed(c.seed, kind);
    const auto per = static_cast<std::uint32_t>(c.ues_per_sector);
    for (std::uint32_t site = 0; site < s.layout.sites.size(); ++site)
        for (std::uint32_t sector = 0; sector < 3; ++sector)
            for (std::uint32_t i = 0; i < per; ++i)
            {
                const std::uint32_t ue = (site * 3 + sector) * per + i;
                RngStream rng(seed, {drop, site, sector, ue, Stage::Placement});
                s.ues.push_back(drop_ue(rng, s.layout, site, static_cast<int>(sector), dp));
            }
    return s;
}

namespace {

LinkContext context_of(const DropState& state, const SiteLink& link)
{
    const UEState& ue = state.ues[link.ue];
    LinkContext ctx;
    ctx.geometry = link.geometry;
    ctx.h_ue = ue.height;
    ctx.indoor = ue.indoor;
    ctx.los = link.los;
    ctx.ue_velocity = ue.velocity;
    return ctx;
}

} // namespace

ClusterSet site_clusters(const RunConfig& c, const DropState& state, const SiteLink& link)
{
    const ScenarioParams& p = c.scenario_params(state.kind);
    ClusterOptions opt;
    opt.prune_below_db = c.prune_below_db;
    return generate_clusters(scenario_seed(c.seed, state.kind), site_key(state.drop, link.site, link.ue, Stage::Test),
                             context_of(state, link), link.lsp, p.table(link.propagation), p.elevation, p.scaling,
                             opt);
}

SiteLink evaluate_site_link(const RunConfig& c, const DropState& state, std::uint32_t site, std::uint32_t ue_id)
{
    const ScenarioParams& p = c.scenario_params(state.kind);
    const std::uint64_t seed = scenario_seed(c.seed, state.kind);
    const UEState& ue = state.ues[ue_id];
    SiteLink l;
    l.site = site;
    l.ue = ue_id;
    l.geometry = compute_link_geometry(state.layout, site, 0, ue);
    const double h_bs = p.scenario.enb_height;

    // LOS applies to the outdoor part of the path
    const double d_out = std::max(l.geometry.d_2d - ue.indoor_depth, 0.0);
    RngStream los_rng(seed, site_key(state.drop, site, ue_id, Stage::LosState));
    l.los = draw_los_state(los_rng, p.scenario, d_out, ue.height, p.los);
    if (l.los.los)
    {
        RngStream env_rng(seed, site_key(state.drop, site, ue_id, Stage::EnvHeight));
        l.h_e = environmental_height(env_rng, l.los.type, ue.height);
    }
    l.pathloss = link_pathloss(p.pathloss, l.geometry, h_bs, ue.height, p.scenario.carrier_hz, l.los, l.h_e,
                               ue.indoor, ue.indoor_depth);

    l.propagation = propagation_of(l.los.los, ue.indoor);
    RngStream lsp_rng(seed, site_key(state.drop, site, ue_id, Stage::Lsp));
    l.lsp = generate_lsps(lsp_rng, l.geometry.d_2d, ue.height, l.los.los, p.table(l.propagation), p.elevation);

    const ClusterSet cs = site_clusters(c, state, l);
    l.zsd = zenith_spread(cs, c.zsd_estimator);
    l.mean_zod = mean_zod(cs);
    return l;
}

SimulationResult simulate(const RunConfig& c, int workers)
{
    SimulationResult out;
    for (ScenarioKind kind : c.scenarios)
    {
        const ScenarioParams& p = c.scenario_params(kind);
        const std::string name{to_string(kind)};
        for (int d = 0; d < c.drops; ++d)
        {
            DropState state = drop_ues(c, kind, static_cast<std::uint32_t>(d));
            const std::size_t n_sites = state.layout.sites.size();
            const std::size_t n_ue = state.ues.size();
            std::vector<SiteLink> links(n_ue * n_sites);
            parallel_for(links.size(), workers, [&](std::size_t i) {
                const auto ue = static_cast<std::uint32_t>(i / n_sites);
                const auto site = static_cast<std::uint32_t>(i % n_sites);
                try
                {
                    links[i] = evaluate_site_link(c, state, site, ue);
                }
                catch (const std::exception& e)
                {
                    throw Error(fmt::format("{} drop {} site {} ue {}: {}", name, d, site, ue, e.what()));
                }
            });

            const ArrayGeometry rx = rx_array(c, p);
            const std::size_t first = out.records.size();
            for (std::size_t ue = 0; ue < n_ue; ++ue)
            {
                const UEState& u = state.ues[ue];
                for (std::size_t site = 0; site < n_sites; ++site)
                {
                    const SiteLink& l = links[ue * n_sites + site];
                    for (std::uint32_t sector = 0; sector < 3; ++sector)
                    {
                        LinkRecord r;
                        r.drop = static_cast<std::uint32_t>(d);
                        r.scenario = name;
                        r.site = static_cast<std::uint32_t>(site);
                        r.sector = sector;
                        r.cell = static_cast<std::uint32_t>(site * 3 + sector);
                        r.ue = static_cast<std::uint32_t>(ue);
                        r.d_2d = l.geometry.d_2d;
                        r.d_3d = l.geometry.d_3d;
                        r.h_ue = u.height;
                        r.indoor = u.indoor;
                        r.los = l.los.los;
                        r.los_type = l.los.type;
                        r.h_e = l.h_e;
                        r.pl = l.pathloss;
                        r.sf_db = l.lsp.sf_db;
                        const Orientation o{state.layout.sites[site].bearings_deg[sector], p.downtilt_deg};
                        r.tx_gain_db = element_gain_db(l.geometry.los_zod, l.geometry.los_aod_global, c.tx.pattern, o);
                        r.rx_gain_db = element_gain_db(l.geometry.los_zoa, l.geometry.los_aoa, rx.pattern);
                        r.coupling_loss_db = coupling_loss(r.pl.total_db, r.sf_db, r.tx_gain_db, r.rx_gain_db);
                        r.lsp = l.lsp;
                        r.zsd = l.zsd;
                        r.mean_zod = l.mean_zod;
                        out.records.push_back(std::move(r));
                    }
                }
                const std::span<const LinkRecord> mine(out.records.data() + first + ue * n_sites * 3, n_sites * 3);
                out.records[first + ue * n_sites * 3 + associate_serving_cell(mine)].serving = true;
            }
            out.drops.push_back(std::move(state));
            out.site_links.push_back(std::move(links));
        }
    }
    return out;
}

ChannelTensor serving_channel(const RunConfig& c, const DropState& state, const SiteLink& link, std::uint32_t sector,
                              int workers)
{
    const ScenarioParams& p = c.scenario_params(state.kind);
    const ClusterSet cs = site_clusters(c, state, link);
    CoefficientOptions opt;
    opt.polarized = c.polarized;
    opt.subclusters = c.subclusters;
    opt.workers = workers;
    opt.sample_times.resize(static_cast<std::size_t>(c.samples));
    for (std::size_t t = 0; t < opt.sample_times.size(); ++t)
        opt.sample_times[t] = static_cast<double>(t) * c.sample_interval_s;
    return channel_coefficient(cs, tx_array(c, p, state.layout.sites[link.site].bearings_deg[sector]),
                               rx_array(c, p), opt);
}

constexpr const char* kUesHeader = "drop,scenario,ue,site,sector,x,y,z,indoor,floor,building_floors,h_ue,d_in,vx,vy,vz";
constexpr const char* kLspsHeader = "drop,scenario,site,ue,propagation,ds,asd,asa,zsd,zsa,k,sf,zsd_mu_log";

std::string ues_csv(const SimulationResult& r)
{
    std::ostringstream out;
    out << kUesHeader << '\n';
    for (const DropState& s : r.drops)
        for (std::size_t i = 0; i < s.ues.size(); ++i)
        {
            const UEState& u = s.ues[i];
            out << s.drop << ',' << to_string(s.kind) << ',' << i << ',' << u.home_site << ',' << u.home_sector << ','
                << g9(u.position.x) << ',' << g9(u.position.y) << ',' << g9(u.position.z) << ',' << (u.indoor ? 1 : 0)
                << ',' << u.floor << ',' << u.building_floors << ',' << g9(u.height) << ',' << g9(u.indoor_depth)
                << ',' << g9(u.velocity.x) << ',' << g9(u.velocity.y) << ',' << g9(u.velocity.z) << '\n';
        }
    return out.str();
}

std::string lsps_csv(const SimulationResult& r)
{
    std::ostringstream out;
    out << kLspsHeader << '\n';
    for (std::size_t d = 0; d < r.drops.size(); ++d)
        for (const SiteLink& l : r.site_links[d])
        {
            out << r.drops[d].drop << ',' << to_string(r.drops[d].kind) << ',' << l.site << ',' << l.ue << ','
                << to_string(l.propagation);
            for (double v : {l.lsp.ds, l.lsp.asd, l.lsp.asa, l.lsp.zsd, l.lsp.zsa, l.lsp.k_db, l.lsp.sf_db,
                             l.lsp.zsd_mu_log})
                out << ',' << g9(v);
            out << '\n';
        }
    return out.str();
}

std::string links_csv(const std::vector<LinkRecord>& records)
{
    std::ostringstream out;
    write_links_csv(out, records);
    return out.str();
}

std::uint64_t cir_link_id(std::uint32_t drop, std::uint32_t cell, std::uint32_t ue)
{
    return (static_cast<std::uint64_t>(drop) << 48) | (static_cast<std::uint64_t>(cell) << 24) | ue;
}

RunReport run(const RunConfig& c, const std::filesystem::path& dir, int workers)
{
    const SimulationResult result = simulate(c, workers);
    std::filesystem::create_directories(dir);
    RunReport report;
    report.ue_rows = 0;
    for (const DropState& s : result.drops)
        report.ue_rows += s.ues.size();
    report.link_rows = result.records.size();

    auto emit = [&](const std::string& name, const std::string& data) {
        write_file(dir / name, data);
        report.files.push_back(dir / name);
    };

    const std::string links = links_csv(result.records);
    if (c.emit_records)
    {
        emit("ues.csv", ues_csv(result));
        emit("links.csv", links);
        emit("lsps.csv", lsps_csv(result));
    }
    if (c.emit_stats)
    {
        // aggregate from the serialised records so `stats` reproduces this output exactly
        std::istringstream in(links);
        const std::vector<LinkRecord> parsed = read_links_csv(in);
        emit("stats.json", stats_json(parsed, c.binning));
        emit("distributions.csv", distributions_csv(parsed, c.binning));
    }
    if (c.emit_cir)
    {
        std::filesystem::create_directories(dir / "cir");
        for (std::size_t d = 0; d < result.drops.size(); ++d)
        {
            const DropState& s = result.drops[d];
            const std::size_t n_sites = s.layout.sites.size();
            const std::string name = fmt::format("cir/cir_{}_drop{}.bin", to_string(s.kind), s.drop);
            std::ofstream out(dir / name, std::ios::binary);
            for (const LinkRecord& r : result.records)
            {
                if (!r.serving || r.drop != s.drop || r.scenario != to_string(s.kind))
                    continue;
                const SiteLink& l = result.site_links[d][r.ue * n_sites + r.site];
                write_cir(out, cir_link_id(r.drop, r.cell, r.ue), serving_channel(c, s, l, r.sector, workers));
            }
            if (!out)
                throw Error(fmt::format("cannot write {}", (dir / name).string()));
            report.files.push_back(dir / name);
        }
    }
    emit("config.resolved.yaml", resolved_yaml(c));

    nlohmann::ordered_json m;
    m["schema_version"] = 1;
    m["tool"] = "gscm3d";
    m["version"] = GSCM_VERSION;
    m["libraries"]["fmt"] = fmt::format("{}.{}.{}", FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100);
    m["libraries"]["nlohmann_json"] = fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                                  NLOHMANN_JSON_VERSION_PATCH);
    m["libraries"]["yaml-cpp"] = GSCM_YAML_CPP_VERSION;
    m["libraries"]["openmp"] = _OPENMP;
    m["compiler"] = fmt::format("gcc {}.{}.{}", __GNUC__, __GNUC_MINOR__, __GNUC_PATCHLEVEL__);
    m["generator"] = RngStream::generator_name();
    m["seed"] = c.seed;
    m["config_hash"] = fmt::format("fnv1a64:{:016x}", config_hash(c));
    std::vector<std::string> scen;
    for (ScenarioKind k : c.scenarios)
        scen.emplace_back(to_string(k));
    m["scenarios"] = scen;
    m["columns"]["ues.csv"] = kUesHeader;
    m["columns"]["links.csv"] = links_csv_header();
    m["columns"]["lsps.csv"] = kLspsHeader;
    m["columns"]["distributions.csv"] = "metric,scenario,x,pdf,cdf";
    m["counts"]["ues"] = report.ue_rows;
    m["counts"]["links"] = report.link_rows;
    std::vector<std::string> files;
    for (const auto& f : report.files)
        files.push_back(std::filesystem::relative(f, dir).generic_string());
    m["files"] = files;
    emit("manifest.json", m.dump(2) + "\n");
    return report;
}

std::vector<std::filesystem::path> run_stats(const std::filesystem::path& links_path,
                                             const std::filesystem::path& dir, const BinningOptions& binning)
{
    std::ifstream in(links_path);
    if (!in)
        throw Error(fmt::format("cannot open {}", links_path.string()));
    const std::vector<LinkRecord> records = read_links_csv(in);
    if (records.empty())
        throw RangeError(fmt::format("{}: no link records (empty input)", links_path.string()));
    std::filesystem::create_directories(dir);
    write_file(dir / "stats.json", stats_json(records, binning));
    write_file(dir / "distributions.csv", distributions_csv(records, binning));
    return {dir / "stats.json", dir / "distributions.csv"};
}

} // namespace gscm
