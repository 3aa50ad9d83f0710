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

#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "gscm/config.hpp"
#include "gscm/error.hpp"
#include "gscm/simulation.hpp"

using namespace gscm;

namespace {

RunConfig config(const std::string& extra = "")
{
    ValidationResult v = parse_config("seed: 17\n" + extra, "sim.yaml", ".");
    REQUIRE(v.ok());
    return *v.config;
}

RunConfig small(const std::string& extra = "")
{
    return config("layout: {rings: 1}\ndrops: {ues_per_sector: 3}\n" + extra);
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t lines(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

} // namespace

TEST_CASE("row counts for two rings and ten UEs per sector")
{
    const RunConfig c = config("scenarios: [UMa]\noutput: {emit: [records]}\n");
    const SimulationResult r = simulate(c, 2);
    REQUIRE(r.drops.size() == 1);
    CHECK(r.drops[0].ues.size() == 570);
    CHECK(r.records.size() == 570 * 57);
    CHECK(lines(ues_csv(r)) == 1 + 570);
    CHECK(lines(links_csv(r.records)) == 1 + 570 * 57);
    CHECK(r.site_links[0].size() == 570 * 19);
}

TEST_CASE("one serving link per UE and per-site sharing")
{
    const SimulationResult r = simulate(small(), 2);
    std::map<std::tuple<std::string, std::uint32_t, std::uint32_t>, int> serving;
    for (const LinkRecord& l : r.records)
        serving[{l.scenario, l.drop, l.ue}] += l.serving ? 1 : 0;
    for (const auto& [k, n] : serving)
        CHECK(n == 1);

    for (std::size_t i = 0; i + 2 < r.records.size(); i += 3)
    {
        const LinkRecord& a = r.records[i];
        const LinkRecord& b = r.records[i + 2];
        REQUIRE(a.site == b.site);
        REQUIRE(a.ue == b.ue);
        CHECK(a.sf_db == b.sf_db);
        CHECK(a.lsp.ds == b.lsp.ds);
        CHECK(a.pl.total_db == b.pl.total_db);
        CHECK(a.los == b.los);
        CHECK(a.mean_zod == b.mean_zod);
        CHECK(a.coupling_loss_db == doctest::Approx(a.pl.total_db + a.sf_db - a.tx_gain_db - a.rx_gain_db));
    }

    // serving link really is the argmin
    std::map<std::tuple<std::string, std::uint32_t>, double> best;
    for (const LinkRecord& l : r.records)
    {
        auto key = std::tuple{l.scenario, l.ue};
        best[key] = best.count(key) ? std::min(best[key], l.coupling_loss_db) : l.coupling_loss_db;
    }
    for (const LinkRecord& l : r.records)
        if (l.serving)
            CHECK(l.coupling_loss_db == best[{l.scenario, l.ue}]);
}

TEST_CASE("record invariants")
{
    const SimulationResult r = simulate(small(), 1);
    for (const LinkRecord& l : r.records)
    {
        CHECK(l.d_3d >= l.d_2d);
        CHECK(l.h_ue >= 1.5);
        CHECK(l.h_ue <= 22.5);
        CHECK(std::fmod(l.h_ue - 1.5, 3.0) == 0.0);
        CHECK(l.pl.total_db == doctest::Approx(l.pl.outdoor_db + l.pl.wall_db + l.pl.indoor_db));
        CHECK(l.los == (l.los_type != LosType::None));
        if (l.scenario == "UMi")
            CHECK(l.los_type != LosType::Type2);
        if (l.los_type == LosType::Type1)
            CHECK(l.h_e == 1.0);
        if (!l.indoor)
        {
            CHECK(l.pl.wall_db == 0.0);
            CHECK(l.pl.indoor_db == 0.0);
        }
        CHECK(l.zsd >= 0.0);
        CHECK(l.mean_zod > 0.0);
        CHECK(l.mean_zod < 180.0);
    }
}

TEST_CASE("determinism across runs and worker counts")
{
    const RunConfig c = small();
    const std::string a = links_csv(simulate(c, 1).records);
    const std::string b = links_csv(simulate(c, 1).records);
    const std::string d = links_csv(simulate(c, 4).records);
    CHECK(a == b);
    CHECK(a == d);
}

TEST_CASE("seed isolation")
{
    RunConfig a = small();
    RunConfig b = small();
    b.seed = 18;
    CHECK(config_hash(a) == config_hash(b));
    const SimulationResult ra = simulate(a, 2);
    const SimulationResult rb = simulate(b, 2);
    REQUIRE(ra.records.size() == rb.records.size());
    int same_sf = 0;
    for (std::size_t i = 0; i < ra.records.size(); i += 3)
        same_sf += ra.records[i].sf_db == rb.records[i].sf_db ? 1 : 0;
    CHECK(same_sf == 0);
}

TEST_CASE("adding links does not disturb existing ones")
{
    const SimulationResult one = simulate(small("scenarios: [UMa]\n"), 2);
    const SimulationResult both = simulate(small("drops: {count: 2, ues_per_sector: 3}\n"), 2);
    std::vector<LinkRecord> uma_drop0;
    for (const LinkRecord& l : both.records)
        if (l.scenario == "UMa" && l.drop == 0)
            uma_drop0.push_back(l);
    CHECK(links_csv(uma_drop0) == links_csv(one.records));
    CHECK(stats_json(uma_drop0) == stats_json(one.records));

    // a single site link evaluated on its own matches the batch result
    const RunConfig c = small("scenarios: [UMa]\n");
    const DropState s = drop_ues(c, ScenarioKind::UMa, 0);
    const SiteLink l = evaluate_site_link(c, s, 4, 11);
    const SiteLink& batch = one.site_links[0][11 * 7 + 4];
    CHECK(l.lsp.sf_db == batch.lsp.sf_db);
    CHECK(l.mean_zod == batch.mean_zod);
    CHECK(l.zsd == batch.zsd);
}

TEST_CASE("scenario streams differ")
{
    CHECK(scenario_seed(1, ScenarioKind::UMa) != scenario_seed(1, ScenarioKind::UMi));
    CHECK(scenario_seed(1, ScenarioKind::UMa) != scenario_seed(2, ScenarioKind::UMa));
    CHECK(cir_link_id(1, 2, 3) == ((1ULL << 48) | (2ULL << 24) | 3ULL));
}

TEST_CASE("serving channel tensor")
{
    const RunConfig c = small("scenarios: [UMi]\nfast_fading: {samples: 3}\n");
    const SimulationResult r = simulate(c, 1);
    const LinkRecord* serving = nullptr;
    for (const LinkRecord& l : r.records)
        if (l.serving)
        {
            serving = &l;
            break;
        }
    REQUIRE(serving != nullptr);
    const SiteLink& link = r.site_links[0][serving->ue * 7 + serving->site];
    const ChannelTensor h = serving_channel(c, r.drops[0], link, serving->sector, 2);
    CHECK(h.n_tx == 64);
    CHECK(h.n_rx == 2);
    CHECK(h.n_samples == 3);
    for (const cdouble& v : h.h)
        CHECK(std::isfinite(std::abs(v)));
}

TEST_CASE("run writes outputs and stats re-aggregation is idempotent")
{
    const auto dir = std::filesystem::temp_directory_path() / "gscm_test_run";
    std::filesystem::remove_all(dir);
    RunConfig c = small("output: {emit: [records, stats, cir]}\n");
    const RunReport rep = run(c, dir, 2);
    CHECK(rep.ue_rows == 2 * 63);
    CHECK(rep.link_rows == 2 * 63 * 21);
    for (const char* f : {"ues.csv", "links.csv", "lsps.csv", "stats.json", "distributions.csv", "manifest.json",
                          "config.resolved.yaml", "cir/cir_UMa_drop0.bin", "cir/cir_UMi_drop0.bin"})
        CHECK(std::filesystem::exists(dir / f));

    const nlohmann::json m = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(m["seed"] == 17);
    CHECK(m["generator"] == "philox4x32-10");
    CHECK(m["counts"]["links"] == rep.link_rows);
    CHECK(m["columns"]["links.csv"] == links_csv_header());
    CHECK(m["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);

    // one CIR record per serving UE
    std::ifstream cir(dir / "cir/cir_UMa_drop0.bin", std::ios::binary);
    CirRecord rec;
    int n = 0;
    while (read_cir(cir, rec))
    {
        CHECK(rec.header.n_tx == 64);
        CHECK((rec.header.link_id & 0xffffff) < 63);
        ++n;
    }
    CHECK(n == 63);

    run_stats(dir / "links.csv", dir / "again", c.binning);
    CHECK(slurp(dir / "again/stats.json") == slurp(dir / "stats.json"));
    CHECK(slurp(dir / "again/distributions.csv") == slurp(dir / "distributions.csv"));

    // the resolved config written by the run parses back to the same configuration
    const ValidationResult back = load_config(dir / "config.resolved.yaml");
    REQUIRE(back.ok());
    CHECK(config_hash(*back.config) == config_hash(c));

    {
        std::ofstream empty(dir / "empty.csv");
        empty << links_csv_header() << '\n';
    }
    CHECK_THROWS_AS(run_stats(dir / "empty.csv", dir / "empty", c.binning), RangeError);
    CHECK_THROWS_AS(run_stats(dir / "missing.csv", dir / "missing", c.binning), Error);
    std::filesystem::remove_all(dir);
}
