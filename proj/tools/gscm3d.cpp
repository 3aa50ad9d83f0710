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
// Command-line front end: validate-config, run, stats.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fmt/format.h>
#include <iostream>
#include <optional>
#include <thread>

#include "gscm/config.hpp"
#include "gscm/error.hpp"
#include "gscm/simulation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Options
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<std::string> emit;
    int workers = 0;
    std::string records;
};

std::optional<gscm::RunConfig> load(const Options& o)
{
    gscm::ValidationResult v = gscm::load_config(o.config);
    for (const gscm::Diagnostic& d : v.diagnostics)
        std::cerr << "error: " << d.to_string() << '\n';
    if (!v.ok())
        return std::nullopt;
    gscm::RunConfig c = std::move(*v.config);
    if (o.seed)
        c.seed = *o.seed;
    if (!o.out.empty())
        c.out_dir = o.out;
    if (!o.emit.empty())
    {
        c.emit_records = c.emit_cir = c.emit_stats = false;
        for (const std::string& e : o.emit)
        {
            if (e == "records")
                c.emit_records = true;
            else if (e == "cir")
                c.emit_cir = true;
            else
                c.emit_stats = true;
        }
    }
    return c;
}

int workers_of(const Options& o)
{
    if (o.workers > 0)
        return o.workers;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int cmd_validate(const Options& o)
{
    const auto c = load(o);
    if (!c)
        return kExitValidation;
    std::cout << gscm::resolved_yaml(*c);
    return kExitOk;
}

int cmd_run(const Options& o)
{
    const auto c = load(o);
    if (!c)
        return kExitValidation;
    try
    {
        const gscm::RunReport r = gscm::run(*c, c->out_dir, workers_of(o));
        std::cout << fmt::format("{} UE rows, {} link rows\n", r.ue_rows, r.link_rows);
        for (const auto& f : r.files)
            std::cout << "wrote " << f.string() << '\n';
        return kExitOk;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_stats(const Options& o)
{
    gscm::BinningOptions binning;
    std::string out = o.out;
    if (!o.config.empty())
    {
        const auto c = load(o);
        if (!c)
            return kExitValidation;
        binning = c->binning;
        if (out.empty())
            out = c->out_dir;
    }
    if (out.empty())
        out = "out";
    const std::filesystem::path records = o.records.empty() ? std::filesystem::path(out) / "links.csv" : std::filesystem::path(o.records);
    if (!std::filesystem::is_regular_file(records))
    {
        std::cerr << "error: cannot read " << records.string() << '\n';
        return kExitRuntime;
    }
    try
    {
        for (const auto& f : gscm::run_stats(records, out, binning))
            std::cout << "wrote " << f.string() << '\n';
        return kExitOk;
    }
    catch (const gscm::Error& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"gscm3d: 3D geometry-based stochastic channel model simulator"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* cmd, bool need_config) {
        auto* cfg = cmd->add_option("--config", o.config, "Run configuration (YAML)");
        if (need_config)
            cfg->required()->check(CLI::ExistingFile);
        cmd->add_option("--seed", o.seed, "Override the root seed");
        cmd->add_option("--out", o.out, "Output directory");
    };

    CLI::App* validate = app.add_subcommand("validate-config", "Check a configuration and print it fully resolved");
    add_common(validate, true);

    CLI::App* run = app.add_subcommand("run", "Simulate all drops and write the enabled outputs");
    add_common(run, true);
    run->add_option("--emit", o.emit, "Output group: records, cir or stats (repeatable)")
        ->check(CLI::IsMember({"records", "cir", "stats"}));
    run->add_option("--workers", o.workers, "Worker threads (default: all cores)")->check(CLI::PositiveNumber);

    CLI::App* stats = app.add_subcommand("stats", "Re-aggregate statistics from a links.csv");
    add_common(stats, false);
    stats->add_option("records", o.records, "links.csv to aggregate (default: <out>/links.csv)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }

    if (validate->parsed())
        return cmd_validate(o);
    if (run->parsed())
        return cmd_run(o);
    return cmd_stats(o);
}
