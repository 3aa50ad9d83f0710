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
#include "gscm/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fmt/format.h>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <tuple>

#include "gscm/error.hpp"

namespace gscm {

double coupling_loss(double pathloss_db, double sf_db, double tx_gain_db, double rx_gain_db)
{
    return pathloss_db + sf_db - tx_gain_db - rx_gain_db;
}

double coupling_loss(const LinkRecord& r, const LinkGeometry& g, const ElementPattern& tx_pattern,
                     const Orientation& tx_orientation, const ElementPattern& rx_pattern)
{
    const double gt = element_gain_db(g.los_zod, g.los_aod_global, tx_pattern, tx_orientation);
    const double gr = element_gain_db(g.los_zoa, g.los_aoa, rx_pattern);
    return coupling_loss(r.pl.total_db, r.sf_db, gt, gr);
}

std::size_t associate_serving_cell(std::span<const LinkRecord> records)
{
    if (records.empty())
        throw RangeError("serving cell association needs at least one link");
    std::size_t best = 0;
    for (std::size_t i = 1; i < records.size(); ++i)
    {
        const LinkRecord& a = records[i];
        const LinkRecord& b = records[best];
        if (a.coupling_loss_db < b.coupling_loss_db ||
            (a.coupling_loss_db == b.coupling_loss_db && a.cell < b.cell))
            best = i;
    }
    return best;
}

void mark_serving(std::vector<LinkRecord>& records)
{
    std::map<std::tuple<std::string, std::uint32_t, std::uint32_t>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < records.size(); ++i)
    {
        records[i].serving = false;
        groups[{records[i].scenario, records[i].drop, records[i].ue}].push_back(i);
    }
    std::vector<LinkRecord> tmp;
    for (const auto& [key, idx] : groups)
    {
        tmp.clear();
        for (std::size_t i : idx)
            tmp.push_back(records[i]);
        records[idx[associate_serving_cell(tmp)]].serving = true;
    }
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples, const BinningOptions& binning)
    : sorted_(std::move(samples))
{
    if (sorted_.empty())
        throw RangeError("empirical distribution of an empty sample");
    for (double v : sorted_)
        if (!std::isfinite(v))
            throw RangeError("empirical distribution of non-finite samples");
    std::sort(sorted_.begin(), sorted_.end());

    const double lo = sorted_.front(), hi = sorted_.back();
    int bins = 1;
    if (hi > lo)
    {
        if (binning.rule == Binning::Fixed)
        {
            bins = std::max(1, binning.fixed_bins);
        }
        else
        {
            const double iqr = quantile(0.75) - quantile(0.25);
            if (iqr > 0.0)
            {
                const double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted_.size()));
                bins = static_cast<int>(std::ceil((hi - lo) / width));
            }
        }
        bins = std::clamp(bins, 1, std::max(1, binning.max_bins));
    }
    const double width = hi > lo ? (hi - lo) / bins : 1.0;
    const double start = hi > lo ? lo : lo - 0.5;
    edges_.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i)
        edges_[static_cast<std::size_t>(i)] = start + width * i;
    edges_.back() = hi > lo ? hi : lo + 0.5;

    freq_.assign(static_cast<std::size_t>(bins), 0.0);
    const double unit = 1.0 / static_cast<double>(sorted_.size());
    for (double v : sorted_)
    {
        auto b = static_cast<std::size_t>(std::upper_bound(edges_.begin(), edges_.end(), v) - edges_.begin());
        b = std::clamp<std::size_t>(b, 1, freq_.size()) - 1;
        freq_[b] += unit;
    }
}

double EmpiricalDistribution::cdf(double x) const
{
    const auto k = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
    return static_cast<double>(k) / static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::quantile(double p) const
{
    if (!(p >= 0.0 && p <= 1.0))
        throw RangeError(fmt::format("quantile level {} outside [0, 1]", p));
    const auto n = static_cast<double>(sorted_.size());
    // smallest i with (i + 1) / n >= p
    auto i = static_cast<std::ptrdiff_t>(std::ceil(p * n - 1e-9)) - 1;
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(sorted_.size()) - 1);
    return sorted_[static_cast<std::size_t>(i)];
}

std::vector<double> EmpiricalDistribution::density() const
{
    std::vector<double> d(freq_.size());
    for (std::size_t i = 0; i < freq_.size(); ++i)
        d[i] = freq_[i] / (edges_[i + 1] - edges_[i]);
    return d;
}

double EmpiricalDistribution::mean() const
{
    double s = 0.0;
    for (double v : sorted_)
        s += v;
    return s / static_cast<double>(sorted_.size());
}

double mean_zod(const ClusterSet& cs)
{
    double sw = 0.0, s = 0.0;
    for (int n = 0; n < cs.n_clusters; ++n)
        for (int m = 0; m < cs.n_rays; ++m)
        {
            const double w = cs.powers[static_cast<std::size_t>(n)];
            sw += w;
            s += w * cs.zod[cs.ray(n, m)];
        }
    return s / sw;
}

double zenith_spread(const ClusterSet& cs, ZsdEstimator estimator)
{
    double sw = 0.0;
    if (estimator == ZsdEstimator::Circular)
    {
        std::complex<double> acc{};
        for (int n = 0; n < cs.n_clusters; ++n)
            for (int m = 0; m < cs.n_rays; ++m)
            {
                const double w = cs.powers[static_cast<std::size_t>(n)];
                sw += w;
                acc += std::polar(w, deg2rad(cs.zod[cs.ray(n, m)]));
            }
        const double r = std::min(std::abs(acc) / sw, 1.0);
        return rad2deg(std::sqrt(-2.0 * std::log(r)));
    }
    const double mu = mean_zod(cs);
    double s = 0.0;
    for (int n = 0; n < cs.n_clusters; ++n)
        for (int m = 0; m < cs.n_rays; ++m)
        {
            const double w = cs.powers[static_cast<std::size_t>(n)];
            const double d = cs.zod[cs.ray(n, m)] - mu;
            sw += w;
            s += w * d * d;
        }
    return std::sqrt(std::max(s / sw, 0.0));
}

std::map<std::string, ZenithSummary> zenith_summary(std::span<const LinkRecord> records, const BinningOptions& binning)
{
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> acc;
    for (const LinkRecord& r : records)
    {
        if (!r.serving)
            continue;
        auto& a = acc[r.scenario];
        a.first.push_back(r.zsd);
        a.second.push_back(r.mean_zod);
    }
    std::map<std::string, ZenithSummary> out;
    for (auto& [name, v] : acc)
        out.emplace(name, ZenithSummary{EmpiricalDistribution(std::move(v.first), binning),
                                        EmpiricalDistribution(std::move(v.second), binning)});
    return out;
}

std::string format_g9(double value)
{
    return fmt::format("{:.9g}", value);
}

namespace {

const std::vector<std::string>& link_columns()
{
    static const std::vector<std::string> cols{
        "drop",       "scenario",  "site",        "sector",   "cell",    "ue",      "d_2d",    "d_3d",
        "h_ue",       "indoor",    "los",         "los_type", "h_e",     "pl_outdoor", "pl_wall", "pl_indoor",
        "height_gain", "pl_total", "sf",          "tx_gain",  "rx_gain", "coupling_loss", "ds", "asd",
        "asa",        "zsd_lsp",   "zsa",         "k",        "zsd",     "mean_zod", "serving"};
    return cols;
}

LosType los_type_from_string(const std::string& s)
{
    if (s == "type1")
        return LosType::Type1;
    if (s == "type2")
        return LosType::Type2;
    if (s == "none")
        return LosType::None;
    throw Error(fmt::format("links.csv: unknown los_type '{}'", s));
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line)
    {
        if (c == ',')
        {
            out.push_back(cur);
            cur.clear();
        }
        else if (c != '\r')
        {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

std::string links_csv_header()
{
    std::string h;
    for (const std::string& c : link_columns())
    {
        if (!h.empty())
            h += ',';
        h += c;
    }
    return h;
}

void write_links_csv(std::ostream& out, std::span<const LinkRecord> records)
{
    out << links_csv_header() << '\n';
    for (const LinkRecord& r : records)
    {
        out << fmt::format("{},{},{},{},{},{},", r.drop, r.scenario, r.site, r.sector, r.cell, r.ue);
        const double vals1[] = {r.d_2d, r.d_3d, r.h_ue};
        for (double v : vals1)
            out << format_g9(v) << ',';
        out << (r.indoor ? 1 : 0) << ',' << (r.los ? 1 : 0) << ',' << to_string(r.los_type) << ',';
        const double vals2[] = {r.h_e,     r.pl.outdoor_db, r.pl.wall_db, r.pl.indoor_db, r.pl.height_gain_db,
                                r.pl.total_db, r.sf_db,     r.tx_gain_db, r.rx_gain_db,  r.coupling_loss_db,
                                r.lsp.ds,  r.lsp.asd,       r.lsp.asa,    r.lsp.zsd,      r.lsp.zsa,
                                r.lsp.k_db, r.zsd,          r.mean_zod};
        for (double v : vals2)
            out << format_g9(v) << ',';
        out << (r.serving ? 1 : 0) << '\n';
    }
}

std::vector<LinkRecord> read_links_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw Error("links.csv: missing header");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != links_csv_header())
        throw Error("links.csv: unexpected columns (schema mismatch)");
    const std::size_t ncol = link_columns().size();
    std::vector<LinkRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.empty())
            continue;
        const std::vector<std::string> f = split_csv(line);
        if (f.size() != ncol)
            throw Error(fmt::format("links.csv line {}: expected {} fields, got {}", lineno, ncol, f.size()));
        try
        {
            std::size_t i = 0;
            auto u32 = [&] { return static_cast<std::uint32_t>(std::stoul(f[i++])); };
            auto dbl = [&] { return std::stod(f[i++]); };
            auto flag = [&] { return f[i++] == "1"; };
            LinkRecord r;
            r.drop = u32();
            r.scenario = f[i++];
            r.site = u32();
            r.sector = u32();
            r.cell = u32();
            r.ue = u32();
            r.d_2d = dbl();
            r.d_3d = dbl();
            r.h_ue = dbl();
            r.indoor = flag();
            r.los = flag();
            r.los_type = los_type_from_string(f[i++]);
            r.h_e = dbl();
            r.pl.outdoor_db = dbl();
            r.pl.wall_db = dbl();
            r.pl.indoor_db = dbl();
            r.pl.height_gain_db = dbl();
            r.pl.total_db = dbl();
            r.sf_db = dbl();
            r.tx_gain_db = dbl();
            r.rx_gain_db = dbl();
            r.coupling_loss_db = dbl();
            r.lsp.ds = dbl();
            r.lsp.asd = dbl();
            r.lsp.asa = dbl();
            r.lsp.zsd = dbl();
            r.lsp.zsa = dbl();
            r.lsp.k_db = dbl();
            r.zsd = dbl();
            r.mean_zod = dbl();
            r.serving = flag();
            out.push_back(std::move(r));
        }
        catch (const std::logic_error&)
        {
            throw Error(fmt::format("links.csv line {}: malformed field", lineno));
        }
    }
    return out;
}

namespace {

struct Metric
{
    const char* name;
    double (*get)(const LinkRecord&);
};

constexpr Metric kMetrics[] = {
    {"coupling_loss_db", [](const LinkRecord& r) { return r.coupling_loss_db; }},
    {"zsd_deg", [](const LinkRecord& r) { return r.zsd; }},
    {"mean_zod_deg", [](const LinkRecord& r) { return r.mean_zod; }},
    {"ds_s", [](const LinkRecord& r) { return r.lsp.ds; }},
    {"asd_deg", [](const LinkRecord& r) { return r.lsp.asd; }},
    {"asa_deg", [](const LinkRecord& r) { return r.lsp.asa; }},
    {"zsa_deg", [](const LinkRecord& r) { return r.lsp.zsa; }},
};

using ServingMetrics = std::map<std::string, std::vector<std::pair<const Metric*, EmpiricalDistribution>>>;

ServingMetrics serving_metrics(std::span<const LinkRecord> records, const BinningOptions& binning)
{
    std::map<std::string, std::vector<const LinkRecord*>> by_scenario;
    for (const LinkRecord& r : records)
        if (r.serving)
            by_scenario[r.scenario].push_back(&r);
    if (by_scenario.empty())
        throw RangeError("no serving links to aggregate (empty input)");
    ServingMetrics out;
    for (const auto& [name, recs] : by_scenario)
    {
        for (const Metric& m : kMetrics)
        {
            std::vector<double> v;
            v.reserve(recs.size());
            for (const LinkRecord* r : recs)
                v.push_back(m.get(*r));
            out[name].emplace_back(&m, EmpiricalDistribution(std::move(v), binning));
        }
    }
    return out;
}

} // namespace

std::string stats_json(std::span<const LinkRecord> records, const BinningOptions& binning)
{
    nlohmann::ordered_json root;
    root["schema_version"] = 1;
    nlohmann::ordered_json dists = nlohmann::ordered_json::object();
    for (const auto& [scenario, metrics] : serving_metrics(records, binning))
    {
        nlohmann::ordered_json sj = nlohmann::ordered_json::object();
        for (const auto& [metric, d] : metrics)
        {
            nlohmann::ordered_json j;
            j["n"] = d.size();
            j["mean"] = d.mean();
            j["min"] = d.samples().front();
            j["max"] = d.samples().back();
            nlohmann::ordered_json q;
            for (const auto& [label, p] : {std::pair{"p05", 0.05}, {"p10", 0.10}, {"p25", 0.25}, {"p50", 0.50},
                                           {"p75", 0.75}, {"p90", 0.90}, {"p95", 0.95}})
                q[label] = d.quantile(p);
            j["quantiles"] = q;
            if (std::string_view(metric->name) == "mean_zod_deg")
                j["fraction_above_90"] = 1.0 - d.cdf(90.0);
            j["bin_edges"] = d.edges();
            j["frequencies"] = d.frequencies();
            sj[metric->name] = j;
        }
        dists[scenario] = sj;
    }
    root["distributions"] = dists;
    return root.dump(2) + "\n";
}

std::string distributions_csv(std::span<const LinkRecord> records, const BinningOptions& binning)
{
    std::ostringstream out;
    out << "metric,scenario,x,pdf,cdf\n";
    for (const auto& [scenario, metrics] : serving_metrics(records, binning))
    {
        for (const auto& [metric, d] : metrics)
        {
            const std::vector<double> pdf = d.density();
            const std::vector<double>& e = d.edges();
            for (std::size_t i = 0; i < pdf.size(); ++i)
                out << metric->name << ',' << scenario << ',' << format_g9(0.5 * (e[i] + e[i + 1])) << ','
                    << format_g9(pdf[i]) << ',' << format_g9(d.cdf(e[i + 1])) << '\n';
        }
    }
    return out.str();
}

} // namespace gscm
