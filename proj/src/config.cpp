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
#include "gscm/config.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <optional>
#include <sstream>
#include <yaml-cpp/yaml.h>

#include "gscm/default_params.hpp"
#include "gscm/error.hpp"

namespace gscm {

std::string Diagnostic::to_string() const
{
    if (line > 0)
        return fmt::format("{}:{}:{}: {}", file, line, column, message);
    return fmt::format("{}: {}", file, message);
}

std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

constexpr std::array<const char*, kLspCount> kLspNames = {"ds", "asd", "asa", "zsd", "zsa", "k", "sf"};
constexpr std::array<const char*, 3> kPropagationNames = {"LOS", "NLOS", "O2I"};

class Reader
{
  public:
    Reader(std::string file, std::vector<Diagnostic>& diags) : file_(std::move(file)), diags_(diags) {}

    const std::string& file() const { return file_; }

    void error(const YAML::Node& node, const std::string& message)
    {
        const YAML::Mark m = node.IsDefined() ? node.Mark() : YAML::Mark::null_mark();
        diags_.push_back({file_, m.line >= 0 ? m.line + 1 : 0, m.column >= 0 ? m.column + 1 : 0, message});
    }

    bool expect_map(const YAML::Node& node, const std::string& path)
    {
        if (node.IsMap())
            return true;
        error(node, fmt::format("{}: expected a mapping", path));
        return false;
    }

    void allow(const YAML::Node& map, std::initializer_list<std::string_view> keys, const std::string& path)
    {
        for (auto it = map.begin(); it != map.end(); ++it)
        {
            const std::string k = it->first.Scalar();
            if (std::find(keys.begin(), keys.end(), k) == keys.end())
                error(it->first, fmt::format("{}: unknown key '{}'", path, k));
        }
    }

    template <typename T>
    bool get(const YAML::Node& map, const char* key, T& out, const std::string& path)
    {
        const YAML::Node n = map[key];
        if (!n)
            return false;
        if (!n.IsScalar())
        {
            error(n, fmt::format("{}.{}: expected a scalar", path, key));
            return false;
        }
        if constexpr (std::is_unsigned_v<T>)
        {
            if (!n.Scalar().empty() && n.Scalar()[0] == '-')
            {
                error(n, fmt::format("{}.{}: expected a non-negative integer", path, key));
                return false;
            }
        }
        try
        {
            out = n.as<T>();
            return true;
        }
        catch (const YAML::Exception&)
        {
            error(n, fmt::format("{}.{}: cannot read '{}' as {}", path, key, n.Scalar(), type_name<T>()));
            return false;
        }
    }

    bool get_pair(const YAML::Node& map, const char* key, double& a, double& b, const std::string& path)
    {
        const YAML::Node n = map[key];
        if (!n)
            return false;
        if (!n.IsSequence() || n.size() != 2)
        {
            error(n, fmt::format("{}.{}: expected [mu, sigma]", path, key));
            return false;
        }
        try
        {
            a = n[0].as<double>();
            b = n[1].as<double>();
            return true;
        }
        catch (const YAML::Exception&)
        {
            error(n, fmt::format("{}.{}: expected two numbers", path, key));
            return false;
        }
    }

    bool get_doubles(const YAML::Node& map, const char* key, std::vector<double>& out, const std::string& path)
    {
        const YAML::Node n = map[key];
        if (!n)
            return false;
        if (!n.IsSequence())
        {
            error(n, fmt::format("{}.{}: expected a list", path, key));
            return false;
        }
        try
        {
            std::vector<double> v;
            for (const YAML::Node& e : n)
                v.push_back(e.as<double>());
            out = std::move(v);
            return true;
        }
        catch (const YAML::Exception&)
        {
            error(n, fmt::format("{}.{}: expected a list of numbers", path, key));
            return false;
        }
    }

  private:
    template <typename T>
    static const char* type_name()
    {
        if constexpr (std::is_same_v<T, bool>)
            return "a boolean";
        else if constexpr (std::is_integral_v<T>)
            return "an integer";
        else if constexpr (std::is_floating_point_v<T>)
            return "a number";
        else
            return "a string";
    }

    std::string file_;
    std::vector<Diagnostic>& diags_;
};

// ---- parameter tables ----

void apply_scenario_block(Reader& r, const YAML::Node& n, ScenarioParams& p, const std::string& path)
{
    if (!r.expect_map(n, path))
        return;
    r.allow(n, {"isd", "enb_height", "min_distance_2d", "downtilt_deg"}, path);
    r.get(n, "isd", p.scenario.isd, path);
    r.get(n, "enb_height", p.scenario.enb_height, path);
    r.get(n, "min_distance_2d", p.min_distance_2d, path);
    r.get(n, "downtilt_deg", p.downtilt_deg, path);
}

void apply_los(Reader& r, const YAML::Node& n, LosCurveSet& c, const std::string& path)
{
    if (!r.expect_map(n, path))
        return;
    r.allow(n,
            {"near_distance", "decay_distance", "height_dependent", "h_threshold", "h_scale", "h_exponent", "g_coeff",
             "g_decay", "g_min_distance", "forced_probability"},
            path);
    r.get(n, "near_distance", c.near_distance, path);
    r.get(n, "decay_distance", c.decay_distance, path);
    r.get(n, "height_dependent", c.height_dependent, path);
    r.get(n, "h_threshold", c.h_threshold, path);
    r.get(n, "h_scale", c.h_scale, path);
    r.get(n, "h_exponent", c.h_exponent, path);
    r.get(n, "g_coeff", c.g_coeff, path);
    r.get(n, "g_decay", c.g_decay, path);
    r.get(n, "g_min_distance", c.g_min_distance, path);
    r.get(n, "forced_probability", c.forced_probability, path);
}

void apply_pathloss(Reader& r, const YAML::Node& n, PathlossModel& m, const std::string& path)
{
    if (!r.expect_map(n, path))
        return;
    r.allow(n,
            {"los_near_slope", "los_far_slope", "los_intercept", "los_freq_coeff", "los_bp_coeff", "nlos_form",
             "street_width", "building_height", "nlos_slope", "nlos_intercept", "nlos_freq_coeff",
             "height_gain_db_per_m", "nlos_clamp_env_height", "min_distance", "max_distance", "wall_loss_db",
             "indoor_loss_db_per_m"},
            path);
    r.get(n, "los_near_slope", m.los_near_slope, path);
    r.get(n, "los_far_slope", m.los_far_slope, path);
    r.get(n, "los_intercept", m.los_intercept, path);
    r.get(n, "los_freq_coeff", m.los_freq_coeff, path);
    r.get(n, "los_bp_coeff", m.los_bp_coeff, path);
    std::string form;
    if (r.get(n, "nlos_form", form, path))
    {
        if (form == "itu_uma")
            m.nlos_form = NlosForm::ItuUma;
        else if (form == "log_distance")
            m.nlos_form = NlosForm::LogDistance;
        else
            r.error(n["nlos_form"], fmt::format("{}.nlos_form: expected itu_uma or log_distance", path));
    }
    r.get(n, "street_width", m.street_width, path);
    r.get(n, "building_height", m.building_height, path);
    r.get(n, "nlos_slope", m.nlos_slope, path);
    r.get(n, "nlos_intercept", m.nlos_intercept, path);
    r.get(n, "nlos_freq_coeff", m.nlos_freq_coeff, path);
    r.get(n, "height_gain_db_per_m", m.height_gain_db_per_m, path);
    r.get(n, "nlos_clamp_env_height", m.nlos_clamp_env_height, path);
    r.get(n, "min_distance", m.min_distance, path);
    r.get(n, "max_distance", m.max_distance, path);
    r.get(n, "wall_loss_db", m.wall_loss_db, path);
    r.get(n, "indoor_loss_db_per_m", m.indoor_loss_db_per_m, path);
}

void apply_zsd(Reader& r, const YAML::Node& n, ZsdCurve& c, const std::string& path)
{
    if (!r.expect_map(n, path))
        return;
    r.allow(n, {"slope_per_km", "height_coeff", "height_term", "intercept", "floor", "sigma"}, path);
    r.get(n, "slope_per_km", c.slope_per_km, path);
    r.get(n, "height_coeff", c.height_coeff, path);
    std::string term;
    if (r.get(n, "height_term", term, path))
    {
        if (term == "above_street")
            c.height_term = ZsdHeightTerm::AboveStreet;
        else if (term == "abs_diff_bs")
            c.height_term = ZsdHeightTerm::AbsDiffBs;
        else if (term == "above_bs")
            c.height_term = ZsdHeightTerm::AboveBs;
        else
            r.error(n["height_term"],
                    fmt::format("{}.height_term: expected above_street, abs_diff_bs or above_bs", path));
    }
    r.get(n, "intercept", c.intercept, path);
    r.get(n, "floor", c.floor, path);
    r.get(n, "sigma", c.sigma, path);
}

void apply_offset(Reader& r, const YAML::Node& n, ZodOffsetCurve& c, const std::string& path)
{
    if (!r.expect_map(n, path))
        return;
    r.allow(n, {"zero", "sign", "log_distance_coeff", "intercept", "height_coeff", "min_distance"}, path);
    r.get(n, "zero", c.zero, path);
    r.get(n, "sign", c.sign, path);
    r.get(n, "log_distance_coeff", c.log_distance_coeff, path);
    r.get(n, "intercept", c.intercept, path);
    r.get(n, "height_coeff", c.height_coeff, path);
    r.get(n, "min_distance", c.min_distance, path);
}

void apply_elevation(Reader& r, const YAML::Node& n, ElevationModel& e, const std::string& path)
{
    if (!r.expect_map(n, path))
        return;
    r.allow(n, {"zsd_los", "zsd_nlos", "zod_offset_los", "zod_offset_nlos"}, path);
    if (n["zsd_los"])
        apply_zsd(r, n["zsd_los"], e.zsd_los, path + ".zsd_los");
    if (n["zsd_nlos"])
        apply_zsd(r, n["zsd_nlos"], e.zsd_nlos, path + ".zsd_nlos");
    if (n["zod_offset_los"])
        apply_offset(r, n["zod_offset_los"], e.offset_los, path + ".zod_offset_los");
    if (n["zod_offset_nlos"])
        apply_offset(r, n["zod_offset_nlos"], e.offset_nlos, path + ".zod_offset_nlos");
}

void apply_correlation(Reader& r, const YAML::Node& n, LspMatrix& c, const std::string& path)
{
    if (!r.expect_map(n, path))
        return;
    for (auto it = n.begin(); it != n.end(); ++it)
    {
        const std::string key = it->first.Scalar();
        const auto us = key.find('_');
        int a = -1, b = -1;
        if (us != std::string::npos)
        {
            for (int i = 0; i < kLspCount; ++i)
            {
                if (key.substr(0, us) == kLspNames[static_cast<std::size_t>(i)])
                    a = i;
                if (key.substr(us + 1) == kLspNames[static_cast<std::size_t>(i)])
                    b = i;
            }
        }
        if (a < 0 || b < 0 || a == b)
        {
            r.error(it->first, fmt::format("{}: '{}' is not a pair of distinct ds, asd, asa, zsd, zsa, k, sf", path, key));
            continue;
        }
        try
        {
            c[a][b] = c[b][a] = it->second.as<double>();
        }
        catch (const YAML::Exception&)
        {
            r.error(it->second, fmt::format("{}.{}: expected a number", path, key));
        }
    }
}

void apply_lsp(Reader& r, const YAML::Node& n, LspTable& t, const std::string& path)
{
    if (!r.expect_map(n, path))
        return;
    r.allow(n,
            {"ds", "asd", "asa", "zsa", "k", "sf_sigma_db", "delay_scaling", "xpr", "clusters", "rays", "cluster_asd",
             "cluster_asa", "cluster_zsa", "cluster_shadow_db", "correlation"},
            path);
    r.get_pair(n, "ds", t.ds.mu, t.ds.sigma, path);
    r.get_pair(n, "asd", t.asd.mu, t.asd.sigma, path);
    r.get_pair(n, "asa", t.asa.mu, t.asa.sigma, path);
    r.get_pair(n, "zsa", t.zsa.mu, t.zsa.sigma, path);
    r.get_pair(n, "k", t.k_db.mu, t.k_db.sigma, path);
    r.get(n, "sf_sigma_db", t.sf_sigma_db, path);
    r.get(n, "delay_scaling", t.delay_scaling, path);
    r.get_pair(n, "xpr", t.xpr_mu_db, t.xpr_sigma_db, path);
    r.get(n, "clusters", t.n_clusters, path);
    r.get(n, "rays", t.n_rays, path);
    r.get(n, "cluster_asd", t.cluster_asd, path);
    r.get(n, "cluster_asa", t.cluster_asa, path);
    r.get(n, "cluster_zsa", t.cluster_zsa, path);
    r.get(n, "cluster_shadow_db", t.cluster_shadow_db, path);
    if (n["correlation"])
        apply_correlation(r, n["correlation"], t.correlation, path + ".correlation");
}

void apply_scaling_map(Reader& r, const YAML::Node& n, std::map<int, double>& m, const std::string& path)
{
    if (!r.expect_map(n, path))
        return;
    for (auto it = n.begin(); it != n.end(); ++it)
    {
        try
        {
            m[it->first.as<int>()] = it->second.as<double>();
        }
        catch (const YAML::Exception&)
        {
            r.error(it->first, fmt::format("{}: expected <cluster count>: <factor>", path));
        }
    }
}

void apply_params(Reader& r, const YAML::Node& n, ScenarioParams& p, const std::string& path)
{
    if (!r.expect_map(n, path))
        return;
    r.allow(n, {"scenario", "los_probability", "pathloss", "elevation", "lsp", "angle_scaling"}, path);
    if (n["scenario"])
        apply_scenario_block(r, n["scenario"], p, path + ".scenario");
    if (n["los_probability"])
        apply_los(r, n["los_probability"], p.los, path + ".los_probability");
    if (n["pathloss"])
        apply_pathloss(r, n["pathloss"], p.pathloss, path + ".pathloss");
    if (n["elevation"])
        apply_elevation(r, n["elevation"], p.elevation, path + ".elevation");
    if (const YAML::Node lsp = n["lsp"])
    {
        if (r.expect_map(lsp, path + ".lsp"))
        {
            r.allow(lsp, {"LOS", "NLOS", "O2I"}, path + ".lsp");
            for (std::size_t i = 0; i < 3; ++i)
                if (lsp[kPropagationNames[i]])
                    apply_lsp(r, lsp[kPropagationNames[i]], p.lsp[i], path + ".lsp." + kPropagationNames[i]);
        }
    }
    if (const YAML::Node s = n["angle_scaling"])
    {
        if (r.expect_map(s, path + ".angle_scaling"))
        {
            r.allow(s, {"azimuth", "zenith"}, path + ".angle_scaling");
            if (s["azimuth"])
                apply_scaling_map(r, s["azimuth"], p.scaling.azimuth, path + ".angle_scaling.azimuth");
            if (s["zenith"])
                apply_scaling_map(r, s["zenith"], p.scaling.zenith, path + ".angle_scaling.zenith");
        }
    }
}

// Applies every scenario block of a parameter document.
void apply_param_document(Reader& r, const YAML::Node& doc, std::map<ScenarioKind, ScenarioParams>& params,
                          bool allow_include)
{
    if (!r.expect_map(doc, "parameters"))
        return;
    for (auto it = doc.begin(); it != doc.end(); ++it)
    {
        const std::string key = it->first.Scalar();
        if (allow_include && key == "include")
            continue;
        if (key != "UMa" && key != "UMi")
        {
            r.error(it->first, fmt::format("parameters: unknown key '{}' (expected UMa, UMi{})", key,
                                           allow_include ? " or include" : ""));
            continue;
        }
        apply_params(r, it->second, params[scenario_from_string(key)], key);
    }
}

std::map<ScenarioKind, ScenarioParams> builtin_params()
{
    std::vector<Diagnostic> diags;
    Reader r("<default parameters>", diags);
    std::map<ScenarioKind, ScenarioParams> params;
    for (ScenarioKind k : {ScenarioKind::UMa, ScenarioKind::UMi})
        params[k].scenario = Scenario::defaults(k);
    apply_param_document(r, YAML::Load(detail::kDefaultParamsYaml), params, false);
    if (!diags.empty())
        throw ConfigError("embedded default parameters are invalid: " + diags.front().to_string());
    return params;
}

// ---- run config sections ----

void read_element(Reader& r, const YAML::Node& n, ElementPattern& e, const std::string& path)
{
    if (!r.expect_map(n, path))
        return;
    r.allow(n, {"isotropic", "hpbw_az", "hpbw_el", "gain_dbi", "floor_db"}, path);
    r.get(n, "isotropic", e.isotropic, path);
    r.get(n, "hpbw_az", e.hpbw_az, path);
    r.get(n, "hpbw_el", e.hpbw_el, path);
    r.get(n, "gain_dbi", e.gain_max_dbi, path);
    r.get(n, "floor_db", e.floor_attenuation_db, path);
}

void read_array(Reader& r, const YAML::Node& n, ArrayGeometry& a, const std::string& path)
{
    if (!r.expect_map(n, path))
        return;
    r.allow(n, {"rows", "cols", "dv", "dh", "slants", "element"}, path);
    r.get(n, "rows", a.rows, path);
    r.get(n, "cols", a.cols, path);
    r.get(n, "dv", a.dv, path);
    r.get(n, "dh", a.dh, path);
    r.get_doubles(n, "slants", a.slants_deg, path);
    if (n["element"])
        read_element(r, n["element"], a.pattern, path + ".element");
}

using OptNode = std::optional<YAML::Node>;

OptNode child(const YAML::Node& map, const char* key)
{
    YAML::Node n = map[key];
    if (!n)
        return std::nullopt;
    return n;
}

struct Anchors
{
    YAML::Node root;
    OptNode carrier, bandwidth, layout, drops, antenna, fast_fading, statistics, output, parameters;
};

void read_run(Reader& r, const YAML::Node& root, RunConfig& c, Anchors& a)
{
    r.allow(root,
            {"seed", "scenarios", "carrier_hz", "bandwidth_hz", "layout", "drops", "antenna", "fast_fading",
             "statistics", "output", "parameters"},
            "config");
    a.root = root;
    if (!root["seed"])
        r.error(root, "config: missing required key 'seed'");
    else
        r.get(root, "seed", c.seed, "config");

    if (const YAML::Node s = root["scenarios"])
    {
        std::vector<ScenarioKind> kinds;
        if (!s.IsSequence() || s.size() == 0)
            r.error(s, "config.scenarios: expected a non-empty list of UMa / UMi");
        else
            for (const YAML::Node& e : s)
            {
                const std::string name = e.IsScalar() ? e.Scalar() : "";
                if (name != "UMa" && name != "UMi")
                    r.error(e, fmt::format("config.scenarios: unknown scenario '{}' (expected UMa or UMi)", name));
                else if (std::find(kinds.begin(), kinds.end(), scenario_from_string(name)) == kinds.end())
                    kinds.push_back(scenario_from_string(name));
            }
        if (!kinds.empty())
            c.scenarios = kinds;
    }
    a.carrier = child(root, "carrier_hz");
    a.bandwidth = child(root, "bandwidth_hz");
    r.get(root, "carrier_hz", c.carrier_hz, "config");
    r.get(root, "bandwidth_hz", c.bandwidth_hz, "config");

    if ((a.layout = child(root, "layout")) && r.expect_map(*a.layout, "layout"))
    {
        r.allow(*a.layout, {"rings", "wraparound"}, "layout");
        r.get(*a.layout, "rings", c.rings, "layout");
        r.get(*a.layout, "wraparound", c.wraparound, "layout");
    }
    if ((a.drops = child(root, "drops")) && r.expect_map(*a.drops, "drops"))
    {
        const YAML::Node& d = *a.drops;
        r.allow(d,
                {"count", "ues_per_sector", "indoor_fraction", "max_indoor_depth", "ue_speed_kmh", "min_floors",
                 "max_floors", "max_retries"},
                "drops");
        r.get(d, "count", c.drops, "drops");
        r.get(d, "ues_per_sector", c.ues_per_sector, "drops");
        r.get(d, "indoor_fraction", c.drop.indoor_fraction, "drops");
        r.get(d, "max_indoor_depth", c.drop.max_indoor_depth, "drops");
        double kmh = c.drop.ue_speed_mps * 3.6;
        if (r.get(d, "ue_speed_kmh", kmh, "drops"))
            c.drop.ue_speed_mps = kmh / 3.6;
        r.get(d, "min_floors", c.drop.min_floors, "drops");
        r.get(d, "max_floors", c.drop.max_floors, "drops");
        r.get(d, "max_retries", c.drop.max_retries, "drops");
    }
    if ((a.antenna = child(root, "antenna")) && r.expect_map(*a.antenna, "antenna"))
    {
        const YAML::Node& n = *a.antenna;
        r.allow(n, {"polarization", "unpolarized", "tx", "rx"}, "antenna");
        std::string pol;
        if (r.get(n, "polarization", pol, "antenna"))
        {
            if (pol == "slanted_dipole")
                c.polarization = PolarizationModel::SlantedDipole;
            else if (pol == "constant")
                c.polarization = PolarizationModel::Constant;
            else
                r.error(n["polarization"], "antenna.polarization: expected slanted_dipole or constant");
        }
        bool unpolarized = !c.polarized;
        if (r.get(n, "unpolarized", unpolarized, "antenna"))
            c.polarized = !unpolarized;
        if (n["tx"])
            read_array(r, n["tx"], c.tx, "antenna.tx");
        if (n["rx"])
            read_array(r, n["rx"], c.rx, "antenna.rx");
    }
    if ((a.fast_fading = child(root, "fast_fading")) && r.expect_map(*a.fast_fading, "fast_fading"))
    {
        const YAML::Node& n = *a.fast_fading;
        r.allow(n, {"subclusters", "prune_below_db", "samples", "sample_interval_s"}, "fast_fading");
        r.get(n, "subclusters", c.subclusters, "fast_fading");
        r.get(n, "prune_below_db", c.prune_below_db, "fast_fading");
        r.get(n, "samples", c.samples, "fast_fading");
        r.get(n, "sample_interval_s", c.sample_interval_s, "fast_fading");
    }
    if ((a.statistics = child(root, "statistics")) && r.expect_map(*a.statistics, "statistics"))
    {
        const YAML::Node& n = *a.statistics;
        r.allow(n, {"binning", "bins", "max_bins", "zsd_estimator"}, "statistics");
        std::string binning;
        if (r.get(n, "binning", binning, "statistics"))
        {
            if (binning == "freedman_diaconis")
                c.binning.rule = Binning::FreedmanDiaconis;
            else if (binning == "fixed")
                c.binning.rule = Binning::Fixed;
            else
                r.error(n["binning"], "statistics.binning: expected freedman_diaconis or fixed");
        }
        r.get(n, "bins", c.binning.fixed_bins, "statistics");
        r.get(n, "max_bins", c.binning.max_bins, "statistics");
        std::string est;
        if (r.get(n, "zsd_estimator", est, "statistics"))
        {
            if (est == "linear")
                c.zsd_estimator = ZsdEstimator::Linear;
            else if (est == "circular")
                c.zsd_estimator = ZsdEstimator::Circular;
            else
                r.error(n["zsd_estimator"], "statistics.zsd_estimator: expected linear or circular");
        }
    }
    if ((a.output = child(root, "output")) && r.expect_map(*a.output, "output"))
    {
        const YAML::Node& n = *a.output;
        r.allow(n, {"dir", "emit"}, "output");
        r.get(n, "dir", c.out_dir, "output");
        if (const YAML::Node e = n["emit"])
        {
            if (!e.IsSequence())
                r.error(e, "output.emit: expected a list of records, cir, stats");
            else
            {
                c.emit_records = c.emit_cir = c.emit_stats = false;
                for (const YAML::Node& v : e)
                {
                    const std::string s = v.IsScalar() ? v.Scalar() : "";
                    if (s == "records")
                        c.emit_records = true;
                    else if (s == "cir")
                        c.emit_cir = true;
                    else if (s == "stats")
                        c.emit_stats = true;
                    else
                        r.error(v, fmt::format("output.emit: unknown target '{}' (expected records, cir, stats)", s));
                }
            }
        }
    }
    a.parameters = child(root, "parameters");
}

void check_semantics(Reader& r, RunConfig& c, const Anchors& a)
{
    const YAML::Node& root = a.root;
    auto at = [&](const OptNode& n) -> const YAML::Node& { return n ? *n : root; };

    if (!(c.carrier_hz >= kMinCarrierHz && c.carrier_hz <= kMaxCarrierHz))
        r.error(at(a.carrier), fmt::format("carrier_hz: applicability: {} GHz is outside the supported 2-6 GHz range",
                                           c.carrier_hz / 1e9));
    if (!(c.bandwidth_hz > 0.0 && c.bandwidth_hz <= kMaxBandwidthHz))
        r.error(at(a.bandwidth), fmt::format("bandwidth_hz: applicability: {} MHz is outside (0, 100] MHz",
                                             c.bandwidth_hz / 1e6));
    if (c.rings < 0)
        r.error(at(a.layout), "layout.rings: must be >= 0");
    if (c.drops < 1 || c.ues_per_sector < 1)
        r.error(at(a.drops), "drops: count and ues_per_sector must be >= 1");
    if (!(c.drop.indoor_fraction >= 0.0 && c.drop.indoor_fraction <= 1.0))
        r.error(at(a.drops), "drops.indoor_fraction: must lie in [0, 1]");
    if (c.drop.max_indoor_depth < 0.0 || c.drop.ue_speed_mps < 0.0 || c.drop.max_retries < 1)
        r.error(at(a.drops), "drops: indoor depth and speed must be >= 0, max_retries >= 1");
    if (c.drop.min_floors < 1 || c.drop.max_floors < c.drop.min_floors)
        r.error(at(a.drops), "drops: need 1 <= min_floors <= max_floors");
    else if (kFloorHeight * (c.drop.max_floors - 1) + kMinUeHeight > kMaxUeHeight)
        r.error(at(a.drops), fmt::format("drops.max_floors: applicability: {} floors put UEs above 22.5 m",
                                         c.drop.max_floors));
    if (c.samples < 1 || !(c.sample_interval_s > 0.0))
        r.error(at(a.fast_fading), "fast_fading: samples must be >= 1 and sample_interval_s > 0");
    if (c.binning.fixed_bins < 1 || c.binning.max_bins < 1)
        r.error(at(a.statistics), "statistics: bins and max_bins must be >= 1");

    c.tx.model = c.polarization;
    c.rx.model = c.polarization;
    for (auto [arr, name] : {std::pair{&c.tx, "antenna.tx"}, std::pair{&c.rx, "antenna.rx"}})
    {
        try
        {
            arr->validate();
        }
        catch (const ConfigError& e)
        {
            r.error(at(a.antenna), fmt::format("{}: {}", name, e.what()));
        }
    }

    for (ScenarioKind kind : c.scenarios)
    {
        ScenarioParams& p = c.params.at(kind);
        const std::string name{to_string(kind)};
        p.scenario.kind = kind;
        p.scenario.carrier_hz = c.carrier_hz;
        p.scenario.bandwidth_hz = c.bandwidth_hz;
        p.elevation.enb_height = p.scenario.enb_height;
        const YAML::Node& anchor = at(a.parameters);
        if (!(p.scenario.isd > 0.0) || !(p.scenario.enb_height > p.pathloss.nlos_clamp_env_height))
            r.error(anchor, fmt::format("{}.scenario: isd must be positive and enb_height above the clamp "
                                        "environmental height",
                                        name));
        if (p.min_distance_2d < 0.0)
            r.error(anchor, fmt::format("{}.scenario.min_distance_2d: must be >= 0", name));
        if (!(p.pathloss.min_distance > 0.0) || p.pathloss.max_distance <= p.pathloss.min_distance)
            r.error(anchor, fmt::format("{}.pathloss: need 0 < min_distance < max_distance", name));
        try
        {
            p.elevation.validate(kind);
        }
        catch (const ConfigError& e)
        {
            r.error(anchor, fmt::format("{}.elevation: {}", name, e.what()));
        }
        for (std::size_t i = 0; i < 3; ++i)
        {
            LspTable& t = p.lsp[i];
            const std::string where = fmt::format("{}.lsp.{}", name, kPropagationNames[i]);
            try
            {
                t.prepare();
            }
            catch (const ConfigError& e)
            {
                r.error(anchor, fmt::format("{}: {}", where, e.what()));
                continue;
            }
            if (!p.scaling.azimuth.count(t.n_clusters) || !p.scaling.zenith.count(t.n_clusters))
                r.error(anchor, fmt::format("{}: no angle scaling factors for {} clusters", where, t.n_clusters));
            if (c.subclusters && t.n_rays != 20)
                r.error(anchor, fmt::format("{}: sub-clusters need 20 rays per cluster (got {}); set "
                                            "fast_fading.subclusters: false",
                                            where, t.n_rays));
        }
    }
}

// ---- echo ----

std::string num(double v)
{
    return fmt::format("{}", v);
}

void emit_pair(YAML::Emitter& e, const char* key, double a, double b)
{
    e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq << num(a) << num(b) << YAML::EndSeq;
}

void emit_params(YAML::Emitter& e, const ScenarioParams& p)
{
    e << YAML::BeginMap;
    e << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "isd" << YAML::Value << num(p.scenario.isd);
    e << YAML::Key << "enb_height" << YAML::Value << num(p.scenario.enb_height);
    e << YAML::Key << "min_distance_2d" << YAML::Value << num(p.min_distance_2d);
    e << YAML::Key << "downtilt_deg" << YAML::Value << num(p.downtilt_deg);
    e << YAML::EndMap;

    const LosCurveSet& l = p.los;
    e << YAML::Key << "los_probability" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "near_distance" << YAML::Value << num(l.near_distance);
    e << YAML::Key << "decay_distance" << YAML::Value << num(l.decay_distance);
    e << YAML::Key << "height_dependent" << YAML::Value << l.height_dependent;
    e << YAML::Key << "h_threshold" << YAML::Value << num(l.h_threshold);
    e << YAML::Key << "h_scale" << YAML::Value << num(l.h_scale);
    e << YAML::Key << "h_exponent" << YAML::Value << num(l.h_exponent);
    e << YAML::Key << "g_coeff" << YAML::Value << num(l.g_coeff);
    e << YAML::Key << "g_decay" << YAML::Value << num(l.g_decay);
    e << YAML::Key << "g_min_distance" << YAML::Value << num(l.g_min_distance);
    e << YAML::Key << "forced_probability" << YAML::Value << num(l.forced_probability);
    e << YAML::EndMap;

    const PathlossModel& m = p.pathloss;
    e << YAML::Key << "pathloss" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "los_near_slope" << YAML::Value << num(m.los_near_slope);
    e << YAML::Key << "los_far_slope" << YAML::Value << num(m.los_far_slope);
    e << YAML::Key << "los_intercept" << YAML::Value << num(m.los_intercept);
    e << YAML::Key << "los_freq_coeff" << YAML::Value << num(m.los_freq_coeff);
    e << YAML::Key << "los_bp_coeff" << YAML::Value << num(m.los_bp_coeff);
    e << YAML::Key << "nlos_form" << YAML::Value << (m.nlos_form == NlosForm::ItuUma ? "itu_uma" : "log_distance");
    e << YAML::Key << "street_width" << YAML::Value << num(m.street_width);
    e << YAML::Key << "building_height" << YAML::Value << num(m.building_height);
    e << YAML::Key << "nlos_slope" << YAML::Value << num(m.nlos_slope);
    e << YAML::Key << "nlos_intercept" << YAML::Value << num(m.nlos_intercept);
    e << YAML::Key << "nlos_freq_coeff" << YAML::Value << num(m.nlos_freq_coeff);
    e << YAML::Key << "height_gain_db_per_m" << YAML::Value << num(m.height_gain_db_per_m);
    e << YAML::Key << "nlos_clamp_env_height" << YAML::Value << num(m.nlos_clamp_env_height);
    e << YAML::Key << "min_distance" << YAML::Value << num(m.min_distance);
    e << YAML::Key << "max_distance" << YAML::Value << num(m.max_distance);
    e << YAML::Key << "wall_loss_db" << YAML::Value << num(m.wall_loss_db);
    e << YAML::Key << "indoor_loss_db_per_m" << YAML::Value << num(m.indoor_loss_db_per_m);
    e << YAML::EndMap;

    auto zsd = [&](const char* key, const ZsdCurve& z) {
        static constexpr const char* terms[] = {"above_street", "abs_diff_bs", "above_bs"};
        e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap;
        e << YAML::Key << "slope_per_km" << YAML::Value << num(z.slope_per_km);
        e << YAML::Key << "height_coeff" << YAML::Value << num(z.height_coeff);
        e << YAML::Key << "height_term" << YAML::Value << terms[static_cast<int>(z.height_term)];
        e << YAML::Key << "intercept" << YAML::Value << num(z.intercept);
        e << YAML::Key << "floor" << YAML::Value << num(z.floor);
        e << YAML::Key << "sigma" << YAML::Value << num(z.sigma);
        e << YAML::EndMap;
    };
    auto offset = [&](const char* key, const ZodOffsetCurve& o) {
        e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap;
        e << YAML::Key << "zero" << YAML::Value << o.zero;
        e << YAML::Key << "sign" << YAML::Value << num(o.sign);
        e << YAML::Key << "log_distance_coeff" << YAML::Value << num(o.log_distance_coeff);
        e << YAML::Key << "intercept" << YAML::Value << num(o.intercept);
        e << YAML::Key << "height_coeff" << YAML::Value << num(o.height_coeff);
        e << YAML::Key << "min_distance" << YAML::Value << num(o.min_distance);
        e << YAML::EndMap;
    };
    e << YAML::Key << "elevation" << YAML::Value << YAML::BeginMap;
    zsd("zsd_los", p.elevation.zsd_los);
    zsd("zsd_nlos", p.elevation.zsd_nlos);
    offset("zod_offset_los", p.elevation.offset_los);
    offset("zod_offset_nlos", p.elevation.offset_nlos);
    e << YAML::EndMap;

    e << YAML::Key << "lsp" << YAML::Value << YAML::BeginMap;
    for (std::size_t i = 0; i < 3; ++i)
    {
        const LspTable& t = p.lsp[i];
        e << YAML::Key << kPropagationNames[i] << YAML::Value << YAML::BeginMap;
        emit_pair(e, "ds", t.ds.mu, t.ds.sigma);
        emit_pair(e, "asd", t.asd.mu, t.asd.sigma);
        emit_pair(e, "asa", t.asa.mu, t.asa.sigma);
        emit_pair(e, "zsa", t.zsa.mu, t.zsa.sigma);
        emit_pair(e, "k", t.k_db.mu, t.k_db.sigma);
        e << YAML::Key << "sf_sigma_db" << YAML::Value << num(t.sf_sigma_db);
        e << YAML::Key << "delay_scaling" << YAML::Value << num(t.delay_scaling);
        emit_pair(e, "xpr", t.xpr_mu_db, t.xpr_sigma_db);
        e << YAML::Key << "clusters" << YAML::Value << t.n_clusters;
        e << YAML::Key << "rays" << YAML::Value << t.n_rays;
        e << YAML::Key << "cluster_asd" << YAML::Value << num(t.cluster_asd);
        e << YAML::Key << "cluster_asa" << YAML::Value << num(t.cluster_asa);
        e << YAML::Key << "cluster_zsa" << YAML::Value << num(t.cluster_zsa);
        e << YAML::Key << "cluster_shadow_db" << YAML::Value << num(t.cluster_shadow_db);
        e << YAML::Key << "correlation" << YAML::Value << YAML::Flow << YAML::BeginMap;
        for (int a = 0; a < kLspCount; ++a)
            for (int b = 0; b < a; ++b)
                e << YAML::Key << fmt::format("{}_{}", kLspNames[static_cast<std::size_t>(a)],
                                              kLspNames[static_cast<std::size_t>(b)])
                  << YAML::Value << num(t.correlation[a][b]);
        e << YAML::EndMap;
        e << YAML::EndMap;
    }
    e << YAML::EndMap;

    e << YAML::Key << "angle_scaling" << YAML::Value << YAML::BeginMap;
    for (auto [key, map] : {std::pair{"azimuth", &p.scaling.azimuth}, std::pair{"zenith", &p.scaling.zenith}})
    {
        e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap;
        for (const auto& [n, v] : *map)
            e << YAML::Key << n << YAML::Value << num(v);
        e << YAML::EndMap;
    }
    e << YAML::EndMap;
    e << YAML::EndMap;
}

void emit_array(YAML::Emitter& e, const char* key, const ArrayGeometry& a)
{
    e << YAML::Key << key << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "rows" << YAML::Value << a.rows;
    e << YAML::Key << "cols" << YAML::Value << a.cols;
    e << YAML::Key << "dv" << YAML::Value << num(a.dv);
    e << YAML::Key << "dh" << YAML::Value << num(a.dh);
    e << YAML::Key << "slants" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double s : a.slants_deg)
        e << num(s);
    e << YAML::EndSeq;
    e << YAML::Key << "element" << YAML::Value << YAML::Flow << YAML::BeginMap;
    e << YAML::Key << "isotropic" << YAML::Value << a.pattern.isotropic;
    e << YAML::Key << "hpbw_az" << YAML::Value << num(a.pattern.hpbw_az);
    e << YAML::Key << "hpbw_el" << YAML::Value << num(a.pattern.hpbw_el);
    e << YAML::Key << "gain_dbi" << YAML::Value << num(a.pattern.gain_max_dbi);
    e << YAML::Key << "floor_db" << YAML::Value << num(a.pattern.floor_attenuation_db);
    e << YAML::EndMap;
    e << YAML::EndMap;
}

} // namespace

ScenarioParams default_scenario_params(ScenarioKind kind)
{
    static const std::map<ScenarioKind, ScenarioParams> params = [] {
        auto p = builtin_params();
        for (auto& [k, v] : p)
        {
            v.elevation.enb_height = v.scenario.enb_height;
            for (LspTable& t : v.lsp)
                t.prepare();
        }
        return p;
    }();
    return params.at(kind);
}

ValidationResult parse_config(const std::string& text, const std::string& file_name,
                              const std::filesystem::path& base_dir)
{
    ValidationResult result;
    Reader r(file_name, result.diagnostics);
    YAML::Node root;
    try
    {
        root = YAML::Load(text);
    }
    catch (const YAML::ParserException& e)
    {
        result.diagnostics.push_back({file_name, e.mark.line + 1, e.mark.column + 1, "parse error: " + e.msg});
        return result;
    }
    if (!root.IsMap())
    {
        result.diagnostics.push_back({file_name, 1, 1, "config: expected a mapping at the top level"});
        return result;
    }

    RunConfig c;
    c.tx.rows = 8;
    c.tx.cols = 4;
    c.tx.slants_deg = {45.0, -45.0};
    c.rx.slants_deg = {0.0, 90.0};
    c.rx.pattern = ElementPattern::isotropic_pattern(0.0);
    c.params = builtin_params();

    Anchors anchors;
    read_run(r, root, c, anchors);

    if (anchors.parameters)
    {
        const YAML::Node& pn = *anchors.parameters;
        if (r.expect_map(pn, "parameters"))
        {
            if (const YAML::Node inc = pn["include"])
            {
                std::vector<std::string> files;
                if (inc.IsScalar())
                    files.push_back(inc.Scalar());
                else if (inc.IsSequence())
                    for (const YAML::Node& f : inc)
                        files.push_back(f.as<std::string>(""));
                else
                    r.error(inc, "parameters.include: expected a file name or a list of file names");
                for (const std::string& f : files)
                {
                    const std::filesystem::path path = base_dir / f;
                    std::ifstream in(path);
                    if (!in)
                    {
                        r.error(inc, fmt::format("parameters.include: cannot read '{}'", path.string()));
                        continue;
                    }
                    std::stringstream ss;
                    ss << in.rdbuf();
                    Reader inc_reader(path.string(), result.diagnostics);
                    try
                    {
                        apply_param_document(inc_reader, YAML::Load(ss.str()), c.params, false);
                    }
                    catch (const YAML::ParserException& e)
                    {
                        result.diagnostics.push_back(
                            {path.string(), e.mark.line + 1, e.mark.column + 1, "parse error: " + e.msg});
                    }
                }
            }
            apply_param_document(r, pn, c.params, true);
        }
    }

    check_semantics(r, c, anchors);
    if (result.diagnostics.empty())
        result.config = std::move(c);
    return result;
}

ValidationResult load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        ValidationResult r;
        r.diagnostics.push_back({path.string(), 0, 0, "cannot open config file"});
        return r;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string(), path.parent_path());
}

std::string resolved_yaml(const RunConfig& c, bool for_hash)
{
    YAML::Emitter e;
    e << YAML::BeginMap;
    if (!for_hash)
        e << YAML::Key << "seed" << YAML::Value << c.seed;
    e << YAML::Key << "scenarios" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (ScenarioKind k : c.scenarios)
        e << std::string(to_string(k));
    e << YAML::EndSeq;
    e << YAML::Key << "carrier_hz" << YAML::Value << num(c.carrier_hz);
    e << YAML::Key << "bandwidth_hz" << YAML::Value << num(c.bandwidth_hz);

    e << YAML::Key << "layout" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "rings" << YAML::Value << c.rings;
    e << YAML::Key << "wraparound" << YAML::Value << c.wraparound;
    e << YAML::EndMap;

    e << YAML::Key << "drops" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "count" << YAML::Value << c.drops;
    e << YAML::Key << "ues_per_sector" << YAML::Value << c.ues_per_sector;
    e << YAML::Key << "indoor_fraction" << YAML::Value << num(c.drop.indoor_fraction);
    e << YAML::Key << "max_indoor_depth" << YAML::Value << num(c.drop.max_indoor_depth);
    e << YAML::Key << "ue_speed_kmh" << YAML::Value << num(c.drop.ue_speed_mps * 3.6);
    e << YAML::Key << "min_floors" << YAML::Value << c.drop.min_floors;
    e << YAML::Key << "max_floors" << YAML::Value << c.drop.max_floors;
    e << YAML::Key << "max_retries" << YAML::Value << c.drop.max_retries;
    e << YAML::EndMap;

    e << YAML::Key << "antenna" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "polarization" << YAML::Value
      << (c.polarization == PolarizationModel::SlantedDipole ? "slanted_dipole" : "constant");
    e << YAML::Key << "unpolarized" << YAML::Value << !c.polarized;
    emit_array(e, "tx", c.tx);
    emit_array(e, "rx", c.rx);
    e << YAML::EndMap;

    e << YAML::Key << "fast_fading" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "subclusters" << YAML::Value << c.subclusters;
    e << YAML::Key << "prune_below_db" << YAML::Value << num(c.prune_below_db);
    e << YAML::Key << "samples" << YAML::Value << c.samples;
    e << YAML::Key << "sample_interval_s" << YAML::Value << num(c.sample_interval_s);
    e << YAML::EndMap;

    e << YAML::Key << "statistics" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "binning" << YAML::Value
      << (c.binning.rule == Binning::FreedmanDiaconis ? "freedman_diaconis" : "fixed");
    e << YAML::Key << "bins" << YAML::Value << c.binning.fixed_bins;
    e << YAML::Key << "max_bins" << YAML::Value << c.binning.max_bins;
    e << YAML::Key << "zsd_estimator" << YAML::Value
      << (c.zsd_estimator == ZsdEstimator::Linear ? "linear" : "circular");
    e << YAML::EndMap;

    if (!for_hash)
    {
        e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "dir" << YAML::Value << c.out_dir;
        e << YAML::Key << "emit" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        if (c.emit_records)
            e << "records";
        if (c.emit_cir)
            e << "cir";
        if (c.emit_stats)
            e << "stats";
        e << YAML::EndSeq;
        e << YAML::EndMap;
    }

    e << YAML::Key << "parameters" << YAML::Value << YAML::BeginMap;
    for (ScenarioKind k : c.scenarios)
    {
        e << YAML::Key << std::string(to_string(k)) << YAML::Value;
        emit_params(e, c.params.at(k));
    }
    e << YAML::EndMap;
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

std::uint64_t config_hash(const RunConfig& config)
{
    return fnv1a64(resolved_yaml(config, true));
}

} // namespace gscm
