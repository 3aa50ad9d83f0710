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
#include "gscm/fastfading.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "gscm/error.hpp"

namespace gscm {

namespace {

// normalised offsets for a 1-degree rms intra-cluster spread, 20 rays
constexpr std::array<double, 20> kRayOffsets = {0.0447,  -0.0447, 0.1413,  -0.1413, 0.2492,  -0.2492, 0.3715,
                                                -0.3715, 0.5129,  -0.5129, 0.6797,  -0.6797, 0.8844,  -0.8844,
                                                1.1481,  -1.1481, 1.5195,  -1.5195, 2.1551,  -2.1551};

constexpr double kMaxAzimuthSpread = 104.0;
constexpr double kMaxZenithSpread = 52.0;

double lookup(const std::map<int, double>& table, int n, const char* what)
{
    const auto it = table.find(n);
    if (it == table.end())
        throw ConfigError(fmt::format("no {} scaling factor configured for {} clusters", what, n));
    return it->second;
}

// shared sign / jitter / LOS-anchoring step of the cluster angle maps
std::vector<double> place_angles(RngStream& rng, std::span<const double> primes, double spread_deg, double center_deg,
                                 bool los, bool jitter)
{
    const std::size_t n = primes.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        double sign = 1.0;
        double y = 0.0;
        if (jitter)
        {
            sign = rng.uniform_int(0, 1) == 0 ? -1.0 : 1.0;
            y = rng.normal(0.0, spread_deg / 7.0);
        }
        out[i] = sign * primes[i] + y;
    }
    const double anchor = (los && n > 0) ? out[0] : 0.0;
    for (double& v : out)
        v = v - anchor + center_deg;
    return out;
}

} // namespace

std::string_view to_string(Propagation p)
{
    switch (p)
    {
    case Propagation::LOS:
        return "LOS";
    case Propagation::NLOS:
        return "NLOS";
    default:
        return "O2I";
    }
}

Propagation propagation_of(bool los, bool indoor)
{
    if (indoor)
        return Propagation::O2I;
    return los ? Propagation::LOS : Propagation::NLOS;
}

LspMatrix LspTable::identity()
{
    LspMatrix m{};
    for (int i = 0; i < kLspCount; ++i)
        m[i][i] = 1.0;
    return m;
}

void LspTable::prepare()
{
    if (!(delay_scaling > 1.0))
        throw ConfigError(fmt::format("delay scaling must exceed 1, got {}", delay_scaling));
    if (n_clusters < 1 || n_rays < 1 || n_rays > static_cast<int>(kRayOffsets.size()))
        throw ConfigError("cluster count must be >= 1 and rays per cluster within [1, 20]");
    if (sf_sigma_db < 0.0 || ds.sigma < 0.0 || asd.sigma < 0.0 || asa.sigma < 0.0 || zsa.sigma < 0.0 ||
        k_db.sigma < 0.0 || xpr_sigma_db < 0.0 || cluster_shadow_db < 0.0)
        throw ConfigError("standard deviations must be non-negative");

    for (int i = 0; i < kLspCount; ++i)
    {
        if (correlation[i][i] != 1.0)
            throw ConfigError("LSP correlation matrix must have a unit diagonal");
        for (int j = 0; j < kLspCount; ++j)
        {
            if (correlation[i][j] != correlation[j][i] || std::abs(correlation[i][j]) > 1.0)
                throw ConfigError("LSP correlation matrix must be symmetric with entries in [-1, 1]");
        }
    }
    cholesky = {};
    for (int j = 0; j < kLspCount; ++j)
    {
        double d = correlation[j][j];
        for (int k = 0; k < j; ++k)
            d -= cholesky[j][k] * cholesky[j][k];
        if (!(d > 1e-12))
            throw ConfigError("LSP correlation matrix is not positive definite");
        cholesky[j][j] = std::sqrt(d);
        for (int i = j + 1; i < kLspCount; ++i)
        {
            double s = correlation[i][j];
            for (int k = 0; k < j; ++k)
                s -= cholesky[i][k] * cholesky[j][k];
            cholesky[i][j] = s / cholesky[j][j];
        }
    }
}

double ZsdCurve::mu(double d_2d, double h_ue, double h_bs) const
{
    double h_term = 0.0;
    switch (height_term)
    {
    case ZsdHeightTerm::AboveStreet:
        h_term = h_ue - kMinUeHeight;
        break;
    case ZsdHeightTerm::AbsDiffBs:
        h_term = std::abs(h_ue - h_bs);
        break;
    case ZsdHeightTerm::AboveBs:
        h_term = std::max(h_ue - h_bs, 0.0);
        break;
    }
    return std::max(floor, slope_per_km * (d_2d / 1000.0) + height_coeff * h_term + intercept);
}

double ZodOffsetCurve::value(double d_2d, double h_ue) const
{
    if (zero)
        return 0.0;
    return sign * std::pow(10.0, log_distance_coeff * std::log10(std::max(min_distance, d_2d)) + intercept +
                                     height_coeff * (h_ue - kMinUeHeight));
}

void ElevationModel::validate(ScenarioKind kind) const
{
    for (const ZsdCurve* c : {&zsd_los, &zsd_nlos})
    {
        if (c->slope_per_km > 0.0)
            throw ConfigError("ZSD mean curve must be nonincreasing in distance (slope_per_km <= 0)");
        if (c->sigma < 0.0)
            throw ConfigError("ZSD sigma must be non-negative");
    }
    for (const ZodOffsetCurve* c : {&offset_los, &offset_nlos})
    {
        if (c->zero)
            continue;
        if (c->log_distance_coeff > 0.0)
            throw ConfigError("ZOD offset magnitude must be nonincreasing in distance (log_distance_coeff <= 0)");
        if (kind == ScenarioKind::UMa && c->height_coeff > 0.0)
            throw ConfigError("UMa ZOD offset magnitude must be nonincreasing in UE height (height_coeff <= 0)");
        if (kind == ScenarioKind::UMi && c->height_coeff != 0.0)
            throw ConfigError("UMi ZOD offset must not depend on UE height (height_coeff = 0)");
    }
    if (!offset_los.zero)
        throw ConfigError("ZOD offset of LOS links must be zero");
}

double AngleScaling::azimuth_factor(int n_clusters, bool los, double k_db) const
{
    const double c = lookup(azimuth, n_clusters, "azimuth");
    if (!los)
        return c;
    return c * (1.1035 - 0.028 * k_db - 0.002 * k_db * k_db + 0.0001 * k_db * k_db * k_db);
}

double AngleScaling::zenith_factor(int n_clusters, bool los, double k_db) const
{
    const double c = lookup(zenith, n_clusters, "zenith");
    if (!los)
        return c;
    return c * (1.3086 + 0.0339 * k_db - 0.0077 * k_db * k_db + 0.0002 * k_db * k_db * k_db);
}

LargeScaleParams generate_lsps(RngStream& rng, double d_2d, double h_ue, bool outdoor_los, const LspTable& t,
                               const ElevationModel& elevation)
{
    std::array<double, kLspCount> z{};
    for (double& v : z)
        v = rng.normal();
    std::array<double, kLspCount> x{};
    for (int i = 0; i < kLspCount; ++i)
        for (int k = 0; k <= i; ++k)
            x[i] += t.cholesky[i][k] * z[k];

    const ZsdCurve& zc = elevation.zsd(outdoor_los);
    LargeScaleParams p;
    p.zsd_mu_log = elevation.zsd_mu(d_2d, h_ue, outdoor_los);
    p.ds = std::pow(10.0, t.ds.mu + t.ds.sigma * x[kDS]);
    p.asd = std::min(std::pow(10.0, t.asd.mu + t.asd.sigma * x[kASD]), kMaxAzimuthSpread);
    p.asa = std::min(std::pow(10.0, t.asa.mu + t.asa.sigma * x[kASA]), kMaxAzimuthSpread);
    p.zsd = std::min(std::pow(10.0, p.zsd_mu_log + zc.sigma * x[kZSD]), kMaxZenithSpread);
    p.zsa = std::min(std::pow(10.0, t.zsa.mu + t.zsa.sigma * x[kZSA]), kMaxZenithSpread);
    p.k_db = t.k_db.mu + t.k_db.sigma * x[kK];
    p.sf_db = t.sf_sigma_db * x[kSF];
    return p;
}

double zod_offset(const ElevationModel& elevation, bool outdoor_los, double d_2d, double h_ue)
{
    return outdoor_los ? elevation.offset_los.value(d_2d, h_ue) : elevation.offset_nlos.value(d_2d, h_ue);
}

std::vector<double> generate_delays(RngStream& rng, double ds, double delay_scaling, int n)
{
    if (!(ds > 0.0) || !(delay_scaling > 1.0) || n < 1)
        throw RangeError("generate_delays: need ds > 0, delay_scaling > 1, n >= 1");
    std::vector<double> tau(static_cast<std::size_t>(n));
    for (double& t : tau)
        t = -delay_scaling * ds * std::log(rng.uniform());
    const double t0 = *std::min_element(tau.begin(), tau.end());
    for (double& t : tau)
        t -= t0;
    std::sort(tau.begin(), tau.end());
    return tau;
}

double los_delay_scaling(double k_db)
{
    return 0.7705 - 0.0433 * k_db + 0.0002 * k_db * k_db + 0.000017 * k_db * k_db * k_db;
}

ClusterPowers generate_powers(RngStream& rng, std::span<const double> delays, double ds, double delay_scaling,
                              double cluster_shadow_db, double k_db, bool los)
{
    if (!(ds > 0.0) || !(delay_scaling > 1.0))
        throw RangeError("generate_powers: need ds > 0 and delay_scaling > 1");
    ClusterPowers out;
    out.nlos_powers.resize(delays.size());
    const double decay = (delay_scaling - 1.0) / (delay_scaling * ds);
    for (std::size_t i = 0; i < delays.size(); ++i)
    {
        const double shadow = cluster_shadow_db > 0.0 ? rng.normal(0.0, cluster_shadow_db) : 0.0;
        out.nlos_powers[i] = std::exp(-delays[i] * decay) * std::pow(10.0, -shadow / 10.0);
    }
    const double total = std::accumulate(out.nlos_powers.begin(), out.nlos_powers.end(), 0.0);
    for (double& p : out.nlos_powers)
        p /= total;

    out.powers = out.nlos_powers;
    if (los && !out.powers.empty())
    {
        if (std::isinf(k_db) && k_db > 0.0)
        {
            std::fill(out.powers.begin(), out.powers.end(), 0.0);
            out.powers[0] = 1.0;
            return out;
        }
        const double kr = std::pow(10.0, k_db / 10.0);
        for (double& p : out.powers)
            p /= (kr + 1.0);
        out.powers[0] += kr / (kr + 1.0);
    }
    return out;
}

std::vector<double> generate_zenith_angles(RngStream& rng, double spread_deg, std::span<const double> powers,
                                           double center_deg, double offset_deg, bool los, double scaling,
                                           bool jitter)
{
    if (!(spread_deg >= 0.0) || !(scaling > 0.0) || powers.empty())
        throw RangeError("generate_zenith_angles: need spread >= 0, scaling > 0 and at least one cluster");
    const double pmax = *std::max_element(powers.begin(), powers.end());
    std::vector<double> primes(powers.size());
    for (std::size_t i = 0; i < powers.size(); ++i)
        primes[i] = -spread_deg * std::log(powers[i] / pmax) / scaling;
    std::vector<double> out = place_angles(rng, primes, spread_deg, center_deg + (los ? 0.0 : offset_deg), los, jitter);
    for (double& v : out)
        v = fold_zenith_deg(v);
    return out;
}

std::vector<double> generate_azimuth_angles(RngStream& rng, double spread_deg, std::span<const double> powers,
                                            double center_deg, bool los, double scaling, bool jitter)
{
    if (!(spread_deg >= 0.0) || !(scaling > 0.0) || powers.empty())
        throw RangeError("generate_azimuth_angles: need spread >= 0, scaling > 0 and at least one cluster");
    const double pmax = *std::max_element(powers.begin(), powers.end());
    std::vector<double> primes(powers.size());
    for (std::size_t i = 0; i < powers.size(); ++i)
        primes[i] = 2.0 * (spread_deg / 1.4) * std::sqrt(-std::log(powers[i] / pmax)) / scaling;
    std::vector<double> out = place_angles(rng, primes, spread_deg, center_deg, los, jitter);
    for (double& v : out)
        v = wrap_azimuth_deg(v);
    return out;
}

std::vector<double> ray_offsets(int m)
{
    if (m < 1 || m > static_cast<int>(kRayOffsets.size()))
        throw ConfigError(fmt::format("rays per cluster must lie in [1, 20], got {}", m));
    if (m == 1)
        return {0.0};
    return {kRayOffsets.begin(), kRayOffsets.begin() + m};
}

void ClusterSet::resize(int n, int m)
{
    n_clusters = n;
    n_rays = m;
    const auto nn = static_cast<std::size_t>(n);
    const std::size_t nr = ray_count();
    delays.assign(nn, 0.0);
    powers.assign(nn, 0.0);
    nlos_powers.assign(nn, 0.0);
    cluster_aod.assign(nn, 0.0);
    cluster_aoa.assign(nn, 0.0);
    cluster_zod.assign(nn, 90.0);
    cluster_zoa.assign(nn, 90.0);
    aod.assign(nr, 0.0);
    aoa.assign(nr, 0.0);
    zod.assign(nr, 90.0);
    zoa.assign(nr, 90.0);
    xpr.assign(nr, 1.0);
    phases.assign(nr, {0.0, 0.0, 0.0, 0.0});
}

void couple_subpaths(RngStream& rng, ClusterSet& cs)
{
    const auto m = static_cast<std::size_t>(cs.n_rays);
    if (m < 2)
        return;
    for (int n = 0; n < cs.n_clusters; ++n)
    {
        const std::size_t first = cs.ray(n, 0);
        for (std::vector<double>* v : {&cs.aoa, &cs.zoa, &cs.zod})
            rng.shuffle(std::span<double>(v->data() + first, m));
    }
}

double draw_xpr(RngStream& rng, double xpr_mu_db, double xpr_sigma_db)
{
    if (xpr_sigma_db < 0.0)
        throw RangeError("XPR sigma must be non-negative");
    const double x = xpr_sigma_db == 0.0 ? xpr_mu_db : rng.normal(xpr_mu_db, xpr_sigma_db);
    return std::pow(10.0, x / 10.0);
}

std::array<double, 4> draw_phases(RngStream& rng)
{
    std::array<double, 4> out{};
    for (double& p : out)
        p = std::numbers::pi - 2.0 * std::numbers::pi * rng.uniform(); // (-pi, pi)
    return out;
}

Vec3 spherical_unit_vector(double theta_deg, double phi_deg)
{
    const double t = deg2rad(theta_deg), p = deg2rad(phi_deg);
    return {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)};
}

double doppler_frequency(const Vec3& rx_unit_vector, const Vec3& velocity, double wavelength)
{
    if (!(wavelength > 0.0))
        throw RangeError("doppler_frequency: wavelength must be positive");
    return dot(rx_unit_vector, velocity) / wavelength;
}

ClusterSet generate_clusters(std::uint64_t seed, StreamKey key, const LinkContext& link, const LargeScaleParams& lsp,
                             const LspTable& table, const ElevationModel& elevation, const AngleScaling& scaling,
                             const ClusterOptions& options)
{
    auto stream = [&](Stage stage) {
        StreamKey k = key;
        k.stage = stage;
        return RngStream(seed, k);
    };
    const bool los = !link.indoor && link.los.los;
    const LinkGeometry& g = link.geometry;

    // delays and powers
    RngStream delay_rng = stream(Stage::Delays);
    std::vector<double> delays = generate_delays(delay_rng, lsp.ds, table.delay_scaling, table.n_clusters);
    RngStream power_rng = stream(Stage::Powers);
    ClusterPowers cp =
        generate_powers(power_rng, delays, lsp.ds, table.delay_scaling, table.cluster_shadow_db, lsp.k_db, los);

    // drop weak clusters; the first cluster is the strongest under LOS and is always kept
    std::vector<std::size_t> keep;
    const double pmax = *std::max_element(cp.powers.begin(), cp.powers.end());
    for (std::size_t i = 0; i < cp.powers.size(); ++i)
        if (options.prune_below_db <= 0.0 || cp.powers[i] >= pmax * std::pow(10.0, -options.prune_below_db / 10.0))
            keep.push_back(i);
    if (keep.size() != cp.powers.size())
    {
        std::vector<double> d, p, pn;
        for (std::size_t i : keep)
        {
            d.push_back(delays[i]);
            p.push_back(cp.powers[i]);
            pn.push_back(cp.nlos_powers[i]);
        }
        const double sp = std::accumulate(p.begin(), p.end(), 0.0);
        const double sn = std::accumulate(pn.begin(), pn.end(), 0.0);
        for (double& v : p)
            v /= sp;
        for (double& v : pn)
            v /= sn;
        delays = std::move(d);
        cp.powers = std::move(p);
        cp.nlos_powers = std::move(pn);
    }

    ClusterSet cs;
    cs.resize(static_cast<int>(delays.size()), table.n_rays);
    cs.los = los;
    cs.k_db = los ? lsp.k_db : 0.0;
    cs.los_aod = g.los_aod_global;
    cs.los_aoa = g.los_aoa;
    cs.los_zod = g.los_zod;
    cs.los_zoa = g.los_zoa;
    cs.los_distance = g.d_3d;
    cs.ue_velocity = link.ue_velocity;
    const double d_scale = los ? los_delay_scaling(lsp.k_db) : 1.0;
    for (std::size_t i = 0; i < delays.size(); ++i)
        cs.delays[i] = delays[i] / d_scale;
    cs.powers = cp.powers;
    cs.nlos_powers = cp.nlos_powers;

    // cluster angles; the scaling constants follow the configured cluster count
    const double c_az = scaling.azimuth_factor(table.n_clusters, los, lsp.k_db);
    const double c_ze = scaling.zenith_factor(table.n_clusters, los, lsp.k_db);
    RngStream az_rng = stream(Stage::Azimuth);
    cs.cluster_aoa = generate_azimuth_angles(az_rng, lsp.asa, cs.powers, g.los_aoa, los, c_az, options.jitter);
    cs.cluster_aod = generate_azimuth_angles(az_rng, lsp.asd, cs.powers, g.los_aod_global, los, c_az, options.jitter);
    RngStream ze_rng = stream(Stage::Zenith);
    const double zoa_center = link.indoor ? 90.0 : g.los_zoa;
    cs.cluster_zoa = generate_zenith_angles(ze_rng, lsp.zsa, cs.powers, zoa_center, 0.0, los, c_ze, options.jitter);
    const double offset = zod_offset(elevation, link.los.los, g.d_2d, link.h_ue);
    cs.cluster_zod =
        generate_zenith_angles(ze_rng, lsp.zsd, cs.powers, g.los_zod, offset, los, c_ze, options.jitter);

    // rays
    const std::vector<double> alpha = ray_offsets(table.n_rays);
    const double zod_ray_spread = 3.0 / 8.0 * std::pow(10.0, lsp.zsd_mu_log);
    for (int n = 0; n < cs.n_clusters; ++n)
    {
        for (int m = 0; m < cs.n_rays; ++m)
        {
            const std::size_t r = cs.ray(n, m);
            const double a = alpha[static_cast<std::size_t>(m)];
            cs.aod[r] = wrap_azimuth_deg(cs.cluster_aod[n] + table.cluster_asd * a);
            cs.aoa[r] = wrap_azimuth_deg(cs.cluster_aoa[n] + table.cluster_asa * a);
            cs.zoa[r] = fold_zenith_deg(cs.cluster_zoa[n] + table.cluster_zsa * a);
            cs.zod[r] = fold_zenith_deg(cs.cluster_zod[n] + zod_ray_spread * a);
        }
    }

    RngStream coupling_rng = stream(Stage::Coupling);
    couple_subpaths(coupling_rng, cs);

    RngStream xpr_rng = stream(Stage::Xpr);
    for (double& k : cs.xpr)
        k = draw_xpr(xpr_rng, table.xpr_mu_db, table.xpr_sigma_db);
    RngStream phase_rng = stream(Stage::Phases);
    for (auto& ph : cs.phases)
        ph = draw_phases(phase_rng);
    return cs;
}

} // namespace gscm
