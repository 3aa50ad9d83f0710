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
#include "gscm/channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fmt/format.h>
#include <istream>
#include <numbers>
#include <ostream>

#include "gscm/error.hpp"

namespace gscm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct PathLayout
{
    std::vector<int> cluster;
    std::vector<double> delay;
    std::vector<std::vector<int>> rays; // ray indices within the cluster
};

const std::vector<double>& stochastic_powers(const ClusterSet& cs)
{
    return cs.los ? cs.nlos_powers : cs.powers;
}

PathLayout layout_paths(const ClusterSet& cs, const CoefficientOptions& opt)
{
    std::vector<int> all(static_cast<std::size_t>(cs.n_rays));
    for (int m = 0; m < cs.n_rays; ++m)
        all[static_cast<std::size_t>(m)] = m;

    std::vector<int> split;
    if (opt.subclusters && cs.n_clusters > 0)
    {
        if (cs.n_rays != 20)
            throw ConfigError(fmt::format("sub-clusters need 20 rays per cluster, got {}", cs.n_rays));
        const std::vector<double>& p = stochastic_powers(cs);
        std::vector<int> order(p.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p[a] > p[b]; });
        split.assign(order.begin(), order.begin() + std::min<std::size_t>(2, order.size()));
    }

    PathLayout out;
    for (int n = 0; n < cs.n_clusters; ++n)
    {
        const double tau = cs.delays[static_cast<std::size_t>(n)];
        if (std::find(split.begin(), split.end(), n) != split.end())
        {
            for (std::size_t g = 0; g < 3; ++g)
            {
                out.cluster.push_back(n);
                out.delay.push_back(tau + opt.subcluster_delays[g]);
                out.rays.push_back(subcluster_rays()[g]);
            }
        }
        else
        {
            out.cluster.push_back(n);
            out.delay.push_back(tau);
            out.rays.push_back(all);
        }
    }
    return out;
}

void check_inputs(const ClusterSet& cs, const ArrayGeometry& tx, const ArrayGeometry& rx,
                  const CoefficientOptions& opt)
{
    if (tx.size() == 0 || rx.size() == 0)
        throw DimensionError("channel_coefficient: empty antenna array");
    if (opt.sample_times.empty())
        throw DimensionError("channel_coefficient: no sample times");
    if (cs.delays.size() != static_cast<std::size_t>(cs.n_clusters) || cs.aod.size() != cs.ray_count() ||
        cs.phases.size() != cs.ray_count() || cs.xpr.size() != cs.ray_count())
        throw DimensionError("channel_coefficient: cluster set arrays do not match its dimensions");
    if (!(tx.wavelength > 0.0) || std::abs(tx.wavelength - rx.wavelength) > 1e-12 * tx.wavelength)
        throw DimensionError("channel_coefficient: tx and rx arrays must share the carrier wavelength");
}

ChannelTensor allocate(const ClusterSet& cs, const ArrayGeometry& tx, const ArrayGeometry& rx,
                       const CoefficientOptions& opt, const PathLayout& paths)
{
    ChannelTensor t;
    t.n_rx = rx.size();
    t.n_tx = tx.size();
    t.n_paths = paths.cluster.size();
    t.n_samples = opt.sample_times.size();
    t.n_rays = static_cast<std::size_t>(cs.n_rays);
    t.wavelength = tx.wavelength;
    t.h.assign(t.n_rx * t.n_tx * t.n_paths * t.n_samples, cdouble{});
    t.path_delays = paths.delay;
    t.path_cluster = paths.cluster;
    t.sample_times = opt.sample_times;
    return t;
}

FieldPattern element_field(const ArrayGeometry& a, std::size_t index, double theta, double phi, bool polarized)
{
    if (!polarized)
        return {std::pow(10.0, element_gain_db(theta, phi, a.pattern, a.orientation) / 20.0), 0.0};
    return field_pattern(theta, phi, a.pattern, a.polarization(index), a.orientation);
}

// 2x2 depolarisation matrix of one ray (unpolarised: scalar in the theta-theta slot)
std::array<cdouble, 4> ray_matrix(const ClusterSet& cs, std::size_t r, bool polarized)
{
    const auto& ph = cs.phases[r];
    if (!polarized)
        return {std::polar(1.0, ph[0]), 0.0, 0.0, 0.0};
    const double x = std::sqrt(1.0 / cs.xpr[r]);
    return {std::polar(1.0, ph[0]), std::polar(x, ph[1]), std::polar(x, ph[2]), std::polar(1.0, ph[3])};
}

cdouble bilinear(const FieldPattern& fr, const std::array<cdouble, 4>& m, const FieldPattern& ft)
{
    return fr.f_theta * (m[0] * ft.f_theta + m[1] * ft.f_phi) + fr.f_phi * (m[2] * ft.f_theta + m[3] * ft.f_phi);
}

struct Weights
{
    double stochastic = 1.0;
    double direct = 0.0;
};

Weights weights(const ClusterSet& cs)
{
    if (!cs.los)
        return {};
    const double k = std::pow(10.0, cs.k_db / 10.0);
    return {std::sqrt(1.0 / (k + 1.0)), std::sqrt(k / (k + 1.0))};
}

} // namespace

const std::array<std::vector<int>, 3>& subcluster_rays()
{
    static const std::array<std::vector<int>, 3> groups{
        std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 18, 19},
        std::vector<int>{8, 9, 10, 11, 16, 17},
        std::vector<int>{12, 13, 14, 15},
    };
    return groups;
}

ChannelTensor channel_coefficient_serial(const ClusterSet& cs, const ArrayGeometry& tx, const ArrayGeometry& rx,
                                         const CoefficientOptions& opt)
{
    check_inputs(cs, tx, rx, opt);
    const PathLayout paths = layout_paths(cs, opt);
    ChannelTensor out = allocate(cs, tx, rx, opt, paths);
    const double lambda = tx.wavelength;
    const Weights w = weights(cs);
    const std::vector<double>& powers = stochastic_powers(cs);

    for (std::size_t u = 0; u < out.n_rx; ++u)
    {
        const Vec3 du = rx.element_position_global(u);
        for (std::size_t s = 0; s < out.n_tx; ++s)
        {
            const Vec3 ds = tx.element_position_global(s);
            for (std::size_t p = 0; p < out.n_paths; ++p)
            {
                const int n = paths.cluster[p];
                const double amp = w.stochastic * std::sqrt(powers[static_cast<std::size_t>(n)] / cs.n_rays);
                for (std::size_t t = 0; t < out.n_samples; ++t)
                {
                    const double time = opt.sample_times[t];
                    cdouble acc{};
                    for (int m : paths.rays[p])
                    {
                        const std::size_t r = cs.ray(n, m);
                        const FieldPattern fr = element_field(rx, u, cs.zoa[r], cs.aoa[r], opt.polarized);
                        const FieldPattern ft = element_field(tx, s, cs.zod[r], cs.aod[r], opt.polarized);
                        const Vec3 rr = spherical_unit_vector(cs.zoa[r], cs.aoa[r]);
                        const Vec3 rt = spherical_unit_vector(cs.zod[r], cs.aod[r]);
                        const double nu = doppler_frequency(rr, cs.ue_velocity, lambda);
                        const double phase =
                            kTwoPi * (dot(rr, du) / lambda + dot(rt, ds) / lambda + nu * time);
                        acc += bilinear(fr, ray_matrix(cs, r, opt.polarized), ft) * std::polar(1.0, phase);
                    }
                    acc *= amp;
                    if (cs.los && p == 0)
                    {
                        const FieldPattern fr = element_field(rx, u, cs.los_zoa, cs.los_aoa, opt.polarized);
                        const FieldPattern ft = element_field(tx, s, cs.los_zod, cs.los_aod, opt.polarized);
                        const Vec3 rr = spherical_unit_vector(cs.los_zoa, cs.los_aoa);
                        const Vec3 rt = spherical_unit_vector(cs.los_zod, cs.los_aod);
                        const double nu = doppler_frequency(rr, cs.ue_velocity, lambda);
                        const std::array<cdouble, 4> m =
                            opt.polarized ? std::array<cdouble, 4>{1.0, 0.0, 0.0, -1.0}
                                          : std::array<cdouble, 4>{1.0, 0.0, 0.0, 0.0};
                        const double phase = kTwoPi * (-cs.los_distance / lambda + dot(rr, du) / lambda +
                                                       dot(rt, ds) / lambda + nu * time);
                        acc += w.direct * bilinear(fr, m, ft) * std::polar(1.0, phase);
                    }
                    out.at(u, s, p, t) = acc;
                }
            }
        }
    }
    return out;
}

ChannelTensor channel_coefficient(const ClusterSet& cs, const ArrayGeometry& tx, const ArrayGeometry& rx,
                                  const CoefficientOptions& opt)
{
    check_inputs(cs, tx, rx, opt);
    const PathLayout paths = layout_paths(cs, opt);
    ChannelTensor out = allocate(cs, tx, rx, opt, paths);
    const double lambda = tx.wavelength;
    const Weights w = weights(cs);
    const std::vector<double>& powers = stochastic_powers(cs);

    // ray R = cs.ray_count() is the direct ray when present
    const std::size_t n_ray = cs.ray_count();
    const std::size_t n_all = n_ray + (cs.los ? 1 : 0);
    std::vector<double> zoa(n_all), aoa(n_all), zod(n_all), aod(n_all);
    std::vector<std::array<cdouble, 4>> mat(n_all);
    for (std::size_t r = 0; r < n_ray; ++r)
    {
        zoa[r] = cs.zoa[r];
        aoa[r] = cs.aoa[r];
        zod[r] = cs.zod[r];
        aod[r] = cs.aod[r];
        const int n = static_cast<int>(r / static_cast<std::size_t>(cs.n_rays));
        const double amp = w.stochastic * std::sqrt(powers[static_cast<std::size_t>(n)] / cs.n_rays);
        mat[r] = ray_matrix(cs, r, opt.polarized);
        for (cdouble& v : mat[r])
            v *= amp;
    }
    if (cs.los)
    {
        zoa[n_ray] = cs.los_zoa;
        aoa[n_ray] = cs.los_aoa;
        zod[n_ray] = cs.los_zod;
        aod[n_ray] = cs.los_aod;
        const cdouble d = std::polar(w.direct, -kTwoPi * cs.los_distance / lambda);
        mat[n_ray] = opt.polarized ? std::array<cdouble, 4>{d, 0.0, 0.0, -d} : std::array<cdouble, 4>{d, 0.0, 0.0, 0.0};
    }

    // per-element fields and plane-wave phases
    auto side = [&](const ArrayGeometry& a, const std::vector<double>& th, const std::vector<double>& ph,
                    std::vector<FieldPattern>& field, std::vector<cdouble>& phase) {
        const std::size_t ne = a.size();
        const std::size_t npol = opt.polarized ? a.slants_deg.size() : 1;
        field.resize(npol * n_all);
        for (std::size_t q = 0; q < npol; ++q)
            for (std::size_t r = 0; r < n_all; ++r)
                field[q * n_all + r] = element_field(a, q, th[r], ph[r], opt.polarized);
        phase.resize(ne * n_all);
        for (std::size_t e = 0; e < ne; ++e)
        {
            const Vec3 d = a.element_position_global(e);
            for (std::size_t r = 0; r < n_all; ++r)
                phase[e * n_all + r] = std::polar(1.0, kTwoPi * dot(spherical_unit_vector(th[r], ph[r]), d) / lambda);
        }
        return npol;
    };
    std::vector<FieldPattern> rx_field, tx_field;
    std::vector<cdouble> rx_phase, tx_phase;
    const std::size_t rx_npol = side(rx, zoa, aoa, rx_field, rx_phase);
    const std::size_t tx_npol = side(tx, zod, aod, tx_field, tx_phase);

    std::vector<cdouble> doppler(n_all * out.n_samples);
    for (std::size_t r = 0; r < n_all; ++r)
    {
        const double nu = doppler_frequency(spherical_unit_vector(zoa[r], aoa[r]), cs.ue_velocity, lambda);
        for (std::size_t t = 0; t < out.n_samples; ++t)
            doppler[r * out.n_samples + t] = std::polar(1.0, kTwoPi * nu * opt.sample_times[t]);
    }

    std::vector<std::vector<std::size_t>> path_rays(out.n_paths);
    for (std::size_t p = 0; p < out.n_paths; ++p)
    {
        for (int m : paths.rays[p])
            path_rays[p].push_back(cs.ray(paths.cluster[p], m));
        if (cs.los && p == 0)
            path_rays[p].push_back(n_ray);
    }

    const auto n_links = static_cast<std::int64_t>(out.n_rx * out.n_tx);
#pragma omp parallel for num_threads(std::max(1, opt.workers)) schedule(static)
    for (std::int64_t us = 0; us < n_links; ++us)
    {
        const auto u = static_cast<std::size_t>(us) / out.n_tx;
        const auto s = static_cast<std::size_t>(us) % out.n_tx;
        const FieldPattern* fr = rx_field.data() + (u % rx_npol) * n_all;
        const FieldPattern* ft = tx_field.data() + (s % tx_npol) * n_all;
        const cdouble* pr = rx_phase.data() + u * n_all;
        const cdouble* pt = tx_phase.data() + s * n_all;
        for (std::size_t p = 0; p < out.n_paths; ++p)
        {
            cdouble* dst = &out.at(u, s, p, 0);
            for (std::size_t r : path_rays[p])
            {
                const cdouble a = bilinear(fr[r], mat[r], ft[r]) * pr[r] * pt[r];
                const cdouble* dop = doppler.data() + r * out.n_samples;
                for (std::size_t t = 0; t < out.n_samples; ++t)
                    dst[t] += a * dop[t];
            }
        }
    }
    return out;
}

namespace {

template <typename T>
void put_le(std::ostream& out, T value)
{
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(std::begin(bytes), std::end(bytes));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
bool get_le(std::istream& in, T& value)
{
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
        return false;
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(std::begin(bytes), std::end(bytes));
    std::memcpy(&value, bytes, sizeof(T));
    return true;
}

} // namespace

void write_cir(std::ostream& out, std::uint64_t link_id, const ChannelTensor& t)
{
    out.write(kCirMagic, sizeof(kCirMagic));
    put_le<std::uint64_t>(out, link_id);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.n_rx));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.n_tx));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.n_paths));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.n_rays));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.n_samples));
    put_le<std::uint32_t>(out, 0u);
    put_le<double>(out, t.wavelength);
    put_le<double>(out, t.sample_times.size() > 1 ? t.sample_times[1] - t.sample_times[0] : 0.0);
    for (double d : t.path_delays)
        put_le<double>(out, d);
    for (const cdouble& v : t.h)
    {
        put_le<double>(out, v.real());
        put_le<double>(out, v.imag());
    }
    if (!out)
        throw Error("failed writing CIR record");
}

bool read_cir(std::istream& in, CirRecord& rec)
{
    char magic[8];
    if (!in.read(magic, sizeof(magic)))
    {
        if (in.gcount() == 0)
            return false;
        throw Error("truncated CIR header");
    }
    if (std::memcmp(magic, kCirMagic, sizeof(magic)) != 0)
        throw Error("bad CIR magic");
    CirHeader& h = rec.header;
    std::uint32_t reserved = 0;
    const bool ok = get_le(in, h.link_id) && get_le(in, h.n_rx) && get_le(in, h.n_tx) && get_le(in, h.n_paths) &&
                    get_le(in, h.n_rays) && get_le(in, h.n_samples) && get_le(in, reserved) &&
                    get_le(in, h.wavelength) && get_le(in, h.sample_interval);
    if (!ok)
        throw Error("truncated CIR header");
    rec.path_delays.resize(h.n_paths);
    for (double& d : rec.path_delays)
        if (!get_le(in, d))
            throw Error("truncated CIR delays");
    const std::size_t n = std::size_t{h.n_rx} * h.n_tx * h.n_paths * h.n_samples;
    rec.h.resize(n);
    for (cdouble& v : rec.h)
    {
        double re = 0.0, im = 0.0;
        if (!get_le(in, re) || !get_le(in, im))
            throw Error("truncated CIR samples");
        v = {re, im};
    }
    return true;
}

} // namespace gscm
