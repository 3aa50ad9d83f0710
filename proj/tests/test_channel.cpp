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

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "gscm/channel.hpp"
#include "gscm/config.hpp"
#include "gscm/error.hpp"

using namespace gscm;

namespace {

constexpr double kLambda = 0.15;

ArrayGeometry unit_array(int rows = 1, int cols = 1, std::vector<double> slants = {0.0},
                         PolarizationModel model = PolarizationModel::Constant)
{
    ArrayGeometry a;
    a.rows = rows;
    a.cols = cols;
    a.wavelength = kLambda;
    a.slants_deg = std::move(slants);
    a.model = model;
    a.pattern = ElementPattern::isotropic_pattern(0.0);
    return a;
}

CoefficientOptions scalar_options()
{
    CoefficientOptions o;
    o.polarized = false;
    o.subclusters = false;
    return o;
}

ClusterSet random_clusters(RngStream& rng, int n, int m)
{
    ClusterSet cs;
    cs.resize(n, m);
    double total = 0.0;
    for (int i = 0; i < n; ++i)
    {
        cs.powers[i] = rng.uniform();
        total += cs.powers[i];
        cs.delays[i] = i * 10e-9;
    }
    for (double& p : cs.powers)
        p /= total;
    cs.nlos_powers = cs.powers;
    for (std::size_t r = 0; r < cs.ray_count(); ++r)
    {
        cs.aod[r] = rng.uniform(-180, 180);
        cs.aoa[r] = rng.uniform(-180, 180);
        cs.zod[r] = rng.uniform(0, 180);
        cs.zoa[r] = rng.uniform(0, 180);
        cs.xpr[r] = draw_xpr(rng, 8.0, 4.0);
        cs.phases[r] = draw_phases(rng);
    }
    return cs;
}

const ScenarioParams& uma()
{
    static const ScenarioParams p = default_scenario_params(ScenarioKind::UMa);
    return p;
}

ClusterSet model_clusters(bool los, std::uint32_t ue)
{
    LinkContext link;
    link.geometry = compute_link_geometry({0, 0, 25}, 30.0, {120, 60, 1.5});
    link.los = los ? LosState{true, LosType::Type1} : LosState{};
    link.ue_velocity = {0.6, 0.5, 0.0};
    const LspTable& t = uma().table(los ? Propagation::LOS : Propagation::NLOS);
    RngStream rng(70, {0, 0, kSiteLevel, ue, Stage::Lsp});
    const LargeScaleParams lsp = generate_lsps(rng, link.geometry.d_2d, 1.5, los, t, uma().elevation);
    return generate_clusters(70, {0, 0, kSiteLevel, ue, Stage::Test}, link, lsp, t, uma().elevation, uma().scaling);
}

} // namespace

TEST_CASE("single sub-path magnitude")
{
    ClusterSet cs;
    cs.resize(3, 1);
    cs.powers = cs.nlos_powers = {0.5, 0.3, 0.2};
    cs.phases[1] = {1.1, 0.0, 0.0, 0.0};
    cs.phases[2] = {-2.0, 0.0, 0.0, 0.0};
    cs.aoa[1] = 33.0;
    cs.zod[2] = 120.0;
    const ChannelTensor h = channel_coefficient(cs, unit_array(), unit_array(), scalar_options());
    REQUIRE(h.n_paths == 3);
    for (std::size_t n = 0; n < 3; ++n)
        CHECK(std::abs(h.at(0, 0, n, 0)) == doctest::Approx(std::sqrt(cs.powers[n])).epsilon(1e-15));
    CHECK(std::arg(h.at(0, 0, 1, 0)) == doctest::Approx(1.1));
}

TEST_CASE("mean power per cluster equals P_n")
{
    RngStream rng(71, {});
    ClusterSet cs;
    cs.resize(3, 20);
    cs.powers = cs.nlos_powers = {0.6, 0.3, 0.1};
    for (std::size_t r = 0; r < cs.ray_count(); ++r)
    {
        cs.aoa[r] = rng.uniform(-180, 180);
        cs.zoa[r] = rng.uniform(0, 180);
        cs.aod[r] = rng.uniform(-180, 180);
        cs.zod[r] = rng.uniform(0, 180);
    }
    const int n = 100000;
    std::array<double, 3> acc{};
    for (int i = 0; i < n; ++i)
    {
        for (auto& ph : cs.phases)
            ph = draw_phases(rng);
        const ChannelTensor h = channel_coefficient(cs, unit_array(), unit_array(), scalar_options());
        for (std::size_t p = 0; p < 3; ++p)
            acc[p] += std::norm(h.at(0, 0, p, 0));
    }
    for (std::size_t p = 0; p < 3; ++p)
        CHECK(std::abs(acc[p] / n / cs.powers[p] - 1.0) < 0.01);
}

TEST_CASE("plane-wave phase across the receive array")
{
    ClusterSet cs;
    cs.resize(1, 1);
    cs.powers = cs.nlos_powers = {1.0};
    cs.aoa[0] = 0.0;
    cs.zoa[0] = 90.0;
    ArrayGeometry rx = unit_array(1, 2);
    rx.dh = 0.37;
    rx.orientation = {-90.0, 0.0}; // columns along +x
    const ChannelTensor h = channel_coefficient(cs, unit_array(), rx, scalar_options());
    const double delta = rx.element_position_global(1).x - rx.element_position_global(0).x;
    CHECK(delta == doctest::Approx(0.37 * kLambda));
    const double dphi = std::arg(h.at(1, 0, 0, 0) / h.at(0, 0, 0, 0));
    CHECK(dphi == doctest::Approx(2.0 * std::numbers::pi * 0.37).epsilon(1e-12));
}

TEST_CASE("time evolution of a single sub-path")
{
    ClusterSet cs;
    cs.resize(1, 1);
    cs.powers = cs.nlos_powers = {1.0};
    cs.aoa[0] = 25.0;
    cs.zoa[0] = 80.0;
    cs.phases[0] = {0.4, 0.0, 0.0, 0.0};
    cs.ue_velocity = {10.0, 3.0, 0.0};
    CoefficientOptions o = scalar_options();
    o.sample_times = {0.0, 1e-4, 5e-4, 2.5e-3};
    const ChannelTensor h = channel_coefficient(cs, unit_array(), unit_array(), o);
    const double nu = doppler_frequency(spherical_unit_vector(80.0, 25.0), cs.ue_velocity, kLambda);
    for (std::size_t t = 0; t < o.sample_times.size(); ++t)
    {
        const cdouble ratio = h.at(0, 0, 0, t) / h.at(0, 0, 0, 0);
        const cdouble want = std::polar(1.0, 2.0 * std::numbers::pi * nu * o.sample_times[t]);
        CHECK(std::abs(ratio - want) < 1e-12);
    }
}

TEST_CASE("cross-polar to co-polar power ratio equals E[1/kappa]")
{
    RngStream rng(72, {});
    ClusterSet cs;
    cs.resize(1, 1);
    cs.powers = cs.nlos_powers = {1.0};
    CoefficientOptions o;
    o.subclusters = false;
    const ArrayGeometry tx = unit_array(1, 1, {0.0});
    const ArrayGeometry rx = unit_array(1, 1, {0.0, 90.0});
    const double mu = 8.0, sigma = 4.0;
    const int n = 100000;
    double co = 0.0, cross = 0.0;
    for (int i = 0; i < n; ++i)
    {
        cs.xpr[0] = draw_xpr(rng, mu, sigma);
        cs.phases[0] = draw_phases(rng);
        const ChannelTensor h = channel_coefficient(cs, tx, rx, o);
        co += std::norm(h.at(0, 0, 0, 0));
        cross += std::norm(h.at(1, 0, 0, 0));
    }
    const double a = std::log(10.0) / 10.0;
    const double expect = std::exp(-a * mu + 0.5 * a * a * sigma * sigma);
    CHECK(std::abs((cross / co) / expect - 1.0) < 0.02);
}

TEST_CASE("swapping link ends transposes the tensor")
{
    RngStream rng(73, {});
    const ClusterSet cs = random_clusters(rng, 4, 5);
    ClusterSet sw = cs;
    sw.aod = cs.aoa;
    sw.aoa = cs.aod;
    sw.zod = cs.zoa;
    sw.zoa = cs.zod;
    for (std::size_t r = 0; r < cs.ray_count(); ++r)
        sw.phases[r] = {cs.phases[r][0], cs.phases[r][2], cs.phases[r][1], cs.phases[r][3]};

    ArrayGeometry a = unit_array(1, 2, {45.0, -45.0}, PolarizationModel::SlantedDipole);
    a.pattern = ElementPattern{};
    ArrayGeometry b = unit_array(2, 1, {0.0, 90.0}, PolarizationModel::SlantedDipole);
    b.orientation = {40.0, 5.0};

    for (bool pol : {false, true})
    {
        CoefficientOptions o;
        o.polarized = pol;
        o.subclusters = false;
        const ChannelTensor h = channel_coefficient(cs, a, b, o);
        const ChannelTensor g = channel_coefficient(sw, b, a, o);
        REQUIRE(h.n_rx == g.n_tx);
        REQUIRE(h.n_tx == g.n_rx);
        for (std::size_t u = 0; u < h.n_rx; ++u)
            for (std::size_t s = 0; s < h.n_tx; ++s)
                for (std::size_t p = 0; p < h.n_paths; ++p)
                    CHECK(std::abs(h.at(u, s, p, 0) - g.at(s, u, p, 0)) < 1e-12);
    }
}

TEST_CASE("direct ray under a dominant K-factor")
{
    ClusterSet cs;
    cs.resize(2, 20);
    cs.powers = {1.0, 0.0};
    cs.nlos_powers = {0.7, 0.3};
    cs.los = true;
    cs.k_db = 200.0;
    cs.los_distance = 123.4;
    CoefficientOptions o = scalar_options();
    const ChannelTensor h = channel_coefficient(cs, unit_array(), unit_array(), o);
    const cdouble want = std::polar(1.0, -2.0 * std::numbers::pi * cs.los_distance / kLambda);
    CHECK(std::abs(h.at(0, 0, 0, 0) - want) < 1e-9);
    CHECK(std::abs(h.at(0, 0, 1, 0)) < 1e-9);
}

TEST_CASE("sub-clusters")
{
    const auto& g = subcluster_rays();
    CHECK(g[0].size() == 10);
    CHECK(g[1].size() == 6);
    CHECK(g[2].size() == 4);
    std::set<int> all;
    for (const auto& v : g)
        all.insert(v.begin(), v.end());
    CHECK(all.size() == 20);
    CHECK(*all.begin() == 0);
    CHECK(*all.rbegin() == 19);

    const ClusterSet cs = model_clusters(false, 1);
    CoefficientOptions o;
    o.polarized = false;
    const ChannelTensor h = channel_coefficient(cs, unit_array(), unit_array(), o);
    CHECK(h.n_paths == static_cast<std::size_t>(cs.n_clusters) + 4);
    std::vector<int> order(static_cast<std::size_t>(cs.n_clusters));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return cs.powers[a] > cs.powers[b]; });
    for (int strongest : {order[0], order[1]})
    {
        std::vector<double> d;
        for (std::size_t p = 0; p < h.n_paths; ++p)
            if (h.path_cluster[p] == strongest)
                d.push_back(h.path_delays[p] - cs.delays[static_cast<std::size_t>(strongest)]);
        REQUIRE(d.size() == 3);
        CHECK(d[0] == doctest::Approx(0.0).scale(1e-9));
        CHECK(d[1] == doctest::Approx(5e-9));
        CHECK(d[2] == doctest::Approx(10e-9));
    }

    ClusterSet bad;
    bad.resize(2, 10);
    bad.powers = bad.nlos_powers = {0.5, 0.5};
    CHECK_THROWS_AS(channel_coefficient(bad, unit_array(), unit_array(), o), ConfigError);
}

TEST_CASE("dimension checks")
{
    ClusterSet cs;
    cs.resize(1, 1);
    cs.powers = cs.nlos_powers = {1.0};
    ArrayGeometry empty = unit_array();
    empty.slants_deg.clear();
    CHECK_THROWS_AS(channel_coefficient(cs, empty, unit_array(), scalar_options()), DimensionError);
    ArrayGeometry other = unit_array();
    other.wavelength = 0.1;
    CHECK_THROWS_AS(channel_coefficient(cs, other, unit_array(), scalar_options()), DimensionError);
    CoefficientOptions none = scalar_options();
    none.sample_times.clear();
    CHECK_THROWS_AS(channel_coefficient(cs, unit_array(), unit_array(), none), DimensionError);
    ClusterSet broken = cs;
    broken.phases.clear();
    CHECK_THROWS_AS(channel_coefficient_serial(broken, unit_array(), unit_array(), scalar_options()), DimensionError);
}

TEST_CASE("parallel kernel matches the serial reference")
{
    ArrayGeometry tx = unit_array(4, 2, {45.0, -45.0}, PolarizationModel::SlantedDipole);
    tx.pattern = ElementPattern{};
    tx.orientation = {150.0, 12.0};
    ArrayGeometry rx = unit_array(1, 2, {0.0, 90.0}, PolarizationModel::SlantedDipole);
    for (bool los : {false, true})
        for (bool pol : {false, true})
            for (bool sub : {false, true})
            {
                const ClusterSet cs = model_clusters(los, 3);
                CoefficientOptions o;
                o.polarized = pol;
                o.subclusters = sub;
                o.sample_times = {0.0, 1e-3, 2e-3};
                const ChannelTensor ref = channel_coefficient_serial(cs, tx, rx, o);
                o.workers = 1;
                const ChannelTensor one = channel_coefficient(cs, tx, rx, o);
                o.workers = 4;
                const ChannelTensor four = channel_coefficient(cs, tx, rx, o);
                REQUIRE(ref.h.size() == one.h.size());
                CHECK(one.h == four.h);
                CHECK(one.path_delays == ref.path_delays);
                double worst = 0.0;
                for (std::size_t i = 0; i < ref.h.size(); ++i)
                    worst = std::max(worst, std::abs(ref.h[i] - one.h[i]));
                CHECK(worst < 1e-12);
            }
}

TEST_CASE("CIR records round-trip")
{
    ArrayGeometry tx = unit_array(2, 2, {45.0, -45.0}, PolarizationModel::SlantedDipole);
    const ClusterSet cs = model_clusters(true, 4);
    CoefficientOptions o;
    o.sample_times = {0.0, 1e-3};
    const ChannelTensor h = channel_coefficient(cs, tx, unit_array(1, 1, {0.0, 90.0}), o);

    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    write_cir(buf, 42, h);
    write_cir(buf, 43, h);
    const std::string bytes = buf.str();
    const std::size_t header = 8 + 8 + 6 * 4 + 8 + 8;
    CHECK(bytes.size() == 2 * (header + 8 * h.n_paths + 16 * h.h.size()));
    CHECK(bytes.compare(0, 8, std::string(kCirMagic, 8)) == 0);

    CirRecord r;
    REQUIRE(read_cir(buf, r));
    CHECK(r.header.link_id == 42);
    CHECK(r.header.n_rx == h.n_rx);
    CHECK(r.header.n_tx == h.n_tx);
    CHECK(r.header.n_paths == h.n_paths);
    CHECK(r.header.n_rays == 20);
    CHECK(r.header.n_samples == 2);
    CHECK(r.header.wavelength == kLambda);
    CHECK(r.header.sample_interval == doctest::Approx(1e-3));
    CHECK(r.path_delays == h.path_delays);
    CHECK(r.h == h.h);
    REQUIRE(read_cir(buf, r));
    CHECK(r.header.link_id == 43);
    CHECK_FALSE(read_cir(buf, r));

    std::stringstream cut(bytes.substr(0, bytes.size() / 2 - 5), std::ios::in | std::ios::binary);
    CHECK_THROWS_AS(read_cir(cut, r), Error);
}
