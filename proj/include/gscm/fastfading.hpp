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
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "gscm/geometry.hpp"
#include "gscm/largescale.hpp"
#include "gscm/rng.hpp"
#include "gscm/vec3.hpp"

namespace gscm {

/// Parameter set selector: outdoor LOS, outdoor NLOS, or outdoor-to-indoor.
enum class Propagation
{
    LOS,
    NLOS,
    O2I
};

std::string_view to_string(Propagation p);
Propagation propagation_of(bool los, bool indoor);

/// Index of each large-scale parameter in correlation matrices.
enum LspIndex : int
{
    kDS = 0,
    kASD,
    kASA,
    kZSD,
    kZSA,
    kK,
    kSF,
    kLspCount
};

using LspMatrix = std::array<std::array<double, kLspCount>, kLspCount>;

struct LogNormal
{
    double mu = 0.0;    // mean of log10(x)
    double sigma = 0.0; // std of log10(x)
};

/// Statistics of one propagation condition.
struct LspTable
{
    LogNormal ds{-7.0, 0.3}; // log10(seconds)
    LogNormal asd{1.0, 0.3}; // log10(degrees)
    LogNormal asa{1.7, 0.2};
    LogNormal zsa{1.0, 0.2};
    LogNormal k_db{0.0, 0.0}; // K-factor in dB (not log10), LOS only
    double sf_sigma_db = 4.0;
    LspMatrix correlation = identity();

    double delay_scaling = 2.5;
    double xpr_mu_db = 8.0;
    double xpr_sigma_db = 4.0;
    int n_clusters = 12;
    int n_rays = 20;
    double cluster_asd = 5.0; // degrees
    double cluster_asa = 11.0;
    double cluster_zsa = 7.0;
    double cluster_shadow_db = 3.0;

    /// Lower Cholesky factor of correlation; filled by prepare().
    LspMatrix cholesky{};

    /// Validates the table and factorises the correlation matrix; throws
    /// ConfigError when the matrix is not symmetric positive definite.
    void prepare();

    static LspMatrix identity();
};

enum class ZsdHeightTerm
{
    AboveStreet, // h_ue - 1.5
    AbsDiffBs,   // |h_ue - h_bs|
    AboveBs      // max(h_ue - h_bs, 0)
};

/// log10 ZSD mean: max(floor, slope_per_km d_2d / 1000 + height_coeff term + intercept).
struct ZsdCurve
{
    double slope_per_km = -2.1;
    double height_coeff = -0.01;
    ZsdHeightTerm height_term = ZsdHeightTerm::AboveStreet;
    double intercept = 0.75;
    double floor = -0.5;
    double sigma = 0.4;

    double mu(double d_2d, double h_ue, double h_bs) const;
};

/// ZOD offset: sign * 10^(log_distance_coeff log10(max(min_distance, d_2d)) + intercept
///                      + height_coeff (h_ue - 1.5)), or 0 when zero is set.
struct ZodOffsetCurve
{
    bool zero = true;
    double sign = -1.0;
    double log_distance_coeff = -0.62;
    double intercept = 1.93;
    double height_coeff = -0.07;
    double min_distance = 10.0;

    double value(double d_2d, double h_ue) const;
};

/// Distance / height dependent elevation parameters of one scenario.
struct ElevationModel
{
    ZsdCurve zsd_los;
    ZsdCurve zsd_nlos{-2.1, -0.01, ZsdHeightTerm::AboveStreet, 0.9, -0.5, 0.49};
    ZodOffsetCurve offset_los;
    ZodOffsetCurve offset_nlos{false};
    double enb_height = 25.0;

    const ZsdCurve& zsd(bool outdoor_los) const { return outdoor_los ? zsd_los : zsd_nlos; }
    double zsd_mu(double d_2d, double h_ue, bool outdoor_los) const
    {
        return zsd(outdoor_los).mu(d_2d, h_ue, enb_height);
    }

    /// Enforces the monotone trends: ZSD mean and |offset| nonincreasing in
    /// distance, |offset| nonincreasing in height (UMa) or height independent (UMi).
    void validate(ScenarioKind kind) const;
};

/// Scaling constants of the inverse-Gaussian (azimuth) and inverse-Laplacian
/// (zenith) power-to-angle maps, keyed by cluster count.
struct AngleScaling
{
    std::map<int, double> azimuth{{4, 0.779}, {5, 0.860}, {8, 1.018}, {10, 1.090}, {11, 1.123}, {12, 1.146},
                                  {14, 1.190}, {15, 1.211}, {16, 1.226}, {19, 1.273}, {20, 1.289}};
    std::map<int, double> zenith{{8, 0.889}, {10, 0.957}, {11, 1.031}, {12, 1.104}, {15, 1.1088}, {19, 1.184}, {20, 1.178}};

    /// LOS variants include the K-factor polynomial correction.
    double azimuth_factor(int n_clusters, bool los, double k_db) const;
    double zenith_factor(int n_clusters, bool los, double k_db) const;
};

struct LargeScaleParams
{
    double ds = 0.0;  // seconds
    double asd = 0.0; // degrees
    double asa = 0.0;
    double zsd = 0.0;
    double zsa = 0.0;
    double k_db = 0.0;
    double sf_db = 0.0;
    double zsd_mu_log = 0.0; // log10 mean of ZSD used for intra-cluster ZOD spread
};

/// Seven jointly Gaussian (in log10 / dB) parameters with the table's correlation.
/// ZSD statistics come from the elevation model at (d_2d, h_ue). Spreads are
/// capped at 104 degrees (azimuth) and 52 degrees (zenith).
LargeScaleParams generate_lsps(RngStream& rng, double d_2d, double h_ue, bool outdoor_los, const LspTable& table,
                               const ElevationModel& elevation);

/// Signed ZOD offset in degrees; zero for LOS links (also LOS outdoor-to-indoor).
double zod_offset(const ElevationModel& elevation, bool outdoor_los, double d_2d, double h_ue);

/// n exponential delays with mean delay_scaling * ds, shifted to start at 0, ascending.
std::vector<double> generate_delays(RngStream& rng, double ds, double delay_scaling, int n);

/// LOS delay compression factor D(K) with K in dB.
double los_delay_scaling(double k_db);

struct ClusterPowers
{
    std::vector<double> powers;      // final, sum 1 (LOS: includes the direct ray in cluster 0)
    std::vector<double> nlos_powers; // sum 1, without the direct ray
};

/// Exponential power-delay law with per-cluster lognormal shadowing; LOS adds
/// K/(K+1) to the first cluster after scaling the rest by 1/(K+1).
ClusterPowers generate_powers(RngStream& rng, std::span<const double> delays, double ds, double delay_scaling,
                              double cluster_shadow_db, double k_db, bool los);

/// Cluster zenith angles from the inverse-Laplacian map
///   theta'_n = -spread ln(P_n / max P) / scaling,
/// with random sign and N(0, (spread / 7)^2) jitter, centred on center + offset.
/// LOS: shifted so the first cluster sits exactly on center. Folded into [0, 180].
/// jitter = false fixes the sign to + and drops the Gaussian term.
std::vector<double> generate_zenith_angles(RngStream& rng, double spread_deg, std::span<const double> powers,
                                           double center_deg, double offset_deg, bool los, double scaling,
                                           bool jitter = true);

/// Cluster azimuth angles from the inverse-Gaussian map
///   phi'_n = 2 (spread / 1.4) sqrt(-ln(P_n / max P)) / scaling,
/// same sign / jitter / LOS scheme as zenith, wrapped to (-180, 180].
std::vector<double> generate_azimuth_angles(RngStream& rng, double spread_deg, std::span<const double> powers,
                                            double center_deg, bool los, double scaling, bool jitter = true);

/// Normalised intra-cluster ray offsets for m rays (m = 20 gives the standard table;
/// m = 1 gives {0}; otherwise the first m table entries).
std::vector<double> ray_offsets(int m);

/// A link's clusters and their rays; ray (n, m) is stored at n * n_rays + m.
/// Azimuths are global-frame degrees in (-180, 180], zeniths in [0, 180].
struct ClusterSet
{
    int n_clusters = 0;
    int n_rays = 0;
    std::vector<double> delays; // seconds, ascending, delays[0] = 0
    std::vector<double> powers;
    std::vector<double> nlos_powers;
    std::vector<double> cluster_aod, cluster_aoa, cluster_zod, cluster_zoa;
    std::vector<double> aod, aoa, zod, zoa;
    std::vector<double> xpr; // linear kappa
    std::vector<std::array<double, 4>> phases; // theta-theta, theta-phi, phi-theta, phi-phi

    bool los = false;
    double k_db = 0.0;
    double los_aod = 0.0, los_aoa = 0.0, los_zod = 90.0, los_zoa = 90.0;
    double los_distance = 0.0; // d_3d, for the direct-ray phase
    Vec3 ue_velocity;

    std::size_t ray(int n, int m) const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n_rays) + m; }
    std::size_t ray_count() const { return static_cast<std::size_t>(n_clusters) * static_cast<std::size_t>(n_rays); }
    /// Fills cluster/ray arrays with n x m entries (angles 90 / 0, unit XPR, zero phases).
    void resize(int n, int m);
};

/// Independent uniform permutations of the AOA, ZOA and ZOD rays inside each
/// cluster (AOD order is the reference).
void couple_subpaths(RngStream& rng, ClusterSet& clusters);

/// kappa = 10^(X / 10), X ~ N(mu, sigma^2).
double draw_xpr(RngStream& rng, double xpr_mu_db, double xpr_sigma_db);

/// Four iid phases uniform on (-pi, pi].
std::array<double, 4> draw_phases(RngStream& rng);

/// (sin t cos p, sin t sin p, cos t).
Vec3 spherical_unit_vector(double theta_deg, double phi_deg);

/// nu = r . v / lambda.
double doppler_frequency(const Vec3& rx_unit_vector, const Vec3& velocity, double wavelength);

struct ClusterOptions
{
    bool jitter = true;
    double prune_below_db = 25.0; // clusters weaker than max - prune_below_db are dropped; <= 0 keeps all
};

/// Everything about a link that cluster generation depends on.
struct LinkContext
{
    LinkGeometry geometry;
    double h_ue = kMinUeHeight;
    bool indoor = false;
    LosState los;
    Vec3 ue_velocity;
};

/// Delays, powers, angles, coupling, XPR and phases for one link. Each step
/// draws from its own substream of (seed, key) with the stage replaced.
ClusterSet generate_clusters(std::uint64_t seed, StreamKey key, const LinkContext& link, const LargeScaleParams& lsp,
                             const LspTable& table, const ElevationModel& elevation, const AngleScaling& scaling,
                             const ClusterOptions& options = {});

} // namespace gscm
