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
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gscm/antenna.hpp"
#include "gscm/fastfading.hpp"
#include "gscm/largescale.hpp"

namespace gscm {

/// One (sector, UE) pair of one drop.
struct LinkRecord
{
    std::uint32_t drop = 0;
    std::string scenario;
    std::uint32_t site = 0;
    std::uint32_t sector = 0;
    std::uint32_t cell = 0; // 3 site + sector
    std::uint32_t ue = 0;
    double d_2d = 0.0;
    double d_3d = 0.0;
    double h_ue = 0.0;
    bool indoor = false;
    bool los = false;
    LosType los_type = LosType::None;
    double h_e = 0.0; // 0 for NLOS
    PathlossBreakdown pl;
    double sf_db = 0.0;
    double tx_gain_db = 0.0;
    double rx_gain_db = 0.0;
    double coupling_loss_db = 0.0;
    LargeScaleParams lsp;
    double zsd = 0.0;      // degrees, from the generated rays
    double mean_zod = 0.0; // degrees
    bool serving = false;
};

/// PL + SF - G_tx - G_rx.
double coupling_loss(double pathloss_db, double sf_db, double tx_gain_db, double rx_gain_db);

/// Gains toward the LOS direction: tx element with its mounting, rx element unrotated.
double coupling_loss(const LinkRecord& record, const LinkGeometry& geometry, const ElementPattern& tx_pattern,
                     const Orientation& tx_orientation, const ElementPattern& rx_pattern);

/// Index into records of the serving link: smallest coupling loss, ties to the lowest cell id.
/// Throws RangeError on empty input.
std::size_t associate_serving_cell(std::span<const LinkRecord> records);

/// Marks exactly one serving record per (scenario, drop, ue).
void mark_serving(std::vector<LinkRecord>& records);

enum class Binning
{
    FreedmanDiaconis,
    Fixed
};

struct BinningOptions
{
    Binning rule = Binning::FreedmanDiaconis;
    int fixed_bins = 50;
    int max_bins = 200;
};

class EmpiricalDistribution
{
  public:
    /// Throws RangeError on empty or non-finite input.
    explicit EmpiricalDistribution(std::vector<double> samples, const BinningOptions& binning = {});

    /// Right-continuous: fraction of samples <= x.
    double cdf(double x) const;
    /// Smallest sample s with cdf(s) >= p, p in [0, 1].
    double quantile(double p) const;

    const std::vector<double>& samples() const { return sorted_; }
    const std::vector<double>& edges() const { return edges_; }
    /// Bin masses, summing to 1.
    const std::vector<double>& frequencies() const { return freq_; }
    /// Bin masses divided by bin width.
    std::vector<double> density() const;
    double mean() const;
    std::size_t size() const { return sorted_.size(); }

  private:
    std::vector<double> sorted_;
    std::vector<double> edges_;
    std::vector<double> freq_;
};

inline EmpiricalDistribution ecdf(std::vector<double> samples, const BinningOptions& binning = {})
{
    return EmpiricalDistribution(std::move(samples), binning);
}

enum class ZsdEstimator
{
    Linear,  // power-weighted standard deviation of ray ZODs
    Circular // sqrt(-2 ln |sum P exp(j theta)| / sum P)
};

/// Power-weighted spread of ray departure zeniths; every ray of cluster n carries P_n / M.
double zenith_spread(const ClusterSet& clusters, ZsdEstimator estimator = ZsdEstimator::Linear);
/// Power-weighted mean of ray departure zeniths.
double mean_zod(const ClusterSet& clusters);

struct ZenithSummary
{
    EmpiricalDistribution zsd;
    EmpiricalDistribution mean_zod;
};

/// ZSD and mean-ZOD distributions of the serving links, per scenario.
std::map<std::string, ZenithSummary> zenith_summary(std::span<const LinkRecord> records,
                                                    const BinningOptions& binning = {});

/// links.csv header line (without newline).
std::string links_csv_header();
void write_links_csv(std::ostream& out, std::span<const LinkRecord> records);
/// Throws Error on a header or field mismatch.
std::vector<LinkRecord> read_links_csv(std::istream& in);

/// Named serving-link distributions keyed by scenario. Throws RangeError when
/// no serving links are present.
std::string stats_json(std::span<const LinkRecord> records, const BinningOptions& binning = {});
/// Long format: metric, scenario, x (bin centre), pdf, cdf.
std::string distributions_csv(std::span<const LinkRecord> records, const BinningOptions& binning = {});

/// Formats a double with 9 significant digits.
std::string format_g9(double value);

} // namespace gscm
