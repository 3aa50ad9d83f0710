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

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gscm/antenna.hpp"
#include "gscm/fastfading.hpp"

namespace gscm {

using cdouble = std::complex<double>;

struct CoefficientOptions
{
    bool polarized = true;
    std::vector<double> sample_times{0.0}; // seconds
    /// Split the two strongest clusters into three delay-offset sub-clusters (needs 20 rays).
    bool subclusters = true;
    std::array<double, 3> subcluster_delays{0.0, 5e-9, 10e-9};
    int workers = 1;
};

/// Coefficients h[u][s][p][t], row-major, for rx element u, tx element s,
/// path p (a cluster or sub-cluster) and sample time t.
struct ChannelTensor
{
    std::size_t n_rx = 0, n_tx = 0, n_paths = 0, n_samples = 0;
    std::size_t n_rays = 0; // rays per cluster used
    double wavelength = 0.0;
    std::vector<cdouble> h;
    std::vector<double> path_delays; // seconds
    std::vector<int> path_cluster;   // source cluster of each path
    std::vector<double> sample_times;

    std::size_t index(std::size_t u, std::size_t s, std::size_t p, std::size_t t) const
    {
        return ((u * n_tx + s) * n_paths + p) * n_samples + t;
    }
    cdouble& at(std::size_t u, std::size_t s, std::size_t p, std::size_t t) { return h[index(u, s, p, t)]; }
    const cdouble& at(std::size_t u, std::size_t s, std::size_t p, std::size_t t) const
    {
        return h[index(u, s, p, t)];
    }
};

/// Ray groups (0-based ray indices) of the three sub-clusters for 20 rays.
const std::array<std::vector<int>, 3>& subcluster_rays();

/// Evaluates the cluster sum for every (u, s, path, t). Precomputes per-ray field
/// patterns and array phases, then parallelises over (u, s) with OpenMP.
/// Results are identical for any worker count. Throws DimensionError on empty
/// arrays, ConfigError when sub-clusters are requested with a ray count other than 20.
ChannelTensor channel_coefficient(const ClusterSet& clusters, const ArrayGeometry& tx, const ArrayGeometry& rx,
                                  const CoefficientOptions& options);

/// Direct single-threaded evaluation of the same sum, one term at a time.
ChannelTensor channel_coefficient_serial(const ClusterSet& clusters, const ArrayGeometry& tx,
                                         const ArrayGeometry& rx, const CoefficientOptions& options);

struct CirHeader
{
    std::uint64_t link_id = 0;
    std::uint32_t n_rx = 0, n_tx = 0, n_paths = 0, n_rays = 0, n_samples = 0;
    double wavelength = 0.0;
    double sample_interval = 0.0;
};

inline constexpr char kCirMagic[8] = {'G', 'S', 'C', 'M', 'C', 'I', 'R', '\0'};

/// Appends one record: header, path delays (f64), then (re, im) f64 pairs in
/// (u, s, p, t) order, all little-endian.
void write_cir(std::ostream& out, std::uint64_t link_id, const ChannelTensor& tensor);

struct CirRecord
{
    CirHeader header;
    std::vector<double> path_delays;
    std::vector<cdouble> h;
};

/// Reads the next record; returns false at a clean end of stream. Throws Error on truncation.
bool read_cir(std::istream& in, CirRecord& record);

} // namespace gscm
