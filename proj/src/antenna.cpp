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
#include "gscm/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "gscm/error.hpp"

namespace gscm {

namespace {

struct SphericalBasis
{
    Vec3 r, theta, phi;
};

SphericalBasis basis(double theta_deg, double phi_deg)
{
    const double t = deg2rad(theta_deg), p = deg2rad(phi_deg);
    const double st = std::sin(t), ct = std::cos(t), sp = std::sin(p), cp = std::cos(p);
    return {{st * cp, st * sp, ct}, {ct * cp, ct * sp, -st}, {-sp, cp, 0.0}};
}

double linear_amplitude(double gain_db)
{
    return std::pow(10.0, gain_db / 20.0);
}

// Re-expresses a field given in a rotated frame (local_to_global) along the
// global basis at (theta, phi).
FieldPattern to_global(const Rotation& local_to_global, double theta_local, double phi_local, FieldPattern f_local,
                       double theta_deg, double phi_deg)
{
    const SphericalBasis lb = basis(theta_local, phi_local);
    const Vec3 e_local = lb.theta * f_local.f_theta + lb.phi * f_local.f_phi;
    const Vec3 e = local_to_global.apply(e_local);
    const SphericalBasis gb = basis(theta_deg, phi_deg);
    return {dot(e, gb.theta), dot(e, gb.phi)};
}

} // namespace

double element_gain_db(double theta_deg, double phi_deg, const ElementPattern& pattern)
{
    if (pattern.isotropic)
        return pattern.gain_max_dbi;
    const double fl = pattern.floor_attenuation_db;
    const double av = -std::min(12.0 * std::pow((theta_deg - 90.0) / pattern.hpbw_el, 2), fl);
    const double ah = -std::min(12.0 * std::pow(wrap_azimuth_deg(phi_deg) / pattern.hpbw_az, 2), fl);
    return pattern.gain_max_dbi - std::min(-(av + ah), fl);
}

void to_local_angles(const Rotation& local_to_global, double theta_deg, double phi_deg, double& theta_local,
                     double& phi_local)
{
    const Vec3 r = local_to_global.apply_inverse(basis(theta_deg, phi_deg).r);
    theta_local = rad2deg(std::acos(std::clamp(r.z, -1.0, 1.0)));
    phi_local = rad2deg(std::atan2(r.y, r.x));
}

FieldPattern field_pattern(double theta_deg, double phi_deg, const ElementPattern& pattern,
                           const PolarizationSpec& polarization)
{
    const double zeta = deg2rad(polarization.slant_deg);
    if (polarization.model == PolarizationModel::Constant)
    {
        const double a = linear_amplitude(element_gain_db(theta_deg, phi_deg, pattern));
        return {a * std::cos(zeta), a * std::sin(zeta)};
    }
    // vertical element in its own frame, rotated by the slant about boresight
    const Rotation slant = Rotation::about_x(polarization.slant_deg);
    double te, pe;
    to_local_angles(slant, theta_deg, phi_deg, te, pe);
    const FieldPattern vertical{linear_amplitude(element_gain_db(te, pe, pattern)), 0.0};
    return to_global(slant, te, pe, vertical, theta_deg, phi_deg);
}

FieldPattern field_pattern(double theta_deg, double phi_deg, const ElementPattern& pattern,
                           const PolarizationSpec& polarization, const Orientation& orientation)
{
    if (orientation.bearing_deg == 0.0 && orientation.downtilt_deg == 0.0)
        return field_pattern(theta_deg, phi_deg, pattern, polarization);
    const Rotation rot = orientation.rotation();
    double tl, pl;
    to_local_angles(rot, theta_deg, phi_deg, tl, pl);
    return to_global(rot, tl, pl, field_pattern(tl, pl, pattern, polarization), theta_deg, phi_deg);
}

double element_gain_db(double theta_deg, double phi_deg, const ElementPattern& pattern, const Orientation& orientation)
{
    double tl, pl;
    to_local_angles(orientation.rotation(), theta_deg, phi_deg, tl, pl);
    return element_gain_db(tl, pl, pattern);
}

PolarizationSpec ArrayGeometry::polarization(std::size_t index) const
{
    if (index >= size())
        throw DimensionError(fmt::format("antenna element index {} out of range (size {})", index, size()));
    return {model, slants_deg[index % slants_deg.size()]};
}

Vec3 ArrayGeometry::element_position(std::size_t index) const
{
    if (index >= size())
        throw DimensionError(fmt::format("antenna element index {} out of range (size {})", index, size()));
    const std::size_t location = index / slants_deg.size();
    const auto row = static_cast<double>(location / static_cast<std::size_t>(cols));
    const auto col = static_cast<double>(location % static_cast<std::size_t>(cols));
    return {0.0, col * dh * wavelength, row * dv * wavelength};
}

Vec3 ArrayGeometry::element_position_global(std::size_t index) const
{
    return orientation.rotation().apply(element_position(index));
}

void ArrayGeometry::validate() const
{
    if (rows < 1 || cols < 1)
        throw ConfigError("array rows and cols must be >= 1");
    if (slants_deg.empty() || slants_deg.size() > 2)
        throw ConfigError("array needs one or two polarization slants per location");
    for (double z : slants_deg)
        if (!(z > -90.0 && z <= 90.0))
            throw ConfigError(fmt::format("polarization slant {} outside (-90, 90]", z));
    if (!(wavelength > 0.0) || dv < 0.0 || dh < 0.0)
        throw ConfigError("array spacing and wavelength must be positive");
    if (!pattern.isotropic && (!(pattern.hpbw_az > 0.0) || !(pattern.hpbw_el > 0.0) || pattern.floor_attenuation_db < 0.0))
        throw ConfigError("element pattern beamwidths must be positive and the floor non-negative");
}

} // namespace gscm
