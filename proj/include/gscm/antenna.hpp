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

#include <cstddef>
#include <vector>

#include "gscm/vec3.hpp"

namespace gscm {

/// Parabolic element pattern. A default-constructed pattern is the 65 degree /
/// 8 dBi sector element with a 30 dB floor.
struct ElementPattern
{
    double hpbw_az = 65.0;
    double hpbw_el = 65.0;
    double gain_max_dbi = 8.0;
    double floor_attenuation_db = 30.0;
    bool isotropic = false;

    static ElementPattern isotropic_pattern(double gain_dbi = 0.0)
    {
        ElementPattern p;
        p.isotropic = true;
        p.gain_max_dbi = gain_dbi;
        return p;
    }
};

enum class PolarizationModel
{
    Constant,
    SlantedDipole
};

struct PolarizationSpec
{
    PolarizationModel model = PolarizationModel::SlantedDipole;
    double slant_deg = 0.0; // (-90, 90]
};

/// Field components along the spherical basis vectors theta-hat / phi-hat.
struct FieldPattern
{
    double f_theta = 0.0;
    double f_phi = 0.0;
};

/// Gain in dBi at zenith theta in [0, 180] and azimuth phi in (-180, 180],
/// both in the element frame (boresight at theta = 90, phi = 0):
///   A_v = -min(12 ((theta - 90) / hpbw_el)^2, floor)
///   A_h = -min(12 (phi / hpbw_az)^2, floor)
///   A   = gain_max - min(-(A_v + A_h), floor)
double element_gain_db(double theta_deg, double phi_deg, const ElementPattern& pattern);

/// Field pattern in the element's own frame.
///
/// Constant model: sqrt(A) (cos zeta, sin zeta) at every direction.
/// Slanted dipole: a vertically polarised element mechanically rotated by zeta
/// about its boresight (+x) axis; both the gain and the polarisation direction
/// follow the rotation. A positive slant turns the field from theta-hat towards
/// +phi-hat at boresight, so both models agree there.
FieldPattern field_pattern(double theta_deg, double phi_deg, const ElementPattern& pattern,
                           const PolarizationSpec& polarization);

/// Panel mounting: bearing about +z, then mechanical downtilt.
struct Orientation
{
    double bearing_deg = 0.0;
    double downtilt_deg = 0.0;

    /// Panel frame to global frame.
    Rotation rotation() const { return Rotation::about_z(bearing_deg) * Rotation::about_y(downtilt_deg); }
};

/// Direction (theta, phi) of the global frame expressed in a rotated frame.
void to_local_angles(const Rotation& local_to_global, double theta_deg, double phi_deg, double& theta_local,
                     double& phi_local);

/// Field pattern towards a global direction for an element mounted with orientation;
/// components are returned along the global theta-hat / phi-hat.
FieldPattern field_pattern(double theta_deg, double phi_deg, const ElementPattern& pattern,
                           const PolarizationSpec& polarization, const Orientation& orientation);

/// Element gain towards a global direction for a mounted (unslanted) element.
double element_gain_db(double theta_deg, double phi_deg, const ElementPattern& pattern, const Orientation& orientation);

/// Uniform planar array in the panel's y-z plane, boresight +x. Elements of one
/// location are consecutive; index = ((row * cols) + col) * slants.size() + p.
struct ArrayGeometry
{
    int rows = 1;
    int cols = 1;
    double dv = 0.5; // vertical pitch, wavelengths
    double dh = 0.5; // horizontal pitch, wavelengths
    double wavelength = 0.15;
    std::vector<double> slants_deg{0.0};
    PolarizationModel model = PolarizationModel::SlantedDipole;
    ElementPattern pattern;
    Orientation orientation;

    std::size_t size() const { return static_cast<std::size_t>(rows * cols) * slants_deg.size(); }
    PolarizationSpec polarization(std::size_t index) const;
    /// Position of an element in the panel frame, metres (element 0 at the origin).
    Vec3 element_position(std::size_t index) const;
    /// Position rotated into the global frame.
    Vec3 element_position_global(std::size_t index) const;
    /// Throws ConfigError on inconsistent fields.
    void validate() const;
};

} // namespace gscm
