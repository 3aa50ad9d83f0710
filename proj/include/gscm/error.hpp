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

#include <stdexcept>
#include <string>

namespace gscm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// An input lies outside the validity range of a model.
class RangeError : public Error
{
  public:
    using Error::Error;
};

/// Inconsistent or degenerate geometry (coincident points, impossible drops, ...).
class GeometryError : public Error
{
  public:
    using Error::Error;
};

/// Invalid parameter tables or run configuration.
class ConfigError : public Error
{
  public:
    using Error::Error;
};

/// Array / tensor dimensions do not agree.
class DimensionError : public Error
{
  public:
    using Error::Error;
};

} // namespace gscm
