// Copyright 2026 The fluxlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace fluxlab {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad user input (config files, parameter records). Maps to exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

/// A computation ran into a singular region (non-invertible map, divergent
/// rate, pure-state boundary). Maps to exit code 4.
struct SingularityError : Error {
  using Error::Error;
};

// ---- state and operator validation -------------------------------------

struct DimMismatch : Error {
  using Error::Error;
};
struct NotHermitian : Error {
  using Error::Error;
};
struct NotUnitTrace : Error {
  using Error::Error;
};
struct NotPositive : Error {
  using Error::Error;
};

// ---- thermodynamic preconditions ----------------------------------------

struct InfiniteTemperature : Error {
  using Error::Error;
};
struct MixedTemperatures : Error {
  using Error::Error;
};
struct NotProductInitial : Error {
  using Error::Error;
};

// ---- integration and map machinery --------------------------------------

struct PositivityLost : Error {
  using Error::Error;
};
struct SingularMap : SingularityError {
  using SingularityError::SingularityError;
};
struct NotPauliDiagonal : Error {
  using Error::Error;
};

// ---- model parameter validation ------------------------------------------

struct InvalidPopulations : Error {
  using Error::Error;
};
struct DegeneratePopulation : Error {
  using Error::Error;
};
struct SingularRadius : SingularityError {
  using SingularityError::SingularityError;
};
struct SingularAtPureState : SingularityError {
  using SingularityError::SingularityError;
};

}  // namespace fluxlab
