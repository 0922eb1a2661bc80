// Copyright 2026 The pointdet Authors
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

#ifndef POINTDET_ERRORS_HPP_
#define POINTDET_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pointdet
{

// Base class for every library error; C API maps subclasses to status codes.
struct Error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Binary payload has an impossible size (e.g. cloud bytes not a multiple of 16).
struct LengthError : Error
{
  using Error::Error;
};

// A parsed or supplied value violates a documented invariant.
struct ValueError : Error
{
  using Error::Error;
};

// Required key absent from a calibration or config file.
struct MissingKeyError : Error
{
  using Error::Error;
};

// A matrix or vector has the wrong element count.
struct ShapeError : Error
{
  using Error::Error;
};

// A label line has too few fields.
struct FieldCountError : Error
{
  using Error::Error;
};

// A point cloud is in the wrong coordinate frame for the operation.
struct FrameError : Error
{
  using Error::Error;
};

struct EmptyCloudError : Error
{
  using Error::Error;
};

// Proposal has no interior points; callers drop such proposals.
struct EmptyProposalError : Error
{
  using Error::Error;
};

struct InsufficientProposalsError : Error
{
  using Error::Error;
};

struct RangeError : Error
{
  using Error::Error;
};

// Synthetic scene placement could not satisfy the non-overlap constraint.
struct PlacementError : Error
{
  using Error::Error;
};

struct ConfigError : Error
{
  using Error::Error;
};

struct IoError : Error
{
  using Error::Error;
};

}  // namespace pointdet

#endif  // POINTDET_ERRORS_HPP_
