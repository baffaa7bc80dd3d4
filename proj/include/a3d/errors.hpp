// Copyright 2026 The A3D Optimizer Authors
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

namespace a3d {

/// Base class of every error raised by the optimizer.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed plan, stats, or generator documents.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Unknown columns, unbound relations, type mismatches.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Runtime failures of the reference interpreter (e.g. unequal array
/// lengths under a multi-target arrayJoin).
class EvalError : public Error {
 public:
  using Error::Error;
};

/// The planner cannot produce a plan (cross product required, no valid
/// partition, oracle limits exceeded, rule loop).
class InfeasibleQuery : public Error {
 public:
  using Error::Error;
};

/// A term uses a construct the selected SQL dialect cannot express.
class DialectError : public Error {
 public:
  using Error::Error;
};

}  // namespace a3d
