// Copyright 2026 The seqgdpp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEQGDPP_ERRORS_HPP
#define SEQGDPP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace seqgdpp {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Input matrix is not symmetric positive semi-definite.
class InvalidKernelError : public Error {
 public:
  using Error::Error;
};

// (L^t + I_{V_t}) is singular; conditioning on the previous selection is
// impossible (the selection itself has probability zero under L^t).
class ConditioningError : public Error {
 public:
  using Error::Error;
};

// Requested subset size exceeds the ground-set size.
class CardinalityError : public Error {
 public:
  using Error::Error;
};

// Requested subset size has zero probability under every eigenvalue subset.
class UnsatisfiableSizeError : public Error {
 public:
  using Error::Error;
};

// Size prior puts all of its mass on unreachable cardinalities (Z_G = 0).
class DegenerateModelError : public Error {
 public:
  using Error::Error;
};

// All shot features coincide; the RBF bandwidth ladder is undefined.
class DegenerateFeaturesError : public Error {
 public:
  using Error::Error;
};

// A segment is too large for exhaustive per-step inference.
class SegmentTooLargeError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite objective.
class TrainingDivergedError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Dataset file violates the schema.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Dataset file is well-formed but internally inconsistent.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Too few videos for the requested split scheme.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace seqgdpp

#endif  // SEQGDPP_ERRORS_HPP
