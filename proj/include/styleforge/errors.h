/* Copyright 2026 The StyleForge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef STYLEFORGE_ERRORS_H_
#define STYLEFORGE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace styleforge {

// Root of every error thrown by the library. Subclasses classify the failure
// so callers (notably the CLI) can map them onto exit codes and messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes that do not fit together.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Input too small for the operation (e.g. pooling a 1-pixel map).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class UnsupportedBatchError : public Error {
 public:
  using Error::Error;
};

// Malformed or unsupported file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A required named entry (weight layer, style layer) is absent.
class CompletenessError : public Error {
 public:
  using Error::Error;
};

// Argument values outside their documented domain.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf encountered; usually means the optimization diverged.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Operation called on an object that lacks the required state.
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace styleforge

#endif  // STYLEFORGE_ERRORS_H_
