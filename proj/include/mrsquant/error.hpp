/*
 * Copyright 2026 The mrsquant Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Error types shared by every module. Each carries the process exit code the
// command-line tool reports for it.

#ifndef MRSQUANT_ERROR_HPP_
#define MRSQUANT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace mrsquant {

enum class ExitCode : int {
  kSuccess = 0,
  kConfiguration = 2,
  kCompatibility = 3,
  kNumerical = 4,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what,
                 ExitCode code = ExitCode::kConfiguration)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

// Invalid parameter record, config field, or function argument.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Unknown metabolite, target, or experiment name.
class LookupError : public Error {
 public:
  using Error::Error;
};

// A ppm window or grid that does not overlap the data.
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what)
      : Error(what, ExitCode::kCompatibility) {}
};

// Input that violates an operation's precondition (e.g. SNR of a zero
// spectrum).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(what, ExitCode::kNumerical) {}
};

// Spectra and model/basis do not share a grid or protocol.
class CompatibilityError : public Error {
 public:
  explicit CompatibilityError(const std::string& what)
      : Error(what, ExitCode::kCompatibility) {}
};

// Undefined numerical result (zero truth, degenerate correlation, Cr <= 0).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(what, ExitCode::kNumerical) {}
};

// Malformed or truncated file. `what()` names the location.
class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace mrsquant

#endif  // MRSQUANT_ERROR_HPP_
