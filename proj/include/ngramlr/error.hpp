/*
 * Copyright 2026 The ngramlr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace ngramlr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (bad TSV rows, single-class training sets, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or configuration (k < 2, non-positive C, unknown config key, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The solver exhausted its iteration budget before meeting the stopping rule.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double gradient_norm)
      : Error(what), gradient_norm_(gradient_norm) {}

  double gradient_norm() const noexcept { return gradient_norm_; }

 private:
  double gradient_norm_;
};

}  // namespace ngramlr
