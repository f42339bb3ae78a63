// Copyright 2026 The krigmis Authors
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

namespace krigmis {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: wrong sizes, non-finite values, empty designs.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A special function could not be evaluated in double precision.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Cholesky or quadratic-form failure on a correlation matrix.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double nugget)
      : Error(what), nugget_(nugget) {}
  double nugget() const noexcept { return nugget_; }

 private:
  double nugget_;
};

/// The target variance of a risk ratio is not positive.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// Every optimizer start failed.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Invalid study configuration; `path` is the JSON pointer of the bad field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace krigmis
