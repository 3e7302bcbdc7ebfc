// Copyright 2026 The Countermeasure DSS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace dss {

// Input outside the mathematical domain of an operation (rates, probabilities).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A configuration value violates an invariant. `field_path()` names the
// offending field in dotted/indexed form, e.g. "strategies[3].easing_fraction".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field_path, std::string reason)
      : std::runtime_error(field_path.empty() ? reason : field_path + ": " + reason),
        field_path_(std::move(field_path)),
        reason_(std::move(reason)) {}

  const std::string& field_path() const noexcept { return field_path_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string field_path_;
  std::string reason_;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dss
