// Copyright 2026 The sbqudit Authors
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
#include <utility>

namespace sbq {

/// Thrown when an input violates a documented precondition or invariant.
/// `field()` names the offending parameter so callers (the CLI in
/// particular) can report it without parsing the message.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Thrown when a well-formed input leads to a condition the model cannot
/// handle (unbracketed root, ambiguous labeling, empty post-selection, ...).
class ModelError : public std::runtime_error {
 public:
  ModelError(std::string label, const std::string& what)
      : std::runtime_error(label + ": " + what), label_(std::move(label)) {}

  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

}  // namespace sbq
