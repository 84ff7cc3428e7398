// Copyright 2026 The Crossing Scenarios Authors
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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crossing {

enum class ViolationKind {
  kEmptySpace,
  kEmptyValues,
  kValueOutOfRange,
  kValuesNotAscending,
  kDuplicateValue,
  kTooManyValues,
  kLabelCountMismatch,
  kDuplicateFeatureId,
  kDuplicateGroupId,
  kDanglingGroup,
  kEmptyGroup,
  kMissingWeight,
  kWeightOutOfRange,
  kUnknownGroupWeight,
  kConstraint,
};

struct Violation {
  ViolationKind kind;
  std::optional<unsigned> feature_id;
  std::optional<unsigned> group_id;
  std::string message;
};

/// Invariant violations found in a space or profile. Violations are data;
/// an empty report means the value is valid.
struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string summary() const;
};

/// Malformed document: bad JSON or a missing/mistyped field.
class DocumentError : public std::runtime_error {
 public:
  DocumentError(const std::string& message, std::string field, std::size_t line = 0, std::size_t column = 0);

  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string field_;
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed document describing a value that breaks an invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(ValidationReport report);

  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

}  // namespace crossing
