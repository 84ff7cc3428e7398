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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crossing/constraints.hpp"
#include "crossing/errors.hpp"
#include "crossing/rational.hpp"

namespace crossing {

/// One configurable scenario dimension. Values are ordered by expected
/// difficulty; labels are presentation only.
struct FeatureSchema {
  FeatureId id = 0;
  std::string name;
  std::vector<Rational> values;
  GroupId group = 0;
  std::vector<std::string> labels;

  ValueIndex value_count() const { return static_cast<ValueIndex>(values.size()); }
  /// Label of value i, or the rational text when the feature has no labels.
  std::string label(ValueIndex i) const;

  bool operator==(const FeatureSchema&) const = default;
};

struct SkillGroup {
  GroupId id = 0;
  std::string name;

  bool operator==(const SkillGroup&) const = default;
};

/// Ordered features plus the skill groups they belong to. Construction does
/// not validate; use validate_space (deserialize_space always does).
class ScenarioSpace {
 public:
  ScenarioSpace() = default;
  ScenarioSpace(std::vector<FeatureSchema> features, std::vector<SkillGroup> groups);

  const std::vector<FeatureSchema>& features() const { return features_; }
  const std::vector<SkillGroup>& groups() const { return groups_; }
  std::size_t feature_count() const { return features_.size(); }

  std::optional<std::size_t> position_of(FeatureId id) const;
  const FeatureSchema& feature(FeatureId id) const;  // throws std::out_of_range
  const SkillGroup* find_group(GroupId id) const;

  /// Product of per-feature value counts. Throws std::overflow_error past 2^64-1.
  std::uint64_t total_combinations() const;

  bool operator==(const ScenarioSpace& rhs) const {
    return features_ == rhs.features_ && groups_ == rhs.groups_;
  }

 private:
  std::vector<FeatureSchema> features_;
  std::vector<SkillGroup> groups_;
  std::map<FeatureId, std::size_t> positions_;
};

/// A full assignment: one value index per feature, in feature order.
struct Scenario {
  std::vector<ValueIndex> assignment;

  auto operator<=>(const Scenario&) const = default;
};

struct Profile {
  std::string id;
  std::string name;
  std::map<GroupId, int> weights;
  ConstraintExpr constraint;
  std::string description;
  std::uint64_t version = 1;
  /// Preset whose encoding only approximates the intended population.
  bool approximate = false;

  int weight(GroupId group) const;  // throws std::out_of_range

  bool operator==(const Profile&) const = default;
};

inline constexpr int kMinWeight = 1;
inline constexpr int kMaxWeight = 5;

ScenarioSpace builtin_crosswalk_space();

/// The four synthetic profiles.
std::vector<Profile> builtin_profiles();
/// builtin_profiles plus the staged variants of profile-2, in document order.
std::vector<Profile> builtin_profile_catalog();
std::optional<Profile> find_builtin_profile(std::string_view id);

ValidationReport validate_space(const ScenarioSpace& space);
/// Weight coverage/range and constraint structure against a space.
ValidationReport validate_profile(const Profile& profile, const ScenarioSpace& space);

/// Throws std::invalid_argument when the assignment does not fit the space.
void check_scenario(const Scenario& scenario, const ScenarioSpace& space);

nlohmann::json space_to_json(const ScenarioSpace& space);
ScenarioSpace space_from_json(const nlohmann::json& doc);
nlohmann::json profile_to_json(const Profile& profile);
Profile profile_from_json(const nlohmann::json& doc);

/// Canonical documents: two-space indented JSON with sorted keys.
std::string serialize_space(const ScenarioSpace& space);
ScenarioSpace deserialize_space(std::string_view text);
std::string serialize_profile(const Profile& profile);
Profile deserialize_profile(std::string_view text);

/// Parses JSON text, mapping syntax errors to DocumentError with line/column.
nlohmann::json parse_document(std::string_view text);

/// Human-readable label per feature name, for rendering a scenario.
nlohmann::json scenario_labels(const Scenario& scenario, const ScenarioSpace& space);

}  // namespace crossing
