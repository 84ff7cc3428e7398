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

#include "crossing/feature_model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace crossing {

namespace embedded {
std::string_view crosswalk_space_document();
std::string_view presets_document();
}  // namespace embedded

using nlohmann::json;

// ---------------------------------------------------------------------------
// errors

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i != 0) out << "; ";
    out << violations[i].message;
  }
  return out.str();
}

DocumentError::DocumentError(const std::string& message, std::string field, std::size_t line, std::size_t column)
    : std::runtime_error(line == 0 ? field + ": " + message
                                   : "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                         ": " + message),
      field_(std::move(field)),
      line_(line),
      column_(column) {}

ValidationError::ValidationError(ValidationReport report)
    : std::runtime_error("validation failed: " + report.summary()), report_(std::move(report)) {}

// ---------------------------------------------------------------------------
// schema types

std::string FeatureSchema::label(ValueIndex i) const {
  if (i < labels.size()) return labels[i];
  return values.at(i).to_string();
}

ScenarioSpace::ScenarioSpace(std::vector<FeatureSchema> features, std::vector<SkillGroup> groups)
    : features_(std::move(features)), groups_(std::move(groups)) {
  for (std::size_t i = 0; i < features_.size(); ++i) positions_.emplace(features_[i].id, i);
}

std::optional<std::size_t> ScenarioSpace::position_of(FeatureId id) const {
  auto it = positions_.find(id);
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

const FeatureSchema& ScenarioSpace::feature(FeatureId id) const {
  auto pos = position_of(id);
  if (!pos) throw std::out_of_range("unknown feature " + std::to_string(id));
  return features_[*pos];
}

const SkillGroup* ScenarioSpace::find_group(GroupId id) const {
  for (const auto& g : groups_) {
    if (g.id == id) return &g;
  }
  return nullptr;
}

std::uint64_t ScenarioSpace::total_combinations() const {
  std::uint64_t total = 1;
  for (const auto& f : features_) {
    if (__builtin_mul_overflow(total, static_cast<std::uint64_t>(f.values.size()), &total)) {
      throw std::overflow_error("scenario space exceeds 2^64-1 combinations");
    }
  }
  return total;
}

int Profile::weight(GroupId group) const {
  auto it = weights.find(group);
  if (it == weights.end()) throw std::out_of_range("profile " + id + " has no weight for group " + std::to_string(group));
  return it->second;
}

void check_scenario(const Scenario& scenario, const ScenarioSpace& space) {
  if (scenario.assignment.size() != space.feature_count()) {
    throw std::invalid_argument("scenario has " + std::to_string(scenario.assignment.size()) + " values, space has " +
                                std::to_string(space.feature_count()) + " features");
  }
  for (std::size_t j = 0; j < scenario.assignment.size(); ++j) {
    if (scenario.assignment[j] >= space.features()[j].value_count()) {
      throw std::invalid_argument("value index " + std::to_string(scenario.assignment[j]) + " out of range for feature " +
                                  std::to_string(space.features()[j].id));
    }
  }
}

// ---------------------------------------------------------------------------
// validation

ValidationReport validate_space(const ScenarioSpace& space) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::optional<unsigned> feature, std::optional<unsigned> group, std::string msg) {
    report.violations.push_back({kind, feature, group, std::move(msg)});
  };

  if (space.features().empty()) add(ViolationKind::kEmptySpace, std::nullopt, std::nullopt, "space has no features");

  std::set<GroupId> group_ids;
  for (const auto& g : space.groups()) {
    if (!group_ids.insert(g.id).second) {
      add(ViolationKind::kDuplicateGroupId, std::nullopt, g.id, "duplicate group id " + std::to_string(g.id));
    }
  }

  std::set<FeatureId> feature_ids;
  std::set<GroupId> used_groups;
  for (const auto& f : space.features()) {
    const std::string where = "feature " + std::to_string(f.id);
    if (!feature_ids.insert(f.id).second) add(ViolationKind::kDuplicateFeatureId, f.id, std::nullopt, "duplicate " + where);
    if (f.values.empty()) add(ViolationKind::kEmptyValues, f.id, std::nullopt, where + " has no values");
    if (f.values.size() > ValueSet::kCapacity) {
      add(ViolationKind::kTooManyValues, f.id, std::nullopt, where + " has more than 64 values");
    }
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const Rational& v = f.values[i];
      if (v < Rational(0) || v > Rational(1)) {
        add(ViolationKind::kValueOutOfRange, f.id, std::nullopt, where + " value " + v.to_string() + " outside [0,1]");
      }
      if (i > 0) {
        if (v == f.values[i - 1]) {
          add(ViolationKind::kDuplicateValue, f.id, std::nullopt, where + " repeats value " + v.to_string());
        } else if (v < f.values[i - 1]) {
          add(ViolationKind::kValuesNotAscending, f.id, std::nullopt, where + " values not strictly ascending");
        }
      }
    }
    if (!f.labels.empty() && f.labels.size() != f.values.size()) {
      add(ViolationKind::kLabelCountMismatch, f.id, std::nullopt, where + " has " + std::to_string(f.labels.size()) +
                                                                        " labels for " + std::to_string(f.values.size()) +
                                                                        " values");
    }
    if (!group_ids.count(f.group)) {
      add(ViolationKind::kDanglingGroup, f.id, f.group, where + " references unknown group " + std::to_string(f.group));
    }
    used_groups.insert(f.group);
  }
  for (GroupId g : group_ids) {
    if (!used_groups.count(g)) add(ViolationKind::kEmptyGroup, std::nullopt, g, "group " + std::to_string(g) + " owns no feature");
  }
  return report;
}

ValidationReport validate_profile(const Profile& profile, const ScenarioSpace& space) {
  ValidationReport report;
  for (const auto& g : space.groups()) {
    auto it = profile.weights.find(g.id);
    if (it == profile.weights.end()) {
      report.violations.push_back(
          {ViolationKind::kMissingWeight, std::nullopt, g.id, "missing weight for group " + std::to_string(g.id)});
    }
  }
  for (const auto& [group, w] : profile.weights) {
    if (w < kMinWeight || w > kMaxWeight) {
      report.violations.push_back({ViolationKind::kWeightOutOfRange, std::nullopt, group,
                                   "weight out of range for group " + std::to_string(group) + ": " + std::to_string(w)});
    }
    if (!space.find_group(group)) {
      report.violations.push_back(
          {ViolationKind::kUnknownGroupWeight, std::nullopt, group, "weight for unknown group " + std::to_string(group)});
    }
  }
  for (auto& problem : check_constraint(profile.constraint, space)) {
    report.violations.push_back({ViolationKind::kConstraint, std::nullopt, std::nullopt, std::move(problem)});
  }
  return report;
}

// ---------------------------------------------------------------------------
// documents

namespace {

template <typename T>
T require(const json& doc, const char* key, const std::string& path) {
  if (!doc.is_object()) throw DocumentError("expected an object", path);
  auto it = doc.find(key);
  if (it == doc.end()) throw DocumentError("missing field", path + "." + key);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw DocumentError("wrong type", path + "." + key);
  }
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw DocumentError(e.what(), "document", line, column);
  }
}

json space_to_json(const ScenarioSpace& space) {
  json features = json::array();
  for (const auto& f : space.features()) {
    json values = json::array();
    for (const auto& v : f.values) values.push_back(v.to_string());
    json item = {{"id", f.id}, {"name", f.name}, {"group", f.group}, {"values", values}};
    if (!f.labels.empty()) item["labels"] = f.labels;
    features.push_back(std::move(item));
  }
  json groups = json::array();
  for (const auto& g : space.groups()) groups.push_back({{"id", g.id}, {"name", g.name}});
  return {{"features", features}, {"groups", groups}};
}

ScenarioSpace space_from_json(const json& doc) {
  if (!doc.is_object()) throw DocumentError("expected an object", "space");
  auto features_doc = require<json>(doc, "features", "space");
  auto groups_doc = require<json>(doc, "groups", "space");
  if (!features_doc.is_array()) throw DocumentError("expected an array", "space.features");
  if (!groups_doc.is_array()) throw DocumentError("expected an array", "space.groups");

  std::vector<FeatureSchema> features;
  for (std::size_t i = 0; i < features_doc.size(); ++i) {
    const std::string path = "space.features[" + std::to_string(i) + "]";
    const json& item = features_doc[i];
    FeatureSchema f;
    f.id = require<FeatureId>(item, "id", path);
    f.name = require<std::string>(item, "name", path);
    f.group = require<GroupId>(item, "group", path);
    auto values = require<std::vector<std::string>>(item, "values", path);
    for (std::size_t v = 0; v < values.size(); ++v) {
      try {
        f.values.push_back(Rational::parse(values[v]));
      } catch (const std::exception& e) {
        throw DocumentError(e.what(), path + ".values[" + std::to_string(v) + "]");
      }
    }
    if (item.contains("labels")) f.labels = require<std::vector<std::string>>(item, "labels", path);
    features.push_back(std::move(f));
  }
  std::vector<SkillGroup> groups;
  for (std::size_t i = 0; i < groups_doc.size(); ++i) {
    const std::string path = "space.groups[" + std::to_string(i) + "]";
    groups.push_back({require<GroupId>(groups_doc[i], "id", path), require<std::string>(groups_doc[i], "name", path)});
  }
  ScenarioSpace space(std::move(features), std::move(groups));
  if (auto report = validate_space(space); !report.ok()) throw ValidationError(std::move(report));
  return space;
}

json profile_to_json(const Profile& profile) {
  json weights = json::object();
  for (const auto& [group, w] : profile.weights) weights[std::to_string(group)] = w;
  json doc = {{"id", profile.id},
              {"name", profile.name},
              {"description", profile.description},
              {"weights", weights},
              {"constraint", constraint_to_json(profile.constraint)},
              {"version", profile.version}};
  if (profile.approximate) doc["approximate"] = true;
  return doc;
}

Profile profile_from_json(const json& doc) {
  const std::string path = "profile";
  Profile p;
  p.id = require<std::string>(doc, "id", path);
  p.name = require<std::string>(doc, "name", path);
  if (doc.contains("description")) p.description = require<std::string>(doc, "description", path);
  if (doc.contains("version")) p.version = require<std::uint64_t>(doc, "version", path);
  if (doc.contains("approximate")) p.approximate = require<bool>(doc, "approximate", path);
  auto weights = require<json>(doc, "weights", path);
  if (!weights.is_object()) throw DocumentError("expected an object", "profile.weights");
  ValidationReport report;
  for (const auto& [key, value] : weights.items()) {
    GroupId group = 0;
    try {
      std::size_t used = 0;
      unsigned long parsed = std::stoul(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
      group = static_cast<GroupId>(parsed);
    } catch (const std::exception&) {
      throw DocumentError("group key must be an integer", "profile.weights." + key);
    }
    if (!value.is_number_integer()) throw DocumentError("weight must be an integer", "profile.weights." + key);
    int w = value.get<int>();
    if (w < kMinWeight || w > kMaxWeight) {
      report.violations.push_back({ViolationKind::kWeightOutOfRange, std::nullopt, group,
                                   "weight out of range for group " + key + ": " + std::to_string(w)});
    }
    p.weights[group] = w;
  }
  if (!report.ok()) throw ValidationError(std::move(report));
  p.constraint = constraint_from_json(require<json>(doc, "constraint", path), "profile.constraint");
  return p;
}

std::string serialize_space(const ScenarioSpace& space) { return space_to_json(space).dump(2) + "\n"; }

ScenarioSpace deserialize_space(std::string_view text) { return space_from_json(parse_document(text)); }

std::string serialize_profile(const Profile& profile) { return profile_to_json(profile).dump(2) + "\n"; }

Profile deserialize_profile(std::string_view text) { return profile_from_json(parse_document(text)); }

json scenario_labels(const Scenario& scenario, const ScenarioSpace& space) {
  check_scenario(scenario, space);
  json labels = json::object();
  for (std::size_t j = 0; j < space.feature_count(); ++j) {
    const auto& f = space.features()[j];
    labels[f.name] = f.label(scenario.assignment[j]);
  }
  return labels;
}

// ---------------------------------------------------------------------------
// builtin presets

ScenarioSpace builtin_crosswalk_space() {
  static const ScenarioSpace space = deserialize_space(embedded::crosswalk_space_document());
  return space;
}

std::vector<Profile> builtin_profile_catalog() {
  static const std::vector<Profile> catalog = [] {
    std::vector<Profile> out;
    json doc = parse_document(embedded::presets_document());
    const json& profiles = doc.at("profiles");
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      const std::string path = "profiles[" + std::to_string(i) + "]";
      const json& entry = profiles[i];
      Profile base = profile_from_json(entry);
      out.push_back(base);
      if (!entry.contains("stages")) continue;
      for (const json& stage : entry.at("stages")) {
        Profile staged = base;
        staged.id = stage.at("id").get<std::string>();
        staged.name = stage.at("name").get<std::string>();
        staged.description = stage.value("description", std::string());
        staged.approximate = stage.value("approximate", false);
        staged.constraint = constraint_from_json(stage.at("constraint"), path + ".stages.constraint");
        out.push_back(std::move(staged));
      }
    }
    return out;
  }();
  return catalog;
}

std::vector<Profile> builtin_profiles() {
  std::vector<Profile> out;
  for (auto& p : builtin_profile_catalog()) {
    if (p.id == "profile-1" || p.id == "profile-2" || p.id == "profile-3" || p.id == "profile-4") out.push_back(p);
  }
  return out;
}

std::optional<Profile> find_builtin_profile(std::string_view id) {
  for (auto& p : builtin_profile_catalog()) {
    if (p.id == id) return p;
  }
  return std::nullopt;
}

}  // namespace crossing
