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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossing/diversity.hpp"
#include "crossing/enumeration.hpp"
#include "crossing/feature_model.hpp"

namespace crossing {

/// Edges of the diversity plateau. A plateau bucket has every reported
/// feature at V >= 0.9; a collapse bucket has some reported feature at
/// V < 0.5. low is the highest-cd collapse bucket below the plateau, high
/// the lowest-cd collapse bucket above it.
struct CollapseThresholds {
  std::optional<Rational> low_cd_collapse;
  std::optional<Rational> high_cd_collapse;

  bool operator==(const CollapseThresholds&) const = default;
};

inline constexpr double kPlateauLevel = 0.9;
inline constexpr double kCollapseLevel = 0.5;

struct AnalysisOptions {
  bool use_fast_counting = true;
  bool exclude_constrained = false;
};

struct ProfileAnalysis {
  std::string profile_id;
  std::string space_fingerprint;
  std::uint64_t total_all = 0;
  std::uint64_t total_profile = 0;
  double percentage = 0.0;
  Rational delta;
  BucketCounts buckets;
  std::vector<FeatureId> excluded_features;
  std::vector<VarianceCurve> curves;
  CollapseThresholds thresholds;

  bool operator==(const ProfileAnalysis&) const = default;
};

/// SHA-256 (hex) of the canonical space document.
std::string space_fingerprint(const ScenarioSpace& space);

ProfileAnalysis analyze(const ScenarioSpace& space, const Profile& profile, const AnalysisOptions& options = {});

CollapseThresholds collapse_thresholds(const std::vector<VarianceCurve>& curves, std::int64_t k_max);

nlohmann::json analysis_to_json(const ProfileAnalysis& analysis);
ProfileAnalysis analysis_from_json(const nlohmann::json& doc);

enum class ExportFormat { kCsv, kJson, kSvg };

std::optional<ExportFormat> parse_export_format(std::string_view name);
std::string_view extension(ExportFormat format);

std::string render_csv(const ProfileAnalysis& analysis);
std::string render_json(const ProfileAnalysis& analysis);
std::string render_svg(const ProfileAnalysis& analysis);

/// Writes the rendered artifact to destination. Throws std::runtime_error
/// when the file cannot be written.
void export_analysis(const ProfileAnalysis& analysis, ExportFormat format, const std::filesystem::path& destination);

/// "290304 / 331776 (87.5%)"
std::string count_summary(std::uint64_t total_profile, std::uint64_t total_all);

}  // namespace crossing
