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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "crossing/analysis.hpp"
#include "test_support.hpp"

using namespace crossing;
namespace fs = std::filesystem;

namespace {

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + needle.size())) ++n;
  return n;
}

VarianceCurve curve(std::vector<double> v, std::int64_t k_max) {
  VarianceCurve c{1, "f", {}};
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] < 0) continue;  // marks an empty bucket
    c.points.push_back({static_cast<std::int64_t>(k), Rational(static_cast<std::int64_t>(k), k_max), v[k]});
  }
  return c;
}

}  // namespace

TEST(Analysis, FastAndEnumeratedPathsIdentical) {
  const ScenarioSpace space = builtin_crosswalk_space();
  for (const auto& p : builtin_profile_catalog()) {
    for (bool exclude : {false, true}) {
      EXPECT_EQ(analyze(space, p, {true, exclude}), analyze(space, p, {false, exclude})) << p.id;
    }
  }
}

TEST(Analysis, ReferenceTotals) {
  const ScenarioSpace space = builtin_crosswalk_space();
  const auto a = analyze(space, *find_builtin_profile("profile-1"));
  EXPECT_EQ(a.total_all, 331776U);
  EXPECT_EQ(a.total_profile, 290304U);
  EXPECT_NEAR(a.percentage, 87.5, 1e-12);
  EXPECT_EQ(a.delta, Rational(5, 43));
  EXPECT_EQ(a.curves.size(), 12U);
  EXPECT_TRUE(a.excluded_features.empty());
  EXPECT_EQ(count_summary(a.total_profile, a.total_all), "290304 / 331776 (87.5%)");
  EXPECT_EQ(count_summary(147456, 331776), "147456 / 331776 (44.4%)");
  EXPECT_EQ(count_summary(16384, 331776), "16384 / 331776 (4.9%)");
  EXPECT_EQ(count_summary(0, 0), "0 / 0 (0.0%)");
}

TEST(Analysis, ExcludeConstrainedDropsPinnedFeatures) {
  const ScenarioSpace space = builtin_crosswalk_space();
  const auto a = analyze(space, *find_builtin_profile("profile-3"), {true, true});
  EXPECT_EQ(a.excluded_features, std::vector<FeatureId>{5});
  EXPECT_EQ(a.curves.size(), 11U);
}

TEST(Analysis, PlateauAndCollapseForProfileOne) {
  const ScenarioSpace space = builtin_crosswalk_space();
  const auto a = analyze(space, *find_builtin_profile("profile-1"));
  EXPECT_EQ(a.thresholds.low_cd_collapse, Rational(1, 9));
  EXPECT_EQ(a.thresholds.high_cd_collapse, Rational(1));
}

TEST(Thresholds, SyntheticCurves) {
  EXPECT_EQ(collapse_thresholds({}, 4), CollapseThresholds{});
  // No plateau: nothing to collapse from.
  EXPECT_EQ(collapse_thresholds({curve({0.2, 0.6, 0.8, 0.3, 0.1}, 4)}, 4), CollapseThresholds{});
  // Collapse nearest the plateau on each side is reported.
  const auto t = collapse_thresholds({curve({0.1, 0.4, 0.95, 0.92, 0.7, 0.2, 0.3}, 6)}, 6);
  EXPECT_EQ(t.low_cd_collapse, Rational(1, 6));
  EXPECT_EQ(t.high_cd_collapse, Rational(5, 6));
  // The minimum over features decides; empty buckets are skipped.
  const auto u = collapse_thresholds({curve({0.3, -1, 0.99, 0.99}, 3), curve({0.9, -1, 0.95, 0.4}, 3)}, 3);
  EXPECT_EQ(u.low_cd_collapse, Rational(0));
  EXPECT_EQ(u.high_cd_collapse, Rational(1));
  const auto w = collapse_thresholds({curve({0.3, -1, 0.99, 0.6}, 3)}, 3);
  EXPECT_FALSE(w.high_cd_collapse.has_value());
}

TEST(AnalysisJson, RoundTrip) {
  const ScenarioSpace space = builtin_crosswalk_space();
  for (const auto& p : builtin_profile_catalog()) {
    const auto a = analyze(space, p, {true, true});
    const auto doc = analysis_to_json(a);
    EXPECT_EQ(analysis_from_json(doc), a) << p.id;
    EXPECT_EQ(analysis_from_json(nlohmann::json::parse(doc.dump())), a) << p.id;
  }
  EXPECT_THROW(analysis_from_json(nlohmann::json::object()), DocumentError);
}

TEST(Fingerprint, StableAndSensitive) {
  const ScenarioSpace space = builtin_crosswalk_space();
  const std::string f = space_fingerprint(space);
  EXPECT_TRUE(std::regex_match(f, std::regex("[0-9a-f]{64}")));
  EXPECT_EQ(space_fingerprint(deserialize_space(serialize_space(space))), f);
  auto features = space.features();
  features[0].values[0] = Rational(1, 4);
  EXPECT_NE(space_fingerprint(ScenarioSpace(features, space.groups())), f);
}

TEST(Render, CsvShape) {
  const ScenarioSpace space = builtin_crosswalk_space();
  const auto a = analyze(space, *find_builtin_profile("profile-3"));
  const std::string csv = render_csv(a);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "profile_id,cd,k,count_all,count_profile,feature_id,feature_name,V");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7) << line;
  }
  EXPECT_EQ(rows, 5U * 12U);  // five nonempty buckets, twelve features
}

TEST(Render, SvgStructure) {
  const ScenarioSpace space = builtin_crosswalk_space();
  for (const auto& p : builtin_profiles()) {
    const auto a = analyze(space, p);
    const std::string svg = render_svg(a);
    EXPECT_EQ(svg.rfind("<svg", 0), 0U);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    const auto bars = count_occurrences(svg, "class=\"bar-group\"");
    const auto nonempty = static_cast<std::size_t>(std::count_if(a.buckets.all.begin(), a.buckets.all.end(),
                                                                 [](std::uint64_t c) { return c != 0; }));
    EXPECT_EQ(bars, nonempty) << p.id;
    if (p.id == "profile-1") EXPECT_LE(bars, 10U);
    EXPECT_EQ(count_occurrences(svg, "class=\"variance-line\""), a.curves.size());
    EXPECT_NE(svg.find("#0000FF"), std::string::npos);
    EXPECT_NE(svg.find("#FE0000"), std::string::npos);
  }
}

TEST(Render, DeterministicOutputs) {
  const ScenarioSpace space = builtin_crosswalk_space();
  const Profile p = *find_builtin_profile("profile-4");
  const auto a = analyze(space, p), b = analyze(space, p);
  EXPECT_EQ(render_csv(a), render_csv(b));
  EXPECT_EQ(render_json(a), render_json(b));
  EXPECT_EQ(render_svg(a), render_svg(b));
}

TEST(Export, WritesFilesAndReportsFailures) {
  const ScenarioSpace space = builtin_crosswalk_space();
  const auto a = analyze(space, *find_builtin_profile("profile-4"));
  const fs::path dir = fs::temp_directory_path() / ("crossing-export-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  for (auto name : {"csv", "json", "svg"}) {
    const auto format = parse_export_format(name);
    ASSERT_TRUE(format.has_value());
    const fs::path out = dir / (std::string("a.") + std::string(extension(*format)));
    export_analysis(a, *format, out);
    std::ifstream in(out);
    std::stringstream text;
    text << in.rdbuf();
    EXPECT_FALSE(text.str().empty());
  }
  EXPECT_FALSE(parse_export_format("pdf").has_value());
  EXPECT_THROW(export_analysis(a, ExportFormat::kCsv, dir / "missing" / "x.csv"), std::runtime_error);
  fs::remove_all(dir);
}
