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

#include "crossing/scoring.hpp"

#include <algorithm>
#include <stdexcept>

namespace crossing {

Rational raw_score(const Scenario& scenario, const ScenarioSpace& space, const Profile& profile) {
  check_scenario(scenario, space);
  Rational total;
  for (std::size_t j = 0; j < space.feature_count(); ++j) {
    const auto& f = space.features()[j];
    total += Rational(profile.weight(f.group)) * f.values[scenario.assignment[j]];
  }
  return total;
}

Rational max_raw_score(const ScenarioSpace& space, const Profile& profile) {
  Rational total;
  for (const auto& f : space.features()) total += Rational(profile.weight(f.group)) * f.values.back();
  return total;
}

Rational normalized_score(const Scenario& scenario, const ScenarioSpace& space, const Profile& profile) {
  return raw_score(scenario, space, profile) / max_raw_score(space, profile);
}

DifficultyScore score(const Scenario& scenario, const ScenarioSpace& space, const Profile& profile) {
  Rational raw = raw_score(scenario, space, profile);
  return {raw, raw / max_raw_score(space, profile)};
}

Rational delta(const ScenarioSpace& space, const Profile& profile) {
  Rational largest;
  for (const auto& f : space.features()) {
    largest = std::max(largest, Rational(profile.weight(f.group)) * f.values.back());
  }
  return largest / max_raw_score(space, profile);
}

BucketIndex cd_bucket(const Rational& d_norm, const Rational& delta) {
  if (delta <= Rational(0)) throw std::domain_error("delta must be positive");
  return {(d_norm / delta).round_half_away(), (Rational(1) / delta).round_half_away()};
}

std::optional<Rational> reciprocal_cd(const Rational& d_norm, const Rational& delta) {
  if (delta <= Rational(0)) throw std::domain_error("delta must be positive");
  std::int64_t k = (d_norm / delta).round_half_away();
  if (k == 0) return std::nullopt;
  return Rational(1, k);
}

ScoreModel::ScoreModel(const ScenarioSpace& space, const Profile& profile) {
  for (const auto& f : space.features()) {
    for (const auto& v : f.values) scale_ = checked_lcm(scale_, v.denominator());
  }
  contributions_.reserve(space.feature_count());
  for (const auto& f : space.features()) {
    const std::int64_t w = profile.weight(f.group);
    std::vector<std::int64_t> row;
    row.reserve(f.values.size());
    for (const auto& v : f.values) {
      Rational scaled = Rational(w) * v * Rational(scale_);
      row.push_back(scaled.numerator());
    }
    std::int64_t top = row.empty() ? 0 : *std::max_element(row.begin(), row.end());
    if (__builtin_add_overflow(max_total_, top, &max_total_)) throw std::overflow_error("score range overflow");
    max_single_ = std::max(max_single_, top);
    contributions_.push_back(std::move(row));
  }
  if (max_single_ <= 0) throw std::domain_error("profile has no positive feature contribution; delta undefined");
  k_max_ = bucket_of_total(max_total_);
}

std::vector<std::uint32_t> ScoreModel::value_counts() const {
  std::vector<std::uint32_t> out;
  for (const auto& row : contributions_) out.push_back(static_cast<std::uint32_t>(row.size()));
  return out;
}

std::int64_t ScoreModel::total(std::span<const ValueIndex> assignment) const {
  std::int64_t sum = 0;
  for (std::size_t j = 0; j < contributions_.size(); ++j) sum += contributions_[j][assignment[j]];
  return sum;
}

}  // namespace crossing
