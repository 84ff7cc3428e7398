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
#include <optional>
#include <span>
#include <vector>

#include "crossing/feature_model.hpp"
#include "crossing/rational.hpp"

namespace crossing {

struct DifficultyScore {
  Rational raw;         // weighted sum
  Rational normalized;  // raw / max_raw_score
};

/// Consistent-difficulty bucket: k = round(d / delta), k_max = round(1 / delta),
/// cd = k / k_max. Rounding is half away from zero.
struct BucketIndex {
  std::int64_t k = 0;
  std::int64_t k_max = 1;

  Rational cd() const { return Rational(k, k_max); }
  bool operator==(const BucketIndex&) const = default;
};

Rational raw_score(const Scenario& scenario, const ScenarioSpace& space, const Profile& profile);
Rational max_raw_score(const ScenarioSpace& space, const Profile& profile);
Rational normalized_score(const Scenario& scenario, const ScenarioSpace& space, const Profile& profile);
DifficultyScore score(const Scenario& scenario, const ScenarioSpace& space, const Profile& profile);

/// Largest single-feature contribution as a fraction of the maximum score.
Rational delta(const ScenarioSpace& space, const Profile& profile);

/// Throws std::domain_error when delta is not positive.
BucketIndex cd_bucket(const Rational& d_norm, const Rational& delta);

/// The reciprocal form 1 / round(d / delta), kept as a diagnostic. Undefined
/// (nullopt) when round(d / delta) is zero.
std::optional<Rational> reciprocal_cd(const Rational& d_norm, const Rational& delta);

/// Integer form of a profile's scoring over one space: every contribution
/// weight * value is multiplied by the least common denominator of all feature
/// values, so totals and bucket boundaries are exact integers.
class ScoreModel {
 public:
  ScoreModel(const ScenarioSpace& space, const Profile& profile);

  std::int64_t scale() const { return scale_; }
  std::size_t feature_count() const { return contributions_.size(); }
  std::span<const std::int64_t> contributions(std::size_t position) const { return contributions_[position]; }
  std::vector<std::uint32_t> value_counts() const;

  std::int64_t max_total() const { return max_total_; }
  std::int64_t max_single() const { return max_single_; }
  std::int64_t k_max() const { return k_max_; }

  std::int64_t total(std::span<const ValueIndex> assignment) const;
  std::int64_t bucket_of_total(std::int64_t total) const { return (2 * total + max_single_) / (2 * max_single_); }
  std::int64_t bucket(std::span<const ValueIndex> assignment) const { return bucket_of_total(total(assignment)); }

  Rational raw(std::int64_t total) const { return Rational(total, scale_); }
  Rational normalized(std::int64_t total) const { return Rational(total, max_total_); }
  Rational delta() const { return Rational(max_single_, max_total_); }

 private:
  std::int64_t scale_ = 1;
  std::vector<std::vector<std::int64_t>> contributions_;
  std::int64_t max_total_ = 0;
  std::int64_t max_single_ = 0;
  std::int64_t k_max_ = 0;
};

}  // namespace crossing
