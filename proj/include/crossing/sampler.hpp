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
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossing/feature_model.hpp"
#include "crossing/rational.hpp"

namespace crossing {

struct PlanStep {
  std::int64_t k = 0;
  Rational cd;
  Scenario scenario;

  bool operator==(const PlanStep&) const = default;
};

/// A requested difficulty whose bucket was empty, and the bucket used instead.
struct CdSubstitution {
  Rational requested;
  Rational used;

  bool operator==(const CdSubstitution&) const = default;
};

struct SessionPlan {
  std::string profile_id;
  std::uint64_t seed = 0;
  std::vector<PlanStep> steps;  // cd non-decreasing
  std::vector<CdSubstitution> substitutions;

  bool operator==(const SessionPlan&) const = default;
};

/// Uniform index in [0, n) from raw mt19937_64 output by rejection, so the
/// sequence for a seed is identical on every platform.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);

std::size_t hamming_distance(const Scenario& a, const Scenario& b);
/// Smallest distance over all pairs. With fewer than two scenarios there is no
/// pair and the feature count is returned.
std::size_t min_pairwise_hamming(std::span<const Scenario> scenarios);

/// Greedy max-min selection from a lexicographically ordered population:
/// seeded uniform first pick, then repeatedly the member farthest (minimum
/// Hamming distance) from everything picked, ties to the earliest member.
std::vector<Scenario> max_min_select(std::span<const Scenario> population, std::size_t count, std::uint64_t seed);

/// Diverse scenarios from bucket k. Throws EmptyBucketError for an empty
/// bucket and std::invalid_argument for count == 0.
std::vector<Scenario> sample_bucket(const ScenarioSpace& space, const Profile& profile, std::int64_t k,
                                    std::size_t count, std::uint64_t seed);

/// Nearest bucket to a target difficulty: round(cd * k_max), moved to the
/// nearest nonempty bucket (ties upward) when empty.
std::int64_t target_bucket(const Rational& cd, const std::vector<std::uint64_t>& profile_counts);

/// Ordered training path: per_level diverse scenarios per target, levels in
/// ascending difficulty. Throws EmptyBucketError when the profile admits no
/// scenario at all.
SessionPlan build_path(const ScenarioSpace& space, const Profile& profile, std::vector<Rational> cd_targets,
                       std::size_t per_level, std::uint64_t seed);

nlohmann::json session_plan_to_json(const SessionPlan& plan, const ScenarioSpace& space);

}  // namespace crossing
