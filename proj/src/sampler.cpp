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

#include "crossing/sampler.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "crossing/diversity.hpp"
#include "crossing/enumeration.hpp"
#include "crossing/scoring.hpp"

namespace crossing {

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index over an empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

std::size_t hamming_distance(const Scenario& a, const Scenario& b) {
  if (a.assignment.size() != b.assignment.size()) throw std::invalid_argument("scenarios differ in length");
  std::size_t d = 0;
  for (std::size_t j = 0; j < a.assignment.size(); ++j) d += a.assignment[j] != b.assignment[j] ? 1 : 0;
  return d;
}

std::size_t min_pairwise_hamming(std::span<const Scenario> scenarios) {
  std::size_t best = scenarios.empty() ? 0 : scenarios.front().assignment.size();
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    for (std::size_t j = i + 1; j < scenarios.size(); ++j) best = std::min(best, hamming_distance(scenarios[i], scenarios[j]));
  }
  return best;
}

std::vector<Scenario> max_min_select(std::span<const Scenario> population, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("sample count must be at least 1");
  if (population.empty()) return {};
  if (count >= population.size()) return {population.begin(), population.end()};

  std::mt19937_64 rng(seed);
  constexpr std::size_t kPicked = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> nearest(population.size(), std::numeric_limits<std::size_t>::max() - 1);
  std::vector<Scenario> picked;
  picked.reserve(count);

  std::size_t choice = static_cast<std::size_t>(uniform_index(rng, population.size()));
  for (;;) {
    picked.push_back(population[choice]);
    nearest[choice] = kPicked;
    if (picked.size() == count) break;
    std::size_t best = 0;
    std::size_t best_index = kPicked;
    for (std::size_t i = 0; i < population.size(); ++i) {
      if (nearest[i] == kPicked) continue;
      nearest[i] = std::min(nearest[i], hamming_distance(population[i], population[choice]));
      if (best_index == kPicked || nearest[i] > best) {
        best = nearest[i];
        best_index = i;
      }
    }
    choice = best_index;
  }
  return picked;
}

std::vector<Scenario> sample_bucket(const ScenarioSpace& space, const Profile& profile, std::int64_t k,
                                    std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("sample count must be at least 1");
  auto population = bucket_members(space, profile, k, 0, std::numeric_limits<std::uint64_t>::max());
  if (population.empty()) throw EmptyBucketError("bucket " + std::to_string(k) + " has no scenarios for " + profile.id);
  return max_min_select(population, count, seed);
}

std::int64_t target_bucket(const Rational& cd, const std::vector<std::uint64_t>& profile_counts) {
  if (profile_counts.empty()) throw std::invalid_argument("no buckets");
  const auto k_max = static_cast<std::int64_t>(profile_counts.size()) - 1;
  std::int64_t k = (cd * Rational(k_max)).round_half_away();
  k = std::clamp<std::int64_t>(k, 0, k_max);
  if (profile_counts[static_cast<std::size_t>(k)] != 0) return k;
  for (std::int64_t d = 1; d <= k_max; ++d) {
    if (k + d <= k_max && profile_counts[static_cast<std::size_t>(k + d)] != 0) return k + d;
    if (k - d >= 0 && profile_counts[static_cast<std::size_t>(k - d)] != 0) return k - d;
  }
  throw EmptyBucketError("profile admits no scenarios");
}

SessionPlan build_path(const ScenarioSpace& space, const Profile& profile, std::vector<Rational> cd_targets,
                       std::size_t per_level, std::uint64_t seed) {
  if (per_level == 0) throw std::invalid_argument("per_level must be at least 1");
  BucketCounts counts = tally(space, profile, CountingMethod::kAuto, false).counts;
  if (counts.total_profile() == 0) throw EmptyBucketError("profile " + profile.id + " admits no scenarios");

  SessionPlan plan{profile.id, seed, {}, {}};
  std::vector<std::pair<std::int64_t, Rational>> levels;
  for (const auto& target : cd_targets) {
    const std::int64_t k = target_bucket(target, counts.profile);
    const std::int64_t natural = std::clamp<std::int64_t>((target * Rational(counts.k_max)).round_half_away(), 0, counts.k_max);
    if (k != natural) plan.substitutions.push_back({target, Rational(k, counts.k_max)});
    levels.emplace_back(k, target);
  }
  std::stable_sort(levels.begin(), levels.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  for (std::size_t level = 0; level < levels.size(); ++level) {
    const std::int64_t k = levels[level].first;
    const std::uint64_t level_seed = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(level);
    for (auto& s : sample_bucket(space, profile, k, per_level, level_seed)) {
      plan.steps.push_back({k, Rational(k, counts.k_max), std::move(s)});
    }
  }
  return plan;
}

nlohmann::json session_plan_to_json(const SessionPlan& plan, const ScenarioSpace& space) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& step : plan.steps) {
    steps.push_back({{"cd", step.cd.to_string()},
                     {"k", step.k},
                     {"assignment", step.scenario.assignment},
                     {"labels", scenario_labels(step.scenario, space)}});
  }
  nlohmann::json substitutions = nlohmann::json::array();
  for (const auto& s : plan.substitutions) {
    substitutions.push_back({{"requested", s.requested.to_string()}, {"used", s.used.to_string()}});
  }
  return {{"profile", plan.profile_id}, {"seed", plan.seed}, {"steps", steps}, {"substitutions", substitutions}};
}

}  // namespace crossing
