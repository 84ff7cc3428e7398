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

#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossing/enumeration.hpp"
#include "crossing/feature_model.hpp"
#include "crossing/rational.hpp"

namespace crossing {

struct ValueDistribution {
  FeatureId feature_id = 0;
  std::vector<double> probabilities;
};

struct VariancePoint {
  std::int64_t k = 0;
  Rational cd;
  double v = 0.0;

  bool operator==(const VariancePoint&) const = default;
};

struct VarianceCurve {
  FeatureId feature_id = 0;
  std::string feature_name;
  std::vector<VariancePoint> points;  // cd strictly increasing, empty buckets omitted

  bool operator==(const VarianceCurve&) const = default;
};

/// The bucket holds no admissible scenario, so its distribution is undefined.
class EmptyBucketError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Jensen-Shannon divergence with base-2 logarithms, so the result lies in
/// [0, 1]. Throws std::invalid_argument on length mismatch or when an input
/// is not a probability distribution.
double jsd(std::span<const double> p, std::span<const double> q);
double jsd(const ValueDistribution& p, const ValueDistribution& q);

ValueDistribution uniform_distribution(FeatureId feature_id, std::size_t value_count);

ValueDistribution empirical_distribution(const BucketHistograms& histograms, const ScenarioSpace& space,
                                         FeatureId feature_id, std::int64_t k);
ValueDistribution empirical_distribution(const ScenarioSpace& space, const Profile& profile, FeatureId feature_id,
                                         std::int64_t k);

/// 1 - jsd(empirical, uniform): 1 when every value is used equally often.
double variance(const ValueDistribution& empirical);
double variance(const ScenarioSpace& space, const Profile& profile, FeatureId feature_id, std::int64_t k);

std::vector<VarianceCurve> variance_curves(const BucketHistograms& histograms, const ScenarioSpace& space,
                                           const std::set<FeatureId>& exclude);
std::vector<VarianceCurve> variance_curves(const ScenarioSpace& space, const Profile& profile,
                                           const std::set<FeatureId>& exclude,
                                           CountingMethod method = CountingMethod::kAuto);

}  // namespace crossing
