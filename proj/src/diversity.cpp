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

#include "crossing/diversity.hpp"

#include <algorithm>
#include <cmath>

namespace crossing {
namespace {

constexpr double kSumTolerance = 1e-9;

void check_distribution(std::span<const double> p, const char* name) {
  double sum = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument(std::string(name) + " has a negative or non-finite entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) throw std::invalid_argument(std::string(name) + " does not sum to 1");
}

}  // namespace

double jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("distributions differ in length");
  check_distribution(p, "p");
  check_distribution(q, "q");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) sum += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) sum += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return std::clamp(sum, 0.0, 1.0);
}

double jsd(const ValueDistribution& p, const ValueDistribution& q) { return jsd(p.probabilities, q.probabilities); }

ValueDistribution uniform_distribution(FeatureId feature_id, std::size_t value_count) {
  if (value_count == 0) throw std::invalid_argument("uniform distribution over zero values");
  return {feature_id, std::vector<double>(value_count, 1.0 / static_cast<double>(value_count))};
}

ValueDistribution empirical_distribution(const BucketHistograms& histograms, const ScenarioSpace& space,
                                         FeatureId feature_id, std::int64_t k) {
  auto pos = space.position_of(feature_id);
  if (!pos) throw std::invalid_argument("unknown feature " + std::to_string(feature_id));
  if (k < 0 || k > histograms.k_max()) throw std::out_of_range("bucket " + std::to_string(k) + " outside [0, k_max]");
  auto row = histograms.row(k, *pos);
  std::uint64_t population = 0;
  for (auto c : row) population += c;
  if (population == 0) throw EmptyBucketError("bucket " + std::to_string(k) + " has no scenarios");
  ValueDistribution out{feature_id, {}};
  out.probabilities.reserve(row.size());
  for (auto c : row) out.probabilities.push_back(static_cast<double>(c) / static_cast<double>(population));
  return out;
}

ValueDistribution empirical_distribution(const ScenarioSpace& space, const Profile& profile, FeatureId feature_id,
                                         std::int64_t k) {
  return empirical_distribution(tally(space, profile, CountingMethod::kAuto, true).histograms, space, feature_id, k);
}

double variance(const ValueDistribution& empirical) {
  return 1.0 - jsd(empirical, uniform_distribution(empirical.feature_id, empirical.probabilities.size()));
}

double variance(const ScenarioSpace& space, const Profile& profile, FeatureId feature_id, std::int64_t k) {
  return variance(empirical_distribution(space, profile, feature_id, k));
}

std::vector<VarianceCurve> variance_curves(const BucketHistograms& histograms, const ScenarioSpace& space,
                                           const std::set<FeatureId>& exclude) {
  std::vector<VarianceCurve> curves;
  for (std::size_t j = 0; j < space.feature_count(); ++j) {
    const auto& f = space.features()[j];
    if (exclude.count(f.id)) continue;
    VarianceCurve curve{f.id, f.name, {}};
    for (std::int64_t k = 0; k <= histograms.k_max(); ++k) {
      try {
        curve.points.push_back({k, Rational(k, histograms.k_max()), variance(empirical_distribution(histograms, space, f.id, k))});
      } catch (const EmptyBucketError&) {
      }
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<VarianceCurve> variance_curves(const ScenarioSpace& space, const Profile& profile,
                                           const std::set<FeatureId>& exclude, CountingMethod method) {
  return variance_curves(tally(space, profile, method, true).histograms, space, exclude);
}

}  // namespace crossing
