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

#include "crossing/enumeration.hpp"

#include <stdexcept>

#include "crossing/kernels.hpp"

namespace crossing {

std::vector<ValueIndex> decode_position(std::span<const std::uint32_t> radix, std::uint64_t position) {
  std::vector<ValueIndex> digits(radix.size());
  for (std::size_t j = radix.size(); j-- > 0;) {
    digits[j] = static_cast<ValueIndex>(position % radix[j]);
    position /= radix[j];
  }
  return digits;
}

ScenarioStream::ScenarioStream(const ScenarioSpace& space, const std::optional<ConstraintExpr>& constraint,
                               std::uint64_t position)
    : position_(position), total_(space.total_combinations()) {
  for (const auto& f : space.features()) radix_.push_back(f.value_count());
  if (constraint) filter_ = CompiledConstraint(*constraint, space);
  if (position_ > total_) position_ = total_;
  if (position_ < total_) digits_ = decode_position(radix_, position_);
}

std::optional<Scenario> ScenarioStream::next() {
  while (position_ < total_) {
    bool admissible = filter_(digits_);
    std::optional<Scenario> out;
    if (admissible) out = Scenario{digits_};
    ++position_;
    for (std::size_t j = digits_.size(); j-- > 0;) {
      if (++digits_[j] < radix_[j]) break;
      digits_[j] = 0;
    }
    if (out) return out;
  }
  return std::nullopt;
}

ScenarioStream ScenarioStream::resume(const ScenarioSpace& space, const std::optional<ConstraintExpr>& constraint,
                                      const std::string& token) {
  std::size_t used = 0;
  std::uint64_t position = 0;
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("invalid stream token '" + token + "'");
  }
  try {
    position = std::stoull(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size()) throw std::invalid_argument("invalid stream token '" + token + "'");
  return ScenarioStream(space, constraint, position);
}

ScenarioStream enumerate(const ScenarioSpace& space, const std::optional<ConstraintExpr>& constraint) {
  return ScenarioStream(space, constraint);
}

std::uint64_t BucketCounts::total_all() const {
  std::uint64_t sum = 0;
  for (auto c : all) sum += c;
  return sum;
}

std::uint64_t BucketCounts::total_profile() const {
  std::uint64_t sum = 0;
  for (auto c : profile) sum += c;
  return sum;
}

void BucketCounts::merge(const BucketCounts& other) {
  if (other.k_max != k_max) throw std::invalid_argument("merging bucket counts with different k_max");
  for (std::size_t k = 0; k < all.size(); ++k) {
    all[k] += other.all[k];
    profile[k] += other.profile[k];
  }
}

BucketHistograms::BucketHistograms(std::int64_t k_max, const std::vector<std::uint32_t>& value_counts) : k_max_(k_max) {
  offsets_.push_back(0);
  for (auto n : value_counts) offsets_.push_back(offsets_.back() + n);
  stride_ = offsets_.back();
  data_.assign(static_cast<std::size_t>(k_max + 1) * stride_, 0);
}

void BucketHistograms::merge(const BucketHistograms& other) {
  if (other.data_.size() != data_.size()) throw std::invalid_argument("merging mismatched histograms");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

bool fast_counting_supported(const ScenarioSpace& space, const Profile& profile) {
  return product_form(profile.constraint, space).has_value();
}

Tally tally(const ScenarioSpace& space, const Profile& profile, CountingMethod method, bool with_histograms) {
  ScoreModel model(space, profile);
  if (method == CountingMethod::kConvolution || method == CountingMethod::kAuto) {
    if (auto form = product_form(profile.constraint, space)) {
      return kernels::tally_convolution(model, *form, with_histograms);
    }
    if (method == CountingMethod::kConvolution) {
      throw std::invalid_argument("constraint of profile " + profile.id + " is not supported by convolution counting");
    }
    method = CountingMethod::kParallel;
  }
  CompiledConstraint filter(profile.constraint, space);
  if (method == CountingMethod::kSerial) return kernels::tally_serial(model, filter, with_histograms);
  return kernels::tally_parallel(model, filter, with_histograms);
}

BucketCounts count_by_bucket_bruteforce(const ScenarioSpace& space, const Profile& profile, CountingMethod method) {
  if (method != CountingMethod::kSerial) method = CountingMethod::kParallel;
  return tally(space, profile, method, false).counts;
}

std::optional<BucketCounts> count_by_bucket_fast(const ScenarioSpace& space, const Profile& profile) {
  auto form = product_form(profile.constraint, space);
  if (!form) return std::nullopt;
  return kernels::tally_convolution(ScoreModel(space, profile), *form, false).counts;
}

std::vector<Scenario> bucket_members(const ScenarioSpace& space, const Profile& profile, std::int64_t k,
                                     std::uint64_t offset, std::uint64_t limit) {
  ScoreModel model(space, profile);
  if (k < 0 || k > model.k_max()) throw std::out_of_range("bucket " + std::to_string(k) + " outside [0, k_max]");
  std::vector<Scenario> page;
  if (limit == 0) return page;
  std::uint64_t seen = 0;
  ScenarioStream stream(space, profile.constraint);
  while (auto s = stream.next()) {
    if (model.bucket(s->assignment) != k) continue;
    if (seen++ < offset) continue;
    page.push_back(std::move(*s));
    if (page.size() == limit) break;
  }
  return page;
}

}  // namespace crossing
