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
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "crossing/constraints.hpp"
#include "crossing/feature_model.hpp"
#include "crossing/scoring.hpp"

namespace crossing {

/// Lexicographic cursor over the product space (first feature most
/// significant), optionally filtered by a constraint. Memory use does not
/// depend on the space size. Single consumer.
class ScenarioStream {
 public:
  explicit ScenarioStream(const ScenarioSpace& space, const std::optional<ConstraintExpr>& constraint = std::nullopt,
                          std::uint64_t position = 0);

  /// Next admissible scenario, or nullopt once exhausted.
  std::optional<Scenario> next();

  /// Linear index of the next combination still to be examined. Passing it
  /// back to the constructor resumes the identical remaining sequence.
  std::uint64_t position() const { return position_; }
  std::string token() const { return std::to_string(position_); }
  static ScenarioStream resume(const ScenarioSpace& space, const std::optional<ConstraintExpr>& constraint,
                               const std::string& token);

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Scenario;
    using difference_type = std::ptrdiff_t;
    using pointer = const Scenario*;
    using reference = const Scenario&;

    iterator() = default;
    explicit iterator(ScenarioStream* stream) : stream_(stream) { ++*this; }
    reference operator*() const { return *current_; }
    pointer operator->() const { return &*current_; }
    iterator& operator++() {
      current_ = stream_->next();
      if (!current_) stream_ = nullptr;
      return *this;
    }
    bool operator==(const iterator& rhs) const { return stream_ == rhs.stream_; }

   private:
    ScenarioStream* stream_ = nullptr;
    std::optional<Scenario> current_;
  };

  iterator begin() { return iterator(this); }
  iterator end() { return iterator(); }

 private:
  std::vector<std::uint32_t> radix_;
  std::vector<ValueIndex> digits_;
  std::uint64_t position_ = 0;
  std::uint64_t total_ = 0;
  CompiledConstraint filter_;
};

ScenarioStream enumerate(const ScenarioSpace& space, const std::optional<ConstraintExpr>& constraint = std::nullopt);

/// Mixed-radix decode of a linear index into value indices.
std::vector<ValueIndex> decode_position(std::span<const std::uint32_t> radix, std::uint64_t position);

/// Scenario counts per consistent-difficulty bucket, index k in [0, k_max].
struct BucketCounts {
  std::int64_t k_max = 0;
  std::vector<std::uint64_t> all;
  std::vector<std::uint64_t> profile;

  BucketCounts() = default;
  explicit BucketCounts(std::int64_t k_max_in)
      : k_max(k_max_in), all(static_cast<std::size_t>(k_max_in + 1)), profile(static_cast<std::size_t>(k_max_in + 1)) {}

  std::uint64_t total_all() const;
  std::uint64_t total_profile() const;
  void merge(const BucketCounts& other);
  bool operator==(const BucketCounts&) const = default;
};

/// Per bucket, per feature position, per value: number of profile-admissible
/// scenarios in that bucket carrying that value.
class BucketHistograms {
 public:
  BucketHistograms() = default;
  BucketHistograms(std::int64_t k_max, const std::vector<std::uint32_t>& value_counts);

  std::int64_t k_max() const { return k_max_; }
  std::size_t feature_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::uint32_t value_count(std::size_t position) const {
    return static_cast<std::uint32_t>(offsets_[position + 1] - offsets_[position]);
  }

  std::uint64_t& at(std::int64_t k, std::size_t position, ValueIndex v) {
    return data_[static_cast<std::size_t>(k) * stride_ + offsets_[position] + v];
  }
  std::uint64_t at(std::int64_t k, std::size_t position, ValueIndex v) const {
    return data_[static_cast<std::size_t>(k) * stride_ + offsets_[position] + v];
  }
  std::span<const std::uint64_t> row(std::int64_t k, std::size_t position) const {
    return {data_.data() + static_cast<std::size_t>(k) * stride_ + offsets_[position], value_count(position)};
  }

  void merge(const BucketHistograms& other);
  bool empty() const { return data_.empty(); }
  bool operator==(const BucketHistograms&) const = default;

 private:
  std::int64_t k_max_ = 0;
  std::vector<std::size_t> offsets_;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> data_;
};

struct Tally {
  BucketCounts counts;
  BucketHistograms histograms;  // empty unless requested
};

enum class CountingMethod {
  kSerial,       // reference enumeration
  kParallel,     // OpenMP enumeration
  kConvolution,  // exact distribution convolution; needs a product-form constraint
  kAuto,         // convolution when supported, else parallel enumeration
};

/// Full tally for a profile. kConvolution throws std::invalid_argument when
/// the constraint shape is unsupported.
Tally tally(const ScenarioSpace& space, const Profile& profile, CountingMethod method, bool with_histograms);

BucketCounts count_by_bucket_bruteforce(const ScenarioSpace& space, const Profile& profile,
                                        CountingMethod method = CountingMethod::kParallel);

/// Exact counts without enumeration, or nullopt when the profile constraint
/// does not normalize to a conjunction of Allows plus at most one AtLeastOne
/// (callers fall back to count_by_bucket_bruteforce).
std::optional<BucketCounts> count_by_bucket_fast(const ScenarioSpace& space, const Profile& profile);

bool fast_counting_supported(const ScenarioSpace& space, const Profile& profile);

/// Lexicographic page of the profile-admissible scenarios in bucket k.
/// Throws std::out_of_range when k exceeds k_max.
std::vector<Scenario> bucket_members(const ScenarioSpace& space, const Profile& profile, std::int64_t k,
                                     std::uint64_t offset, std::uint64_t limit);

}  // namespace crossing
