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

#include <omp.h>

#include <algorithm>

#include "crossing/kernels.hpp"

namespace crossing::kernels {
namespace {

constexpr std::uint64_t kChunk = 8192;

}  // namespace

Tally tally_parallel(const ScoreModel& model, const CompiledConstraint& filter, bool with_histograms) {
  const std::vector<std::uint32_t> radix = model.value_counts();
  const std::size_t n = radix.size();
  std::uint64_t total = 1;
  for (auto r : radix) total *= r;  // the space constructor already rejected overflow
  const std::uint64_t chunks = (total + kChunk - 1) / kChunk;

  Tally out{BucketCounts(model.k_max()), {}};
  if (with_histograms) out.histograms = BucketHistograms(model.k_max(), radix);

#pragma omp parallel
  {
    Tally local{BucketCounts(model.k_max()), {}};
    if (with_histograms) local.histograms = BucketHistograms(model.k_max(), radix);
    std::vector<ValueIndex> digits;

#pragma omp for schedule(dynamic, 4)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
      const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunk;
      const std::uint64_t end = std::min(total, begin + kChunk);
      digits = decode_position(radix, begin);
      std::int64_t score = model.total(digits);
      for (std::uint64_t pos = begin; pos < end; ++pos) {
        const std::int64_t k = model.bucket_of_total(score);
        ++local.counts.all[static_cast<std::size_t>(k)];
        if (filter(digits)) {
          ++local.counts.profile[static_cast<std::size_t>(k)];
          if (with_histograms) {
            for (std::size_t j = 0; j < n; ++j) ++local.histograms.at(k, j, digits[j]);
          }
        }
        // Odometer step with an incremental score update.
        for (std::size_t j = n; j-- > 0;) {
          const auto row = model.contributions(j);
          score -= row[digits[j]];
          if (++digits[j] < radix[j]) {
            score += row[digits[j]];
            break;
          }
          digits[j] = 0;
          score += row[0];
        }
      }
    }

#pragma omp critical(crossing_tally_merge)
    {
      out.counts.merge(local.counts);
      if (with_histograms) out.histograms.merge(local.histograms);
    }
  }
  return out;
}

}  // namespace crossing::kernels
