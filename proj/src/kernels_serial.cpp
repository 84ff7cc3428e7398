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

#include "crossing/kernels.hpp"

namespace crossing::kernels {

Tally tally_serial(const ScoreModel& model, const CompiledConstraint& filter, bool with_histograms) {
  Tally out{BucketCounts(model.k_max()), {}};
  if (with_histograms) out.histograms = BucketHistograms(model.k_max(), model.value_counts());

  const std::vector<std::uint32_t> radix = model.value_counts();
  std::vector<ValueIndex> digits(radix.size(), 0);
  const std::size_t n = radix.size();
  for (;;) {
    const std::int64_t k = model.bucket(digits);
    ++out.counts.all[static_cast<std::size_t>(k)];
    if (filter(digits)) {
      ++out.counts.profile[static_cast<std::size_t>(k)];
      if (with_histograms) {
        for (std::size_t j = 0; j < n; ++j) ++out.histograms.at(k, j, digits[j]);
      }
    }
    std::size_t j = n;
    while (j-- > 0) {
      if (++digits[j] < radix[j]) break;
      digits[j] = 0;
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

}  // namespace crossing::kernels
