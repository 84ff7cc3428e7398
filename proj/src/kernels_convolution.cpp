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

#include <stdexcept>

#include "crossing/kernels.hpp"

namespace crossing::kernels {
namespace {

// Count distribution of the integer score: poly[t] = #assignments with total t.
using Poly = std::vector<std::uint64_t>;

Poly convolve(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Poly feature_poly(std::span<const std::int64_t> contributions, ValueSet allowed) {
  Poly p;
  for (ValueIndex v : allowed.indices()) {
    auto t = static_cast<std::size_t>(contributions[v]);
    if (p.size() <= t) p.resize(t + 1, 0);
    ++p[t];
  }
  return p;
}

// Tally for the pure product set  X_0 x X_1 x ... ; sign applies the
// inclusion-exclusion coefficient (+1 or -1) into the profile columns.
void accumulate_product(const ScoreModel& model, const std::vector<ValueSet>& sets, bool with_histograms, int sign,
                        Tally& out) {
  const std::size_t n = sets.size();
  std::vector<Poly> polys(n);
  for (std::size_t j = 0; j < n; ++j) polys[j] = feature_poly(model.contributions(j), sets[j]);

  std::vector<Poly> prefix(n + 1);
  prefix[0] = Poly{1};
  for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = convolve(prefix[j], polys[j]);

  auto add = [sign](std::uint64_t& cell, std::uint64_t value) {
    if (sign > 0) {
      cell += value;
    } else {
      cell -= value;
    }
  };

  const Poly& full = prefix[n];
  for (std::size_t t = 0; t < full.size(); ++t) {
    if (full[t] != 0) add(out.counts.profile[static_cast<std::size_t>(model.bucket_of_total(static_cast<std::int64_t>(t)))], full[t]);
  }
  if (!with_histograms) return;

  std::vector<Poly> suffix(n + 1);
  suffix[n] = Poly{1};
  for (std::size_t j = n; j-- > 0;) suffix[j] = convolve(polys[j], suffix[j + 1]);

  for (std::size_t j = 0; j < n; ++j) {
    const Poly others = convolve(prefix[j], suffix[j + 1]);
    const auto row = model.contributions(j);
    for (ValueIndex v : sets[j].indices()) {
      for (std::size_t t = 0; t < others.size(); ++t) {
        if (others[t] == 0) continue;
        const std::int64_t k = model.bucket_of_total(static_cast<std::int64_t>(t) + row[v]);
        add(out.histograms.at(k, j, v), others[t]);
      }
    }
  }
}

}  // namespace

Tally tally_convolution(const ScoreModel& model, const ProductForm& form, bool with_histograms) {
  const std::size_t n = model.feature_count();
  if (form.allowed.size() != n) throw std::invalid_argument("product form does not match the score model");

  Tally out{BucketCounts(model.k_max()), {}};
  if (with_histograms) out.histograms = BucketHistograms(model.k_max(), model.value_counts());

  // Unconstrained column.
  Poly all{1};
  for (std::size_t j = 0; j < n; ++j) {
    all = convolve(all, feature_poly(model.contributions(j), ValueSet::all(static_cast<ValueIndex>(model.contributions(j).size()))));
  }
  for (std::size_t t = 0; t < all.size(); ++t) {
    if (all[t] != 0) out.counts.all[static_cast<std::size_t>(model.bucket_of_total(static_cast<std::int64_t>(t)))] += all[t];
  }

  accumulate_product(model, form.allowed, with_histograms, +1, out);
  if (form.at_least_one) {
    std::vector<ValueSet> excluded(n);
    for (std::size_t j = 0; j < n; ++j) {
      const ValueIndex count = static_cast<ValueIndex>(model.contributions(j).size());
      excluded[j] = form.allowed[j] & (*form.at_least_one)[j].complement(count);
    }
    accumulate_product(model, excluded, with_histograms, -1, out);
  }
  return out;
}

}  // namespace crossing::kernels
