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

#include <gtest/gtest.h>

#include <chrono>
#include <random>
#include <set>

#include "crossing/enumeration.hpp"
#include "crossing/kernels.hpp"
#include "test_support.hpp"

using namespace crossing;

namespace {

using Counts = std::vector<std::uint64_t>;

struct Frozen {
  const char* id;
  Counts all;
  Counts profile;
};

// Reference histograms computed once by an independent exact enumerator.
const std::vector<Frozen>& frozen() {
  static const std::vector<Frozen> table = {
      {"profile-1",
       {7, 1260, 14602, 55885, 101537, 97360, 48944, 11381, 798, 2},
       {0, 21, 3738, 36316, 92538, 96568, 48942, 11381, 798, 2}},
      {"profile-3", {27, 6266, 68070, 151603, 92788, 12902, 120}, {0, 0, 96, 3780, 9652, 2815, 41}},
      {"profile-4", {2, 3435, 71031, 179405, 74216, 3685, 2}, {0, 73, 11955, 77671, 54247, 3508, 2}},
  };
  return table;
}

}  // namespace

TEST(Stream, SingleFeatureInValueOrder) {
  const ScenarioSpace space = fixtures::uniform_space(1, 3, 1);
  std::vector<Scenario> seen;
  for (const auto& s : enumerate(space)) seen.push_back(s);
  ASSERT_EQ(seen.size(), 3U);
  for (ValueIndex v = 0; v < 3; ++v) EXPECT_EQ(seen[v].assignment, std::vector<ValueIndex>{v});
}

TEST(Stream, LexicographicCompleteAndDuplicateFree) {
  const ScenarioSpace space = fixtures::uniform_space(4, 3, 2);
  std::set<Scenario> seen;
  std::optional<Scenario> previous;
  for (const auto& s : enumerate(space)) {
    if (previous) EXPECT_LT(*previous, s);
    previous = s;
    EXPECT_TRUE(seen.insert(s).second);
  }
  EXPECT_EQ(seen.size(), 81U);
}

TEST(Stream, BuiltinSizes) {
  const ScenarioSpace space = builtin_crosswalk_space();
  std::uint64_t n = 0;
  auto stream = enumerate(space);
  while (stream.next()) ++n;
  EXPECT_EQ(n, 331776U);
  EXPECT_FALSE(stream.next().has_value());
  n = 0;
  for ([[maybe_unused]] const auto& s : enumerate(space, find_builtin_profile("profile-1")->constraint)) ++n;
  EXPECT_EQ(n, 290304U);
}

TEST(Stream, ResumeTokensContinueExactly) {
  const ScenarioSpace space = builtin_crosswalk_space();
  const ConstraintExpr c = find_builtin_profile("profile-3")->constraint;
  std::vector<Scenario> straight;
  for (const auto& s : enumerate(space, c)) straight.push_back(s);

  std::vector<Scenario> chunked;
  auto stream = enumerate(space, c);
  std::mt19937_64 rng(3);
  for (;;) {
    const std::size_t take = 1 + rng() % 5000;
    std::size_t got = 0;
    while (got < take) {
      auto s = stream.next();
      if (!s) break;
      chunked.push_back(*s);
      ++got;
    }
    if (got < take) break;
    stream = ScenarioStream::resume(space, c, stream.token());
  }
  EXPECT_EQ(chunked, straight);
}

TEST(Stream, BadTokensRejected) {
  const ScenarioSpace space = builtin_crosswalk_space();
  for (const char* bad : {"", "abc", "12x", " 5"}) {
    EXPECT_THROW(ScenarioStream::resume(space, std::nullopt, bad), std::invalid_argument) << bad;
  }
  auto past_end = ScenarioStream::resume(space, std::nullopt, "999999999");
  EXPECT_FALSE(past_end.next().has_value());
}

TEST(Counts, FrozenReferenceHistograms) {
  const ScenarioSpace space = builtin_crosswalk_space();
  for (const auto& f : frozen()) {
    const Profile p = *find_builtin_profile(f.id);
    const BucketCounts brute = count_by_bucket_bruteforce(space, p);
    EXPECT_EQ(brute.all, f.all) << f.id;
    EXPECT_EQ(brute.profile, f.profile) << f.id;
    EXPECT_EQ(count_by_bucket_fast(space, p), brute) << f.id;
  }
}

TEST(Counts, BuiltinProfilesMatchExactOracle) {
  const ScenarioSpace space = builtin_crosswalk_space();
  for (const auto& p : builtin_profile_catalog()) {
    const BucketCounts oracle = fixtures::oracle_counts(space, p);
    EXPECT_EQ(count_by_bucket_bruteforce(space, p, CountingMethod::kSerial), oracle) << p.id;
    EXPECT_EQ(count_by_bucket_bruteforce(space, p, CountingMethod::kParallel), oracle) << p.id;
    EXPECT_EQ(count_by_bucket_fast(space, p), oracle) << p.id;
  }
}

TEST(Counts, Invariants) {
  const ScenarioSpace space = builtin_crosswalk_space();
  for (const auto& p : builtin_profile_catalog()) {
    const BucketCounts c = count_by_bucket_bruteforce(space, p);
    EXPECT_EQ(c.total_all(), 331776U);
    for (std::size_t k = 0; k < c.all.size(); ++k) EXPECT_LE(c.profile[k], c.all[k]);
  }
}

TEST(Counts, SingleFeatureHandEnumeration) {
  const ScenarioSpace space = fixtures::uniform_space(1, 3, 1);  // values 0, 1/2, 1
  const BucketCounts c = count_by_bucket_bruteforce(space, fixtures::unit_profile(space));
  // delta = 1, so k_max = 1; 1/2 rounds up into the top bucket.
  EXPECT_EQ(c.k_max, 1);
  EXPECT_EQ(c.all, (Counts{1, 2}));
  EXPECT_EQ(c.profile, c.all);
}

TEST(Counts, FastEqualsBruteOnRandomSupportedConstraints) {
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const ScenarioSpace space = fixtures::random_space(rng);
    Profile p = fixtures::random_weights(space, rng);
    if (max_raw_score(space, p) == Rational(0)) continue;
    p.constraint = fixtures::random_product_constraint(space, rng);
    ASSERT_TRUE(fast_counting_supported(space, p));
    const BucketCounts oracle = fixtures::oracle_counts(space, p);
    ASSERT_EQ(count_by_bucket_fast(space, p), oracle) << constraint_to_json(p.constraint).dump();
    ASSERT_EQ(count_by_bucket_bruteforce(space, p, CountingMethod::kSerial), oracle);
    ASSERT_EQ(count_by_bucket_bruteforce(space, p, CountingMethod::kParallel), oracle);
    ++checked;
  }
  EXPECT_GE(checked, 20);
}

TEST(Counts, FastEqualsBruteOnBuiltinSpaceRandomConstraints) {
  const ScenarioSpace space = builtin_crosswalk_space();
  std::mt19937_64 rng(100);
  for (int trial = 0; trial < 20; ++trial) {
    Profile p = fixtures::random_weights(space, rng);
    p.constraint = fixtures::random_product_constraint(space, rng);
    EXPECT_EQ(count_by_bucket_fast(space, p), count_by_bucket_bruteforce(space, p));
  }
}

TEST(Counts, UnsupportedShapeFallsBack) {
  const ScenarioSpace space = builtin_crosswalk_space();
  Profile p = *find_builtin_profile("profile-4");
  p.constraint = ConstraintExpr::any_of(
      {ConstraintExpr::all_of({ConstraintExpr::allow(1, ValueSet{0}), ConstraintExpr::allow(2, ValueSet{0})}),
       ConstraintExpr::allow(3, ValueSet{1})});
  EXPECT_FALSE(fast_counting_supported(space, p));
  EXPECT_FALSE(count_by_bucket_fast(space, p).has_value());
  EXPECT_THROW(tally(space, p, CountingMethod::kConvolution, false), std::invalid_argument);
  const Tally automatic = tally(space, p, CountingMethod::kAuto, true);
  EXPECT_EQ(automatic.counts, fixtures::oracle_counts(space, p));
  EXPECT_EQ(automatic.histograms, tally(space, p, CountingMethod::kSerial, true).histograms);
}

TEST(Counts, HistogramsAgreeAcrossKernels) {
  const ScenarioSpace space = builtin_crosswalk_space();
  for (const auto& p : builtin_profile_catalog()) {
    const Tally serial = tally(space, p, CountingMethod::kSerial, true);
    const Tally parallel = tally(space, p, CountingMethod::kParallel, true);
    const Tally conv = tally(space, p, CountingMethod::kConvolution, true);
    EXPECT_EQ(parallel.histograms, serial.histograms) << p.id;
    EXPECT_EQ(conv.histograms, serial.histograms) << p.id;
    // Each feature's row sums to the bucket's profile count.
    for (std::int64_t k = 0; k <= serial.counts.k_max; ++k) {
      for (std::size_t pos = 0; pos < space.feature_count(); ++pos) {
        std::uint64_t sum = 0;
        for (auto c : serial.histograms.row(k, pos)) sum += c;
        EXPECT_EQ(sum, serial.counts.profile[static_cast<std::size_t>(k)]);
      }
    }
  }
}

TEST(Counts, LargeSpaceWithoutEnumeration) {
  const ScenarioSpace space = fixtures::uniform_space(20, 6, 1);
  const Profile p = fixtures::unit_profile(space);
  const auto start = std::chrono::steady_clock::now();
  const auto counts = count_by_bucket_fast(space, p);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ASSERT_TRUE(counts.has_value());
  EXPECT_LT(seconds, 1.0);

  std::uint64_t six_pow_20 = 1;
  for (int i = 0; i < 20; ++i) six_pow_20 *= 6;
  EXPECT_EQ(six_pow_20, 3656158440062976ULL);
  EXPECT_EQ(counts->total_all(), six_pow_20);
  EXPECT_EQ(counts->total_profile(), six_pow_20);

  // Digit sums S of 20 base-6 digits; the score is S/100 and delta is 1/20, so k = round(S/5).
  std::vector<std::uint64_t> ways(101, 0);
  ways[0] = 1;
  for (int f = 0; f < 20; ++f) {
    std::vector<std::uint64_t> next(101, 0);
    for (int s = 0; s <= 100; ++s) {
      for (int d = 0; d < 6 && s + d <= 100; ++d) next[static_cast<std::size_t>(s + d)] += ways[static_cast<std::size_t>(s)];
    }
    ways = next;
  }
  Counts expected(21, 0);
  for (int s = 0; s <= 100; ++s) expected[static_cast<std::size_t>((2 * s + 5) / 10)] += ways[static_cast<std::size_t>(s)];
  EXPECT_EQ(counts->all, expected);
  for (std::size_t k = 0; k <= 20; ++k) EXPECT_EQ(counts->all[k], counts->all[20 - k]);
}

TEST(Counts, LargeSpaceWithConstraint) {
  const ScenarioSpace space = fixtures::uniform_space(20, 6, 4);
  Profile p = fixtures::unit_profile(space);
  p.weights[2] = 5;
  p.constraint = ConstraintExpr::all_of({ConstraintExpr::allow(1, ValueSet{0, 1}),
                                         ConstraintExpr::at_least_one({{2, ValueSet{5}}, {3, ValueSet{5}}})});
  const auto counts = count_by_bucket_fast(space, p);
  ASSERT_TRUE(counts.has_value());
  std::uint64_t six_pow_17 = 1;
  for (int i = 0; i < 17; ++i) six_pow_17 *= 6;
  // Feature 1 keeps 2 of 6 values; features 2 and 3 keep the 36 - 25 pairs with at least one 5.
  EXPECT_EQ(counts->total_profile(), six_pow_17 * 2 * 11);
}

TEST(Counts, MergeRejectsMismatch) {
  BucketCounts a(3), b(4);
  EXPECT_THROW(a.merge(b), std::invalid_argument);
}

TEST(Members, PaginationMatchesEnumeration) {
  const ScenarioSpace space = builtin_crosswalk_space();
  const Profile p = *find_builtin_profile("profile-3");
  const ScoreModel model(space, p);
  std::vector<Scenario> expected;
  for (const auto& s : enumerate(space, p.constraint)) {
    if (model.bucket(s.assignment) == 2) expected.push_back(s);
  }
  ASSERT_EQ(expected.size(), 96U);
  std::vector<Scenario> pages;
  for (std::uint64_t offset = 0;; offset += 25) {
    auto page = bucket_members(space, p, 2, offset, 25);
    pages.insert(pages.end(), page.begin(), page.end());
    if (page.size() < 25) break;
  }
  EXPECT_EQ(pages, expected);
  EXPECT_TRUE(bucket_members(space, p, 0, 0, 10).empty());
  EXPECT_TRUE(bucket_members(space, p, 2, 0, 0).empty());
  EXPECT_THROW(bucket_members(space, p, 7, 0, 10), std::out_of_range);
  EXPECT_THROW(bucket_members(space, p, -1, 0, 10), std::out_of_range);
}
