// Copyright 2026 The Unicity Authors
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

#include "unicity/match_index.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "unicity/rng.hpp"
#include "unicity/synthgen.hpp"

namespace unicity {
namespace {

using testing::kA;
using testing::kB;
using testing::kC;
using testing::kD;

std::vector<ItemIdx> dense(const FingerprintTensor& t, std::initializer_list<ItemId> ids) {
    std::vector<ItemIdx> out;
    for (const ItemId id : ids) out.push_back(*t.find_item(id));
    return out;
}

TEST(MatchIndex, D0BruteForceCounts) {
    const auto t = testing::d0_tensor();
    const auto idx = MatchIndex::build(t, {0, 0});
    EXPECT_EQ(idx.match_count(dense(t, {kA})), 3u);
    EXPECT_EQ(idx.match_count(dense(t, {kA, kB})), 2u);  // u1, u3
    EXPECT_EQ(idx.match_count(dense(t, {kD})), 1u);
    EXPECT_EQ(idx.match_count(dense(t, {kB, kC})), 1u);  // u3 only
    EXPECT_EQ(idx.match_count(dense(t, {kA, kB, kC})), 1u);
}

TEST(MatchIndex, D0Uniqueness) {
    const auto t = testing::d0_tensor();
    const auto idx = MatchIndex::build(t, {0, 0});
    EXPECT_TRUE(idx.is_unique(dense(t, {kD})));
    EXPECT_FALSE(idx.is_unique(dense(t, {kA, kB})));
    EXPECT_TRUE(idx.is_unique(dense(t, {kB, kC})));
}

TEST(MatchIndex, EmptyQueryThrows) {
    const auto t = testing::d0_tensor();
    const auto idx = MatchIndex::build(t, {0, 0});
    EXPECT_THROW(idx.match_count({}), UsageError);
}

TEST(MatchIndex, PostingSizesEqualPopularity) {
    // cross-structure consistency: |postings[i]| == popularity counts[i]
    GeneratorConfig config;
    config.users = 400;
    config.catalog = 300;
    config.periods = 3;
    config.mean_items = 7;
    config.churn = 0.3;
    config.seed = 21;
    const auto t = generate(config);
    for (const PeriodRange w : {PeriodRange{0, 0}, PeriodRange{0, 2}, PeriodRange{1, 2}}) {
        const auto idx = MatchIndex::build(t, w);
        const auto pop = popularity(t, w);
        for (ItemIdx i = 0; i < t.num_items(); ++i)
            ASSERT_EQ(idx.posting_size(i), pop.count(i)) << "item " << i;
    }
}

TEST(MatchIndex, PopulationMatchesWindowPresence) {
    const auto t = testing::d0_tensor();
    const auto idx = MatchIndex::build(t, {0, 0});
    EXPECT_EQ(idx.population_size(), 4u);
}

TEST(MatchIndex, AgreesWithScanOracleOnRandomQueries) {
    GeneratorConfig config;
    config.users = 250;
    config.catalog = 150;
    config.periods = 2;
    config.mean_items = 6;
    config.churn = 0.2;
    config.seed = 33;
    const auto t = generate(config);
    const PeriodRange w{0, 1};
    const auto idx = MatchIndex::build(t, w);
    const testing::ScanOracle oracle(t, w);

    auto rng = derive_stream(99, 1);
    for (int rep = 0; rep < 500; ++rep) {
        const UserIdx u = static_cast<UserIdx>(rng.below(t.num_users()));
        const auto fp = t.window_items(u, w);
        ASSERT_FALSE(fp.empty());
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(fp.size(), 5));
        std::vector<ItemIdx> q(fp.begin(), fp.end());
        for (std::size_t i = 0; i < k; ++i)
            std::swap(q[i], q[i + rng.below(q.size() - i)]);
        q.resize(k);
        EXPECT_EQ(idx.match_count(q), oracle.match_count(q));
        EXPECT_EQ(idx.is_unique(q), oracle.is_unique(q));
    }
}

TEST(MatchIndex, SupersetShrinkage) {
    // q1 ⊆ q2 implies match_count(q2) <= match_count(q1)
    const auto t = testing::d0_tensor();
    const auto idx = MatchIndex::build(t, {0, 0});
    const auto q1 = dense(t, {kA});
    const auto q2 = dense(t, {kA, kC});
    EXPECT_LE(idx.match_count(q2), idx.match_count(q1));
}

TEST(MatchIndex, SubsetBuildRestrictsPopulationAndPostings) {
    const auto t = testing::d0_tensor();
    // subsample = {u1, u3} (dense 0 and 2)
    const std::vector<UserIdx> subset{*t.find_user(testing::kU1), *t.find_user(testing::kU3)};
    const auto idx = MatchIndex::build_subset(t, {0, 0}, subset);
    EXPECT_EQ(idx.population_size(), 2u);
    EXPECT_EQ(idx.match_count(dense(t, {kA})), 2u);   // u2 gone
    EXPECT_EQ(idx.match_count(dense(t, {kD})), 0u);   // u4 gone
    EXPECT_TRUE(idx.is_unique(dense(t, {kC})));       // only u3 now
}

TEST(MatchIndex, SubsetCountsNeverExceedFull) {
    GeneratorConfig config;
    config.users = 200;
    config.catalog = 120;
    config.periods = 1;
    config.mean_items = 5;
    config.seed = 5;
    const auto t = generate(config);
    const auto full = MatchIndex::build(t, {0, 0});
    auto rng = derive_stream(3, 3);
    const auto picks = sample_without_replacement(t.num_users(), 80, rng);
    const std::vector<UserIdx> subset(picks.begin(), picks.end());
    const auto sub = MatchIndex::build_subset(t, {0, 0}, subset);
    for (int rep = 0; rep < 200; ++rep) {
        const UserIdx u = static_cast<UserIdx>(rng.below(t.num_users()));
        const auto fp = t.window_items(u, {0, 0});
        std::vector<ItemIdx> q(fp.begin(), fp.begin() + 1 + rng.below(std::min<std::size_t>(fp.size(), 3)));
        EXPECT_LE(sub.match_count(q), full.match_count(q));
    }
}

}  // namespace
}  // namespace unicity
