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

#include "unicity/tensor.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "unicity/synthgen.hpp"

namespace unicity {
namespace {

using testing::kA;
using testing::kB;
using testing::kC;
using testing::kD;
using testing::kU1;
using testing::kU2;
using testing::kU3;
using testing::kU4;

TEST(BuildTensor, CollapsesDuplicates) {
    // {(u1,a,0),(u1,a,0),(u1,b,0),(u1,c,0)} with min=3 keeps u1 = {a,b,c}
    std::vector<Event> events{{kU1, kA, 0}, {kU1, kA, 0}, {kU1, kB, 0}, {kU1, kC, 0}};
    BuildStats stats;
    const auto t = build_tensor(events, {}, 3, 0, &stats);
    EXPECT_EQ(stats.duplicates, 1u);
    ASSERT_EQ(t.num_users(), 1u);
    const auto fp = window_fingerprint(t, kU1, {0, 0});
    EXPECT_EQ(fp.items, (std::vector<ItemId>{kA, kB, kC}));
}

TEST(BuildTensor, DropsUsersBelowThreshold) {
    std::vector<Event> events{{kU1, kA, 0}, {kU1, kB, 0}, {kU2, kA, 0}, {kU2, kB, 0}, {kU2, kC, 0}};
    BuildStats stats;
    const auto t = build_tensor(events, {}, 3, 0, &stats);
    EXPECT_EQ(stats.below_threshold, 2u);
    EXPECT_EQ(t.num_users(), 1u);
    EXPECT_FALSE(t.find_user(kU1).has_value());
    EXPECT_TRUE(t.find_user(kU2).has_value());
}

TEST(BuildTensor, ExclusionAppliedBeforeThreshold) {
    // u1 = {a,b,v}, v excluded, min=2 -> u1 stays with {a,b}
    const ItemId vendor = 99;
    std::vector<Event> events{{kU1, kA, 0}, {kU1, kB, 0}, {kU1, vendor, 0}};
    BuildStats stats;
    const auto t = build_tensor(events, {vendor}, 2, 0, &stats);
    EXPECT_EQ(stats.excluded, 1u);
    const auto fp = window_fingerprint(t, kU1, {0, 0});
    EXPECT_EQ(fp.items, (std::vector<ItemId>{kA, kB}));
    EXPECT_FALSE(t.find_item(vendor).has_value());
}

TEST(BuildTensor, EmptyResultThrows) {
    std::vector<Event> events{{kU1, kA, 0}, {kU1, kB, 0}};
    EXPECT_THROW(build_tensor(events, {}, 3), DataError);
    EXPECT_THROW(build_tensor({}, {}, 3), DataError);
}

TEST(BuildTensor, RejectsPeriodOutsideDeclaredRange) {
    std::vector<Event> events{{kU1, kA, 5}, {kU1, kB, 5}, {kU1, kC, 5}};
    EXPECT_THROW(build_tensor(events, {}, 3, 3), DataError);
    EXPECT_NO_THROW(build_tensor(events, {}, 3, 6));
}

TEST(BuildTensor, IdempotentOnOwnOutput) {
    const auto t1 = testing::d0_tensor();
    std::vector<Event> replay;
    t1.for_each_event([&replay](UserId u, ItemId i, PeriodIndex p) {
        replay.push_back({u, i, p});
    });
    const auto t2 = build_tensor(replay, {}, t1.min_items_per_period());
    EXPECT_EQ(t1.user_ids(), t2.user_ids());
    EXPECT_EQ(t1.item_ids(), t2.item_ids());
    std::vector<Event> replay2;
    t2.for_each_event([&replay2](UserId u, ItemId i, PeriodIndex p) {
        replay2.push_back({u, i, p});
    });
    ASSERT_EQ(replay.size(), replay2.size());
    for (std::size_t k = 0; k < replay.size(); ++k) {
        EXPECT_EQ(replay[k].user, replay2[k].user);
        EXPECT_EQ(replay[k].item, replay2[k].item);
        EXPECT_EQ(replay[k].period, replay2[k].period);
    }
}

TEST(WindowFingerprint, UnionAcrossPeriods) {
    // u1: period0 {a,b,c}, period1 {b,c,d} -> window union {a,b,c,d}
    std::vector<Event> events{{kU1, kA, 0}, {kU1, kB, 0}, {kU1, kC, 0},
                              {kU1, kB, 1}, {kU1, kC, 1}, {kU1, kD, 1}};
    const auto t = build_tensor(events, {}, 3);
    EXPECT_EQ(window_fingerprint(t, kU1, {0, 1}).items, (std::vector<ItemId>{kA, kB, kC, kD}));
    EXPECT_EQ(window_fingerprint(t, kU1, {0, 0}).items, (std::vector<ItemId>{kA, kB, kC}));
    EXPECT_EQ(window_fingerprint(t, kU1, {1, 1}).items, (std::vector<ItemId>{kB, kC, kD}));
}

TEST(WindowFingerprint, IdempotentWhenPeriodsRepeat) {
    std::vector<Event> events{{kU1, kA, 0}, {kU1, kB, 0}, {kU1, kC, 0},
                              {kU1, kA, 1}, {kU1, kB, 1}, {kU1, kC, 1}};
    const auto t = build_tensor(events, {}, 3);
    EXPECT_EQ(window_fingerprint(t, kU1, {0, 1}).items, (std::vector<ItemId>{kA, kB, kC}));
}

TEST(WindowFingerprint, AbsentUserThrows) {
    const auto t = testing::d0_tensor();
    EXPECT_THROW(window_fingerprint(t, 777, {0, 0}), DataError);
}

TEST(WindowFingerprint, MonotoneInWindow) {
    // fingerprints can only grow as the window widens
    GeneratorConfig config;
    config.users = 50;
    config.catalog = 200;
    config.periods = 4;
    config.mean_items = 6;
    config.churn = 0.4;
    config.seed = 7;
    const auto t = generate(config);
    for (UserIdx u = 0; u < t.num_users(); ++u) {
        std::vector<ItemIdx> prev;
        for (PeriodIndex last = 0; last < t.num_periods(); ++last) {
            const auto cur = t.window_items(u, {0, last});
            EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
            prev = cur;
        }
    }
}

TEST(Popularity, MatchesHandEnumerationOnD0) {
    const auto t = testing::d0_tensor();
    const auto pop = popularity(t, {0, 0});
    EXPECT_EQ(pop.count(*t.find_item(kA)), 3u);
    EXPECT_EQ(pop.count(*t.find_item(kB)), 2u);
    EXPECT_EQ(pop.count(*t.find_item(kC)), 2u);
    EXPECT_EQ(pop.count(*t.find_item(kD)), 1u);
}

TEST(Popularity, SingleUserSingleItem) {
    std::vector<Event> events{{kU1, kA, 0}};
    const auto t = build_tensor(events, {}, 1);
    const auto pop = popularity(t, {0, 0});
    EXPECT_EQ(pop.count(*t.find_item(kA)), 1u);
    EXPECT_EQ(pop.total(), 1u);
}

TEST(Popularity, DoubleCountingIdentityOnD0) {
    // sum of fingerprint sizes == sum of popularity counts (2+2+3+1 = 8)
    const auto t = testing::d0_tensor();
    const auto pop = popularity(t, {0, 0});
    std::uint64_t fp_total = 0;
    for (UserIdx u = 0; u < t.num_users(); ++u) fp_total += t.window_items(u, {0, 0}).size();
    EXPECT_EQ(fp_total, 8u);
    EXPECT_EQ(pop.total(), fp_total);
}

TEST(Popularity, DoubleCountingIdentityOnGenerated) {
    GeneratorConfig config;
    config.users = 300;
    config.catalog = 500;
    config.periods = 3;
    config.mean_items = 8;
    config.seed = 11;
    const auto t = generate(config);
    for (const PeriodRange w : {PeriodRange{0, 0}, PeriodRange{1, 2}, PeriodRange{0, 2}}) {
        const auto pop = popularity(t, w);
        std::uint64_t fp_total = 0;
        for (UserIdx u = 0; u < t.num_users(); ++u) fp_total += t.window_items(u, w).size();
        EXPECT_EQ(pop.total(), fp_total);
    }
}

TEST(Popularity, AgreesWithScanOracle) {
    const auto t = testing::d0_tensor();
    const testing::ScanOracle oracle(t, {0, 0});
    const auto pop = popularity(t, {0, 0});
    for (const auto& [item, count] : oracle.popularity()) EXPECT_EQ(pop.count(item), count);
}

}  // namespace
}  // namespace unicity
