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

#include "unicity/io.hpp"

#include <gtest/gtest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "test_util.hpp"
#include "unicity/synthgen.hpp"

namespace unicity {
namespace {

class TempDir : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("unicity_io_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& content) {
        const auto p = path(name);
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p;
    }

    std::filesystem::path dir_;
};

using IoTest = TempDir;

TEST_F(IoTest, ReadsPlainEventFile) {
    const auto p = write("events.csv", "1,10,0\n2,20,0\n2,30,1\n");
    ReadStats stats;
    const auto events = read_events(p, stats);
    ASSERT_EQ(events.size(), 3u);
    EXPECT_EQ(stats.records, 3u);
    EXPECT_EQ(stats.malformed, 0u);
    EXPECT_FALSE(stats.header_skipped);
    EXPECT_EQ(events[2].user, 2u);
    EXPECT_EQ(events[2].item, 30u);
    EXPECT_EQ(events[2].period, 1u);
}

TEST_F(IoTest, DetectsHeaderByNonNumericFirstField) {
    const auto p = write("events.csv", "user_id,item_id,period_index\n1,10,0\n");
    ReadStats stats;
    const auto events = read_events(p, stats);
    EXPECT_TRUE(stats.header_skipped);
    EXPECT_EQ(stats.malformed, 0u);
    ASSERT_EQ(events.size(), 1u);
}

TEST_F(IoTest, CountsMalformedLines) {
    const auto p = write("events.csv", "1,10,0\ngarbage line\n2,x,0\n3,30\n4,40,0,9\n5,50,1\n");
    ReadStats stats;
    const auto events = read_events(p, stats);
    EXPECT_EQ(events.size(), 2u);
    EXPECT_EQ(stats.malformed, 4u);
}

TEST_F(IoTest, RejectsOutOfRangePeriodsWhenDeclared) {
    const auto p = write("events.csv", "1,10,0\n1,11,7\n");
    ReadStats stats;
    const auto events = read_events(p, stats, 3);
    EXPECT_EQ(events.size(), 1u);
    EXPECT_EQ(stats.bad_period, 1u);
}

TEST_F(IoTest, HandlesCrLf) {
    const auto p = write("events.csv", "1,10,0\r\n2,20,0\r\n");
    ReadStats stats;
    const auto events = read_events(p, stats);
    EXPECT_EQ(events.size(), 2u);
    EXPECT_EQ(stats.malformed, 0u);
}

TEST_F(IoTest, MissingFileThrows) {
    ReadStats stats;
    EXPECT_THROW(read_events(path("nope.csv"), stats), DataError);
    EXPECT_THROW(read_exclusions(path("nope.txt")), DataError);
}

TEST_F(IoTest, ExclusionList) {
    const auto p = write("excl.txt", "10\n\n30\n");
    const auto excl = read_exclusions(p);
    EXPECT_EQ(excl.size(), 2u);
    EXPECT_TRUE(excl.count(10));
    EXPECT_TRUE(excl.count(30));
    const auto bad = write("bad.txt", "10\nnot_an_id\n");
    EXPECT_THROW(read_exclusions(bad), DataError);
}

TEST_F(IoTest, EventRoundTripThroughText) {
    const auto t1 = testing::d0_tensor();
    const auto p = path("d0.csv");
    write_events(t1, p);
    ReadStats stats;
    auto events = read_events(p, stats);
    EXPECT_TRUE(stats.header_skipped);
    const auto t2 = build_tensor(std::move(events), {}, 1);
    EXPECT_EQ(t1.user_ids(), t2.user_ids());
    EXPECT_EQ(t1.item_ids(), t2.item_ids());
}

TEST_F(IoTest, BinaryCacheRoundTrip) {
    GeneratorConfig config;
    config.users = 120;
    config.catalog = 300;
    config.periods = 3;
    config.mean_items = 6;
    config.churn = 0.2;
    config.seed = 71;
    const auto t1 = generate(config);
    const auto p = path("data.unic");
    save_dataset(t1, p);
    EXPECT_TRUE(is_dataset_cache(p));
    const auto t2 = load_dataset(p);
    EXPECT_EQ(t1.user_ids(), t2.user_ids());
    EXPECT_EQ(t1.item_ids(), t2.item_ids());
    EXPECT_EQ(t1.catalog_size(), t2.catalog_size());
    EXPECT_EQ(t1.min_items_per_period(), t2.min_items_per_period());
    for (PeriodIndex pd = 0; pd < 3; ++pd) {
        EXPECT_EQ(t1.period_data(pd).items, t2.period_data(pd).items);
        EXPECT_EQ(t1.period_data(pd).users, t2.period_data(pd).users);
    }
}

TEST_F(IoTest, BinaryCacheIsByteDeterministic) {
    const auto t = testing::d0_tensor();
    const auto p1 = path("a.unic");
    const auto p2 = path("b.unic");
    save_dataset(t, p1);
    save_dataset(t, p2);
    EXPECT_EQ(file_digest(p1), file_digest(p2));
}

TEST_F(IoTest, CacheRejectsGarbageAndWrongVersion) {
    const auto garbage = write("g.unic", "this is not a cache");
    EXPECT_FALSE(is_dataset_cache(garbage));
    EXPECT_THROW(load_dataset(garbage), DataError);

    const auto t = testing::d0_tensor();
    const auto p = path("v.unic");
    save_dataset(t, p);
    // flip the version byte
    std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    f.put(static_cast<char>(9));
    f.close();
    EXPECT_THROW(load_dataset(p), DataError);

    // truncated file
    const auto trunc = path("t.unic");
    std::ifstream in(p, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ofstream out(trunc, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();
    EXPECT_THROW(load_dataset(trunc), DataError);
}

TEST_F(IoTest, DigestDiffersOnDifferentContent) {
    const auto p1 = write("x.txt", "alpha");
    const auto p2 = write("y.txt", "beta");
    EXPECT_NE(file_digest(p1), file_digest(p2));
    EXPECT_EQ(file_digest(p1).size(), 16u);
}

}  // namespace
}  // namespace unicity
