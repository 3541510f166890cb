// Copyright 2026 The exposure_loop Authors.
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

#include "exposure_loop/simulate.h"

#include <filesystem>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.h"

namespace exposure_loop {
namespace {

namespace fs = std::filesystem;
using testing::make_instance;
using testing::tiny_synth;

LoopConfig tiny_loop(int iterations, const SparseInteractionMatrix& m) {
  LoopConfig c;
  c.n_iterations = iterations;
  c.n_recs = 3;
  c.hyper.k = 4;
  c.hyper.sweeps = 3;
  c.hyper.seed = 17;
  c.warm_sweeps = 2;
  c.tracked_items = most_played_items(m, 2);
  return c;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("exposure_loop_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

TEST(LoopConfig, Validate) {
  LoopConfig c;
  c.validate(10);
  c.tracked_items = {10};
  EXPECT_THROW(c.validate(10), std::invalid_argument);
  c = {};
  c.n_iterations = 0;
  EXPECT_THROW(c.validate(10), std::invalid_argument);
  c = {};
  c.n_recs = 0;
  EXPECT_THROW(c.validate(10), std::invalid_argument);
  c = {};
  c.increment_delta = 0;
  EXPECT_THROW(c.validate(10), std::invalid_argument);
}

TEST(MostPlayedItems, OrdersByColumnSum) {
  const std::vector<IndexedTriplet> t = {{0, 0, 1}, {1, 0, 1}, {0, 1, 5}, {1, 2, 2}};
  const auto m = SparseInteractionMatrix::from_triplets(t, 2, 4);
  EXPECT_EQ(most_played_items(m, 3), (std::vector<std::uint32_t>{1, 0, 2}));
  EXPECT_EQ(most_played_items(m, 10).size(), 4u);
}

TEST(RunLoop, SingleIterationConservesPlays) {
  // Three users, four items.
  const std::vector<IndexedTriplet> t = {{0, 0, 2}, {1, 0, 1}, {1, 1, 3}, {2, 2, 1}};
  const auto m = SparseInteractionMatrix::from_triplets(t, 3, 4);
  IndexedCatalog catalog;
  catalog.artists = EntityIndex::from_names({"a", "b"});
  catalog.artist_of_item = {0, 0, 1, 1};
  catalog.tags_of_item.resize(4);
  auto config = tiny_loop(1, m);
  config.increment_delta = 2;
  FeedbackLoop loop(m, catalog, config);
  const auto record = loop.step();
  EXPECT_TRUE(loop.done());
  EXPECT_EQ(loop.trace().records.size(), 1u);
  EXPECT_EQ(record.iteration, 1);
  EXPECT_EQ(record.n_pairs, 8u);  // users 0 and 2 get three, user 1 only two unseen
  EXPECT_EQ(record.total_plays, m.total() + 2 * static_cast<std::int64_t>(record.n_pairs));
  EXPECT_EQ(loop.matrix().total(), record.total_plays);
  EXPECT_THROW(loop.step(), std::logic_error);
}

TEST(RunLoop, IncludeSeenWithOneItemRepeatsTheSameRecommendation) {
  const std::vector<IndexedTriplet> t = {{0, 0, 1}, {1, 0, 4}, {2, 0, 2}};
  const auto m = SparseInteractionMatrix::from_triplets(t, 3, 1);
  IndexedCatalog catalog;
  catalog.artists = EntityIndex::from_names({"a"});
  catalog.artist_of_item = {0};
  catalog.tags_of_item.resize(1);
  auto config = tiny_loop(4, m);
  config.include_seen = true;
  config.tracked_items = {0};
  const auto trace = run_loop(m, catalog, config);
  ASSERT_EQ(trace.records.size(), 4u);
  for (const auto& r : trace.records) {
    EXPECT_EQ(r.tracked_reach, (std::vector<std::uint64_t>{3}));
    EXPECT_EQ(r.n_pairs, 3u);
    EXPECT_EQ(r.coverage_items, 100.0);
  }
  EXPECT_EQ(trace.records.back().total_plays, m.total() + 12);

  config.include_seen = false;
  const auto excluded = run_loop(m, catalog, config);
  for (const auto& r : excluded.records) {
    EXPECT_EQ(r.n_pairs, 0u);
    EXPECT_EQ(r.gini_artists, 0.0);
  }
}

TEST(RunLoop, ConservationDeterminismAndBounds) {
  const auto inst = make_instance(tiny_synth());
  const auto config = tiny_loop(4, inst.matrix);
  const auto a = run_loop(inst.matrix, inst.catalog, config);
  const auto b = run_loop(inst.matrix, inst.catalog, config);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.records.size(), 4u);
  std::int64_t expected = inst.matrix.total();
  EXPECT_EQ(a.initial_total_plays, expected);
  for (std::size_t t = 0; t < a.records.size(); ++t) {
    const auto& r = a.records[t];
    EXPECT_EQ(r.iteration, static_cast<int>(t + 1));
    EXPECT_LE(r.n_pairs, inst.matrix.rows() * config.n_recs);
    expected += config.increment_delta * static_cast<std::int64_t>(r.n_pairs);
    EXPECT_EQ(r.total_plays, expected);
    for (auto reach : r.tracked_reach) EXPECT_LE(reach, inst.matrix.rows());
    EXPECT_GE(r.gini_artists, 0.0);
    EXPECT_LE(r.gini_artists, 1.0);
  }
}

TEST(RunLoop, ThreadCountDoesNotChangeTrace) {
  const auto inst = make_instance(tiny_synth());
  auto config = tiny_loop(3, inst.matrix);
  const auto one = run_loop(inst.matrix, inst.catalog, config);
  config.threads = 4;
  EXPECT_EQ(run_loop(inst.matrix, inst.catalog, config), one);
}

TEST(RunLoop, ColdRestartIsAlsoDeterministic) {
  const auto inst = make_instance(tiny_synth());
  auto config = tiny_loop(3, inst.matrix);
  config.warm_start = false;
  EXPECT_EQ(run_loop(inst.matrix, inst.catalog, config),
            run_loop(inst.matrix, inst.catalog, config));
}

TEST(RunLoop, SeenExclusionNeverRepeatsAPair) {
  const auto inst = make_instance(tiny_synth());
  const auto config = tiny_loop(5, inst.matrix);
  FeedbackLoop loop(inst.matrix, inst.catalog, config);
  std::set<std::pair<std::uint32_t, std::uint32_t>> recommended;
  while (!loop.done()) {
    loop.step();
    const auto& recs = loop.last_recommendations();
    for (std::uint32_t u = 0; u < recs.size(); ++u) {
      for (const auto& r : recs[u]) {
        EXPECT_EQ(inst.matrix.at(u, r.item), 0);
        EXPECT_TRUE(recommended.emplace(u, r.item).second);
      }
    }
  }
}

TEST(ExposureSeries, TrackedAndUntracked) {
  const auto inst = make_instance(tiny_synth());
  auto config = tiny_loop(3, inst.matrix);
  const auto trace = run_loop(inst.matrix, inst.catalog, config);
  const auto series = exposure_series(trace, config.tracked_items);
  ASSERT_EQ(series.size(), config.tracked_items.size());
  for (std::size_t j = 0; j < series.size(); ++j) {
    ASSERT_EQ(series[j].size(), 3u);
    for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(series[j][t], trace.records[t].tracked_reach[j]);
  }
  std::uint32_t untracked = 0;
  while (std::find(config.tracked_items.begin(), config.tracked_items.end(), untracked) !=
         config.tracked_items.end()) {
    ++untracked;
  }
  const std::vector<std::uint32_t> bad = {untracked};
  EXPECT_THROW(exposure_series(trace, bad), std::invalid_argument);
}

TEST(ExposureSeries, NeverRecommendedItemIsAllZero) {
  // Item 1 is seen by every user, so seen-exclusion never recommends it.
  const std::vector<IndexedTriplet> t = {{0, 1, 3}, {1, 1, 1}, {0, 0, 1}, {1, 2, 2}};
  const auto m = SparseInteractionMatrix::from_triplets(t, 2, 4);
  IndexedCatalog catalog;
  catalog.artists = EntityIndex::from_names({"a", "b"});
  catalog.artist_of_item = {0, 1, 0, 1};
  catalog.tags_of_item.resize(4);
  auto config = tiny_loop(3, m);
  config.tracked_items = {1};
  const auto trace = run_loop(m, catalog, config);
  const std::vector<std::uint32_t> items = {1};
  EXPECT_EQ(exposure_series(trace, items), (std::vector<std::vector<std::uint64_t>>{{0, 0, 0}}));
}

TEST(Digest, DependsOnPairOrderAndContent) {
  RecommendationLog a;
  a.n_users = 2;
  a.n_items = 2;
  a.pairs = {{0, 1}, {1, 0}};
  auto b = a;
  std::swap(b.pairs[0], b.pairs[1]);
  EXPECT_NE(digest(a), digest(b));
  EXPECT_EQ(digest(a), digest(a));
}

TEST(Checkpoint, ResumeEqualsUninterruptedRun) {
  TempDir tmp;
  const auto inst = make_instance(tiny_synth());
  const auto config = tiny_loop(5, inst.matrix);
  const auto full = run_loop(inst.matrix, inst.catalog, config);

  CheckpointOptions opts{tmp.path(), false, 2};
  const auto partial = run_loop(inst.matrix, inst.catalog, config, opts);
  EXPECT_EQ(partial.records.size(), 2u);
  EXPECT_EQ(latest_checkpoint(tmp.path()), 2);
  for (const char* f : {"matrix.bin", "model.bin", "recs.csv", "record.csv"}) {
    EXPECT_TRUE(fs::exists(tmp.path() / "iter_2" / f)) << f;
  }

  opts.resume = true;
  opts.stop_after = 0;
  EXPECT_EQ(run_loop(inst.matrix, inst.catalog, config, opts), full);
  EXPECT_EQ(latest_checkpoint(tmp.path()), 5);
}

TEST(Checkpoint, ResumeWithoutCheckpointStartsFresh) {
  TempDir tmp;
  const auto inst = make_instance(tiny_synth());
  const auto config = tiny_loop(2, inst.matrix);
  CheckpointOptions opts{tmp.path(), true, 0};
  EXPECT_EQ(run_loop(inst.matrix, inst.catalog, config, opts),
            run_loop(inst.matrix, inst.catalog, config));
}

TEST(Checkpoint, IncompleteCheckpointIsIgnored) {
  TempDir tmp;
  const auto inst = make_instance(tiny_synth());
  const auto config = tiny_loop(3, inst.matrix);
  CheckpointOptions opts{tmp.path(), false, 2};
  run_loop(inst.matrix, inst.catalog, config, opts);
  fs::remove(tmp.path() / "iter_2" / "record.csv");
  EXPECT_EQ(latest_checkpoint(tmp.path()), 1);
}

TEST(Checkpoint, CorruptSnapshotIsReported) {
  TempDir tmp;
  const auto inst = make_instance(tiny_synth());
  const auto config = tiny_loop(3, inst.matrix);
  run_loop(inst.matrix, inst.catalog, config, CheckpointOptions{tmp.path(), false, 1});
  {
    std::ofstream out(tmp.path() / "iter_1" / "matrix.bin", std::ios::binary | std::ios::trunc);
    out << "JUNKJUNK";
  }
  EXPECT_THROW(resume_from_checkpoint(tmp.path(), inst.catalog, config), SnapshotError);
}

TEST(Checkpoint, MismatchedConfigurationIsRejected) {
  TempDir tmp;
  const auto inst = make_instance(tiny_synth());
  const auto config = tiny_loop(3, inst.matrix);
  run_loop(inst.matrix, inst.catalog, config, CheckpointOptions{tmp.path(), false, 1});
  auto other = config;
  other.hyper.k = 5;
  EXPECT_THROW(resume_from_checkpoint(tmp.path(), inst.catalog, other), CheckpointError);
  other = config;
  other.tracked_items = {0};
  EXPECT_THROW(resume_from_checkpoint(tmp.path(), inst.catalog, other), CheckpointError);

  const auto different = make_instance(tiny_synth(4));
  EXPECT_THROW(run_loop(different.matrix, different.catalog, config,
                        CheckpointOptions{tmp.path(), true, 0}),
               CheckpointError);
}

TEST(Checkpoint, MissingDirectory) {
  const auto inst = make_instance(tiny_synth());
  const auto config = tiny_loop(3, inst.matrix);
  EXPECT_FALSE(latest_checkpoint("/nonexistent/exposure_loop").has_value());
  EXPECT_THROW(resume_from_checkpoint("/nonexistent/exposure_loop", inst.catalog, config),
               CheckpointError);
}

}  // namespace
}  // namespace exposure_loop
