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

#ifndef EXPOSURE_LOOP_SIMULATE_H_
#define EXPOSURE_LOOP_SIMULATE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "exposure_loop/factorize.h"
#include "exposure_loop/ingest.h"
#include "exposure_loop/matrix.h"
#include "exposure_loop/metrics.h"

namespace exposure_loop {

struct LoopConfig {
  int n_iterations = 30;
  std::size_t n_recs = 10;
  Hyperparams hyper;
  // Reuse the previous iteration's factors and run warm_sweeps more sweeps;
  // otherwise every iteration trains from init_model with hyper.sweeps.
  bool warm_start = true;
  int warm_sweeps = 5;
  std::int64_t increment_delta = 1;
  std::vector<std::uint32_t> tracked_items;
  bool include_seen = false;
  unsigned threads = 1;

  // Throws std::invalid_argument for invalid settings or tracked items
  // outside [0, n_items).
  void validate(std::size_t n_items) const;
};

struct IterationRecord {
  int iteration = 0;  // 1-based
  double gini_artists = 0.0;
  double coverage_artists = 0.0;
  double coverage_items = 0.0;
  std::vector<std::uint64_t> tracked_reach;  // aligned with LoopTrace::tracked_items
  std::int64_t total_plays = 0;              // matrix sum after injection
  std::uint64_t n_pairs = 0;                 // recommendations injected
  std::uint64_t recs_digest = 0;             // digest() of the round's log

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct LoopTrace {
  std::vector<std::uint32_t> tracked_items;
  std::int64_t initial_total_plays = 0;
  std::vector<IterationRecord> records;

  friend bool operator==(const LoopTrace&, const LoopTrace&) = default;
};

// 64-bit FNV-1a over the log's (user, item) pairs in order.
std::uint64_t digest(const RecommendationLog& log);

// Closed feedback loop. Each step trains (warm or cold), recommends n_recs
// unseen items per user, measures exposure of that round, then adds
// increment_delta to every recommended cell.
class FeedbackLoop {
 public:
  // Throws std::invalid_argument if the matrix is empty or does not match
  // the catalog.
  FeedbackLoop(SparseInteractionMatrix matrix, const IndexedCatalog& catalog, LoopConfig config);

  // Continues after `trace.records.size()` completed iterations. `model` is the
  // model trained in the last completed iteration and `matrix` the state
  // after its injection.
  static FeedbackLoop resume(SparseInteractionMatrix matrix, const IndexedCatalog& catalog,
                             LoopConfig config, FactorModel model, LoopTrace trace);

  // Runs one iteration and returns its record. Throws std::logic_error when
  // all iterations are done.
  const IterationRecord& step();

  int completed() const { return static_cast<int>(trace_.records.size()); }
  bool done() const { return completed() >= config_.n_iterations; }

  const SparseInteractionMatrix& matrix() const { return matrix_; }
  const std::optional<FactorModel>& model() const { return model_; }
  const LoopTrace& trace() const { return trace_; }
  const LoopConfig& config() const { return config_; }
  // Ranked recommendations of the last completed step (empty before the first).
  const std::vector<std::vector<ScoredItem>>& last_recommendations() const { return last_recs_; }

 private:
  SparseInteractionMatrix matrix_;
  const IndexedCatalog* catalog_;
  LoopConfig config_;
  std::optional<FactorModel> model_;
  LoopTrace trace_;
  std::vector<std::vector<ScoredItem>> last_recs_;
};

LoopTrace run_loop(const SparseInteractionMatrix& matrix, const IndexedCatalog& catalog,
                   const LoopConfig& config);

// Reach of each requested item over the iterations. Throws
// std::invalid_argument for items that were not tracked.
std::vector<std::vector<std::uint64_t>> exposure_series(const LoopTrace& trace,
                                                        std::span<const std::uint32_t> items);

// Indices of the n items with the most plays (column sums), most played
// first, ties by ascending index. Returns fewer when the matrix has fewer
// columns.
std::vector<std::uint32_t> most_played_items(const SparseInteractionMatrix& matrix, std::size_t n);

// Checkpoints live in <dir>/iter_<t>/ as matrix.bin (after injection),
// model.bin (trained in iteration t), recs.csv (that round's ranked lists)
// and record.csv (the iteration record at full precision). record.csv is
// written last and marks the checkpoint complete.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_checkpoint(const std::filesystem::path& dir, const FeedbackLoop& loop);

// Highest t with a complete iter_<t> checkpoint, if any.
std::optional<int> latest_checkpoint(const std::filesystem::path& dir);

// Rebuilds the loop from the latest complete checkpoint and the records of
// iterations 1..t. Throws CheckpointError (or SnapshotError for corrupt
// binaries) when the checkpoint is missing, incomplete or does not match the
// catalog and configuration.
FeedbackLoop resume_from_checkpoint(const std::filesystem::path& dir,
                                    const IndexedCatalog& catalog, const LoopConfig& config);

struct CheckpointOptions {
  std::filesystem::path dir;
  bool resume = false;
  // Stop after this many completed iterations (0 = run to the end).
  int stop_after = 0;
};

// run_loop with a checkpoint after every iteration. With resume set, starts
// from the latest checkpoint in dir (or from scratch if there is none).
LoopTrace run_loop(const SparseInteractionMatrix& matrix, const IndexedCatalog& catalog,
                   const LoopConfig& config, const CheckpointOptions& checkpoints);

}  // namespace exposure_loop

#endif  // EXPOSURE_LOOP_SIMULATE_H_
