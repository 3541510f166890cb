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

#ifndef EXPOSURE_LOOP_ANALYSIS_H_
#define EXPOSURE_LOOP_ANALYSIS_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "exposure_loop/factorize.h"
#include "exposure_loop/ingest.h"
#include "exposure_loop/matrix.h"
#include "exposure_loop/metrics.h"

namespace exposure_loop {

struct AnalysisOptions {
  std::size_t n_recs = 10;
  bool include_seen = false;
  ListenWeight listen_weight = ListenWeight::kBinary;
  std::vector<std::size_t> tag_boundaries = {5};
  std::vector<std::size_t> artist_boundaries = {5};
  std::size_t head_cutoff = 5;
  unsigned threads = 1;
};

// Distributions of one entity kind (tags or artists). Every vector is
// indexed by the catalog's entity index; `ranking` orders entities by
// listened play counts, most played first.
struct EntityComparison {
  std::vector<double> recommended;  // percent of recommendation weight
  std::vector<double> listened;     // percent of listening weight
  std::vector<std::uint32_t> ranking;
  BucketTable buckets;
  double long_tail_delta = 0.0;
};

// One-shot comparison of a model's recommendations with listening behavior.
struct AnalysisReport {
  double gini_artists_recommended = 0.0;
  double gini_items_recommended = 0.0;
  double gini_artists_listened = 0.0;
  double gini_items_listened = 0.0;
  double coverage_artists = 0.0;
  double coverage_items = 0.0;
  std::uint64_t n_pairs = 0;
  std::size_t head_cutoff = 0;
  EntityComparison tags;
  EntityComparison artists;
};

// Recommends top-n for every user with `model` and compares the round with
// the listening data in `matrix`. Throws std::invalid_argument when a bucket
// boundary or the head cutoff does not fit the tag or artist universe.
AnalysisReport analyze(const SparseInteractionMatrix& matrix, const IndexedCatalog& catalog,
                       const FactorModel& model, const AnalysisOptions& options);

}  // namespace exposure_loop

#endif  // EXPOSURE_LOOP_ANALYSIS_H_
