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

#ifndef EXPOSURE_LOOP_METRICS_H_
#define EXPOSURE_LOOP_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "exposure_loop/factorize.h"
#include "exposure_loop/ingest.h"
#include "exposure_loop/matrix.h"

namespace exposure_loop {

// Population Gini index of non-negative values, zeros included: with x sorted
// ascending, G = sum_i (2i - n - 1) x_i / (n sum x), i = 1..n.
// Throws std::invalid_argument for empty, all-zero, negative or non-finite
// input.
double gini(std::span<const double> values);
double gini(std::span<const std::uint64_t> values);

// 100 * reached / catalog_size. Throws std::invalid_argument if catalog_size
// is 0 or reached exceeds it.
double coverage(std::size_t reached, std::size_t catalog_size);
// Percentage of entries with reach >= 1.
double coverage(std::span<const std::uint64_t> reach);

// The (user, item) pairs recommended in one round.
struct RecommendationLog {
  std::vector<Cell> pairs;  // row = user, col = item
  std::size_t n_users = 0;
  std::size_t n_items = 0;

  // Throws std::invalid_argument for out-of-range or repeated pairs, or more
  // than max_per_user pairs for a user (0 disables the per-user bound).
  void validate(std::size_t max_per_user = 0) const;

  // Flattens per-user ranked lists in user order, then rank order.
  static RecommendationLog from_ranked(const std::vector<std::vector<ScoredItem>>& ranked,
                                       std::size_t n_items);
};

struct ExposureStats {
  std::vector<std::uint64_t> artist_user_reach;  // distinct users per artist
  std::vector<std::uint64_t> item_reach;         // distinct users per item
};

// A user recommended several tracks of one artist counts once for that
// artist. Throws CatalogError if a logged item has no catalog entry.
ExposureStats exposure_stats(const RecommendationLog& log, const IndexedCatalog& catalog);

struct WeightedPair {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  double weight = 1.0;
};

enum class ListenWeight { kBinary, kPlays };

// One pair per stored cell, weighted 1 (binary) or by play count.
std::vector<WeightedPair> listening_pairs(const SparseInteractionMatrix& matrix,
                                          ListenWeight mode);
std::vector<WeightedPair> recommendation_pairs(const RecommendationLog& log);

// Percentage of total pair weight that lands on each tag, indexed by the
// catalog's tag index. Items carry their full weight to every tag they have,
// so shares can sum above 100.
struct TagDistribution {
  std::vector<double> share_of;
};

// Throws std::invalid_argument if total weight is 0 or a weight is negative,
// CatalogError for items outside the catalog.
TagDistribution tag_distribution(std::span<const WeightedPair> pairs,
                                 const IndexedCatalog& catalog);

// Percentage of total pair weight per artist; shares sum to 100.
std::vector<double> artist_distribution(std::span<const WeightedPair> pairs,
                                        const IndexedCatalog& catalog);

// Total pair weight per tag and per artist, unnormalized.
std::vector<double> tag_mass(std::span<const WeightedPair> pairs, const IndexedCatalog& catalog);
std::vector<double> artist_mass(std::span<const WeightedPair> pairs,
                                const IndexedCatalog& catalog);

// Entity indices ordered by descending popularity, ties by ascending index.
std::vector<std::uint32_t> popularity_ranking(std::span<const double> popularity);

struct Bucket {
  std::size_t first_rank = 0;  // 1-based, inclusive
  std::size_t last_rank = 0;   // 1-based, inclusive
  double recommended = 0.0;    // mean share within the bucket
  double listened = 0.0;
};

struct BucketTable {
  std::vector<Bucket> buckets;
};

// Averages per-entity shares within popularity-rank buckets. `ranking` lists
// entity indices from most to least popular and fixes membership for both
// columns. With cut points b_1 < ... < b_m the buckets cover ranks 1..b_1,
// b_1+1..b_2, ..., b_m+1..n; the last bucket is omitted when b_m = n.
// Throws std::invalid_argument for mismatched sizes, a ranking that is not a
// permutation, or cut points that are not strictly increasing within 1..n.
BucketTable bucket_table(std::span<const double> recommended, std::span<const double> listened,
                         std::span<const std::uint32_t> ranking,
                         std::span<const std::size_t> boundaries);
// Ranks by the listened shares.
BucketTable bucket_table(std::span<const double> recommended, std::span<const double> listened,
                         std::span<const std::size_t> boundaries);

// Relative difference, in percent, between the recommended and listened mass
// of the tail (ranks > head_cutoff). Throws std::invalid_argument when the
// listened tail mass is 0.
double long_tail_delta(std::span<const double> recommended, std::span<const double> listened,
                       std::span<const std::uint32_t> ranking, std::size_t head_cutoff);
double long_tail_delta(std::span<const double> recommended, std::span<const double> listened,
                       std::size_t head_cutoff);

}  // namespace exposure_loop

#endif  // EXPOSURE_LOOP_METRICS_H_
