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

#include "exposure_loop/analysis.h"

#include <stdexcept>
#include <string>

namespace exposure_loop {

namespace {

// Distinct users per entity in the listening data.
ExposureStats listening_reach(const SparseInteractionMatrix& matrix,
                              const IndexedCatalog& catalog) {
  RecommendationLog log;
  log.n_users = matrix.rows();
  log.n_items = matrix.cols();
  for (const auto& t : matrix.to_triplets()) log.pairs.push_back({t.row, t.col});
  return exposure_stats(log, catalog);
}

EntityComparison compare(std::vector<double> recommended, std::vector<double> listened,
                         const std::vector<double>& play_mass,
                         const std::vector<std::size_t>& boundaries, std::size_t head_cutoff,
                         const char* what) {
  EntityComparison c;
  c.recommended = std::move(recommended);
  c.listened = std::move(listened);
  c.ranking = popularity_ranking(play_mass);
  c.buckets = bucket_table(c.recommended, c.listened, c.ranking, boundaries);
  if (head_cutoff >= c.listened.size()) {
    throw std::invalid_argument(std::string("head cutoff leaves no ") + what + " in the tail");
  }
  c.long_tail_delta = long_tail_delta(c.recommended, c.listened, c.ranking, head_cutoff);
  return c;
}

}  // namespace

AnalysisReport analyze(const SparseInteractionMatrix& matrix, const IndexedCatalog& catalog,
                       const FactorModel& model, const AnalysisOptions& options) {
  if (matrix.cols() != catalog.n_items()) {
    throw std::invalid_argument("matrix and catalog disagree on the number of items");
  }
  const auto ranked =
      recommend_all(model, matrix, options.n_recs, options.include_seen, options.threads);
  const RecommendationLog log = RecommendationLog::from_ranked(ranked, matrix.cols());
  const ExposureStats recommended = exposure_stats(log, catalog);
  const ExposureStats listened = listening_reach(matrix, catalog);

  AnalysisReport report;
  report.n_pairs = log.pairs.size();
  report.head_cutoff = options.head_cutoff;
  report.gini_artists_recommended = gini(std::span<const std::uint64_t>(recommended.artist_user_reach));
  report.gini_items_recommended = gini(std::span<const std::uint64_t>(recommended.item_reach));
  report.gini_artists_listened = gini(std::span<const std::uint64_t>(listened.artist_user_reach));
  report.gini_items_listened = gini(std::span<const std::uint64_t>(listened.item_reach));
  report.coverage_artists = coverage(std::span<const std::uint64_t>(recommended.artist_user_reach));
  report.coverage_items = coverage(std::span<const std::uint64_t>(recommended.item_reach));

  const auto rec_pairs = recommendation_pairs(log);
  const auto listen_pairs = listening_pairs(matrix, options.listen_weight);
  const auto play_pairs = listening_pairs(matrix, ListenWeight::kPlays);

  report.tags = compare(tag_distribution(rec_pairs, catalog).share_of,
                        tag_distribution(listen_pairs, catalog).share_of,
                        tag_mass(play_pairs, catalog), options.tag_boundaries,
                        options.head_cutoff, "tags");
  report.artists = compare(artist_distribution(rec_pairs, catalog),
                           artist_distribution(listen_pairs, catalog),
                           artist_mass(play_pairs, catalog), options.artist_boundaries,
                           options.head_cutoff, "artists");
  return report;
}

}  // namespace exposure_loop
