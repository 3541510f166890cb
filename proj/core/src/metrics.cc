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

#include "exposure_loop/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace exposure_loop {

namespace {

void check_item(const IndexedCatalog& catalog, std::uint32_t item) {
  if (item >= catalog.n_items()) {
    throw CatalogError("item index " + std::to_string(item) + " has no catalog entry");
  }
}

double total_weight(std::span<const WeightedPair> pairs) {
  double total = 0.0;
  for (const auto& p : pairs) {
    if (!(p.weight >= 0.0) || !std::isfinite(p.weight)) {
      throw std::invalid_argument("pair weights must be finite and >= 0");
    }
    total += p.weight;
  }
  return total;
}

std::vector<double> to_percent(std::vector<double> mass, double total) {
  if (!(total > 0.0)) throw std::invalid_argument("total pair weight is 0");
  for (auto& m : mass) m = 100.0 * m / total;
  return mass;
}

void check_ranking(std::span<const std::uint32_t> ranking, std::size_t n) {
  if (ranking.size() != n) throw std::invalid_argument("ranking size does not match the universe");
  std::vector<char> seen(n, 0);
  for (auto e : ranking) {
    if (e >= n || seen[e]) throw std::invalid_argument("ranking is not a permutation");
    seen[e] = 1;
  }
}

}  // namespace

double gini(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("gini of an empty list");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("gini requires finite non-negative values");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double sum = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    sum += sorted[i];
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * sorted[i];
  }
  if (sum == 0.0) throw std::invalid_argument("gini of an all-zero list");
  return weighted / (n * sum);
}

double gini(std::span<const std::uint64_t> values) {
  std::vector<double> v(values.begin(), values.end());
  return gini(std::span<const double>(v));
}

double coverage(std::size_t reached, std::size_t catalog_size) {
  if (catalog_size == 0) throw std::invalid_argument("coverage of an empty catalog");
  if (reached > catalog_size) throw std::invalid_argument("reached set larger than the catalog");
  return 100.0 * static_cast<double>(reached) / static_cast<double>(catalog_size);
}

double coverage(std::span<const std::uint64_t> reach) {
  const auto reached = static_cast<std::size_t>(
      std::count_if(reach.begin(), reach.end(), [](std::uint64_t r) { return r >= 1; }));
  return coverage(reached, reach.size());
}

void RecommendationLog::validate(std::size_t max_per_user) const {
  std::vector<Cell> sorted = pairs;
  for (const auto& p : sorted) {
    if (p.row >= n_users || p.col >= n_items) {
      throw std::invalid_argument("recommendation pair out of range");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("recommendation pairs are not unique");
  }
  if (max_per_user == 0) return;
  std::size_t run = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    run = (k > 0 && sorted[k].row == sorted[k - 1].row) ? run + 1 : 1;
    if (run > max_per_user) {
      throw std::invalid_argument("user " + std::to_string(sorted[k].row) + " has more than " +
                                  std::to_string(max_per_user) + " recommendations");
    }
  }
}

RecommendationLog RecommendationLog::from_ranked(
    const std::vector<std::vector<ScoredItem>>& ranked, std::size_t n_items) {
  RecommendationLog log;
  log.n_users = ranked.size();
  log.n_items = n_items;
  for (std::size_t u = 0; u < ranked.size(); ++u) {
    for (const auto& s : ranked[u]) log.pairs.push_back({static_cast<std::uint32_t>(u), s.item});
  }
  return log;
}

ExposureStats exposure_stats(const RecommendationLog& log, const IndexedCatalog& catalog) {
  ExposureStats stats;
  stats.artist_user_reach.assign(catalog.n_artists(), 0);
  stats.item_reach.assign(catalog.n_items(), 0);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> artist_user;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> item_user;
  artist_user.reserve(log.pairs.size());
  item_user.reserve(log.pairs.size());
  for (const auto& p : log.pairs) {
    check_item(catalog, p.col);
    artist_user.emplace_back(catalog.artist_of_item[p.col], p.row);
    item_user.emplace_back(p.col, p.row);
  }
  auto count_distinct = [](auto& keyed, std::vector<std::uint64_t>& reach) {
    std::sort(keyed.begin(), keyed.end());
    keyed.erase(std::unique(keyed.begin(), keyed.end()), keyed.end());
    for (const auto& [entity, user] : keyed) ++reach[entity];
  };
  count_distinct(artist_user, stats.artist_user_reach);
  count_distinct(item_user, stats.item_reach);
  return stats;
}

std::vector<WeightedPair> listening_pairs(const SparseInteractionMatrix& matrix,
                                          ListenWeight mode) {
  std::vector<WeightedPair> out;
  out.reserve(matrix.nnz());
  for (std::size_t u = 0; u < matrix.rows(); ++u) {
    const auto row = matrix.row(u);
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double w = mode == ListenWeight::kPlays ? static_cast<double>(row.values[j]) : 1.0;
      out.push_back({static_cast<std::uint32_t>(u), row.cols[j], w});
    }
  }
  return out;
}

std::vector<WeightedPair> recommendation_pairs(const RecommendationLog& log) {
  std::vector<WeightedPair> out;
  out.reserve(log.pairs.size());
  for (const auto& p : log.pairs) out.push_back({p.row, p.col, 1.0});
  return out;
}

std::vector<double> tag_mass(std::span<const WeightedPair> pairs, const IndexedCatalog& catalog) {
  std::vector<double> mass(catalog.n_tags(), 0.0);
  for (const auto& p : pairs) {
    check_item(catalog, p.item);
    for (auto t : catalog.tags_of_item[p.item]) mass[t] += p.weight;
  }
  return mass;
}

std::vector<double> artist_mass(std::span<const WeightedPair> pairs,
                                const IndexedCatalog& catalog) {
  std::vector<double> mass(catalog.n_artists(), 0.0);
  for (const auto& p : pairs) {
    check_item(catalog, p.item);
    mass[catalog.artist_of_item[p.item]] += p.weight;
  }
  return mass;
}

TagDistribution tag_distribution(std::span<const WeightedPair> pairs,
                                 const IndexedCatalog& catalog) {
  const double total = total_weight(pairs);
  return {to_percent(tag_mass(pairs, catalog), total)};
}

std::vector<double> artist_distribution(std::span<const WeightedPair> pairs,
                                        const IndexedCatalog& catalog) {
  const double total = total_weight(pairs);
  return to_percent(artist_mass(pairs, catalog), total);
}

std::vector<std::uint32_t> popularity_ranking(std::span<const double> popularity) {
  std::vector<std::uint32_t> order(popularity.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return popularity[a] > popularity[b];
  });
  return order;
}

BucketTable bucket_table(std::span<const double> recommended, std::span<const double> listened,
                         std::span<const std::uint32_t> ranking,
                         std::span<const std::size_t> boundaries) {
  const std::size_t n = listened.size();
  if (recommended.size() != n) {
    throw std::invalid_argument("recommended and listened distributions differ in size");
  }
  check_ranking(ranking, n);
  for (std::size_t b = 0; b < boundaries.size(); ++b) {
    if (boundaries[b] < 1 || boundaries[b] > n) {
      throw std::invalid_argument("bucket boundary " + std::to_string(boundaries[b]) +
                                  " outside ranks 1.." + std::to_string(n));
    }
    if (b > 0 && boundaries[b] <= boundaries[b - 1]) {
      throw std::invalid_argument("bucket boundaries must be strictly increasing");
    }
  }

  std::vector<std::size_t> ends(boundaries.begin(), boundaries.end());
  if (ends.empty() || ends.back() < n) ends.push_back(n);

  BucketTable table;
  std::size_t begin = 0;
  for (std::size_t end : ends) {
    if (end == 0) continue;
    Bucket bucket;
    bucket.first_rank = begin + 1;
    bucket.last_rank = end;
    for (std::size_t r = begin; r < end; ++r) {
      bucket.recommended += recommended[ranking[r]];
      bucket.listened += listened[ranking[r]];
    }
    const auto size = static_cast<double>(end - begin);
    bucket.recommended /= size;
    bucket.listened /= size;
    table.buckets.push_back(bucket);
    begin = end;
  }
  return table;
}

BucketTable bucket_table(std::span<const double> recommended, std::span<const double> listened,
                         std::span<const std::size_t> boundaries) {
  const auto ranking = popularity_ranking(listened);
  return bucket_table(recommended, listened, ranking, boundaries);
}

double long_tail_delta(std::span<const double> recommended, std::span<const double> listened,
                       std::span<const std::uint32_t> ranking, std::size_t head_cutoff) {
  const std::size_t n = listened.size();
  if (recommended.size() != n) {
    throw std::invalid_argument("recommended and listened distributions differ in size");
  }
  if (head_cutoff < 1) throw std::invalid_argument("head cutoff must be >= 1");
  check_ranking(ranking, n);
  double rec_tail = 0.0;
  double listen_tail = 0.0;
  for (std::size_t r = head_cutoff; r < n; ++r) {
    rec_tail += recommended[ranking[r]];
    listen_tail += listened[ranking[r]];
  }
  if (!(listen_tail > 0.0)) throw std::invalid_argument("listened tail mass is 0");
  return 100.0 * (rec_tail - listen_tail) / listen_tail;
}

double long_tail_delta(std::span<const double> recommended, std::span<const double> listened,
                       std::size_t head_cutoff) {
  const auto ranking = popularity_ranking(listened);
  return long_tail_delta(recommended, listened, ranking, head_cutoff);
}

}  // namespace exposure_loop
