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

#include "exposure_loop/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_set>

namespace exposure_loop {

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string label(const char* prefix, std::size_t value, std::size_t count) {
  int width = 1;
  for (std::size_t c = count; c >= 10; c /= 10) ++width;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, value);
  return buf;
}

// Draws `count` distinct ranks, rejecting repeats.
std::vector<std::size_t> draw_distinct(const ZipfSampler& zipf, std::size_t count,
                                       std::mt19937_64& rng) {
  std::vector<std::size_t> out;
  std::unordered_set<std::size_t> taken;
  out.reserve(count);
  while (out.size() < count) {
    const std::size_t r = zipf(rng);
    if (taken.insert(r).second) out.push_back(r);
  }
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_users < 1 || n_items < 1 || n_artists < 1 || interactions_per_user < 1 ||
      tags_per_artist < 1 || n_tags < 1 || max_count < 1) {
    throw std::invalid_argument("synthetic sizes and counts must be >= 1");
  }
  if (!(zipf_s > 0.0) || !std::isfinite(zipf_s)) {
    throw std::invalid_argument("zipf_s must be > 0");
  }
  if (n_artists > n_items) throw std::invalid_argument("n_artists must not exceed n_items");
  if (tags_per_artist > n_tags) throw std::invalid_argument("tags_per_artist must not exceed n_tags");
  if (interactions_per_user > n_items) {
    throw std::invalid_argument("interactions_per_user must not exceed n_items");
  }
}

ZipfSampler::ZipfSampler(std::size_t n, double s) : cdf_(n) {
  if (n < 1) throw std::invalid_argument("Zipf support must be non-empty");
  double acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    acc += std::pow(static_cast<double>(r + 1), -s);
    cdf_[r] = acc;
  }
  for (auto& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
}

std::size_t ZipfSampler::operator()(std::mt19937_64& rng) const {
  const double u = unit_uniform(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
}

double ZipfSampler::probability(std::size_t rank) const {
  return rank == 0 ? cdf_[0] : cdf_.at(rank) - cdf_[rank - 1];
}

SynthData generate(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  SynthData data;

  data.items.reserve(config.n_items);
  for (std::size_t r = 0; r < config.n_items; ++r) {
    data.items.push_back(label("track_", r + 1, config.n_items));
  }
  std::vector<std::string> artists;
  for (std::size_t a = 0; a < config.n_artists; ++a) {
    artists.push_back(label("artist_", a + 1, config.n_artists));
  }
  std::vector<std::string> tags;
  for (std::size_t t = 0; t < config.n_tags; ++t) {
    tags.push_back(label("tag_", t + 1, config.n_tags));
  }

  const ZipfSampler tag_zipf(config.n_tags, config.zipf_s);
  std::vector<std::set<std::string>> artist_tags(config.n_artists);
  for (std::size_t a = 0; a < config.n_artists; ++a) {
    for (std::size_t t : draw_distinct(tag_zipf, config.tags_per_artist, rng)) {
      artist_tags[a].insert(tags[t]);
    }
  }
  // Rank r belongs to artist floor(r * n_artists / n_items).
  for (std::size_t r = 0; r < config.n_items; ++r) {
    const std::size_t a = r * config.n_artists / config.n_items;
    data.catalog.artist_of.emplace(data.items[r], artists[a]);
    data.catalog.tags_of.emplace(data.items[r], artist_tags[a]);
  }

  const ZipfSampler item_zipf(config.n_items, config.zipf_s);
  data.users.reserve(config.n_users);
  data.interactions.reserve(config.n_users * config.interactions_per_user);
  for (std::size_t u = 0; u < config.n_users; ++u) {
    data.users.push_back(label("user_", u + 1, config.n_users));
    for (std::size_t r : draw_distinct(item_zipf, config.interactions_per_user, rng)) {
      const auto span = static_cast<double>(config.max_count);
      const auto count = std::min<std::int64_t>(
          config.max_count, 1 + static_cast<std::int64_t>(unit_uniform(rng) * span));
      data.interactions.push_back({data.users.back(), data.items[r], count});
    }
  }
  return data;
}

}  // namespace exposure_loop
