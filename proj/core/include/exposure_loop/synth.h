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

#ifndef EXPOSURE_LOOP_SYNTH_H_
#define EXPOSURE_LOOP_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "exposure_loop/ingest.h"

namespace exposure_loop {

struct SynthConfig {
  std::size_t n_users = 2000;
  std::size_t n_items = 500;
  std::size_t n_artists = 50;
  double zipf_s = 1.0;
  std::size_t interactions_per_user = 20;
  std::int64_t max_count = 10;
  std::size_t tags_per_artist = 2;
  std::size_t n_tags = 30;
  std::uint64_t seed = 42;

  // Throws std::invalid_argument for non-positive sizes, zipf_s <= 0,
  // n_artists > n_items, tags_per_artist > n_tags or
  // interactions_per_user > n_items.
  void validate() const;
};

// Finite Zipf distribution over ranks 0..n-1 with P(r) proportional to
// (r + 1)^-s, sampled by inverse CDF.
class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double s);

  std::size_t operator()(std::mt19937_64& rng) const;
  double probability(std::size_t rank) const;
  std::size_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

struct SynthData {
  std::vector<Interaction> interactions;
  Catalog catalog;
  std::vector<std::string> items;  // item identifiers, most popular rank first
  std::vector<std::string> users;
};

// Each user draws interactions_per_user distinct items from Zipf(zipf_s) over
// item popularity ranks, with counts uniform in [1, max_count]. Artists own
// contiguous blocks of ranks, so the head artists collect the head items.
// Each artist draws tags_per_artist distinct tags from Zipf(zipf_s) over the
// tag vocabulary and its items inherit them. Deterministic for a given seed.
SynthData generate(const SynthConfig& config);

}  // namespace exposure_loop

#endif  // EXPOSURE_LOOP_SYNTH_H_
