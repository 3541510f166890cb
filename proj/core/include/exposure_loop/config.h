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

#ifndef EXPOSURE_LOOP_CONFIG_H_
#define EXPOSURE_LOOP_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "exposure_loop/analysis.h"
#include "exposure_loop/factorize.h"
#include "exposure_loop/metrics.h"
#include "exposure_loop/simulate.h"
#include "exposure_loop/synth.h"

namespace exposure_loop {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat "key = value" settings; '#' starts a comment, blank lines are ignored.
using KeyValues = std::map<std::string, std::string>;

// Throws ConfigError (with the line number) for lines without '=' or with an
// empty key, and for keys given twice.
KeyValues parse_key_values(std::istream& in);
KeyValues parse_key_values(std::string_view text);

// Everything a CLI run needs. Keys are documented in README.md.
struct RunConfig {
  // Inputs and outputs.
  std::string triplets;
  std::string artists;
  std::string tags;
  std::string out = "out";

  std::size_t min_user = 30;
  std::size_t min_item = 30;

  std::uint64_t seed = 42;
  unsigned threads = 0;  // 0 = hardware concurrency

  Hyperparams hyper;
  int iterations = 30;
  std::size_t n_recs = 10;
  bool warm_start = true;
  int warm_sweeps = 5;
  std::int64_t increment_delta = 1;
  bool include_seen = false;
  // External item ids, or "top:<n>" for the n most played items.
  std::string tracked_items = "top:4";

  ListenWeight listen_weight = ListenWeight::kBinary;
  std::vector<std::size_t> tag_buckets = {5};
  std::vector<std::size_t> artist_buckets = {5};
  std::size_t head_cutoff = 5;

  SynthConfig synth;

  // Applies settings over the defaults. Throws ConfigError for unknown keys
  // and unparsable values.
  static RunConfig from_values(const KeyValues& values);

  unsigned worker_count() const;
  // Hyperparams with the model seed derived from the root seed.
  Hyperparams model_hyper() const;
  SynthConfig synth_config() const;
  AnalysisOptions analysis_options() const;
  LoopConfig loop_config(std::vector<std::uint32_t> tracked) const;
};

// Independent 64-bit seed for a named random stream (splitmix64 finalizer
// over root and stream).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

}  // namespace exposure_loop

#endif  // EXPOSURE_LOOP_CONFIG_H_
