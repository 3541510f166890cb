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

#ifndef EXPOSURE_LOOP_TOOLS_PIPELINE_H_
#define EXPOSURE_LOOP_TOOLS_PIPELINE_H_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "exposure_loop/config.h"
#include "exposure_loop/ingest.h"
#include "exposure_loop/matrix.h"
#include "exposure_loop/synth.h"

namespace exposure_loop::cli {

// Input files could not be opened or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filtered, indexed interactions joined with the catalog.
struct Dataset {
  EntityIndices indices;
  SparseInteractionMatrix matrix;
  IndexedCatalog catalog;
  std::size_t raw_interactions = 0;  // before filtering
};

// Writes triplets.tsv, artists.tsv and tags.tsv into dir.
void write_synth_files(const std::filesystem::path& dir, const SynthData& data);

// Reads the triplet, artist and tag files named in the config and applies
// the activity filter. Without a triplets path the synthetic generator is
// used instead and the filter is skipped.
Dataset load_dataset(const RunConfig& config);

// Resolves the tracked_items setting ("top:<n>" or comma-separated item ids)
// to item indices.
std::vector<std::uint32_t> resolve_tracked(const RunConfig& config, const Dataset& data);

std::ofstream open_output(const std::filesystem::path& path, bool binary = false);

}  // namespace exposure_loop::cli

#endif  // EXPOSURE_LOOP_TOOLS_PIPELINE_H_
