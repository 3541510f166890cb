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

#include "pipeline.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "exposure_loop/simulate.h"

namespace exposure_loop::cli {

namespace fs = std::filesystem;

namespace {

std::ifstream open_input(const std::string& path, const char* what) {
  if (path.empty()) throw IoError(std::string("no ") + what + " file configured");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + std::string(what) + " file " + path);
  return in;
}

Dataset assemble(const std::vector<Interaction>& interactions, const Catalog& catalog) {
  if (interactions.empty()) {
    throw std::invalid_argument("no interactions left after filtering");
  }
  Dataset d;
  d.indices = index_entities(interactions);
  d.matrix = SparseInteractionMatrix::from_triplets(to_indexed(interactions, d.indices),
                                                    d.indices.users.size(), d.indices.items.size());
  d.catalog = join_catalog(catalog, d.indices.items);
  return d;
}

}  // namespace

std::ofstream open_output(const fs::path& path, bool binary) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void write_synth_files(const fs::path& dir, const SynthData& data) {
  {
    auto out = open_output(dir / "triplets.tsv");
    write_triplets(out, data.interactions);
  }
  {
    auto out = open_output(dir / "artists.tsv");
    write_artist_map(out, data.items, data.catalog);
  }
  {
    auto out = open_output(dir / "tags.tsv");
    write_tag_map(out, data.items, data.catalog);
  }
}

Dataset load_dataset(const RunConfig& config) {
  if (config.triplets.empty()) {
    spdlog::info("no triplets configured; generating the synthetic dataset in memory");
    const auto data = generate(config.synth_config());
    auto d = assemble(data.interactions, data.catalog);
    d.raw_interactions = data.interactions.size();
    return d;
  }
  auto triplet_in = open_input(config.triplets, "triplets");
  const auto raw = parse_triplets(triplet_in);
  spdlog::info("read {} distinct user-item pairs from {}", raw.size(), config.triplets);
  auto artist_in = open_input(config.artists, "artists");
  std::ifstream tag_in;
  std::istringstream no_tags;
  std::istream* tags = &no_tags;
  if (!config.tags.empty()) {
    tag_in = open_input(config.tags, "tags");
    tags = &tag_in;
  }
  const auto catalog = build_catalog(artist_in, *tags);
  const auto kept = filter_by_activity(raw, config.min_user, config.min_item);
  spdlog::info("kept {} pairs after filtering (min_user={}, min_item={})", kept.size(),
               config.min_user, config.min_item);
  auto d = assemble(kept, catalog);
  d.raw_interactions = raw.size();
  return d;
}

std::vector<std::uint32_t> resolve_tracked(const RunConfig& config, const Dataset& data) {
  const std::string& spec = config.tracked_items;
  if (spec.rfind("top:", 0) == 0) {
    std::size_t n = 0;
    const char* first = spec.data() + 4;
    const char* last = spec.data() + spec.size();
    const auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec != std::errc() || ptr != last) {
      throw ConfigError("invalid value '" + spec + "' for key 'tracked_items'");
    }
    return most_played_items(data.matrix, n);
  }
  std::vector<std::uint32_t> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto end = spec.find(',', start);
    if (end == std::string::npos) end = spec.size();
    std::string id = spec.substr(start, end - start);
    id.erase(0, id.find_first_not_of(" \t"));
    id.erase(id.find_last_not_of(" \t") + 1);
    if (!id.empty()) {
      const auto index = data.indices.items.find(id);
      if (!index) throw ConfigError("tracked item '" + id + "' is not in the filtered data");
      out.push_back(*index);
    }
    start = end + 1;
  }
  return out;
}

}  // namespace exposure_loop::cli
