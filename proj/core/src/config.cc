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

#include "exposure_loop/config.h"

#include <charconv>
#include <functional>
#include <sstream>
#include <thread>

#include "text_util.h"

namespace exposure_loop {

namespace {

constexpr std::uint64_t kModelStream = 1;
constexpr std::uint64_t kSynthStream = 2;

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("invalid boolean '" + value + "' for key '" + key + "'");
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  for (auto field : internal::split(value, ',')) {
    const std::string item(internal::trim(field));
    if (item.empty()) continue;
    out.push_back(parse_number<std::size_t>(key, item));
  }
  return out;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = internal::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(internal::trim(view.substr(0, eq)));
    const std::string value(internal::trim(view.substr(eq + 1)));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (!values.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return values;
}

KeyValues parse_key_values(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_key_values(in);
}

RunConfig RunConfig::from_values(const KeyValues& values) {
  RunConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter, std::less<>> setters = {
      {"triplets", [&](auto&, auto& v) { c.triplets = v; }},
      {"artists", [&](auto&, auto& v) { c.artists = v; }},
      {"tags", [&](auto&, auto& v) { c.tags = v; }},
      {"out", [&](auto&, auto& v) { c.out = v; }},
      {"min_user", [&](auto& k, auto& v) { c.min_user = parse_number<std::size_t>(k, v); }},
      {"min_item", [&](auto& k, auto& v) { c.min_item = parse_number<std::size_t>(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
      {"threads", [&](auto& k, auto& v) { c.threads = parse_number<unsigned>(k, v); }},
      {"k", [&](auto& k, auto& v) { c.hyper.k = parse_number<int>(k, v); }},
      {"alpha", [&](auto& k, auto& v) { c.hyper.alpha = parse_number<double>(k, v); }},
      {"lambda", [&](auto& k, auto& v) { c.hyper.lambda = parse_number<double>(k, v); }},
      {"sweeps", [&](auto& k, auto& v) { c.hyper.sweeps = parse_number<int>(k, v); }},
      {"iterations", [&](auto& k, auto& v) { c.iterations = parse_number<int>(k, v); }},
      {"n_recs", [&](auto& k, auto& v) { c.n_recs = parse_number<std::size_t>(k, v); }},
      {"warm_start", [&](auto& k, auto& v) { c.warm_start = parse_bool(k, v); }},
      {"warm_sweeps", [&](auto& k, auto& v) { c.warm_sweeps = parse_number<int>(k, v); }},
      {"increment_delta",
       [&](auto& k, auto& v) { c.increment_delta = parse_number<std::int64_t>(k, v); }},
      {"include_seen", [&](auto& k, auto& v) { c.include_seen = parse_bool(k, v); }},
      {"tracked_items", [&](auto&, auto& v) { c.tracked_items = v; }},
      {"listen_weight",
       [&](auto& k, auto& v) {
         if (v == "binary") {
           c.listen_weight = ListenWeight::kBinary;
         } else if (v == "plays") {
           c.listen_weight = ListenWeight::kPlays;
         } else {
           throw ConfigError("invalid value '" + v + "' for key '" + k +
                             "' (expected binary or plays)");
         }
       }},
      {"tag_buckets", [&](auto& k, auto& v) { c.tag_buckets = parse_list(k, v); }},
      {"artist_buckets", [&](auto& k, auto& v) { c.artist_buckets = parse_list(k, v); }},
      {"head_cutoff", [&](auto& k, auto& v) { c.head_cutoff = parse_number<std::size_t>(k, v); }},
      {"synth_users", [&](auto& k, auto& v) { c.synth.n_users = parse_number<std::size_t>(k, v); }},
      {"synth_items", [&](auto& k, auto& v) { c.synth.n_items = parse_number<std::size_t>(k, v); }},
      {"synth_artists",
       [&](auto& k, auto& v) { c.synth.n_artists = parse_number<std::size_t>(k, v); }},
      {"synth_zipf_s", [&](auto& k, auto& v) { c.synth.zipf_s = parse_number<double>(k, v); }},
      {"synth_interactions_per_user",
       [&](auto& k, auto& v) { c.synth.interactions_per_user = parse_number<std::size_t>(k, v); }},
      {"synth_max_count",
       [&](auto& k, auto& v) { c.synth.max_count = parse_number<std::int64_t>(k, v); }},
      {"synth_tags_per_artist",
       [&](auto& k, auto& v) { c.synth.tags_per_artist = parse_number<std::size_t>(k, v); }},
      {"synth_tags", [&](auto& k, auto& v) { c.synth.n_tags = parse_number<std::size_t>(k, v); }},
  };
  for (const auto& [key, value] : values) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(key, value);
  }
  if (c.min_user < 1 || c.min_item < 1) throw ConfigError("min_user and min_item must be >= 1");
  return c;
}

unsigned RunConfig::worker_count() const {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

Hyperparams RunConfig::model_hyper() const {
  Hyperparams h = hyper;
  h.seed = derive_seed(seed, kModelStream);
  return h;
}

SynthConfig RunConfig::synth_config() const {
  SynthConfig s = synth;
  s.seed = derive_seed(seed, kSynthStream);
  return s;
}

AnalysisOptions RunConfig::analysis_options() const {
  AnalysisOptions o;
  o.n_recs = n_recs;
  o.include_seen = include_seen;
  o.listen_weight = listen_weight;
  o.tag_boundaries = tag_buckets;
  o.artist_boundaries = artist_buckets;
  o.head_cutoff = head_cutoff;
  o.threads = worker_count();
  return o;
}

LoopConfig RunConfig::loop_config(std::vector<std::uint32_t> tracked) const {
  LoopConfig l;
  l.n_iterations = iterations;
  l.n_recs = n_recs;
  l.hyper = model_hyper();
  l.warm_start = warm_start;
  l.warm_sweeps = warm_sweeps;
  l.increment_delta = increment_delta;
  l.tracked_items = std::move(tracked);
  l.include_seen = include_seen;
  l.threads = worker_count();
  return l;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t z = root + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace exposure_loop
