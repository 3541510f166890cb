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

#include "exposure_loop/ingest.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <deque>
#include <sstream>

#include "text_util.h"

namespace exposure_loop {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

struct PairKey {
  std::uint32_t user;
  std::uint32_t item;
  friend bool operator==(const PairKey&, const PairKey&) = default;
};

struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{k.user} << 32) | k.item);
  }
};

std::uint32_t intern(std::unordered_map<std::string, std::uint32_t>& ids, const std::string& s) {
  auto [it, inserted] = ids.try_emplace(s, static_cast<std::uint32_t>(ids.size()));
  return it->second;
}

}  // namespace

std::vector<Interaction> parse_triplets(std::istream& in) {
  std::vector<Interaction> out;
  std::unordered_map<std::string, std::uint32_t> users;
  std::unordered_map<std::string, std::uint32_t> items;
  std::unordered_map<PairKey, std::size_t, PairKeyHash> position;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = internal::strip_cr(line);
    if (internal::is_blank(view)) continue;
    const auto fields = internal::split_tabs(view);
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw ParseError(line_no, "empty user or item identifier");
    }
    std::int64_t count = 0;
    const auto* first = fields[2].data();
    const auto* last = first + fields[2].size();
    auto [ptr, ec] = std::from_chars(first, last, count);
    if (ec != std::errc() || ptr != last) {
      throw ParseError(line_no, "count is not an integer: '" + std::string(fields[2]) + "'");
    }
    if (count < 1) {
      throw ParseError(line_no, "count must be >= 1, got " + std::to_string(count));
    }

    std::string user(fields[0]);
    std::string item(fields[1]);
    const PairKey key{intern(users, user), intern(items, item)};
    auto [it, inserted] = position.try_emplace(key, out.size());
    if (inserted) {
      out.push_back(Interaction{std::move(user), std::move(item), count});
    } else {
      out[it->second].count += count;
    }
  }
  if (in.bad()) throw std::runtime_error("read error while parsing triplets");
  return out;
}

std::vector<Interaction> parse_triplets(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_triplets(in);
}

void write_triplets(std::ostream& out, std::span<const Interaction> interactions) {
  for (const auto& x : interactions) {
    out << x.user << '\t' << x.item << '\t' << x.count << '\n';
  }
}

std::vector<Interaction> filter_by_activity(std::span<const Interaction> interactions,
                                            std::size_t min_user, std::size_t min_item) {
  if (min_user < 1 || min_item < 1) {
    throw std::invalid_argument("activity thresholds must be >= 1");
  }
  std::unordered_map<std::string, std::uint32_t> user_ids;
  std::unordered_map<std::string, std::uint32_t> item_ids;
  std::unordered_map<PairKey, std::uint32_t, PairKeyHash> edge_of_pair;
  std::vector<PairKey> edges;
  std::vector<std::uint32_t> edge_of_row(interactions.size());

  for (std::size_t r = 0; r < interactions.size(); ++r) {
    const PairKey key{intern(user_ids, interactions[r].user), intern(item_ids, interactions[r].item)};
    auto [it, inserted] = edge_of_pair.try_emplace(key, static_cast<std::uint32_t>(edges.size()));
    if (inserted) edges.push_back(key);
    edge_of_row[r] = it->second;
  }

  const std::size_t n_users = user_ids.size();
  const std::size_t n_items = item_ids.size();
  std::vector<std::vector<std::uint32_t>> user_edges(n_users);
  std::vector<std::vector<std::uint32_t>> item_edges(n_items);
  for (std::uint32_t e = 0; e < edges.size(); ++e) {
    user_edges[edges[e].user].push_back(e);
    item_edges[edges[e].item].push_back(e);
  }
  std::vector<std::size_t> user_degree(n_users);
  std::vector<std::size_t> item_degree(n_items);
  for (std::size_t u = 0; u < n_users; ++u) user_degree[u] = user_edges[u].size();
  for (std::size_t i = 0; i < n_items; ++i) item_degree[i] = item_edges[i].size();

  // Peel vertices below threshold; each removal can only lower other degrees,
  // so the surviving set is the unique maximal one.
  std::vector<char> user_removed(n_users, 0);
  std::vector<char> item_removed(n_items, 0);
  std::vector<char> edge_alive(edges.size(), 1);
  // Users are encoded as [0, n_users), items as n_users + item.
  std::deque<std::size_t> pending;
  for (std::size_t u = 0; u < n_users; ++u) {
    if (user_degree[u] < min_user) pending.push_back(u);
  }
  for (std::size_t i = 0; i < n_items; ++i) {
    if (item_degree[i] < min_item) pending.push_back(n_users + i);
  }
  while (!pending.empty()) {
    const std::size_t v = pending.front();
    pending.pop_front();
    if (v < n_users) {
      if (user_removed[v]) continue;
      user_removed[v] = 1;
      for (std::uint32_t e : user_edges[v]) {
        if (!edge_alive[e]) continue;
        edge_alive[e] = 0;
        const std::uint32_t item = edges[e].item;
        if (!item_removed[item] && --item_degree[item] < min_item) {
          pending.push_back(n_users + item);
        }
      }
    } else {
      const std::size_t item = v - n_users;
      if (item_removed[item]) continue;
      item_removed[item] = 1;
      for (std::uint32_t e : item_edges[item]) {
        if (!edge_alive[e]) continue;
        edge_alive[e] = 0;
        const std::uint32_t user = edges[e].user;
        if (!user_removed[user] && --user_degree[user] < min_user) {
          pending.push_back(user);
        }
      }
    }
  }

  std::vector<Interaction> out;
  for (std::size_t r = 0; r < interactions.size(); ++r) {
    if (edge_alive[edge_of_row[r]]) out.push_back(interactions[r]);
  }
  return out;
}

const std::set<std::string>& Catalog::tags(const std::string& item) const {
  static const std::set<std::string> kEmpty;
  auto it = tags_of.find(item);
  return it == tags_of.end() ? kEmpty : it->second;
}

std::string normalize_tag(std::string_view tag) {
  std::string out(internal::trim(tag));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

Catalog build_catalog(std::istream& artist_map, std::istream& tag_map) {
  Catalog catalog;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(artist_map, line)) {
    ++line_no;
    std::string_view view = internal::strip_cr(line);
    if (internal::is_blank(view)) continue;
    const auto fields = internal::split_tabs(view);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(line_no, "artist map expects 'item<TAB>artist'");
    }
    std::string item(fields[0]);
    std::string artist(fields[1]);
    auto [it, inserted] = catalog.artist_of.try_emplace(item, artist);
    if (!inserted && it->second != artist) {
      throw CatalogError("item '" + item + "' has conflicting artists '" + it->second +
                         "' and '" + artist + "'");
    }
  }

  line_no = 0;
  while (std::getline(tag_map, line)) {
    ++line_no;
    std::string_view view = internal::strip_cr(line);
    if (internal::is_blank(view)) continue;
    const auto fields = internal::split_tabs(view);
    if (fields[0].empty()) throw ParseError(line_no, "tag map line has an empty item");
    auto& tags = catalog.tags_of[std::string(fields[0])];
    for (std::size_t f = 1; f < fields.size(); ++f) {
      std::string tag = normalize_tag(fields[f]);
      if (!tag.empty()) tags.insert(std::move(tag));
    }
  }
  return catalog;
}

Catalog build_catalog(std::string_view artist_map, std::string_view tag_map) {
  std::istringstream artists{std::string(artist_map)};
  std::istringstream tags{std::string(tag_map)};
  return build_catalog(artists, tags);
}

void write_artist_map(std::ostream& out, std::span<const std::string> items,
                      const Catalog& catalog) {
  for (const auto& item : items) {
    auto it = catalog.artist_of.find(item);
    if (it == catalog.artist_of.end()) throw CatalogError("no artist for item '" + item + "'");
    out << item << '\t' << it->second << '\n';
  }
}

void write_tag_map(std::ostream& out, std::span<const std::string> items,
                   const Catalog& catalog) {
  for (const auto& item : items) {
    const auto& tags = catalog.tags(item);
    if (tags.empty()) continue;
    out << item;
    for (const auto& t : tags) out << '\t' << t;
    out << '\n';
  }
}

std::uint32_t EntityIndex::insert(const std::string& id) {
  auto [it, inserted] = forward_.try_emplace(id, static_cast<std::uint32_t>(backward_.size()));
  if (inserted) backward_.push_back(id);
  return it->second;
}

std::optional<std::uint32_t> EntityIndex::find(const std::string& id) const {
  auto it = forward_.find(id);
  if (it == forward_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t EntityIndex::at(const std::string& id) const {
  auto it = forward_.find(id);
  if (it == forward_.end()) throw std::out_of_range("unknown identifier '" + id + "'");
  return it->second;
}

EntityIndex EntityIndex::from_names(std::vector<std::string> names) {
  EntityIndex index;
  for (auto& n : names) {
    if (index.insert(n) != index.size() - 1) {
      throw std::invalid_argument("duplicate identifier '" + n + "' in index");
    }
  }
  return index;
}

EntityIndices index_entities(std::span<const Interaction> interactions) {
  if (interactions.empty()) throw std::invalid_argument("cannot index an empty interaction list");
  EntityIndices out;
  for (const auto& x : interactions) {
    out.users.insert(x.user);
    out.items.insert(x.item);
  }
  return out;
}

std::vector<IndexedTriplet> to_indexed(std::span<const Interaction> interactions,
                                       const EntityIndices& indices) {
  std::vector<IndexedTriplet> out;
  out.reserve(interactions.size());
  for (const auto& x : interactions) {
    out.push_back({indices.users.at(x.user), indices.items.at(x.item), x.count});
  }
  return out;
}

IndexedCatalog join_catalog(const Catalog& catalog, const EntityIndex& items) {
  IndexedCatalog out;
  out.artist_of_item.reserve(items.size());
  out.tags_of_item.reserve(items.size());
  for (const auto& item : items.names()) {
    auto it = catalog.artist_of.find(item);
    if (it == catalog.artist_of.end()) {
      throw CatalogError("item '" + item + "' has no artist in the artist map");
    }
    out.artist_of_item.push_back(out.artists.insert(it->second));
    std::vector<std::uint32_t> tag_ids;
    for (const auto& tag : catalog.tags(item)) tag_ids.push_back(out.tags.insert(tag));
    out.tags_of_item.push_back(std::move(tag_ids));
  }
  return out;
}

}  // namespace exposure_loop
