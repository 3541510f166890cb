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

#ifndef EXPOSURE_LOOP_INGEST_H_
#define EXPOSURE_LOOP_INGEST_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace exposure_loop {

// One (user, item, play count) observation. Identifiers are opaque strings.
struct Interaction {
  std::string user;
  std::string item;
  std::int64_t count = 0;

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

// Raised for malformed input lines. line() is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Raised when catalog data is inconsistent or does not cover an item.
class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads "user<TAB>item<TAB>count" lines. Blank lines are skipped, a trailing
// '\r' is tolerated. Repeated (user, item) pairs are merged by summing their
// counts; the output keeps the order in which each pair first appeared.
std::vector<Interaction> parse_triplets(std::istream& in);
std::vector<Interaction> parse_triplets(std::string_view text);

// Writes interactions in the format read by parse_triplets.
void write_triplets(std::ostream& out, std::span<const Interaction> interactions);

// Drops users with fewer than min_user distinct items and items with fewer
// than min_item distinct users, repeating until nothing else can be removed.
// The result is the largest sub-list where both thresholds hold; surviving
// interactions stay in input order. Input pairs are expected to be unique
// (as produced by parse_triplets).
std::vector<Interaction> filter_by_activity(std::span<const Interaction> interactions,
                                            std::size_t min_user, std::size_t min_item);

// item -> artist and item -> normalized tag set.
struct Catalog {
  std::unordered_map<std::string, std::string> artist_of;
  std::unordered_map<std::string, std::set<std::string>> tags_of;

  // Empty set for items without a tag line.
  const std::set<std::string>& tags(const std::string& item) const;
};

// Lowercases ASCII letters and trims surrounding whitespace.
std::string normalize_tag(std::string_view tag);

// artist_map: "item<TAB>artist" lines; tag_map: "item<TAB>tag(<TAB>tag)*".
// Repeating an item with the same artist is accepted, a different artist is a
// CatalogError. Tags are normalized; empty tags are dropped.
Catalog build_catalog(std::istream& artist_map, std::istream& tag_map);
Catalog build_catalog(std::string_view artist_map, std::string_view tag_map);

void write_artist_map(std::ostream& out, std::span<const std::string> items,
                      const Catalog& catalog);
void write_tag_map(std::ostream& out, std::span<const std::string> items,
                   const Catalog& catalog);

// Bijection between external identifiers and dense indices [0, size()).
class EntityIndex {
 public:
  EntityIndex() = default;

  // Returns the index of id, assigning the next free one on first sight.
  std::uint32_t insert(const std::string& id);

  std::optional<std::uint32_t> find(const std::string& id) const;
  // Throws std::out_of_range for unknown identifiers.
  std::uint32_t at(const std::string& id) const;
  const std::string& name(std::uint32_t index) const { return backward_.at(index); }

  std::size_t size() const { return backward_.size(); }
  bool empty() const { return backward_.empty(); }
  const std::vector<std::string>& names() const { return backward_; }

  static EntityIndex from_names(std::vector<std::string> names);

 private:
  std::unordered_map<std::string, std::uint32_t> forward_;
  std::vector<std::string> backward_;
};

struct EntityIndices {
  EntityIndex users;
  EntityIndex items;
};

// Assigns indices in order of first appearance. Throws std::invalid_argument
// on empty input.
EntityIndices index_entities(std::span<const Interaction> interactions);

// Interaction expressed in dense indices.
struct IndexedTriplet {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  std::int64_t count = 0;

  friend bool operator==(const IndexedTriplet&, const IndexedTriplet&) = default;
};

// Throws std::out_of_range if an identifier is not indexed.
std::vector<IndexedTriplet> to_indexed(std::span<const Interaction> interactions,
                                       const EntityIndices& indices);

// Catalog resolved against an item index: artists and tags get their own dense
// indices and every indexed item has exactly one artist.
struct IndexedCatalog {
  EntityIndex artists;
  EntityIndex tags;
  std::vector<std::uint32_t> artist_of_item;
  std::vector<std::vector<std::uint32_t>> tags_of_item;

  std::size_t n_items() const { return artist_of_item.size(); }
  std::size_t n_artists() const { return artists.size(); }
  std::size_t n_tags() const { return tags.size(); }
};

// Throws CatalogError naming the first indexed item that has no artist.
// Artists and tags are indexed in order of first use by items 0..n-1; tags of
// an item are visited in sorted order.
IndexedCatalog join_catalog(const Catalog& catalog, const EntityIndex& items);

}  // namespace exposure_loop

#endif  // EXPOSURE_LOOP_INGEST_H_
