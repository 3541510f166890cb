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

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"

namespace exposure_loop {
namespace {

Interaction I(std::string u, std::string i, std::int64_t c = 1) {
  return {std::move(u), std::move(i), c};
}

TEST(ParseTriplets, MergesDuplicatesBySumming) {
  const auto xs = parse_triplets("u1\ts1\t3\nu1\ts1\t2");
  ASSERT_EQ(xs.size(), 1u);
  EXPECT_EQ(xs[0], I("u1", "s1", 5));
}

TEST(ParseTriplets, ZeroCountIsAnErrorAtLine1) {
  try {
    parse_triplets("u1\ts1\t0");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(ParseTriplets, DistinctPairsKeepFileOrder) {
  const auto xs = parse_triplets("u2\ts9\t1\nu1\ts9\t4\nu1\ts3\t2\n");
  ASSERT_EQ(xs.size(), 3u);
  EXPECT_EQ(xs[0], I("u2", "s9", 1));
  EXPECT_EQ(xs[1], I("u1", "s9", 4));
  EXPECT_EQ(xs[2], I("u1", "s3", 2));
}

TEST(ParseTriplets, ReportsLineNumberOfMalformedLine) {
  const std::string bad_fields = "u1\ts1\t1\n\nu2\ts2\n";
  try {
    parse_triplets(bad_fields);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_triplets("u1\ts1\tx"), ParseError);
  EXPECT_THROW(parse_triplets("u1\ts1\t2.5"), ParseError);
  EXPECT_THROW(parse_triplets("u1\ts1\t-3"), ParseError);
  EXPECT_THROW(parse_triplets("u1\ts1\t1\textra"), ParseError);
}

TEST(ParseTriplets, ToleratesCrlfAndBlankLines) {
  const auto xs = parse_triplets("u1\ts1\t1\r\n\r\n  \nu2\ts1\t2\r\n");
  ASSERT_EQ(xs.size(), 2u);
  EXPECT_EQ(xs[1], I("u2", "s1", 2));
}

TEST(FilterByActivity, RemovesLowActivityUserAndItem) {
  const std::vector<Interaction> xs = {I("A", "1"), I("A", "2"), I("B", "1"), I("B", "2"),
                                       I("C", "3")};
  const auto kept = filter_by_activity(xs, 2, 2);
  const std::vector<Interaction> expected = {I("A", "1"), I("A", "2"), I("B", "1"), I("B", "2")};
  EXPECT_EQ(kept, expected);
}

TEST(FilterByActivity, UnchangedWhenAboveThresholds) {
  const std::vector<Interaction> xs = {I("A", "1"), I("A", "2"), I("B", "1"), I("B", "2")};
  EXPECT_EQ(filter_by_activity(xs, 2, 2), xs);
  EXPECT_EQ(filter_by_activity(xs, 1, 1), xs);
}

TEST(FilterByActivity, CascadeResolvesToFixedPoint) {
  // Item 3 has one user (D). Dropping it leaves D with one item; dropping D
  // leaves item 4 with one user (E); dropping item 4 leaves E with one item.
  const std::vector<Interaction> xs = {I("A", "1"), I("A", "2"), I("B", "1"), I("B", "2"),
                                       I("D", "3"), I("D", "4"), I("E", "4"), I("E", "1")};
  const auto kept = filter_by_activity(xs, 2, 2);
  const std::vector<Interaction> expected = {I("A", "1"), I("A", "2"), I("B", "1"), I("B", "2")};
  EXPECT_EQ(kept, expected);
  EXPECT_EQ(kept, testing::repeat_single_pass_filter(xs, 2, 2));
}

TEST(FilterByActivity, EmptyResultIsNotAnError) {
  const std::vector<Interaction> xs = {I("A", "1"), I("B", "2")};
  EXPECT_TRUE(filter_by_activity(xs, 2, 1).empty());
  EXPECT_TRUE(filter_by_activity({}, 3, 3).empty());
}

TEST(FilterByActivity, RejectsZeroThreshold) {
  EXPECT_THROW(filter_by_activity({}, 0, 1), std::invalid_argument);
}

TEST(FilterByActivity, MatchesOracleAndIsIdempotentOnRandomInstances) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n_users = 2 + rng() % 20;
    const std::size_t n_items = 2 + rng() % 20;
    const std::size_t n = 1 + rng() % 200;
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<Interaction> xs;
    for (std::size_t k = 0; k < n; ++k) {
      const auto u = rng() % n_users;
      const auto i = rng() % n_items;
      if (pairs.emplace(u, i).second) {
        xs.push_back(I("u" + std::to_string(u), "i" + std::to_string(i)));
      }
    }
    const std::size_t min_user = 1 + rng() % 4;
    const std::size_t min_item = 1 + rng() % 4;
    const auto once = filter_by_activity(xs, min_user, min_item);
    EXPECT_EQ(once, testing::repeat_single_pass_filter(xs, min_user, min_item)) << trial;
    EXPECT_EQ(filter_by_activity(once, min_user, min_item), once) << trial;
  }
}

TEST(BuildCatalog, NormalizesTags) {
  const auto catalog = build_catalog("s1\tQueen", "s1\tRock\tPOP");
  EXPECT_EQ(catalog.artist_of.at("s1"), "Queen");
  EXPECT_EQ(catalog.tags("s1"), (std::set<std::string>{"rock", "pop"}));
}

TEST(BuildCatalog, TrimsAndDropsEmptyTags) {
  const auto catalog = build_catalog("s1\tQueen", "s1\t  Hard Rock \t\t  ");
  EXPECT_EQ(catalog.tags("s1"), (std::set<std::string>{"hard rock"}));
}

TEST(BuildCatalog, MissingTagLineMeansNoTags) {
  const auto catalog = build_catalog("s1\tQueen\ns2\tAbba", "s1\trock");
  EXPECT_TRUE(catalog.tags("s2").empty());
}

TEST(BuildCatalog, ConflictingArtistIsAnError) {
  EXPECT_THROW(build_catalog("s1\tQueen\ns1\tAbba", ""), CatalogError);
  EXPECT_NO_THROW(build_catalog("s1\tQueen\ns1\tQueen", ""));
}

TEST(BuildCatalog, MalformedArtistLine) {
  EXPECT_THROW(build_catalog("s1", ""), ParseError);
  EXPECT_THROW(build_catalog("s1\tA\tB", ""), ParseError);
}

TEST(IndexEntities, FirstAppearanceOrder) {
  const std::vector<Interaction> xs = {I("u2", "s9"), I("u1", "s9")};
  const auto idx = index_entities(xs);
  EXPECT_EQ(idx.users.at("u2"), 0u);
  EXPECT_EQ(idx.users.at("u1"), 1u);
  EXPECT_EQ(idx.items.at("s9"), 0u);
  EXPECT_EQ(idx.items.size(), 1u);
}

TEST(IndexEntities, SingleInteraction) {
  const std::vector<Interaction> xs = {I("u", "s")};
  const auto idx = index_entities(xs);
  EXPECT_EQ(idx.users.size(), 1u);
  EXPECT_EQ(idx.items.size(), 1u);
  EXPECT_EQ(idx.users.at("u"), 0u);
}

TEST(IndexEntities, EmptyInputIsAnError) {
  EXPECT_THROW(index_entities({}), std::invalid_argument);
}

TEST(IndexEntities, ForwardAndBackwardAreInverse) {
  std::mt19937_64 rng(3);
  std::vector<Interaction> xs;
  for (int k = 0; k < 300; ++k) {
    xs.push_back(I("u" + std::to_string(rng() % 40), "s" + std::to_string(rng() % 60)));
  }
  const auto idx = index_entities(xs);
  for (const auto& x : xs) {
    EXPECT_EQ(idx.users.name(idx.users.at(x.user)), x.user);
    EXPECT_EQ(idx.items.name(idx.items.at(x.item)), x.item);
  }
  for (std::uint32_t i = 0; i < idx.items.size(); ++i) EXPECT_EQ(idx.items.at(idx.items.name(i)), i);
  EXPECT_FALSE(idx.items.find("nope").has_value());
  EXPECT_THROW(idx.items.at("nope"), std::out_of_range);
}

TEST(Ingest, SerializeIndexedTripletsRoundTrips) {
  std::mt19937_64 rng(11);
  std::string text;
  for (int k = 0; k < 400; ++k) {
    text += "user" + std::to_string(rng() % 30) + "\titem" + std::to_string(rng() % 50) + "\t" +
            std::to_string(1 + rng() % 9) + "\n";
  }
  const auto parsed = parse_triplets(text);
  const auto idx = index_entities(parsed);
  std::ostringstream out;
  std::vector<Interaction> rebuilt;
  for (const auto& t : to_indexed(parsed, idx)) {
    rebuilt.push_back({idx.users.name(t.row), idx.items.name(t.col), t.count});
  }
  write_triplets(out, rebuilt);
  EXPECT_EQ(parse_triplets(out.str()), parsed);
}

TEST(JoinCatalog, MissingArtistNamesTheItem) {
  const auto catalog = build_catalog("s1\tQueen", "");
  const auto items = EntityIndex::from_names({"s1", "s2"});
  try {
    join_catalog(catalog, items);
    FAIL();
  } catch (const CatalogError& e) {
    EXPECT_NE(std::string(e.what()).find("s2"), std::string::npos);
  }
}

TEST(JoinCatalog, RestrictsToIndexedItems) {
  const auto catalog =
      build_catalog("s1\tQueen\ns2\tAbba\ns3\tQueen\ns4\tBowie", "s1\trock\ns3\trock\tpop");
  const auto items = EntityIndex::from_names({"s3", "s1", "s2"});
  const auto joined = join_catalog(catalog, items);
  EXPECT_EQ(joined.n_items(), 3u);
  EXPECT_EQ(joined.n_artists(), 2u);  // Bowie's item is not indexed
  EXPECT_EQ(joined.artist_of_item[0], joined.artist_of_item[1]);
  EXPECT_EQ(joined.artists.name(joined.artist_of_item[2]), "Abba");
  EXPECT_EQ(joined.n_tags(), 2u);
  EXPECT_TRUE(joined.tags_of_item[2].empty());
}

}  // namespace
}  // namespace exposure_loop
