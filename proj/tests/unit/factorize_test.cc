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

#include "exposure_loop/factorize.h"

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"

namespace exposure_loop {
namespace {

using testing::to_dense;

Hyperparams small_hyper(int k, double alpha = 2.0, double lambda = 0.5) {
  Hyperparams h;
  h.k = k;
  h.alpha = alpha;
  h.lambda = lambda;
  h.sweeps = 3;
  h.seed = 9;
  return h;
}

SparseInteractionMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                      double density = 0.4, std::int64_t max_count = 5) {
  return SparseInteractionMatrix::from_triplets(
      testing::random_triplets(rng, rows, cols, density, max_count), rows, cols);
}

TEST(Hyperparams, Validate) {
  Hyperparams h;
  h.validate();
  h.k = 0;
  EXPECT_THROW(h.validate(), std::invalid_argument);
  h = {};
  h.alpha = 0;
  EXPECT_THROW(h.validate(), std::invalid_argument);
  h = {};
  h.lambda = -1;
  EXPECT_THROW(h.validate(), std::invalid_argument);
  h = {};
  h.sweeps = 0;
  EXPECT_THROW(h.validate(), std::invalid_argument);
}

TEST(InitModel, DeterministicAndInRange) {
  const auto h = small_hyper(5);
  const auto a = init_model(7, 4, h);
  const auto b = init_model(7, 4, h);
  EXPECT_EQ(a, b);
  EXPECT_LE(a.user_factors.cwiseAbs().maxCoeff(), 0.01);
  EXPECT_LE(a.item_factors.cwiseAbs().maxCoeff(), 0.01);
  auto other = h;
  other.seed = 10;
  EXPECT_NE(init_model(7, 4, other).user_factors, a.user_factors);
}

TEST(SolveSide, NoInteractionsGivesZeroVector) {
  std::mt19937_64 rng(1);
  const auto model = testing::random_model(rng, 1, 6, 3, small_hyper(3));
  const auto f = solve_side(model.item_factors, {}, {}, model.hyper);
  EXPECT_EQ(f, Eigen::VectorXd::Zero(3));
}

TEST(SolveSide, ScalarCase) {
  // One item, y = 1, r = 1, alpha = 1, lambda = 1:
  // (1 + alpha r + lambda) f = 1 + alpha r, so f = 2/3.
  FactorMatrix y(1, 1);
  y << 1.0;
  const std::vector<std::uint32_t> cols = {0};
  const std::vector<std::int64_t> counts = {1};
  const auto h = small_hyper(1, 1.0, 1.0);
  const auto f = solve_side(y, cols, counts, h);
  EXPECT_NEAR(f(0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(f(0), testing::dense_weighted_ridge(y, {1}, 1.0, 1.0)(0), 1e-15);
}

TEST(SolveSide, MatchesDenseRidgeOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 4);
    const std::size_t m = 1 + rng() % 10;
    const auto h = small_hyper(k, 0.5 + static_cast<double>(rng() % 40), 0.1 + (rng() % 5));
    const auto model = testing::random_model(rng, 1, m, k, h);
    std::vector<std::int64_t> dense(m, 0);
    std::vector<std::uint32_t> cols;
    std::vector<std::int64_t> counts;
    for (std::uint32_t j = 0; j < m; ++j) {
      if (rng() % 2) {
        dense[j] = 1 + static_cast<std::int64_t>(rng() % 5);
        cols.push_back(j);
        counts.push_back(dense[j]);
      }
    }
    const auto f = solve_side(model.item_factors, cols, counts, h);
    const auto expected = testing::dense_weighted_ridge(model.item_factors, dense, h.alpha, h.lambda);
    EXPECT_LE((f - expected).cwiseAbs().maxCoeff(), 1e-8) << "trial " << trial;
  }
}

TEST(SolveSide, SingularWithoutRegularization) {
  FactorMatrix y = FactorMatrix::Zero(3, 2);
  y(0, 0) = 1.0;
  const std::vector<std::uint32_t> cols = {0};
  const std::vector<std::int64_t> counts = {2};
  try {
    solve_side(y, cols, counts, small_hyper(2, 1.0, 0.0));
    FAIL();
  } catch (const SingularSystemError& e) {
    EXPECT_NE(std::string(e.what()).find("lambda"), std::string::npos);
  }
}

TEST(Objective, ZeroFactors) {
  std::mt19937_64 rng(3);
  const auto m = random_matrix(rng, 6, 5);
  FactorModel model = init_model(6, 5, small_hyper(2));
  model.user_factors.setZero();
  model.item_factors.setZero();
  double expected = 0.0;
  for (auto v : m.values()) expected += 1.0 + model.hyper.alpha * static_cast<double>(v);
  EXPECT_DOUBLE_EQ(objective(m, model), expected);

  const SparseInteractionMatrix empty(6, 5);
  EXPECT_EQ(objective(empty, model), 0.0);
}

TEST(Objective, MatchesBruteForce) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = random_matrix(rng, 8, 6);
    const auto model = testing::random_model(rng, 8, 6, 2, small_hyper(2, 3.0, 0.7));
    const double brute = testing::brute_force_objective(to_dense(m), model);
    EXPECT_NEAR(objective(m, model), brute, 1e-9 * std::abs(brute)) << trial;
  }
}

TEST(Train, ObjectiveNeverIncreasesAcrossHalfSweeps) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t users = 1 + rng() % 10;
    const std::size_t items = 1 + rng() % 10;
    const int k = 1 + static_cast<int>(rng() % 4);
    const auto m = random_matrix(rng, users, items, 0.5);
    const auto t = m.transpose();
    auto model = init_model(users, items, small_hyper(k, 10.0, 0.3));
    double prev = objective(m, model);
    for (int sweep = 0; sweep < 4; ++sweep) {
      update_users(m, model);
      const double after_users = objective(m, model);
      EXPECT_LE(after_users, prev * (1 + 1e-9)) << trial;
      update_items(t, model);
      const double after_items = objective(m, model);
      EXPECT_LE(after_items, after_users * (1 + 1e-9)) << trial;
      prev = after_items;
    }
  }
}

TEST(Train, AllOnesMatrixSecondSweepNoWorse) {
  std::vector<IndexedTriplet> t;
  for (std::uint32_t r = 0; r < 3; ++r) {
    for (std::uint32_t c = 0; c < 3; ++c) t.push_back({r, c, 1});
  }
  const auto m = SparseInteractionMatrix::from_triplets(t, 3, 3);
  auto h = small_hyper(2);
  h.sweeps = 1;
  auto model = train(m, h);
  const double one = objective(m, model);
  refine(m, model, 1);
  EXPECT_LE(objective(m, model), one * (1 + 1e-12));
}

TEST(Train, EmptyRowUserStaysAtZero) {
  const std::vector<IndexedTriplet> t = {{0, 0, 2}, {0, 1, 1}, {2, 1, 3}};
  const auto m = SparseInteractionMatrix::from_triplets(t, 3, 2);
  auto h = small_hyper(2);
  h.sweeps = 1;
  const auto model = train(m, h);
  EXPECT_EQ(model.user_factors.row(1).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE(model.all_finite());
}

TEST(Train, DeterministicAndThreadCountIndependent) {
  std::mt19937_64 rng(6);
  const auto m = random_matrix(rng, 40, 30, 0.2);
  const auto h = small_hyper(4, 20.0, 1.0);
  const auto a = train(m, h, 1);
  const auto b = train(m, h, 1);
  const auto c = train(m, h, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_EQ(recommend_all(a, m, 5, false, 1), recommend_all(c, m, 5, false, 4));
}

TEST(Train, RejectsEmptyMatrix) {
  EXPECT_THROW(train(SparseInteractionMatrix(3, 3), small_hyper(2)), std::invalid_argument);
}

TEST(Score, Basics) {
  FactorModel model;
  model.hyper.k = 1;
  model.user_factors = FactorMatrix::Constant(1, 1, 2.0);
  model.item_factors = FactorMatrix::Constant(2, 1, 3.0);
  EXPECT_EQ(score(model, 0, 1), 6.0);
  model.user_factors.setZero();
  EXPECT_EQ(score(model, 0, 0), 0.0);
  EXPECT_THROW(score(model, 1, 0), std::out_of_range);
  EXPECT_THROW(score(model, 0, 2), std::out_of_range);
}

TEST(Score, MatchesNaiveDot) {
  std::mt19937_64 rng(7);
  const auto model = testing::random_model(rng, 5, 6, 4, small_hyper(4));
  for (std::size_t u = 0; u < 5; ++u) {
    for (std::size_t i = 0; i < 6; ++i) {
      double s = 0.0;
      for (int f = 0; f < 4; ++f) {
        s += model.user_factors(static_cast<Eigen::Index>(u), f) *
             model.item_factors(static_cast<Eigen::Index>(i), f);
      }
      EXPECT_NEAR(score(model, u, i), s, 1e-12);
    }
  }
}

TEST(RecommendTopN, UserWhoHasSeenEverything) {
  std::vector<IndexedTriplet> t;
  for (std::uint32_t c = 0; c < 4; ++c) t.push_back({0, c, 1});
  const auto m = SparseInteractionMatrix::from_triplets(t, 1, 4);
  std::mt19937_64 rng(8);
  const auto model = testing::random_model(rng, 1, 4, 2, small_hyper(2));
  EXPECT_TRUE(recommend_top_n(model, m, 0, 3).empty());
  EXPECT_EQ(recommend_top_n(model, m, 0, 3, true).size(), 3u);
}

TEST(RecommendTopN, ReturnsAllUnseenWhenNIsLarge) {
  const std::vector<IndexedTriplet> t = {{0, 2, 1}};
  const auto m = SparseInteractionMatrix::from_triplets(t, 1, 5);
  std::mt19937_64 rng(9);
  const auto model = testing::random_model(rng, 1, 5, 3, small_hyper(3));
  const auto recs = recommend_top_n(model, m, 0, 10);
  ASSERT_EQ(recs.size(), 4u);
  for (std::size_t j = 1; j < recs.size(); ++j) EXPECT_GE(recs[j - 1].score, recs[j].score);
  for (const auto& r : recs) EXPECT_NE(r.item, 2u);
}

TEST(RecommendTopN, MatchesBruteForceIncludingTies) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t items = 1 + rng() % 30;
    const std::size_t users = 1 + rng() % 4;
    const int k = 1 + trial % 4;
    auto model = testing::random_model(rng, users, items, k, small_hyper(k));
    // Duplicate some item rows so their scores tie exactly.
    for (std::size_t j = 0; j + 1 < items; j += 3) {
      model.item_factors.row(static_cast<Eigen::Index>(j + 1)) =
          model.item_factors.row(static_cast<Eigen::Index>(j));
    }
    const auto m = random_matrix(rng, users, items, 0.3);
    const auto dense = to_dense(m);
    const std::size_t n = 1 + rng() % 12;
    for (bool include_seen : {false, true}) {
      for (std::size_t u = 0; u < users; ++u) {
        EXPECT_TRUE(testing::same_ranking(recommend_top_n(model, m, u, n, include_seen),
                                          testing::brute_force_top_n(model, dense, u, n,
                                                                     include_seen)))
            << trial;
      }
    }
  }
}

TEST(RecommendTopN, AllScoresTiedGivesAscendingItems) {
  FactorModel model;
  model.hyper.k = 1;
  model.user_factors = FactorMatrix::Constant(1, 1, 1.0);
  model.item_factors = FactorMatrix::Constant(6, 1, 0.5);
  const std::vector<IndexedTriplet> t = {{0, 1, 1}};
  const auto m = SparseInteractionMatrix::from_triplets(t, 1, 6);
  const auto recs = recommend_top_n(model, m, 0, 3);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].item, 0u);
  EXPECT_EQ(recs[1].item, 2u);
  EXPECT_EQ(recs[2].item, 3u);
}

TEST(ModelSnapshot, RoundTripAndCorruption) {
  std::mt19937_64 rng(11);
  auto h = small_hyper(3);
  h.seed = 0xdeadbeefcafeULL;
  const auto model = testing::random_model(rng, 4, 7, 3, h);
  std::stringstream buf;
  model.write_snapshot(buf);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 4), "EXFM");
  EXPECT_EQ(FactorModel::read_snapshot(buf), model);

  std::string bad = bytes;
  bad[1] = '?';
  std::istringstream in1(bad);
  EXPECT_THROW(FactorModel::read_snapshot(in1), SnapshotError);
  std::istringstream in2(bytes.substr(0, bytes.size() - 1));
  EXPECT_THROW(FactorModel::read_snapshot(in2), SnapshotError);
  std::istringstream in3(bytes + "x");
  EXPECT_THROW(FactorModel::read_snapshot(in3), SnapshotError);
}

}  // namespace
}  // namespace exposure_loop
