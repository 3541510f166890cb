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

#ifndef EXPOSURE_LOOP_FACTORIZE_H_
#define EXPOSURE_LOOP_FACTORIZE_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "exposure_loop/matrix.h"

namespace exposure_loop {

using FactorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Free parameters of the confidence-weighted factorization. Observed cells get
// confidence 1 + alpha * count and preference 1; every other cell has
// confidence 1 and preference 0.
struct Hyperparams {
  int k = 64;
  double alpha = 40.0;
  double lambda = 1.0;
  int sweeps = 15;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument unless k >= 1, alpha > 0, lambda >= 0 and
  // sweeps >= 1.
  void validate() const;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

struct FactorModel {
  FactorMatrix user_factors;  // n_users x k
  FactorMatrix item_factors;  // n_items x k
  Hyperparams hyper;

  std::size_t n_users() const { return static_cast<std::size_t>(user_factors.rows()); }
  std::size_t n_items() const { return static_cast<std::size_t>(item_factors.rows()); }
  int k() const { return static_cast<int>(user_factors.cols()); }
  bool all_finite() const;

  // "EXFM" snapshot: magic, version byte, little-endian u64 n_users, n_items,
  // k, row-major f64 user then item factors, then a trailer with alpha,
  // lambda (f64), sweeps (i64) and seed (u64).
  void write_snapshot(std::ostream& out) const;
  static FactorModel read_snapshot(std::istream& in);

  friend bool operator==(const FactorModel& a, const FactorModel& b);
};

// The normal matrix of a solve was not positive definite.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Factors drawn i.i.d. uniform in [-0.01, 0.01] from a 64-bit Mersenne
// Twister seeded with hyper.seed (users first, row-major).
FactorModel init_model(std::size_t n_users, std::size_t n_items, const Hyperparams& hyper);

// Gram matrix F^T F of a factor matrix.
Eigen::MatrixXd gram(const FactorMatrix& factors);

// Exact minimizer of
//   sum_j c_j (p_j - f . y_j)^2 + lambda |f|^2
// over all rows y_j of `fixed`, where (cols, counts) lists the entity's
// observed entries. `fixed_gram` must equal gram(fixed).
Eigen::VectorXd solve_side(const FactorMatrix& fixed, const Eigen::MatrixXd& fixed_gram,
                           std::span<const std::uint32_t> cols,
                           std::span<const std::int64_t> counts, const Hyperparams& hyper);
Eigen::VectorXd solve_side(const FactorMatrix& fixed, std::span<const std::uint32_t> cols,
                           std::span<const std::int64_t> counts, const Hyperparams& hyper);

// Half-sweeps. update_users solves every user row with item factors fixed;
// update_items takes the transposed (items x users) matrix and solves every
// item row with user factors fixed. Work is split across `threads` workers;
// results do not depend on the thread count.
void update_users(const SparseInteractionMatrix& matrix, FactorModel& model, unsigned threads = 1);
void update_items(const SparseInteractionMatrix& transposed, FactorModel& model,
                  unsigned threads = 1);

// Cold start: init_model followed by hyper.sweeps full sweeps.
FactorModel train(const SparseInteractionMatrix& matrix, const Hyperparams& hyper,
                  unsigned threads = 1);

// Warm start: runs `sweeps` more full sweeps from the given factors.
void refine(const SparseInteractionMatrix& matrix, FactorModel& model, int sweeps,
            unsigned threads = 1);

// Full training loss over every user-item pair plus the ridge penalty.
double objective(const SparseInteractionMatrix& matrix, const FactorModel& model);

// Predicted preference of user u for item i. Throws std::out_of_range.
double score(const FactorModel& model, std::size_t u, std::size_t i);

struct ScoredItem {
  std::uint32_t item = 0;
  double score = 0.0;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

// Up to n highest-scoring items for user u, descending by score with ties
// broken by ascending item index. Items the user has interacted with are
// skipped unless include_seen is set.
std::vector<ScoredItem> recommend_top_n(const FactorModel& model,
                                        const SparseInteractionMatrix& matrix, std::size_t u,
                                        std::size_t n, bool include_seen = false);

// recommend_top_n for every user, indexed by user.
std::vector<std::vector<ScoredItem>> recommend_all(const FactorModel& model,
                                                   const SparseInteractionMatrix& matrix,
                                                   std::size_t n, bool include_seen = false,
                                                   unsigned threads = 1);

}  // namespace exposure_loop

#endif  // EXPOSURE_LOOP_FACTORIZE_H_
