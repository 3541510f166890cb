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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "binary_io.h"
#include "parallel.h"

namespace exposure_loop {

namespace {

constexpr std::string_view kMagic = "EXFM";
constexpr std::uint8_t kVersion = 1;

// Below this reciprocal condition estimate an unregularized system is treated
// as singular.
constexpr double kSingularRcond = 1e-12;

// 53 random bits mapped to [0, 1); independent of the standard library's
// distribution implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool ranks_before(const ScoredItem& a, const ScoredItem& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.item < b.item;
}

void solve_rows(const SparseInteractionMatrix& matrix, const FactorMatrix& fixed,
                FactorMatrix& solved, const Hyperparams& hyper, unsigned threads) {
  const Eigen::MatrixXd fixed_gram = gram(fixed);
  internal::parallel_for(matrix.rows(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto row = matrix.row(r);
      solved.row(static_cast<Eigen::Index>(r)) =
          solve_side(fixed, fixed_gram, row.cols, row.values, hyper).transpose();
    }
  });
}

}  // namespace

void Hyperparams::validate() const {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
  if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
}

bool FactorModel::all_finite() const {
  return user_factors.allFinite() && item_factors.allFinite();
}

bool operator==(const FactorModel& a, const FactorModel& b) {
  return a.hyper == b.hyper && a.user_factors.rows() == b.user_factors.rows() &&
         a.user_factors.cols() == b.user_factors.cols() &&
         a.item_factors.rows() == b.item_factors.rows() &&
         a.item_factors.cols() == b.item_factors.cols() && a.user_factors == b.user_factors &&
         a.item_factors == b.item_factors;
}

void FactorModel::write_snapshot(std::ostream& out) const {
  internal::write_magic(out, kMagic, kVersion);
  internal::write_le<std::uint64_t>(out, n_users());
  internal::write_le<std::uint64_t>(out, n_items());
  internal::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(k()));
  for (Eigen::Index i = 0; i < user_factors.size(); ++i) {
    internal::write_le<double>(out, user_factors.data()[i]);
  }
  for (Eigen::Index i = 0; i < item_factors.size(); ++i) {
    internal::write_le<double>(out, item_factors.data()[i]);
  }
  internal::write_le<double>(out, hyper.alpha);
  internal::write_le<double>(out, hyper.lambda);
  internal::write_le<std::int64_t>(out, hyper.sweeps);
  internal::write_le<std::uint64_t>(out, hyper.seed);
  if (!out) throw std::runtime_error("failed to write model snapshot");
}

FactorModel FactorModel::read_snapshot(std::istream& in) {
  internal::expect_magic(in, kMagic, kVersion);
  const auto n_users = internal::read_le<std::uint64_t>(in, "n_users");
  const auto n_items = internal::read_le<std::uint64_t>(in, "n_items");
  const auto k = internal::read_le<std::uint64_t>(in, "k");
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 32;
  if (k == 0 || k > 4096 || n_users >= kLimit || n_items >= kLimit) {
    throw SnapshotError("implausible model snapshot dimensions");
  }
  FactorModel model;
  model.user_factors.resize(static_cast<Eigen::Index>(n_users), static_cast<Eigen::Index>(k));
  model.item_factors.resize(static_cast<Eigen::Index>(n_items), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < model.user_factors.size(); ++i) {
    model.user_factors.data()[i] = internal::read_le<double>(in, "user factors");
  }
  for (Eigen::Index i = 0; i < model.item_factors.size(); ++i) {
    model.item_factors.data()[i] = internal::read_le<double>(in, "item factors");
  }
  model.hyper.k = static_cast<int>(k);
  model.hyper.alpha = internal::read_le<double>(in, "alpha");
  model.hyper.lambda = internal::read_le<double>(in, "lambda");
  model.hyper.sweeps = static_cast<int>(internal::read_le<std::int64_t>(in, "sweeps"));
  model.hyper.seed = internal::read_le<std::uint64_t>(in, "seed");
  internal::expect_end(in);
  try {
    model.hyper.validate();
  } catch (const std::invalid_argument& e) {
    throw SnapshotError(std::string("corrupt model snapshot: ") + e.what());
  }
  if (!model.all_finite()) throw SnapshotError("corrupt model snapshot: non-finite factor");
  return model;
}

FactorModel init_model(std::size_t n_users, std::size_t n_items, const Hyperparams& hyper) {
  hyper.validate();
  if (n_users < 1 || n_items < 1) throw std::invalid_argument("model dimensions must be >= 1");
  FactorModel model;
  model.hyper = hyper;
  model.user_factors.resize(static_cast<Eigen::Index>(n_users), hyper.k);
  model.item_factors.resize(static_cast<Eigen::Index>(n_items), hyper.k);
  std::mt19937_64 rng(hyper.seed);
  for (Eigen::Index i = 0; i < model.user_factors.size(); ++i) {
    model.user_factors.data()[i] = -0.01 + 0.02 * unit_uniform(rng);
  }
  for (Eigen::Index i = 0; i < model.item_factors.size(); ++i) {
    model.item_factors.data()[i] = -0.01 + 0.02 * unit_uniform(rng);
  }
  return model;
}

Eigen::MatrixXd gram(const FactorMatrix& factors) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(factors.cols(), factors.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(factors.transpose());
  return g.selfadjointView<Eigen::Lower>();
}

Eigen::VectorXd solve_side(const FactorMatrix& fixed, const Eigen::MatrixXd& fixed_gram,
                           std::span<const std::uint32_t> cols,
                           std::span<const std::int64_t> counts, const Hyperparams& hyper) {
  if (cols.size() != counts.size()) {
    throw std::invalid_argument("solve_side: index and count lists differ in length");
  }
  const Eigen::Index k = fixed.cols();
  const auto n_obs = static_cast<Eigen::Index>(cols.size());

  // Observed rows of the fixed side, and the same rows scaled by the extra
  // confidence alpha * r.
  FactorMatrix observed(n_obs, k);
  FactorMatrix weighted(n_obs, k);
  Eigen::VectorXd confidence(n_obs);
  for (Eigen::Index j = 0; j < n_obs; ++j) {
    const auto col = cols[static_cast<std::size_t>(j)];
    const auto count = counts[static_cast<std::size_t>(j)];
    if (col >= fixed.rows()) throw std::out_of_range("solve_side: index out of range");
    if (count < 1) throw std::invalid_argument("solve_side: counts must be >= 1");
    const double extra = hyper.alpha * static_cast<double>(count);
    observed.row(j) = fixed.row(col);
    weighted.row(j) = extra * fixed.row(col);
    confidence(j) = 1.0 + extra;
  }

  Eigen::MatrixXd normal = fixed_gram;
  normal.diagonal().array() += hyper.lambda;
  normal.noalias() += observed.transpose() * weighted;
  const Eigen::VectorXd rhs = observed.transpose() * confidence;

  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success || (hyper.lambda == 0.0 && llt.rcond() < kSingularRcond)) {
    throw SingularSystemError(
        "normal matrix is singular; use a regularization lambda > 0");
  }
  return llt.solve(rhs);
}

Eigen::VectorXd solve_side(const FactorMatrix& fixed, std::span<const std::uint32_t> cols,
                           std::span<const std::int64_t> counts, const Hyperparams& hyper) {
  return solve_side(fixed, gram(fixed), cols, counts, hyper);
}

void update_users(const SparseInteractionMatrix& matrix, FactorModel& model, unsigned threads) {
  if (matrix.rows() != model.n_users() || matrix.cols() != model.n_items()) {
    throw std::invalid_argument("update_users: matrix shape does not match the model");
  }
  solve_rows(matrix, model.item_factors, model.user_factors, model.hyper, threads);
}

void update_items(const SparseInteractionMatrix& transposed, FactorModel& model,
                  unsigned threads) {
  if (transposed.rows() != model.n_items() || transposed.cols() != model.n_users()) {
    throw std::invalid_argument("update_items: transposed matrix shape does not match the model");
  }
  solve_rows(transposed, model.user_factors, model.item_factors, model.hyper, threads);
}

FactorModel train(const SparseInteractionMatrix& matrix, const Hyperparams& hyper,
                  unsigned threads) {
  hyper.validate();
  if (matrix.nnz() == 0) throw std::invalid_argument("cannot train on an empty matrix");
  FactorModel model = init_model(matrix.rows(), matrix.cols(), hyper);
  refine(matrix, model, hyper.sweeps, threads);
  return model;
}

void refine(const SparseInteractionMatrix& matrix, FactorModel& model, int sweeps,
            unsigned threads) {
  if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
  model.hyper.validate();
  const SparseInteractionMatrix transposed = matrix.transpose();
  for (int s = 0; s < sweeps; ++s) {
    update_users(matrix, model, threads);
    update_items(transposed, model, threads);
  }
}

double objective(const SparseInteractionMatrix& matrix, const FactorModel& model) {
  if (matrix.rows() != model.n_users() || matrix.cols() != model.n_items()) {
    throw std::invalid_argument("objective: matrix shape does not match the model");
  }
  const auto& x = model.user_factors;
  const auto& y = model.item_factors;
  // Every pair contributes s^2 at confidence 1; observed pairs then swap that
  // term for c (1 - s)^2.
  double loss = gram(x).cwiseProduct(gram(y)).sum();
  for (std::size_t u = 0; u < matrix.rows(); ++u) {
    const auto row = matrix.row(u);
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double s = x.row(static_cast<Eigen::Index>(u)).dot(y.row(row.cols[j]));
      const double c = 1.0 + model.hyper.alpha * static_cast<double>(row.values[j]);
      loss += c * (1.0 - s) * (1.0 - s) - s * s;
    }
  }
  loss += model.hyper.lambda * (x.squaredNorm() + y.squaredNorm());
  return std::max(loss, 0.0);
}

double score(const FactorModel& model, std::size_t u, std::size_t i) {
  if (u >= model.n_users() || i >= model.n_items()) {
    throw std::out_of_range("score: index out of range");
  }
  return model.user_factors.row(static_cast<Eigen::Index>(u))
      .dot(model.item_factors.row(static_cast<Eigen::Index>(i)));
}

std::vector<ScoredItem> recommend_top_n(const FactorModel& model,
                                        const SparseInteractionMatrix& matrix, std::size_t u,
                                        std::size_t n, bool include_seen) {
  if (n < 1) throw std::invalid_argument("recommend_top_n: n must be >= 1");
  if (u >= model.n_users()) throw std::out_of_range("recommend_top_n: user out of range");
  if (matrix.rows() != model.n_users() || matrix.cols() != model.n_items()) {
    throw std::invalid_argument("recommend_top_n: matrix shape does not match the model");
  }
  const Eigen::VectorXd scores =
      model.item_factors * model.user_factors.row(static_cast<Eigen::Index>(u)).transpose();
  const auto seen = matrix.row(u).cols;

  std::vector<ScoredItem> candidates;
  candidates.reserve(model.n_items() - (include_seen ? 0 : seen.size()));
  auto next_seen = seen.begin();
  for (std::uint32_t i = 0; i < model.n_items(); ++i) {
    if (!include_seen && next_seen != seen.end() && *next_seen == i) {
      ++next_seen;
      continue;
    }
    candidates.push_back({i, scores(i)});
  }
  const std::size_t take = std::min(n, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), ranks_before);
  candidates.resize(take);
  return candidates;
}

std::vector<std::vector<ScoredItem>> recommend_all(const FactorModel& model,
                                                   const SparseInteractionMatrix& matrix,
                                                   std::size_t n, bool include_seen,
                                                   unsigned threads) {
  std::vector<std::vector<ScoredItem>> out(model.n_users());
  internal::parallel_for(out.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      out[u] = recommend_top_n(model, matrix, u, n, include_seen);
    }
  });
  return out;
}

}  // namespace exposure_loop
