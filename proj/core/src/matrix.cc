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

#include "exposure_loop/matrix.h"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "binary_io.h"

namespace exposure_loop {

namespace {

constexpr std::string_view kMagic = "EXLM";
constexpr std::uint8_t kVersion = 1;

void check_cell(const Cell& c, std::size_t n_rows, std::size_t n_cols) {
  if (c.row >= n_rows || c.col >= n_cols) {
    throw std::out_of_range("cell (" + std::to_string(c.row) + ", " + std::to_string(c.col) +
                            ") outside " + std::to_string(n_rows) + "x" + std::to_string(n_cols));
  }
}

}  // namespace

SparseInteractionMatrix::SparseInteractionMatrix(std::size_t n_rows, std::size_t n_cols)
    : n_rows_(n_rows), n_cols_(n_cols), row_offsets_(n_rows + 1, 0) {}

SparseInteractionMatrix SparseInteractionMatrix::from_csr(std::size_t n_rows, std::size_t n_cols,
                                                          std::vector<std::uint64_t> row_offsets,
                                                          std::vector<std::uint32_t> col_indices,
                                                          std::vector<std::int64_t> values) {
  SparseInteractionMatrix m;
  m.n_rows_ = n_rows;
  m.n_cols_ = n_cols;
  m.row_offsets_ = std::move(row_offsets);
  m.col_indices_ = std::move(col_indices);
  m.values_ = std::move(values);
  m.validate();
  return m;
}

SparseInteractionMatrix SparseInteractionMatrix::from_triplets(
    std::span<const IndexedTriplet> triplets, std::size_t n_rows, std::size_t n_cols) {
  SparseInteractionMatrix m(n_rows, n_cols);
  for (const auto& t : triplets) {
    check_cell({t.row, t.col}, n_rows, n_cols);
    if (t.count < 1) throw InvalidMatrix("count must be >= 1, got " + std::to_string(t.count));
    ++m.row_offsets_[t.row + 1];
  }
  std::partial_sum(m.row_offsets_.begin(), m.row_offsets_.end(), m.row_offsets_.begin());

  std::vector<std::pair<std::uint32_t, std::int64_t>> entries(triplets.size());
  std::vector<std::uint64_t> cursor(m.row_offsets_.begin(), m.row_offsets_.end() - 1);
  for (const auto& t : triplets) entries[cursor[t.row]++] = {t.col, t.count};

  m.col_indices_.resize(entries.size());
  m.values_.resize(entries.size());
  for (std::size_t r = 0; r < n_rows; ++r) {
    auto first = entries.begin() + static_cast<std::ptrdiff_t>(m.row_offsets_[r]);
    auto last = entries.begin() + static_cast<std::ptrdiff_t>(m.row_offsets_[r + 1]);
    std::sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = first; it != last; ++it) {
      if (it != first && it->first == (it - 1)->first) {
        throw InvalidMatrix("repeated cell (" + std::to_string(r) + ", " +
                            std::to_string(it->first) + ")");
      }
      const auto pos = static_cast<std::size_t>(it - entries.begin());
      m.col_indices_[pos] = it->first;
      m.values_[pos] = it->second;
    }
  }
  return m;
}

SparseInteractionMatrix::RowView SparseInteractionMatrix::row(std::size_t r) const {
  if (r >= n_rows_) throw std::out_of_range("row " + std::to_string(r) + " out of range");
  const auto begin = static_cast<std::size_t>(row_offsets_[r]);
  const auto len = static_cast<std::size_t>(row_offsets_[r + 1]) - begin;
  return {std::span<const std::uint32_t>(col_indices_).subspan(begin, len),
          std::span<const std::int64_t>(values_).subspan(begin, len)};
}

std::int64_t SparseInteractionMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= n_rows_ || c >= n_cols_) {
    throw std::out_of_range("index (" + std::to_string(r) + ", " + std::to_string(c) +
                            ") out of range");
  }
  const auto view = row(r);
  auto it = std::lower_bound(view.cols.begin(), view.cols.end(), static_cast<std::uint32_t>(c));
  if (it == view.cols.end() || *it != c) return 0;
  return view.values[static_cast<std::size_t>(it - view.cols.begin())];
}

std::int64_t SparseInteractionMatrix::total() const {
  return std::accumulate(values_.begin(), values_.end(), std::int64_t{0});
}

SparseInteractionMatrix SparseInteractionMatrix::transpose() const {
  SparseInteractionMatrix t(n_cols_, n_rows_);
  for (std::uint32_t c : col_indices_) ++t.row_offsets_[c + 1];
  std::partial_sum(t.row_offsets_.begin(), t.row_offsets_.end(), t.row_offsets_.begin());
  t.col_indices_.resize(nnz());
  t.values_.resize(nnz());
  std::vector<std::uint64_t> cursor(t.row_offsets_.begin(), t.row_offsets_.end() - 1);
  // Visiting rows in order leaves each transposed row sorted.
  for (std::size_t r = 0; r < n_rows_; ++r) {
    for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const auto dst = cursor[col_indices_[k]]++;
      t.col_indices_[dst] = static_cast<std::uint32_t>(r);
      t.values_[dst] = values_[k];
    }
  }
  return t;
}

SparseInteractionMatrix SparseInteractionMatrix::increment(std::span<const Cell> cells,
                                                           std::int64_t delta) const {
  SparseInteractionMatrix copy = *this;
  copy.increment_in_place(cells, delta);
  return copy;
}

void SparseInteractionMatrix::increment_in_place(std::span<const Cell> cells, std::int64_t delta) {
  if (delta < 1) throw std::invalid_argument("increment delta must be >= 1");
  std::vector<Cell> sorted(cells.begin(), cells.end());
  for (const auto& c : sorted) check_cell(c, n_rows_, n_cols_);
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw InvalidMatrix("cell (" + std::to_string(dup->row) + ", " + std::to_string(dup->col) +
                        ") listed twice in increment");
  }
  if (sorted.empty()) return;

  std::vector<std::uint64_t> offsets(n_rows_ + 1, 0);
  std::vector<std::uint32_t> cols;
  std::vector<std::int64_t> vals;
  cols.reserve(nnz() + sorted.size());
  vals.reserve(nnz() + sorted.size());

  auto next = sorted.begin();
  for (std::size_t r = 0; r < n_rows_; ++r) {
    auto k = row_offsets_[r];
    const auto end = row_offsets_[r + 1];
    // Merge the stored row with the sorted cells for this row.
    while (k < end || (next != sorted.end() && next->row == r)) {
      const bool take_new = next != sorted.end() && next->row == r &&
                            (k == end || next->col <= col_indices_[k]);
      if (take_new && k < end && next->col == col_indices_[k]) {
        cols.push_back(col_indices_[k]);
        vals.push_back(values_[k] + delta);
        ++k;
        ++next;
      } else if (take_new) {
        cols.push_back(next->col);
        vals.push_back(delta);
        ++next;
      } else {
        cols.push_back(col_indices_[k]);
        vals.push_back(values_[k]);
        ++k;
      }
    }
    offsets[r + 1] = cols.size();
  }
  row_offsets_ = std::move(offsets);
  col_indices_ = std::move(cols);
  values_ = std::move(vals);
}

std::vector<IndexedTriplet> SparseInteractionMatrix::to_triplets() const {
  std::vector<IndexedTriplet> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < n_rows_; ++r) {
    for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      out.push_back({static_cast<std::uint32_t>(r), col_indices_[k], values_[k]});
    }
  }
  return out;
}

void SparseInteractionMatrix::validate() const {
  if (row_offsets_.size() != n_rows_ + 1) {
    throw InvalidMatrix("row_offsets has length " + std::to_string(row_offsets_.size()) +
                        ", expected " + std::to_string(n_rows_ + 1));
  }
  if (row_offsets_.front() != 0) throw InvalidMatrix("row_offsets[0] must be 0");
  if (col_indices_.size() != values_.size()) {
    throw InvalidMatrix("col_indices and values differ in length");
  }
  if (row_offsets_.back() != col_indices_.size()) {
    throw InvalidMatrix("row_offsets[n_rows] does not equal nnz");
  }
  for (std::size_t r = 0; r < n_rows_; ++r) {
    if (row_offsets_[r + 1] < row_offsets_[r]) {
      throw InvalidMatrix("row_offsets decreases at row " + std::to_string(r));
    }
    for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      if (col_indices_[k] >= n_cols_) {
        throw InvalidMatrix("column index out of range in row " + std::to_string(r));
      }
      if (k > row_offsets_[r] && col_indices_[k] <= col_indices_[k - 1]) {
        throw InvalidMatrix("columns not strictly increasing in row " + std::to_string(r));
      }
      if (values_[k] < 1) throw InvalidMatrix("non-positive count in row " + std::to_string(r));
    }
  }
}

void SparseInteractionMatrix::write_snapshot(std::ostream& out) const {
  internal::write_magic(out, kMagic, kVersion);
  internal::write_le<std::uint64_t>(out, n_rows_);
  internal::write_le<std::uint64_t>(out, n_cols_);
  internal::write_le<std::uint64_t>(out, nnz());
  for (auto v : row_offsets_) internal::write_le<std::uint64_t>(out, v);
  for (auto v : col_indices_) internal::write_le<std::uint32_t>(out, v);
  for (auto v : values_) internal::write_le<std::int64_t>(out, v);
  if (!out) throw std::runtime_error("failed to write matrix snapshot");
}

SparseInteractionMatrix SparseInteractionMatrix::read_snapshot(std::istream& in) {
  internal::expect_magic(in, kMagic, kVersion);
  const auto n_rows = internal::read_le<std::uint64_t>(in, "rows");
  const auto n_cols = internal::read_le<std::uint64_t>(in, "cols");
  const auto nnz = internal::read_le<std::uint64_t>(in, "nnz");
  if (n_cols > UINT32_MAX || n_rows > UINT32_MAX || (n_cols != 0 && nnz / n_cols > n_rows)) {
    throw SnapshotError("implausible matrix snapshot dimensions");
  }
  std::vector<std::uint64_t> offsets(n_rows + 1);
  for (auto& v : offsets) v = internal::read_le<std::uint64_t>(in, "row offsets");
  std::vector<std::uint32_t> cols(nnz);
  for (auto& v : cols) v = internal::read_le<std::uint32_t>(in, "column indices");
  std::vector<std::int64_t> vals(nnz);
  for (auto& v : vals) v = internal::read_le<std::int64_t>(in, "values");
  internal::expect_end(in);
  try {
    return from_csr(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
  } catch (const InvalidMatrix& e) {
    throw SnapshotError(std::string("corrupt matrix snapshot: ") + e.what());
  }
}

}  // namespace exposure_loop
