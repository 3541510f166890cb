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

#ifndef EXPOSURE_LOOP_MATRIX_H_
#define EXPOSURE_LOOP_MATRIX_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "exposure_loop/ingest.h"
#include "exposure_loop/snapshot.h"

namespace exposure_loop {

// A (row, col) coordinate.
struct Cell {
  std::uint32_t row = 0;
  std::uint32_t col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Structural invariant violated.
class InvalidMatrix : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Row-compressed matrix of positive integer play counts (users x items).
//
// Rows hold strictly increasing column indices; only positive counts are
// stored. Instances are immutable except through increment_in_place, which
// the caller must serialize against readers.
class SparseInteractionMatrix {
 public:
  struct RowView {
    std::span<const std::uint32_t> cols;
    std::span<const std::int64_t> values;

    std::size_t size() const { return cols.size(); }
    bool empty() const { return cols.empty(); }
  };

  SparseInteractionMatrix() : row_offsets_(1, 0) {}
  SparseInteractionMatrix(std::size_t n_rows, std::size_t n_cols);

  // Adopts raw CSR arrays; throws InvalidMatrix if they are inconsistent.
  static SparseInteractionMatrix from_csr(std::size_t n_rows, std::size_t n_cols,
                                          std::vector<std::uint64_t> row_offsets,
                                          std::vector<std::uint32_t> col_indices,
                                          std::vector<std::int64_t> values);

  // Throws std::out_of_range for indices outside the shape and InvalidMatrix
  // for repeated pairs or counts < 1.
  static SparseInteractionMatrix from_triplets(std::span<const IndexedTriplet> triplets,
                                               std::size_t n_rows, std::size_t n_cols);

  std::size_t rows() const { return n_rows_; }
  std::size_t cols() const { return n_cols_; }
  std::size_t nnz() const { return col_indices_.size(); }

  RowView row(std::size_t r) const;
  const std::vector<std::uint64_t>& row_offsets() const { return row_offsets_; }
  const std::vector<std::uint32_t>& col_indices() const { return col_indices_; }
  const std::vector<std::int64_t>& values() const { return values_; }

  // Stored count, or 0 for a structural zero.
  std::int64_t at(std::size_t r, std::size_t c) const;
  bool contains(std::size_t r, std::size_t c) const { return at(r, c) != 0; }

  // Sum of all stored counts.
  std::int64_t total() const;

  SparseInteractionMatrix transpose() const;

  // Adds delta to every listed cell, inserting cells that are not stored yet.
  // Rows are rebuilt once per call. Throws std::out_of_range for cells outside
  // the shape, InvalidMatrix for a repeated cell, std::invalid_argument for
  // delta < 1. On error the matrix is unchanged.
  SparseInteractionMatrix increment(std::span<const Cell> cells, std::int64_t delta) const;
  void increment_in_place(std::span<const Cell> cells, std::int64_t delta);

  // Row-major listing of stored entries.
  std::vector<IndexedTriplet> to_triplets() const;

  // Throws InvalidMatrix describing the first violated invariant.
  void validate() const;

  // "EXLM" snapshot: magic, version byte, little-endian u64 rows, cols, nnz,
  // then u64 row offsets, u32 column indices and i64 counts.
  void write_snapshot(std::ostream& out) const;
  // Throws SnapshotError on bad magic/version, truncation or a payload that
  // fails validation.
  static SparseInteractionMatrix read_snapshot(std::istream& in);

  friend bool operator==(const SparseInteractionMatrix&, const SparseInteractionMatrix&) = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::uint64_t> row_offsets_;
  std::vector<std::uint32_t> col_indices_;
  std::vector<std::int64_t> values_;
};

}  // namespace exposure_loop

#endif  // EXPOSURE_LOOP_MATRIX_H_
