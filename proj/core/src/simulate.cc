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

#include "exposure_loop/simulate.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "text_util.h"

namespace exposure_loop {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv_mix(std::uint64_t& h, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) {
    h ^= (v >> (8 * b)) & 0xffu;
    h *= kFnvPrime;
  }
}

std::string exact(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename T>
T parse_field(std::string_view field, const fs::path& file) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw CheckpointError("malformed field '" + std::string(field) + "' in " + file.string());
  }
  return value;
}

fs::path iteration_dir(const fs::path& dir, int t) { return dir / ("iter_" + std::to_string(t)); }

// Writes through a temporary file so a crash never leaves a partial file
// under the final name.
template <typename Writer>
void write_atomically(const fs::path& path, std::ios::openmode mode, Writer&& writer) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, mode | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open " + tmp.string() + " for writing");
    writer(out);
    out.flush();
    if (!out) throw CheckpointError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

constexpr std::string_view kRecordHeader =
    "iteration,gini_artists,coverage_artists,coverage_items,total_plays,n_pairs,recs_digest,"
    "initial_total_plays";

void write_record(std::ostream& out, const IterationRecord& r, const LoopTrace& trace) {
  out << kRecordHeader;
  for (auto item : trace.tracked_items) out << ",reach_" << item;
  out << '\n';
  out << r.iteration << ',' << exact(r.gini_artists) << ',' << exact(r.coverage_artists) << ','
      << exact(r.coverage_items) << ',' << r.total_plays << ',' << r.n_pairs << ','
      << r.recs_digest << ',' << trace.initial_total_plays;
  for (auto reach : r.tracked_reach) out << ',' << reach;
  out << '\n';
}

struct StoredRecord {
  IterationRecord record;
  std::int64_t initial_total_plays = 0;
  std::vector<std::uint32_t> tracked_items;
};

StoredRecord read_record(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw CheckpointError("missing " + file.string());
  std::string header;
  std::string row;
  if (!std::getline(in, header) || !std::getline(in, row)) {
    throw CheckpointError("truncated " + file.string());
  }
  const auto names = internal::split(internal::strip_cr(header), ',');
  const auto fields = internal::split(internal::strip_cr(row), ',');
  constexpr std::size_t kFixed = 8;
  if (names.size() < kFixed || names.size() != fields.size()) {
    throw CheckpointError("malformed " + file.string());
  }
  StoredRecord s;
  auto& r = s.record;
  r.iteration = parse_field<int>(fields[0], file);
  r.gini_artists = parse_field<double>(fields[1], file);
  r.coverage_artists = parse_field<double>(fields[2], file);
  r.coverage_items = parse_field<double>(fields[3], file);
  r.total_plays = parse_field<std::int64_t>(fields[4], file);
  r.n_pairs = parse_field<std::uint64_t>(fields[5], file);
  r.recs_digest = parse_field<std::uint64_t>(fields[6], file);
  s.initial_total_plays = parse_field<std::int64_t>(fields[7], file);
  for (std::size_t c = kFixed; c < names.size(); ++c) {
    constexpr std::string_view kPrefix = "reach_";
    if (names[c].substr(0, kPrefix.size()) != kPrefix) {
      throw CheckpointError("unexpected column '" + std::string(names[c]) + "' in " + file.string());
    }
    s.tracked_items.push_back(parse_field<std::uint32_t>(names[c].substr(kPrefix.size()), file));
    r.tracked_reach.push_back(parse_field<std::uint64_t>(fields[c], file));
  }
  return s;
}

void check_consistent(const SparseInteractionMatrix& matrix, const IndexedCatalog& catalog) {
  if (matrix.nnz() == 0) throw std::invalid_argument("feedback loop needs a non-empty matrix");
  if (matrix.cols() != catalog.n_items()) {
    throw std::invalid_argument("matrix has " + std::to_string(matrix.cols()) +
                                " items but the catalog has " + std::to_string(catalog.n_items()));
  }
}

}  // namespace

void LoopConfig::validate(std::size_t n_items) const {
  if (n_iterations < 1) throw std::invalid_argument("n_iterations must be >= 1");
  if (n_recs < 1) throw std::invalid_argument("n_recs must be >= 1");
  if (warm_sweeps < 1) throw std::invalid_argument("warm_sweeps must be >= 1");
  if (increment_delta < 1) throw std::invalid_argument("increment_delta must be >= 1");
  hyper.validate();
  for (auto item : tracked_items) {
    if (item >= n_items) {
      throw std::invalid_argument("tracked item " + std::to_string(item) + " out of range");
    }
  }
}

std::uint64_t digest(const RecommendationLog& log) {
  std::uint64_t h = kFnvOffset;
  for (const auto& p : log.pairs) {
    fnv_mix(h, p.row);
    fnv_mix(h, p.col);
  }
  return h;
}

FeedbackLoop::FeedbackLoop(SparseInteractionMatrix matrix, const IndexedCatalog& catalog,
                           LoopConfig config)
    : matrix_(std::move(matrix)), catalog_(&catalog), config_(std::move(config)) {
  check_consistent(matrix_, catalog);
  config_.validate(matrix_.cols());
  trace_.tracked_items = config_.tracked_items;
  trace_.initial_total_plays = matrix_.total();
}

FeedbackLoop FeedbackLoop::resume(SparseInteractionMatrix matrix, const IndexedCatalog& catalog,
                                  LoopConfig config, FactorModel model, LoopTrace trace) {
  FeedbackLoop loop(std::move(matrix), catalog, std::move(config));
  if (trace.tracked_items != loop.config_.tracked_items) {
    throw std::invalid_argument("resumed trace tracks different items than the configuration");
  }
  if (model.n_users() != loop.matrix_.rows() || model.n_items() != loop.matrix_.cols()) {
    throw std::invalid_argument("resumed model does not match the matrix shape");
  }
  if (static_cast<int>(trace.records.size()) > loop.config_.n_iterations) {
    throw std::invalid_argument("resumed trace is longer than n_iterations");
  }
  for (std::size_t t = 0; t < trace.records.size(); ++t) {
    if (trace.records[t].iteration != static_cast<int>(t + 1)) {
      throw std::invalid_argument("resumed trace iterations are not consecutive from 1");
    }
  }
  if (!trace.records.empty() && trace.records.back().total_plays != loop.matrix_.total()) {
    throw std::invalid_argument("resumed matrix total does not match the trace");
  }
  if (!(model.hyper == loop.config_.hyper)) {
    throw std::invalid_argument("resumed model was trained with different hyperparameters");
  }
  loop.model_ = std::move(model);
  loop.trace_ = std::move(trace);
  return loop;
}

const IterationRecord& FeedbackLoop::step() {
  if (done()) throw std::logic_error("feedback loop already completed all iterations");
  const int iteration = completed() + 1;

  if (config_.warm_start && model_) {
    refine(matrix_, *model_, config_.warm_sweeps, config_.threads);
  } else {
    model_ = train(matrix_, config_.hyper, config_.threads);
  }

  last_recs_ = recommend_all(*model_, matrix_, config_.n_recs, config_.include_seen,
                             config_.threads);
  const RecommendationLog log = RecommendationLog::from_ranked(last_recs_, matrix_.cols());
  const ExposureStats stats = exposure_stats(log, *catalog_);

  IterationRecord record;
  record.iteration = iteration;
  // An all-zero reach vector (no recommendations at all) has no Gini; report 0.
  const bool any = std::any_of(stats.artist_user_reach.begin(), stats.artist_user_reach.end(),
                               [](std::uint64_t r) { return r > 0; });
  record.gini_artists = any ? gini(std::span<const std::uint64_t>(stats.artist_user_reach)) : 0.0;
  record.coverage_artists = coverage(std::span<const std::uint64_t>(stats.artist_user_reach));
  record.coverage_items = coverage(std::span<const std::uint64_t>(stats.item_reach));
  for (auto item : config_.tracked_items) record.tracked_reach.push_back(stats.item_reach[item]);
  record.n_pairs = log.pairs.size();
  record.recs_digest = digest(log);

  matrix_.increment_in_place(log.pairs, config_.increment_delta);
  record.total_plays = matrix_.total();

  trace_.records.push_back(std::move(record));
  return trace_.records.back();
}

LoopTrace run_loop(const SparseInteractionMatrix& matrix, const IndexedCatalog& catalog,
                   const LoopConfig& config) {
  FeedbackLoop loop(matrix, catalog, config);
  while (!loop.done()) loop.step();
  return loop.trace();
}

std::vector<std::uint32_t> most_played_items(const SparseInteractionMatrix& matrix, std::size_t n) {
  std::vector<double> plays(matrix.cols(), 0.0);
  for (std::size_t k = 0; k < matrix.nnz(); ++k) {
    plays[matrix.col_indices()[k]] += static_cast<double>(matrix.values()[k]);
  }
  auto order = popularity_ranking(plays);
  if (order.size() > n) order.resize(n);
  return order;
}

std::vector<std::vector<std::uint64_t>> exposure_series(const LoopTrace& trace,
                                                        std::span<const std::uint32_t> items) {
  std::vector<std::vector<std::uint64_t>> out;
  out.reserve(items.size());
  for (auto item : items) {
    const auto it = std::find(trace.tracked_items.begin(), trace.tracked_items.end(), item);
    if (it == trace.tracked_items.end()) {
      throw std::invalid_argument("item " + std::to_string(item) + " was not tracked");
    }
    const auto column = static_cast<std::size_t>(it - trace.tracked_items.begin());
    std::vector<std::uint64_t> series;
    series.reserve(trace.records.size());
    for (const auto& r : trace.records) series.push_back(r.tracked_reach[column]);
    out.push_back(std::move(series));
  }
  return out;
}

void write_checkpoint(const fs::path& dir, const FeedbackLoop& loop) {
  if (loop.completed() == 0 || !loop.model()) {
    throw CheckpointError("nothing to checkpoint before the first iteration");
  }
  const int t = loop.completed();
  const fs::path iter_dir = iteration_dir(dir, t);
  fs::create_directories(iter_dir);
  // A stale marker from an earlier run must not vouch for the new files.
  fs::remove(iter_dir / "record.csv");

  write_atomically(iter_dir / "matrix.bin", std::ios::binary,
                   [&](std::ostream& out) { loop.matrix().write_snapshot(out); });
  write_atomically(iter_dir / "model.bin", std::ios::binary,
                   [&](std::ostream& out) { loop.model()->write_snapshot(out); });
  write_atomically(iter_dir / "recs.csv", std::ios::out, [&](std::ostream& out) {
    out << "user,item,rank,score\n";
    const auto& recs = loop.last_recommendations();
    for (std::size_t u = 0; u < recs.size(); ++u) {
      for (std::size_t r = 0; r < recs[u].size(); ++r) {
        out << u << ',' << recs[u][r].item << ',' << (r + 1) << ',' << exact(recs[u][r].score)
            << '\n';
      }
    }
  });
  write_atomically(iter_dir / "record.csv", std::ios::out, [&](std::ostream& out) {
    write_record(out, loop.trace().records.back(), loop.trace());
  });
}

std::optional<int> latest_checkpoint(const fs::path& dir) {
  if (!fs::is_directory(dir)) return std::nullopt;
  std::optional<int> best;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    constexpr std::string_view kPrefix = "iter_";
    if (name.rfind(kPrefix, 0) != 0) continue;
    int t = 0;
    const char* first = name.data() + kPrefix.size();
    const char* last = name.data() + name.size();
    auto [ptr, ec] = std::from_chars(first, last, t);
    if (ec != std::errc() || ptr != last || t < 1) continue;
    if (!fs::exists(entry.path() / "record.csv")) continue;
    if (!best || t > *best) best = t;
  }
  return best;
}

FeedbackLoop resume_from_checkpoint(const fs::path& dir, const IndexedCatalog& catalog,
                                    const LoopConfig& config) {
  const auto latest = latest_checkpoint(dir);
  if (!latest) throw CheckpointError("no complete checkpoint under " + dir.string());
  const int t = *latest;

  LoopTrace trace;
  trace.tracked_items = config.tracked_items;
  for (int s = 1; s <= t; ++s) {
    const fs::path file = iteration_dir(dir, s) / "record.csv";
    StoredRecord stored = read_record(file);
    if (stored.record.iteration != s) {
      throw CheckpointError(file.string() + " holds iteration " +
                            std::to_string(stored.record.iteration));
    }
    if (stored.tracked_items != config.tracked_items) {
      throw CheckpointError(file.string() + " tracks different items than the configuration");
    }
    if (s == 1) {
      trace.initial_total_plays = stored.initial_total_plays;
    } else if (stored.initial_total_plays != trace.initial_total_plays) {
      throw CheckpointError(file.string() + " disagrees on the initial play total");
    }
    trace.records.push_back(std::move(stored.record));
  }

  const fs::path iter_dir = iteration_dir(dir, t);
  std::ifstream matrix_in(iter_dir / "matrix.bin", std::ios::binary);
  if (!matrix_in) throw CheckpointError("missing " + (iter_dir / "matrix.bin").string());
  SparseInteractionMatrix matrix = SparseInteractionMatrix::read_snapshot(matrix_in);
  std::ifstream model_in(iter_dir / "model.bin", std::ios::binary);
  if (!model_in) throw CheckpointError("missing " + (iter_dir / "model.bin").string());
  FactorModel model = FactorModel::read_snapshot(model_in);
  if (model.hyper.k != config.hyper.k) {
    throw CheckpointError("checkpoint model has k=" + std::to_string(model.hyper.k) +
                          " but the configuration asks for k=" + std::to_string(config.hyper.k));
  }
  try {
    return FeedbackLoop::resume(std::move(matrix), catalog, config, std::move(model),
                                std::move(trace));
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint does not match the run: ") + e.what());
  }
}

LoopTrace run_loop(const SparseInteractionMatrix& matrix, const IndexedCatalog& catalog,
                   const LoopConfig& config, const CheckpointOptions& checkpoints) {
  std::optional<FeedbackLoop> loop;
  if (checkpoints.resume && latest_checkpoint(checkpoints.dir)) {
    loop.emplace(resume_from_checkpoint(checkpoints.dir, catalog, config));
    if (loop->trace().initial_total_plays != matrix.total()) {
      throw CheckpointError("checkpoint was produced from different input data");
    }
  } else {
    loop.emplace(matrix, catalog, config);
  }
  while (!loop->done()) {
    if (checkpoints.stop_after > 0 && loop->completed() >= checkpoints.stop_after) break;
    loop->step();
    write_checkpoint(checkpoints.dir, *loop);
  }
  return loop->trace();
}

}  // namespace exposure_loop
