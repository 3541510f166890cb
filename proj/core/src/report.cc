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

#include "exposure_loop/report.h"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "text_util.h"

namespace exposure_loop {

namespace fs = std::filesystem;

namespace {

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  writer(out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_buckets(std::ostream& out, const char* entity, const BucketTable& table) {
  for (std::size_t b = 0; b < table.buckets.size(); ++b) {
    const auto& bucket = table.buckets[b];
    out << entity << ',' << (b + 1) << ',' << bucket.first_rank << ',' << bucket.last_rank << ','
        << format_fixed(bucket.recommended) << ',' << format_fixed(bucket.listened) << '\n';
  }
}

// Splits one CSV record, honoring double-quoted fields.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        fields.back() += '"';
        ++k;
      } else if (ch == '"') {
        quoted = false;
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else {
      fields.back() += ch;
    }
  }
  return fields;
}

}  // namespace

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  std::string s(buf);
  // Avoid "-0.000000".
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void write_gini_csv(std::ostream& out, const AnalysisReport& report) {
  out << "source,entity,gini\n";
  out << "recommended,artists," << format_fixed(report.gini_artists_recommended) << '\n';
  out << "recommended,items," << format_fixed(report.gini_items_recommended) << '\n';
  out << "listened,artists," << format_fixed(report.gini_artists_listened) << '\n';
  out << "listened,items," << format_fixed(report.gini_items_listened) << '\n';
}

void write_coverage_csv(std::ostream& out, const AnalysisReport& report) {
  out << "metric,value\n";
  out << "coverage_artists," << format_fixed(report.coverage_artists) << '\n';
  out << "coverage_items," << format_fixed(report.coverage_items) << '\n';
}

void write_tag_distribution_csv(std::ostream& out, const AnalysisReport& report,
                                const IndexedCatalog& catalog) {
  out << "tag,rank,recommended,listened\n";
  for (std::size_t r = 0; r < report.tags.ranking.size(); ++r) {
    const auto t = report.tags.ranking[r];
    out << csv_field(catalog.tags.name(t)) << ',' << (r + 1) << ',' << format_fixed(report.tags.recommended[t])
        << ',' << format_fixed(report.tags.listened[t]) << '\n';
  }
}

void write_bucket_table_csv(std::ostream& out, const AnalysisReport& report) {
  out << "entity,bucket,first_rank,last_rank,recommended,listened\n";
  write_buckets(out, "tags", report.tags.buckets);
  write_buckets(out, "artists", report.artists.buckets);
}

void write_long_tail_csv(std::ostream& out, const AnalysisReport& report) {
  out << "entity,head_cutoff,long_tail_delta\n";
  out << "tags," << report.head_cutoff << ',' << format_fixed(report.tags.long_tail_delta) << '\n';
  out << "artists," << report.head_cutoff << ',' << format_fixed(report.artists.long_tail_delta)
      << '\n';
}

void write_analysis_reports(const fs::path& dir, const AnalysisReport& report,
                            const IndexedCatalog& catalog) {
  fs::create_directories(dir);
  write_file(dir / "gini.csv", [&](std::ostream& out) { write_gini_csv(out, report); });
  write_file(dir / "coverage.csv", [&](std::ostream& out) { write_coverage_csv(out, report); });
  write_file(dir / "tag_distribution.csv",
             [&](std::ostream& out) { write_tag_distribution_csv(out, report, catalog); });
  write_file(dir / "bucket_table.csv",
             [&](std::ostream& out) { write_bucket_table_csv(out, report); });
  write_file(dir / "long_tail.csv", [&](std::ostream& out) { write_long_tail_csv(out, report); });
}

void write_trace_csv(std::ostream& out, const LoopTrace& trace,
                     const std::vector<std::string>& labels) {
  if (!labels.empty() && labels.size() != trace.tracked_items.size()) {
    throw std::invalid_argument("one label per tracked item expected");
  }
  out << "iteration,gini_artists,coverage_artists,coverage_items,total_plays";
  for (std::size_t c = 0; c < trace.tracked_items.size(); ++c) {
    out << ',' << csv_field("reach_" + (labels.empty() ? std::to_string(trace.tracked_items[c])
                                                        : labels[c]));
  }
  out << '\n';
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << format_fixed(r.gini_artists) << ','
        << format_fixed(r.coverage_artists) << ',' << format_fixed(r.coverage_items) << ','
        << r.total_plays;
    for (auto reach : r.tracked_reach) out << ',' << reach;
    out << '\n';
  }
}

std::size_t TraceTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return c;
  }
  throw std::out_of_range("no column '" + name + "' in trace");
}

double TraceTable::value(std::size_t row, const std::string& name) const {
  return std::stod(rows.at(row).at(column(name)));
}

TraceTable read_trace_csv(std::istream& in) {
  TraceTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace file");
  table.columns = split_csv(internal::strip_cr(line));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = internal::strip_cr(line);
    if (internal::is_blank(view)) continue;
    auto fields = split_csv(view);
    if (fields.size() != table.columns.size()) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(table.columns.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

}  // namespace exposure_loop
