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

#ifndef EXPOSURE_LOOP_REPORT_H_
#define EXPOSURE_LOOP_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "exposure_loop/analysis.h"
#include "exposure_loop/ingest.h"
#include "exposure_loop/simulate.h"

// CSV writers. One header row, comma separated, '.' decimals with six places.
namespace exposure_loop {

std::string format_fixed(double value);

// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_field(std::string_view value);

// source,entity,gini
void write_gini_csv(std::ostream& out, const AnalysisReport& report);
// metric,value (coverage_artists, coverage_items)
void write_coverage_csv(std::ostream& out, const AnalysisReport& report);
// tag,rank,recommended,listened in listened-popularity order
void write_tag_distribution_csv(std::ostream& out, const AnalysisReport& report,
                                const IndexedCatalog& catalog);
// entity,bucket,first_rank,last_rank,recommended,listened
void write_bucket_table_csv(std::ostream& out, const AnalysisReport& report);
// entity,head_cutoff,long_tail_delta
void write_long_tail_csv(std::ostream& out, const AnalysisReport& report);

// Writes gini.csv, coverage.csv, tag_distribution.csv, bucket_table.csv and
// long_tail.csv into dir.
void write_analysis_reports(const std::filesystem::path& dir, const AnalysisReport& report,
                            const IndexedCatalog& catalog);

// iteration,gini_artists,coverage_artists,coverage_items,total_plays followed
// by one reach_<label> column per tracked item. `labels` names the tracked
// items in order; when empty the item indices are used.
void write_trace_csv(std::ostream& out, const LoopTrace& trace,
                     const std::vector<std::string>& labels = {});

// Parsed trace.csv.
struct TraceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // Throws std::out_of_range for unknown columns.
  std::size_t column(const std::string& name) const;
  double value(std::size_t row, const std::string& name) const;
};

// Throws std::runtime_error for malformed input.
TraceTable read_trace_csv(std::istream& in);

}  // namespace exposure_loop

#endif  // EXPOSURE_LOOP_REPORT_H_
