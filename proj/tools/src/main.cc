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

// Command-line driver: synth, ingest, train, analyze, loop and report.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "exposure_loop/analysis.h"
#include "exposure_loop/config.h"
#include "exposure_loop/factorize.h"
#include "exposure_loop/ingest.h"
#include "exposure_loop/report.h"
#include "exposure_loop/simulate.h"
#include "exposure_loop/synth.h"
#include "pipeline.h"

namespace fs = std::filesystem;
using namespace exposure_loop;

namespace {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kBadInput = 3,
  kCheckpoint = 4,
  kIo = 5,
  kNumeric = 6,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> listen_weight;
  std::optional<std::string> resume;
  std::optional<std::string> trace;
  bool include_seen = false;
  int stop_after = 0;
};

int fail(const char* kind, const std::string& message, int code,
         std::optional<std::size_t> line = std::nullopt) {
  nlohmann::json j = {{"error", kind}, {"message", message}, {"exit_code", code}};
  if (line) j["line"] = *line;
  std::cerr << j.dump() << std::endl;
  return code;
}

void setup_logging() {
  auto logger = spdlog::stderr_logger_mt("exposure_loop");
  logger->set_pattern("[%H:%M:%S.%e] [%l] %v");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("EXPOSURE_LOOP_LOG");
  const std::string level = env ? env : "info";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    throw UsageError("EXPOSURE_LOOP_LOG must be error, info or debug, not '" + level + "'");
  }
}

RunConfig load_config(const Flags& flags) {
  KeyValues values;
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    if (!in) throw cli::IoError("cannot open config file " + flags.config);
    values = parse_key_values(in);
  }
  if (flags.resume) {
    if (flags.out && fs::path(*flags.out) != fs::path(*flags.resume)) {
      throw UsageError("--out and --resume name different directories");
    }
    values["out"] = *flags.resume;
  }
  if (flags.out) values["out"] = *flags.out;
  if (flags.seed) values["seed"] = std::to_string(*flags.seed);
  if (flags.threads) values["threads"] = std::to_string(*flags.threads);
  if (flags.listen_weight) values["listen_weight"] = *flags.listen_weight;
  if (flags.include_seen) values["include_seen"] = "true";
  return RunConfig::from_values(values);
}

int cmd_synth(const RunConfig& config) {
  const auto synth = config.synth_config();
  const auto data = generate(synth);
  cli::write_synth_files(config.out, data);
  std::set<std::string> tags;
  for (const auto& [item, item_tags] : data.catalog.tags_of) tags.insert(item_tags.begin(), item_tags.end());
  std::cout << "users=" << data.users.size() << " items=" << data.items.size()
            << " artists=" << synth.n_artists << " tags=" << tags.size()
            << " interactions=" << data.interactions.size() << " out=" << config.out << '\n';
  return kOk;
}

void print_dataset(const cli::Dataset& d) {
  std::cout << "users=" << d.matrix.rows() << " items=" << d.matrix.cols()
            << " artists=" << d.catalog.n_artists() << " tags=" << d.catalog.n_tags()
            << " interactions=" << d.matrix.nnz() << " plays=" << d.matrix.total()
            << " raw_interactions=" << d.raw_interactions << '\n';
}

void write_names(const fs::path& path, const EntityIndex& index) {
  auto out = cli::open_output(path);
  for (const auto& name : index.names()) out << name << '\n';
}

int cmd_ingest(const RunConfig& config) {
  const auto data = cli::load_dataset(config);
  const fs::path out = config.out;
  {
    auto bin = cli::open_output(out / "matrix.bin", true);
    data.matrix.write_snapshot(bin);
  }
  write_names(out / "users.txt", data.indices.users);
  write_names(out / "items.txt", data.indices.items);
  print_dataset(data);
  return kOk;
}

int cmd_train(const RunConfig& config) {
  const auto data = cli::load_dataset(config);
  const auto hyper = config.model_hyper();
  spdlog::info("training k={} alpha={} lambda={} sweeps={} on {} users x {} items", hyper.k,
               hyper.alpha, hyper.lambda, hyper.sweeps, data.matrix.rows(), data.matrix.cols());
  const auto model = train(data.matrix, hyper, config.worker_count());
  {
    auto bin = cli::open_output(fs::path(config.out) / "model.bin", true);
    model.write_snapshot(bin);
  }
  std::cout << "users=" << model.n_users() << " items=" << model.n_items() << " k=" << model.k()
            << " objective=" << objective(data.matrix, model) << '\n';
  return kOk;
}

int cmd_analyze(const RunConfig& config) {
  const auto data = cli::load_dataset(config);
  const auto model = train(data.matrix, config.model_hyper(), config.worker_count());
  const auto report = analyze(data.matrix, data.catalog, model, config.analysis_options());
  write_analysis_reports(config.out, report, data.catalog);
  std::cout << "gini_artists_recommended=" << format_fixed(report.gini_artists_recommended)
            << " gini_artists_listened=" << format_fixed(report.gini_artists_listened)
            << " coverage_artists=" << format_fixed(report.coverage_artists)
            << " coverage_items=" << format_fixed(report.coverage_items)
            << " long_tail_delta_tags=" << format_fixed(report.tags.long_tail_delta)
            << " long_tail_delta_artists=" << format_fixed(report.artists.long_tail_delta) << '\n';
  return kOk;
}

int cmd_loop(const RunConfig& config, const Flags& flags) {
  const auto data = cli::load_dataset(config);
  const auto tracked = cli::resolve_tracked(config, data);
  const auto loop_config = config.loop_config(tracked);
  const fs::path out = config.out;
  CheckpointOptions checkpoints{out / "checkpoints", flags.resume.has_value(), flags.stop_after};
  if (checkpoints.resume) {
    const auto latest = latest_checkpoint(checkpoints.dir);
    spdlog::info("resuming from {}", latest ? "iteration " + std::to_string(*latest)
                                            : std::string("scratch (no checkpoint found)"));
  }
  const auto trace = run_loop(data.matrix, data.catalog, loop_config, checkpoints);

  std::vector<std::string> labels;
  for (auto item : trace.tracked_items) labels.push_back(data.indices.items.name(item));
  {
    auto csv = cli::open_output(out / "trace.csv");
    write_trace_csv(csv, trace, labels);
  }
  const bool finished = static_cast<int>(trace.records.size()) == loop_config.n_iterations;
  std::cout << "iterations=" << trace.records.size() << '/' << loop_config.n_iterations
            << " status=" << (finished ? "complete" : "stopped") << " trace=" << (out / "trace.csv").string()
            << '\n';
  return kOk;
}

int cmd_report(const RunConfig& config, const Flags& flags) {
  const fs::path path = flags.trace ? fs::path(*flags.trace) : fs::path(config.out) / "trace.csv";
  std::ifstream in(path);
  if (!in) throw cli::IoError("cannot open trace file " + path.string());
  const auto table = read_trace_csv(in);
  if (table.rows.empty()) throw std::invalid_argument("trace " + path.string() + " has no rows");
  const std::size_t last = table.rows.size() - 1;
  const auto summary = [&](const std::string& column) {
    std::cout << column << ' ' << table.rows.front()[table.column(column)] << " -> "
              << table.rows[last][table.column(column)] << '\n';
  };
  std::cout << "iterations " << table.rows.size() << '\n';
  summary("gini_artists");
  summary("coverage_artists");
  summary("coverage_items");
  summary("total_plays");
  for (const auto& column : table.columns) {
    if (column.rfind("reach_", 0) == 0) summary(column);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exposure analysis and feedback-loop simulation for implicit-feedback "
               "matrix factorization"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config, "key = value configuration file");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--seed", flags.seed, "root random seed");
  app.add_option("--threads", flags.threads, "worker threads (0 = all cores)");
  app.add_option("--listen-weight", flags.listen_weight, "listening weight: binary or plays")
      ->check(CLI::IsMember({"binary", "plays"}));
  app.add_flag("--include-seen", flags.include_seen,
               "allow items a user already played in recommendations");

  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  auto* ingest = app.add_subcommand("ingest", "filter and index the interaction data");
  auto* train_cmd = app.add_subcommand("train", "train the factorization model");
  auto* analyze_cmd = app.add_subcommand("analyze", "compare recommended and listened exposure");
  auto* loop = app.add_subcommand("loop", "simulate the recommendation feedback loop");
  loop->add_option("--resume", flags.resume, "continue the run whose output directory is DIR");
  loop->add_option("--stop-after", flags.stop_after, "stop after N completed iterations")
      ->check(CLI::NonNegativeNumber);
  auto* report = app.add_subcommand("report", "summarize a loop trace");
  report->add_option("--trace", flags.trace, "trace.csv to read (default <out>/trace.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kUsage);
  }

  try {
    setup_logging();
    const auto config = load_config(flags);
    if (synth->parsed()) return cmd_synth(config);
    if (ingest->parsed()) return cmd_ingest(config);
    if (train_cmd->parsed()) return cmd_train(config);
    if (analyze_cmd->parsed()) return cmd_analyze(config);
    if (loop->parsed()) return cmd_loop(config, flags);
    if (report->parsed()) return cmd_report(config, flags);
    return fail("usage", "no subcommand", kUsage);
  } catch (const UsageError& e) {
    return fail("usage", e.what(), kUsage);
  } catch (const ConfigError& e) {
    return fail("config", e.what(), kUsage);
  } catch (const ParseError& e) {
    return fail("parse", e.what(), kBadInput, e.line());
  } catch (const CatalogError& e) {
    return fail("catalog", e.what(), kBadInput);
  } catch (const SnapshotError& e) {
    return fail("checkpoint", e.what(), kCheckpoint);
  } catch (const CheckpointError& e) {
    return fail("checkpoint", e.what(), kCheckpoint);
  } catch (const cli::IoError& e) {
    return fail("io", e.what(), kIo);
  } catch (const SingularSystemError& e) {
    return fail("numeric", e.what(), kNumeric);
  } catch (const std::invalid_argument& e) {
    return fail("invalid_argument", e.what(), kBadInput);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kInternal);
  }
}
