#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "otbag/data.hpp"
#include "otbag/ensemble.hpp"

namespace otbag {

enum class Algorithm { otbag, sdmv, jdsmv };

std::string algorithm_name(Algorithm algorithm);
Algorithm algorithm_from_name(const std::string& name);

enum class DataFormat { csv, svmlight };

struct ExperimentConfig {
  // Data sources (file-based runs).
  std::string source_path;
  std::string target_path;
  DataFormat format = DataFormat::csv;
  CsvOptions csv;
  std::size_t svmlight_dimension = 0;  // required when format == svmlight
  std::optional<std::string> mixed_foreign_path;
  bool zscore = false;
  double subsample_fraction = 1.0;

  // Protocol.
  std::size_t members = 10;
  std::size_t alpha = 10;
  std::optional<std::size_t> segment_length;  // overrides alpha when set
  double train_fraction = 0.4;
  std::size_t repetitions = 20;
  std::uint64_t base_seed = 1;
  LearnerConfig learner;
  std::vector<Algorithm> algorithms = {Algorithm::otbag, Algorithm::sdmv,
                                       Algorithm::jdsmv};
};

void validate(const ExperimentConfig& config);

// JSON config file support; unknown keys are rejected. Keys mirror the CLI
// flag names (source, target, format, algos, m, alpha, ...).
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& config);

// One (task, algorithm) cell: per-repetition accuracies as fractions, plus
// per-repetition training wall-clock. Timings are diagnostics: they are
// excluded from equality and from the JSON report so reruns byte-match.
struct CellResult {
  std::string task;
  std::string algorithm;
  std::vector<double> accuracies;
  std::vector<double> wall_ms;

  double mean() const;
  double stddev() const;  // population
};

struct ResultTable {
  std::vector<CellResult> cells;
};

bool operator==(const CellResult& a, const CellResult& b);
bool operator==(const ResultTable& a, const ResultTable& b);

// Builds the repetition task for a given per-repetition seed.
using TaskFactory = std::function<TransferTask(std::uint64_t seed)>;

// The core repetition loop: for repetition r, seed = base_seed + r; build the
// task, interleave the stream, train every selected algorithm, evaluate on
// the target test split.
ResultTable run_repetitions(const ExperimentConfig& config,
                            const std::string& task_name,
                            const TaskFactory& factory);

ResultTable run_experiment(const ExperimentConfig& config);

// Control run: the stream holds only target instances, trained with the
// plain bagging algorithm; reported as algorithm "target-only".
ResultTable run_baseline_target_only(const ExperimentConfig& config);

// --- synthetic tasks --------------------------------------------------------

enum class SyntheticKind { aligned, flipped };

SyntheticKind synthetic_kind_from_name(const std::string& name);

// Two unit-variance Gaussian class clouds centered at +-(separation/2) along
// the first axis. "aligned" draws the source from the target distribution;
// "flipped" inverts the source labels to force negative transfer.
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::aligned;
  std::size_t dimension = 10;
  std::size_t n_source = 1000;
  std::size_t n_target = 40;
  std::size_t n_test = 1000;
  double separation = 4.0;
};

TransferTask make_synthetic_task(const SyntheticSpec& spec, std::uint64_t seed);
std::string synthetic_task_name(const SyntheticSpec& spec);

ResultTable run_synthetic(const ExperimentConfig& config,
                          const SyntheticSpec& spec);
ResultTable run_synthetic_baseline(const ExperimentConfig& config,
                                   const SyntheticSpec& spec);

// --- reports ----------------------------------------------------------------

enum class ReportFormat { table, csv, json };

ReportFormat report_format_from_name(const std::string& name);

// table: "<mean*100 to 2dp>±<std to 2dp>" cells; csv: long form with one row
// per repetition; json: full precision, deterministic bytes, no timings.
std::string render_report(const ResultTable& table, ReportFormat format);
void emit_report(const ResultTable& table, ReportFormat format,
                 const std::filesystem::path& path);

// Inverse of the json report; mean/std are recomputed from the accuracies.
ResultTable table_from_json(const std::string& text);

void merge_into(ResultTable& table, const ResultTable& extra);

}  // namespace otbag
