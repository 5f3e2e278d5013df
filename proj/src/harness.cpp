#include "otbag/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace otbag {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

AnyModel train_algorithm(Algorithm algorithm, const ExperimentConfig& config,
                         std::span<const TaggedInstance> stream,
                         SeededRng& rng) {
  switch (algorithm) {
    case Algorithm::otbag:
      return train_otbag(stream, config.members, config.learner, rng);
    case Algorithm::sdmv:
      return train_sdmv(stream, config.members, config.learner, rng);
    case Algorithm::jdsmv: {
      const Segmentation segmentation =
          config.segment_length ? Segmentation::by_length(*config.segment_length)
                                : Segmentation::by_alpha(config.alpha);
      return train_jdsmv(stream, config.members, config.learner, segmentation,
                         rng);
    }
  }
  raise("BadAlgorithm", "unknown algorithm");
}

Dataset load_configured(const ExperimentConfig& config,
                        const std::string& path) {
  switch (config.format) {
    case DataFormat::csv:
      return load_dense_csv(path, config.csv);
    case DataFormat::svmlight:
      return load_svmlight(path, config.svmlight_dimension);
  }
  raise("BadFormat", "unknown data format");
}

std::string format_cell(double mean_fraction, double stddev_fraction) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << mean_fraction * 100.0 << "±"
      << stddev_fraction;
  return out.str();
}

}  // namespace

std::string algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::otbag:
      return "otbag";
    case Algorithm::sdmv:
      return "sdmv";
    case Algorithm::jdsmv:
      return "jdsmv";
  }
  return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "otbag") return Algorithm::otbag;
  if (name == "sdmv") return Algorithm::sdmv;
  if (name == "jdsmv") return Algorithm::jdsmv;
  raise("BadAlgorithm", "unknown algorithm '" + name + "'");
}

SyntheticKind synthetic_kind_from_name(const std::string& name) {
  if (name == "aligned") return SyntheticKind::aligned;
  if (name == "flipped") return SyntheticKind::flipped;
  raise("BadSyntheticKind", "unknown synthetic kind '" + name + "'");
}

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "table") return ReportFormat::table;
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  raise("BadReportFormat", "unknown report format '" + name + "'");
}

void validate(const ExperimentConfig& config) {
  if (config.repetitions < 1) raise("BadConfig", "repetitions must be >= 1");
  if (config.members < 1) raise("BadConfig", "m must be >= 1");
  if (config.alpha < 2) raise("BadConfig", "alpha must be >= 2");
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0))
    raise("BadFraction", "train fraction must lie in (0, 1)");
  if (!(config.subsample_fraction > 0.0 && config.subsample_fraction <= 1.0))
    raise("BadFraction", "subsample fraction must lie in (0, 1]");
  if (config.algorithms.empty()) raise("BadConfig", "no algorithms selected");
  if (config.format == DataFormat::svmlight && config.svmlight_dimension == 0)
    raise("BadDimension", "svmlight format needs an explicit dimension");
}

ExperimentConfig config_from_json_text(const std::string& text) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise("BadConfigFile", e.what());
  }
  ExperimentConfig config;
  for (const auto& [key, value] : parsed.items()) {
    try {
      if (key == "source") {
        config.source_path = value.get<std::string>();
      } else if (key == "target") {
        config.target_path = value.get<std::string>();
      } else if (key == "format") {
        const std::string name = value.get<std::string>();
        if (name == "csv") {
          config.format = DataFormat::csv;
        } else if (name == "svmlight") {
          config.format = DataFormat::svmlight;
        } else {
          raise("BadConfigFile", "unknown format '" + name + "'");
        }
      } else if (key == "csv_header") {
        config.csv.has_header = value.get<bool>();
      } else if (key == "label_column") {
        config.csv.label_column = value.get<int>();
      } else if (key == "positive_value") {
        config.csv.positive_value = value.get<std::string>();
      } else if (key == "dimension") {
        config.svmlight_dimension = value.get<std::size_t>();
      } else if (key == "mixed_foreign") {
        config.mixed_foreign_path = value.get<std::string>();
      } else if (key == "zscore") {
        config.zscore = value.get<bool>();
      } else if (key == "subsample") {
        config.subsample_fraction = value.get<double>();
      } else if (key == "m") {
        config.members = value.get<std::size_t>();
      } else if (key == "alpha") {
        config.alpha = value.get<std::size_t>();
      } else if (key == "segment_length") {
        config.segment_length = value.get<std::size_t>();
      } else if (key == "train_fraction") {
        config.train_fraction = value.get<double>();
      } else if (key == "reps") {
        config.repetitions = value.get<std::size_t>();
      } else if (key == "seed") {
        config.base_seed = value.get<std::uint64_t>();
      } else if (key == "learner") {
        config.learner.kind = learner_kind_from_name(value.get<std::string>());
      } else if (key == "learning_rate") {
        config.learner.learning_rate = value.get<double>();
      } else if (key == "algos") {
        config.algorithms.clear();
        for (const auto& name : value)
          config.algorithms.push_back(
              algorithm_from_name(name.get<std::string>()));
      } else {
        raise("BadConfigFile", "unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      raise("BadConfigFile", "key '" + key + "': " + e.what());
    }
  }
  return config;
}

std::string config_to_json_text(const ExperimentConfig& config) {
  nlohmann::json j{{"source", config.source_path},
                   {"target", config.target_path},
                   {"format",
                    config.format == DataFormat::csv ? "csv" : "svmlight"},
                   {"csv_header", config.csv.has_header},
                   {"label_column", config.csv.label_column},
                   {"positive_value", config.csv.positive_value},
                   {"zscore", config.zscore},
                   {"subsample", config.subsample_fraction},
                   {"m", config.members},
                   {"alpha", config.alpha},
                   {"train_fraction", config.train_fraction},
                   {"reps", config.repetitions},
                   {"seed", config.base_seed},
                   {"learner", learner_kind_name(config.learner.kind)},
                   {"learning_rate", config.learner.learning_rate}};
  if (config.format == DataFormat::svmlight)
    j["dimension"] = config.svmlight_dimension;
  if (config.mixed_foreign_path) j["mixed_foreign"] = *config.mixed_foreign_path;
  if (config.segment_length) j["segment_length"] = *config.segment_length;
  nlohmann::json algos = nlohmann::json::array();
  for (Algorithm a : config.algorithms) algos.push_back(algorithm_name(a));
  j["algos"] = algos;
  return j.dump(2);
}

double CellResult::mean() const {
  double sum = 0.0;
  for (double a : accuracies) sum += a;
  return accuracies.empty() ? 0.0 : sum / static_cast<double>(accuracies.size());
}

double CellResult::stddev() const {
  if (accuracies.empty()) return 0.0;
  const double m = mean();
  double sum = 0.0;
  for (double a : accuracies) sum += (a - m) * (a - m);
  return std::sqrt(sum / static_cast<double>(accuracies.size()));
}

bool operator==(const CellResult& a, const CellResult& b) {
  return a.task == b.task && a.algorithm == b.algorithm &&
         a.accuracies == b.accuracies;
}

bool operator==(const ResultTable& a, const ResultTable& b) {
  return a.cells == b.cells;
}

ResultTable run_repetitions(const ExperimentConfig& config,
                            const std::string& task_name,
                            const TaskFactory& factory) {
  validate(config);
  ResultTable table;
  for (Algorithm algorithm : config.algorithms)
    table.cells.push_back({task_name, algorithm_name(algorithm), {}, {}});

  for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
    const std::uint64_t seed = config.base_seed + rep;
    TransferTask task;
    std::vector<TaggedInstance> stream;
    try {
      task = factory(seed);
      stream = interleave_stream(task, seed);
    } catch (const Error& e) {
      raise(e.code(),
            e.message() + " (repetition " + std::to_string(rep) + ")");
    }
    const std::vector<TaggedInstance> test =
        tag_dataset(task.target_test, DomainTag::target);

    for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
      SeededRng rng(seed);
      const auto start = Clock::now();
      AnyModel model;
      try {
        model = train_algorithm(config.algorithms[a], config, stream, rng);
      } catch (const Error& e) {
        raise(e.code(), e.message() + " (repetition " +
                            std::to_string(rep) + ")");
      }
      table.cells[a].wall_ms.push_back(elapsed_ms(start));
      table.cells[a].accuracies.push_back(evaluate_accuracy(model, test));
    }
  }
  return table;
}

namespace {

TaskFactory file_task_factory(const ExperimentConfig& config,
                              std::string* task_name) {
  Dataset source = load_configured(config, config.source_path);
  Dataset target = load_configured(config, config.target_path);
  if (config.mixed_foreign_path) {
    const Dataset foreign = load_configured(config, *config.mixed_foreign_path);
    source = build_mixed_source(source, foreign);
  }
  if (task_name) *task_name = source.name + "->" + target.name;

  return [config, source = std::move(source),
          target = std::move(target)](std::uint64_t seed) {
    Dataset rep_source = source;
    Dataset rep_target = target;
    if (config.subsample_fraction < 1.0) {
      SeededRng rng(seed);
      rep_source = subsample(rep_source, config.subsample_fraction, rng);
      rep_target = subsample(rep_target, config.subsample_fraction, rng);
    }
    TransferTask task =
        make_task(rep_source, rep_target, config.train_fraction, seed);
    if (config.zscore) {
      // Fit on the target training split only; apply everywhere.
      const FeatureScaler scaler = fit_scaler(task.target_train);
      task.target_train = apply_scaler(scaler, task.target_train);
      task.source = apply_scaler(scaler, task.source);
      task.target_test = apply_scaler(scaler, task.target_test);
    }
    return task;
  };
}

TaskFactory strip_source(const TaskFactory& factory) {
  return [factory](std::uint64_t seed) {
    TransferTask task = factory(seed);
    task.source.instances.clear();
    return task;
  };
}

ResultTable relabel_baseline(ResultTable table) {
  for (CellResult& cell : table.cells) cell.algorithm = "target-only";
  return table;
}

ExperimentConfig baseline_config(const ExperimentConfig& config) {
  ExperimentConfig out = config;
  out.algorithms = {Algorithm::otbag};
  return out;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& config) {
  validate(config);
  std::string task_name;
  const TaskFactory factory = file_task_factory(config, &task_name);
  return run_repetitions(config, task_name, factory);
}

ResultTable run_baseline_target_only(const ExperimentConfig& config) {
  const ExperimentConfig base = baseline_config(config);
  std::string task_name;
  const TaskFactory factory = file_task_factory(base, &task_name);
  return relabel_baseline(
      run_repetitions(base, task_name, strip_source(factory)));
}

std::string synthetic_task_name(const SyntheticSpec& spec) {
  std::ostringstream out;
  out << (spec.kind == SyntheticKind::aligned ? "aligned" : "flipped") << "(d="
      << spec.dimension << ",sep=" << spec.separation << ")";
  return out.str();
}

TransferTask make_synthetic_task(const SyntheticSpec& spec,
                                 std::uint64_t seed) {
  if (spec.dimension < 1) raise("BadDimension", "dimension must be >= 1");
  if (spec.n_source < 1 || spec.n_target < 1 || spec.n_test < 1)
    raise("BadConfig", "synthetic set sizes must be >= 1");

  SeededRng rng(seed);
  const double offset = spec.separation / 2.0;

  const auto draw_set = [&](std::size_t count, bool flip_labels) {
    Dataset dataset;
    dataset.dimension = spec.dimension;
    dataset.instances.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      // Alternate classes for an exactly balanced set.
      const bool positive_cloud = (i % 2) == 1;
      std::vector<double> values(spec.dimension);
      for (std::size_t d = 0; d < spec.dimension; ++d)
        values[d] = rng.next_gaussian();
      values[0] += positive_cloud ? offset : -offset;
      const bool positive_label = flip_labels ? !positive_cloud : positive_cloud;
      dataset.instances.push_back(
          {FeatureVector::dense(std::move(values)),
           positive_label ? BinaryLabel::positive : BinaryLabel::negative});
    }
    return dataset;
  };

  TransferTask task;
  task.seed = seed;
  task.source = draw_set(spec.n_source, spec.kind == SyntheticKind::flipped);
  task.source.name = "synthetic-source";
  task.target_train = draw_set(spec.n_target, false);
  task.target_train.name = "synthetic-target.train";
  task.target_test = draw_set(spec.n_test, false);
  task.target_test.name = "synthetic-target.test";
  return task;
}

ResultTable run_synthetic(const ExperimentConfig& config,
                          const SyntheticSpec& spec) {
  return run_repetitions(config, synthetic_task_name(spec),
                         [&spec](std::uint64_t seed) {
                           return make_synthetic_task(spec, seed);
                         });
}

ResultTable run_synthetic_baseline(const ExperimentConfig& config,
                                   const SyntheticSpec& spec) {
  const ExperimentConfig base = baseline_config(config);
  return relabel_baseline(run_repetitions(
      base, synthetic_task_name(spec), [&spec](std::uint64_t seed) {
        TransferTask task = make_synthetic_task(spec, seed);
        task.source.instances.clear();
        return task;
      }));
}

void merge_into(ResultTable& table, const ResultTable& extra) {
  table.cells.insert(table.cells.end(), extra.cells.begin(), extra.cells.end());
}

std::string render_report(const ResultTable& table, ReportFormat format) {
  if (table.cells.empty()) raise("EmptyTable", "no results to report");
  std::ostringstream out;

  switch (format) {
    case ReportFormat::table: {
      std::size_t task_width = 4, algo_width = 9;
      for (const CellResult& cell : table.cells) {
        task_width = std::max(task_width, cell.task.size());
        algo_width = std::max(algo_width, cell.algorithm.size());
      }
      out << std::left << std::setw(static_cast<int>(task_width)) << "task"
          << "  " << std::setw(static_cast<int>(algo_width)) << "algorithm"
          << "  " << std::setw(14) << "accuracy" << "  reps  ms/run\n";
      for (const CellResult& cell : table.cells) {
        double mean_ms = 0.0;
        for (double ms : cell.wall_ms) mean_ms += ms;
        if (!cell.wall_ms.empty())
          mean_ms /= static_cast<double>(cell.wall_ms.size());
        out << std::left << std::setw(static_cast<int>(task_width)) << cell.task
            << "  " << std::setw(static_cast<int>(algo_width)) << cell.algorithm
            << "  " << std::setw(14) << format_cell(cell.mean(), cell.stddev())
            << "  " << std::setw(4) << cell.accuracies.size() << "  "
            << std::fixed << std::setprecision(3) << mean_ms << '\n';
      }
      break;
    }
    case ReportFormat::csv: {
      out << "task,algorithm,repetition,accuracy,wall_ms\n";
      out << std::setprecision(17);
      for (const CellResult& cell : table.cells) {
        for (std::size_t r = 0; r < cell.accuracies.size(); ++r) {
          out << cell.task << ',' << cell.algorithm << ',' << r << ','
              << cell.accuracies[r] << ',' << cell.wall_ms[r] << '\n';
        }
      }
      break;
    }
    case ReportFormat::json: {
      nlohmann::json cells = nlohmann::json::array();
      for (const CellResult& cell : table.cells) {
        cells.push_back({{"task", cell.task},
                         {"algorithm", cell.algorithm},
                         {"mean", cell.mean()},
                         {"stddev", cell.stddev()},
                         {"accuracies", cell.accuracies}});
      }
      out << nlohmann::json{{"cells", cells}}.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

void emit_report(const ResultTable& table, ReportFormat format,
                 const std::filesystem::path& path) {
  const std::string text = render_report(table, format);
  std::ofstream out(path);
  if (!out) raise("IoError", "cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) raise("IoError", "failed writing '" + path.string() + "'");
}

ResultTable table_from_json(const std::string& text) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise("BadReportFile", e.what());
  }
  ResultTable table;
  for (const nlohmann::json& cell : parsed.at("cells")) {
    CellResult result;
    result.task = cell.at("task").get<std::string>();
    result.algorithm = cell.at("algorithm").get<std::string>();
    result.accuracies = cell.at("accuracies").get<std::vector<double>>();
    table.cells.push_back(std::move(result));
  }
  return table;
}

}  // namespace otbag
