#include <cmath>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "otbag/harness.hpp"

using namespace otbag;
using testutil::TempDir;
using testutil::error_code_of;

namespace {

ExperimentConfig small_protocol(std::vector<Algorithm> algorithms,
                                std::size_t reps = 5) {
  ExperimentConfig config;
  config.members = 5;
  config.alpha = 4;
  config.repetitions = reps;
  config.base_seed = 11;
  config.algorithms = std::move(algorithms);
  return config;
}

const SyntheticSpec kSmallAligned{SyntheticKind::aligned, 5, 120, 30, 60, 4.0};

double mean_of(const ResultTable& table, const std::string& algorithm) {
  for (const CellResult& cell : table.cells) {
    if (cell.algorithm == algorithm) return cell.mean();
  }
  REQUIRE(false);
  return 0.0;
}

}  // namespace

TEST_CASE("single repetition has zero stddev") {
  const ResultTable table =
      run_synthetic(small_protocol({Algorithm::otbag}, 1), kSmallAligned);
  REQUIRE(table.cells.size() == 1);
  CHECK(table.cells[0].accuracies.size() == 1);
  CHECK(table.cells[0].stddev() == 0.0);
}

TEST_CASE("identical configs produce identical tables") {
  const ExperimentConfig config =
      small_protocol({Algorithm::otbag, Algorithm::sdmv, Algorithm::jdsmv});
  const ResultTable first = run_synthetic(config, kSmallAligned);
  const ResultTable second = run_synthetic(config, kSmallAligned);
  CHECK(first == second);
}

TEST_CASE("first repetition matches a reps=1 run with the same base seed") {
  const ResultTable many =
      run_synthetic(small_protocol({Algorithm::otbag}, 6), kSmallAligned);
  const ResultTable one =
      run_synthetic(small_protocol({Algorithm::otbag}, 1), kSmallAligned);
  CHECK(many.cells[0].accuracies[0] == one.cells[0].accuracies[0]);
}

TEST_CASE("mean and stddev recompute from per-repetition accuracies") {
  const ResultTable table =
      run_synthetic(small_protocol({Algorithm::otbag}), kSmallAligned);
  const CellResult& cell = table.cells[0];
  double sum = 0.0;
  for (double a : cell.accuracies) sum += a;
  const double mean = sum / cell.accuracies.size();
  double variance = 0.0;
  for (double a : cell.accuracies) variance += (a - mean) * (a - mean);
  variance /= cell.accuracies.size();
  CHECK(std::abs(cell.mean() - mean) < 1e-12);
  CHECK(std::abs(cell.stddev() - std::sqrt(variance)) < 1e-12);
}

TEST_CASE("stripping the source makes otbag coincide with the baseline") {
  const ExperimentConfig config = small_protocol({Algorithm::otbag});
  const ResultTable baseline = run_synthetic_baseline(config, kSmallAligned);
  const ResultTable stripped = run_repetitions(
      config, synthetic_task_name(kSmallAligned), [](std::uint64_t seed) {
        TransferTask task = make_synthetic_task(kSmallAligned, seed);
        task.source.instances.clear();
        return task;
      });
  REQUIRE(baseline.cells.size() == 1);
  REQUIRE(stripped.cells.size() == 1);
  CHECK(baseline.cells[0].accuracies == stripped.cells[0].accuracies);
}

TEST_CASE("synthetic task shapes and balance") {
  const TransferTask task = make_synthetic_task(kSmallAligned, 3);
  CHECK(task.source.size() == 120);
  CHECK(task.target_train.size() == 30);
  CHECK(task.target_test.size() == 60);
  int positives = 0;
  for (const LabeledInstance& instance : task.target_test.instances)
    positives += label_value(instance.y);
  CHECK(positives == 30);

  // Flipped source: same clouds, inverted labels.
  SyntheticSpec flipped = kSmallAligned;
  flipped.kind = SyntheticKind::flipped;
  const TransferTask neg = make_synthetic_task(flipped, 3);
  int agree = 0;
  for (std::size_t i = 0; i < neg.source.size(); ++i) {
    const bool positive_side = neg.source.instances[i].x.at(0) > 0;
    agree += (label_value(neg.source.instances[i].y) == 1) == positive_side;
  }
  // Labels disagree with the cloud side for nearly all instances.
  CHECK(agree < static_cast<int>(neg.source.size()) / 4);
}

TEST_CASE("aligned source lifts accuracy over the target-only control") {
  const ExperimentConfig config = small_protocol({Algorithm::otbag}, 10);
  const double with_source =
      mean_of(run_synthetic(config, kSmallAligned), "otbag");
  const double target_only =
      mean_of(run_synthetic_baseline(config, kSmallAligned), "target-only");
  CHECK(with_source > target_only);
}

TEST_CASE("flipped source drags plain bagging below chance, filters recover") {
  SyntheticSpec flipped = kSmallAligned;
  flipped.kind = SyntheticKind::flipped;
  flipped.n_source = 400;
  const ExperimentConfig config = small_protocol(
      {Algorithm::otbag, Algorithm::sdmv, Algorithm::jdsmv}, 10);
  const ResultTable table = run_synthetic(config, flipped);
  const double otbag = mean_of(table, "otbag");
  CHECK(otbag < 0.5);
  CHECK(mean_of(table, "sdmv") > otbag);
  CHECK(mean_of(table, "jdsmv") > otbag);
}

TEST_CASE("an empty stream is rejected") {
  ExperimentConfig config = small_protocol({Algorithm::otbag}, 1);
  CHECK(error_code_of([&] {
          run_repetitions(config, "empty", [](std::uint64_t seed) {
            TransferTask task = make_synthetic_task(kSmallAligned, seed);
            task.source.instances.clear();
            task.target_train.instances.clear();
            return task;
          });
        }) == "EmptyStream");
}

TEST_CASE("indistinguishable classes score about one half") {
  SyntheticSpec flat = kSmallAligned;
  flat.separation = 0.0;
  const ResultTable table =
      run_synthetic(small_protocol({Algorithm::otbag}, 20), flat);
  const double mean = mean_of(table, "otbag");
  CHECK(mean > 0.4);
  CHECK(mean < 0.6);

  const ResultTable baseline =
      run_synthetic_baseline(small_protocol({Algorithm::otbag}, 20), flat);
  const double base_mean = mean_of(baseline, "target-only");
  CHECK(base_mean > 0.4);
  CHECK(base_mean < 0.6);
}

TEST_CASE("wide separation is near-separable") {
  SyntheticSpec wide = kSmallAligned;
  wide.separation = 6.0;
  wide.dimension = 10;
  const ResultTable table =
      run_synthetic(small_protocol({Algorithm::otbag}, 20), wide);
  CHECK(mean_of(table, "otbag") >= 0.9);
}

TEST_CASE("report formats") {
  ResultTable table;
  CellResult cell;
  cell.task = "demo";
  cell.algorithm = "otbag";
  cell.accuracies = {0.76003 + 0.0141, 0.76003 - 0.0141};
  cell.wall_ms = {1.0, 2.0};
  table.cells.push_back(cell);

  const std::string text = render_report(table, ReportFormat::table);
  CHECK(text.find("76.00±0.01") != std::string::npos);

  const std::string csv = render_report(table, ReportFormat::csv);
  CHECK(csv.find("task,algorithm,repetition,accuracy,wall_ms") == 0);
  CHECK(csv.find("demo,otbag,0,") != std::string::npos);
  CHECK(csv.find("demo,otbag,1,") != std::string::npos);

  const std::string json = render_report(table, ReportFormat::json);
  const ResultTable parsed = table_from_json(json);
  CHECK(parsed == table);
  // Timings are deliberately absent from the json report.
  CHECK(json.find("wall") == std::string::npos);

  CHECK(error_code_of([] {
          render_report(ResultTable{}, ReportFormat::table);
        }) == "EmptyTable");
  CHECK(error_code_of([] { table_from_json("{nope"); }) == "BadReportFile");
  CHECK(error_code_of([&] {
          emit_report(table, ReportFormat::json, "/nonexistent/dir/report.json");
        }) == "IoError");
}

TEST_CASE("file-based experiment and baseline") {
  TempDir dir("harness");
  const TransferTask seeds = make_synthetic_task(kSmallAligned, 8);
  Dataset target = seeds.target_train;
  target.instances.insert(target.instances.end(),
                          seeds.target_test.instances.begin(),
                          seeds.target_test.instances.end());
  save_dense_csv(seeds.source, dir.path("source.csv"), CsvOptions{});
  save_dense_csv(target, dir.path("target.csv"), CsvOptions{});

  ExperimentConfig config = small_protocol({Algorithm::otbag, Algorithm::sdmv});
  config.repetitions = 3;
  config.source_path = dir.path("source.csv").string();
  config.target_path = dir.path("target.csv").string();

  const ResultTable table = run_experiment(config);
  CHECK(table.cells.size() == 2);
  CHECK(table.cells[0].accuracies.size() == 3);
  CHECK(table.cells[0].task == "source->target");

  const ResultTable baseline = run_baseline_target_only(config);
  CHECK(baseline.cells.size() == 1);
  CHECK(baseline.cells[0].algorithm == "target-only");

  // Deterministic end to end, including the loaders.
  CHECK(run_experiment(config) == table);

  ExperimentConfig missing = config;
  missing.source_path = dir.path("nope.csv").string();
  CHECK(error_code_of([&] { run_experiment(missing); }) == "IoError");
}

TEST_CASE("mixed foreign source flows through run_experiment") {
  TempDir dir("mixed");
  const TransferTask seeds = make_synthetic_task(kSmallAligned, 9);
  SyntheticSpec foreign_spec = kSmallAligned;
  foreign_spec.dimension = 8;  // wider than the primary; gets truncated
  const TransferTask foreign = make_synthetic_task(foreign_spec, 10);

  Dataset target = seeds.target_train;
  target.instances.insert(target.instances.end(),
                          seeds.target_test.instances.begin(),
                          seeds.target_test.instances.end());
  save_dense_csv(seeds.source, dir.path("source.csv"), CsvOptions{});
  save_dense_csv(target, dir.path("target.csv"), CsvOptions{});
  save_dense_csv(foreign.source, dir.path("foreign.csv"), CsvOptions{});

  ExperimentConfig config = small_protocol({Algorithm::sdmv});
  config.repetitions = 2;
  config.source_path = dir.path("source.csv").string();
  config.target_path = dir.path("target.csv").string();
  config.mixed_foreign_path = dir.path("foreign.csv").string();
  config.zscore = true;

  const ResultTable table = run_experiment(config);
  CHECK(table.cells[0].task == "mix_source->target");
  CHECK(table.cells[0].accuracies.size() == 2);
}

TEST_CASE("config json round-trips") {
  ExperimentConfig config;
  config.source_path = "a.csv";
  config.target_path = "b.csv";
  config.members = 7;
  config.alpha = 3;
  config.segment_length = 25;
  config.repetitions = 4;
  config.base_seed = 99;
  config.train_fraction = 0.3;
  config.subsample_fraction = 0.5;
  config.zscore = true;
  config.learner = {LearnerKind::online_logistic, 0.2};
  config.algorithms = {Algorithm::jdsmv};

  const ExperimentConfig parsed =
      config_from_json_text(config_to_json_text(config));
  CHECK(parsed.source_path == config.source_path);
  CHECK(parsed.members == 7);
  CHECK(parsed.alpha == 3);
  CHECK(parsed.segment_length == std::optional<std::size_t>(25));
  CHECK(parsed.repetitions == 4);
  CHECK(parsed.base_seed == 99);
  CHECK(parsed.train_fraction == 0.3);
  CHECK(parsed.subsample_fraction == 0.5);
  CHECK(parsed.zscore);
  CHECK(parsed.learner.kind == LearnerKind::online_logistic);
  CHECK(parsed.learner.learning_rate == 0.2);
  CHECK(parsed.algorithms == std::vector<Algorithm>({Algorithm::jdsmv}));

  CHECK(error_code_of([] { config_from_json_text("{\"bogus\": 1}"); }) ==
        "BadConfigFile");
  CHECK(error_code_of([] { config_from_json_text("nope"); }) ==
        "BadConfigFile");
}

TEST_CASE("config validation") {
  ExperimentConfig config;
  config.repetitions = 0;
  CHECK(error_code_of([&] { validate(config); }) == "BadConfig");
  config.repetitions = 1;
  config.members = 0;
  CHECK(error_code_of([&] { validate(config); }) == "BadConfig");
  config.members = 1;
  config.train_fraction = 1.5;
  CHECK(error_code_of([&] { validate(config); }) == "BadFraction");
  config.train_fraction = 0.4;
  config.format = DataFormat::svmlight;
  CHECK(error_code_of([&] { validate(config); }) == "BadDimension");
}
