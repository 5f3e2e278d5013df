#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "otbag/harness.hpp"
#include "otbag/selftest.hpp"

namespace {

using namespace otbag;

struct ProtocolFlags {
  std::size_t members = 10;
  std::size_t alpha = 10;
  std::size_t segment_length = 0;
  double train_fraction = 0.4;
  std::size_t repetitions = 20;
  std::uint64_t seed = 1;
  std::string learner = "perceptron";
  double learning_rate = 0.1;
  std::string algos = "otbag,sdmv,jdsmv";
  std::string report = "table";
  std::string out;
  bool baseline = false;
};

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void add_protocol_flags(CLI::App* cmd, ProtocolFlags& flags) {
  cmd->add_option("--algos", flags.algos,
                  "comma list from {otbag,sdmv,jdsmv}");
  cmd->add_option("--m", flags.members, "ensemble size M");
  cmd->add_option("--alpha", flags.alpha, "number of jdsmv time segments");
  cmd->add_option("--segment-length", flags.segment_length,
                  "fixed jdsmv segment length (overrides --alpha)");
  cmd->add_option("--train-fraction", flags.train_fraction,
                  "target train split fraction");
  cmd->add_option("--reps", flags.repetitions, "randomized repetitions");
  cmd->add_option("--seed", flags.seed, "base seed; repetition r uses seed+r");
  cmd->add_option("--learner", flags.learner, "perceptron|logistic");
  cmd->add_option("--learning-rate", flags.learning_rate,
                  "logistic learning rate");
  cmd->add_option("--out", flags.out, "write the report here (default stdout)");
  cmd->add_option("--report", flags.report, "table|csv|json");
  cmd->add_flag("--baseline", flags.baseline,
                "also run the target-only control");
}

void apply_protocol_flags(const CLI::App* cmd, const ProtocolFlags& flags,
                          ExperimentConfig& config) {
  if (cmd->count("--algos")) {
    config.algorithms.clear();
    for (const std::string& name : split_list(flags.algos))
      config.algorithms.push_back(algorithm_from_name(name));
  }
  if (cmd->count("--m")) config.members = flags.members;
  if (cmd->count("--alpha")) config.alpha = flags.alpha;
  if (cmd->count("--segment-length")) config.segment_length = flags.segment_length;
  if (cmd->count("--train-fraction")) config.train_fraction = flags.train_fraction;
  if (cmd->count("--reps")) config.repetitions = flags.repetitions;
  if (cmd->count("--seed")) config.base_seed = flags.seed;
  if (cmd->count("--learner"))
    config.learner.kind = learner_kind_from_name(flags.learner);
  if (cmd->count("--learning-rate"))
    config.learner.learning_rate = flags.learning_rate;
}

void write_report(const ResultTable& table, const ProtocolFlags& flags) {
  const ReportFormat format = report_format_from_name(flags.report);
  if (flags.out.empty()) {
    std::cout << render_report(table, format);
  } else {
    emit_report(table, format, flags.out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online transfer bagging benchmark runner"};
  app.require_subcommand(1);

  // --- run -------------------------------------------------------------
  ProtocolFlags run_flags;
  std::string source_path, target_path, format = "csv", mixed_foreign;
  std::string positive_value = "1", config_path;
  int label_column = -1;
  std::size_t dimension = 0;
  bool csv_header = false, zscore = false;
  double subsample_fraction = 1.0;

  CLI::App* run = app.add_subcommand("run", "benchmark on dataset files");
  run->add_option("--source", source_path, "source domain data file");
  run->add_option("--target", target_path, "target domain data file");
  run->add_option("--format", format, "csv|svmlight");
  run->add_option("--dimension", dimension, "feature count (svmlight)");
  run->add_option("--label-column", label_column,
                  "csv label column, negative counts from the end");
  run->add_option("--positive-value", positive_value,
                  "csv label value mapped to 1");
  run->add_flag("--csv-header", csv_header, "skip the first csv row");
  run->add_option("--mixed-foreign", mixed_foreign,
                  "blend this dataset into the source domain");
  run->add_flag("--zscore", zscore,
                "z-score features (fit on the target train split)");
  run->add_option("--subsample", subsample_fraction,
                  "per-repetition uniform subsample fraction");
  run->add_option("--config", config_path,
                  "json config file; explicit flags override it");
  add_protocol_flags(run, run_flags);

  // --- synth -----------------------------------------------------------
  ProtocolFlags synth_flags;
  std::string kind = "aligned";
  SyntheticSpec spec;

  CLI::App* synth = app.add_subcommand("synth", "benchmark on synthetic data");
  synth->add_option("--kind", kind, "aligned|flipped");
  synth->add_option("--d", spec.dimension, "feature dimension");
  synth->add_option("--n-source", spec.n_source, "source instances");
  synth->add_option("--n-target", spec.n_target, "target train instances");
  synth->add_option("--n-test", spec.n_test, "target test instances");
  synth->add_option("--separation", spec.separation,
                    "distance between class means");
  add_protocol_flags(synth, synth_flags);

  // --- selftest ----------------------------------------------------------
  CLI::App* selftest =
      app.add_subcommand("selftest", "run the built-in verification suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentConfig config;
      if (run->count("--config")) {
        std::ifstream in(config_path);
        if (!in) raise("IoError", "cannot open '" + config_path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        config = config_from_json_text(text.str());
      }
      if (run->count("--source")) config.source_path = source_path;
      if (run->count("--target")) config.target_path = target_path;
      if (run->count("--format")) {
        if (format == "svmlight") {
          config.format = DataFormat::svmlight;
        } else if (format == "csv") {
          config.format = DataFormat::csv;
        } else {
          raise("BadFormat", "unknown data format '" + format + "'");
        }
      }
      if (run->count("--dimension")) config.svmlight_dimension = dimension;
      if (run->count("--label-column")) config.csv.label_column = label_column;
      if (run->count("--positive-value"))
        config.csv.positive_value = positive_value;
      if (run->count("--csv-header")) config.csv.has_header = csv_header;
      if (run->count("--mixed-foreign"))
        config.mixed_foreign_path = mixed_foreign;
      if (run->count("--zscore")) config.zscore = zscore;
      if (run->count("--subsample"))
        config.subsample_fraction = subsample_fraction;
      apply_protocol_flags(run, run_flags, config);
      if (config.source_path.empty() || config.target_path.empty())
        raise("BadConfig", "--source and --target are required");

      ResultTable table = run_experiment(config);
      if (run_flags.baseline)
        merge_into(table, run_baseline_target_only(config));
      write_report(table, run_flags);
    } else if (synth->parsed()) {
      spec.kind = synthetic_kind_from_name(kind);
      ExperimentConfig config;
      apply_protocol_flags(synth, synth_flags, config);
      ResultTable table = run_synthetic(config, spec);
      if (synth_flags.baseline)
        merge_into(table, run_synthetic_baseline(config, spec));
      write_report(table, synth_flags);
    } else if (selftest->parsed()) {
      return otbag::run_selftest(std::cout) == 0 ? 0 : 1;
    }
  } catch (const otbag::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
