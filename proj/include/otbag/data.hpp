#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otbag/core.hpp"
#include "otbag/sampling.hpp"

namespace otbag {

struct LabeledInstance {
  FeatureVector x;
  BinaryLabel y = BinaryLabel::negative;
};

struct Dataset {
  std::string name;
  std::size_t dimension = 0;
  std::vector<LabeledInstance> instances;

  std::size_t size() const noexcept { return instances.size(); }
};

// A source dataset, a labeled target training split and a held-out target
// test split, all sharing one feature dimension.
struct TransferTask {
  Dataset source;
  Dataset target_train;
  Dataset target_test;
  std::uint64_t seed = 0;
};

// --- loaders ----------------------------------------------------------------

struct CsvOptions {
  bool has_header = false;
  // Column holding the label; negative counts from the end (-1 = last).
  int label_column = -1;
  // Label cell equal to this string maps to 1, anything else to 0.
  std::string positive_value = "1";
};

Dataset load_dense_csv(const std::filesystem::path& path,
                       const CsvOptions& options);
// Features in column order with the label spliced in at label_column.
void save_dense_csv(const Dataset& dataset, const std::filesystem::path& path,
                    const CsvOptions& options);

// svmlight/libsvm text: "label idx:val ...", 1-based strictly ascending
// indices; labels -1/0 map to 0 and +1/1 map to 1.
Dataset load_svmlight(const std::filesystem::path& path, std::size_t dimension);
void save_svmlight(const Dataset& dataset, const std::filesystem::path& path);

// --- normalization ----------------------------------------------------------

// Per-feature population mean/std fitted on a training split. A constant
// feature keeps its raw std of 0 and is centered but not scaled.
struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> stddev;
};

FeatureScaler fit_scaler(const Dataset& train);
Dataset apply_scaler(const FeatureScaler& scaler, const Dataset& dataset);

struct NormalizedBundle {
  Dataset train;
  std::vector<Dataset> others;
  FeatureScaler scaler;
};
NormalizedBundle zscore_normalize(const Dataset& train,
                                  std::span<const Dataset> others);

// Sidecar format: one "index mean std" line per feature.
void save_scaler(const FeatureScaler& scaler, const std::filesystem::path& path);
FeatureScaler load_scaler(const std::filesystem::path& path);

// --- task construction ------------------------------------------------------

// Stratified target split: floor(train_fraction * N) training instances with
// per-label counts allocated by largest remainder, the rest held out for
// testing. Both splits must keep at least one instance of each label.
TransferTask make_task(const Dataset& source, const Dataset& target,
                       double train_fraction, std::uint64_t seed);

// Uniform random permutation of source (tagged source) + target_train
// (tagged target).
std::vector<TaggedInstance> interleave_stream(const TransferTask& task,
                                              std::uint64_t seed);

std::vector<TaggedInstance> tag_dataset(const Dataset& dataset, DomainTag tag);

// Foreign instances reconciled to the primary dimension (truncate extra
// coordinates, zero-pad missing ones) and appended to the primary set; the
// result is named "mix_<primary name>".
Dataset build_mixed_source(const Dataset& primary, const Dataset& foreign);

// Uniform random subset of floor(fraction * N) instances (at least one).
Dataset subsample(const Dataset& dataset, double fraction, SeededRng& rng);

}  // namespace otbag
