#include "otbag/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace otbag {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_feature(const std::string& cell) {
  double v;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
    raise("BadNumber", "bad feature value '" + cell + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::size_t resolve_label_column(int label_column, std::size_t columns) {
  long resolved = label_column >= 0
                      ? label_column
                      : static_cast<long>(columns) + label_column;
  if (resolved < 0 || resolved >= static_cast<long>(columns))
    raise("BadColumn", "label column out of range");
  return static_cast<std::size_t>(resolved);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise("IoError", "cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise("IoError", "cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

Dataset load_dense_csv(const std::filesystem::path& path,
                       const CsvOptions& options) {
  std::ifstream in = open_input(path);
  Dataset dataset;
  dataset.name = path.stem().string();

  std::string line;
  bool skipped_header = !options.has_header;
  std::size_t columns = 0;
  std::size_t label_index = 0;
  std::vector<std::string> raw_labels;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<std::string> cells = split_csv_line(line);
    if (columns == 0) {
      columns = cells.size();
      if (columns < 2) raise("RaggedCsv", "need at least one feature column");
      label_index = resolve_label_column(options.label_column, columns);
      dataset.dimension = columns - 1;
    } else if (cells.size() != columns) {
      raise("RaggedCsv", "row has " + std::to_string(cells.size()) +
                             " cells, expected " + std::to_string(columns));
    }
    std::vector<double> features;
    features.reserve(columns - 1);
    for (std::size_t c = 0; c < columns; ++c) {
      if (c == label_index) continue;
      features.push_back(parse_feature(cells[c]));
    }
    raw_labels.push_back(cells[label_index]);
    dataset.instances.push_back(
        {FeatureVector::dense(std::move(features)), BinaryLabel::negative});
  }

  if (dataset.instances.empty()) raise("EmptyFile", "no data rows in CSV");

  std::vector<std::string> distinct;
  for (const std::string& l : raw_labels) {
    if (std::find(distinct.begin(), distinct.end(), l) == distinct.end())
      distinct.push_back(l);
  }
  if (distinct.size() > 2)
    raise("NotBinary", "label column holds " + std::to_string(distinct.size()) +
                           " distinct values");
  for (std::size_t i = 0; i < raw_labels.size(); ++i) {
    dataset.instances[i].y = raw_labels[i] == options.positive_value
                                 ? BinaryLabel::positive
                                 : BinaryLabel::negative;
  }
  return dataset;
}

void save_dense_csv(const Dataset& dataset, const std::filesystem::path& path,
                    const CsvOptions& options) {
  std::ofstream out = open_output(path);
  const std::size_t columns = dataset.dimension + 1;
  const std::size_t label_index =
      resolve_label_column(options.label_column, columns);
  for (const LabeledInstance& instance : dataset.instances) {
    std::vector<double> features = instance.x.to_dense();
    std::size_t f = 0;
    for (std::size_t c = 0; c < columns; ++c) {
      if (c > 0) out << ',';
      if (c == label_index) {
        out << (instance.y == BinaryLabel::positive ? options.positive_value
                                                    : "0");
      } else {
        out << format_double(features[f++]);
      }
    }
    out << '\n';
  }
  if (!out) raise("IoError", "failed writing '" + path.string() + "'");
}

Dataset load_svmlight(const std::filesystem::path& path,
                      std::size_t dimension) {
  if (dimension == 0) raise("BadDimension", "dimension must be >= 1");
  std::ifstream in = open_input(path);
  Dataset dataset;
  dataset.name = path.stem().string();
  dataset.dimension = dimension;

  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string token;
    if (!(ss >> token)) continue;  // blank line

    BinaryLabel label;
    if (token == "+1" || token == "1") {
      label = BinaryLabel::positive;
    } else if (token == "-1" || token == "0") {
      label = BinaryLabel::negative;
    } else {
      raise("BadSparseLine", "bad label '" + token + "'");
    }

    std::vector<SparseEntry> entries;
    std::uint64_t previous_index = 0;
    while (ss >> token) {
      const std::size_t colon = token.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
        raise("BadSparseLine", "bad entry '" + token + "'");
      std::uint64_t index;
      {
        const char* first = token.data();
        auto [ptr, ec] = std::from_chars(first, first + colon, index);
        if (ec != std::errc() || ptr != first + colon)
          raise("BadSparseLine", "bad index in '" + token + "'");
      }
      if (index < 1 || index > dimension)
        raise("IndexOutOfRange", "index " + std::to_string(index) +
                                     " outside 1.." + std::to_string(dimension));
      if (index <= previous_index)
        raise("BadSparseLine", "indices must be strictly ascending");
      previous_index = index;
      const double value = parse_feature(token.substr(colon + 1));
      entries.push_back({static_cast<std::uint32_t>(index - 1), value});
    }
    dataset.instances.push_back(
        {FeatureVector::sparse(dimension, std::move(entries)), label});
  }
  if (dataset.instances.empty()) raise("EmptyFile", "no data rows");
  return dataset;
}

void save_svmlight(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  for (const LabeledInstance& instance : dataset.instances) {
    out << (instance.y == BinaryLabel::positive ? "+1" : "-1");
    std::vector<double> features = instance.x.to_dense();
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (features[i] != 0.0)
        out << ' ' << (i + 1) << ':' << format_double(features[i]);
    }
    out << '\n';
  }
  if (!out) raise("IoError", "failed writing '" + path.string() + "'");
}

FeatureScaler fit_scaler(const Dataset& train) {
  if (train.instances.empty()) raise("EmptyDataset", "cannot fit on empty data");
  const std::size_t d = train.dimension;
  const double n = static_cast<double>(train.size());
  FeatureScaler scaler;
  scaler.mean.assign(d, 0.0);
  scaler.stddev.assign(d, 0.0);
  for (const LabeledInstance& instance : train.instances) {
    std::vector<double> values = instance.x.to_dense();
    for (std::size_t i = 0; i < d; ++i) scaler.mean[i] += values[i];
  }
  for (std::size_t i = 0; i < d; ++i) scaler.mean[i] /= n;
  for (const LabeledInstance& instance : train.instances) {
    std::vector<double> values = instance.x.to_dense();
    for (std::size_t i = 0; i < d; ++i) {
      const double delta = values[i] - scaler.mean[i];
      scaler.stddev[i] += delta * delta;
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    scaler.stddev[i] = std::sqrt(scaler.stddev[i] / n);
  return scaler;
}

Dataset apply_scaler(const FeatureScaler& scaler, const Dataset& dataset) {
  if (scaler.mean.size() != dataset.dimension)
    raise("DimensionMismatch", "scaler does not match dataset dimension");
  Dataset out;
  out.name = dataset.name;
  out.dimension = dataset.dimension;
  out.instances.reserve(dataset.size());
  for (const LabeledInstance& instance : dataset.instances) {
    std::vector<double> values = instance.x.to_dense();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double divisor = scaler.stddev[i] == 0.0 ? 1.0 : scaler.stddev[i];
      values[i] = (values[i] - scaler.mean[i]) / divisor;
    }
    out.instances.push_back({FeatureVector::dense(std::move(values)), instance.y});
  }
  return out;
}

NormalizedBundle zscore_normalize(const Dataset& train,
                                  std::span<const Dataset> others) {
  NormalizedBundle bundle;
  bundle.scaler = fit_scaler(train);
  bundle.train = apply_scaler(bundle.scaler, train);
  bundle.others.reserve(others.size());
  for (const Dataset& other : others)
    bundle.others.push_back(apply_scaler(bundle.scaler, other));
  return bundle;
}

void save_scaler(const FeatureScaler& scaler,
                 const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  for (std::size_t i = 0; i < scaler.mean.size(); ++i) {
    out << i << ' ' << format_double(scaler.mean[i]) << ' '
        << format_double(scaler.stddev[i]) << '\n';
  }
  if (!out) raise("IoError", "failed writing '" + path.string() + "'");
}

FeatureScaler load_scaler(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  FeatureScaler scaler;
  std::size_t index;
  double mean, stddev;
  while (in >> index >> mean >> stddev) {
    if (index != scaler.mean.size())
      raise("BadScalerFile", "feature indices must be 0,1,2,...");
    scaler.mean.push_back(mean);
    scaler.stddev.push_back(stddev);
  }
  return scaler;
}

TransferTask make_task(const Dataset& source, const Dataset& target,
                       double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    raise("BadFraction", "train fraction must lie in (0, 1)");
  if (source.dimension != target.dimension)
    raise("DimensionMismatch", "source and target dimensions differ");

  // Per-label index pools, in dataset order.
  std::array<std::vector<std::size_t>, 2> pools;
  for (std::size_t i = 0; i < target.size(); ++i)
    pools[label_value(target.instances[i].y)].push_back(i);
  if (pools[0].empty() || pools[1].empty())
    raise("DegenerateSplit", "target needs instances of both labels");

  const std::size_t n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(target.size())));

  // Largest-remainder allocation of n_train across the two labels.
  std::array<std::size_t, 2> take;
  std::array<double, 2> remainder;
  std::size_t allocated = 0;
  for (int c = 0; c < 2; ++c) {
    const double exact = train_fraction * static_cast<double>(pools[c].size());
    take[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - std::floor(exact);
    allocated += take[c];
  }
  for (std::size_t extra = allocated; extra < n_train; ++extra) {
    const int c = remainder[1] > remainder[0] ? 1 : 0;
    ++take[c];
    remainder[c] = -1.0;
  }
  for (int c = 0; c < 2; ++c) {
    if (take[c] == 0)
      raise("DegenerateSplit", "a label class would be empty in train");
    if (take[c] >= pools[c].size())
      raise("DegenerateSplit", "a label class would be empty in test");
  }

  SeededRng rng(seed);
  std::vector<std::size_t> train_indices, test_indices;
  for (int c = 0; c < 2; ++c) {
    shuffle_span(std::span<std::size_t>(pools[c]), rng);
    train_indices.insert(train_indices.end(), pools[c].begin(),
                         pools[c].begin() + static_cast<long>(take[c]));
    test_indices.insert(test_indices.end(),
                        pools[c].begin() + static_cast<long>(take[c]),
                        pools[c].end());
  }
  shuffle_span(std::span<std::size_t>(train_indices), rng);
  shuffle_span(std::span<std::size_t>(test_indices), rng);

  TransferTask task;
  task.seed = seed;
  task.source = source;
  task.target_train.name = target.name + ".train";
  task.target_train.dimension = target.dimension;
  task.target_test.name = target.name + ".test";
  task.target_test.dimension = target.dimension;
  for (std::size_t i : train_indices)
    task.target_train.instances.push_back(target.instances[i]);
  for (std::size_t i : test_indices)
    task.target_test.instances.push_back(target.instances[i]);
  return task;
}

std::vector<TaggedInstance> tag_dataset(const Dataset& dataset, DomainTag tag) {
  std::vector<TaggedInstance> out;
  out.reserve(dataset.size());
  for (const LabeledInstance& instance : dataset.instances)
    out.push_back({instance.x, instance.y, tag});
  return out;
}

std::vector<TaggedInstance> interleave_stream(const TransferTask& task,
                                              std::uint64_t seed) {
  std::vector<TaggedInstance> stream = tag_dataset(task.source, DomainTag::source);
  std::vector<TaggedInstance> target =
      tag_dataset(task.target_train, DomainTag::target);
  stream.insert(stream.end(), std::make_move_iterator(target.begin()),
                std::make_move_iterator(target.end()));
  SeededRng rng(seed);
  shuffle_span(std::span<TaggedInstance>(stream), rng);
  return stream;
}

Dataset build_mixed_source(const Dataset& primary, const Dataset& foreign) {
  if (primary.instances.empty() || foreign.instances.empty())
    raise("EmptyDataset", "mixed source needs nonempty inputs");
  const std::size_t cap = primary.dimension;
  Dataset mixed;
  mixed.name = "mix_" + primary.name;
  mixed.dimension = cap;
  mixed.instances = primary.instances;
  for (const LabeledInstance& instance : foreign.instances) {
    std::vector<double> values = instance.x.to_dense();
    values.resize(cap, 0.0);  // truncate or zero-pad
    mixed.instances.push_back({FeatureVector::dense(std::move(values)), instance.y});
  }
  return mixed;
}

Dataset subsample(const Dataset& dataset, double fraction, SeededRng& rng) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    raise("BadFraction", "subsample fraction must lie in (0, 1]");
  if (fraction == 1.0) return dataset;
  const std::size_t keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::floor(fraction * static_cast<double>(dataset.size()))));
  std::vector<std::size_t> indices(dataset.size());
  std::iota(indices.begin(), indices.end(), 0);
  shuffle_span(std::span<std::size_t>(indices), rng);
  indices.resize(keep);
  std::sort(indices.begin(), indices.end());  // keep original order
  Dataset out;
  out.name = dataset.name;
  out.dimension = dataset.dimension;
  out.instances.reserve(keep);
  for (std::size_t i : indices) out.instances.push_back(dataset.instances[i]);
  return out;
}

}  // namespace otbag
