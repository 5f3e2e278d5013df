#include "otbag/core.hpp"

#include <algorithm>
#include <cmath>

namespace otbag {

FeatureVector FeatureVector::dense(std::vector<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) raise("BadNumber", "non-finite feature value");
  }
  FeatureVector x;
  x.dimension_ = values.size();
  x.sparse_ = false;
  x.values_ = std::move(values);
  return x;
}

FeatureVector FeatureVector::sparse(std::size_t dimension,
                                    std::vector<SparseEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) {
              return a.index < b.index;
            });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].index >= dimension)
      raise("IndexOutOfRange", "sparse index exceeds dimension");
    if (i > 0 && entries[i].index == entries[i - 1].index)
      raise("BadSparseLine", "duplicate sparse index");
    if (!std::isfinite(entries[i].value))
      raise("BadNumber", "non-finite feature value");
  }
  FeatureVector x;
  x.dimension_ = dimension;
  x.sparse_ = true;
  x.entries_ = std::move(entries);
  return x;
}

double FeatureVector::at(std::size_t index) const {
  if (index >= dimension_) raise("IndexOutOfRange", "feature index out of range");
  if (!sparse_) return values_[index];
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const SparseEntry& e, std::size_t i) {
                               return e.index < i;
                             });
  if (it != entries_.end() && it->index == index) return it->value;
  return 0.0;
}

std::vector<double> FeatureVector::to_dense() const {
  if (!sparse_) return values_;
  std::vector<double> out(dimension_, 0.0);
  for (const auto& e : entries_) out[e.index] = e.value;
  return out;
}

double FeatureVector::dot(std::span<const double> weights) const {
  double sum = 0.0;
  if (!sparse_) {
    for (std::size_t i = 0; i < values_.size(); ++i) sum += weights[i] * values_[i];
  } else {
    for (const auto& e : entries_) sum += weights[e.index] * e.value;
  }
  return sum;
}

void FeatureVector::add_scaled(std::span<double> weights, double scale) const {
  if (!sparse_) {
    for (std::size_t i = 0; i < values_.size(); ++i) weights[i] += scale * values_[i];
  } else {
    for (const auto& e : entries_) weights[e.index] += scale * e.value;
  }
}

bool operator==(const FeatureVector& a, const FeatureVector& b) {
  if (a.dimension_ != b.dimension_) return false;
  for (std::size_t i = 0; i < a.dimension_; ++i) {
    if (a.at(i) != b.at(i)) return false;
  }
  return true;
}

BinaryLabel majority_vote(std::span<const BinaryLabel> votes) {
  return vote_margin(votes) > 0 ? BinaryLabel::positive : BinaryLabel::negative;
}

int vote_margin(std::span<const BinaryLabel> votes) {
  if (votes.empty()) raise("EmptyCommittee", "vote list is empty");
  int margin = 0;
  for (BinaryLabel v : votes) margin += (v == BinaryLabel::positive) ? 1 : -1;
  return margin;
}

}  // namespace otbag
