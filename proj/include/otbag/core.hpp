#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "otbag/error.hpp"

namespace otbag {

enum class BinaryLabel : std::uint8_t { negative = 0, positive = 1 };

inline int label_value(BinaryLabel y) noexcept {
  return y == BinaryLabel::positive ? 1 : 0;
}

inline BinaryLabel label_from_value(int v) {
  if (v != 0 && v != 1) raise("BadLabel", "label must be 0 or 1");
  return v == 1 ? BinaryLabel::positive : BinaryLabel::negative;
}

// {0,1} -> {-1,+1}, for update rules that want a signed target.
inline double label_sign(BinaryLabel y) noexcept {
  return y == BinaryLabel::positive ? 1.0 : -1.0;
}

enum class DomainTag : std::uint8_t { source, target };

struct SparseEntry {
  std::uint32_t index = 0;
  double value = 0.0;
};

// Dense or sparse real-valued feature vector. Both forms expose the same
// value-wise semantics: a sparse vector is the dense vector with zeros at the
// unlisted coordinates, and equality/dot products agree across forms.
class FeatureVector {
 public:
  FeatureVector() = default;

  static FeatureVector dense(std::vector<double> values);
  // Entries may arrive unordered; they are sorted on construction.
  // Duplicate indices, out-of-range indices and non-finite values are errors.
  static FeatureVector sparse(std::size_t dimension,
                              std::vector<SparseEntry> entries);

  std::size_t dimension() const noexcept { return dimension_; }
  bool is_sparse() const noexcept { return sparse_; }

  double at(std::size_t index) const;
  std::vector<double> to_dense() const;

  // weights.size() must equal dimension(); callers validate.
  double dot(std::span<const double> weights) const;
  // weights += scale * x
  void add_scaled(std::span<double> weights, double scale) const;

  friend bool operator==(const FeatureVector& a, const FeatureVector& b);

 private:
  std::size_t dimension_ = 0;
  bool sparse_ = false;
  std::vector<double> values_;        // dense payload
  std::vector<SparseEntry> entries_;  // sparse payload, ascending unique indices
};

struct TaggedInstance {
  FeatureVector x;
  BinaryLabel y = BinaryLabel::negative;
  DomainTag domain = DomainTag::source;
};

// Label with strictly more votes; an exact tie resolves to label 0.
BinaryLabel majority_vote(std::span<const BinaryLabel> votes);

// (#votes for 1) - (#votes for 0).
int vote_margin(std::span<const BinaryLabel> votes);

}  // namespace otbag
