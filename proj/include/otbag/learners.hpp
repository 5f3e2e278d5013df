#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "otbag/core.hpp"

namespace otbag {

enum class LearnerKind { perceptron, online_logistic };

std::string learner_kind_name(LearnerKind kind);
LearnerKind learner_kind_from_name(const std::string& name);

struct LearnerConfig {
  LearnerKind kind = LearnerKind::perceptron;
  double learning_rate = 0.1;  // online_logistic only
};

// One online base learner: a linear score w.x + b with a hard-label read-out.
// A score of exactly zero maps to label 0, matching the committee tie-break,
// so a freshly zero-initialized learner predicts 0 everywhere.
class WeakLearner {
 public:
  WeakLearner() = default;
  WeakLearner(const LearnerConfig& config, std::size_t dimension);

  LearnerKind kind() const noexcept { return config_.kind; }
  double learning_rate() const noexcept { return config_.learning_rate; }
  std::size_t dimension() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }

  double score(const FeatureVector& x) const;
  BinaryLabel predict(const FeatureVector& x) const;

  // One online step. Perceptron: on a mistake, w += (2y-1) x, b += (2y-1).
  // Logistic: w += lr (y - sigmoid(score)) x, b likewise.
  void learn(const FeatureVector& x, BinaryLabel y);

  // Used by deserialization; weights.size() fixes the dimension.
  static WeakLearner from_state(const LearnerConfig& config,
                                std::vector<double> weights, double bias);

  friend bool operator==(const WeakLearner& a, const WeakLearner& b) {
    return a.config_.kind == b.config_.kind &&
           a.config_.learning_rate == b.config_.learning_rate &&
           a.weights_ == b.weights_ && a.bias_ == b.bias_;
  }

 private:
  void check_dimension(const FeatureVector& x) const;

  LearnerConfig config_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

}  // namespace otbag
