#include "otbag/learners.hpp"

#include <cmath>

namespace otbag {

std::string learner_kind_name(LearnerKind kind) {
  return kind == LearnerKind::perceptron ? "perceptron" : "logistic";
}

LearnerKind learner_kind_from_name(const std::string& name) {
  if (name == "perceptron") return LearnerKind::perceptron;
  if (name == "logistic") return LearnerKind::online_logistic;
  raise("BadLearnerKind", "unknown learner kind '" + name + "'");
}

WeakLearner::WeakLearner(const LearnerConfig& config, std::size_t dimension)
    : config_(config), weights_(dimension, 0.0) {
  if (dimension == 0) raise("BadDimension", "learner dimension must be >= 1");
  if (config.kind == LearnerKind::online_logistic && config.learning_rate <= 0.0)
    raise("BadLearningRate", "learning rate must be positive");
}

WeakLearner WeakLearner::from_state(const LearnerConfig& config,
                                    std::vector<double> weights, double bias) {
  WeakLearner learner(config, weights.size());
  learner.weights_ = std::move(weights);
  learner.bias_ = bias;
  return learner;
}

void WeakLearner::check_dimension(const FeatureVector& x) const {
  if (x.dimension() != weights_.size())
    raise("DimensionMismatch", "feature dimension does not match learner");
}

double WeakLearner::score(const FeatureVector& x) const {
  check_dimension(x);
  return x.dot(weights_) + bias_;
}

BinaryLabel WeakLearner::predict(const FeatureVector& x) const {
  return score(x) > 0.0 ? BinaryLabel::positive : BinaryLabel::negative;
}

namespace {

double sigmoid(double s) { return 1.0 / (1.0 + std::exp(-s)); }

}  // namespace

void WeakLearner::learn(const FeatureVector& x, BinaryLabel y) {
  check_dimension(x);
  switch (config_.kind) {
    case LearnerKind::perceptron: {
      if (predict(x) == y) return;
      const double target = label_sign(y);
      x.add_scaled(weights_, target);
      bias_ += target;
      break;
    }
    case LearnerKind::online_logistic: {
      const double step =
          config_.learning_rate * (label_value(y) - sigmoid(score(x)));
      x.add_scaled(weights_, step);
      bias_ += step;
      break;
    }
  }
}

}  // namespace otbag
