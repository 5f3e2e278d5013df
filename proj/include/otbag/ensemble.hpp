#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "otbag/core.hpp"
#include "otbag/learners.hpp"
#include "otbag/sampling.hpp"

namespace otbag {

// Prequential correct-prediction counters over the target instances of a
// training stream. Correctness is recorded exactly once per target instance,
// before that instance's own updates, so every counter is <= targets_seen.
struct AccuracyLedger {
  std::vector<std::uint64_t> correct_h;  // one counter per ensemble member
  std::uint64_t correct_f = 0;           // F-committee majority vote
  std::uint64_t targets_seen = 0;
};

// Plain online-bagging ensemble: M learners trained on the whole stream,
// domain tags ignored, prediction by majority vote.
struct OTBagModel {
  std::vector<WeakLearner> members;
};

// H trained on the whole stream plus F trained on target instances only;
// F is the dominance benchmark for the filtering strategies.
struct DualModel {
  std::vector<WeakLearner> h_members;
  std::vector<WeakLearner> f_members;
  AccuracyLedger ledger;  // whole-stream counters
};

// Dominance filter output: members whose target accuracy met or exceeded the
// F-committee's. When no member dominates, prediction falls back to the
// F committee itself.
struct SDMVModel {
  DualModel dual;
  std::vector<std::size_t> surviving;  // 0-based member indices, ascending
  bool fallback_to_f = false;
};

// Segment bookkeeping for the joint double-subset strategy. The stream is
// split into `alpha` segments of `eta` instances (the trailing remainder
// joins the last segment); segment 1 only trains, segments 2..alpha each
// record the member subset that dominated F within that segment.
struct SegmentIndexSets {
  std::size_t alpha = 0;
  std::size_t eta = 0;
  std::vector<std::vector<std::size_t>> sets;   // alpha-1 entries, 0-based
  std::vector<std::uint64_t> target_counts;     // alpha entries, per segment
};

struct JDSMVModel {
  DualModel dual;
  SegmentIndexSets segments;
};

using AnyModel = std::variant<OTBagModel, SDMVModel, JDSMVModel>;

// Number of ensemble-update repetitions for one (instance, member) pair.
// Production code binds this to poisson1_draw; tests stub it.
using PoissonDraw = std::function<unsigned()>;

PoissonDraw poisson1_source(SeededRng& rng);

// --- training -------------------------------------------------------------
//
// All trainers walk the stream in arrival order and, per instance, loop over
// members m = 0..M-1 drawing ONE k per (instance, member); draws are consumed
// in exactly that order, which pins seed reproducibility.

OTBagModel train_otbag(std::span<const TaggedInstance> stream,
                       std::size_t members, const LearnerConfig& learner,
                       SeededRng& rng);
OTBagModel train_otbag_with_draws(std::span<const TaggedInstance> stream,
                                  std::size_t members,
                                  const LearnerConfig& learner,
                                  const PoissonDraw& draw);

SDMVModel train_sdmv(std::span<const TaggedInstance> stream,
                     std::size_t members, const LearnerConfig& learner,
                     SeededRng& rng);
SDMVModel train_sdmv_with_draws(std::span<const TaggedInstance> stream,
                                std::size_t members,
                                const LearnerConfig& learner,
                                const PoissonDraw& draw);

// Either a fixed number of segments (requires the stream length up front) or
// a fixed per-segment instance count for open-ended streams.
struct Segmentation {
  static Segmentation by_alpha(std::size_t alpha);
  static Segmentation by_length(std::size_t segment_length);

  bool alpha_mode = true;
  std::size_t value = 0;
};

JDSMVModel train_jdsmv(std::span<const TaggedInstance> stream,
                       std::size_t members, const LearnerConfig& learner,
                       const Segmentation& segmentation, SeededRng& rng);
JDSMVModel train_jdsmv_with_draws(std::span<const TaggedInstance> stream,
                                  std::size_t members,
                                  const LearnerConfig& learner,
                                  const Segmentation& segmentation,
                                  const PoissonDraw& draw);

// --- prediction -----------------------------------------------------------

BinaryLabel predict(const OTBagModel& model, const FeatureVector& x);
BinaryLabel predict(const SDMVModel& model, const FeatureVector& x);
BinaryLabel predict(const JDSMVModel& model, const FeatureVector& x);
BinaryLabel predict(const AnyModel& model, const FeatureVector& x);

// Fraction of test instances predicted correctly; the model is not updated.
template <typename Model>
double evaluate_accuracy(const Model& model,
                         std::span<const TaggedInstance> test_set) {
  if (test_set.empty()) raise("EmptyTestSet", "test set is empty");
  std::uint64_t correct = 0;
  for (const TaggedInstance& instance : test_set) {
    if (predict(model, instance.x) == instance.y) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test_set.size());
}

}  // namespace otbag
