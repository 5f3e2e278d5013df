#include "otbag/ensemble.hpp"

#include <algorithm>

namespace otbag {

namespace {

std::size_t stream_dimension(std::span<const TaggedInstance> stream) {
  if (stream.empty()) raise("EmptyStream", "training stream is empty");
  const std::size_t dim = stream.front().x.dimension();
  for (const TaggedInstance& instance : stream) {
    if (instance.x.dimension() != dim)
      raise("DimensionMismatch", "stream instances disagree on dimension");
  }
  return dim;
}

std::vector<WeakLearner> fresh_members(std::size_t members,
                                       const LearnerConfig& learner,
                                       std::size_t dimension) {
  if (members == 0) raise("BadEnsembleSize", "ensemble needs >= 1 member");
  std::vector<WeakLearner> out;
  out.reserve(members);
  for (std::size_t m = 0; m < members; ++m) out.emplace_back(learner, dimension);
  return out;
}

BinaryLabel committee_vote(std::span<const WeakLearner> members,
                           const FeatureVector& x) {
  std::vector<BinaryLabel> votes;
  votes.reserve(members.size());
  for (const WeakLearner& member : members) votes.push_back(member.predict(x));
  return majority_vote(votes);
}

void learn_repeated(WeakLearner& learner, const TaggedInstance& instance,
                    unsigned k) {
  for (unsigned i = 0; i < k; ++i) learner.learn(instance.x, instance.y);
}

// Prequential recording for one arriving target instance: per-member H
// correctness and the F-committee correctness, all evaluated on the states
// before this instance's own updates.
void record_target(const std::vector<WeakLearner>& h_members,
                   const std::vector<WeakLearner>& f_members,
                   const TaggedInstance& instance, AccuracyLedger& ledger) {
  for (std::size_t m = 0; m < h_members.size(); ++m) {
    if (h_members[m].predict(instance.x) == instance.y) ++ledger.correct_h[m];
  }
  if (committee_vote(f_members, instance.x) == instance.y) ++ledger.correct_f;
  ++ledger.targets_seen;
}

// Shared dual-model training step: one Poisson draw per member, H updated on
// every instance, F updated with the same k on target instances only.
void train_dual_step(std::vector<WeakLearner>& h_members,
                     std::vector<WeakLearner>& f_members,
                     const TaggedInstance& instance, const PoissonDraw& draw) {
  const bool is_target = instance.domain == DomainTag::target;
  for (std::size_t m = 0; m < h_members.size(); ++m) {
    const unsigned k = draw();
    learn_repeated(h_members[m], instance, k);
    if (is_target) learn_repeated(f_members[m], instance, k);
  }
}

// Segment boundaries as end positions (1-based instance counts). The last
// segment always extends to the stream end so the remainder is not dropped.
std::vector<std::size_t> segment_ends(std::size_t stream_length,
                                      const Segmentation& segmentation,
                                      std::size_t& eta_out) {
  std::size_t eta;
  std::size_t segments;
  if (segmentation.alpha_mode) {
    const std::size_t alpha = segmentation.value;
    if (alpha < 2) raise("BadSegment", "alpha must be >= 2");
    eta = stream_length / alpha;
    if (eta == 0) raise("BadSegment", "stream shorter than alpha segments");
    segments = alpha;
  } else {
    eta = segmentation.value;
    if (eta == 0) raise("BadSegment", "segment length must be >= 1");
    if (stream_length < 2 * eta)
      raise("BadSegment", "stream must cover at least two segments");
    segments = stream_length / eta;
  }
  std::vector<std::size_t> ends;
  ends.reserve(segments);
  for (std::size_t i = 1; i < segments; ++i) ends.push_back(i * eta);
  ends.push_back(stream_length);
  eta_out = eta;
  return ends;
}

}  // namespace

PoissonDraw poisson1_source(SeededRng& rng) {
  return [&rng]() { return poisson1_draw(rng); };
}

Segmentation Segmentation::by_alpha(std::size_t alpha) {
  return Segmentation{true, alpha};
}

Segmentation Segmentation::by_length(std::size_t segment_length) {
  return Segmentation{false, segment_length};
}

OTBagModel train_otbag_with_draws(std::span<const TaggedInstance> stream,
                                  std::size_t members,
                                  const LearnerConfig& learner,
                                  const PoissonDraw& draw) {
  const std::size_t dim = stream_dimension(stream);
  OTBagModel model{fresh_members(members, learner, dim)};
  for (const TaggedInstance& instance : stream) {
    for (WeakLearner& member : model.members) {
      learn_repeated(member, instance, draw());
    }
  }
  return model;
}

OTBagModel train_otbag(std::span<const TaggedInstance> stream,
                       std::size_t members, const LearnerConfig& learner,
                       SeededRng& rng) {
  return train_otbag_with_draws(stream, members, learner, poisson1_source(rng));
}

SDMVModel train_sdmv_with_draws(std::span<const TaggedInstance> stream,
                                std::size_t members,
                                const LearnerConfig& learner,
                                const PoissonDraw& draw) {
  const std::size_t dim = stream_dimension(stream);
  SDMVModel model;
  model.dual.h_members = fresh_members(members, learner, dim);
  model.dual.f_members = fresh_members(members, learner, dim);
  model.dual.ledger.correct_h.assign(members, 0);

  for (const TaggedInstance& instance : stream) {
    if (instance.domain == DomainTag::target) {
      record_target(model.dual.h_members, model.dual.f_members, instance,
                    model.dual.ledger);
    }
    train_dual_step(model.dual.h_members, model.dual.f_members, instance, draw);
  }

  if (model.dual.ledger.targets_seen == 0)
    raise("NoTargetData", "dominance filter needs >= 1 target instance");

  for (std::size_t m = 0; m < members; ++m) {
    if (model.dual.ledger.correct_h[m] >= model.dual.ledger.correct_f)
      model.surviving.push_back(m);
  }
  model.fallback_to_f = model.surviving.empty();
  return model;
}

SDMVModel train_sdmv(std::span<const TaggedInstance> stream,
                     std::size_t members, const LearnerConfig& learner,
                     SeededRng& rng) {
  return train_sdmv_with_draws(stream, members, learner, poisson1_source(rng));
}

JDSMVModel train_jdsmv_with_draws(std::span<const TaggedInstance> stream,
                                  std::size_t members,
                                  const LearnerConfig& learner,
                                  const Segmentation& segmentation,
                                  const PoissonDraw& draw) {
  const std::size_t dim = stream_dimension(stream);
  std::size_t eta = 0;
  const std::vector<std::size_t> ends =
      segment_ends(stream.size(), segmentation, eta);

  JDSMVModel model;
  model.dual.h_members = fresh_members(members, learner, dim);
  model.dual.f_members = fresh_members(members, learner, dim);
  model.dual.ledger.correct_h.assign(members, 0);
  model.segments.alpha = ends.size();
  model.segments.eta = eta;

  AccuracyLedger segment_ledger;
  segment_ledger.correct_h.assign(members, 0);
  std::size_t segment = 0;  // 0-based; segment 0 records no index set

  for (std::size_t n = 0; n < stream.size(); ++n) {
    const TaggedInstance& instance = stream[n];
    if (instance.domain == DomainTag::target) {
      record_target(model.dual.h_members, model.dual.f_members, instance,
                    model.dual.ledger);
      record_target(model.dual.h_members, model.dual.f_members, instance,
                    segment_ledger);
    }
    train_dual_step(model.dual.h_members, model.dual.f_members, instance, draw);

    if (n + 1 == ends[segment]) {
      model.segments.target_counts.push_back(segment_ledger.targets_seen);
      if (segment > 0) {
        // A segment that saw no target instance records an empty set; its
        // decision later defaults to the F committee.
        std::vector<std::size_t> index_set;
        if (segment_ledger.targets_seen > 0) {
          for (std::size_t m = 0; m < members; ++m) {
            if (segment_ledger.correct_h[m] >= segment_ledger.correct_f)
              index_set.push_back(m);
          }
        }
        model.segments.sets.push_back(std::move(index_set));
      }
      segment_ledger = AccuracyLedger{};
      segment_ledger.correct_h.assign(members, 0);
      ++segment;
    }
  }
  return model;
}

JDSMVModel train_jdsmv(std::span<const TaggedInstance> stream,
                       std::size_t members, const LearnerConfig& learner,
                       const Segmentation& segmentation, SeededRng& rng) {
  return train_jdsmv_with_draws(stream, members, learner, segmentation,
                                poisson1_source(rng));
}

BinaryLabel predict(const OTBagModel& model, const FeatureVector& x) {
  return committee_vote(model.members, x);
}

BinaryLabel predict(const SDMVModel& model, const FeatureVector& x) {
  if (model.fallback_to_f) return committee_vote(model.dual.f_members, x);
  std::vector<BinaryLabel> votes;
  votes.reserve(model.surviving.size());
  for (std::size_t m : model.surviving)
    votes.push_back(model.dual.h_members[m].predict(x));
  return majority_vote(votes);
}

BinaryLabel predict(const JDSMVModel& model, const FeatureVector& x) {
  const BinaryLabel f_decision = committee_vote(model.dual.f_members, x);
  std::vector<BinaryLabel> outer;
  outer.reserve(model.segments.sets.size() + 1);
  for (const std::vector<std::size_t>& index_set : model.segments.sets) {
    if (index_set.empty()) {
      outer.push_back(f_decision);
      continue;
    }
    std::vector<BinaryLabel> votes;
    votes.reserve(index_set.size());
    for (std::size_t m : index_set)
      votes.push_back(model.dual.h_members[m].predict(x));
    outer.push_back(majority_vote(votes));
  }
  outer.push_back(f_decision);
  return majority_vote(outer);
}

BinaryLabel predict(const AnyModel& model, const FeatureVector& x) {
  return std::visit([&x](const auto& m) { return predict(m, x); }, model);
}

}  // namespace otbag
