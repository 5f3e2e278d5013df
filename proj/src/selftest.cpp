#include "otbag/selftest.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "otbag/data.hpp"
#include "otbag/ensemble.hpp"
#include "otbag/harness.hpp"
#include "otbag/model_io.hpp"

namespace otbag {

namespace {

// Upper 0.001 quantile of chi-square with 4 degrees of freedom; the sampler
// fit over bins {0,1,2,3,>=4} must stay below this.
constexpr double kChiSquare4Df001 = 18.4668;

struct CheckContext {
  std::ostringstream detail;
  bool ok = true;

  void require(bool condition, const std::string& label) {
    if (!condition) {
      ok = false;
      detail << " [failed: " << label << "]";
    }
  }
};

std::vector<TaggedInstance> random_stream(std::size_t count, std::size_t dim,
                                          SeededRng& rng) {
  std::vector<TaggedInstance> stream;
  stream.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> values(dim);
    for (double& v : values) v = rng.next_gaussian();
    stream.push_back({FeatureVector::dense(std::move(values)),
                      rng.next_unit() < 0.5 ? BinaryLabel::negative
                                            : BinaryLabel::positive,
                      rng.next_unit() < 0.5 ? DomainTag::source
                                            : DomainTag::target});
  }
  return stream;
}

FeatureVector random_point(std::size_t dim, SeededRng& rng) {
  std::vector<double> values(dim);
  for (double& v : values) v = rng.next_gaussian();
  return FeatureVector::dense(std::move(values));
}

// --- criterion bodies -------------------------------------------------------

void check_poisson_limit(CheckContext& ctx) {
  double worst = 0.0;
  for (unsigned k = 0; k <= 10; ++k) {
    worst = std::max(worst, std::abs(binomial_pmf(10000, k) - poisson1_pmf(k)));
  }
  ctx.detail << "max |binomial(1e4,k) - poisson1(k)| = " << worst;
  ctx.require(worst < 1e-4, "limit gap < 1e-4");
}

void check_sampler_statistics(CheckContext& ctx) {
  constexpr std::size_t kDraws = 100000;
  SeededRng rng(42);
  std::vector<std::uint64_t> bins(5, 0);  // 0,1,2,3,>=4
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const unsigned k = poisson1_draw(rng);
    sum += k;
    ++bins[std::min<unsigned>(k, 4)];
  }
  const double mean = static_cast<double>(sum) / kDraws;
  const double freq0 = static_cast<double>(bins[0]) / kDraws;
  double chi2 = 0.0;
  double tail = 1.0;
  for (unsigned k = 0; k < 4; ++k) {
    const double expected = kDraws * poisson1_pmf(k);
    tail -= poisson1_pmf(k);
    chi2 += (bins[k] - expected) * (bins[k] - expected) / expected;
  }
  const double expected_tail = kDraws * tail;
  chi2 += (bins[4] - expected_tail) * (bins[4] - expected_tail) / expected_tail;

  ctx.detail << "mean=" << mean << " freq0=" << freq0 << " chi2=" << chi2;
  ctx.require(mean >= 0.99 && mean <= 1.01, "mean in [0.99, 1.01]");
  ctx.require(freq0 >= 0.357 && freq0 <= 0.379, "freq(k=0) in [0.357, 0.379]");
  ctx.require(chi2 < kChiSquare4Df001, "chi-square fit at p > 0.001");
}

void check_degenerate_ensemble(CheckContext& ctx) {
  SeededRng data_rng(11);
  const auto stream = random_stream(200, 5, data_rng);
  const PoissonDraw always_one = []() { return 1u; };
  const OTBagModel model =
      train_otbag_with_draws(stream, 1, LearnerConfig{}, always_one);

  WeakLearner oracle(LearnerConfig{}, 5);
  for (const TaggedInstance& instance : stream) oracle.learn(instance.x, instance.y);

  std::size_t agreements = 0;
  for (int i = 0; i < 100; ++i) {
    const FeatureVector x = random_point(5, data_rng);
    if (predict(model, x) == oracle.predict(x)) ++agreements;
  }
  ctx.detail << agreements << "/100 test points agree";
  ctx.require(agreements == 100, "exact label equality");
}

void check_vote_oracle(CheckContext& ctx) {
  std::size_t cases = 0;
  bool all_agree = true;
  for (std::size_t len = 1; len <= 5; ++len) {
    for (std::size_t mask = 0; mask < (std::size_t(1) << len); ++mask) {
      std::vector<BinaryLabel> votes;
      std::size_t ones = 0;
      for (std::size_t i = 0; i < len; ++i) {
        const bool one = (mask >> i) & 1;
        ones += one;
        votes.push_back(one ? BinaryLabel::positive : BinaryLabel::negative);
      }
      const BinaryLabel expected = ones > len - ones ? BinaryLabel::positive
                                                     : BinaryLabel::negative;
      if (majority_vote(votes) != expected) all_agree = false;
      ++cases;
    }
  }
  ctx.detail << cases << " exhaustive cases";
  ctx.require(cases == 62, "62 vote lists enumerated");
  ctx.require(all_agree, "majority_vote matches brute-force count");
}

// Fixed 4-instance stream with pinned Poisson draws; ledger, surviving set,
// index sets and final weights were traced by hand.
struct TraceFixture {
  std::vector<TaggedInstance> stream;
  std::vector<unsigned> draws;
};

TraceFixture trace_fixture() {
  TraceFixture fixture;
  const auto vec = [](double a, double b) {
    return FeatureVector::dense({a, b});
  };
  fixture.stream = {
      {vec(1, 0), BinaryLabel::positive, DomainTag::source},
      {vec(0, 1), BinaryLabel::negative, DomainTag::target},
      {vec(1, 1), BinaryLabel::positive, DomainTag::target},
      {vec(-1, 0), BinaryLabel::negative, DomainTag::source},
  };
  fixture.draws = {1, 0, 1, 1, 2, 1, 0, 1};
  return fixture;
}

PoissonDraw scripted_draws(const std::vector<unsigned>& draws) {
  auto position = std::make_shared<std::size_t>(0);
  return [draws, position]() { return draws.at((*position)++); };
}

bool learner_equals(const WeakLearner& learner, double w0, double w1,
                    double bias) {
  return learner.weights()[0] == w0 && learner.weights()[1] == w1 &&
         learner.bias() == bias;
}

void check_hand_trace(CheckContext& ctx) {
  const TraceFixture fixture = trace_fixture();

  const SDMVModel sdmv = train_sdmv_with_draws(fixture.stream, 2, LearnerConfig{},
                                               scripted_draws(fixture.draws));
  ctx.require(sdmv.dual.ledger.correct_h == std::vector<std::uint64_t>({0, 1}),
              "sdmv acc_h == [0, 1]");
  ctx.require(sdmv.dual.ledger.correct_f == 1, "sdmv acc_f == 1");
  ctx.require(sdmv.dual.ledger.targets_seen == 2, "sdmv targets == 2");
  ctx.require(sdmv.surviving == std::vector<std::size_t>({1}),
              "surviving == {member 1}");
  ctx.require(!sdmv.fallback_to_f, "no fallback");
  ctx.require(learner_equals(sdmv.dual.h_members[0], 2, 0, 1), "h0 weights");
  ctx.require(learner_equals(sdmv.dual.h_members[1], 1, 1, 1), "h1 weights");
  ctx.require(learner_equals(sdmv.dual.f_members[0], 1, 1, 1), "f0 weights");
  ctx.require(learner_equals(sdmv.dual.f_members[1], 1, 1, 1), "f1 weights");

  const JDSMVModel jdsmv = train_jdsmv_with_draws(
      fixture.stream, 2, LearnerConfig{}, Segmentation::by_alpha(2),
      scripted_draws(fixture.draws));
  ctx.require(jdsmv.segments.alpha == 2 && jdsmv.segments.eta == 2,
              "alpha == 2, eta == 2");
  ctx.require(jdsmv.segments.sets ==
                  std::vector<std::vector<std::size_t>>({{0, 1}}),
              "zeta == [{0, 1}]");
  ctx.require(jdsmv.segments.target_counts ==
                  std::vector<std::uint64_t>({1, 1}),
              "segment target counts == [1, 1]");
  ctx.require(jdsmv.dual.ledger.correct_h == std::vector<std::uint64_t>({0, 1}),
              "jdsmv acc_h == [0, 1]");
  ctx.require(jdsmv.dual.ledger.correct_f == 1, "jdsmv acc_f == 1");

  // Hand-evaluated predictions on the traced weights.
  ctx.require(predict(sdmv, FeatureVector::dense({0, -2})) ==
                  BinaryLabel::negative,
              "sdmv predict (0,-2) == 0");
  ctx.require(predict(sdmv, FeatureVector::dense({1, 1})) ==
                  BinaryLabel::positive,
              "sdmv predict (1,1) == 1");
  ctx.require(predict(jdsmv, FeatureVector::dense({-1, 1.5})) ==
                  BinaryLabel::negative,
              "jdsmv tie breaks to 0");
  ctx.require(predict(jdsmv, FeatureVector::dense({1, 1})) ==
                  BinaryLabel::positive,
              "jdsmv predict (1,1) == 1");
}

ExperimentConfig synthetic_protocol(std::vector<Algorithm> algorithms) {
  ExperimentConfig config;
  config.members = 10;
  config.alpha = 10;
  config.repetitions = 20;
  config.base_seed = 7;
  config.algorithms = std::move(algorithms);
  return config;
}

double cell_mean(const ResultTable& table, const std::string& algorithm) {
  for (const CellResult& cell : table.cells) {
    if (cell.algorithm == algorithm) return cell.mean();
  }
  raise("BadAlgorithm", "no cell for '" + algorithm + "'");
}

void check_positive_transfer(CheckContext& ctx) {
  const SyntheticSpec spec{SyntheticKind::aligned, 10, 1000, 40, 1000, 4.0};
  const ExperimentConfig config = synthetic_protocol({Algorithm::otbag});
  const double otbag = cell_mean(run_synthetic(config, spec), "otbag");
  const double baseline =
      cell_mean(run_synthetic_baseline(config, spec), "target-only");
  ctx.detail << "otbag=" << otbag << " target-only=" << baseline;
  ctx.require(otbag >= baseline + 0.03, "otbag beats baseline by >= 3 points");
  ctx.require(otbag >= 0.85, "otbag mean >= 85%");
}

void check_negative_transfer(CheckContext& ctx) {
  const SyntheticSpec spec{SyntheticKind::flipped, 10, 1000, 40, 1000, 4.0};
  const ExperimentConfig config = synthetic_protocol(
      {Algorithm::otbag, Algorithm::sdmv, Algorithm::jdsmv});
  const ResultTable table = run_synthetic(config, spec);
  const double otbag = cell_mean(table, "otbag");
  const double sdmv = cell_mean(table, "sdmv");
  const double jdsmv = cell_mean(table, "jdsmv");
  ctx.detail << "otbag=" << otbag << " sdmv=" << sdmv << " jdsmv=" << jdsmv;
  ctx.require(jdsmv >= otbag + 0.05, "jdsmv beats otbag by >= 5 points");
  ctx.require(sdmv >= otbag, "sdmv >= otbag");
}

void check_run_determinism(CheckContext& ctx) {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() /
      ("otbag-selftest-" + std::to_string(::getpid()));
  fs::create_directories(dir);

  const SyntheticSpec spec{SyntheticKind::aligned, 4, 60, 50, 50, 3.0};
  const TransferTask seed_task = make_synthetic_task(spec, 99);
  Dataset target = seed_task.target_train;
  target.instances.insert(target.instances.end(),
                          seed_task.target_test.instances.begin(),
                          seed_task.target_test.instances.end());
  const CsvOptions csv;
  save_dense_csv(seed_task.source, dir / "source.csv", csv);
  save_dense_csv(target, dir / "target.csv", csv);

  ExperimentConfig config = synthetic_protocol(
      {Algorithm::otbag, Algorithm::sdmv, Algorithm::jdsmv});
  config.repetitions = 5;
  config.alpha = 4;
  config.source_path = (dir / "source.csv").string();
  config.target_path = (dir / "target.csv").string();

  const std::string first =
      render_report(run_experiment(config), ReportFormat::json);
  const std::string second =
      render_report(run_experiment(config), ReportFormat::json);
  ctx.detail << first.size() << " report bytes";
  ctx.require(first == second, "byte-identical json reports");
  ctx.require(table_from_json(first) == table_from_json(second),
              "parsed tables equal");

  std::error_code ec;
  fs::remove_all(dir, ec);
}

void check_gradient(CheckContext& ctx) {
  SeededRng rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + static_cast<std::size_t>(rng.next_below(5));
    std::vector<double> weights(dim), point(dim);
    for (double& w : weights) w = 2.0 * rng.next_unit() - 1.0;
    for (double& v : point) v = 4.0 * rng.next_unit() - 2.0;
    const double bias = 2.0 * rng.next_unit() - 1.0;
    const double y = rng.next_unit() < 0.5 ? 0.0 : 1.0;
    const FeatureVector x = FeatureVector::dense(point);

    const auto loss = [&](const std::vector<double>& w, double b) {
      double s = b;
      for (std::size_t i = 0; i < dim; ++i) s += w[i] * point[i];
      const double p = 1.0 / (1.0 + std::exp(-s));
      return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    };

    // Analytic gradient of the logistic loss: (p - y) * [x, 1].
    double s = bias;
    for (std::size_t i = 0; i < dim; ++i) s += weights[i] * point[i];
    const double p = 1.0 / (1.0 + std::exp(-s));
    std::vector<double> analytic(dim + 1);
    for (std::size_t i = 0; i < dim; ++i) analytic[i] = (p - y) * point[i];
    analytic[dim] = p - y;

    const double eps = 1e-6;
    std::vector<double> numeric(dim + 1);
    for (std::size_t i = 0; i < dim; ++i) {
      std::vector<double> hi = weights, lo = weights;
      hi[i] += eps;
      lo[i] -= eps;
      numeric[i] = (loss(hi, bias) - loss(lo, bias)) / (2.0 * eps);
    }
    numeric[dim] = (loss(weights, bias + eps) - loss(weights, bias - eps)) /
                   (2.0 * eps);

    double gap = 0.0, norm = 0.0;
    for (std::size_t i = 0; i <= dim; ++i) {
      gap += (numeric[i] - analytic[i]) * (numeric[i] - analytic[i]);
      norm += analytic[i] * analytic[i];
    }
    worst = std::max(worst, std::sqrt(gap) / std::max(std::sqrt(norm), 1e-12));

    // The learner's update step must move along -gradient scaled by lr.
    WeakLearner learner = WeakLearner::from_state(
        LearnerConfig{LearnerKind::online_logistic, 0.1}, weights, bias);
    learner.learn(x, y == 1.0 ? BinaryLabel::positive : BinaryLabel::negative);
    for (std::size_t i = 0; i < dim; ++i) {
      const double expected = weights[i] - 0.1 * analytic[i];
      if (std::abs(learner.weights()[i] - expected) > 1e-12) {
        ctx.require(false, "update step equals -lr * gradient");
        return;
      }
    }
  }
  ctx.detail << "max relative gradient error = " << worst;
  ctx.require(worst < 1e-5, "finite-difference match within 1e-5");
}

void check_serialization(CheckContext& ctx) {
  const SyntheticSpec spec{SyntheticKind::aligned, 6, 80, 40, 10, 3.0};
  const TransferTask task = make_synthetic_task(spec, 3);
  const std::vector<TaggedInstance> stream = interleave_stream(task, 3);

  std::vector<AnyModel> models;
  {
    SeededRng rng(21);
    models.emplace_back(train_otbag(stream, 5, LearnerConfig{}, rng));
  }
  {
    SeededRng rng(21);
    models.emplace_back(train_sdmv(stream, 5, LearnerConfig{}, rng));
  }
  {
    SeededRng rng(21);
    models.emplace_back(train_jdsmv(stream, 5, LearnerConfig{},
                                    Segmentation::by_alpha(4), rng));
  }

  SeededRng point_rng(77);
  std::vector<FeatureVector> points;
  points.reserve(1000);
  for (int i = 0; i < 1000; ++i) points.push_back(random_point(6, point_rng));

  for (const AnyModel& model : models) {
    std::stringstream buffer;
    save_model(model, buffer);
    const AnyModel reloaded = load_model(buffer);
    std::size_t agreements = 0;
    for (const FeatureVector& x : points) {
      if (predict(model, x) == predict(reloaded, x)) ++agreements;
    }
    ctx.require(agreements == points.size(),
                algorithm_tag(model) + " round-trip predictions identical");
  }
  ctx.detail << models.size() << " model kinds, 1000 points each";
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<void(CheckContext&)> body;
};

}  // namespace

int run_selftest(std::ostream& out) {
  const std::vector<Criterion> criteria = {
      {1, "binomial(N,1/N) converges to Poisson(1)", 1.0, check_poisson_limit},
      {2, "Poisson(1) sampler statistics", 2.0, check_sampler_statistics},
      {3, "M=1, k=1 ensemble equals a single learner", 1.0,
       check_degenerate_ensemble},
      {4, "majority vote vs exhaustive count", 1.0, check_vote_oracle},
      {5, "hand-traced sdmv/jdsmv ledgers", 1.0, check_hand_trace},
      {6, "aligned source lifts target accuracy", 10.0, check_positive_transfer},
      {7, "filters mitigate a flipped source", 15.0, check_negative_transfer},
      {8, "identical runs give identical json", 10.0, check_run_determinism},
      {9, "logistic update matches finite differences", 1.0, check_gradient},
      {10, "model save/load is prediction-exact", 2.0, check_serialization},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    CheckContext ctx;
    ctx.detail << std::setprecision(4);
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.body(ctx);
    } catch (const std::exception& e) {
      ctx.ok = false;
      ctx.detail << " [exception: " << e.what() << "]";
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (seconds >= criterion.budget_seconds) {
      ctx.ok = false;
      ctx.detail << " [over budget of " << criterion.budget_seconds << "s]";
    }
    if (!ctx.ok) ++failures;
    out << (ctx.ok ? "[PASS] " : "[FAIL] ") << criterion.id << ". "
        << criterion.name << " (" << std::fixed << std::setprecision(2)
        << seconds << "s)";
    out.unsetf(std::ios_base::floatfield);
    const std::string detail = ctx.detail.str();
    if (!detail.empty()) out << " -- " << detail;
    out << '\n';
  }
  out << (failures == 0 ? "all criteria passed"
                        : std::to_string(failures) + " criteria failed")
      << '\n';
  return failures;
}

}  // namespace otbag
