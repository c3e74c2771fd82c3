#include "connsemble/ensemble.hpp"
#include "connsemble/error.hpp"
#include "connsemble/evaluation.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

using namespace connsemble;

namespace {

// Two Gaussian groups; `shift` moves the MCI mean in every measure.
LabeledCohort toy_cohort(int hc, int mci, Index dim, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  LabeledCohort c;
  for (int i = 0; i < hc + mci; ++i) {
    c.subject_ids.push_back("t" + std::to_string(i));
    c.labels.push_back(i < hc ? 0 : 1);
  }
  std::shuffle(c.labels.begin(), c.labels.end(), rng);
  for (auto& f : c.features) {
    f.resize(hc + mci, dim);
    for (Index r = 0; r < f.rows(); ++r)
      for (Index j = 0; j < dim; ++j) f(r, j) = g(rng) + (c.labels[r] == 1 && j < 3 ? shift : 0.0);
  }
  return c;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.folds = 4;
  cfg.repetitions = 2;
  cfg.seed = 11;
  cfg.train.max_iterations = 60;
  return cfg;
}

class LeakageAudit : public ExperimentObserver {
 public:
  std::vector<std::tuple<std::string, int, int, std::vector<std::size_t>>> log;
  void on_rows_observed(std::string_view stage, int rep, int fold, std::span<const std::size_t> rows) override {
    log.emplace_back(std::string(stage), rep, fold, std::vector<std::size_t>(rows.begin(), rows.end()));
  }
};

}  // namespace

TEST_CASE("soft voting and decision rule") {
  CHECK(soft_vote(0.2, 0.4, 0.9) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(soft_vote(0.3, 0.3, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(predict_label(0.49) == Diagnosis::hc);
  CHECK(predict_label(0.51) == Diagnosis::mci);
  CHECK(predict_label(0.5) == Diagnosis::mci);
  CHECK(predict_label(0.6, 0.7) == Diagnosis::hc);
}

TEST_CASE("fuse_features order is fixed") {
  FeatureVector w{Measure::weights, Vector::Constant(1, 1.0)};
  FeatureVector s{Measure::shortest_path, Vector::Constant(1, 2.0)};
  FeatureVector c{Measure::communicability, Vector::Constant(1, 3.0)};
  for (const auto& f : {fuse_features(w, s, c), fuse_features(c, w, s), fuse_features(s, c, w)}) {
    CHECK(f.measure == Measure::fused);
    REQUIRE(f.values.size() == 3);
    CHECK(f.values[0] == 1.0);
    CHECK(f.values[1] == 2.0);
    CHECK(f.values[2] == 3.0);
  }
  FeatureVector big{Measure::weights, Vector::Zero(7140)};
  FeatureVector big_s{Measure::shortest_path, Vector::Zero(7140)};
  FeatureVector big_c{Measure::communicability, Vector::Zero(7140)};
  CHECK(fuse_features(big, big_s, big_c).values.size() == 21420);

  FeatureVector shorter{Measure::communicability, Vector::Zero(2)};
  CHECK_THROWS_AS(fuse_features(w, s, shorter), Error);
  CHECK_THROWS_AS(fuse_features(w, w, c), Error);
}

TEST_CASE("ensemble of identical members") {
  LabeledCohort c = toy_cohort(15, 20, 4, 2.0, 3);
  c.features[1] = c.features[0];
  c.features[2] = c.features[0];
  TrainConfig cfg;
  cfg.seed = 5;
  const EnsembleModel m = train_ensemble(c, cfg);
  const Matrix members = member_probabilities(m, c);
  const Vector ens = ensemble_probabilities(m, c);
  for (Index r = 0; r < c.size(); ++r) {
    CHECK(members(r, 0) == members(r, 1));
    CHECK(members(r, 0) == members(r, 2));
    CHECK(ens[r] == doctest::Approx(members(r, 0)).epsilon(1e-15));
  }
  const EnsembleModel again = train_ensemble(c, cfg);
  CHECK(ensemble_probabilities(again, c) == ens);
}

TEST_CASE("soft_vote over feature vectors") {
  const LabeledCohort c = toy_cohort(12, 14, 5, 1.5, 4);
  const EnsembleModel m = train_ensemble(c, TrainConfig{});
  const Matrix members = member_probabilities(m, c);
  for (Index r = 0; r < 4; ++r) {
    std::vector<FeatureVector> subject{{Measure::communicability, c.features[2].row(r).transpose()},
                                       {Measure::weights, c.features[0].row(r).transpose()},
                                       {Measure::shortest_path, c.features[1].row(r).transpose()}};
    const double p = soft_vote(m, subject);
    CHECK(p == doctest::Approx(soft_vote(members(r, 0), members(r, 1), members(r, 2))).epsilon(1e-14));
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    subject.pop_back();
    CHECK_THROWS_AS(soft_vote(m, subject), Error);
  }
}

TEST_CASE("experiment report shape and ensemble consistency") {
  const LabeledCohort c = toy_cohort(16, 24, 6, 1.5, 5);
  const ExperimentConfig cfg = small_config();
  const EvaluationReport rep = run_experiment(c, cfg);
  CHECK(rep.folds.size() == 8);
  CHECK(rep.tests.size() == 50);
  for (Strategy s : kStrategies)
    for (Metric m : kMetrics) {
      CHECK(rep.samples(s, m).size() == 8);
      CHECK(rep.at(s, m).n == 8);
      CHECK(rep.at(s, m).standard_error >= 0.0);
      CHECK(rep.at(s, m).mean >= 0.0);
      CHECK(rep.at(s, m).mean <= 1.0);
    }
  for (const auto& f : rep.folds) {
    for (Index i = 0; i < f.scores[4].size(); ++i)
      CHECK(f.scores[4][i] == (f.scores[0][i] + f.scores[1][i] + f.scores[2][i]) / 3.0);
    for (std::size_t s = 0; s < 5; ++s) CHECK(f.scores[s].size() == static_cast<Index>(f.test.size()));
  }
  // p(A,B) == p(B,A)
  for (const auto& t : rep.tests) {
    const auto pa = mann_whitney_u(rep.samples(t.a, t.metric), rep.samples(t.b, t.metric));
    const auto pb = mann_whitney_u(rep.samples(t.b, t.metric), rep.samples(t.a, t.metric));
    CHECK(pa.p == pb.p);
    CHECK(t.p == pa.p);
  }
  CHECK(rep.at(Strategy::ensemble, Metric::auc).mean > 0.8);
}

TEST_CASE("experiment is deterministic and thread-count independent") {
  const LabeledCohort c = toy_cohort(14, 22, 5, 1.0, 6);
  ExperimentConfig cfg = small_config();
  cfg.sampler.method = SamplerMethod::random;
  cfg.sampler_mode = SamplerMode::fold;
  const EvaluationReport a = run_experiment(c, cfg);
  cfg.threads = 3;
  const EvaluationReport b = run_experiment(c, cfg);
  CHECK(a.values == b.values);
  for (std::size_t i = 0; i < a.folds.size(); ++i) {
    CHECK(a.folds[i].train == b.folds[i].train);
    for (std::size_t s = 0; s < 5; ++s) CHECK(a.folds[i].scores[s] == b.folds[i].scores[s]);
  }
  cfg.seed = 12;
  CHECK(run_experiment(c, cfg).values != a.values);
}

TEST_CASE("fold-mode samplers never see test rows") {
  const LabeledCohort c = toy_cohort(16, 30, 4, 1.0, 7);
  for (SamplerMethod method : {SamplerMethod::random, SamplerMethod::near_miss_3, SamplerMethod::instance_hardness}) {
    ExperimentConfig cfg = small_config();
    cfg.repetitions = 1;
    cfg.train.max_iterations = 20;
    cfg.sampler.method = method;
    cfg.sampler_mode = SamplerMode::fold;
    LeakageAudit audit;
    const EvaluationReport rep = run_experiment(c, cfg, &audit);
    CHECK(rep.evaluated.subjects == c.labels.size());
    std::map<std::pair<int, int>, std::set<std::size_t>> test_rows;
    for (const auto& f : rep.folds) test_rows[{f.repetition, f.fold}] = {f.test.begin(), f.test.end()};
    int sampler_calls = 0, train_calls = 0;
    for (const auto& [stage, r, f, rows] : audit.log) {
      REQUIRE(test_rows.count({r, f}) == 1);
      for (std::size_t row : rows) CHECK(test_rows[{r, f}].count(row) == 0);
      (stage == "sampler" ? sampler_calls : train_calls)++;
    }
    CHECK(sampler_calls == 4);
    CHECK(train_calls == 4);
    for (const auto& f : rep.folds) {
      std::size_t hc = 0;
      for (auto row : f.train) hc += c.labels[row] == 0;
      CHECK(f.train.size() == 2 * hc);
    }
  }
}

TEST_CASE("dataset-mode sampling happens once before the folds") {
  const LabeledCohort c = toy_cohort(16, 30, 4, 1.0, 8);
  ExperimentConfig cfg = small_config();
  cfg.repetitions = 1;
  cfg.sampler.method = SamplerMethod::random;
  LeakageAudit audit;
  const EvaluationReport rep = run_experiment(c, cfg, &audit);
  CHECK(rep.input.subjects == 46);
  CHECK(rep.evaluated.subjects == 32);
  CHECK(rep.evaluated.hc == 16);
  CHECK(rep.evaluated.mci == 16);
  REQUIRE(!audit.log.empty());
  CHECK(std::get<0>(audit.log.front()) == "sampler");
  CHECK(std::get<1>(audit.log.front()) == -1);
}

TEST_CASE("pooled AUC gives one value per repetition") {
  const LabeledCohort c = toy_cohort(12, 20, 4, 1.0, 9);
  ExperimentConfig cfg = small_config();
  cfg.auc_mode = AucMode::pooled;
  const EvaluationReport rep = run_experiment(c, cfg);
  CHECK(rep.samples(Strategy::fusion, Metric::auc).size() == 2);
  CHECK(rep.samples(Strategy::fusion, Metric::accuracy).size() == 8);
}

TEST_CASE("experiment config validation") {
  ExperimentConfig cfg;
  cfg.folds = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.repetitions = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.threshold = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.threads = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(strategy_from_string("ensemble") == Strategy::ensemble);
  CHECK(metric_from_string("f1") == Metric::f1);
  CHECK_THROWS_AS(metric_from_string("precision"), Error);
}
