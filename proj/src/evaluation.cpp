#include "connsemble/evaluation.hpp"

#include "connsemble/ensemble.hpp"
#include "connsemble/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace connsemble {

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::weights: return "weights";
    case Strategy::shortest_path: return "shortest_path";
    case Strategy::communicability: return "communicability";
    case Strategy::fusion: return "fusion";
    case Strategy::ensemble: return "ensemble";
  }
  return "unknown";
}

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::accuracy: return "accuracy";
    case Metric::auc: return "auc";
    case Metric::sensitivity: return "sensitivity";
    case Metric::specificity: return "specificity";
    case Metric::f1: return "f1";
  }
  return "unknown";
}

std::string_view to_string(SamplerMode m) noexcept { return m == SamplerMode::dataset ? "dataset" : "fold"; }
std::string_view to_string(AucMode m) noexcept { return m == AucMode::per_fold ? "per_fold" : "pooled"; }

Strategy strategy_from_string(std::string_view s) {
  for (Strategy x : kStrategies)
    if (to_string(x) == s) return x;
  raise(Errc::invalid_argument, "unknown strategy '" + std::string(s) + "'");
}

Metric metric_from_string(std::string_view s) {
  for (Metric x : kMetrics)
    if (to_string(x) == s) return x;
  raise(Errc::invalid_argument, "unknown metric '" + std::string(s) + "'");
}

SamplerMode sampler_mode_from_string(std::string_view s) {
  if (s == "dataset") return SamplerMode::dataset;
  if (s == "fold") return SamplerMode::fold;
  raise(Errc::invalid_argument, "sampler mode must be dataset or fold, got '" + std::string(s) + "'");
}

AucMode auc_mode_from_string(std::string_view s) {
  if (s == "per_fold") return AucMode::per_fold;
  if (s == "pooled") return AucMode::pooled;
  raise(Errc::invalid_argument, "AUC mode must be per_fold or pooled, got '" + std::string(s) + "'");
}

double metric_value(const FoldMetrics& fm, Metric m) noexcept {
  switch (m) {
    case Metric::accuracy: return fm.accuracy;
    case Metric::auc: return fm.auc;
    case Metric::sensitivity: return fm.sensitivity;
    case Metric::specificity: return fm.specificity;
    case Metric::f1: return fm.f1;
  }
  return 0.0;
}

void ExperimentConfig::validate() const {
  sampler.validate();
  train.validate();
  if (folds < 2) raise(Errc::invalid_config, "folds must be >= 2");
  if (repetitions < 1) raise(Errc::invalid_config, "repetitions must be >= 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) raise(Errc::invalid_config, "threshold must lie in [0, 1]");
  if (threads < 1) raise(Errc::invalid_config, "threads must be >= 1");
}

const MetricSummary& EvaluationReport::at(Strategy s, Metric m) const {
  return summary[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)];
}

const std::vector<double>& EvaluationReport::samples(Strategy s, Metric m) const {
  return values[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)];
}

namespace {

// Seed streams under the master seed.
constexpr std::uint64_t kFoldStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kSamplerStream = 3;

CohortCounts counts_of(const LabeledCohort& c) {
  return {c.labels.size(), static_cast<std::size_t>(c.count(Diagnosis::hc)),
          static_cast<std::size_t>(c.count(Diagnosis::mci))};
}

FoldOutcome run_fold(const LabeledCohort& cohort, const FoldAssignment& fa, const ExperimentConfig& cfg,
                     std::uint64_t task_index, ExperimentObserver* observer, std::mutex& observer_mutex) {
  FoldOutcome out;
  out.repetition = fa.repetition;
  out.fold = fa.fold;
  out.test = fa.test;
  out.train = fa.train;

  const auto notify = [&](std::string_view stage, std::span<const std::size_t> rows) {
    if (observer == nullptr) return;
    std::lock_guard lock(observer_mutex);
    observer->on_rows_observed(stage, fa.repetition, fa.fold, rows);
  };

  if (cfg.sampler_mode == SamplerMode::fold && cfg.sampler.method != SamplerMethod::none) {
    notify("sampler", fa.train);
    SamplerConfig sc = cfg.sampler;
    sc.seed = derive_seed(cfg.seed, kSamplerStream, 1 + task_index);
    const SamplingOutcome sampled = apply_sampler(cohort.subset(fa.train), sc);
    std::vector<std::size_t> kept;
    kept.reserve(sampled.retained.size());
    for (std::size_t r : sampled.retained) kept.push_back(fa.train[r]);
    out.train = std::move(kept);
  }
  notify("train", out.train);

  const LabeledCohort train = cohort.subset(out.train);
  const LabeledCohort test = cohort.subset(out.test);
  out.truth = test.labels;

  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(cfg.seed, kTrainStream, task_index);

  for (std::size_t k = 0; k < 3; ++k) {
    const MlpModel model = train_classifier(train.features[k], train.labels, tc);
    out.scores[k] = predict_proba_batch(model, test.features[k]);
  }
  {
    const MlpModel fused = train_classifier(train.fused(), train.labels, tc);
    out.scores[3] = predict_proba_batch(fused, test.fused());
  }
  out.scores[4].resize(static_cast<Index>(out.test.size()));
  for (Index i = 0; i < out.scores[4].size(); ++i)
    out.scores[4][i] = soft_vote(out.scores[0][i], out.scores[1][i], out.scores[2][i]);

  for (std::size_t s = 0; s < kStrategies.size(); ++s) {
    std::vector<int> predicted(out.test.size());
    std::vector<double> scores(out.scores[s].data(), out.scores[s].data() + out.scores[s].size());
    for (std::size_t i = 0; i < predicted.size(); ++i)
      predicted[i] = static_cast<int>(predict_label(scores[i], cfg.threshold));
    out.metrics[s] = compute_fold_metrics(out.truth, predicted, scores);
  }
  return out;
}

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void summarize(EvaluationReport& report) {
  report.tests.clear();
  for (std::size_t s = 0; s < kStrategies.size(); ++s)
    for (std::size_t m = 0; m < kMetrics.size(); ++m) report.summary[s][m] = aggregate_metrics(report.values[s][m]);
  for (std::size_t m = 0; m < kMetrics.size(); ++m)
    for (std::size_t a = 0; a < kStrategies.size(); ++a)
      for (std::size_t b = a + 1; b < kStrategies.size(); ++b) {
        const MannWhitneyResult r = mann_whitney_u(report.values[a][m], report.values[b][m]);
        report.tests.push_back({kMetrics[m], kStrategies[a], kStrategies[b], r.u, r.p});
      }
}

EvaluationReport run_experiment(const LabeledCohort& cohort, const ExperimentConfig& config,
                                ExperimentObserver* observer) {
  config.validate();
  cohort.validate();

  EvaluationReport report;
  report.config = config;
  report.input = counts_of(cohort);

  LabeledCohort evaluated = cohort;
  if (config.sampler_mode == SamplerMode::dataset && config.sampler.method != SamplerMethod::none) {
    if (observer != nullptr) {
      std::vector<std::size_t> rows(cohort.labels.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
      observer->on_rows_observed("sampler", -1, -1, rows);
    }
    SamplerConfig sc = config.sampler;
    sc.seed = derive_seed(config.seed, kSamplerStream, 0);
    evaluated = apply_sampler(cohort, sc).cohort;
  }
  report.evaluated = counts_of(evaluated);

  std::vector<FoldAssignment> tasks;
  for (int r = 0; r < config.repetitions; ++r) {
    auto folds = stratified_kfold(evaluated.labels, config.folds, derive_seed(config.seed, kFoldStream, r), r);
    for (auto& f : folds) tasks.push_back(std::move(f));
  }

  report.folds.resize(tasks.size());
  std::mutex observer_mutex;
  parallel_for(tasks.size(), config.threads, [&](std::size_t i) {
    report.folds[i] = run_fold(evaluated, tasks[i], config, i, observer, observer_mutex);
  });

  for (std::size_t s = 0; s < kStrategies.size(); ++s) {
    for (std::size_t m = 0; m < kMetrics.size(); ++m) {
      auto& vals = report.values[s][m];
      if (kMetrics[m] == Metric::auc && config.auc_mode == AucMode::pooled) {
        for (int r = 0; r < config.repetitions; ++r) {
          std::vector<int> truth;
          std::vector<double> scores;
          for (const auto& f : report.folds) {
            if (f.repetition != r) continue;
            truth.insert(truth.end(), f.truth.begin(), f.truth.end());
            scores.insert(scores.end(), f.scores[s].data(), f.scores[s].data() + f.scores[s].size());
          }
          vals.push_back(auc(truth, scores));
        }
      } else {
        for (const auto& f : report.folds) vals.push_back(metric_value(f.metrics[s], kMetrics[m]));
      }
    }
  }
  summarize(report);
  return report;
}

std::vector<ReportComparison> compare_reports(const EvaluationReport& a, const EvaluationReport& b) {
  std::vector<ReportComparison> rows;
  for (Strategy s : kStrategies)
    for (Metric m : kMetrics) {
      const auto& va = a.samples(s, m);
      const auto& vb = b.samples(s, m);
      if (va.empty() || vb.empty()) raise(Errc::empty_sample, "report is missing fold values");
      const MannWhitneyResult r = mann_whitney_u(va, vb);
      rows.push_back({s, m, aggregate_metrics(va).mean, aggregate_metrics(vb).mean, r.u, r.p});
    }
  return rows;
}

}  // namespace connsemble
