#pragma once

#include "connsemble/cohort.hpp"
#include "connsemble/crossval.hpp"
#include "connsemble/neuralnet.hpp"
#include "connsemble/sampling.hpp"
#include "connsemble/statistics.hpp"

#include <string>
#include <string_view>

namespace connsemble {

/// The five compared pipelines: one MLP per perspective, one MLP on the fused
/// vector, and the soft-voting ensemble of the three single-perspective MLPs.
enum class Strategy { weights, shortest_path, communicability, fusion, ensemble };
enum class Metric { accuracy, auc, sensitivity, specificity, f1 };

inline constexpr std::array<Strategy, 5> kStrategies = {Strategy::weights, Strategy::shortest_path,
                                                        Strategy::communicability, Strategy::fusion,
                                                        Strategy::ensemble};
inline constexpr std::array<Metric, 5> kMetrics = {Metric::accuracy, Metric::auc, Metric::sensitivity,
                                                   Metric::specificity, Metric::f1};

std::string_view to_string(Strategy s) noexcept;
std::string_view to_string(Metric m) noexcept;
Strategy strategy_from_string(std::string_view s);
Metric metric_from_string(std::string_view s);
double metric_value(const FoldMetrics& fm, Metric m) noexcept;

/// dataset: resample the whole cohort once before cross-validation.
/// fold: resample each training split; test folds are never touched.
enum class SamplerMode { dataset, fold };
/// per_fold: one AUC per test fold. pooled: one AUC per repetition over all out-of-fold scores.
enum class AucMode { per_fold, pooled };

std::string_view to_string(SamplerMode m) noexcept;
std::string_view to_string(AucMode m) noexcept;
SamplerMode sampler_mode_from_string(std::string_view s);
AucMode auc_mode_from_string(std::string_view s);

struct ExperimentConfig {
  SamplerConfig sampler;
  SamplerMode sampler_mode = SamplerMode::dataset;
  TrainConfig train;
  int folds = 10;
  int repetitions = 10;
  /// Master seed. Fold partitions, sampler and training seeds are all derived
  /// from it (see derive_seed); the seeds inside `sampler` and `train` are ignored.
  std::uint64_t seed = 0;
  double threshold = 0.5;
  AucMode auc_mode = AucMode::per_fold;
  /// Worker threads for folds. Results do not depend on it.
  int threads = 1;
  /// Recorded in reports; extraction happens before evaluation.
  std::string disconnected_policy = "max_finite";

  void validate() const;
};

struct FoldOutcome {
  int repetition = 0;
  int fold = 0;
  std::vector<std::size_t> train;  // rows actually trained on
  std::vector<std::size_t> test;
  std::vector<int> truth;
  std::array<Vector, 5> scores;  // kStrategies order, aligned with `test`
  std::array<FoldMetrics, 5> metrics;
};

struct PairwiseTest {
  Metric metric = Metric::accuracy;
  Strategy a = Strategy::weights;
  Strategy b = Strategy::weights;
  double u = 0.0;
  double p = 1.0;
};

struct CohortCounts {
  std::size_t subjects = 0;
  std::size_t hc = 0;
  std::size_t mci = 0;
};

struct EvaluationReport {
  ExperimentConfig config;
  CohortCounts input;
  CohortCounts evaluated;  // after dataset-level resampling
  /// [strategy][metric] -> one value per fold (per repetition for pooled AUC).
  std::array<std::array<std::vector<double>, 5>, 5> values;
  std::array<std::array<MetricSummary, 5>, 5> summary;
  std::vector<PairwiseTest> tests;
  /// Subject-level detail; only present on reports produced in this process.
  std::vector<FoldOutcome> folds;

  const MetricSummary& at(Strategy s, Metric m) const;
  const std::vector<double>& samples(Strategy s, Metric m) const;
};

/// Receives the rows each fitting step sees, for leakage audits.
class ExperimentObserver {
 public:
  virtual ~ExperimentObserver() = default;
  /// `stage` is "sampler" or "train"; repetition/fold are -1 for dataset-level steps.
  virtual void on_rows_observed(std::string_view stage, int repetition, int fold,
                                std::span<const std::size_t> rows) = 0;
};

EvaluationReport run_experiment(const LabeledCohort& cohort, const ExperimentConfig& config,
                                ExperimentObserver* observer = nullptr);

/// Mean/SE and all pairwise Mann-Whitney tests, recomputed from `values`.
void summarize(EvaluationReport& report);

struct ReportComparison {
  Strategy strategy = Strategy::weights;
  Metric metric = Metric::accuracy;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double u = 0.0;
  double p = 1.0;
};

/// Mann-Whitney test of the same (strategy, metric) samples across two reports.
std::vector<ReportComparison> compare_reports(const EvaluationReport& a, const EvaluationReport& b);

}  // namespace connsemble
