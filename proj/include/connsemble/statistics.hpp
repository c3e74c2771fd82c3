#pragma once

#include <cstddef>
#include <span>

namespace connsemble {

/// Classification metrics of one test fold; MCI (label 1) is positive.
struct FoldMetrics {
  double accuracy = 0.0;
  double auc = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double f1 = 0.0;
};

struct ConfusionCounts {
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
};

ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted);

FoldMetrics compute_fold_metrics(std::span<const int> truth, std::span<const int> predicted,
                                 std::span<const double> scores);

/// Probability that a random positive outscores a random negative, ties 1/2.
/// Computed from integer (doubled) midrank sums, so the result is the correctly
/// rounded quotient of the pair count.
double auc(std::span<const int> truth, std::span<const double> scores);

enum class MannWhitneyMethod { normal, exact };

struct MannWhitneyResult {
  double u = 0.0;  // statistic of sample_a: R_a - n_a (n_a + 1) / 2
  double p = 1.0;  // two-sided
  double z = 0.0;  // normal method only
  MannWhitneyMethod method = MannWhitneyMethod::normal;
};

inline constexpr std::size_t kMaxExactMannWhitney = 8;

/// Midranks for ties. The normal method uses the tie-corrected variance and a
/// 0.5 continuity correction. The exact method counts every assignment of the
/// pooled midranks to sample_a and needs min(n_a, n_b) <= kMaxExactMannWhitney.
MannWhitneyResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                                 MannWhitneyMethod method = MannWhitneyMethod::normal);

struct MetricSummary {
  double mean = 0.0;
  double standard_error = 0.0;  // s / sqrt(n), s with n - 1 denominator; 0 for n = 1
  std::size_t n = 0;
};

MetricSummary aggregate_metrics(std::span<const double> values);

}  // namespace connsemble
