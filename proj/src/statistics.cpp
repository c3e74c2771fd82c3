#include "connsemble/statistics.hpp"

#include "connsemble/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace connsemble {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) raise(Errc::dimension_mismatch, std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

// Twice the 1-based midrank of every value.
std::vector<std::int64_t> doubled_midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<std::int64_t> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const auto r2 = static_cast<std::int64_t>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = r2;
    i = j;
  }
  return ranks;
}

}  // namespace

ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted) {
  require_same_size(truth.size(), predicted.size(), "labels and predictions differ in length");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool pos = truth[i] == 1;
    const bool hit = predicted[i] == 1;
    if (pos && hit) ++c.tp;
    else if (pos) ++c.fn;
    else if (hit) ++c.fp;
    else ++c.tn;
  }
  return c;
}

double auc(std::span<const int> truth, std::span<const double> scores) {
  require_same_size(truth.size(), scores.size(), "labels and scores differ in length");
  for (double s : scores)
    if (std::isnan(s)) raise(Errc::invalid_argument, "NaN score");
  std::int64_t pos = 0;
  for (int y : truth) {
    if (y != 0 && y != 1) raise(Errc::non_binary_label, "label is not 0 or 1");
    pos += y;
  }
  const std::int64_t neg = static_cast<std::int64_t>(truth.size()) - pos;
  if (pos == 0 || neg == 0) raise(Errc::single_class_fold, "AUC needs both classes");

  const auto ranks = doubled_midranks(scores);
  std::int64_t rank_sum2 = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (truth[i] == 1) rank_sum2 += ranks[i];
  const std::int64_t u2 = rank_sum2 - pos * (pos + 1);
  return static_cast<double>(u2) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

FoldMetrics compute_fold_metrics(std::span<const int> truth, std::span<const int> predicted,
                                 std::span<const double> scores) {
  if (truth.empty()) raise(Errc::empty_fold, "no test subjects");
  require_same_size(truth.size(), scores.size(), "labels and scores differ in length");
  const ConfusionCounts c = confusion(truth, predicted);
  if (c.tp + c.fn == 0 || c.tn + c.fp == 0) raise(Errc::single_class_fold, "test fold contains a single class");

  const auto d = [](std::size_t v) { return static_cast<double>(v); };
  FoldMetrics m;
  m.accuracy = d(c.tp + c.tn) / d(truth.size());
  m.sensitivity = d(c.tp) / d(c.tp + c.fn);
  m.specificity = d(c.tn) / d(c.tn + c.fp);
  m.f1 = 2.0 * d(c.tp) / d(2 * c.tp + c.fp + c.fn);
  m.auc = auc(truth, scores);
  return m;
}

MannWhitneyResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                                 MannWhitneyMethod method) {
  if (sample_a.empty() || sample_b.empty()) raise(Errc::empty_sample, "Mann-Whitney needs two nonempty samples");
  const std::size_t na = sample_a.size();
  const std::size_t nb = sample_b.size();
  const std::size_t total = na + nb;

  std::vector<double> pooled(sample_a.begin(), sample_a.end());
  pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
  for (double v : pooled)
    if (std::isnan(v)) raise(Errc::invalid_argument, "NaN in Mann-Whitney sample");
  const auto ranks = doubled_midranks(pooled);

  std::int64_t ra2 = 0;
  for (std::size_t i = 0; i < na; ++i) ra2 += ranks[i];
  const auto na64 = static_cast<std::int64_t>(na);
  const auto nb64 = static_cast<std::int64_t>(nb);
  const std::int64_t ua2 = ra2 - na64 * (na64 + 1);  // 2 U_a
  const std::int64_t centre2 = na64 * nb64;           // 2 E[U]

  MannWhitneyResult res;
  res.u = static_cast<double>(ua2) / 2.0;
  res.method = method;

  if (method == MannWhitneyMethod::normal) {
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_sum = 0.0;
    for (std::size_t i = 0; i < total;) {
      std::size_t j = i + 1;
      while (j < total && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_sum += t * t * t - t;
      i = j;
    }
    const double n1 = static_cast<double>(na), n2 = static_cast<double>(nb), n = static_cast<double>(total);
    double var = n1 * n2 / 12.0 * (n + 1.0);
    if (total > 1) var = n1 * n2 / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
    if (!(var > 0.0)) return res;
    const double diff = std::max(std::abs(res.u - n1 * n2 / 2.0) - 0.5, 0.0);
    res.z = diff / std::sqrt(var);
    res.p = std::min(1.0, std::erfc(res.z / std::sqrt(2.0)));
    return res;
  }

  if (std::min(na, nb) > kMaxExactMannWhitney)
    raise(Errc::invalid_argument, "exact Mann-Whitney is limited to min(n, m) <= " +
                                      std::to_string(kMaxExactMannWhitney));

  // Count subsets of the smaller size with each doubled rank sum. The two-sided
  // criterion |U - nm/2| is the same whichever sample is counted.
  const std::size_t pick = std::min(na, nb);
  std::int64_t max_sum = 0;
  {
    std::vector<std::int64_t> r = ranks;
    std::sort(r.rbegin(), r.rend());
    for (std::size_t i = 0; i < pick; ++i) max_sum += r[i];
  }
  const auto width = static_cast<std::size_t>(max_sum + 1);
  std::vector<std::vector<long double>> ways(pick + 1, std::vector<long double>(width, 0.0L));
  ways[0][0] = 1.0L;
  for (std::size_t i = 0; i < total; ++i) {
    const auto r = static_cast<std::size_t>(ranks[i]);
    for (std::size_t j = std::min(pick, i + 1); j >= 1; --j)
      for (std::size_t s = width; s-- > r;) ways[j][s] += ways[j - 1][s - r];
  }

  const auto pick64 = static_cast<std::int64_t>(pick);
  const std::int64_t observed = std::abs(ua2 - centre2);
  long double extreme = 0.0L, all = 0.0L;
  for (std::size_t s = 0; s < width; ++s) {
    if (ways[pick][s] == 0.0L) continue;
    const std::int64_t u2 = static_cast<std::int64_t>(s) - pick64 * (pick64 + 1);
    all += ways[pick][s];
    if (std::abs(u2 - centre2) >= observed) extreme += ways[pick][s];
  }
  res.p = static_cast<double>(std::min(1.0L, extreme / all));
  return res;
}

MetricSummary aggregate_metrics(std::span<const double> values) {
  if (values.empty()) raise(Errc::empty_sample, "no values to aggregate");
  MetricSummary s;
  s.n = values.size();
  const double n = static_cast<double>(s.n);
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; })) {
    s.mean = values[0];
    return s;
  }
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

}  // namespace connsemble
