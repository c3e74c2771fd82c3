#include "connsemble/sampling.hpp"

#include "connsemble/crossval.hpp"
#include "connsemble/error.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

namespace connsemble {

std::string_view to_string(SamplerMethod m) noexcept {
  switch (m) {
    case SamplerMethod::none: return "none";
    case SamplerMethod::random: return "random";
    case SamplerMethod::near_miss_3: return "nearmiss3";
    case SamplerMethod::instance_hardness: return "iht";
  }
  return "none";
}

SamplerMethod sampler_from_string(std::string_view name) {
  if (name == "none") return SamplerMethod::none;
  if (name == "random") return SamplerMethod::random;
  if (name == "nearmiss3" || name == "near_miss_3") return SamplerMethod::near_miss_3;
  if (name == "iht" || name == "instance_hardness") return SamplerMethod::instance_hardness;
  raise(Errc::invalid_argument, "unknown sampler '" + std::string(name) + "'");
}

void SamplerConfig::validate() const {
  if (k_neighbors < 1) raise(Errc::invalid_config, "k_neighbors must be >= 1");
  if (iht_internal_folds < 2) raise(Errc::invalid_config, "iht_internal_folds must be >= 2");
  iht_train_config.validate();
}

namespace {

struct ClassSplit {
  std::vector<std::size_t> majority;
  std::vector<std::size_t> minority;
  bool balanced = false;
};

ClassSplit split_classes(std::span<const int> labels) {
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) raise(Errc::non_binary_label, "label is not 0 or 1");
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  if (by_class[0].empty() || by_class[1].empty())
    raise(Errc::single_class_cohort, "under-sampling needs both classes");
  ClassSplit s;
  s.balanced = by_class[0].size() == by_class[1].size();
  const bool mci_major = by_class[1].size() > by_class[0].size();
  s.majority = std::move(by_class[mci_major ? 1 : 0]);
  s.minority = std::move(by_class[mci_major ? 0 : 1]);
  return s;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<std::size_t> merge(const std::vector<std::size_t>& minority, std::vector<std::size_t> kept_majority) {
  kept_majority.insert(kept_majority.end(), minority.begin(), minority.end());
  std::sort(kept_majority.begin(), kept_majority.end());
  return kept_majority;
}

// Majority rows ordered by descending score, ascending index on ties.
std::vector<std::size_t> by_score_desc(std::vector<std::size_t> rows, const std::vector<double>& score_of_row) {
  std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    if (score_of_row[a] != score_of_row[b]) return score_of_row[a] > score_of_row[b];
    return a < b;
  });
  return rows;
}

}  // namespace

std::vector<std::size_t> select_random_undersample(std::span<const int> labels, std::uint64_t seed) {
  ClassSplit s = split_classes(labels);
  if (s.balanced) return all_rows(labels.size());
  std::mt19937_64 rng(seed);
  std::shuffle(s.majority.begin(), s.majority.end(), rng);
  s.majority.resize(s.minority.size());
  return merge(s.minority, std::move(s.majority));
}

std::vector<std::size_t> select_near_miss_3(const Matrix& points, std::span<const int> labels, int k) {
  if (k < 1) raise(Errc::invalid_argument, "k must be >= 1");
  if (points.rows() != static_cast<Index>(labels.size()))
    raise(Errc::dimension_mismatch, "point count differs from label count");
  const ClassSplit s = split_classes(labels);
  if (s.balanced) return all_rows(labels.size());

  const std::size_t n_min = s.minority.size();
  const std::size_t n_maj = s.majority.size();
  // dist(a, b): a-th minority row to b-th majority row.
  Matrix dist(static_cast<Index>(n_min), static_cast<Index>(n_maj));
  for (std::size_t a = 0; a < n_min; ++a)
    for (std::size_t b = 0; b < n_maj; ++b)
      dist(a, b) = (points.row(s.minority[a]) - points.row(s.majority[b])).norm();

  // Step 1: the k nearest majority rows of each minority row form the short-list.
  const std::size_t k_maj = std::min<std::size_t>(k, n_maj);
  std::set<std::size_t> shortlist;
  std::vector<std::size_t> order(n_maj);
  for (std::size_t a = 0; a < n_min; ++a) {
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k_maj, order.end(), [&](std::size_t x, std::size_t y) {
      if (dist(a, x) != dist(a, y)) return dist(a, x) < dist(a, y);
      return s.majority[x] < s.majority[y];
    });
    for (std::size_t t = 0; t < k_maj; ++t) shortlist.insert(s.majority[order[t]]);
  }

  // Step 2: mean distance of each majority row to its k nearest minority rows.
  const std::size_t k_min = std::min<std::size_t>(k, n_min);
  std::vector<double> score(labels.size(), 0.0);
  std::vector<double> column(n_min);
  for (std::size_t b = 0; b < n_maj; ++b) {
    for (std::size_t a = 0; a < n_min; ++a) column[a] = dist(a, b);
    std::partial_sort(column.begin(), column.begin() + k_min, column.end());
    score[s.majority[b]] = std::accumulate(column.begin(), column.begin() + k_min, 0.0) / k_min;
  }

  std::vector<std::size_t> kept = by_score_desc({shortlist.begin(), shortlist.end()}, score);
  if (kept.size() >= n_min) {
    kept.resize(n_min);
  } else {
    std::vector<std::size_t> rest;
    for (std::size_t r : s.majority)
      if (!shortlist.count(r)) rest.push_back(r);
    rest = by_score_desc(std::move(rest), score);
    for (std::size_t t = 0; kept.size() < n_min; ++t) kept.push_back(rest[t]);
  }
  return merge(s.minority, std::move(kept));
}

Vector instance_hardness_scores(const Matrix& points, std::span<const int> labels, const SamplerConfig& cfg) {
  cfg.validate();
  if (points.rows() != static_cast<Index>(labels.size()))
    raise(Errc::dimension_mismatch, "point count differs from label count");
  split_classes(labels);

  std::vector<FoldAssignment> folds;
  try {
    folds = stratified_kfold(labels, cfg.iht_internal_folds, derive_seed(cfg.seed, 0x1A7, 0));
  } catch (const Error& e) {
    if (e.code() != Errc::class_smaller_than_k) throw;
    raise(Errc::insufficient_samples_for_folds, "instance hardness needs at least " +
                                                    std::to_string(cfg.iht_internal_folds) + " rows per class");
  }

  Vector correct(points.rows());
  for (const auto& fold : folds) {
    TrainConfig tc = cfg.iht_train_config;
    tc.seed = derive_seed(cfg.seed, 0x1A7, 1 + static_cast<std::uint64_t>(fold.fold));
    const std::vector<int> train_labels = gather(labels, fold.train);
    const MlpModel model = train_classifier(gather_rows(points, fold.train), train_labels, tc);
    const Vector p = predict_proba_batch(model, gather_rows(points, fold.test));
    for (std::size_t t = 0; t < fold.test.size(); ++t) {
      const std::size_t row = fold.test[t];
      correct[static_cast<Index>(row)] = labels[row] == 1 ? p[static_cast<Index>(t)] : 1.0 - p[static_cast<Index>(t)];
    }
  }
  return correct;
}

std::vector<std::size_t> select_instance_hardness(const Matrix& points, std::span<const int> labels,
                                                  const SamplerConfig& cfg) {
  const ClassSplit s = split_classes(labels);
  if (s.balanced) return all_rows(labels.size());
  const Vector correct = instance_hardness_scores(points, labels, cfg);
  std::vector<double> score(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) score[i] = correct[static_cast<Index>(i)];
  // Keep the easiest (highest correct-class probability) majority rows.
  std::vector<std::size_t> kept = by_score_desc(s.majority, score);
  kept.resize(s.minority.size());
  return merge(s.minority, std::move(kept));
}

Matrix sampling_space(const LabeledCohort& cohort) {
  const Matrix fused = cohort.fused();
  return fit_normalizer(fused).transform(fused);
}

LabeledCohort random_undersample(const LabeledCohort& cohort, std::uint64_t seed) {
  cohort.validate();
  return cohort.subset(select_random_undersample(cohort.labels, seed));
}

LabeledCohort near_miss_3(const LabeledCohort& cohort, int k) {
  cohort.validate();
  return cohort.subset(select_near_miss_3(sampling_space(cohort), cohort.labels, k));
}

LabeledCohort instance_hardness_threshold(const LabeledCohort& cohort, const SamplerConfig& cfg) {
  cohort.validate();
  return cohort.subset(select_instance_hardness(cohort.fused(), cohort.labels, cfg));
}

SamplingOutcome apply_sampler(const LabeledCohort& cohort, const SamplerConfig& cfg) {
  cfg.validate();
  cohort.validate();
  SamplingOutcome out;
  switch (cfg.method) {
    case SamplerMethod::none: out.retained = all_rows(cohort.labels.size()); break;
    case SamplerMethod::random: out.retained = select_random_undersample(cohort.labels, cfg.seed); break;
    case SamplerMethod::near_miss_3:
      out.retained = select_near_miss_3(sampling_space(cohort), cohort.labels, cfg.k_neighbors);
      break;
    case SamplerMethod::instance_hardness:
      out.retained = select_instance_hardness(cohort.fused(), cohort.labels, cfg);
      break;
  }
  out.cohort = cohort.subset(out.retained);
  return out;
}

}  // namespace connsemble
