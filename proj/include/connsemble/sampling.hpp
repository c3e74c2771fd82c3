#pragma once

#include "connsemble/cohort.hpp"
#include "connsemble/neuralnet.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace connsemble {

enum class SamplerMethod { none, random, near_miss_3, instance_hardness };

std::string_view to_string(SamplerMethod m) noexcept;
/// Accepts none, random, nearmiss3 (or near_miss_3), iht (or instance_hardness).
SamplerMethod sampler_from_string(std::string_view name);

struct SamplerConfig {
  SamplerMethod method = SamplerMethod::none;
  int k_neighbors = 3;
  std::uint64_t seed = 0;
  /// Seeds of the internal trainings are derived from `seed`, not from this config.
  TrainConfig iht_train_config;
  int iht_internal_folds = 5;

  void validate() const;
};

// Index-level selectors. Each returns the retained row indices in ascending
// order: every minority row plus as many majority rows as there are minority
// rows. A cohort that is already balanced is returned whole.

std::vector<std::size_t> select_random_undersample(std::span<const int> labels, std::uint64_t seed);

/// Distances are Euclidean on the rows of `points`, used as given.
std::vector<std::size_t> select_near_miss_3(const Matrix& points, std::span<const int> labels, int k);

/// Out-of-fold correct-class probabilities from an internal stratified CV of
/// the MLP; the majority rows with the lowest ones are dropped.
std::vector<std::size_t> select_instance_hardness(const Matrix& points, std::span<const int> labels,
                                                  const SamplerConfig& cfg);

/// Out-of-fold probability of the true class for every row (exposed for inspection).
Vector instance_hardness_scores(const Matrix& points, std::span<const int> labels, const SamplerConfig& cfg);

/// Min-max normalized fused features; the space near-miss and hardness work in.
Matrix sampling_space(const LabeledCohort& cohort);

LabeledCohort random_undersample(const LabeledCohort& cohort, std::uint64_t seed);
LabeledCohort near_miss_3(const LabeledCohort& cohort, int k);
LabeledCohort instance_hardness_threshold(const LabeledCohort& cohort, const SamplerConfig& cfg);

struct SamplingOutcome {
  LabeledCohort cohort;
  std::vector<std::size_t> retained;  // rows of the input cohort
};

SamplingOutcome apply_sampler(const LabeledCohort& cohort, const SamplerConfig& cfg);

}  // namespace connsemble
