#pragma once

#include "connsemble/cohort.hpp"
#include "connsemble/connectome.hpp"
#include "connsemble/neuralnet.hpp"

#include <span>

namespace connsemble {

/// One network per perspective, all trained with the same TrainConfig.
struct EnsembleModel {
  std::array<MlpModel, 3> members;  // kNetworkMeasures order

  const MlpModel& member(Measure m) const { return members[measure_index(m)]; }
};

EnsembleModel train_ensemble(const LabeledCohort& cohort, const TrainConfig& cfg);

/// Unweighted mean of member probabilities.
double soft_vote(double p_weights, double p_shortest_path, double p_communicability) noexcept;

/// `subject` must contain one vector for each of the three network measures, in any order.
double soft_vote(const EnsembleModel& model, std::span<const FeatureVector> subject);

/// Member probabilities for every row of `cohort`, columns in kNetworkMeasures order.
Matrix member_probabilities(const EnsembleModel& model, const LabeledCohort& cohort);
Vector ensemble_probabilities(const EnsembleModel& model, const LabeledCohort& cohort);

/// Concatenates the three perspectives as W | S | C whatever the argument order.
FeatureVector fuse_features(const FeatureVector& a, const FeatureVector& b, const FeatureVector& c);

inline constexpr double kDefaultThreshold = 0.5;

/// MCI iff p >= threshold.
Diagnosis predict_label(double p, double threshold = kDefaultThreshold) noexcept;

}  // namespace connsemble
