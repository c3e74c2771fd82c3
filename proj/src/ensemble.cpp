#include "connsemble/ensemble.hpp"

#include "connsemble/error.hpp"


namespace connsemble {

EnsembleModel train_ensemble(const LabeledCohort& cohort, const TrainConfig& cfg) {
  cohort.validate();
  EnsembleModel model;
  for (std::size_t k = 0; k < 3; ++k) model.members[k] = train_classifier(cohort.features[k], cohort.labels, cfg);
  return model;
}

double soft_vote(double p_weights, double p_shortest_path, double p_communicability) noexcept {
  return (p_weights + p_shortest_path + p_communicability) / 3.0;
}

namespace {

std::array<const FeatureVector*, 3> by_measure(std::span<const FeatureVector> vs) {
  std::array<const FeatureVector*, 3> found{};
  for (const auto& v : vs) {
    if (v.measure == Measure::fused) raise(Errc::missing_measure, "fused vector where a single measure was expected");
    const auto k = measure_index(v.measure);
    if (found[k] != nullptr)
      raise(Errc::invalid_argument, "measure " + std::string(to_string(v.measure)) + " given twice");
    found[k] = &v;
  }
  for (std::size_t k = 0; k < 3; ++k)
    if (found[k] == nullptr)
      raise(Errc::missing_measure, "missing " + std::string(to_string(kNetworkMeasures[k])) + " features");
  return found;
}

}  // namespace

double soft_vote(const EnsembleModel& model, std::span<const FeatureVector> subject) {
  const auto v = by_measure(subject);
  return soft_vote(predict_proba(model.members[0], v[0]->values), predict_proba(model.members[1], v[1]->values),
                   predict_proba(model.members[2], v[2]->values));
}

Matrix member_probabilities(const EnsembleModel& model, const LabeledCohort& cohort) {
  Matrix out(cohort.size(), 3);
  for (std::size_t k = 0; k < 3; ++k)
    out.col(static_cast<Index>(k)) = predict_proba_batch(model.members[k], cohort.features[k]);
  return out;
}

Vector ensemble_probabilities(const EnsembleModel& model, const LabeledCohort& cohort) {
  const Matrix p = member_probabilities(model, cohort);
  Vector out(p.rows());
  for (Index i = 0; i < p.rows(); ++i) out[i] = soft_vote(p(i, 0), p(i, 1), p(i, 2));
  return out;
}

FeatureVector fuse_features(const FeatureVector& a, const FeatureVector& b, const FeatureVector& c) {
  const std::array<FeatureVector, 3> in = {a, b, c};
  const auto v = by_measure(in);
  const Index m = v[0]->values.size();
  if (v[1]->values.size() != m || v[2]->values.size() != m)
    raise(Errc::dimension_mismatch, "perspectives have different lengths");
  FeatureVector out{Measure::fused, Vector(3 * m)};
  out.values << v[0]->values, v[1]->values, v[2]->values;
  return out;
}

Diagnosis predict_label(double p, double threshold) noexcept {
  return p >= threshold ? Diagnosis::mci : Diagnosis::hc;
}

}  // namespace connsemble
