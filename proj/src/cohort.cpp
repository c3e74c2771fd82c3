#include "connsemble/cohort.hpp"

#include "connsemble/error.hpp"

#include <algorithm>
#include <unordered_set>

namespace connsemble {

std::size_t measure_index(Measure m) {
  switch (m) {
    case Measure::weights: return 0;
    case Measure::shortest_path: return 1;
    case Measure::communicability: return 2;
    case Measure::fused: break;
  }
  raise(Errc::missing_measure, "the fused measure is not stored per cohort");
}

const Matrix& LabeledCohort::feature(Measure m) const { return features[measure_index(m)]; }

Matrix LabeledCohort::fused() const {
  Matrix out(size(), features[0].cols() + features[1].cols() + features[2].cols());
  out << features[0], features[1], features[2];
  return out;
}

Index LabeledCohort::count(Diagnosis d) const noexcept {
  return std::count(labels.begin(), labels.end(), static_cast<int>(d));
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= static_cast<std::size_t>(m.rows())) raise(Errc::invalid_argument, "row index out of range");
    out.row(static_cast<Index>(i)) = m.row(static_cast<Index>(rows[i]));
  }
  return out;
}

std::vector<int> gather(std::span<const int> values, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(values[r]);
  return out;
}

LabeledCohort LabeledCohort::subset(std::span<const std::size_t> rows) const {
  LabeledCohort out;
  out.labels = gather(labels, rows);
  out.subject_ids.reserve(rows.size());
  for (std::size_t r : rows) out.subject_ids.push_back(subject_ids.at(r));
  for (std::size_t k = 0; k < 3; ++k) out.features[k] = gather_rows(features[k], rows);
  return out;
}

void LabeledCohort::validate() const {
  const auto n = labels.size();
  if (subject_ids.size() != n) raise(Errc::invalid_argument, "subject id count differs from label count");
  for (std::size_t k = 0; k < 3; ++k) {
    if (static_cast<std::size_t>(features[k].rows()) != n)
      raise(Errc::missing_measure, std::string(to_string(kNetworkMeasures[k])) + " features have " +
                                       std::to_string(features[k].rows()) + " rows for " + std::to_string(n) +
                                       " subjects");
  }
  if (features[0].cols() != features[1].cols() || features[0].cols() != features[2].cols())
    raise(Errc::dimension_mismatch, "per-measure feature dimensions differ");
  for (int y : labels)
    if (y != 0 && y != 1) raise(Errc::non_binary_label, "label " + std::to_string(y) + " is not 0 or 1");
  std::unordered_set<std::string> seen;
  for (const auto& id : subject_ids)
    if (!seen.insert(id).second) raise(Errc::duplicate_subject_id, "duplicate subject id '" + id + "'");
}

}  // namespace connsemble
