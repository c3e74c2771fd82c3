#pragma once

#include "connsemble/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace connsemble {

/// Subjects with labels and one feature matrix (rows = subjects) per network
/// measure, indexed in kNetworkMeasures order. All matrices share row order.
struct LabeledCohort {
  std::vector<std::string> subject_ids;
  std::vector<int> labels;
  std::array<Matrix, 3> features;

  Index size() const noexcept { return static_cast<Index>(labels.size()); }
  Index feature_dim() const noexcept { return features[0].cols(); }
  const Matrix& feature(Measure m) const;
  Matrix fused() const;

  Index count(Diagnosis d) const noexcept;

  /// Rows in the given order; all three matrices are filtered identically.
  LabeledCohort subset(std::span<const std::size_t> rows) const;

  /// Throws if row counts, ids or labels are inconsistent.
  void validate() const;
};

std::size_t measure_index(Measure m);

/// Copies the listed rows, in order.
Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows);
std::vector<int> gather(std::span<const int> values, std::span<const std::size_t> rows);

}  // namespace connsemble
