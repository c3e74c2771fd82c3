#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace connsemble {

enum class Errc {
  invalid_argument,
  // connectome
  not_square,
  asymmetry_exceeds_tolerance,
  negative_weight,
  non_finite_entry,
  all_pairs_disconnected,
  disconnected_pair,
  eigendecomposition_failure,
  // neuralnet / ensemble
  dimension_mismatch,
  empty_dataset,
  non_binary_label,
  non_finite_objective,
  single_class_training_set,
  missing_measure,
  // sampling
  single_class_cohort,
  insufficient_samples_for_folds,
  // evaluation
  class_smaller_than_k,
  empty_fold,
  single_class_fold,
  empty_sample,
  // io
  file_not_found,
  parse_error,
  duplicate_subject_id,
  unknown_label,
  invalid_config,
  file_exists,
  io_error,
};

/// Coarse grouping used for process exit codes and the C ABI.
enum class ErrorCategory { usage, data, numerical, io };

ErrorCategory category_of(Errc code) noexcept;
std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& message);

}  // namespace connsemble
