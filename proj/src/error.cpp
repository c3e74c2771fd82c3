#include "connsemble/error.hpp"

namespace connsemble {

ErrorCategory category_of(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument:
    case Errc::invalid_config:
      return ErrorCategory::usage;
    case Errc::all_pairs_disconnected:
    case Errc::eigendecomposition_failure:
    case Errc::non_finite_objective:
      return ErrorCategory::numerical;
    case Errc::file_not_found:
    case Errc::file_exists:
    case Errc::io_error:
      return ErrorCategory::io;
    default:
      return ErrorCategory::data;
  }
}

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::not_square: return "NotSquare";
    case Errc::asymmetry_exceeds_tolerance: return "AsymmetryExceedsTolerance";
    case Errc::negative_weight: return "NegativeWeight";
    case Errc::non_finite_entry: return "NonFiniteEntry";
    case Errc::all_pairs_disconnected: return "AllPairsDisconnected";
    case Errc::disconnected_pair: return "DisconnectedPair";
    case Errc::eigendecomposition_failure: return "EigendecompositionFailure";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::empty_dataset: return "EmptyDataset";
    case Errc::non_binary_label: return "NonBinaryLabel";
    case Errc::non_finite_objective: return "NonFiniteObjective";
    case Errc::single_class_training_set: return "SingleClassTrainingSet";
    case Errc::missing_measure: return "MissingMeasure";
    case Errc::single_class_cohort: return "SingleClassCohort";
    case Errc::insufficient_samples_for_folds: return "InsufficientSamplesForFolds";
    case Errc::class_smaller_than_k: return "ClassSmallerThanK";
    case Errc::empty_fold: return "EmptyFold";
    case Errc::single_class_fold: return "SingleClassFold";
    case Errc::empty_sample: return "EmptySample";
    case Errc::file_not_found: return "FileNotFound";
    case Errc::parse_error: return "ParseError";
    case Errc::duplicate_subject_id: return "DuplicateSubjectId";
    case Errc::unknown_label: return "UnknownLabel";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::file_exists: return "FileExists";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void raise(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace connsemble
