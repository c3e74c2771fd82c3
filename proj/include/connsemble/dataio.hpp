#pragma once

#include "connsemble/cohort.hpp"
#include "connsemble/connectome.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace connsemble {

/// `subject_id,label,path` rows. Relative paths are resolved against the
/// manifest's directory when read.
struct CohortManifest {
  struct Entry {
    std::string subject_id;
    Diagnosis label = Diagnosis::hc;
    std::filesystem::path matrix_path;
  };
  std::vector<Entry> entries;
};

Diagnosis diagnosis_from_string(std::string_view text);
std::string_view to_string(Diagnosis d) noexcept;

CohortManifest read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const CohortManifest& manifest, const std::filesystem::path& manifest_path);

/// Comma-separated numeric grid, one row per line, no header.
Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);

struct LoadOptions {
  ExtractionOptions extraction;
  double symmetry_tolerance = kDefaultSymmetryTolerance;
  int threads = 1;
};

/// Reads, validates and featurizes every subject; rows follow manifest order.
LabeledCohort load_cohort(const std::filesystem::path& manifest_path, const LoadOptions& options = {});

/// Featurizes already validated matrices, in the given order.
LabeledCohort build_cohort(const std::vector<ConnectivityMatrix>& matrices, const std::vector<int>& labels,
                           const ExtractionOptions& extraction = {}, int threads = 1);

/// One CSV per measure (`weights.csv`, `shortest_path.csv`, `communicability.csv`)
/// with header `subject_id,label,f0,...` and one row per subject.
void write_feature_store(const LabeledCohort& cohort, const std::filesystem::path& dir, bool overwrite = false);
LabeledCohort read_feature_store(const std::filesystem::path& dir);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Throws FileExists when `path` exists and overwrite is false.
void ensure_writable(const std::filesystem::path& path, bool overwrite);

}  // namespace connsemble
