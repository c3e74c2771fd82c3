#pragma once

#include "connsemble/cohort.hpp"
#include "connsemble/connectome.hpp"

#include <cstdint>
#include <filesystem>

namespace connsemble {

/// Log-normal random connectomes. A fixed random subset of the edges is
/// weakened by a factor (1 - effect_size) in every MCI subject, and each
/// subject gets independent multiplicative noise exp(noise_scale * N(0,1)).
struct SyntheticCohortConfig {
  Index n_nodes = 120;
  Index n_hc = 49;
  Index n_mci = 108;
  double effect_size = 0.3;             // in [0, 1)
  double affected_edge_fraction = 0.1;  // of the edges present in the base graph
  double noise_scale = 0.5;
  double edge_density = 0.3;  // probability that a node pair is connected at all
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticConnectomes {
  std::vector<ConnectivityMatrix> matrices;  // HC subjects first, then MCI
  std::vector<int> labels;
};

SyntheticConnectomes generate_connectomes(const SyntheticCohortConfig& cfg);

LabeledCohort generate_synthetic_cohort(const SyntheticCohortConfig& cfg, const ExtractionOptions& extraction = {},
                                        int threads = 1);

/// Writes `matrices/<subject>.csv` and `manifest.csv` under `dir`; returns the manifest path.
std::filesystem::path materialize_synthetic_cohort(const SyntheticCohortConfig& cfg,
                                                   const std::filesystem::path& dir, bool overwrite = false);

}  // namespace connsemble
