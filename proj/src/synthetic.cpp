#include "connsemble/synthetic.hpp"

#include "connsemble/crossval.hpp"
#include "connsemble/dataio.hpp"
#include "connsemble/error.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <random>

namespace fs = std::filesystem;

namespace connsemble {

namespace {

constexpr double kLogMeanWeight = 3.9;  // median streamline count ~ 50
constexpr double kLogWeightSpread = 1.0;

std::string subject_name(const char* prefix, Index i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%03lld", prefix, static_cast<long long>(i));
  return buf;
}

}  // namespace

void SyntheticCohortConfig::validate() const {
  if (n_nodes < 2) raise(Errc::invalid_config, "n_nodes must be >= 2");
  if (n_hc < 1 || n_mci < 1) raise(Errc::invalid_config, "both groups need at least one subject");
  if (!(effect_size >= 0.0 && effect_size < 1.0)) raise(Errc::invalid_config, "effect_size must lie in [0, 1)");
  if (!(affected_edge_fraction >= 0.0 && affected_edge_fraction <= 1.0))
    raise(Errc::invalid_config, "affected_edge_fraction must lie in [0, 1]");
  if (!(noise_scale > 0.0) || !std::isfinite(noise_scale)) raise(Errc::invalid_config, "noise_scale must be positive");
  if (!(edge_density > 0.0 && edge_density <= 1.0)) raise(Errc::invalid_config, "edge_density must lie in (0, 1]");
}

SyntheticConnectomes generate_connectomes(const SyntheticCohortConfig& cfg) {
  cfg.validate();
  const Index n = cfg.n_nodes;

  // Shared base graph and the affected edge subset.
  std::mt19937_64 rng(derive_seed(cfg.seed, 0, 0));
  std::bernoulli_distribution present(cfg.edge_density);
  std::normal_distribution<double> gauss(0.0, 1.0);
  struct Edge {
    Index i, j;
    double weight;
    bool affected;
  };
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (present(rng)) edges.push_back({i, j, std::exp(kLogMeanWeight + kLogWeightSpread * gauss(rng)), false});
  std::vector<std::size_t> order(edges.size());
  for (std::size_t e = 0; e < order.size(); ++e) order[e] = e;
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_affected =
      static_cast<std::size_t>(std::llround(cfg.affected_edge_fraction * static_cast<double>(edges.size())));
  for (std::size_t t = 0; t < n_affected; ++t) edges[order[t]].affected = true;

  SyntheticConnectomes out;
  const Index total = cfg.n_hc + cfg.n_mci;
  for (Index s = 0; s < total; ++s) {
    const bool mci = s >= cfg.n_hc;
    std::mt19937_64 subject_rng(derive_seed(cfg.seed, 1, static_cast<std::uint64_t>(s)));
    std::normal_distribution<double> noise(0.0, cfg.noise_scale);
    Matrix w = Matrix::Zero(n, n);
    for (const auto& e : edges) {
      double v = e.weight * std::exp(noise(subject_rng));
      if (mci && e.affected) v *= 1.0 - cfg.effect_size;
      w(e.i, e.j) = w(e.j, e.i) = v;
    }
    const std::string id = mci ? subject_name("mci", s - cfg.n_hc) : subject_name("hc", s);
    out.matrices.push_back(validate_matrix(w, kDefaultSymmetryTolerance, id));
    out.labels.push_back(mci ? 1 : 0);
  }
  return out;
}

LabeledCohort generate_synthetic_cohort(const SyntheticCohortConfig& cfg, const ExtractionOptions& extraction,
                                        int threads) {
  const SyntheticConnectomes sc = generate_connectomes(cfg);
  return build_cohort(sc.matrices, sc.labels, extraction, threads);
}

fs::path materialize_synthetic_cohort(const SyntheticCohortConfig& cfg, const fs::path& dir, bool overwrite) {
  const fs::path manifest_path = dir / "manifest.csv";
  ensure_writable(manifest_path, overwrite);
  const SyntheticConnectomes sc = generate_connectomes(cfg);
  CohortManifest manifest;
  for (std::size_t i = 0; i < sc.matrices.size(); ++i) {
    const auto& m = sc.matrices[i];
    const fs::path path = dir / "matrices" / (m.subject_id() + ".csv");
    write_matrix_csv(m.weights(), path);
    manifest.entries.push_back({m.subject_id(), static_cast<Diagnosis>(sc.labels[i]), path});
  }
  write_manifest(manifest, manifest_path);
  return manifest_path;
}

}  // namespace connsemble
