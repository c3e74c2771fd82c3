#pragma once

#include "connsemble/lbfgs.hpp"
#include "connsemble/types.hpp"

#include <cstdint>
#include <span>

namespace connsemble {

inline constexpr Index kHiddenUnits = 32;

/// Binary labels, 0 = HC, 1 = MCI.
using Labels = std::span<const int>;

/// Weights of the d -> 32 -> 32 -> 1 network. Hidden layers use ReLU, the
/// output a sigmoid. Pre-activations are w1^T x + b1, w2^T h1 + b2, w3^T h2 + b3.
///
/// Flat layout (used by gradient() and the optimizer): w1 column-major (d x 32),
/// b1, w2 column-major (32 x 32), b2, w3, b3.
struct MlpParameters {
  Matrix w1;  // d x 32
  Vector b1;  // 32
  Matrix w2;  // 32 x 32
  Vector b2;  // 32
  Vector w3;  // 32
  double b3 = 0.0;

  Index input_dim() const noexcept { return w1.rows(); }
  static Index flat_size(Index input_dim) noexcept;

  Vector flatten() const;
  static MlpParameters unflatten(const Vector& flat, Index input_dim);
  static MlpParameters zeros(Index input_dim);
};

struct TrainConfig {
  double l2_alpha = 1e-4;
  int lbfgs_history = 10;
  int max_iterations = 200;
  double gradient_tolerance = 1e-5;
  std::uint64_t seed = 0;
  /// When the training set has fewer rows than features, optimize over the
  /// row space of the (normalized) training matrix. The L-BFGS iterates are the
  /// same as in the full parameter space; only the cost per evaluation changes.
  bool row_space_reduction = true;

  void validate() const;
  LbfgsOptions lbfgs_options() const;
};

/// Per-feature [min, max] fitted on training rows. Degenerate features map to 0
/// and transformed values are clipped to [0, 1].
struct MinMaxNormalizer {
  Vector min;
  Vector max;

  Index dim() const noexcept { return min.size(); }
  Matrix transform(const Matrix& xs) const;
  Vector transform(const Vector& x) const;
};

MinMaxNormalizer fit_normalizer(const Matrix& xs);

struct MlpModel {
  MlpParameters parameters;
  MinMaxNormalizer normalizer;

  Index input_dim() const noexcept { return parameters.input_dim(); }
};

/// Glorot-uniform weights, zero biases. Deterministic per seed.
MlpParameters init_parameters(Index input_dim, std::uint64_t seed);

double forward(const MlpParameters& p, const Vector& x);
Vector forward_batch(const MlpParameters& p, const Matrix& xs);

/// Mean cross-entropy plus l2_alpha * (sum of squared weights); biases unpenalized.
double loss(const MlpParameters& p, const Matrix& xs, Labels ys, double l2_alpha);

/// Gradient of loss() in the flat layout documented on MlpParameters.
Vector gradient(const MlpParameters& p, const Matrix& xs, Labels ys, double l2_alpha);

struct TrainingSummary {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  LbfgsStatus status = LbfgsStatus::max_iterations;
  int iterations = 0;
  bool used_row_space = false;
  std::vector<IterationRecord> trace;
};

MlpModel train_classifier(const Matrix& xs, Labels ys, const TrainConfig& cfg, TrainingSummary* summary = nullptr);

double predict_proba(const MlpModel& m, const Vector& x);
Vector predict_proba_batch(const MlpModel& m, const Matrix& xs);

namespace detail {
/// Objective on a flat parameter vector. `grad` may be null.
double mlp_objective(Eigen::Ref<const Vector> theta, Index input_dim, const Matrix& xs, Labels ys,
                     double l2_alpha, Vector* grad);
void check_labels(Labels ys, Index rows);
}  // namespace detail

}  // namespace connsemble
