#pragma once

#include "connsemble/types.hpp"

#include <string>

namespace connsemble {

inline constexpr double kDefaultSymmetryTolerance = 1e-9;

/// Symmetric, nonnegative, zero-diagonal weight matrix of one subject.
/// Instances can only be obtained through validate_matrix().
class ConnectivityMatrix {
 public:
  const std::string& subject_id() const noexcept { return subject_id_; }
  Index node_count() const noexcept { return weights_.rows(); }
  const Matrix& weights() const noexcept { return weights_; }

 private:
  friend ConnectivityMatrix validate_matrix(const Matrix&, double, std::string);
  ConnectivityMatrix(std::string id, Matrix w) : subject_id_(std::move(id)), weights_(std::move(w)) {}

  std::string subject_id_;
  Matrix weights_;
};

/// Checks squareness, finiteness, nonnegativity and (relative) symmetry.
/// Accepted input is symmetrized as (raw + raw^T)/2 and its diagonal zeroed.
ConnectivityMatrix validate_matrix(const Matrix& raw,
                                   double symmetry_tolerance = kDefaultSymmetryTolerance,
                                   std::string subject_id = {});

struct NodeStrengths {
  Vector values;
};

NodeStrengths node_strengths(const ConnectivityMatrix& m);

struct FeatureVector {
  Measure measure = Measure::weights;
  Vector values;
};

constexpr Index upper_triangle_size(Index n) noexcept { return n * (n - 1) / 2; }

/// Row-major strict upper triangle: m01, m02, ..., m0(n-1), m12, ...
FeatureVector flatten_upper_triangle(const Matrix& m, Measure measure = Measure::weights);

/// Inverse of flatten_upper_triangle for a symmetric matrix with the given diagonal.
Matrix unflatten_upper_triangle(const Vector& values, Index n, double diagonal = 0.0);

/// How unreachable node pairs are encoded in the shortest-path perspective.
struct DisconnectedPolicy {
  enum class Kind { max_finite, fixed_constant, error };
  Kind kind = Kind::max_finite;
  double constant = 0.0;

  static DisconnectedPolicy max_finite() { return {}; }
  static DisconnectedPolicy fixed(double v) { return {Kind::fixed_constant, v}; }
  static DisconnectedPolicy fail() { return {Kind::error, 0.0}; }

  /// Parses "max_finite", "constant:<v>" or "error".
  static DisconnectedPolicy parse(std::string_view text);
  std::string to_string() const;
};

/// Full n x n matrix of weighted shortest-path lengths, edge length 1/w.
Matrix shortest_path_matrix(const ConnectivityMatrix& m,
                            const DisconnectedPolicy& policy = DisconnectedPolicy::max_finite());

FeatureVector shortest_path_lengths(const ConnectivityMatrix& m,
                                    const DisconnectedPolicy& policy = DisconnectedPolicy::max_finite());

/// exp(A) for symmetric A through A = Q diag(l) Q^T. The result is exactly symmetric.
Matrix matrix_exponential_symmetric(const Matrix& a);

/// exp(D^-1/2 W D^-1/2). Isolated nodes (zero strength) get a zero row/column in
/// the normalized adjacency, hence a unit row/column in the exponential.
Matrix communicability_matrix(const ConnectivityMatrix& m);

FeatureVector communicability(const ConnectivityMatrix& m);

struct ExtractionOptions {
  DisconnectedPolicy disconnected = DisconnectedPolicy::max_finite();
};

/// The three perspectives in kNetworkMeasures order.
std::array<FeatureVector, 3> extract_features(const ConnectivityMatrix& m,
                                              const ExtractionOptions& options = {});

}  // namespace connsemble
