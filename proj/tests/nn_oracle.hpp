// Loop-based re-implementation of the network and its objective.
#pragma once

#include "connsemble/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline double relu(double v) { return v > 0 ? v : 0; }

inline double mlp_forward(const connsemble::MlpParameters& p, const Eigen::VectorXd& x) {
  const auto d = x.size();
  double h1[32], h2[32];
  for (int j = 0; j < 32; ++j) {
    double z = p.b1[j];
    for (Eigen::Index i = 0; i < d; ++i) z += p.w1(i, j) * x[i];
    h1[j] = relu(z);
  }
  for (int j = 0; j < 32; ++j) {
    double z = p.b2[j];
    for (int i = 0; i < 32; ++i) z += p.w2(i, j) * h1[i];
    h2[j] = relu(z);
  }
  double z = p.b3;
  for (int i = 0; i < 32; ++i) z += p.w3[i] * h2[i];
  return 1.0 / (1.0 + std::exp(-z));
}

inline double mlp_loss(const connsemble::MlpParameters& p, const Eigen::MatrixXd& xs, const std::vector<int>& ys,
                       double alpha) {
  double ce = 0;
  for (Eigen::Index r = 0; r < xs.rows(); ++r) {
    const double h = std::clamp(mlp_forward(p, xs.row(r).transpose()), 1e-12, 1.0 - 1e-12);
    ce -= ys[static_cast<std::size_t>(r)] == 1 ? std::log(h) : std::log(1.0 - h);
  }
  ce /= static_cast<double>(xs.rows());
  const double penalty = p.w1.squaredNorm() + p.w2.squaredNorm() + p.w3.squaredNorm();
  return ce + alpha * penalty;
}

}  // namespace oracle
