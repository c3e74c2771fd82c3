#include "connsemble/neuralnet.hpp"

#include "connsemble/error.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace connsemble {

namespace {

constexpr double kProbabilityClip = 1e-12;
constexpr Index H = kHiddenUnits;

}  // namespace

Index MlpParameters::flat_size(Index d) noexcept { return d * H + H + H * H + H + H + 1; }

Vector MlpParameters::flatten() const {
  const Index d = input_dim();
  Vector flat(flat_size(d));
  Index k = 0;
  flat.segment(k, d * H) = Eigen::Map<const Vector>(w1.data(), d * H);
  k += d * H;
  flat.segment(k, H) = b1;
  k += H;
  flat.segment(k, H * H) = Eigen::Map<const Vector>(w2.data(), H * H);
  k += H * H;
  flat.segment(k, H) = b2;
  k += H;
  flat.segment(k, H) = w3;
  k += H;
  flat[k] = b3;
  return flat;
}

MlpParameters MlpParameters::unflatten(const Vector& flat, Index d) {
  if (flat.size() != flat_size(d))
    raise(Errc::dimension_mismatch, "flat parameter vector has " + std::to_string(flat.size()) +
                                        " entries, expected " + std::to_string(flat_size(d)));
  MlpParameters p;
  Index k = 0;
  p.w1 = Eigen::Map<const Matrix>(flat.data() + k, d, H);
  k += d * H;
  p.b1 = flat.segment(k, H);
  k += H;
  p.w2 = Eigen::Map<const Matrix>(flat.data() + k, H, H);
  k += H * H;
  p.b2 = flat.segment(k, H);
  k += H;
  p.w3 = flat.segment(k, H);
  k += H;
  p.b3 = flat[k];
  return p;
}

MlpParameters MlpParameters::zeros(Index d) { return unflatten(Vector::Zero(flat_size(d)), d); }

void TrainConfig::validate() const {
  if (!(l2_alpha >= 0.0) || !std::isfinite(l2_alpha)) raise(Errc::invalid_config, "l2_alpha must be >= 0");
  if (lbfgs_history < 1) raise(Errc::invalid_config, "lbfgs_history must be positive");
  if (max_iterations < 1) raise(Errc::invalid_config, "max_iterations must be positive");
  if (!(gradient_tolerance > 0.0)) raise(Errc::invalid_config, "gradient_tolerance must be positive");
}

LbfgsOptions TrainConfig::lbfgs_options() const {
  LbfgsOptions o;
  o.history = lbfgs_history;
  o.max_iterations = max_iterations;
  o.gradient_tolerance = gradient_tolerance;
  return o;
}

MinMaxNormalizer fit_normalizer(const Matrix& xs) {
  if (xs.rows() == 0) raise(Errc::empty_dataset, "cannot fit a normalizer on zero rows");
  return {xs.colwise().minCoeff().transpose(), xs.colwise().maxCoeff().transpose()};
}

Vector MinMaxNormalizer::transform(const Vector& x) const {
  if (x.size() != dim())
    raise(Errc::dimension_mismatch, "normalizer expects " + std::to_string(dim()) + " features, got " +
                                        std::to_string(x.size()));
  Vector out(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    const double range = max[j] - min[j];
    out[j] = range > 0.0 ? std::clamp((x[j] - min[j]) / range, 0.0, 1.0) : 0.0;
  }
  return out;
}

Matrix MinMaxNormalizer::transform(const Matrix& xs) const {
  if (xs.cols() != dim())
    raise(Errc::dimension_mismatch, "normalizer expects " + std::to_string(dim()) + " features, got " +
                                        std::to_string(xs.cols()));
  Matrix out(xs.rows(), xs.cols());
  for (Index j = 0; j < xs.cols(); ++j) {
    const double range = max[j] - min[j];
    if (range > 0.0)
      out.col(j) = ((xs.col(j).array() - min[j]) / range).cwiseMax(0.0).cwiseMin(1.0).matrix();
    else
      out.col(j).setZero();
  }
  return out;
}

MlpParameters init_parameters(Index input_dim, std::uint64_t seed) {
  if (input_dim < 1) raise(Errc::invalid_argument, "input_dim must be >= 1");
  std::mt19937_64 rng(seed);
  auto fill = [&rng](auto& m, Index fan_in, Index fan_out) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Index k = 0; k < m.size(); ++k) m.data()[k] = dist(rng);
  };
  MlpParameters p = MlpParameters::zeros(input_dim);
  fill(p.w1, input_dim, H);
  fill(p.w2, H, H);
  fill(p.w3, H, 1);
  return p;
}

namespace {

double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// Keeps reported probabilities strictly inside (0, 1).
double open_unit(double p) {
  return std::clamp(p, std::numeric_limits<double>::min(), 1.0 - std::numeric_limits<double>::epsilon() / 2);
}

}  // namespace

Vector forward_batch(const MlpParameters& p, const Matrix& xs) {
  if (xs.cols() != p.input_dim())
    raise(Errc::dimension_mismatch, "network expects " + std::to_string(p.input_dim()) + " inputs, got " +
                                        std::to_string(xs.cols()));
  Matrix h1 = xs * p.w1;
  h1.rowwise() += p.b1.transpose();
  h1 = h1.cwiseMax(0.0);
  Matrix h2 = h1 * p.w2;
  h2.rowwise() += p.b2.transpose();
  h2 = h2.cwiseMax(0.0);
  Vector out = h2 * p.w3;
  for (Index i = 0; i < out.size(); ++i) out[i] = open_unit(sigmoid(out[i] + p.b3));
  return out;
}

double forward(const MlpParameters& p, const Vector& x) {
  if (x.size() != p.input_dim())
    raise(Errc::dimension_mismatch, "network expects " + std::to_string(p.input_dim()) + " inputs, got " +
                                        std::to_string(x.size()));
  return forward_batch(p, x.transpose())[0];
}

namespace detail {

void check_labels(Labels ys, Index rows) {
  if (rows == 0 || ys.empty()) raise(Errc::empty_dataset, "no samples");
  if (static_cast<Index>(ys.size()) != rows)
    raise(Errc::dimension_mismatch, std::to_string(rows) + " rows but " + std::to_string(ys.size()) + " labels");
  for (int y : ys)
    if (y != 0 && y != 1) raise(Errc::non_binary_label, "label " + std::to_string(y) + " is not 0 or 1");
}

double mlp_objective(Eigen::Ref<const Vector> theta, Index d, const Matrix& xs, Labels ys, double l2_alpha,
                     Vector* grad) {
  const Index n = xs.rows();
  const double* t = theta.data();
  Eigen::Map<const Matrix> w1(t, d, H);
  Eigen::Map<const Vector> b1(t + d * H, H);
  Eigen::Map<const Matrix> w2(t + d * H + H, H, H);
  Eigen::Map<const Vector> b2(t + d * H + H + H * H, H);
  Eigen::Map<const Vector> w3(t + d * H + 2 * H + H * H, H);
  const double b3 = t[d * H + 3 * H + H * H];

  Matrix z1 = xs * w1;
  z1.rowwise() += b1.transpose();
  const Matrix a1 = z1.cwiseMax(0.0);
  Matrix z2 = a1 * w2;
  z2.rowwise() += b2.transpose();
  const Matrix a2 = z2.cwiseMax(0.0);
  const Vector z3 = (a2 * w3).array() + b3;

  const double inv_n = 1.0 / static_cast<double>(n);
  const double log_hi = std::log1p(-kProbabilityClip);
  const double log_lo = std::log(kProbabilityClip);
  double data_term = 0.0;
  Vector dz3(n);
  for (Index i = 0; i < n; ++i) {
    const double p = sigmoid(z3[i]);
    const double q = sigmoid(-z3[i]);
    const bool clipped = p < kProbabilityClip || q < kProbabilityClip;
    const double log_p = p < kProbabilityClip ? log_lo : (q < kProbabilityClip ? log_hi : std::log(p));
    const double log_q = q < kProbabilityClip ? log_lo : (p < kProbabilityClip ? log_hi : std::log(q));
    data_term -= ys[i] == 1 ? log_p : log_q;
    dz3[i] = clipped ? 0.0 : (p - ys[i]) * inv_n;
  }
  const double penalty = w1.squaredNorm() + w2.squaredNorm() + w3.squaredNorm();
  const double value = data_term * inv_n + l2_alpha * penalty;
  if (grad == nullptr) return value;

  grad->resize(theta.size());
  double* g = grad->data();
  Eigen::Map<Matrix> gw1(g, d, H);
  Eigen::Map<Vector> gb1(g + d * H, H);
  Eigen::Map<Matrix> gw2(g + d * H + H, H, H);
  Eigen::Map<Vector> gb2(g + d * H + H + H * H, H);
  Eigen::Map<Vector> gw3(g + d * H + 2 * H + H * H, H);
  double& gb3 = g[d * H + 3 * H + H * H];

  gw3.noalias() = a2.transpose() * dz3;
  gw3 += 2.0 * l2_alpha * w3;
  gb3 = dz3.sum();

  Matrix dz2 = dz3 * w3.transpose();
  dz2.array() *= (z2.array() > 0.0).cast<double>();
  gw2.noalias() = a1.transpose() * dz2;
  gw2 += 2.0 * l2_alpha * w2;
  gb2 = dz2.colwise().sum().transpose();

  Matrix dz1 = dz2 * w2.transpose();
  dz1.array() *= (z1.array() > 0.0).cast<double>();
  gw1.noalias() = xs.transpose() * dz1;
  gw1 += 2.0 * l2_alpha * w1;
  gb1 = dz1.colwise().sum().transpose();
  return value;
}

}  // namespace detail

double loss(const MlpParameters& p, const Matrix& xs, Labels ys, double l2_alpha) {
  detail::check_labels(ys, xs.rows());
  if (xs.cols() != p.input_dim()) raise(Errc::dimension_mismatch, "feature count does not match network input");
  return detail::mlp_objective(p.flatten(), p.input_dim(), xs, ys, l2_alpha, nullptr);
}

Vector gradient(const MlpParameters& p, const Matrix& xs, Labels ys, double l2_alpha) {
  detail::check_labels(ys, xs.rows());
  if (xs.cols() != p.input_dim()) raise(Errc::dimension_mismatch, "feature count does not match network input");
  Vector g;
  detail::mlp_objective(p.flatten(), p.input_dim(), xs, ys, l2_alpha, &g);
  return g;
}

namespace {

// Every gradient of the objective with respect to w1 lies in
//   span{w1_0} + rowspace(X)^32
// so the iterates never leave it. With Q an orthonormal basis of rowspace(X)
// and r0 = w1_0 - Q Q^T w1_0, the map (a, C) -> a r0/|r0| + Q C is an isometry
// onto that subspace, and X w1 = (X Q) C because X r0 = 0. Optimizing over
// (C, a) with inputs X Q therefore reproduces the full-space L-BFGS run.
LbfgsResult minimize_in_row_space(const Matrix& xn, Labels ys, const MlpParameters& init, const TrainConfig& cfg,
                                  MlpParameters& out) {
  const Index n = xn.rows();
  const Index d = xn.cols();
  // Xn^T = Q R, so Z = Xn Q = R^T. Q itself is never formed.
  Eigen::HouseholderQR<Matrix> qr(xn.transpose());
  const Matrix z = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>().transpose();

  Matrix rotated = qr.householderQ().adjoint() * init.w1;
  const Matrix c0 = rotated.topRows(n);
  const Matrix r0 = rotated.bottomRows(d - n);
  const double r0_norm = r0.norm();
  const bool has_residual = r0_norm > 0.0;

  MlpParameters reduced = init;
  reduced.w1 = c0;
  const Index head = MlpParameters::flat_size(n);
  Vector x0(head + (has_residual ? 1 : 0));
  x0.head(head) = reduced.flatten();
  if (has_residual) x0[head] = r0_norm;

  const double alpha = cfg.l2_alpha;
  Vector head_grad;
  Objective objective = [&](const Vector& theta, Vector& g) {
    double value = detail::mlp_objective(theta.head(head), n, z, ys, alpha, &head_grad);
    g.head(head) = head_grad;
    if (has_residual) {
      const double a = theta[head];
      value += alpha * a * a;
      g[head] = 2.0 * alpha * a;
    }
    return value;
  };
  LbfgsResult result = lbfgs_minimize(objective, x0, cfg.lbfgs_options());

  out = MlpParameters::unflatten(result.x.head(head), n);
  rotated.topRows(n) = out.w1;
  if (has_residual) {
    rotated.bottomRows(d - n) = (result.x[head] / r0_norm) * r0;
  } else {
    rotated.bottomRows(d - n).setZero();
  }
  Matrix w1 = qr.householderQ() * rotated;
  out.w1 = std::move(w1);
  return result;
}

}  // namespace

MlpModel train_classifier(const Matrix& xs, Labels ys, const TrainConfig& cfg, TrainingSummary* summary) {
  detail::check_labels(ys, xs.rows());
  cfg.validate();
  const bool has_pos = std::find(ys.begin(), ys.end(), 1) != ys.end();
  const bool has_neg = std::find(ys.begin(), ys.end(), 0) != ys.end();
  if (!has_pos || !has_neg) raise(Errc::single_class_training_set, "training labels contain a single class");

  MlpModel model;
  model.normalizer = fit_normalizer(xs);
  const Matrix xn = model.normalizer.transform(xs);
  const Index d = xs.cols();
  const MlpParameters init = init_parameters(d, cfg.seed);

  const bool reduce = cfg.row_space_reduction && xn.rows() < d;
  LbfgsResult result;
  if (reduce) {
    result = minimize_in_row_space(xn, ys, init, cfg, model.parameters);
  } else {
    Objective objective = [&](const Vector& theta, Vector& g) {
      return detail::mlp_objective(theta, d, xn, ys, cfg.l2_alpha, &g);
    };
    result = lbfgs_minimize(objective, init.flatten(), cfg.lbfgs_options());
    model.parameters = MlpParameters::unflatten(result.x, d);
  }

  if (summary != nullptr) {
    summary->initial_loss = result.initial_objective;
    summary->final_loss = result.objective;
    summary->status = result.status;
    summary->iterations = result.iterations;
    summary->used_row_space = reduce;
    summary->trace = std::move(result.trace);
  }
  return model;
}

double predict_proba(const MlpModel& m, const Vector& x) {
  return forward(m.parameters, m.normalizer.transform(x));
}

Vector predict_proba_batch(const MlpModel& m, const Matrix& xs) {
  return forward_batch(m.parameters, m.normalizer.transform(xs));
}

}  // namespace connsemble
