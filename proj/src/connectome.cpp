#include "connsemble/connectome.hpp"

#include "connsemble/error.hpp"

#include <Eigen/Eigenvalues>

#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

namespace connsemble {

std::string_view to_string(Measure m) noexcept {
  switch (m) {
    case Measure::weights: return "weights";
    case Measure::shortest_path: return "shortest_path";
    case Measure::communicability: return "communicability";
    case Measure::fused: return "fused";
  }
  return "unknown";
}

Measure measure_from_string(std::string_view name) {
  for (Measure m : {Measure::weights, Measure::shortest_path, Measure::communicability, Measure::fused})
    if (to_string(m) == name) return m;
  raise(Errc::invalid_argument, "unknown measure '" + std::string(name) + "'");
}

ConnectivityMatrix validate_matrix(const Matrix& raw, double symmetry_tolerance, std::string subject_id) {
  const std::string who = subject_id.empty() ? std::string("matrix") : "subject " + subject_id;
  if (raw.rows() != raw.cols())
    raise(Errc::not_square, who + " is " + std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()));
  if (!(symmetry_tolerance >= 0.0))
    raise(Errc::invalid_argument, "symmetry tolerance must be nonnegative");

  const Index n = raw.rows();
  double max_abs = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double v = raw(i, j);
      if (!std::isfinite(v))
        raise(Errc::non_finite_entry, who + " entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
      if (v < 0.0 && i != j)
        raise(Errc::negative_weight, who + " entry (" + std::to_string(i) + "," + std::to_string(j) +
                                         ") = " + std::to_string(v));
      max_abs = std::max(max_abs, std::abs(v));
    }
  }

  double max_asym = 0.0;
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) max_asym = std::max(max_asym, std::abs(raw(i, j) - raw(j, i)));
  if (max_asym > symmetry_tolerance * max_abs)
    raise(Errc::asymmetry_exceeds_tolerance,
          who + " max |w_ij - w_ji| = " + std::to_string(max_asym) + " exceeds tolerance");

  Matrix w = 0.5 * (raw + raw.transpose());
  w.diagonal().setZero();
  return ConnectivityMatrix(std::move(subject_id), std::move(w));
}

NodeStrengths node_strengths(const ConnectivityMatrix& m) {
  return {m.weights().rowwise().sum()};
}

FeatureVector flatten_upper_triangle(const Matrix& m, Measure measure) {
  if (m.rows() != m.cols()) raise(Errc::not_square, "cannot flatten a non-square matrix");
  const Index n = m.rows();
  FeatureVector out{measure, Vector(upper_triangle_size(n))};
  Index k = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) out.values[k++] = m(i, j);
  return out;
}

Matrix unflatten_upper_triangle(const Vector& values, Index n, double diagonal) {
  if (values.size() != upper_triangle_size(n))
    raise(Errc::dimension_mismatch, "expected " + std::to_string(upper_triangle_size(n)) + " values, got " +
                                        std::to_string(values.size()));
  Matrix m = Matrix::Constant(n, n, diagonal);
  Index k = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) m(i, j) = m(j, i) = values[k++];
  return m;
}

DisconnectedPolicy DisconnectedPolicy::parse(std::string_view text) {
  if (text == "max_finite") return max_finite();
  if (text == "error") return fail();
  constexpr std::string_view prefix = "constant:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string_view number = text.substr(prefix.size());
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), v);
    if (ec == std::errc() && ptr == number.data() + number.size() && std::isfinite(v) && v >= 0.0)
      return fixed(v);
  }
  raise(Errc::invalid_argument,
        "disconnected policy must be max_finite, constant:<nonnegative value> or error; got '" +
            std::string(text) + "'");
}

std::string DisconnectedPolicy::to_string() const {
  switch (kind) {
    case Kind::max_finite: return "max_finite";
    case Kind::error: return "error";
    case Kind::fixed_constant: {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, constant);
      return "constant:" + std::string(buf, res.ptr);
    }
  }
  return "max_finite";
}

namespace {

// Dense Dijkstra from every source; O(n^3) overall, which is fine for n ~ 100s.
Matrix all_pairs_dijkstra(const Matrix& w) {
  const Index n = w.rows();
  constexpr double inf = std::numeric_limits<double>::infinity();
  Matrix dist = Matrix::Constant(n, n, inf);
  std::vector<char> done(static_cast<std::size_t>(n));
  for (Index src = 0; src < n; ++src) {
    std::fill(done.begin(), done.end(), 0);
    auto d = dist.col(src);
    d[src] = 0.0;
    for (Index step = 0; step < n; ++step) {
      Index u = -1;
      double best = inf;
      for (Index v = 0; v < n; ++v)
        if (!done[v] && d[v] < best) best = d[v], u = v;
      if (u < 0) break;
      done[u] = 1;
      for (Index v = 0; v < n; ++v) {
        const double wuv = w(u, v);
        if (done[v] || wuv <= 0.0) continue;
        const double cand = best + 1.0 / wuv;
        if (cand < d[v]) d[v] = cand;
      }
    }
  }
  // Sums may associate differently from each endpoint; pick one canonical value.
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) dist(j, i) = dist(i, j) = std::min(dist(i, j), dist(j, i));
  return dist;
}

}  // namespace

Matrix shortest_path_matrix(const ConnectivityMatrix& m, const DisconnectedPolicy& policy) {
  Matrix dist = all_pairs_dijkstra(m.weights());
  const Index n = dist.rows();

  bool any_disconnected = false;
  double max_finite = -1.0;
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) {
      if (std::isfinite(dist(i, j)))
        max_finite = std::max(max_finite, dist(i, j));
      else
        any_disconnected = true;
    }
  if (!any_disconnected) return dist;

  double fill = 0.0;
  switch (policy.kind) {
    case DisconnectedPolicy::Kind::error:
      raise(Errc::disconnected_pair, "subject " + m.subject_id() + " has node pairs without a connecting path");
    case DisconnectedPolicy::Kind::fixed_constant:
      fill = policy.constant;
      break;
    case DisconnectedPolicy::Kind::max_finite:
      if (max_finite < 0.0)
        raise(Errc::all_pairs_disconnected, "subject " + m.subject_id() + " has no finite path between any pair");
      fill = max_finite;
      break;
  }
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      if (!std::isfinite(dist(i, j))) dist(i, j) = fill;
  return dist;
}

FeatureVector shortest_path_lengths(const ConnectivityMatrix& m, const DisconnectedPolicy& policy) {
  return flatten_upper_triangle(shortest_path_matrix(m, policy), Measure::shortest_path);
}

Matrix matrix_exponential_symmetric(const Matrix& a) {
  if (a.rows() != a.cols()) raise(Errc::not_square, "matrix exponential needs a square matrix");
  if (!a.allFinite()) raise(Errc::non_finite_entry, "matrix exponential input is not finite");
  if (a.rows() == 0) return Matrix(0, 0);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  if (eig.info() != Eigen::Success)
    raise(Errc::eigendecomposition_failure, "symmetric eigensolver did not converge");
  const Matrix& q = eig.eigenvectors();
  const Vector expl = eig.eigenvalues().array().exp();
  Matrix e = q * expl.asDiagonal() * q.transpose();
  return 0.5 * (e + e.transpose());
}

Matrix communicability_matrix(const ConnectivityMatrix& m) {
  const Index n = m.node_count();
  const Vector strengths = node_strengths(m).values;

  std::vector<Index> connected;
  for (Index i = 0; i < n; ++i)
    if (strengths[i] > 0.0) connected.push_back(i);

  Matrix out = Matrix::Identity(n, n);
  if (connected.empty()) return out;

  const Index k = static_cast<Index>(connected.size());
  Vector inv_sqrt(k);
  for (Index a = 0; a < k; ++a) inv_sqrt[a] = 1.0 / std::sqrt(strengths[connected[a]]);
  Matrix normalized(k, k);
  for (Index b = 0; b < k; ++b)
    for (Index a = 0; a < k; ++a)
      normalized(a, b) = inv_sqrt[a] * m.weights()(connected[a], connected[b]) * inv_sqrt[b];

  // exp of a nonnegative matrix is entrywise nonnegative; clamp eigensolver round-off.
  const Matrix sub = matrix_exponential_symmetric(normalized);
  for (Index b = 0; b < k; ++b)
    for (Index a = 0; a < k; ++a) out(connected[a], connected[b]) = std::max(0.0, sub(a, b));
  return out;
}

FeatureVector communicability(const ConnectivityMatrix& m) {
  return flatten_upper_triangle(communicability_matrix(m), Measure::communicability);
}

std::array<FeatureVector, 3> extract_features(const ConnectivityMatrix& m, const ExtractionOptions& options) {
  return {flatten_upper_triangle(m.weights(), Measure::weights), shortest_path_lengths(m, options.disconnected),
          communicability(m)};
}

}  // namespace connsemble
