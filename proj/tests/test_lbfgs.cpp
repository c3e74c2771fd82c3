#include "connsemble/error.hpp"
#include "connsemble/lbfgs.hpp"

#include <doctest.h>
#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <random>

using namespace connsemble;

namespace {

struct Quadratic {
  Matrix a;
  Vector c;
  double operator()(const Vector& x, Vector& g) const {
    const Vector r = x - c;
    g = 2.0 * (a * r);
    return r.dot(a * r);
  }
};

Quadratic random_quadratic(std::mt19937_64& rng, int n, double cond) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (auto& v : m.reshaped()) v = g(rng);
  const Matrix q = Eigen::HouseholderQR<Matrix>(m).householderQ();
  Vector eig(n);
  for (int i = 0; i < n; ++i) eig[i] = std::pow(cond, static_cast<double>(i) / std::max(1, n - 1));
  Quadratic f;
  f.a = q * eig.asDiagonal() * q.transpose();
  f.a = 0.5 * (f.a + f.a.transpose()).eval();
  f.c.resize(n);
  for (auto& v : f.c) v = g(rng);
  return f;
}

double rosenbrock(const Vector& x, Vector& g) {
  const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
  g[0] = -2.0 * a - 400.0 * x[0] * b;
  g[1] = 200.0 * b;
  return a * a + 100.0 * b * b;
}

void check_trace(const LbfgsResult& r, const LbfgsOptions& o) {
  double prev = r.initial_objective;
  for (const auto& it : r.trace) {
    CHECK(it.previous_objective == prev);
    CHECK(it.objective <= it.previous_objective);
    CHECK(it.initial_slope < 0.0);
    CHECK(it.objective <= it.previous_objective + o.c1 * it.step * it.initial_slope);
    CHECK(std::abs(it.final_slope) <= o.c2 * std::abs(it.initial_slope));
    prev = it.objective;
  }
  CHECK(r.objective == prev);
}

}  // namespace

TEST_CASE("isotropic quadratic converges to its centre") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Quadratic f;
  f.a = Matrix::Identity(8, 8);
  f.c = Vector(8);
  for (auto& v : f.c) v = g(rng);
  Vector x0(8);
  for (auto& v : x0) v = 5 * g(rng);

  LbfgsOptions o;
  o.gradient_tolerance = 1e-8;
  const auto r = lbfgs_minimize(std::cref(f), x0, o);
  CHECK(r.status == LbfgsStatus::converged);
  CHECK(r.iterations <= 20);
  CHECK((r.x - f.c).cwiseAbs().maxCoeff() <= 1e-8);
  check_trace(r, o);
}

TEST_CASE("ill-conditioned quadratics") {
  std::mt19937_64 rng(7);
  LbfgsOptions o;
  o.gradient_tolerance = 1e-8;
  for (int trial = 0; trial < 10; ++trial) {
    const Quadratic f = random_quadratic(rng, 10, 50.0);
    const auto r = lbfgs_minimize(std::cref(f), Vector::Zero(10), o);
    CHECK(r.status == LbfgsStatus::converged);
    CHECK(r.gradient.cwiseAbs().maxCoeff() <= 1e-8);
    // no finite-termination guarantee with inexact line searches
    CHECK(r.iterations <= 60);
    check_trace(r, o);
  }
}

TEST_CASE("Rosenbrock from (-1.2, 1)") {
  LbfgsOptions o;
  o.gradient_tolerance = 1e-12;
  o.max_iterations = 500;
  Vector x0(2);
  x0 << -1.2, 1.0;
  const auto r = lbfgs_minimize(rosenbrock, x0, o);
  CHECK(std::abs(r.x[0] - 1.0) <= 1e-6);
  CHECK(std::abs(r.x[1] - 1.0) <= 1e-6);
  check_trace(r, o);
}

TEST_CASE("stationary start stops before any step") {
  Quadratic f;
  f.a = Matrix::Identity(3, 3);
  f.c = Vector::Constant(3, 2.0);
  int calls = 0;
  Objective counted = [&](const Vector& x, Vector& g) {
    ++calls;
    return f(x, g);
  };
  const auto r = lbfgs_minimize(counted, f.c, {});
  CHECK(r.status == LbfgsStatus::converged);
  CHECK(r.iterations == 0);
  CHECK(calls == 1);
  CHECK(r.x == f.c);
}

TEST_CASE("iteration cap") {
  LbfgsOptions o;
  o.max_iterations = 3;
  o.gradient_tolerance = 1e-14;
  Vector x0(2);
  x0 << -1.2, 1.0;
  const auto r = lbfgs_minimize(rosenbrock, x0, o);
  CHECK(r.status == LbfgsStatus::max_iterations);
  CHECK(r.iterations == 3);
  CHECK(r.trace.size() == 3);
}

TEST_CASE("non-finite objective at the start") {
  Objective bad = [](const Vector&, Vector& g) {
    g.setZero();
    return std::numeric_limits<double>::quiet_NaN();
  };
  try {
    lbfgs_minimize(bad, Vector::Zero(2), {});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::non_finite_objective);
  }
}

TEST_CASE("line search failure keeps the best iterate") {
  // Gradient points the wrong way, so no step can decrease f.
  Objective liar = [](const Vector& x, Vector& g) {
    g = -2.0 * x;
    return x.squaredNorm();
  };
  Vector x0(2);
  x0 << 1.0, -1.0;
  const auto r = lbfgs_minimize(liar, x0, {});
  CHECK(r.status == LbfgsStatus::line_search_failure);
  CHECK(r.x == x0);
  CHECK(r.objective == 2.0);
}
