#pragma once

#include "connsemble/types.hpp"

#include <functional>
#include <vector>

namespace connsemble {

/// Returns f(x) and writes the gradient into `grad` (already sized like x).
using Objective = std::function<double(const Vector& x, Vector& grad)>;

struct LbfgsOptions {
  int history = 10;
  int max_iterations = 200;
  double gradient_tolerance = 1e-5;  // on the infinity norm of the gradient
  double c1 = 1e-4;                  // sufficient decrease
  double c2 = 0.9;                   // curvature (strong Wolfe)
  int max_line_search_evaluations = 40;
};

enum class LbfgsStatus { converged, max_iterations, line_search_failure };

/// One accepted step. The slopes are directional derivatives along the search
/// direction before and after the step, which is what the Wolfe tests look at.
struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double previous_objective = 0.0;
  double gradient_inf_norm = 0.0;
  double step = 0.0;
  double initial_slope = 0.0;
  double final_slope = 0.0;
  int evaluations = 0;
};

struct LbfgsResult {
  Vector x;
  double objective = 0.0;
  Vector gradient;
  LbfgsStatus status = LbfgsStatus::max_iterations;
  int iterations = 0;
  int evaluations = 0;
  double initial_objective = 0.0;
  std::vector<IterationRecord> trace;
};

/// Limited-memory BFGS with the two-loop recursion and a strong Wolfe line
/// search (bracketing + cubic zoom). A failed line search does not throw; the
/// best accepted iterate comes back with status line_search_failure.
/// Throws Errc::non_finite_objective if f(x0) or grad f(x0) is not finite.
LbfgsResult lbfgs_minimize(const Objective& objective, Vector x0, const LbfgsOptions& options = {});

}  // namespace connsemble
