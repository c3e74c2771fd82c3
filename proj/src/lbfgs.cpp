#include "connsemble/lbfgs.hpp"

#include "connsemble/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace connsemble {

namespace {

struct Probe {
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;
};

struct LineSearchOutcome {
  bool ok = false;
  Probe accepted;
  Vector x;
  Vector grad;
  int evaluations = 0;
};

// Minimizer of the cubic interpolating (a, fa, da) and (b, fb, db), clamped
// to the inner 80% of [a, b]. Falls back to bisection when the cubic is degenerate.
double cubic_step(const Probe& a, const Probe& b) {
  const double lo = std::min(a.step, b.step);
  const double hi = std::max(a.step, b.step);
  const double margin = 0.1 * (hi - lo);
  double t = 0.5 * (lo + hi);
  if (std::isfinite(a.value) && std::isfinite(b.value)) {
    const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.step - b.step);
    const double disc = d1 * d1 - a.slope * b.slope;
    if (disc >= 0.0) {
      const double d2 = std::copysign(std::sqrt(disc), b.step - a.step);
      const double denom = b.slope - a.slope + 2.0 * d2;
      if (denom != 0.0) {
        const double c = b.step - (b.step - a.step) * (b.slope + d2 - d1) / denom;
        if (std::isfinite(c)) t = c;
      }
    }
  }
  return std::clamp(t, lo + margin, hi - margin);
}

class StrongWolfeSearch {
 public:
  StrongWolfeSearch(const Objective& f, const Vector& x, double fx, const Vector& dir, double slope0,
                    const LbfgsOptions& opt)
      : f_(f), x_(x), dir_(dir), f0_(fx), slope0_(slope0), opt_(opt), trial_x_(x.size()), trial_g_(x.size()) {}

  LineSearchOutcome run(double initial_step) {
    Probe prev{0.0, f0_, slope0_};
    double step = initial_step;
    for (int i = 0; evaluations_ < opt_.max_line_search_evaluations; ++i) {
      Probe cur = evaluate(step);
      if (!std::isfinite(cur.value) || cur.value > f0_ + opt_.c1 * step * slope0_ ||
          (i > 0 && cur.value >= prev.value))
        return zoom(prev, cur);
      if (std::abs(cur.slope) <= -opt_.c2 * slope0_) return accept(cur);
      if (cur.slope >= 0.0) return zoom(cur, prev);
      prev = cur;
      step *= 2.0;
    }
    return fail();
  }

 private:
  Probe evaluate(double step) {
    ++evaluations_;
    trial_x_ = x_ + step * dir_;
    const double value = f_(trial_x_, trial_g_);
    const double slope = trial_g_.dot(dir_);
    if (std::isfinite(value) && trial_g_.allFinite() && value < best_value_) {
      best_value_ = value;
      best_x_ = trial_x_;
      best_g_ = trial_g_;
      best_probe_ = {step, value, slope};
    }
    if (!std::isfinite(value) || !trial_g_.allFinite())
      return {step, std::numeric_limits<double>::infinity(), 0.0};
    return {step, value, slope};
  }

  LineSearchOutcome accept(const Probe& p) {
    LineSearchOutcome out;
    out.ok = true;
    out.accepted = p;
    out.x = trial_x_;
    out.grad = trial_g_;
    out.evaluations = evaluations_;
    return out;
  }

  LineSearchOutcome fail() {
    LineSearchOutcome out;
    out.evaluations = evaluations_;
    if (best_value_ < f0_) {
      out.accepted = best_probe_;
      out.x = std::move(best_x_);
      out.grad = std::move(best_g_);
    }
    return out;
  }

  // lo satisfies sufficient decrease and has the lowest value seen so far.
  LineSearchOutcome zoom(Probe lo, Probe hi) {
    while (evaluations_ < opt_.max_line_search_evaluations) {
      if (std::abs(hi.step - lo.step) <= std::numeric_limits<double>::epsilon() * std::max(1.0, hi.step))
        break;
      const double step = std::isfinite(hi.value) ? cubic_step(lo, hi) : 0.5 * (lo.step + hi.step);
      Probe cur = evaluate(step);
      if (!std::isfinite(cur.value) || cur.value > f0_ + opt_.c1 * step * slope0_ || cur.value >= lo.value) {
        hi = cur;
        continue;
      }
      if (std::abs(cur.slope) <= -opt_.c2 * slope0_) return accept(cur);
      if (cur.slope * (hi.step - lo.step) >= 0.0) hi = lo;
      lo = cur;
    }
    return fail();
  }

  const Objective& f_;
  const Vector& x_;
  const Vector& dir_;
  double f0_;
  double slope0_;
  const LbfgsOptions& opt_;
  Vector trial_x_;
  Vector trial_g_;
  int evaluations_ = 0;
  double best_value_ = std::numeric_limits<double>::infinity();
  Vector best_x_;
  Vector best_g_;
  Probe best_probe_;
};

struct CurvaturePair {
  Vector s;
  Vector y;
  double rho;
};

Vector two_loop_direction(const Vector& grad, const std::deque<CurvaturePair>& memory) {
  Vector q = -grad;
  std::vector<double> alpha(memory.size());
  for (std::size_t i = memory.size(); i-- > 0;) {
    alpha[i] = memory[i].rho * memory[i].s.dot(q);
    q -= alpha[i] * memory[i].y;
  }
  const CurvaturePair& last = memory.back();
  q *= last.s.dot(last.y) / last.y.squaredNorm();
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double beta = memory[i].rho * memory[i].y.dot(q);
    q += (alpha[i] - beta) * memory[i].s;
  }
  return q;
}

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, Vector x0, const LbfgsOptions& options) {
  if (options.history < 1 || options.max_iterations < 0 || !(options.gradient_tolerance > 0.0) ||
      !(options.c1 > 0.0 && options.c1 < options.c2 && options.c2 < 1.0))
    raise(Errc::invalid_argument, "invalid L-BFGS options");

  LbfgsResult result;
  result.x = std::move(x0);
  result.gradient.resize(result.x.size());
  result.objective = objective(result.x, result.gradient);
  result.evaluations = 1;
  if (!std::isfinite(result.objective) || !result.gradient.allFinite())
    raise(Errc::non_finite_objective, "objective or gradient is not finite at the starting point");
  result.initial_objective = result.objective;

  std::deque<CurvaturePair> memory;
  if (inf_norm(result.gradient) <= options.gradient_tolerance) {
    result.status = LbfgsStatus::converged;
    return result;
  }

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    Vector dir;
    double initial_step = 1.0;
    if (memory.empty()) {
      dir = -result.gradient;
      initial_step = 1.0 / result.gradient.norm();
    } else {
      dir = two_loop_direction(result.gradient, memory);
    }
    double slope = result.gradient.dot(dir);
    if (!(slope < 0.0)) {
      memory.clear();
      dir = -result.gradient;
      slope = -result.gradient.squaredNorm();
      initial_step = 1.0 / result.gradient.norm();
    }

    StrongWolfeSearch search(objective, result.x, result.objective, dir, slope, options);
    LineSearchOutcome ls = search.run(initial_step);
    result.evaluations += ls.evaluations;

    if (!ls.ok) {
      if (ls.x.size() > 0) {
        result.x = std::move(ls.x);
        result.gradient = std::move(ls.grad);
        result.objective = ls.accepted.value;
      }
      result.status = LbfgsStatus::line_search_failure;
      return result;
    }

    Vector s = ls.x - result.x;
    Vector y = ls.grad - result.gradient;
    const double sy = s.dot(y);

    IterationRecord rec;
    rec.iteration = iter;
    rec.previous_objective = result.objective;
    rec.objective = ls.accepted.value;
    rec.step = ls.accepted.step;
    rec.initial_slope = slope;
    rec.final_slope = ls.accepted.slope;
    rec.evaluations = ls.evaluations;

    result.x = std::move(ls.x);
    result.gradient = std::move(ls.grad);
    result.objective = ls.accepted.value;
    result.iterations = iter;
    rec.gradient_inf_norm = inf_norm(result.gradient);
    result.trace.push_back(rec);

    if (sy > std::numeric_limits<double>::epsilon() * y.squaredNorm()) {
      if (static_cast<int>(memory.size()) == options.history) memory.pop_front();
      memory.push_back({std::move(s), std::move(y), 1.0 / sy});
    }

    if (rec.gradient_inf_norm <= options.gradient_tolerance) {
      result.status = LbfgsStatus::converged;
      return result;
    }
  }
  result.status = LbfgsStatus::max_iterations;
  return result;
}

}  // namespace connsemble
