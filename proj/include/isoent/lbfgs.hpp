#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <vector>

namespace isoent {

/// Objective callback: returns f(x) and fills *grad when non-null.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct LbfgsOptions {
  int max_iters = 1000;
  double target_f = -std::numeric_limits<double>::infinity();  // stop once f <= target_f
  int history = 10;
  double stall_rel = 1e-12;  // stop when the best f improves by less than this
  int stall_window = 50;     // relative amount over this many iterations
};

struct LbfgsResult {
  enum class Stop { target, stall, max_iters, line_search, zero_gradient };

  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  Stop reason = Stop::max_iters;
  std::vector<double> trace;  // f at x0 and after every accepted step
};

/// Limited-memory BFGS with Armijo backtracking. Line-search probes evaluate
/// f only; gradients are requested at accepted points.
LbfgsResult lbfgs_minimize(const Objective& objective, Eigen::VectorXd x0,
                           const LbfgsOptions& opts);

}  // namespace isoent
