#include "isoent/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace isoent {

using Eigen::VectorXd;

LbfgsResult lbfgs_minimize(const Objective& objective, VectorXd x0, const LbfgsOptions& opts) {
  LbfgsResult res;
  VectorXd x = std::move(x0);
  VectorXd g(x.size()), gnew(x.size());
  double f = objective(x, &g);
  res.trace.push_back(f);

  struct Pair {
    VectorXd s, y;
    double rho;
  };
  std::deque<Pair> hist;
  std::deque<double> recent{f};
  const double c1 = 1e-4;

  if (f <= opts.target_f) {
    res.x = std::move(x);
    res.f = f;
    res.reason = LbfgsResult::Stop::target;
    return res;
  }

  VectorXd dir(x.size()), xnew(x.size());
  std::vector<double> alpha;
  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    // Two-loop recursion for the quasi-Newton direction.
    dir = -g;
    alpha.assign(hist.size(), 0.0);
    for (int i = static_cast<int>(hist.size()) - 1; i >= 0; --i) {
      alpha[i] = hist[i].rho * hist[i].s.dot(dir);
      dir -= alpha[i] * hist[i].y;
    }
    if (!hist.empty()) {
      const auto& last = hist.back();
      dir *= last.s.dot(last.y) / last.y.squaredNorm();
    } else {
      dir *= 1.0 / std::max(1.0, g.norm());
    }
    for (std::size_t i = 0; i < hist.size(); ++i) {
      const double beta = hist[i].rho * hist[i].y.dot(dir);
      dir += (alpha[i] - beta) * hist[i].s;
    }

    double gd = g.dot(dir);
    if (!(gd < 0)) {  // not a descent direction; fall back to steepest descent
      dir = -g / std::max(1.0, g.norm());
      gd = g.dot(dir);
      if (gd == 0.0) {
        res.reason = LbfgsResult::Stop::zero_gradient;
        res.iterations = iter - 1;
        res.x = std::move(x);
        res.f = f;
        return res;
      }
    }

    // Armijo backtracking; probes evaluate f only.
    double t = 1.0;
    double fnew = f;
    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      for (int ls = 0; ls < 60; ++ls) {
        xnew = x + t * dir;
        fnew = objective(xnew, nullptr);
        if (fnew <= f + c1 * t * gd) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted && attempt == 0) {  // retry once along the raw gradient
        hist.clear();
        dir = -g / std::max(1.0, g.norm());
        gd = g.dot(dir);
        t = 1.0;
      }
    }
    if (!accepted) {
      res.reason = LbfgsResult::Stop::line_search;
      res.iterations = iter - 1;
      res.x = std::move(x);
      res.f = f;
      return res;
    }

    objective(xnew, &gnew);
    VectorXd s = xnew - x;
    VectorXd y = gnew - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      hist.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(hist.size()) > opts.history) hist.pop_front();
    }
    x.swap(xnew);
    g.swap(gnew);
    f = fnew;
    res.trace.push_back(f);
    res.iterations = iter;

    if (f <= opts.target_f) {
      res.reason = LbfgsResult::Stop::target;
      res.x = std::move(x);
      res.f = f;
      return res;
    }
    recent.push_back(f);
    if (static_cast<int>(recent.size()) > opts.stall_window + 1) recent.pop_front();
    if (static_cast<int>(recent.size()) == opts.stall_window + 1) {
      const double before = recent.front();
      if (before - f <= opts.stall_rel * std::max(std::abs(before), 1e-300)) {
        res.reason = LbfgsResult::Stop::stall;
        res.x = std::move(x);
        res.f = f;
        return res;
      }
    }
  }
  res.reason = LbfgsResult::Stop::max_iters;
  res.x = std::move(x);
  res.f = f;
  return res;
}

}  // namespace isoent
