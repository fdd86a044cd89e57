#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "isoent/constructions.hpp"
#include "isoent/lbfgs.hpp"
#include "isoent/seeding.hpp"
#include "isoent/unitary_param.hpp"

using namespace isoent;

namespace {

VectorXd random_theta(int d, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  VectorXd theta(chart_dim(d));
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = angle(rng);
  return theta;
}

// Frobenius distance recovery of a target unitary through the chart, using
// the same descent core as the main search.
double recover_target(const MatrixXcd& target, int restarts, std::uint64_t seed) {
  const int d = static_cast<int>(target.rows());
  auto objective = [&](const VectorXd& theta, VectorXd* grad) {
    const auto chart = params_to_unitary_with_partials(d, theta);
    const MatrixXcd delta = chart.u - target;
    if (grad) {
      grad->resize(theta.size());
      for (Eigen::Index q = 0; q < theta.size(); ++q)
        (*grad)(q) = 2.0 * chart.partials[q].conjugate().cwiseProduct(delta).sum().real();
    }
    return delta.cwiseAbs2().sum();
  };
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    LbfgsOptions opts;
    opts.max_iters = 500;
    opts.target_f = 1e-10;
    const auto res = lbfgs_minimize(objective, random_theta(d, derive_seed(seed, r)), opts);
    best = std::min(best, res.f);
    if (best <= 1e-10) break;
  }
  return best;
}

}  // namespace

TEST_CASE("zero parameters give the identity") {
  for (const int d : {1, 2, 3, 5}) {
    const MatrixXcd u = params_to_unitary(d, VectorXd::Zero(chart_dim(d)));
    CHECK((u - MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(params_to_unitary(3, VectorXd::Zero(4)), std::invalid_argument);
}

TEST_CASE("chart outputs are unitary for arbitrary parameters") {
  for (const int d : {2, 3, 4, 5}) {
    double worst = 0.0;
    for (int trial = 0; trial < 25000; ++trial) {  // 1e5 draws across the four dimensions
      const MatrixXcd u = params_to_unitary(d, random_theta(d, derive_seed(d, trial)));
      worst = std::max(worst, unitarity_residual(u));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("chart coverage near the generalized Paulis (d = 3 smoke test)") {
  // Coverage smoke test only: with 1e4 uniform parameter draws the nearest
  // sample sits around Frobenius distance 0.8-0.9 from a fixed element of the
  // 9-parameter group (frozen from measuring this stream; random unitaries
  // average distance ~2.4). Surjectivity proper is certified by the descent
  // recovery test below and the exact inverse-chart round-trip.
  const auto [x3, z3] = generalized_pauli(3);
  double best_x = std::numeric_limits<double>::infinity();
  double best_z = best_x;
  double mean = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const MatrixXcd u = params_to_unitary(3, random_theta(3, derive_seed(77, trial)));
    const double dx = std::sqrt((u - x3).cwiseAbs2().sum());
    best_x = std::min(best_x, dx);
    best_z = std::min(best_z, std::sqrt((u - z3).cwiseAbs2().sum()));
    mean += dx;
  }
  mean /= 10000;
  CHECK(best_x < 1.0);
  CHECK(best_z < 1.0);
  CHECK(best_x < mean - 1.0);  // the chart does wander far into the neighborhood
  CHECK(best_z < mean - 1.0);
}

TEST_CASE("analytic partials match central differences") {
  const double step = 1e-5;
  for (const int d : {2, 3}) {
    for (int trial = 0; trial < 10; ++trial) {
      const VectorXd theta = random_theta(d, derive_seed(88, 10 * d + trial));
      const auto chart = params_to_unitary_with_partials(d, theta);
      CHECK(unitarity_residual(chart.u) <= 1e-12);
      for (Eigen::Index q = 0; q < theta.size(); ++q) {
        VectorXd up = theta, down = theta;
        up(q) += step;
        down(q) -= step;
        const MatrixXcd fd = (params_to_unitary(d, up) - params_to_unitary(d, down)) / (2 * step);
        const double denom = std::max(1e-8, fd.cwiseAbs().maxCoeff());
        CHECK((fd - chart.partials[q]).cwiseAbs().maxCoeff() / denom < 0.05);
      }
    }
  }
}

TEST_CASE("inverse chart round-trips arbitrary unitaries") {
  for (const int d : {2, 3, 4, 8}) {
    for (int trial = 0; trial < 5; ++trial) {
      const MatrixXcd target = haar_random_unitary(d, derive_seed(99, 10 * d + trial));
      const VectorXd theta = unitary_to_params(target);
      CHECK((params_to_unitary(d, theta) - target).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  CHECK_THROWS_AS(unitary_to_params(MatrixXcd::Ones(2, 2)), std::invalid_argument);
}

TEST_CASE("optimizer-grade surjectivity: descent recovers named targets") {
  std::vector<MatrixXcd> targets{pauli_x2(), pauli_z2(), pauli_xz2(), haar_random_unitary(2, 4242),
                                 haar_random_unitary(3, 4243)};
  for (std::size_t i = 0; i < targets.size(); ++i)
    CHECK(recover_target(targets[i], 20, derive_seed(1000, i)) <= 1e-8);
}

TEST_CASE("haar_random_unitary: determinism, unitarity, first moment") {
  const MatrixXcd a = haar_random_unitary(3, 11);
  const MatrixXcd b = haar_random_unitary(3, 11);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(unitarity_residual(a) <= 1e-12);

  double mean = 0.0;
  const int samples = 10000;
  for (int i = 0; i < samples; ++i)
    mean += std::norm(haar_random_unitary(2, derive_seed(13, i))(0, 0));
  mean /= samples;
  CHECK(std::abs(mean - 0.5) < 0.02);
}

TEST_CASE("perturb: identity at scale zero, smooth for small scales, deterministic") {
  const UnitaryParams p{2, random_theta(2, 5)};
  const UnitaryParams same = perturb(p, 0.0, 9);
  CHECK((same.theta - p.theta).cwiseAbs().maxCoeff() == 0.0);

  const UnitaryParams nudged = perturb(p, 1e-8, 9);
  const MatrixXcd before = params_to_unitary(p);
  const MatrixXcd after = params_to_unitary(nudged);
  CHECK(std::sqrt((after - before).cwiseAbs2().sum()) < 1e-7);

  const UnitaryParams again = perturb(p, 1e-8, 9);
  CHECK((again.theta - nudged.theta).cwiseAbs().maxCoeff() == 0.0);
}
