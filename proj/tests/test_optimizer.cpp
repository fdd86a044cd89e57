#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "isoent/constructions.hpp"
#include "isoent/lbfgs.hpp"
#include "isoent/optimizer.hpp"
#include "isoent/seeding.hpp"
#include "isoent/state.hpp"
#include "isoent/unitary_param.hpp"

using namespace isoent;

namespace {

PureState bell_state() { return ghz_state(2, 2); }

PureState schmidt_two_qutrit(double l1, double l2) {
  const double l3 = std::sqrt(std::max(0.0, 1.0 - l1 * l1 - l2 * l2));
  VectorXcd amps = VectorXcd::Zero(9);
  amps(0) = l1;
  amps(4) = l2;
  amps(8) = l3;
  return make_state(2, 3, std::move(amps));
}

// Finite-difference gradient of f through the public search pieces: build the
// same objective minimize_f sees by re-deriving states from chart parameters.
double f_from_theta(const PureState& psi, int m, const VectorXd& x) {
  const int chart = chart_dim(psi.d);
  std::vector<PureState> states{psi};
  for (int s = 0; s < m - 1; ++s) {
    LocalUnitaryString str;
    for (int k = 0; k < psi.n; ++k)
      str.factors.push_back(
          params_to_unitary(psi.d, x.segment(Eigen::Index{(s * psi.n + k)} * chart, chart)));
    states.push_back(apply_local_string(str, psi));
  }
  return gram_and_f(states).f;
}

}  // namespace

TEST_CASE("minimize_f finds the Bell basis") {
  SearchProblem p;
  p.state = bell_state();
  p.num_states = 4;
  p.restarts = 5;
  p.master_seed = 2;
  const auto res = minimize_f(p);
  CHECK(res.converged);
  CHECK(res.best_f <= 1e-6);
  CHECK(static_cast<int>(res.best_strings.size()) == 4);
  // first string is the identity gauge
  for (const auto& factor : res.best_strings.front().factors)
    CHECK((factor - MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("minimize_f validates its inputs") {
  SearchProblem p;
  p.state = bell_state();
  p.num_states = 17;
  CHECK_THROWS_AS(minimize_f(p), std::invalid_argument);
  p.num_states = 1;
  CHECK_THROWS_AS(minimize_f(p), std::invalid_argument);
  p.num_states = 4;
  p.tol = 0.0;
  CHECK_THROWS_AS(minimize_f(p), std::invalid_argument);
}

TEST_CASE("warm start at a known orthogonalizer converges immediately") {
  SearchProblem p;
  p.state = bell_state();
  p.num_states = 2;
  p.restarts = 3;
  p.master_seed = 5;
  LocalUnitaryString identity{{pauli_i2(), pauli_i2()}};
  LocalUnitaryString orthogonalizer{{pauli_z2(), pauli_i2()}};  // (Z x I) Phi+ is orthogonal
  p.init_strings = {identity, orthogonalizer};
  const auto res = minimize_f(p);
  CHECK(res.converged);
  CHECK(res.iterations == 0);
  CHECK(res.restart_index == 0);
  CHECK(res.best_f <= 1e-12);
}

TEST_CASE("warm start at the fixed two-qubit construction stays at zero") {
  VectorXcd amps(4);
  amps << 0.6, 0, 0, 0.8;
  SearchProblem p;
  p.state = make_state(2, 2, amps);
  p.num_states = 4;
  p.restarts = 2;
  p.master_seed = 8;
  p.init_strings = two_qubit_schmidt_strings();
  const auto res = minimize_f(p);
  CHECK(res.best_f <= 1e-12);
  CHECK(res.iterations <= 5);
}

TEST_CASE("analytic gradient used by the search matches finite differences") {
  const PureState psi = random_state(2, 2, 31);
  const int m = 3;
  const int dims = (m - 1) * psi.n * chart_dim(psi.d);
  auto rng = make_rng(77);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  const double step = 1e-6;
  for (int point = 0; point < 100; ++point) {
    VectorXd x(dims);
    for (int i = 0; i < dims; ++i) x(i) = angle(rng);
    // analytic gradient comes out of a single descent step probe: evaluate
    // with the library by differentiating f_from_theta centrally and compare
    // against the optimizer's internal gradient through a one-iteration run.
    VectorXd fd(dims);
    for (int q = 0; q < dims; ++q) {
      VectorXd up = x, down = x;
      up(q) += step;
      down(q) -= step;
      fd(q) = (f_from_theta(psi, m, up) - f_from_theta(psi, m, down)) / (2 * step);
    }
    // recover the analytic gradient by projecting a tiny exact step: use the
    // chart partials directly.
    const int chart = chart_dim(psi.d);
    VectorXd analytic(dims);
    std::vector<PureState> states{psi};
    std::vector<std::vector<UnitaryChart>> charts(m - 1);
    for (int s = 0; s < m - 1; ++s) {
      LocalUnitaryString str;
      charts[s].resize(psi.n);
      for (int k = 0; k < psi.n; ++k) {
        charts[s][k] = params_to_unitary_with_partials(
            psi.d, x.segment(Eigen::Index{(s * psi.n + k)} * chart, chart));
        str.factors.push_back(charts[s][k].u);
      }
      states.push_back(apply_local_string(str, psi));
    }
    const auto gf = gram_and_f(states);
    for (int s = 0; s < m - 1; ++s) {
      const int j = s + 1;
      VectorXcd w = VectorXcd::Zero(psi.dim());
      for (int j2 = 0; j2 < m; ++j2)
        if (j2 != j) w += std::conj(gf.gram(j, j2)) * states[j2].amps;
      for (int k = 0; k < psi.n; ++k) {
        VectorXcd base = psi.amps;
        for (int k2 = 0; k2 < psi.n; ++k2)
          if (k2 != k) apply_factor_in_place(base, charts[s][k2].u, k2, psi.n, psi.d);
        for (int q = 0; q < chart; ++q) {
          VectorXcd dv = base;
          apply_factor_in_place(dv, charts[s][k].partials[q], k, psi.n, psi.d);
          analytic(Eigen::Index{(s * psi.n + k)} * chart + q) = 4.0 * dv.dot(w).real();
        }
      }
    }
    const double denom = std::max(1e-6, fd.cwiseAbs().maxCoeff());
    CHECK((fd - analytic).cwiseAbs().maxCoeff() / denom < 1e-4);
  }
}

TEST_CASE("accepted descent steps never increase f") {
  const PureState psi = random_state(2, 2, 13);
  SearchProblem p;
  p.state = psi;
  p.num_states = 4;
  p.restarts = 1;
  p.max_iters = 200;
  p.master_seed = 17;
  // trace through the lbfgs core directly on the same kind of objective
  auto objective = [&](const VectorXd& x, VectorXd* grad) {
    if (grad) {
      const double step = 1e-7;
      grad->resize(x.size());
      for (Eigen::Index q = 0; q < x.size(); ++q) {
        VectorXd up = x, down = x;
        up(q) += step;
        down(q) -= step;
        (*grad)(q) = (f_from_theta(psi, 4, up) - f_from_theta(psi, 4, down)) / (2 * step);
      }
    }
    return f_from_theta(psi, 4, x);
  };
  auto rng = make_rng(3);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  VectorXd x0(3 * 2 * 4);
  for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = angle(rng);
  LbfgsOptions opts;
  opts.max_iters = 60;
  const auto res = lbfgs_minimize(objective, x0, opts);
  for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i] <= res.trace[i - 1] + 1e-15);
}

TEST_CASE("all strings free when the identity gauge is released") {
  SearchProblem p;
  p.state = random_state(2, 2, 61);
  p.num_states = 2;
  p.fix_first_identity = false;
  p.restarts = 4;
  p.max_iters = 500;
  p.master_seed = 21;
  const auto res = minimize_f(p);
  CHECK(res.converged);
  CHECK(res.best_strings.size() == 2);
  CHECK(res.best_theta.size() == 2);  // both strings carry chart coordinates
  // the first string is generically not the identity here
  double dist = 0.0;
  for (const auto& factor : res.best_strings.front().factors)
    dist = std::max(dist, (factor - MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff());
  CHECK(dist > 1e-3);
}

TEST_CASE("deterministic across repeats and thread counts") {
  SearchProblem p;
  p.state = random_state(2, 2, 101);
  p.num_states = 4;
  p.restarts = 6;
  p.max_iters = 300;
  p.master_seed = 55;
  const auto a = minimize_f(p);
  const auto b = minimize_f(p);
  CHECK(a.best_f == b.best_f);
  CHECK(a.restart_index == b.restart_index);
  p.threads = 4;
  const auto c = minimize_f(p);
  CHECK(a.best_f == c.best_f);
  CHECK(a.restart_index == c.restart_index);
}

TEST_CASE("two-qutrit Schmidt state reaches the precision threshold") {
  SearchProblem p;
  p.state = schmidt_two_qutrit(0.8, 0.5);
  p.num_states = 9;
  p.restarts = 10;
  p.max_iters = 3000;
  p.master_seed = 7;
  p.threads = 2;
  const auto res = minimize_f(p);
  CHECK(res.best_f <= 1e-6);
}

TEST_CASE("partial-basis best_f is monotone under truncation warm starts") {
  const PureState psi = hard_four_qubit_state();
  const int restarts = 2, iters = 250;
  double prev = std::numeric_limits<double>::infinity();
  std::vector<LocalUnitaryString> prev_strings;
  for (int m = 14; m >= 11; --m) {
    SearchProblem p;
    p.state = psi;
    p.num_states = m;
    p.restarts = restarts;
    p.max_iters = iters;
    p.master_seed = 900 + m;
    p.stop_on_converged = false;
    if (!prev_strings.empty())
      p.init_strings.assign(prev_strings.begin(), prev_strings.begin() + m);
    const auto res = minimize_f(p);
    CHECK(res.best_f <= prev + 1e-9);
    prev = res.best_f;
    prev_strings = res.best_strings;
  }
}

TEST_CASE("parameter counting") {
  const auto full3 = parameter_count_full(3);
  CHECK(full3.free_params == 63);
  CHECK(full3.constraints == 56);
  CHECK(full3.feasible_by_count);

  const auto full4 = parameter_count_full(4);
  CHECK(full4.free_params == 180);
  CHECK(full4.constraints == 240);
  CHECK(!full4.feasible_by_count);

  const auto m13 = parameter_count(4, 13);
  CHECK(m13.free_params == 144);
  CHECK(m13.constraints == 156);
  CHECK(!m13.feasible_by_count);

  const auto m12 = parameter_count(4, 12);
  CHECK(m12.free_params == 132);
  CHECK(m12.constraints == 132);
  CHECK(m12.feasible_by_count);

  for (int m = 2; m <= 16; ++m) CHECK(parameter_count(4, m).feasible_by_count == (m <= 12));
  CHECK_THROWS_AS(parameter_count(4, 17), std::invalid_argument);
}

TEST_CASE("hard four-qubit state has the right support") {
  const PureState psi = hard_four_qubit_state();
  const double v = 1.0 / std::sqrt(6.0);
  for (const int idx : {0, 1, 2, 4, 8, 15}) CHECK(std::abs(psi.amps(idx) - v) < 1e-14);
  for (const int idx : {3, 5, 6, 7, 9, 10, 11, 12, 13, 14}) CHECK(std::abs(psi.amps(idx)) == 0.0);
  CHECK(std::abs(psi.amps.norm() - 1.0) < 1e-14);
}

TEST_CASE("scan smoke tests") {
  const auto records = scan_two_qutrit(3, 6, 12321, 2, 2500);
  CHECK(records.size() == 3);
  for (const auto& rec : records) {
    CHECK(rec.scenario == "two-qutrit");
    CHECK(rec.params.size() == 3);
    CHECK(rec.best_f <= 1e-6);
  }
  // identical payloads regardless of thread count
  const auto sequential = scan_two_qutrit(3, 6, 12321, 1, 2500);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].best_f == sequential[i].best_f);
    CHECK(records[i].seed == sequential[i].seed);
  }

  int seen = 0;
  scan_three_qubit(2, 6, 999, 2, 2500, [&](const ScanRecord& rec) {
    CHECK(rec.sample_id == seen);
    ++seen;
  });
  CHECK(seen == 2);
}

TEST_CASE("degenerate Schmidt triple is a product state and optimizes to ~0") {
  SearchProblem p;
  p.state = schmidt_two_qutrit(1.0, 0.0);
  p.num_states = 9;
  p.restarts = 10;
  p.max_iters = 3000;
  p.master_seed = 3;
  p.threads = 2;
  const auto res = minimize_f(p);
  CHECK(res.best_f <= 1e-12);
}
