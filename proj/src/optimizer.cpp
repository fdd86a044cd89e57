#include "isoent/optimizer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "isoent/lbfgs.hpp"
#include "isoent/seeding.hpp"
#include "isoent/unitary_param.hpp"

namespace isoent {

namespace {

// Claims indices in increasing order across workers.
template <typename Fn>
void parallel_indexed(int count, int threads, Fn&& fn) {
  if (count <= 0) return;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  const int pool_size = std::min(std::max(threads, 1), count);
  if (pool_size <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(pool_size);
  for (int t = 0; t < pool_size; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// f and its analytic gradient over the concatenated chart coordinates of the
// free strings. One instance per restart; not shared across threads.
class StringObjective {
 public:
  StringObjective(const PureState& psi, int m, bool fix_first)
      : psi_(&psi),
        n_(psi.n),
        d_(psi.d),
        m_(m),
        fix_(fix_first),
        free_(m - (fix_first ? 1 : 0)),
        chart_(chart_dim(psi.d)),
        dim_(psi.dim()),
        states_(psi.dim(), m),
        factors_(static_cast<std::size_t>(free_)) {
    for (auto& row : factors_) row.resize(n_);
  }

  int dims() const { return free_ * n_ * chart_; }

  double operator()(const VectorXd& x, VectorXd* grad) {
    std::vector<std::vector<UnitaryChart>> charts;
    if (grad) charts.resize(free_);
    for (int s = 0; s < free_; ++s) {
      if (grad) charts[s].resize(n_);
      for (int k = 0; k < n_; ++k) {
        const auto seg = x.segment(Eigen::Index{(s * n_ + k)} * chart_, chart_);
        if (grad) {
          charts[s][k] = params_to_unitary_with_partials(d_, seg);
          factors_[s][k] = charts[s][k].u;
        } else {
          factors_[s][k] = params_to_unitary(d_, seg);
        }
      }
    }

    int col = 0;
    if (fix_) states_.col(col++) = psi_->amps;
    VectorXcd work(dim_);
    for (int s = 0; s < free_; ++s) {
      work = psi_->amps;
      for (int k = 0; k < n_; ++k) apply_factor_in_place(work, factors_[s][k], k, n_, d_);
      states_.col(col++) = work;
    }
    const MatrixXcd gram = states_.adjoint() * states_;
    double f = 0.0;  // off-diagonal terms only, so f >= 0 exactly
    for (int j = 0; j < m_; ++j)
      for (int j2 = 0; j2 < m_; ++j2)
        if (j != j2) f += std::norm(gram(j, j2));
    if (!grad) return f;

    grad->resize(dims());
    VectorXcd coeff(m_), w(dim_), partial_state(dim_);
    MatrixXcd xi(d_, d_);
    for (int s = 0; s < free_; ++s) {
      const int j = s + (fix_ ? 1 : 0);
      coeff = gram.row(j).conjugate().transpose();
      coeff(j) = 0.0;
      w.noalias() = states_ * coeff;
      for (int k = 0; k < n_; ++k) {
        partial_state = psi_->amps;
        for (int k2 = 0; k2 < n_; ++k2)
          if (k2 != k) apply_factor_in_place(partial_state, factors_[s][k2], k2, n_, d_);
        accumulate_xi(partial_state, w, k, xi);
        for (int q = 0; q < chart_; ++q) {
          const Complex overlap = charts[s][k].partials[q].conjugate().cwiseProduct(xi).sum();
          (*grad)(Eigen::Index{(s * n_ + k)} * chart_ + q) = 4.0 * overlap.real();
        }
      }
    }
    return f;
  }

 private:
  // xi(a, b) = sum over the other legs of conj(partial_state[.., b, ..]) * w[.., a, ..],
  // so that (dU applied on leg k of partial_state)^dagger w = sum conj(dU_ab) xi_ab.
  void accumulate_xi(const VectorXcd& partial_state, const VectorXcd& w, int k, MatrixXcd& xi) const {
    xi.setZero();
    Eigen::Index stride = 1;
    for (int i = 0; i < n_ - 1 - k; ++i) stride *= d_;
    const Eigen::Index block = stride * d_;
    for (Eigen::Index base = 0; base < dim_; base += block) {
      for (Eigen::Index off = 0; off < stride; ++off) {
        const Complex* ps = partial_state.data() + base + off;
        const Complex* pw = w.data() + base + off;
        for (int a = 0; a < d_; ++a)
          for (int b = 0; b < d_; ++b) xi(a, b) += std::conj(ps[b * stride]) * pw[a * stride];
      }
    }
  }

  const PureState* psi_;
  int n_, d_, m_;
  bool fix_;
  int free_, chart_;
  Eigen::Index dim_;
  MatrixXcd states_;
  std::vector<std::vector<MatrixXcd>> factors_;
};

struct RestartOutcome {
  bool run = false;
  double f = std::numeric_limits<double>::infinity();
  VectorXd x;
  int iterations = 0;
};

}  // namespace

SearchResult minimize_f(const SearchProblem& p) {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index dimension = p.state.dim();
  if (dimension != global_dim(p.state.n, p.state.d))
    throw std::invalid_argument("malformed state");
  if (p.num_states < 2 || p.num_states > dimension)
    throw std::invalid_argument("num_states must lie between 2 and d^n");
  if (!(p.tol > 0)) throw std::invalid_argument("tol must be positive");
  if (p.restarts < 1) throw std::invalid_argument("need at least one restart");
  if (p.max_iters < 1) throw std::invalid_argument("need at least one iteration");

  const int free_strings = p.num_states - (p.fix_first_identity ? 1 : 0);
  const int chart = chart_dim(p.state.d);
  const Eigen::Index total_dims = Eigen::Index{free_strings} * p.state.n * chart;

  VectorXd warm;
  if (!p.init_strings.empty()) {
    if (static_cast<int>(p.init_strings.size()) != p.num_states)
      throw std::invalid_argument("warm start must provide num_states strings");
    warm.resize(total_dims);
    for (int s = 0; s < free_strings; ++s) {
      const auto& str = p.init_strings[s + (p.fix_first_identity ? 1 : 0)];
      if (str.n() != p.state.n || str.d() != p.state.d)
        throw std::invalid_argument("warm start string shape mismatch");
      for (int k = 0; k < p.state.n; ++k)
        warm.segment(Eigen::Index{(s * p.state.n + k)} * chart, chart) =
            unitary_to_params(str.factors[k]);
    }
  }

  std::vector<RestartOutcome> outcomes(p.restarts);
  std::atomic<int> stop_after{std::numeric_limits<int>::max()};

  parallel_indexed(p.restarts, p.threads, [&](int r) {
    if (p.stop_on_converged && r > stop_after.load()) return;
    StringObjective ctx(p.state, p.num_states, p.fix_first_identity);
    VectorXd x0(total_dims);
    if (r == 0 && warm.size() > 0) {
      x0 = warm;
    } else {
      auto rng = make_rng(derive_seed(p.master_seed, static_cast<std::uint64_t>(r)));
      std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
      for (Eigen::Index i = 0; i < total_dims; ++i) x0(i) = angle(rng);
    }
    LbfgsOptions opts;
    opts.max_iters = p.max_iters;
    opts.target_f = std::min(p.tol, 1e-13);  // polish past tol while progress is cheap
    auto lr = lbfgs_minimize([&ctx](const VectorXd& x, VectorXd* g) { return ctx(x, g); },
                             std::move(x0), opts);
    outcomes[r] = RestartOutcome{true, lr.f, std::move(lr.x), lr.iterations};
    if (p.stop_on_converged && lr.f <= p.tol) {
      int seen = stop_after.load();
      while (r < seen && !stop_after.compare_exchange_weak(seen, r)) {
      }
    }
  });

  // Only restarts up to the first converged index count, so the outcome does
  // not depend on how many extra restarts a parallel run happened to finish.
  int limit = p.restarts - 1;
  for (int r = 0; r < p.restarts; ++r) {
    if (outcomes[r].run && outcomes[r].f <= p.tol) {
      limit = r;
      break;
    }
  }
  int best = -1;
  for (int r = 0; r <= limit; ++r) {
    if (!outcomes[r].run) continue;
    if (best < 0 || outcomes[r].f < outcomes[best].f) best = r;
  }
  if (best < 0) throw std::logic_error("no restart produced a result");

  SearchResult result;
  result.best_f = outcomes[best].f;
  result.restart_index = best;
  result.iterations = outcomes[best].iterations;
  result.converged = result.best_f <= p.tol;
  result.best_theta.reserve(free_strings);
  result.best_strings.reserve(p.num_states);
  if (p.fix_first_identity) {
    LocalUnitaryString identity;
    identity.factors.assign(p.state.n, MatrixXcd::Identity(p.state.d, p.state.d));
    result.best_strings.push_back(std::move(identity));
  }
  for (int s = 0; s < free_strings; ++s) {
    LocalUnitaryString str;
    str.factors.reserve(p.state.n);
    VectorXd theta(Eigen::Index{p.state.n} * chart);
    for (int k = 0; k < p.state.n; ++k) {
      const auto seg = outcomes[best].x.segment(Eigen::Index{(s * p.state.n + k)} * chart, chart);
      theta.segment(Eigen::Index{k} * chart, chart) = seg;
      str.factors.push_back(params_to_unitary(p.state.d, seg));
    }
    result.best_theta.push_back(std::move(theta));
    result.best_strings.push_back(std::move(str));
  }
  result.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return result;
}

ParamCount parameter_count(int n, int m) {
  if (n < 1) throw std::invalid_argument("need at least one qubit");
  if (n > 30) throw std::invalid_argument("qubit count too large");
  const long long full = 1LL << n;
  if (m < 2 || m > full) throw std::invalid_argument("m must lie between 2 and 2^n");
  ParamCount out;
  out.free_params = 3LL * n * (m - 1);
  out.constraints = static_cast<long long>(m) * (m - 1);
  out.feasible_by_count = out.free_params >= out.constraints;
  return out;
}

ParamCount parameter_count_full(int n) {
  if (n < 1 || n > 30) throw std::invalid_argument("qubit count out of range");
  return parameter_count(n, static_cast<int>(1LL << n));
}

PureState hard_four_qubit_state() {
  VectorXcd amps = VectorXcd::Zero(16);
  const double v = 1.0 / std::sqrt(6.0);
  for (const int idx : {0, 1, 2, 4, 8, 15}) amps(idx) = v;
  return PureState{4, 2, std::move(amps)};
}

SearchResult probe_four_qubit(int restarts, std::uint64_t master_seed, int m, int max_iters,
                              int threads) {
  SearchProblem p;
  p.state = hard_four_qubit_state();
  p.num_states = m;
  p.tol = 1e-6;
  p.restarts = restarts;
  p.max_iters = max_iters;
  p.master_seed = master_seed;
  p.threads = threads;
  return minimize_f(p);
}

namespace {

std::vector<ScanRecord> run_scan(int count, int threads,
                                 const std::function<ScanRecord(int)>& make,
                                 const ScanCallback& on_record) {
  std::vector<ScanRecord> out(count);
  std::vector<char> done(count, 0);
  std::mutex mu;
  int next_emit = 0;
  parallel_indexed(count, threads, [&](int i) {
    ScanRecord rec = make(i);
    std::lock_guard<std::mutex> lock(mu);
    out[i] = std::move(rec);
    done[i] = 1;
    if (on_record) {
      while (next_emit < count && done[next_emit]) {
        on_record(out[next_emit]);
        ++next_emit;
      }
    }
  });
  return out;
}

ScanRecord minimize_for_sample(const std::string& scenario, int sample_id, std::uint64_t seed,
                               PureState state, int m, int restarts, int max_iters,
                               std::vector<std::pair<std::string, double>> params) {
  SearchProblem p;
  p.state = std::move(state);
  p.num_states = m;
  p.restarts = restarts;
  p.max_iters = max_iters;
  p.master_seed = seed;
  const SearchResult res = minimize_f(p);
  ScanRecord rec;
  rec.scenario = scenario;
  rec.sample_id = sample_id;
  rec.seed = seed;
  rec.params = std::move(params);
  rec.best_f = res.best_f;
  rec.converged = res.converged;
  rec.restarts = restarts;
  rec.iterations = res.iterations;
  rec.wall_ms = res.wall_ms;
  return rec;
}

}  // namespace

std::vector<ScanRecord> scan_two_qutrit(int samples, int restarts, std::uint64_t master_seed,
                                        int threads, int max_iters, const ScanCallback& on_record) {
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  auto make = [&](int i) {
    const std::uint64_t seed = derive_seed(master_seed, i);
    auto rng = make_rng(splitmix64(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Vector3d lambda;
    for (int l = 0; l < 3; ++l) lambda(l) = std::abs(gauss(rng));
    lambda /= lambda.norm();
    VectorXcd amps = VectorXcd::Zero(9);
    for (int l = 0; l < 3; ++l) amps(l * 3 + l) = lambda(l);
    return minimize_for_sample("two-qutrit", i, seed, PureState{2, 3, std::move(amps)}, 9, restarts,
                               max_iters,
                               {{"lambda1", lambda(0)}, {"lambda2", lambda(1)}, {"lambda3", lambda(2)}});
  };
  return run_scan(samples, threads, make, on_record);
}

std::vector<ScanRecord> scan_three_qubit(int samples, int restarts, std::uint64_t master_seed,
                                         int threads, int max_iters, const ScanCallback& on_record) {
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  auto make = [&](int i) {
    const std::uint64_t seed = derive_seed(master_seed, i);
    auto rng = make_rng(splitmix64(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Complex a(gauss(rng), gauss(rng));
    double b = gauss(rng), c = gauss(rng), d = gauss(rng), e = gauss(rng);
    const double norm = std::sqrt(std::norm(a) + b * b + c * c + d * d + e * e);
    const Complex an = a / norm;
    b /= norm;
    c /= norm;
    d /= norm;
    e /= norm;
    return minimize_for_sample("three-qubit", i, seed, canonical_three_qubit(an, b, c, d, e), 8,
                               restarts, max_iters,
                               {{"a_re", an.real()},
                                {"a_im", an.imag()},
                                {"b", b},
                                {"c", c},
                                {"d", d},
                                {"e", e}});
  };
  return run_scan(samples, threads, make, on_record);
}

std::vector<ScanRecord> scan_four_qubit_partial(int m_min, int m_max, int restarts,
                                                std::uint64_t master_seed, int threads,
                                                int max_iters, const ScanCallback& on_record) {
  if (m_min < 2 || m_max > 16 || m_min > m_max)
    throw std::invalid_argument("m range must lie within [2, 16]");
  auto make = [&](int i) {
    const int m = m_min + i;
    const std::uint64_t seed = derive_seed(master_seed, m);
    return minimize_for_sample("four-qubit-partial", m, seed, hard_four_qubit_state(), m, restarts,
                               max_iters, {{"m", static_cast<double>(m)}});
  };
  return run_scan(m_max - m_min + 1, threads, make, on_record);
}

}  // namespace isoent
