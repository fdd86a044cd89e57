#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "isoent/state.hpp"

namespace isoent {

/// Minimization of f over strings of local unitaries for a fixed state.
struct SearchProblem {
  PureState state;
  int num_states = 2;             // m, between 2 and d^n
  bool fix_first_identity = true; // gauge choice V_1 = I
  double tol = 1e-6;              // convergence target on f
  int restarts = 10;
  int max_iters = 3000;           // per restart
  std::uint64_t master_seed = 0;
  int threads = 1;                // restarts run in parallel when > 1
  bool stop_on_converged = true;  // skip restarts after the first converged index
  // Optional warm start used by restart 0. Must hold num_states strings;
  // with fix_first_identity the first entry is ignored (assumed identity).
  std::vector<LocalUnitaryString> init_strings;
};

struct SearchResult {
  double best_f = 0.0;
  std::vector<LocalUnitaryString> best_strings;
  std::vector<VectorXd> best_theta;  // chart coordinates of the free strings
  int restart_index = -1;
  int iterations = 0;  // iterations spent in the winning restart
  bool converged = false;
  long long wall_ms = 0;
};

/// Multistart quasi-Newton descent over the concatenated chart coordinates of
/// all free strings. Restart r draws its start from a seed derived from
/// (master_seed, r), so the outcome does not depend on execution order and
/// parallel runs reproduce sequential ones.
SearchResult minimize_f(const SearchProblem& problem);

struct ParamCount {
  long long free_params = 0;
  long long constraints = 0;
  bool feasible_by_count = false;  // free_params >= constraints
};

/// Qubit counting argument: m strings carry 3n(m-1) free parameters against
/// m^2 - m real orthogonality constraints. A full basis is m = 2^n.
ParamCount parameter_count(int n, int m);
ParamCount parameter_count_full(int n);

/// (2/sqrt(6)) W_4 + (sqrt(2)/sqrt(6)) GHZ_{4,2}; the standard hard probe
/// instance for which no full basis has been found numerically.
PureState hard_four_qubit_state();

/// Runs minimize_f for m states of the hard four-qubit instance.
SearchResult probe_four_qubit(int restarts, std::uint64_t master_seed, int m,
                              int max_iters = 20000, int threads = 1);

/// One persisted row of a scan campaign.
struct ScanRecord {
  std::string scenario;
  int sample_id = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> params;
  double best_f = 0.0;
  bool converged = false;
  int restarts = 0;
  int iterations = 0;
  long long wall_ms = 0;
};

/// Invoked in sample order as results become available.
using ScanCallback = std::function<void(const ScanRecord&)>;

/// Random Schmidt triples (quadrature-normalized positive Gaussians) for
/// two qutrits, full-basis search with m = 9.
std::vector<ScanRecord> scan_two_qutrit(int samples, int restarts, std::uint64_t master_seed,
                                        int threads = 1, int max_iters = 10000,
                                        const ScanCallback& on_record = {});

/// Random canonical coefficients (complex a, real b..e, Gaussian, normalized)
/// for three qubits, full-basis search with m = 8.
std::vector<ScanRecord> scan_three_qubit(int samples, int restarts, std::uint64_t master_seed,
                                         int threads = 1, int max_iters = 10000,
                                         const ScanCallback& on_record = {});

/// Partial bases m = m_min..m_max on the hard four-qubit state.
std::vector<ScanRecord> scan_four_qubit_partial(int m_min, int m_max, int restarts,
                                                std::uint64_t master_seed, int threads = 1,
                                                int max_iters = 20000,
                                                const ScanCallback& on_record = {});

}  // namespace isoent
