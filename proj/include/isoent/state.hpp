#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace isoent {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// A single-subsystem unitary is just a dense complex matrix; unitarity is an
// invariant maintained by the constructors, not a wrapper type.
using LocalUnitary = MatrixXcd;

/// Normalized pure state of n subsystems, each of local dimension d.
///
/// Index convention: the computational label (l_1, ..., l_n) maps to
///   index = sum_k l_k * d^(n-k)
/// i.e. the first subsystem is the most significant digit, matching the
/// left-to-right reading of |l_1 l_2 ... l_n>.
struct PureState {
  int n = 0;
  int d = 0;
  VectorXcd amps;

  Eigen::Index dim() const { return amps.size(); }
};

/// Ordered string of local unitaries, one d x d factor per subsystem.
/// The induced global operator is the Kronecker product of the factors.
struct LocalUnitaryString {
  std::vector<MatrixXcd> factors;

  int n() const { return static_cast<int>(factors.size()); }
  int d() const { return factors.empty() ? 0 : static_cast<int>(factors.front().rows()); }
};

/// A state together with m unitary strings, the derived states V_j |psi>,
/// their Gram matrix and the orthonormality defect f.
struct CandidateBasis {
  PureState state;
  std::vector<LocalUnitaryString> strings;
  std::vector<PureState> derived;
  MatrixXcd gram;
  double f_value = 0.0;
};

/// Bipartite Schmidt normal form: (rot_a (x) rot_b)|psi> = sum_l coeffs[l] |l,l>,
/// with coeffs nonnegative and sorted descending.
struct SchmidtForm {
  VectorXd coeffs;
  MatrixXcd rot_a;
  MatrixXcd rot_b;
};

struct GramAndF {
  MatrixXcd gram;
  double f = 0.0;
};

struct HemispherePartition {
  std::vector<int> set_a;  // first nonzero Bloch coordinate (z, x, y order) positive
  std::vector<int> set_b;
};

// d^n with an overflow/size guard.
Eigen::Index global_dim(int n, int d);

/// Builds a PureState from raw amplitudes. Inputs whose norm deviates from 1
/// by less than 1e-6 are silently renormalized; larger deviations are
/// rejected as malformed.
PureState make_state(int n, int d, VectorXcd amps);

/// |l_1 ... l_n> for a flat index under the convention above.
PureState computational_state(int n, int d, Eigen::Index index);

/// Applies U to one tensor leg in place. `subsystem` is 0-based, counting
/// from the most significant leg.
void apply_factor_in_place(VectorXcd& amps, const MatrixXcd& u, int subsystem, int n, int d);

/// (U_1 (x) ... (x) U_n)|psi>, applied factor by factor without forming the
/// d^n x d^n global matrix. Preserves the norm to ~1e-12.
PureState apply_local_string(const LocalUnitaryString& v, const PureState& psi);

/// <phi|psi>, conjugating phi.
Complex inner_product(const PureState& phi, const PureState& psi);

/// Gram matrix G[j][j'] = <psi_j|psi_j'> and f = sum_{j != j'} |G[j][j']|^2.
/// f vanishes exactly when the states are pairwise orthogonal.
GramAndF gram_and_f(const std::vector<PureState>& states);

/// SVD-based Schmidt decomposition of a bipartite state. Degenerate singular
/// values are stabilized by lexicographic comparison of the corresponding
/// left singular vectors so the output is deterministic.
SchmidtForm schmidt_decompose(const PureState& psi);

/// Gaussian amplitudes (real and imaginary unless real_only), normalized.
/// Rotation invariant, hence uniform on the state sphere. Deterministic per seed.
PureState random_state(int n, int d, std::uint64_t seed, bool real_only = false);

/// Three-qubit state a|000> + b|011> + c|101> + d|110> + e|111>.
/// Rejects coefficient vectors whose quadrature sum deviates from 1 by more
/// than 1e-10.
PureState canonical_three_qubit(Complex a, double b, double c, double d, double e);

/// Bloch vector (x, y, z) of a single-qubit state.
Eigen::Vector3d bloch_vector(const PureState& qubit);

/// Splits single-qubit states by the sign of their first nonzero Bloch
/// coordinate, checked in the order (z, x, y). Orthogonal (antipodal) pairs
/// always land in different sets.
HemispherePartition hemisphere_partition(const std::vector<PureState>& qubit_states);

/// Derives states, Gram matrix and f for a state plus strings.
CandidateBasis make_candidate_basis(PureState state, std::vector<LocalUnitaryString> strings);

double unitarity_residual(const Eigen::Ref<const MatrixXcd>& u);
bool is_unitary(const Eigen::Ref<const MatrixXcd>& u, double tol = 1e-10);

/// Kronecker product helpers (dense; intended for small n).
MatrixXcd kron(const Eigen::Ref<const MatrixXcd>& a, const Eigen::Ref<const MatrixXcd>& b);
MatrixXcd global_matrix(const LocalUnitaryString& v);

}  // namespace isoent
