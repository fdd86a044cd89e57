#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isoent/state.hpp"

namespace isoent {

/// One register label from {I, X, Z, XZ}, encoded as (x, z) bits over GF(2):
/// I=(0,0), X=(1,0), Z=(0,1), XZ=(1,1). XZ is the only skew-symmetric label.
struct PauliLabel {
  bool x = false;
  bool z = false;

  bool skew() const { return x && z; }
  bool operator==(const PauliLabel&) const = default;
};

/// Per-register labels of a Pauli-type unitary string.
struct PauliString {
  std::vector<PauliLabel> labels;

  int n() const { return static_cast<int>(labels.size()); }
  bool operator==(const PauliString&) const = default;
};

std::string pauli_label_name(PauliLabel l);
MatrixXcd pauli_label_matrix(PauliLabel l);
LocalUnitaryString pauli_string_unitaries(const PauliString& s);

/// GF(2) parity rule: the product (V_s)^dagger V_t of two Pauli-type strings
/// is skew-symmetric iff sum_k (x_k xor x'_k) * (z_k xor z'_k) is odd.
bool pauli_pair_skew(const PauliString& s, const PauliString& t);

/// M == -M^T (plain transpose, no conjugation) within tol, entrywise.
bool is_skew_symmetric(const Eigen::Ref<const MatrixXcd>& m, double tol = 1e-10);

/// Checks whether |<psi|U|psi>| <= 1e-10 holds for random real states, after
/// first probing the deterministic counterexample candidates |k> and
/// (|i>+|j>)/sqrt(2). Returns true exactly when U maps every real state to
/// an orthogonal one, i.e. when U is skew-symmetric.
bool orthogonalizes_real_states(const Eigen::Ref<const MatrixXcd>& u, int samples, std::uint64_t seed);

/// True iff every pairwise product (V_j)^dagger V_j' is skew-symmetric,
/// checked on the dense global matrices.
bool verify_si_construction(const std::vector<LocalUnitaryString>& strings, double tol = 1e-10);

/// Pauli-string overload: evaluates the GF(2) parity rule and cross-checks it
/// against the dense matrix test. A disagreement would be a logic error.
bool verify_si_construction(const std::vector<PauliString>& strings);

/// The fixed state-independent label sets for n = 2 and n = 3 real qubits,
/// in x-pattern order.
std::vector<PauliString> si_pauli_strings(int n);

struct SIEnumeration {
  int n = 0;
  std::vector<std::vector<PauliString>> solutions;
  long long nodes_explored = 0;
  bool exhausted = false;
};

/// Exhaustive backtracking over z-bits with V_1 = I and the 2^n X-patterns
/// assigned in canonical sorted order. Supported for 1 <= n <= 4; n >= 5 is
/// refused since the four-qubit impossibility lifts inductively to all
/// larger qubit counts.
SIEnumeration enumerate_si_pauli(int n);

struct Gf2Equation {
  std::vector<int> vars;  // variable indices appearing with coefficient 1
  int rhs = 0;
};

struct Gf2SystemReport {
  int num_vars = 0;
  std::vector<Gf2Equation> equations;
  int rank = 0;
  int rank_augmented = 0;
  bool consistent = false;
  std::optional<std::vector<int>> witness_solution;  // one solution when consistent
};

/// Machine-checked GF(2) certificate for the four-qubit case: the
/// skew-symmetry conditions on the six strings containing zero, one and four
/// bit-flips form an inconsistent linear system over the Z-insertion bits.
Gf2SystemReport four_qubit_parity_certificate();

/// Same system with the all-bit-flip string removed; this subproblem is
/// consistent and the report carries a verified witness solution.
Gf2SystemReport four_qubit_parity_certificate_reduced();

/// Product state of one eigenvector per factor, plus |<w|V|w>| for it.
/// The overlap is always 1: a string of local unitaries cannot move such a
/// state anywhere but onto a global phase of itself.
std::pair<PureState, double> eigenvector_witness(const LocalUnitaryString& v);

struct OddDimReport {
  int d = 0;
  int trials = 0;
  double max_abs_det = 0.0;       // over random complex skew-symmetric matrices
  double max_identity_residual = 0.0;  // |det(-A) - (-1)^d det(A)| over trials
  bool parity_forces_zero = false;     // det = -det in odd dimension
};

/// Determinant obstruction: no skew-symmetric unitary exists in odd
/// dimension. Rejects even d (XZ is a 2x2 counterexample).
OddDimReport odd_dim_obstruction(int d, int trials, std::uint64_t seed);

/// Max of f over `samples` random real states mapped through the strings.
double si_verify_on_random_real_states(const std::vector<LocalUnitaryString>& strings, int samples,
                                       std::uint64_t seed);

}  // namespace isoent
