#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isoent/state.hpp"

namespace isoent {

// Fixed 2x2 gates. XZ is the matrix product X*Z = [[0,-1],[1,0]].
MatrixXcd pauli_i2();
MatrixXcd pauli_x2();
MatrixXcd pauli_z2();
MatrixXcd pauli_xz2();

/// Shift and clock operators: X_d|l> = |l+1 mod d>, Z_d|l> = e^{2 pi i l / d}|l>.
std::pair<MatrixXcd, MatrixXcd> generalized_pauli(int d);

/// (1/sqrt(d)) sum_k |k>^(x)n.
PureState ghz_state(int n, int d);

/// The d^n strings V_j = Z_d^{j_1} (x) X_d^{j_2} (x) ... (x) X_d^{j_n},
/// j = j_1...j_n in {0,...,d-1}^n; they map the GHZ state to a basis.
std::vector<LocalUnitaryString> ghz_basis_strings(int n, int d);

/// The fixed four-string set {I(x)I, I(x)XZ, XZ(x)Z, XZ(x)X}. Maps any
/// two-qubit state in Schmidt form (any real amplitudes, in fact) to a basis,
/// independently of the Schmidt coefficient.
std::vector<LocalUnitaryString> two_qubit_schmidt_strings();

/// The d^2 strings for bipartite local dimension d in {4, 8}, built from the
/// two- resp. three-qubit state-independent set on system 2, its Z-stripped
/// version on system 1, and the d-dimensional shift X_d^jt on system 1.
/// Levels are encoded as qubit strings |l> = |l_1...l_m>, big-endian.
std::vector<LocalUnitaryString> bipartite_pow2_strings(int d);

/// Basis for an arbitrary bipartite state with d in {2, 4, 8}: the Schmidt
/// rotations are folded into the fixed strings, so every basis element is a
/// local-unitary transform of psi itself.
CandidateBasis schmidt_basis_for(const PureState& psi);

/// (1/sqrt(n)) sum over positions of the single excitation.
PureState w_state(int n);

/// Recursive W basis strings: the first 2^n strings extend the n-qubit set by
/// (x) I; the second half right-multiplies every factor by Z and appends X.
/// Base case n = 1: {I, X}.
std::vector<LocalUnitaryString> w_basis_strings(int n);

/// The fixed state-independent sets for real states of n = 2 or 3 qubits.
/// All pairwise products (V_j)^dagger V_j' are skew-symmetric.
std::vector<LocalUnitaryString> state_independent_strings(int n);

enum class Family {
  bell,
  ghz,
  two_qubit_schmidt,
  bipartite_pow2,
  w,
  two_qubit_si,
  three_qubit_si,
};

std::optional<Family> family_from_tag(std::string_view tag);
std::string family_tag(Family f);

}  // namespace isoent
