#include "isoent/constructions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "isoent/state_independent.hpp"

namespace isoent {

namespace {

MatrixXcd matrix_power(const MatrixXcd& m, int p) {
  MatrixXcd out = MatrixXcd::Identity(m.rows(), m.cols());
  for (int i = 0; i < p; ++i) out = m * out;
  return out;
}

// d-dimensional unitaries assembled from 2x2 labels under the big-endian
// qubit-string encoding of the levels.
MatrixXcd labels_to_matrix(const PauliString& s) {
  MatrixXcd out = pauli_label_matrix(s.labels.front());
  for (int k = 1; k < s.n(); ++k) out = kron(out, pauli_label_matrix(s.labels[k]));
  return out;
}

PauliString strip_z(PauliString s) {
  for (auto& l : s.labels) l.z = false;
  return s;
}

}  // namespace

MatrixXcd pauli_i2() { return MatrixXcd::Identity(2, 2); }

MatrixXcd pauli_x2() {
  MatrixXcd x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

MatrixXcd pauli_z2() {
  MatrixXcd z(2, 2);
  z << 1, 0, 0, -1;
  return z;
}

MatrixXcd pauli_xz2() {
  MatrixXcd xz(2, 2);
  xz << 0, -1, 1, 0;
  return xz;
}

std::pair<MatrixXcd, MatrixXcd> generalized_pauli(int d) {
  if (d < 2) throw std::invalid_argument("dimension must be at least 2");
  MatrixXcd x = MatrixXcd::Zero(d, d);
  MatrixXcd z = MatrixXcd::Zero(d, d);
  for (int l = 0; l < d; ++l) {
    x((l + 1) % d, l) = 1.0;
    const double phase = 2.0 * std::numbers::pi * l / d;
    z(l, l) = Complex(std::cos(phase), std::sin(phase));
  }
  return {std::move(x), std::move(z)};
}

PureState ghz_state(int n, int d) {
  if (n < 2) throw std::invalid_argument("GHZ needs at least two subsystems");
  const Eigen::Index dim = global_dim(n, d);
  Eigen::Index rep = 0;  // index of |k...k> per unit of k
  for (Eigen::Index p = 1; p <= dim / d; p *= d) rep += p;
  VectorXcd amps = VectorXcd::Zero(dim);
  for (int k = 0; k < d; ++k) amps(k * rep) = 1.0 / std::sqrt(double(d));
  return PureState{n, d, std::move(amps)};
}

std::vector<LocalUnitaryString> ghz_basis_strings(int n, int d) {
  if (n < 2) throw std::invalid_argument("GHZ needs at least two subsystems");
  auto [x, z] = generalized_pauli(d);
  std::vector<MatrixXcd> xp(d), zp(d);
  for (int p = 0; p < d; ++p) {
    xp[p] = matrix_power(x, p);
    zp[p] = matrix_power(z, p);
  }
  const Eigen::Index count = global_dim(n, d);
  std::vector<LocalUnitaryString> strings;
  strings.reserve(count);
  for (Eigen::Index j = 0; j < count; ++j) {
    std::vector<int> digits(n);
    Eigen::Index rest = j;
    for (int k = n - 1; k >= 0; --k) {
      digits[k] = static_cast<int>(rest % d);
      rest /= d;
    }
    LocalUnitaryString s;
    s.factors.reserve(n);
    s.factors.push_back(zp[digits[0]]);
    for (int k = 1; k < n; ++k) s.factors.push_back(xp[digits[k]]);
    strings.push_back(std::move(s));
  }
  return strings;
}

std::vector<LocalUnitaryString> two_qubit_schmidt_strings() {
  std::vector<LocalUnitaryString> out;
  out.push_back({{pauli_i2(), pauli_i2()}});
  out.push_back({{pauli_i2(), pauli_xz2()}});
  out.push_back({{pauli_xz2(), pauli_z2()}});
  out.push_back({{pauli_xz2(), pauli_x2()}});
  return out;
}

std::vector<LocalUnitaryString> bipartite_pow2_strings(int d) {
  int qubits = 0;
  if (d == 4)
    qubits = 2;
  else if (d == 8)
    qubits = 3;
  else
    throw std::invalid_argument("supported local dimensions are 4 and 8");

  const auto si = si_pauli_strings(qubits);
  std::vector<MatrixXcd> u2(d), u1_base(d);
  for (int j = 0; j < d; ++j) {
    u2[j] = labels_to_matrix(si[j]);
    u1_base[j] = labels_to_matrix(strip_z(si[j]));
  }
  const MatrixXcd shift = generalized_pauli(d).first;

  std::vector<LocalUnitaryString> strings;
  strings.reserve(static_cast<std::size_t>(d) * d);
  MatrixXcd shift_pow = MatrixXcd::Identity(d, d);
  for (int jt = 0; jt < d; ++jt) {
    for (int j = 0; j < d; ++j) strings.push_back({{shift_pow * u1_base[j], u2[j]}});
    shift_pow = shift * shift_pow;
  }
  return strings;
}

CandidateBasis schmidt_basis_for(const PureState& psi) {
  if (psi.n != 2) throw std::invalid_argument("bipartite states only");
  if (psi.d != 2 && psi.d != 4 && psi.d != 8)
    throw std::invalid_argument("supported local dimensions are 2, 4 and 8");
  const SchmidtForm sf = schmidt_decompose(psi);
  const auto fixed = psi.d == 2 ? two_qubit_schmidt_strings() : bipartite_pow2_strings(psi.d);
  const MatrixXcd rot_a_dag = sf.rot_a.adjoint();
  const MatrixXcd rot_b_dag = sf.rot_b.adjoint();
  std::vector<LocalUnitaryString> strings;
  strings.reserve(fixed.size());
  for (const auto& s : fixed)
    strings.push_back({{rot_a_dag * s.factors[0] * sf.rot_a, rot_b_dag * s.factors[1] * sf.rot_b}});
  return make_candidate_basis(psi, std::move(strings));
}

PureState w_state(int n) {
  if (n < 1) throw std::invalid_argument("need at least one qubit");
  const Eigen::Index dim = global_dim(n, 2);
  VectorXcd amps = VectorXcd::Zero(dim);
  for (int k = 0; k < n; ++k) amps(Eigen::Index{1} << k) = 1.0 / std::sqrt(double(n));
  return PureState{n, 2, std::move(amps)};
}

std::vector<LocalUnitaryString> w_basis_strings(int n) {
  if (n < 1) throw std::invalid_argument("need at least one qubit");
  const MatrixXcd z = pauli_z2();
  std::vector<LocalUnitaryString> cur;
  cur.push_back({{pauli_i2()}});
  cur.push_back({{pauli_x2()}});
  for (int k = 2; k <= n; ++k) {
    std::vector<LocalUnitaryString> next;
    next.reserve(cur.size() * 2);
    for (const auto& s : cur) {
      LocalUnitaryString ext = s;
      ext.factors.push_back(pauli_i2());
      next.push_back(std::move(ext));
    }
    for (const auto& s : cur) {
      LocalUnitaryString ext;
      ext.factors.reserve(s.factors.size() + 1);
      for (const auto& factor : s.factors) ext.factors.push_back(factor * z);
      ext.factors.push_back(pauli_x2());
      next.push_back(std::move(ext));
    }
    cur = std::move(next);
  }
  return cur;
}

std::vector<LocalUnitaryString> state_independent_strings(int n) {
  if (n != 2 && n != 3) throw std::invalid_argument("state-independent sets exist for n = 2 and 3 only");
  std::vector<LocalUnitaryString> out;
  for (const auto& s : si_pauli_strings(n)) out.push_back(pauli_string_unitaries(s));
  return out;
}

std::optional<Family> family_from_tag(std::string_view tag) {
  std::string t(tag);
  for (auto& c : t)
    if (c == '_') c = '-';
  if (t == "bell") return Family::bell;
  if (t == "ghz") return Family::ghz;
  if (t == "two-qubit-schmidt") return Family::two_qubit_schmidt;
  if (t == "bipartite-pow2") return Family::bipartite_pow2;
  if (t == "w" || t == "w-state") return Family::w;
  if (t == "two-qubit-si") return Family::two_qubit_si;
  if (t == "three-qubit-si") return Family::three_qubit_si;
  return std::nullopt;
}

std::string family_tag(Family f) {
  switch (f) {
    case Family::bell: return "bell";
    case Family::ghz: return "ghz";
    case Family::two_qubit_schmidt: return "two-qubit-schmidt";
    case Family::bipartite_pow2: return "bipartite-pow2";
    case Family::w: return "w";
    case Family::two_qubit_si: return "two-qubit-si";
    case Family::three_qubit_si: return "three-qubit-si";
  }
  return "unknown";
}

}  // namespace isoent
