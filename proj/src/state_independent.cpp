#include "isoent/state_independent.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "isoent/constructions.hpp"
#include "isoent/seeding.hpp"

namespace isoent {

std::string pauli_label_name(PauliLabel l) {
  if (l.x && l.z) return "XZ";
  if (l.x) return "X";
  if (l.z) return "Z";
  return "I";
}

MatrixXcd pauli_label_matrix(PauliLabel l) {
  if (l.x && l.z) return pauli_xz2();
  if (l.x) return pauli_x2();
  if (l.z) return pauli_z2();
  return pauli_i2();
}

LocalUnitaryString pauli_string_unitaries(const PauliString& s) {
  LocalUnitaryString out;
  out.factors.reserve(s.labels.size());
  for (const auto& l : s.labels) out.factors.push_back(pauli_label_matrix(l));
  return out;
}

bool pauli_pair_skew(const PauliString& s, const PauliString& t) {
  if (s.n() != t.n()) throw std::invalid_argument("string lengths differ");
  int parity = 0;
  for (int k = 0; k < s.n(); ++k)
    parity ^= static_cast<int>((s.labels[k].x != t.labels[k].x) && (s.labels[k].z != t.labels[k].z));
  return parity == 1;
}

bool is_skew_symmetric(const Eigen::Ref<const MatrixXcd>& m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  return (m + m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool orthogonalizes_real_states(const Eigen::Ref<const MatrixXcd>& u, int samples, std::uint64_t seed) {
  constexpr double kTol = 1e-10;
  const Eigen::Index d = u.rows();
  if (d != u.cols()) throw std::invalid_argument("matrix is not square");
  // Deterministic candidates from the converse construction: |k> exposes a
  // nonzero diagonal, (|i>+|j>)/sqrt(2) exposes U_ij + U_ji.
  for (Eigen::Index k = 0; k < d; ++k)
    if (std::abs(u(k, k)) > kTol) return false;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j)
      if (0.5 * std::abs(u(i, i) + u(j, j) + u(i, j) + u(j, i)) > kTol) return false;
  for (int s = 0; s < samples; ++s) {
    const PureState psi = random_state(1, static_cast<int>(d), derive_seed(seed, s), true);
    const Complex val = psi.amps.dot(u * psi.amps);
    if (std::abs(val) > kTol) return false;
  }
  return true;
}

bool verify_si_construction(const std::vector<LocalUnitaryString>& strings, double tol) {
  if (strings.size() < 2) throw std::invalid_argument("need at least two strings");
  const int n = strings.front().n(), d = strings.front().d();
  std::vector<MatrixXcd> globals;
  globals.reserve(strings.size());
  for (const auto& s : strings) {
    if (s.n() != n || s.d() != d) throw std::invalid_argument("string shapes differ");
    globals.push_back(global_matrix(s));
  }
  for (std::size_t j = 0; j < globals.size(); ++j)
    for (std::size_t j2 = j + 1; j2 < globals.size(); ++j2)
      if (!is_skew_symmetric(globals[j].adjoint() * globals[j2], tol)) return false;
  return true;
}

bool verify_si_construction(const std::vector<PauliString>& strings) {
  if (strings.size() < 2) throw std::invalid_argument("need at least two strings");
  bool rule = true;
  for (std::size_t j = 0; j < strings.size() && rule; ++j)
    for (std::size_t j2 = j + 1; j2 < strings.size() && rule; ++j2)
      rule = pauli_pair_skew(strings[j], strings[j2]);
  std::vector<LocalUnitaryString> dense;
  dense.reserve(strings.size());
  for (const auto& s : strings) dense.push_back(pauli_string_unitaries(s));
  if (rule != verify_si_construction(dense))
    throw std::logic_error("GF(2) parity rule disagrees with the dense matrix check");
  return rule;
}

namespace {

PauliString bits_to_string(int n, unsigned x, unsigned z) {
  PauliString s;
  s.labels.resize(n);
  for (int k = 0; k < n; ++k) {
    const int bit = n - 1 - k;  // first register is the most significant bit
    s.labels[k] = PauliLabel{((x >> bit) & 1u) != 0, ((z >> bit) & 1u) != 0};
  }
  return s;
}

}  // namespace

std::vector<PauliString> si_pauli_strings(int n) {
  // (x, z) bit patterns per string, most significant bit = first register.
  static constexpr unsigned kTwo[4][2] = {{0b00, 0b00}, {0b01, 0b01}, {0b10, 0b11}, {0b11, 0b10}};
  static constexpr unsigned kThree[8][2] = {{0b000, 0b000}, {0b001, 0b111}, {0b010, 0b110},
                                            {0b100, 0b100}, {0b011, 0b101}, {0b101, 0b001},
                                            {0b110, 0b011}, {0b111, 0b010}};
  std::vector<PauliString> out;
  if (n == 2) {
    for (const auto& row : kTwo) out.push_back(bits_to_string(2, row[0], row[1]));
  } else if (n == 3) {
    for (const auto& row : kThree) out.push_back(bits_to_string(3, row[0], row[1]));
  } else {
    throw std::invalid_argument("state-independent sets exist for n = 2 and 3 only");
  }
  return out;
}

SIEnumeration enumerate_si_pauli(int n) {
  if (n < 1) throw std::invalid_argument("need at least one qubit");
  if (n > 4)
    throw std::invalid_argument(
        "n >= 5 is not enumerated: the four-qubit impossibility lifts inductively to all larger "
        "qubit counts");
  const unsigned count = 1u << n;
  SIEnumeration out;
  out.n = n;
  std::vector<unsigned> zbits(count, 0);  // slot t has x-pattern t

  // Depth-first assignment of z-bits; every new string must have odd
  // XZ-parity product against all previously placed strings.
  auto place = [&](auto&& self, unsigned t) -> void {
    if (t == count) {
      std::vector<PauliString> solution;
      solution.reserve(count);
      for (unsigned s = 0; s < count; ++s) solution.push_back(bits_to_string(n, s, zbits[s]));
      out.solutions.push_back(std::move(solution));
      return;
    }
    for (unsigned z = 0; z < count; ++z) {
      bool ok = true;
      for (unsigned s = 0; s < t && ok; ++s)
        ok = (std::popcount((s ^ t) & (zbits[s] ^ z)) % 2) == 1;
      if (!ok) continue;
      ++out.nodes_explored;
      zbits[t] = z;
      self(self, t + 1);
    }
  };
  place(place, 1);
  out.exhausted = true;
  return out;
}

namespace {

// Symbolic skew-parity equations for the six four-qubit strings with zero,
// one and four bit-flips. Variables are the Z-insertion bits r_{i,j} of
// strings V_2..V_6, indexed (i * 4 + j) for row i = 0..4 and register j.
struct SymbolicString {
  unsigned x = 0;
  int z_row = -1;  // -1 means all z bits fixed to zero (the identity string)
};

Gf2SystemReport build_four_qubit_system(bool include_all_flip_row) {
  std::vector<SymbolicString> strings;
  strings.push_back({0b0000, -1});
  for (int i = 0; i < 4; ++i) strings.push_back({1u << (3 - i), i});
  if (include_all_flip_row) strings.push_back({0b1111, 4});

  Gf2SystemReport report;
  report.num_vars = include_all_flip_row ? 20 : 16;
  for (std::size_t a = 0; a < strings.size(); ++a) {
    for (std::size_t b = a + 1; b < strings.size(); ++b) {
      const unsigned mask = strings[a].x ^ strings[b].x;
      Gf2Equation eq;
      eq.rhs = 1;
      for (int j = 0; j < 4; ++j) {
        if (!((mask >> (3 - j)) & 1u)) continue;
        if (strings[a].z_row >= 0) eq.vars.push_back(strings[a].z_row * 4 + j);
        if (strings[b].z_row >= 0) eq.vars.push_back(strings[b].z_row * 4 + j);
      }
      report.equations.push_back(std::move(eq));
    }
  }

  // Gaussian elimination over GF(2); rows as bit masks with the rhs appended.
  std::vector<std::uint64_t> rows;
  for (const auto& eq : report.equations) {
    std::uint64_t row = 0;
    for (int v : eq.vars) row ^= (std::uint64_t{1} << v);
    row |= (static_cast<std::uint64_t>(eq.rhs & 1) << report.num_vars);
    rows.push_back(row);
  }
  const int cols = report.num_vars;
  int rank = 0;
  std::vector<int> pivot_col;
  for (int c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    int pivot = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if ((rows[r] >> c) & 1u) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(rows[rank], rows[pivot]);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
      if (r != rank && ((rows[r] >> c) & 1u)) rows[r] ^= rows[rank];
    pivot_col.push_back(c);
    ++rank;
  }
  report.rank = rank;
  bool contradiction = false;
  for (int r = rank; r < static_cast<int>(rows.size()); ++r)
    if (rows[r] != 0) contradiction = true;  // remaining rows are 0 = 1
  report.rank_augmented = rank + (contradiction ? 1 : 0);
  report.consistent = !contradiction;

  if (report.consistent) {
    std::vector<int> sol(report.num_vars, 0);
    for (int r = 0; r < rank; ++r) sol[pivot_col[r]] = static_cast<int>((rows[r] >> cols) & 1u);
    for (const auto& eq : report.equations) {
      int acc = 0;
      for (int v : eq.vars) acc ^= sol[v];
      if (acc != (eq.rhs & 1)) throw std::logic_error("GF(2) witness fails an equation");
    }
    report.witness_solution = std::move(sol);
  }
  return report;
}

}  // namespace

Gf2SystemReport four_qubit_parity_certificate() { return build_four_qubit_system(true); }

Gf2SystemReport four_qubit_parity_certificate_reduced() { return build_four_qubit_system(false); }

std::pair<PureState, double> eigenvector_witness(const LocalUnitaryString& v) {
  if (v.factors.empty()) throw std::invalid_argument("empty unitary string");
  const int n = v.n(), d = v.d();
  VectorXcd w = VectorXcd::Ones(1);
  for (const auto& factor : v.factors) {
    Eigen::ComplexEigenSolver<MatrixXcd> es(factor);
    VectorXcd mu = es.eigenvectors().col(0);
    mu /= mu.norm();
    VectorXcd next(w.size() * d);
    for (Eigen::Index i = 0; i < w.size(); ++i) next.segment(i * d, d) = w(i) * mu;
    w = std::move(next);
  }
  PureState witness{n, d, std::move(w)};
  const double overlap = std::abs(inner_product(witness, apply_local_string(v, witness)));
  return {std::move(witness), overlap};
}

OddDimReport odd_dim_obstruction(int d, int trials, std::uint64_t seed) {
  if (d < 1 || d % 2 == 0)
    throw std::invalid_argument(
        "dimension must be odd: skew-symmetric unitaries exist in even dimensions (XZ for d = 2)");
  OddDimReport report;
  report.d = d;
  report.trials = trials;
  report.parity_forces_zero = true;  // det(A) = det(-A^T) = (-1)^d det(A) = -det(A)
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sign = (d % 2 == 0) ? 1.0 : -1.0;
  for (int t = 0; t < trials; ++t) {
    MatrixXcd g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    const MatrixXcd a = g - g.transpose();
    const Complex det = a.determinant();
    report.max_abs_det = std::max(report.max_abs_det, std::abs(det));
    const Complex det_neg = MatrixXcd(-a).determinant();
    report.max_identity_residual =
        std::max(report.max_identity_residual, std::abs(det_neg - sign * det));
  }
  return report;
}

double si_verify_on_random_real_states(const std::vector<LocalUnitaryString>& strings, int samples,
                                       std::uint64_t seed) {
  if (strings.empty()) throw std::invalid_argument("need at least one string");
  const int n = strings.front().n(), d = strings.front().d();
  for (const auto& s : strings)
    if (s.n() != n || s.d() != d) throw std::invalid_argument("string shapes differ");
  double max_f = 0.0;
  for (int i = 0; i < samples; ++i) {
    const PureState psi = random_state(n, d, derive_seed(seed, i), true);
    std::vector<PureState> derived;
    derived.reserve(strings.size());
    for (const auto& s : strings) derived.push_back(apply_local_string(s, psi));
    max_f = std::max(max_f, gram_and_f(derived).f);
  }
  return max_f;
}

}  // namespace isoent
