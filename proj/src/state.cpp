#include "isoent/state.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "isoent/seeding.hpp"

namespace isoent {

Eigen::Index global_dim(int n, int d) {
  if (n < 1) throw std::invalid_argument("subsystem count must be positive");
  if (d < 2) throw std::invalid_argument("local dimension must be at least 2");
  Eigen::Index dim = 1;
  for (int i = 0; i < n; ++i) {
    if (dim > (Eigen::Index{1} << 26) / d) throw std::invalid_argument("state dimension too large");
    dim *= d;
  }
  return dim;
}

PureState make_state(int n, int d, VectorXcd amps) {
  const Eigen::Index dim = global_dim(n, d);
  if (amps.size() != dim) throw std::invalid_argument("amplitude vector length does not match d^n");
  const double norm = amps.norm();
  if (norm == 0.0) throw std::invalid_argument("zero amplitude vector");
  if (std::abs(norm - 1.0) >= 1e-6)
    throw std::invalid_argument("amplitude norm deviates from 1 by " + std::to_string(std::abs(norm - 1.0)));
  amps /= norm;
  return PureState{n, d, std::move(amps)};
}

PureState computational_state(int n, int d, Eigen::Index index) {
  const Eigen::Index dim = global_dim(n, d);
  if (index < 0 || index >= dim) throw std::invalid_argument("basis index out of range");
  VectorXcd amps = VectorXcd::Zero(dim);
  amps(index) = 1.0;
  return PureState{n, d, std::move(amps)};
}

void apply_factor_in_place(VectorXcd& amps, const MatrixXcd& u, int subsystem, int n, int d) {
  if (subsystem < 0 || subsystem >= n) throw std::invalid_argument("subsystem index out of range");
  if (u.rows() != d || u.cols() != d) throw std::invalid_argument("factor dimension mismatch");
  Eigen::Index stride = 1;
  for (int i = 0; i < n - 1 - subsystem; ++i) stride *= d;
  const Eigen::Index block = stride * d;
  const Eigen::Index dim = amps.size();
  VectorXcd col(d), out(d);
  for (Eigen::Index base = 0; base < dim; base += block) {
    for (Eigen::Index off = 0; off < stride; ++off) {
      Complex* p = amps.data() + base + off;
      for (int l = 0; l < d; ++l) col(l) = p[l * stride];
      out.noalias() = u * col;
      for (int l = 0; l < d; ++l) p[l * stride] = out(l);
    }
  }
}

PureState apply_local_string(const LocalUnitaryString& v, const PureState& psi) {
  if (v.n() != psi.n) throw std::invalid_argument("string length does not match subsystem count");
  for (const auto& factor : v.factors)
    if (factor.rows() != psi.d || factor.cols() != psi.d)
      throw std::invalid_argument("factor dimension does not match local dimension");
  VectorXcd amps = psi.amps;
  for (int k = 0; k < psi.n; ++k) apply_factor_in_place(amps, v.factors[k], k, psi.n, psi.d);
  return PureState{psi.n, psi.d, std::move(amps)};
}

Complex inner_product(const PureState& phi, const PureState& psi) {
  if (phi.n != psi.n || phi.d != psi.d) throw std::invalid_argument("state shapes differ");
  return phi.amps.dot(psi.amps);
}

GramAndF gram_and_f(const std::vector<PureState>& states) {
  if (states.size() < 2) throw std::invalid_argument("need at least two states");
  const int n = states.front().n, d = states.front().d;
  const Eigen::Index dim = states.front().dim();
  const Eigen::Index m = static_cast<Eigen::Index>(states.size());
  MatrixXcd a(dim, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    if (states[j].n != n || states[j].d != d) throw std::invalid_argument("state shapes differ");
    a.col(j) = states[j].amps;
  }
  MatrixXcd gram = a.adjoint() * a;
  double f = 0.0;  // summed off-diagonal only, so f >= 0 holds exactly
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index j2 = 0; j2 < m; ++j2)
      if (j != j2) f += std::norm(gram(j, j2));
  return GramAndF{std::move(gram), f};
}

namespace {

// Column-lexicographic order on (real, imag) entry pairs.
bool column_lex_less(const MatrixXcd& m, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Complex va = m(i, a), vb = m(i, b);
    if (va.real() != vb.real()) return va.real() < vb.real();
    if (va.imag() != vb.imag()) return va.imag() < vb.imag();
  }
  return false;
}

}  // namespace

SchmidtForm schmidt_decompose(const PureState& psi) {
  if (psi.n != 2) throw std::invalid_argument("Schmidt decomposition needs a bipartite state");
  const int d = psi.d;
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> coeff(psi.amps.data(), d, d);  // row index = subsystem A
  Eigen::JacobiSVD<MatrixXcd> svd(coeff, Eigen::ComputeFullU | Eigen::ComputeFullV);
  VectorXd lambda = svd.singularValues();
  MatrixXcd u = svd.matrixU();
  MatrixXcd v = svd.matrixV();

  // Stabilize degenerate singular values: within each tie group, order by the
  // lexicographically smallest left singular vector.
  std::vector<Eigen::Index> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  for (int start = 0; start < d;) {
    int end = start + 1;
    while (end < d && std::abs(lambda(start) - lambda(end)) <= 1e-12) ++end;
    std::stable_sort(perm.begin() + start, perm.begin() + end,
                     [&](Eigen::Index a, Eigen::Index b) { return column_lex_less(u, a, b); });
    start = end;
  }
  VectorXd lambda_sorted(d);
  MatrixXcd u_sorted(d, d), v_sorted(d, d);
  for (int i = 0; i < d; ++i) {
    lambda_sorted(i) = lambda(perm[i]);
    u_sorted.col(i) = u.col(perm[i]);
    v_sorted.col(i) = v.col(perm[i]);
  }

  // coeff = U diag(lambda) V^dagger, so psi = sum_l lambda_l |u_l>|conj(v_l)>
  // and (U^dagger (x) V^T) psi = sum_l lambda_l |l,l>.
  return SchmidtForm{std::move(lambda_sorted), u_sorted.adjoint(), v_sorted.transpose()};
}

PureState random_state(int n, int d, std::uint64_t seed, bool real_only) {
  const Eigen::Index dim = global_dim(n, d);
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXcd amps(dim);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = gauss(rng);
      const double im = real_only ? 0.0 : gauss(rng);
      amps(i) = Complex(re, im);
    }
    norm = amps.norm();
  } while (norm < 1e-12);
  amps /= norm;
  return PureState{n, d, std::move(amps)};
}

PureState canonical_three_qubit(Complex a, double b, double c, double d, double e) {
  const double sumsq = std::norm(a) + b * b + c * c + d * d + e * e;
  if (std::abs(sumsq - 1.0) > 1e-10)
    throw std::invalid_argument("canonical coefficients are not normalized");
  VectorXcd amps = VectorXcd::Zero(8);
  amps(0) = a;  // |000>
  amps(3) = b;  // |011>
  amps(5) = c;  // |101>
  amps(6) = d;  // |110>
  amps(7) = e;  // |111>
  amps /= amps.norm();
  return PureState{3, 2, std::move(amps)};
}

Eigen::Vector3d bloch_vector(const PureState& qubit) {
  if (qubit.n != 1 || qubit.d != 2) throw std::invalid_argument("expected a single-qubit state");
  const Complex a = qubit.amps(0), b = qubit.amps(1);
  const Complex cross = std::conj(a) * b;
  return Eigen::Vector3d(2.0 * cross.real(), 2.0 * cross.imag(), std::norm(a) - std::norm(b));
}

HemispherePartition hemisphere_partition(const std::vector<PureState>& qubit_states) {
  constexpr double kZeroTol = 1e-9;
  HemispherePartition out;
  for (int i = 0; i < static_cast<int>(qubit_states.size()); ++i) {
    const Eigen::Vector3d v = bloch_vector(qubit_states[i]);
    const double coords[3] = {v.z(), v.x(), v.y()};  // tie-break order z, x, y
    double sign = 1.0;
    for (double c : coords) {
      if (std::abs(c) > kZeroTol) {
        sign = c;
        break;
      }
    }
    (sign > 0 ? out.set_a : out.set_b).push_back(i);
  }
  return out;
}

CandidateBasis make_candidate_basis(PureState state, std::vector<LocalUnitaryString> strings) {
  if (strings.size() < 2) throw std::invalid_argument("need at least two strings");
  CandidateBasis basis;
  basis.derived.reserve(strings.size());
  for (const auto& s : strings) {
    for (const auto& factor : s.factors)
      if (!is_unitary(factor)) throw std::invalid_argument("string factor is not unitary");
    basis.derived.push_back(apply_local_string(s, state));
  }
  auto gf = gram_and_f(basis.derived);
  basis.state = std::move(state);
  basis.strings = std::move(strings);
  basis.gram = std::move(gf.gram);
  basis.f_value = gf.f;
  return basis;
}

double unitarity_residual(const Eigen::Ref<const MatrixXcd>& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  MatrixXcd delta = u.adjoint() * u - MatrixXcd::Identity(u.rows(), u.cols());
  return delta.cwiseAbs().maxCoeff();
}

bool is_unitary(const Eigen::Ref<const MatrixXcd>& u, double tol) {
  return unitarity_residual(u) <= tol;
}

MatrixXcd kron(const Eigen::Ref<const MatrixXcd>& a, const Eigen::Ref<const MatrixXcd>& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

MatrixXcd global_matrix(const LocalUnitaryString& v) {
  if (v.factors.empty()) throw std::invalid_argument("empty unitary string");
  MatrixXcd out = v.factors.front();
  for (std::size_t k = 1; k < v.factors.size(); ++k) out = kron(out, v.factors[k]);
  return out;
}

}  // namespace isoent
