#include "isoent/unitary_param.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

#include "isoent/seeding.hpp"

namespace isoent {

namespace {

constexpr Complex kI{0.0, 1.0};

struct PlaneList {
  std::vector<std::pair<int, int>> pairs;  // (c, r) in column-major zeroing order
};

PlaneList planes(int d) {
  PlaneList out;
  out.pairs.reserve(d * (d - 1) / 2);
  for (int c = 0; c < d - 1; ++c)
    for (int r = c + 1; r < d; ++r) out.pairs.emplace_back(c, r);
  return out;
}

// Two-level rotation block [[cos a, -e^{ib} sin a], [e^{-ib} sin a, cos a]].
Eigen::Matrix2cd rotation_block(double a, double b) {
  const Complex eib = std::polar(1.0, b);
  Eigen::Matrix2cd blk;
  blk << std::cos(a), -eib * std::sin(a), std::conj(eib) * std::sin(a), std::cos(a);
  return blk;
}

Eigen::Matrix2cd rotation_block_da(double a, double b) {
  const Complex eib = std::polar(1.0, b);
  Eigen::Matrix2cd blk;
  blk << -std::sin(a), -eib * std::cos(a), std::conj(eib) * std::cos(a), -std::sin(a);
  return blk;
}

Eigen::Matrix2cd rotation_block_db(double a, double b) {
  const Complex eib = std::polar(1.0, b);
  Eigen::Matrix2cd blk;
  blk << 0.0, -kI * eib * std::sin(a), -kI * std::conj(eib) * std::sin(a), 0.0;
  return blk;
}

// U <- U * R for the two-level rotation acting in plane (c, r).
void right_multiply_rotation(MatrixXcd& u, int c, int r, const Eigen::Matrix2cd& blk) {
  const VectorXcd col_c = u.col(c);
  const VectorXcd col_r = u.col(r);
  u.col(c) = col_c * blk(0, 0) + col_r * blk(1, 0);
  u.col(r) = col_c * blk(0, 1) + col_r * blk(1, 1);
}

// S <- R * S.
void left_multiply_rotation(MatrixXcd& s, int c, int r, const Eigen::Matrix2cd& blk) {
  const Eigen::RowVectorXcd row_c = s.row(c);
  const Eigen::RowVectorXcd row_r = s.row(r);
  s.row(c) = blk(0, 0) * row_c + blk(0, 1) * row_r;
  s.row(r) = blk(1, 0) * row_c + blk(1, 1) * row_r;
}

void check_theta(int d, const Eigen::Ref<const VectorXd>& theta) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  if (theta.size() != Eigen::Index{d} * d)
    throw std::invalid_argument("parameter vector must have length d^2");
}

}  // namespace

int chart_dim(int d) { return d * d; }

MatrixXcd params_to_unitary(int d, const Eigen::Ref<const VectorXd>& theta) {
  check_theta(d, theta);
  const auto pl = planes(d);
  MatrixXcd u = MatrixXcd::Identity(d, d);
  for (std::size_t i = 0; i < pl.pairs.size(); ++i) {
    const auto [c, r] = pl.pairs[i];
    right_multiply_rotation(u, c, r, rotation_block(theta(2 * i), theta(2 * i + 1)));
  }
  const int phase_base = d * (d - 1);
  for (int l = 0; l < d; ++l) u.col(l) *= std::polar(1.0, theta(phase_base + l));
  return u;
}

MatrixXcd params_to_unitary(const UnitaryParams& p) { return params_to_unitary(p.d, p.theta); }

UnitaryChart params_to_unitary_with_partials(int d, const Eigen::Ref<const VectorXd>& theta) {
  check_theta(d, theta);
  const auto pl = planes(d);
  const int num_rot = static_cast<int>(pl.pairs.size());
  const int phase_base = 2 * num_rot;

  // Prefixes P_i = R_1 ... R_i and suffixes S_i = R_i ... R_K D.
  std::vector<MatrixXcd> prefix(num_rot + 1);
  prefix[0] = MatrixXcd::Identity(d, d);
  for (int i = 0; i < num_rot; ++i) {
    const auto [c, r] = pl.pairs[i];
    prefix[i + 1] = prefix[i];
    right_multiply_rotation(prefix[i + 1], c, r, rotation_block(theta(2 * i), theta(2 * i + 1)));
  }
  VectorXcd phases(d);
  for (int l = 0; l < d; ++l) phases(l) = std::polar(1.0, theta(phase_base + l));
  std::vector<MatrixXcd> suffix(num_rot + 1);
  suffix[num_rot] = phases.asDiagonal();
  for (int i = num_rot - 1; i >= 0; --i) {
    const auto [c, r] = pl.pairs[i];
    suffix[i] = suffix[i + 1];
    left_multiply_rotation(suffix[i], c, r, rotation_block(theta(2 * i), theta(2 * i + 1)));
  }

  UnitaryChart chart;
  chart.u = prefix[num_rot] * phases.asDiagonal();
  chart.partials.resize(d * d);
  MatrixXcd p2(d, 2), s2(2, d);
  for (int i = 0; i < num_rot; ++i) {
    const auto [c, r] = pl.pairs[i];
    p2.col(0) = prefix[i].col(c);
    p2.col(1) = prefix[i].col(r);
    s2.row(0) = suffix[i + 1].row(c);
    s2.row(1) = suffix[i + 1].row(r);
    chart.partials[2 * i] = p2 * rotation_block_da(theta(2 * i), theta(2 * i + 1)) * s2;
    chart.partials[2 * i + 1] = p2 * rotation_block_db(theta(2 * i), theta(2 * i + 1)) * s2;
  }
  for (int l = 0; l < d; ++l) {
    MatrixXcd dp = MatrixXcd::Zero(d, d);
    dp.col(l) = kI * phases(l) * prefix[num_rot].col(l);
    chart.partials[phase_base + l] = std::move(dp);
  }
  return chart;
}

VectorXd unitary_to_params(const Eigen::Ref<const MatrixXcd>& u) {
  const int d = static_cast<int>(u.rows());
  if (u.cols() != d) throw std::invalid_argument("matrix is not square");
  MatrixXcd residual = u.adjoint() * u - MatrixXcd::Identity(d, d);
  if (residual.cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("matrix is not unitary");

  const auto pl = planes(d);
  VectorXd theta = VectorXd::Zero(Eigen::Index{d} * d);
  MatrixXcd m = u;
  // Triangularize: left-multiply by inverse rotations, zeroing (r, c) in the
  // same plane order the chart uses; what remains is the diagonal of phases.
  for (std::size_t i = 0; i < pl.pairs.size(); ++i) {
    const auto [c, r] = pl.pairs[i];
    const Complex pivot = m(c, c), target = m(r, c);
    double a = 0.0, b = 0.0;
    if (std::abs(target) > 1e-300) {
      a = std::atan2(std::abs(target), std::abs(pivot));
      b = std::arg(pivot) - std::arg(target);
    }
    theta(2 * i) = a;
    theta(2 * i + 1) = b;
    left_multiply_rotation(m, c, r, rotation_block(a, b).adjoint());
  }
  const int phase_base = d * (d - 1);
  for (int l = 0; l < d; ++l) theta(phase_base + l) = std::arg(m(l, l));
  return theta;
}

MatrixXcd haar_random_unitary(int d, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXcd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<MatrixXcd> qr(g);
  MatrixXcd q = qr.householderQ();
  const VectorXcd diag = qr.matrixQR().diagonal();
  for (int l = 0; l < d; ++l) {
    const double mag = std::abs(diag(l));
    q.col(l) *= mag > 0 ? diag(l) / mag : Complex(1.0, 0.0);
  }
  return q;
}

UnitaryParams perturb(const UnitaryParams& p, double scale, std::uint64_t seed) {
  if (scale < 0) throw std::invalid_argument("scale must be nonnegative");
  check_theta(p.d, p.theta);
  UnitaryParams out = p;
  if (scale == 0.0) return out;
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index i = 0; i < out.theta.size(); ++i) out.theta(i) += scale * gauss(rng);
  return out;
}

}  // namespace isoent
