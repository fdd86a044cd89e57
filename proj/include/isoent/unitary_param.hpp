#pragma once

#include <cstdint>
#include <vector>

#include "isoent/state.hpp"

namespace isoent {

/// Chart coordinates for U(d): d(d-1)/2 two-level complex rotations in fixed
/// column-major plane order, each with an angle and a phase, followed by d
/// diagonal phases. theta = 0 gives the identity. The chart is smooth and
/// covers all of U(d); the global phase is kept (d^2 parameters) to avoid
/// singular sets, at the cost of one flat direction the optimizer ignores.
struct UnitaryParams {
  int d = 0;
  VectorXd theta;  // length d*d
};

int chart_dim(int d);

MatrixXcd params_to_unitary(int d, const Eigen::Ref<const VectorXd>& theta);
MatrixXcd params_to_unitary(const UnitaryParams& p);

/// Chart value together with all d^2 partial derivative matrices, ordered as
/// theta. Computed with prefix/suffix products of the rotation factors.
struct UnitaryChart {
  MatrixXcd u;
  std::vector<MatrixXcd> partials;
};

UnitaryChart params_to_unitary_with_partials(int d, const Eigen::Ref<const VectorXd>& theta);

/// Exact inverse chart via Givens triangularization; round-trips any unitary
/// to ~1e-13. Used for warm starts. Throws on non-unitary input.
VectorXd unitary_to_params(const Eigen::Ref<const MatrixXcd>& u);

/// QR of a complex Gaussian matrix with the R-diagonal phase correction,
/// which makes the distribution Haar. Deterministic per seed.
MatrixXcd haar_random_unitary(int d, std::uint64_t seed);

/// Adds Gaussian noise of the given scale to theta; scale 0 is the identity.
UnitaryParams perturb(const UnitaryParams& p, double scale, std::uint64_t seed);

}  // namespace isoent
