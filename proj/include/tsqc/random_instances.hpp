#pragma once

#include <string>
#include <vector>

#include "tsqc/core.hpp"
#include "tsqc/rng.hpp"

namespace tsqc::random {

inline Vector<double> gaussian_vector(StreamRng& rng, long dim) {
  Vector<double> v(dim);
  for (long i = 0; i < dim; ++i) v(i) = {rng.normal(), rng.normal()};
  return v;
}

/// Haar-distributed unit vector.
inline PureState state(StreamRng& rng, long dim) {
  Vector<double> v = gaussian_vector(rng, dim);
  return PureState(v / v.norm());
}

/// Haar-distributed unitary (QR of a complex Ginibre matrix with the phases of
/// R's diagonal divided out).
inline Matrix<double> unitary_matrix(StreamRng& rng, long dim) {
  Matrix<double> g(dim, dim);
  for (long j = 0; j < dim; ++j) g.col(j) = gaussian_vector(rng, dim);
  Eigen::HouseholderQR<Matrix<double>> qr(g);
  Matrix<double> q = qr.householderQ();
  Matrix<double> r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (long j = 0; j < dim; ++j) {
    const auto d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline UnitaryOp unitary(StreamRng& rng, long dim) { return UnitaryOp(unitary_matrix(rng, dim)); }

/// Random measurement in a random basis. Nondegenerate unless
/// `allow_degenerate`, in which case basis vectors are grouped into between 2
/// and dim outcomes.
inline ProjectiveMeasurement pvm(StreamRng& rng, long dim, bool allow_degenerate = false, const std::string& prefix = "q") {
  const Matrix<double> basis = unitary_matrix(rng, dim);
  long groups = dim;
  if (allow_degenerate && dim > 2) groups = 2 + static_cast<long>(rng.below(static_cast<std::uint64_t>(dim - 1)));
  std::vector<long> owner(dim);
  for (long i = 0; i < dim; ++i) owner[i] = i < groups ? i : static_cast<long>(rng.below(groups));
  std::vector<ProjectiveMeasurement::Outcome> outcomes;
  for (long g = 0; g < groups; ++g) {
    Matrix<double> p = Matrix<double>::Zero(dim, dim);
    for (long i = 0; i < dim; ++i) {
      if (owner[i] == g) p += basis.col(i) * basis.col(i).adjoint();
    }
    outcomes.push_back({prefix + std::to_string(g), (p + p.adjoint()) / 2.0});
  }
  return ProjectiveMeasurement(std::move(outcomes));
}

}  // namespace tsqc::random
