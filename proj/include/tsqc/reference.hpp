#pragma once

// Brute-force reference computations. They work on density matrices and
// enumerate every (intermediate, final) path explicitly, sharing no code with
// the vector-based engine in abl.hpp.

#include <optional>
#include <vector>

#include "tsqc/core.hpp"

namespace tsqc::reference {

using RealMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;

inline double trace_real(const Matrix<double>& m) { return m.trace().real(); }

/// Kraus operator R_j P_j of each outcome (R_j = 1 without a route).
inline std::vector<Matrix<double>> kraus_operators(const ProjectiveMeasurement& pvm) {
  std::vector<Matrix<double>> out;
  for (const auto& o : pvm.outcomes()) out.push_back(o.route ? Matrix<double>(o.route->matrix() * o.projector) : o.projector);
  return out;
}

/// Joint path probabilities P(q_j, b_k) by density-matrix evolution:
/// rho -> U rho U^dag -> K_j rho K_j^dag -> V (.) V^dag -> tr(P_k .).
inline RealMatrix path_table(const Vector<double>& pre, const Matrix<double>& u, const Matrix<double>& v,
                             const std::vector<Matrix<double>>& q_kraus,
                             const std::vector<Matrix<double>>& post_projectors) {
  const Matrix<double> rho = u * (pre * pre.adjoint()) * u.adjoint();
  RealMatrix table(q_kraus.size(), post_projectors.size());
  for (std::size_t j = 0; j < q_kraus.size(); ++j) {
    const Matrix<double> branch = v * (q_kraus[j] * rho * q_kraus[j].adjoint()) * v.adjoint();
    for (std::size_t k = 0; k < post_projectors.size(); ++k) table(j, k) = trace_real(post_projectors[k] * branch);
  }
  return table;
}

inline std::vector<Matrix<double>> projectors(const ProjectiveMeasurement& pvm) {
  std::vector<Matrix<double>> out;
  for (const auto& o : pvm.outcomes()) out.push_back(o.projector);
  return out;
}

/// Conditional distribution of the intermediate outcome given final outcome
/// `post_index`, from the enumerated path table. nullopt when the final
/// outcome is unreachable.
inline std::optional<std::vector<double>> conditional_on_final(const RealMatrix& table, std::size_t post_index) {
  const double total = table.col(post_index).sum();
  if (total <= kEpsProb) return std::nullopt;
  std::vector<double> out;
  for (long j = 0; j < table.rows(); ++j) out.push_back(table(j, post_index) / total);
  return out;
}

/// Eq.-style closed form for rank-1 outcomes |q_j>:
/// |<b|V|q_j>|^2 |<q_j|U|a>|^2 normalized over j.
inline std::vector<double> rank_one_abl(const Vector<double>& a, const Vector<double>& b, const Matrix<double>& u,
                                        const Matrix<double>& v, const Matrix<double>& q_basis) {
  std::vector<double> weights;
  double total = 0;
  for (long j = 0; j < q_basis.cols(); ++j) {
    const Vector<double> qj = q_basis.col(j);
    const double w = std::norm(b.dot(v * qj)) * std::norm(qj.dot(u * a));
    weights.push_back(w);
    total += w;
  }
  for (auto& w : weights) w /= total;
  return weights;
}

}  // namespace tsqc::reference
