#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "tsqc/core.hpp"

namespace tsqc {

enum class Side { Left, Right };

namespace detail {

template <typename Real>
Real expectation(const Vector<Real>& psi, const Matrix<Real>& projector) {
  return std::max(Real(0), psi.dot(projector * psi).real());
}

template <typename Real>
void require_dim(const char* what, long expected, long actual) {
  if (expected != actual) throw DimensionMismatch(what, expected, actual);
}

}  // namespace detail

/// Born probabilities <psi|P_j|psi> for every outcome, in measurement order.
template <typename Real>
BasicDistribution<Real> born_distribution(const BasicPureState<Real>& state, const BasicProjectiveMeasurement<Real>& pvm) {
  detail::require_dim<Real>("born_distribution", pvm.dim(), state.dim());
  std::vector<typename BasicDistribution<Real>::Entry> entries;
  for (const auto& o : pvm.outcomes()) entries.push_back({o.label, detail::expectation<Real>(state.amplitudes(), o.projector)});
  return BasicDistribution<Real>(std::move(entries));
}

/// Projection postulate: P_j|psi> renormalized (then routed, if the outcome
/// has a route).
template <typename Real>
BasicPureState<Real> collapse(const BasicPureState<Real>& state, const BasicProjectiveMeasurement<Real>& pvm,
                              const std::string& outcome_label) {
  detail::require_dim<Real>("collapse", pvm.dim(), state.dim());
  Vector<Real> projected = pvm.project(pvm.index_of(outcome_label), state.amplitudes());
  const Real probability = projected.squaredNorm();
  if (probability <= Tolerance<Real>::prob) throw ZeroProbabilityOutcome(outcome_label);
  return state.with_amplitudes(projected / std::sqrt(probability));
}

template <typename Real>
BasicPureState<Real> evolve(const BasicPureState<Real>& state, const BasicUnitaryOp<Real>& u) {
  detail::require_dim<Real>("evolve", u.dim(), state.dim());
  return state.with_amplitudes(u.matrix() * state.amplitudes());
}

template <typename Real>
BasicBipartiteState<Real> tensor(const BasicPureState<Real>& left, const BasicPureState<Real>& right) {
  Matrix<Real> outer = left.amplitudes() * right.amplitudes().transpose();
  return BasicBipartiteState<Real>::from_coefficients(left.basis_labels(), right.basis_labels(), outer);
}

template <typename Real>
struct SubsystemOutcome {
  std::string label;
  Real probability;
  /// Absent when the outcome has zero probability.
  std::optional<BasicBipartiteState<Real>> conditional;
};

/// Measures one side of a bipartite state. Applies P (x) 1 or 1 (x) P.
template <typename Real>
std::vector<SubsystemOutcome<Real>> measure_subsystem(const BasicBipartiteState<Real>& bi,
                                                      const BasicProjectiveMeasurement<Real>& pvm, Side side) {
  const long d = side == Side::Left ? bi.left_dim() : bi.right_dim();
  detail::require_dim<Real>("measure_subsystem", d, pvm.dim());
  const Matrix<Real> coeffs = bi.coefficients();
  std::vector<SubsystemOutcome<Real>> out;
  for (const auto& o : pvm.outcomes()) {
    Matrix<Real> projected = side == Side::Left ? Matrix<Real>(o.projector * coeffs)
                                                : Matrix<Real>(coeffs * o.projector.transpose());
    const Real p = projected.squaredNorm();
    SubsystemOutcome<Real> entry{o.label, p <= Tolerance<Real>::prob ? Real(0) : p, std::nullopt};
    if (p > Tolerance<Real>::prob) {
      entry.conditional = BasicBipartiteState<Real>::from_coefficients(bi.left_labels(), bi.right_labels(),
                                                                       projected / std::sqrt(p));
    }
    out.push_back(std::move(entry));
  }
  return out;
}

/// Partial trace over the other side.
template <typename Real>
BasicDensityMatrix<Real> reduced_density(const BasicBipartiteState<Real>& bi, Side side) {
  const Matrix<Real> c = bi.coefficients();
  Matrix<Real> rho = side == Side::Left ? Matrix<Real>(c * c.adjoint()) : Matrix<Real>(c.transpose() * c.conjugate());
  // Symmetrize away rounding so the Hermitian check sees an exact adjoint.
  rho = (rho + rho.adjoint()) / Real(2);
  return BasicDensityMatrix<Real>(std::move(rho));
}

/// Linear polarizer at `angle` radians from the first basis axis of a 2-D space.
template <typename Real = double>
BasicProjectiveMeasurement<Real> axis_pvm(Real angle) {
  Matrix<Real> basis(2, 2);
  const Real c = std::cos(angle);
  const Real s = std::sin(angle);
  basis << c, -s, s, c;
  return BasicProjectiveMeasurement<Real>::from_basis(basis, {"pass", "block"});
}

/// Commonly used states and measurements.
namespace catalog {

template <typename Real = double>
BasicPureState<Real> basis_state(std::vector<std::string> labels, const std::string& which) {
  Vector<Real> v = Vector<Real>::Zero(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == which) {
      v(i) = 1;
      return BasicPureState<Real>(std::move(labels), std::move(v));
    }
  }
  throw UnknownLabel(which);
}

inline std::vector<std::string> spin_labels() { return {"z+", "z-"}; }

template <typename Real = double>
BasicPureState<Real> z_plus() { return basis_state<Real>(spin_labels(), "z+"); }

template <typename Real = double>
BasicPureState<Real> z_minus() { return basis_state<Real>(spin_labels(), "z-"); }

template <typename Real = double>
BasicPureState<Real> x_plus() {
  const Real h = std::numbers::sqrt2_v<Real> / 2;
  return BasicPureState<Real>(spin_labels(), Vector<Real>{{Complex<Real>(h), Complex<Real>(h)}});
}

template <typename Real = double>
BasicPureState<Real> x_minus() {
  const Real h = std::numbers::sqrt2_v<Real> / 2;
  return BasicPureState<Real>(spin_labels(), Vector<Real>{{Complex<Real>(h), Complex<Real>(-h)}});
}

template <typename Real = double>
BasicProjectiveMeasurement<Real> sigma_z() {
  return BasicProjectiveMeasurement<Real>::from_basis(Matrix<Real>::Identity(2, 2), {"z+", "z-"});
}

template <typename Real = double>
BasicProjectiveMeasurement<Real> sigma_x() {
  Matrix<Real> basis(2, 2);
  basis.col(0) = x_plus<Real>().amplitudes();
  basis.col(1) = x_minus<Real>().amplitudes();
  return BasicProjectiveMeasurement<Real>::from_basis(basis, {"x+", "x-"});
}

/// (|z+ z-> - |z- z+>)/sqrt(2).
template <typename Real = double>
BasicBipartiteState<Real> singlet() {
  const Real h = std::numbers::sqrt2_v<Real> / 2;
  Vector<Real> v = Vector<Real>::Zero(4);
  v(1) = h;
  v(2) = -h;
  return BasicBipartiteState<Real>(spin_labels(), spin_labels(), v);
}

/// Horizontal polarization along the x axis, basis {x, y}.
template <typename Real = double>
BasicPureState<Real> polarized_x() { return basis_state<Real>({"x", "y"}, "x"); }

inline std::vector<std::string> photon_labels() { return {"x", "y", "absorbed"}; }

/// Photon polarized along x in the space {x, y, absorbed}.
template <typename Real = double>
BasicPureState<Real> photon_x() { return basis_state<Real>(photon_labels(), "x"); }

/// Absorbing linear polarizer at `angle` on {x, y, absorbed}. "pass" projects
/// onto (cos, sin, 0); "block" is the complement, and its branch is routed
/// from the perpendicular axis into the absorbed level. A photon entering
/// already absorbed would be routed back out, so chains must not feed one
/// absorbing polarizer's blocked light into another.
template <typename Real = double>
BasicProjectiveMeasurement<Real> absorbing_polarizer(Real angle) {
  const Real c = std::cos(angle);
  const Real s = std::sin(angle);
  Vector<Real> along = Vector<Real>::Zero(3);
  along(0) = c;
  along(1) = s;
  Vector<Real> across = Vector<Real>::Zero(3);
  across(0) = -s;
  across(1) = c;
  Vector<Real> absorbed = Vector<Real>::Zero(3);
  absorbed(2) = 1;
  const Matrix<Real> pass = along * along.adjoint();
  const Matrix<Real> block = Matrix<Real>::Identity(3, 3) - pass;
  // Swap across <-> absorbed, fix along.
  const Matrix<Real> route = along * along.adjoint() + absorbed * across.adjoint() + across * absorbed.adjoint();
  return BasicProjectiveMeasurement<Real>(
      {{"pass", pass, std::nullopt}, {"block", block, BasicUnitaryOp<Real>(route)}});
}

inline std::vector<std::string> box_labels() { return {"A", "B", "C"}; }

/// Three-box pre-selection (|A> + |B> + |C>)/sqrt(3).
template <typename Real = double>
BasicPureState<Real> three_box_pre() {
  const Real k = Real(1) / std::sqrt(Real(3));
  return BasicPureState<Real>(box_labels(), Vector<Real>{{Complex<Real>(k), Complex<Real>(k), Complex<Real>(k)}});
}

/// Three-box post-selection (|A> + |B> - |C>)/sqrt(3).
template <typename Real = double>
BasicPureState<Real> three_box_post() {
  const Real k = Real(1) / std::sqrt(Real(3));
  return BasicPureState<Real>(box_labels(), Vector<Real>{{Complex<Real>(k), Complex<Real>(k), Complex<Real>(-k)}});
}

/// {P_box, 1 - P_box} with labels "in_<box>" / "not_<box>".
template <typename Real = double>
BasicProjectiveMeasurement<Real> box_query(const std::string& box) {
  return BasicProjectiveMeasurement<Real>::lift(basis_state<Real>(box_labels(), box), "in_" + box, "not_" + box);
}

inline std::vector<std::string> coin_labels() { return {"ready", "heads", "tails"}; }

template <typename Real = double>
BasicPureState<Real> coin_ready() { return basis_state<Real>(coin_labels(), "ready"); }

/// Coin flip on {ready, heads, tails}:
///   ready -> (heads + tails)/sqrt(2), heads -> (heads - tails)/sqrt(2), tails -> ready.
template <typename Real = double>
BasicUnitaryOp<Real> coin_flip() {
  const Real h = std::numbers::sqrt2_v<Real> / 2;
  Matrix<Real> u = Matrix<Real>::Zero(3, 3);
  u(1, 0) = h;
  u(2, 0) = h;
  u(1, 1) = h;
  u(2, 1) = -h;
  u(0, 2) = 1;
  return BasicUnitaryOp<Real>(u);
}

/// {heads, noheads} on the coin space.
template <typename Real = double>
BasicProjectiveMeasurement<Real> heads_query() {
  return BasicProjectiveMeasurement<Real>::lift(basis_state<Real>(coin_labels(), "heads"), "heads", "noheads");
}

}  // namespace catalog

}  // namespace tsqc
