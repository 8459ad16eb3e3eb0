#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tsqc/errors.hpp"
#include "tsqc/tolerance.hpp"

namespace tsqc {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using Vector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using Matrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

inline void require_unique(const std::vector<std::string>& labels, const char* what) {
  std::set<std::string> seen;
  for (const auto& label : labels) {
    if (!seen.insert(label).second) {
      throw InvalidArgument(std::string(what) + ": duplicate label '" + label + "'");
    }
  }
}

template <typename Real>
bool is_hermitian(const Matrix<Real>& m, Real tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

template <typename Real>
Vector<Real> normalized_or_throw(Vector<Real> v, const char* what) {
  if (v.size() == 0) throw InvalidArgument(std::string(what) + ": empty amplitude vector");
  if (!v.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite amplitude");
  const Real norm = v.norm();
  if (std::abs(norm - Real(1)) > Tolerance<Real>::renormalize) {
    throw InvalidArgument(std::string(what) + ": amplitude norm " + std::to_string(double(norm)) +
                          " is not 1");
  }
  v /= norm;
  return v;
}

inline std::vector<std::string> index_labels(long n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (long i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

}  // namespace detail

/// Unit vector over a labeled finite basis.
template <typename Real = double>
class BasicPureState {
 public:
  BasicPureState(std::vector<std::string> basis_labels, Vector<Real> amplitudes)
      : labels_(std::move(basis_labels)),
        amplitudes_(detail::normalized_or_throw<Real>(std::move(amplitudes), "PureState")) {
    if (static_cast<long>(labels_.size()) != amplitudes_.size()) {
      throw DimensionMismatch("PureState basis labels", amplitudes_.size(), labels_.size());
    }
    detail::require_unique(labels_, "PureState");
  }

  /// Basis labels default to "0", "1", ...
  explicit BasicPureState(Vector<Real> amplitudes)
      : BasicPureState(detail::index_labels(amplitudes.size()), Vector<Real>(amplitudes)) {}

  long dim() const { return amplitudes_.size(); }
  const std::vector<std::string>& basis_labels() const { return labels_; }
  const Vector<Real>& amplitudes() const { return amplitudes_; }
  Complex<Real> operator[](long i) const { return amplitudes_(i); }

  /// Same basis, new amplitudes.
  BasicPureState with_amplitudes(Vector<Real> amplitudes) const {
    return BasicPureState(labels_, std::move(amplitudes));
  }

  /// Equality up to a global phase, within `tol` on the fidelity.
  bool same_ray(const BasicPureState& other, Real tol = Tolerance<Real>::norm) const {
    if (dim() != other.dim()) return false;
    return std::abs(Real(1) - std::abs(amplitudes_.dot(other.amplitudes_))) <= tol;
  }

 private:
  std::vector<std::string> labels_;
  Vector<Real> amplitudes_;
};

template <typename Real = double>
class BasicUnitaryOp {
 public:
  explicit BasicUnitaryOp(Matrix<Real> matrix) : matrix_(std::move(matrix)) {
    const long n = matrix_.rows();
    if (n == 0 || matrix_.cols() != n) throw InvalidArgument("UnitaryOp: matrix must be square and non-empty");
    if (!matrix_.allFinite()) throw InvalidArgument("UnitaryOp: non-finite entry");
    if ((matrix_.adjoint() * matrix_ - Matrix<Real>::Identity(n, n)).cwiseAbs().maxCoeff() > Tolerance<Real>::norm) {
      throw InvalidArgument("UnitaryOp: matrix is not unitary");
    }
  }

  static BasicUnitaryOp identity(long dim) { return BasicUnitaryOp(Matrix<Real>::Identity(dim, dim)); }

  long dim() const { return matrix_.rows(); }
  const Matrix<Real>& matrix() const { return matrix_; }
  BasicUnitaryOp adjoint() const { return BasicUnitaryOp(matrix_.adjoint()); }

  bool is_identity(Real tol = Tolerance<Real>::norm) const {
    return (matrix_ - Matrix<Real>::Identity(dim(), dim())).cwiseAbs().maxCoeff() <= tol;
  }

  /// `this` applied after `first`.
  BasicUnitaryOp after(const BasicUnitaryOp& first) const {
    if (first.dim() != dim()) throw DimensionMismatch("UnitaryOp composition", dim(), first.dim());
    return BasicUnitaryOp(matrix_ * first.matrix_);
  }

 private:
  Matrix<Real> matrix_;
};

/// Complete family of mutually orthogonal projectors with outcome labels.
/// Projectors may have any rank.
///
/// An outcome may carry a `route`: a unitary applied to the projected state
/// after the outcome is obtained. It leaves every outcome probability alone
/// and only changes where the post-measurement state goes (an absorbing
/// polarizer routes its blocked branch to an "absorbed" level).
template <typename Real = double>
class BasicProjectiveMeasurement {
 public:
  struct Outcome {
    std::string label;
    Matrix<Real> projector;
    std::optional<BasicUnitaryOp<Real>> route = std::nullopt;
  };

  explicit BasicProjectiveMeasurement(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {
    validate();
  }

  /// Rank-1 outcomes onto the columns of `basis`, which must be orthonormal.
  static BasicProjectiveMeasurement from_basis(const Matrix<Real>& basis, std::vector<std::string> labels) {
    if (static_cast<long>(labels.size()) != basis.cols()) {
      throw DimensionMismatch("PVM basis labels", basis.cols(), labels.size());
    }
    std::vector<Outcome> outcomes;
    for (long j = 0; j < basis.cols(); ++j) {
      Vector<Real> v = basis.col(j);
      outcomes.push_back({std::move(labels[j]), v * v.adjoint()});
    }
    return BasicProjectiveMeasurement(std::move(outcomes));
  }

  /// Two-outcome measurement {|v><v|, 1 - |v><v|}.
  static BasicProjectiveMeasurement lift(const BasicPureState<Real>& v, std::string label,
                                         std::string complement_label) {
    Matrix<Real> p = v.amplitudes() * v.amplitudes().adjoint();
    Matrix<Real> q = Matrix<Real>::Identity(v.dim(), v.dim()) - p;
    return BasicProjectiveMeasurement({{std::move(label), std::move(p)}, {std::move(complement_label), std::move(q)}});
  }

  long dim() const { return outcomes_.front().projector.rows(); }
  std::size_t size() const { return outcomes_.size(); }
  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  const Outcome& operator[](std::size_t i) const { return outcomes_[i]; }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& o : outcomes_) out.push_back(o.label);
    return out;
  }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t i = 0; i < outcomes_.size(); ++i) {
      if (outcomes_[i].label == label) return i;
    }
    throw UnknownLabel(label);
  }

  bool contains(const std::string& label) const {
    return std::any_of(outcomes_.begin(), outcomes_.end(), [&](const Outcome& o) { return o.label == label; });
  }

  const Matrix<Real>& projector(const std::string& label) const { return outcomes_[index_of(label)].projector; }

  /// Unnormalized post-measurement state for outcome `j`: R_j P_j psi.
  Vector<Real> project(std::size_t j, const Vector<Real>& psi) const {
    Vector<Real> out = outcomes_[j].projector * psi;
    if (outcomes_[j].route) out = outcomes_[j].route->matrix() * out;
    return out;
  }

  bool has_routes() const {
    return std::any_of(outcomes_.begin(), outcomes_.end(), [](const Outcome& o) { return o.route.has_value(); });
  }

  /// True when every projector commutes with every projector of `other`.
  bool commutes_with(const BasicProjectiveMeasurement& other, Real tol = Tolerance<Real>::norm) const {
    if (dim() != other.dim()) return false;
    for (const auto& a : outcomes_) {
      for (const auto& b : other.outcomes_) {
        if ((a.projector * b.projector - b.projector * a.projector).cwiseAbs().maxCoeff() > tol) return false;
      }
    }
    return true;
  }

 private:
  void validate() const {
    const Real tol = Tolerance<Real>::norm;
    if (outcomes_.empty()) throw InvalidArgument("PVM: no outcomes");
    const long n = outcomes_.front().projector.rows();
    if (n == 0) throw InvalidArgument("PVM: zero dimension");
    std::vector<std::string> labels;
    Matrix<Real> sum = Matrix<Real>::Zero(n, n);
    for (const auto& o : outcomes_) {
      const auto& p = o.projector;
      if (p.rows() != n || p.cols() != n) throw DimensionMismatch("PVM projector '" + o.label + "'", n, p.rows());
      if (!p.allFinite()) throw InvalidArgument("PVM: non-finite entry in '" + o.label + "'");
      if (!detail::is_hermitian<Real>(p, tol)) throw InvalidArgument("PVM: projector '" + o.label + "' is not Hermitian");
      if ((p * p - p).cwiseAbs().maxCoeff() > tol) {
        throw InvalidArgument("PVM: projector '" + o.label + "' is not idempotent");
      }
      if (o.route && o.route->dim() != n) throw DimensionMismatch("PVM route of '" + o.label + "'", n, o.route->dim());
      sum += p;
      labels.push_back(o.label);
    }
    detail::require_unique(labels, "PVM");
    for (std::size_t i = 0; i < outcomes_.size(); ++i) {
      for (std::size_t j = i + 1; j < outcomes_.size(); ++j) {
        if ((outcomes_[i].projector * outcomes_[j].projector).cwiseAbs().maxCoeff() > tol) {
          throw InvalidArgument("PVM: projectors '" + outcomes_[i].label + "' and '" + outcomes_[j].label +
                                "' are not orthogonal");
        }
      }
    }
    if ((sum - Matrix<Real>::Identity(n, n)).cwiseAbs().maxCoeff() > tol) {
      throw InvalidArgument("PVM: projectors do not sum to the identity");
    }
  }

  std::vector<Outcome> outcomes_;
};

/// Pure state of a two-part system; amplitude (i, j) sits at index i * d_R + j.
template <typename Real = double>
class BasicBipartiteState {
 public:
  BasicBipartiteState(std::vector<std::string> left_labels, std::vector<std::string> right_labels,
                      Vector<Real> amplitudes)
      : left_(std::move(left_labels)),
        right_(std::move(right_labels)),
        amplitudes_(detail::normalized_or_throw<Real>(std::move(amplitudes), "BipartiteState")) {
    if (left_.empty() || right_.empty()) throw InvalidArgument("BipartiteState: empty subsystem");
    const long expected = static_cast<long>(left_.size() * right_.size());
    if (amplitudes_.size() != expected) throw DimensionMismatch("BipartiteState amplitudes", expected, amplitudes_.size());
    detail::require_unique(left_, "BipartiteState left");
    detail::require_unique(right_, "BipartiteState right");
  }

  long left_dim() const { return static_cast<long>(left_.size()); }
  long right_dim() const { return static_cast<long>(right_.size()); }
  const std::vector<std::string>& left_labels() const { return left_; }
  const std::vector<std::string>& right_labels() const { return right_; }
  const Vector<Real>& amplitudes() const { return amplitudes_; }
  Complex<Real> operator()(long i, long j) const { return amplitudes_(i * right_dim() + j); }

  /// Amplitudes reshaped to a d_L x d_R coefficient matrix.
  Matrix<Real> coefficients() const {
    Matrix<Real> m(left_dim(), right_dim());
    for (long i = 0; i < left_dim(); ++i)
      for (long j = 0; j < right_dim(); ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  static BasicBipartiteState from_coefficients(std::vector<std::string> left, std::vector<std::string> right,
                                               const Matrix<Real>& m) {
    Vector<Real> v(m.rows() * m.cols());
    for (long i = 0; i < m.rows(); ++i)
      for (long j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
    return BasicBipartiteState(std::move(left), std::move(right), std::move(v));
  }

  bool same_ray(const BasicBipartiteState& other, Real tol = Tolerance<Real>::norm) const {
    if (amplitudes_.size() != other.amplitudes_.size()) return false;
    return std::abs(Real(1) - std::abs(amplitudes_.dot(other.amplitudes_))) <= tol;
  }

 private:
  std::vector<std::string> left_;
  std::vector<std::string> right_;
  Vector<Real> amplitudes_;
};

template <typename Real = double>
class BasicDensityMatrix {
 public:
  explicit BasicDensityMatrix(Matrix<Real> matrix) : matrix_(std::move(matrix)) {
    const Real tol = Tolerance<Real>::norm;
    const long n = matrix_.rows();
    if (n == 0 || matrix_.cols() != n) throw InvalidArgument("DensityMatrix: matrix must be square and non-empty");
    if (!detail::is_hermitian<Real>(matrix_, tol)) throw InvalidArgument("DensityMatrix: not Hermitian");
    if (std::abs(matrix_.trace() - Complex<Real>(1)) > tol) throw InvalidArgument("DensityMatrix: trace is not 1");
    eigenvalues_ = Eigen::SelfAdjointEigenSolver<Matrix<Real>>(matrix_, Eigen::EigenvaluesOnly).eigenvalues();
    if (eigenvalues_.minCoeff() < -tol) throw InvalidArgument("DensityMatrix: negative eigenvalue");
  }

  long dim() const { return matrix_.rows(); }
  const Matrix<Real>& matrix() const { return matrix_; }
  /// Ascending.
  const Eigen::Matrix<Real, Eigen::Dynamic, 1>& eigenvalues() const { return eigenvalues_; }

 private:
  Matrix<Real> matrix_;
  Eigen::Matrix<Real, Eigen::Dynamic, 1> eigenvalues_;
};

/// Labeled probabilities, ordered like the outcomes of the measurement they
/// came from. An empty distribution is allowed and stands for "no outcomes".
template <typename Real = double>
class BasicDistribution {
 public:
  struct Entry {
    std::string label;
    Real probability;
  };

  BasicDistribution() = default;

  explicit BasicDistribution(std::vector<Entry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) return;
    const Real tol = Tolerance<Real>::norm;
    std::vector<std::string> labels;
    Real sum = 0;
    for (auto& e : entries_) {
      if (!std::isfinite(double(e.probability)) || e.probability < -tol || e.probability > Real(1) + tol) {
        throw InvalidArgument("Distribution: probability of '" + e.label + "' outside [0, 1]");
      }
      e.probability = std::clamp(e.probability, Real(0), Real(1));
      sum += e.probability;
      labels.push_back(e.label);
    }
    detail::require_unique(labels, "Distribution");
    if (std::abs(sum - Real(1)) > tol) {
      throw InvalidArgument("Distribution: probabilities sum to " + std::to_string(double(sum)));
    }
  }

  BasicDistribution(const std::vector<std::string>& labels, const std::vector<Real>& probabilities)
      : BasicDistribution(zip(labels, probabilities)) {}

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  Real operator[](const std::string& label) const {
    for (const auto& e : entries_) {
      if (e.label == label) return e.probability;
    }
    throw UnknownLabel(label);
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.label);
    return out;
  }

  std::vector<Real> probabilities() const {
    std::vector<Real> out;
    for (const auto& e : entries_) out.push_back(e.probability);
    return out;
  }

 private:
  static std::vector<Entry> zip(const std::vector<std::string>& labels, const std::vector<Real>& probabilities) {
    if (labels.size() != probabilities.size()) {
      throw DimensionMismatch("Distribution", labels.size(), probabilities.size());
    }
    std::vector<Entry> out;
    for (std::size_t i = 0; i < labels.size(); ++i) out.push_back({labels[i], probabilities[i]});
    return out;
  }

  std::vector<Entry> entries_;
};

/// Half the L1 distance. Both distributions must carry the same labels in the
/// same order.
template <typename Real>
Real total_variation(const BasicDistribution<Real>& p, const BasicDistribution<Real>& q) {
  if (p.labels() != q.labels()) throw LabelMismatch("total_variation: distributions have different labels");
  Real l1 = 0;
  for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(p[i].probability - q[i].probability);
  return std::clamp(l1 / Real(2), Real(0), Real(1));
}

using PureState = BasicPureState<double>;
using ProjectiveMeasurement = BasicProjectiveMeasurement<double>;
using UnitaryOp = BasicUnitaryOp<double>;
using BipartiteState = BasicBipartiteState<double>;
using DensityMatrix = BasicDensityMatrix<double>;
using Distribution = BasicDistribution<double>;

}  // namespace tsqc
