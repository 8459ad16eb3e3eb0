#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsqc/core.hpp"
#include "tsqc/ops.hpp"

namespace tsqc {

/// Everything about a pre/post-selected ensemble except the post outcome:
/// the preparation at t_a, the evolutions t_a -> t and t -> t_b, and the
/// measurement performed at t_b.
template <typename Real = double>
struct BasicSelectionBase {
  BasicPureState<Real> pre;
  BasicProjectiveMeasurement<Real> post_pvm;
  BasicUnitaryOp<Real> pre_to_t;
  BasicUnitaryOp<Real> t_to_post;

  BasicSelectionBase(BasicPureState<Real> pre_state, BasicProjectiveMeasurement<Real> post)
      : BasicSelectionBase(pre_state, post, BasicUnitaryOp<Real>::identity(pre_state.dim()),
                           BasicUnitaryOp<Real>::identity(pre_state.dim())) {}

  BasicSelectionBase(BasicPureState<Real> pre_state, BasicProjectiveMeasurement<Real> post, BasicUnitaryOp<Real> u,
                     BasicUnitaryOp<Real> v)
      : pre(std::move(pre_state)), post_pvm(std::move(post)), pre_to_t(std::move(u)), t_to_post(std::move(v)) {
    const long d = pre.dim();
    detail::require_dim<Real>("selection post measurement", d, post_pvm.dim());
    detail::require_dim<Real>("selection pre_to_t", d, pre_to_t.dim());
    detail::require_dim<Real>("selection t_to_post", d, t_to_post.dim());
  }

  long dim() const { return pre.dim(); }

  /// State reaching time t when nothing happens in between.
  BasicPureState<Real> state_at_t() const { return evolve(pre, pre_to_t); }
};

/// A selection base together with the observed post outcome b.
template <typename Real = double>
struct BasicSelectionContext : BasicSelectionBase<Real> {
  std::string post_label;

  BasicSelectionContext(BasicSelectionBase<Real> base, std::string label)
      : BasicSelectionBase<Real>(std::move(base)), post_label(std::move(label)) {
    if (!this->post_pvm.contains(post_label)) throw UnknownLabel(post_label);
  }

  BasicSelectionContext(BasicPureState<Real> pre_state, BasicProjectiveMeasurement<Real> post, std::string label)
      : BasicSelectionContext(BasicSelectionBase<Real>(std::move(pre_state), std::move(post)), std::move(label)) {}

  /// Post-selection on a bare state |b>, lifted to {|b><b|, 1 - |b><b|} with labels "b" / "not_b".
  static BasicSelectionContext with_post_state(BasicPureState<Real> pre_state, const BasicPureState<Real>& post_state) {
    return BasicSelectionContext(std::move(pre_state), BasicProjectiveMeasurement<Real>::lift(post_state, "b", "not_b"),
                                 "b");
  }
};

namespace detail {

/// Probability of the t_b outcome `post_index` from `state_at_t`, after t_to_post.
template <typename Real>
Real post_probability(const BasicSelectionBase<Real>& base, const BasicPureState<Real>& state_at_t,
                      std::size_t post_index) {
  const Vector<Real> psi = base.t_to_post.matrix() * state_at_t.amplitudes();
  return expectation<Real>(psi, base.post_pvm[post_index].projector);
}

template <typename Real>
Real clean(Real p) {
  return p <= Tolerance<Real>::prob ? Real(0) : std::min(p, Real(1));
}

}  // namespace detail

/// Joint probability of intermediate outcome j of `q` and t_b outcome k, with
/// `q` actually measured at t. Row j, column k.
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> joint_probabilities(const BasicSelectionBase<Real>& base,
                                                                        const BasicProjectiveMeasurement<Real>& q) {
  detail::require_dim<Real>("joint_probabilities", base.dim(), q.dim());
  const auto at_t = base.state_at_t();
  const auto born = born_distribution(at_t, q);
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> joint =
      Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>::Zero(q.size(), base.post_pvm.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (born[j].probability <= Tolerance<Real>::prob) continue;
    const auto collapsed = collapse(at_t, q, q[j].label);
    for (std::size_t k = 0; k < base.post_pvm.size(); ++k) {
      joint(j, k) = born[j].probability * detail::post_probability(base, collapsed, k);
    }
  }
  return joint;
}

/// ABL probabilities of the outcomes of `q` at t, conditioned on the pre- and
/// post-selection in `ctx`.
///
/// The numerator for outcome j is Born(j | U a) times Born(b | V collapse_j(U a)),
/// which equals |<b|V|q_j>|^2 |<q_j|U|a>|^2 for rank-1 projectors and extends
/// the rule to degenerate outcomes by the same measure-collapse-measure
/// sequence.
template <typename Real>
BasicDistribution<Real> abl_distribution(const BasicSelectionContext<Real>& ctx, const BasicProjectiveMeasurement<Real>& q) {
  detail::require_dim<Real>("abl_distribution", ctx.dim(), q.dim());
  const auto at_t = ctx.state_at_t();
  const auto born = born_distribution(at_t, q);
  const std::size_t b = ctx.post_pvm.index_of(ctx.post_label);

  std::vector<Real> numerators(q.size(), Real(0));
  Real denominator = 0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (born[j].probability <= Tolerance<Real>::prob) continue;
    const auto collapsed = collapse(at_t, q, q[j].label);
    numerators[j] = born[j].probability * detail::post_probability(ctx, collapsed, b);
    denominator += numerators[j];
  }
  if (denominator <= Tolerance<Real>::prob) throw ImpossiblePostSelection(ctx.post_label);

  std::vector<typename BasicDistribution<Real>::Entry> entries;
  for (std::size_t j = 0; j < q.size(); ++j) entries.push_back({q[j].label, numerators[j] / denominator});
  return BasicDistribution<Real>(std::move(entries));
}

/// An intermediate event at t: outcome `label` of `pvm`.
template <typename Real>
struct BasicIntermediateEvent {
  BasicProjectiveMeasurement<Real> pvm;
  std::string label;
};

/// Unconditional probability that the t_b measurement yields ctx.post_label,
/// jointly with the intermediate event when one is given.
template <typename Real>
Real sequence_probability(const BasicSelectionContext<Real>& ctx,
                          const std::optional<BasicIntermediateEvent<Real>>& intermediate) {
  const auto at_t = ctx.state_at_t();
  const std::size_t b = ctx.post_pvm.index_of(ctx.post_label);
  if (!intermediate) return detail::clean(detail::post_probability(ctx, at_t, b));

  detail::require_dim<Real>("sequence_probability", ctx.dim(), intermediate->pvm.dim());
  const Real p_event = born_distribution(at_t, intermediate->pvm)[intermediate->label];
  if (p_event <= Tolerance<Real>::prob) return Real(0);
  const auto collapsed = collapse(at_t, intermediate->pvm, intermediate->label);
  return detail::clean(p_event * detail::post_probability(ctx, collapsed, b));
}

/// Distribution over all t_b outcomes. With an intermediate measurement the
/// result is the incoherent mixture over its outcomes.
template <typename Real>
BasicDistribution<Real> post_outcome_distribution(const BasicSelectionBase<Real>& base,
                                                  const std::optional<BasicProjectiveMeasurement<Real>>& intermediate) {
  std::vector<Real> probabilities(base.post_pvm.size(), Real(0));
  if (!intermediate) {
    const auto at_t = base.state_at_t();
    for (std::size_t k = 0; k < probabilities.size(); ++k) probabilities[k] = detail::post_probability(base, at_t, k);
  } else {
    const auto joint = joint_probabilities(base, *intermediate);
    for (std::size_t k = 0; k < probabilities.size(); ++k) probabilities[k] = joint.col(k).sum();
  }
  for (auto& p : probabilities) p = detail::clean(p);
  return BasicDistribution<Real>(base.post_pvm.labels(), probabilities);
}

template <typename Real>
BasicDistribution<Real> post_outcome_distribution(const BasicSelectionBase<Real>& base) {
  return post_outcome_distribution(base, std::optional<BasicProjectiveMeasurement<Real>>{});
}

template <typename Real>
BasicDistribution<Real> post_outcome_distribution(const BasicSelectionBase<Real>& base,
                                                  const BasicProjectiveMeasurement<Real>& intermediate) {
  return post_outcome_distribution(base, std::optional<BasicProjectiveMeasurement<Real>>(intermediate));
}

using SelectionBase = BasicSelectionBase<double>;
using SelectionContext = BasicSelectionContext<double>;
using IntermediateEvent = BasicIntermediateEvent<double>;

}  // namespace tsqc
