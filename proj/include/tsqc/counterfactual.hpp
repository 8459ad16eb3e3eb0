#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "tsqc/abl.hpp"
#include "tsqc/core.hpp"
#include "tsqc/ensemble.hpp"

namespace tsqc {

/// Which antecedent the counterfactual carries.
///
/// Single: "had Q been measured at t, the ABL probabilities would hold"; the
/// counterfactual world keeps the preparation, measures Q and does not
/// re-impose the post outcome.
///
/// Compound: additionally "and had the same pre- and post-selection outcomes
/// obtained"; the counterfactual world measures Q and is then filtered on b.
enum class Flavor { SingleAntecedent, CompoundAntecedent };

enum class Classification { False, TriviallyTrue, NontriviallyTrue, TrueByCoincidence };

inline std::string_view to_string(Flavor f) {
  return f == Flavor::SingleAntecedent ? "single" : "compound";
}

inline std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::False: return "FALSE";
    case Classification::TriviallyTrue: return "TRIVIALLY_TRUE";
    case Classification::NontriviallyTrue: return "NONTRIVIALLY_TRUE";
    case Classification::TrueByCoincidence: return "TRUE_BY_COINCIDENCE";
  }
  return "?";
}

template <typename Real = double>
struct BasicCounterfactualStatement {
  /// The actual world. Its intermediate stage is nothing, a measurement of
  /// some other observable, or a unitary; `selection` holds the actual b.
  BasicProtocol<Real> base_protocol;
  BasicProjectiveMeasurement<Real> query;
  Flavor flavor;

  BasicCounterfactualStatement(BasicProtocol<Real> base, BasicProjectiveMeasurement<Real> q, Flavor f)
      : base_protocol(std::move(base)), query(std::move(q)), flavor(f) {
    detail::require_dim<Real>("counterfactual query", base_protocol.dim(), query.dim());
    if (!base_protocol.selection) throw InvalidArgument("counterfactual statement: base protocol has no selection");
  }
};

template <typename Real = double>
struct BasicCotenabilityReport {
  BasicDistribution<Real> undisturbed;
  BasicDistribution<Real> disturbed;
  Real tvd;
  /// disturbed(b) - undisturbed(b); absent when the protocol selects nothing.
  std::optional<Real> delta_selected;
  bool cotenable;
};

template <typename Real = double>
struct BasicVerdict {
  Flavor flavor;
  BasicDistribution<Real> claimed;
  BasicDistribution<Real> counterfactual_world;
  Real max_deviation;
  bool cotenable;
  Classification classification;
  BasicCotenabilityReport<Real> cotenability;
};

/// Selection base of a protocol as seen from time t. A unitary stage at t is
/// folded into t_to_post, so a query inserted at t acts before it.
template <typename Real>
BasicSelectionBase<Real> selection_base(const BasicProtocol<Real>& protocol) {
  auto t_to_post = protocol.t_to_post;
  if (const auto* w = std::get_if<BasicUnitaryOp<Real>>(&protocol.intermediate)) t_to_post = t_to_post.after(*w);
  return BasicSelectionBase<Real>(protocol.preparation, protocol.post_pvm, protocol.pre_to_t, std::move(t_to_post));
}

template <typename Real>
BasicSelectionContext<Real> selection_context(const BasicProtocol<Real>& protocol) {
  if (!protocol.selection) throw InvalidArgument("selection_context: protocol has no selection");
  return BasicSelectionContext<Real>(selection_base(protocol), *protocol.selection);
}

/// Q-outcome distribution in the counterfactual world. The query replaces any
/// measurement the actual world performed at t.
template <typename Real>
BasicDistribution<Real> counterfactual_distribution(const BasicCounterfactualStatement<Real>& stmt) {
  const auto base = selection_base(stmt.base_protocol);
  if (stmt.flavor == Flavor::SingleAntecedent) return born_distribution(base.state_at_t(), stmt.query);

  // Build the whole (Q outcome, t_b outcome) world and keep only the rows
  // compatible with b.
  const auto joint = joint_probabilities(base, stmt.query);
  const std::size_t b = stmt.base_protocol.post_pvm.index_of(*stmt.base_protocol.selection);
  const Real reach = joint.col(b).sum();
  if (reach <= Tolerance<Real>::prob) throw ImpossiblePostSelection(*stmt.base_protocol.selection);
  std::vector<Real> conditioned;
  for (long j = 0; j < joint.rows(); ++j) conditioned.push_back(joint(j, b) / reach);
  return BasicDistribution<Real>(stmt.query.labels(), conditioned);
}

/// Does inserting `query` at t change the t_b statistics of the actual world?
template <typename Real>
BasicCotenabilityReport<Real> cotenability_report(const BasicProtocol<Real>& base_protocol,
                                                  const BasicProjectiveMeasurement<Real>& query) {
  detail::require_dim<Real>("cotenability_report", base_protocol.dim(), query.dim());
  const auto base = selection_base(base_protocol);
  std::optional<BasicProjectiveMeasurement<Real>> actual;
  if (const auto* m = base_protocol.measurement()) actual = *m;

  auto undisturbed = post_outcome_distribution(base, actual);
  auto disturbed = post_outcome_distribution(base, std::optional<BasicProjectiveMeasurement<Real>>(query));
  const Real tvd = total_variation(undisturbed, disturbed);
  std::optional<Real> delta;
  if (base_protocol.selection) delta = disturbed[*base_protocol.selection] - undisturbed[*base_protocol.selection];
  return {std::move(undisturbed), std::move(disturbed), tvd, delta, tvd <= Tolerance<Real>::norm};
}

template <typename Real>
Classification classify(Flavor flavor, Real max_deviation, bool cotenable) {
  if (flavor == Flavor::SingleAntecedent) {
    return max_deviation <= Tolerance<Real>::norm ? Classification::TrueByCoincidence : Classification::False;
  }
  return cotenable ? Classification::NontriviallyTrue : Classification::TriviallyTrue;
}

/// Compares the ABL claim with what the chosen reading actually yields.
template <typename Real>
BasicVerdict<Real> evaluate(const BasicCounterfactualStatement<Real>& stmt) {
  auto claimed = abl_distribution(selection_context(stmt.base_protocol), stmt.query);
  auto world = counterfactual_distribution(stmt);
  const Real deviation = total_variation(claimed, world);
  auto coten = cotenability_report(stmt.base_protocol, stmt.query);
  const bool cotenable = coten.cotenable;
  return {stmt.flavor,
          std::move(claimed),
          std::move(world),
          deviation,
          cotenable,
          classify(stmt.flavor, deviation, cotenable),
          std::move(coten)};
}

using CounterfactualStatement = BasicCounterfactualStatement<double>;
using CotenabilityReport = BasicCotenabilityReport<double>;
using Verdict = BasicVerdict<double>;

}  // namespace tsqc
