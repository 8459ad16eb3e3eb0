#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "tsqc/abl.hpp"
#include "tsqc/core.hpp"
#include "tsqc/ops.hpp"
#include "tsqc/rng.hpp"

namespace tsqc {

struct Nothing {
  bool operator==(const Nothing&) const = default;
};

/// What happens at the intermediate time t.
template <typename Real = double>
using BasicStage = std::variant<Nothing, BasicProjectiveMeasurement<Real>, BasicUnitaryOp<Real>>;

/// The t_a / t / t_b timeline of one trial.
template <typename Real = double>
struct BasicProtocol {
  BasicPureState<Real> preparation;
  BasicStage<Real> intermediate;
  BasicUnitaryOp<Real> pre_to_t;
  BasicUnitaryOp<Real> t_to_post;
  BasicProjectiveMeasurement<Real> post_pvm;
  std::optional<std::string> selection;

  BasicProtocol(BasicPureState<Real> prep, BasicStage<Real> stage, BasicProjectiveMeasurement<Real> post,
                std::optional<std::string> selected = std::nullopt)
      : BasicProtocol(prep, std::move(stage), BasicUnitaryOp<Real>::identity(prep.dim()),
                      BasicUnitaryOp<Real>::identity(prep.dim()), std::move(post), std::move(selected)) {}

  BasicProtocol(BasicPureState<Real> prep, BasicStage<Real> stage, BasicUnitaryOp<Real> u, BasicUnitaryOp<Real> v,
                BasicProjectiveMeasurement<Real> post, std::optional<std::string> selected = std::nullopt)
      : preparation(std::move(prep)),
        intermediate(std::move(stage)),
        pre_to_t(std::move(u)),
        t_to_post(std::move(v)),
        post_pvm(std::move(post)),
        selection(std::move(selected)) {
    const long d = preparation.dim();
    detail::require_dim<Real>("protocol pre_to_t", d, pre_to_t.dim());
    detail::require_dim<Real>("protocol t_to_post", d, t_to_post.dim());
    detail::require_dim<Real>("protocol post measurement", d, post_pvm.dim());
    if (const auto* m = measurement()) detail::require_dim<Real>("protocol intermediate measurement", d, m->dim());
    if (const auto* w = std::get_if<BasicUnitaryOp<Real>>(&intermediate)) {
      detail::require_dim<Real>("protocol intermediate unitary", d, w->dim());
    }
    if (selection && !post_pvm.contains(*selection)) throw UnknownLabel(*selection);
  }

  long dim() const { return preparation.dim(); }

  const BasicProjectiveMeasurement<Real>* measurement() const {
    return std::get_if<BasicProjectiveMeasurement<Real>>(&intermediate);
  }

  /// Same timeline with a different intermediate stage.
  BasicProtocol with_stage(BasicStage<Real> stage) const {
    return BasicProtocol(preparation, std::move(stage), pre_to_t, t_to_post, post_pvm, selection);
  }
};

/// Two-party protocol: the left party optionally measures, then the right
/// party measures.
template <typename Real = double>
struct BasicBipartiteProtocol {
  BasicBipartiteState<Real> state;
  std::optional<BasicProjectiveMeasurement<Real>> left_pvm;
  BasicProjectiveMeasurement<Real> right_pvm;

  BasicBipartiteProtocol(BasicBipartiteState<Real> s, std::optional<BasicProjectiveMeasurement<Real>> left,
                         BasicProjectiveMeasurement<Real> right)
      : state(std::move(s)), left_pvm(std::move(left)), right_pvm(std::move(right)) {
    if (left_pvm) detail::require_dim<Real>("bipartite left measurement", state.left_dim(), left_pvm->dim());
    detail::require_dim<Real>("bipartite right measurement", state.right_dim(), right_pvm.dim());
  }
};

struct TrialRecord {
  std::uint64_t trial_index;
  std::optional<std::string> intermediate_outcome;
  std::string final_outcome;
};

/// Joint outcome counts of a seeded ensemble run.
template <typename Real = double>
struct BasicEnsembleStats {
  std::variant<BasicProtocol<Real>, BasicBipartiteProtocol<Real>> protocol;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  /// Empty when nothing is measured at t.
  std::vector<std::string> intermediate_labels;
  std::vector<std::string> final_labels;
  /// Row-major, one row per intermediate outcome (a single row when none).
  std::vector<std::uint64_t> counts;

  bool has_intermediate() const { return !intermediate_labels.empty(); }
  std::size_t rows() const { return std::max<std::size_t>(1, intermediate_labels.size()); }

  std::uint64_t count(std::size_t row, std::size_t final_index) const {
    return counts[row * final_labels.size() + final_index];
  }

  std::uint64_t count(const std::optional<std::string>& intermediate, const std::string& final_outcome) const {
    const std::size_t col = index_in(final_labels, final_outcome);
    if (!intermediate) {
      if (has_intermediate()) throw UnknownLabel("<none>");
      return count(0, col);
    }
    return count(index_in(intermediate_labels, *intermediate), col);
  }

  std::uint64_t final_count(const std::string& final_outcome) const {
    const std::size_t col = index_in(final_labels, final_outcome);
    std::uint64_t total = 0;
    for (std::size_t r = 0; r < rows(); ++r) total += count(r, col);
    return total;
  }

  std::uint64_t total() const {
    std::uint64_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
  }

  static std::size_t index_in(const std::vector<std::string>& labels, const std::string& label) {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw UnknownLabel(label);
    return static_cast<std::size_t>(it - labels.begin());
  }
};

struct ExecutionOptions {
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;
};

namespace detail {

/// Inverse-CDF draw over outcome order. Probabilities at or below the
/// zero-probability threshold are never selected.
template <typename Real>
std::size_t sample_index(const std::vector<Real>& probabilities, double u) {
  std::vector<double> cleaned(probabilities.size());
  double total = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = static_cast<double>(probabilities[i]);
    cleaned[i] = p <= static_cast<double>(Tolerance<Real>::prob) ? 0.0 : std::min(p, 1.0);
    total += cleaned[i];
  }
  const double target = u * total;
  double cumulative = 0;
  std::size_t last_possible = 0;
  for (std::size_t i = 0; i < cleaned.size(); ++i) {
    if (cleaned[i] == 0.0) continue;
    cumulative += cleaned[i];
    last_possible = i;
    if (target < cumulative) return i;
  }
  return last_possible;
}

template <typename Real>
std::vector<Real> born_vector(const Vector<Real>& psi, const BasicProjectiveMeasurement<Real>& pvm) {
  std::vector<Real> out;
  for (const auto& o : pvm.outcomes()) out.push_back(expectation<Real>(psi, o.projector));
  return out;
}

inline unsigned resolve_threads(const ExecutionOptions& options, std::uint64_t trials) {
  constexpr std::uint64_t kMinTrialsPerThread = 4096;
  unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t useful = std::max<std::uint64_t>(1, trials / kMinTrialsPerThread);
  return static_cast<unsigned>(std::min<std::uint64_t>(threads, useful));
}

/// Runs `trial(index, local_counts)` for every index in [0, trials), splitting
/// contiguous ranges across threads and summing the integer counts.
template <typename TrialFn>
std::vector<std::uint64_t> accumulate_trials(std::uint64_t trials, std::size_t cells, const ExecutionOptions& options,
                                             const TrialFn& trial) {
  const unsigned threads = resolve_threads(options, trials);
  std::vector<std::vector<std::uint64_t>> partial(threads, std::vector<std::uint64_t>(cells, 0));
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t begin = trials * t / threads;
      const std::uint64_t end = trials * (t + 1) / threads;
      workers.emplace_back([&, t, begin, end] {
        for (std::uint64_t i = begin; i < end; ++i) trial(i, partial[t]);
      });
    }
  }
  std::vector<std::uint64_t> counts(cells, 0);
  for (const auto& p : partial)
    for (std::size_t c = 0; c < cells; ++c) counts[c] += p[c];
  return counts;
}

}  // namespace detail

/// Realizes one trial of `protocol` from the counter stream (seed, trial_index).
template <typename Real>
TrialRecord run_trial(const BasicProtocol<Real>& protocol, std::uint64_t seed, std::uint64_t trial_index) {
  StreamRng rng(seed, trial_index);
  const double u_mid = rng.uniform();
  const double u_final = rng.uniform();

  TrialRecord record{trial_index, std::nullopt, {}};
  Vector<Real> psi = protocol.pre_to_t.matrix() * protocol.preparation.amplitudes();
  if (const auto* m = protocol.measurement()) {
    const std::size_t j = detail::sample_index(detail::born_vector<Real>(psi, *m), u_mid);
    psi = m->project(j, psi);
    psi /= psi.norm();
    record.intermediate_outcome = (*m)[j].label;
  } else if (const auto* w = std::get_if<BasicUnitaryOp<Real>>(&protocol.intermediate)) {
    psi = w->matrix() * psi;
  }
  psi = protocol.t_to_post.matrix() * psi;
  const std::size_t k = detail::sample_index(detail::born_vector<Real>(psi, protocol.post_pvm), u_final);
  record.final_outcome = protocol.post_pvm[k].label;
  return record;
}

/// Seeded Monte Carlo run. Counts depend only on (protocol, trials, seed).
template <typename Real>
BasicEnsembleStats<Real> run_ensemble(const BasicProtocol<Real>& protocol, std::uint64_t trials, std::uint64_t seed,
                                      const ExecutionOptions& options = {}) {
  if (trials < 1) throw InvalidArgument("run_ensemble: trials must be at least 1");
  BasicEnsembleStats<Real> stats{protocol, trials, seed, {}, protocol.post_pvm.labels(), {}};
  if (const auto* m = protocol.measurement()) stats.intermediate_labels = m->labels();
  const std::size_t cols = stats.final_labels.size();
  const auto& inter = stats.intermediate_labels;
  const auto& fin = stats.final_labels;

  stats.counts = detail::accumulate_trials(trials, stats.rows() * cols, options, [&](std::uint64_t i, auto& counts) {
    const TrialRecord r = run_trial(protocol, seed, i);
    const std::size_t row = r.intermediate_outcome ? BasicEnsembleStats<Real>::index_in(inter, *r.intermediate_outcome) : 0;
    ++counts[row * cols + BasicEnsembleStats<Real>::index_in(fin, r.final_outcome)];
  });
  return stats;
}

/// Two-party run: the left outcome is recorded as the intermediate outcome,
/// the right outcome as the final one.
template <typename Real>
BasicEnsembleStats<Real> run_ensemble(const BasicBipartiteProtocol<Real>& protocol, std::uint64_t trials,
                                      std::uint64_t seed, const ExecutionOptions& options = {}) {
  if (trials < 1) throw InvalidArgument("run_ensemble: trials must be at least 1");
  BasicEnsembleStats<Real> stats{protocol, trials, seed, {}, protocol.right_pvm.labels(), {}};
  if (protocol.left_pvm) stats.intermediate_labels = protocol.left_pvm->labels();
  const std::size_t cols = stats.final_labels.size();

  // Branch states are fixed by the left outcome; precompute them once.
  std::vector<Real> left_probs{Real(1)};
  std::vector<std::vector<Real>> right_probs;
  if (protocol.left_pvm) {
    left_probs.clear();
    for (const auto& o : measure_subsystem(protocol.state, *protocol.left_pvm, Side::Left)) {
      left_probs.push_back(o.probability);
      const auto& branch = o.conditional ? *o.conditional : protocol.state;
      std::vector<Real> r;
      for (const auto& ro : measure_subsystem(branch, protocol.right_pvm, Side::Right)) r.push_back(ro.probability);
      right_probs.push_back(std::move(r));
    }
  } else {
    std::vector<Real> r;
    for (const auto& ro : measure_subsystem(protocol.state, protocol.right_pvm, Side::Right)) r.push_back(ro.probability);
    right_probs.push_back(std::move(r));
  }

  stats.counts = detail::accumulate_trials(trials, stats.rows() * cols, options, [&](std::uint64_t i, auto& counts) {
    StreamRng rng(seed, i);
    const double u_left = rng.uniform();
    const double u_right = rng.uniform();
    const std::size_t row = detail::sample_index(left_probs, u_left);
    const std::size_t col = detail::sample_index(right_probs[row], u_right);
    ++counts[row * cols + col];
  });
  return stats;
}

template <typename Real = double>
struct BasicConditionalFrequencies {
  /// Intermediate-outcome frequencies among matched trials; empty when
  /// nothing was measured at t.
  BasicDistribution<Real> distribution;
  std::uint64_t matched = 0;
  std::uint64_t trials = 0;
};

/// Intermediate-outcome frequencies among trials whose final outcome is `condition`.
template <typename Real>
BasicConditionalFrequencies<Real> conditional_frequencies(const BasicEnsembleStats<Real>& stats,
                                                          const std::string& condition) {
  const std::uint64_t matched = stats.final_count(condition);
  if (matched == 0) throw EmptySelection(condition, 0, stats.trials);
  BasicConditionalFrequencies<Real> out{{}, matched, stats.trials};
  if (!stats.has_intermediate()) return out;
  const std::size_t col = BasicEnsembleStats<Real>::index_in(stats.final_labels, condition);
  std::vector<Real> freqs;
  for (std::size_t r = 0; r < stats.rows(); ++r) {
    freqs.push_back(static_cast<Real>(stats.count(r, col)) / static_cast<Real>(matched));
  }
  out.distribution = BasicDistribution<Real>(stats.intermediate_labels, freqs);
  return out;
}

/// Empirical distribution of final outcomes over all trials.
template <typename Real>
BasicDistribution<Real> final_frequencies(const BasicEnsembleStats<Real>& stats) {
  std::vector<Real> freqs;
  for (const auto& label : stats.final_labels) {
    freqs.push_back(static_cast<Real>(stats.final_count(label)) / static_cast<Real>(stats.trials));
  }
  return BasicDistribution<Real>(stats.final_labels, freqs);
}

/// Empirical distribution of intermediate outcomes over all trials.
template <typename Real>
BasicDistribution<Real> intermediate_frequencies(const BasicEnsembleStats<Real>& stats) {
  if (!stats.has_intermediate()) return {};
  std::vector<Real> freqs;
  for (std::size_t r = 0; r < stats.rows(); ++r) {
    std::uint64_t row_total = 0;
    for (std::size_t c = 0; c < stats.final_labels.size(); ++c) row_total += stats.count(r, c);
    freqs.push_back(static_cast<Real>(row_total) / static_cast<Real>(stats.trials));
  }
  return BasicDistribution<Real>(stats.intermediate_labels, freqs);
}

template <typename Real = double>
struct BasicAgreementReport {
  struct Entry {
    std::string label;
    Real frequency;
    Real probability;
    Real gate;
    bool pass;
  };
  std::vector<Entry> entries;
  std::uint64_t sample_size = 0;
  Real z = 0;
  bool pass = true;
};

/// Per-label z-gate: |freq - p| <= z sqrt(p (1 - p) / n) + EPS_NORM.
template <typename Real>
BasicAgreementReport<Real> agreement_check(const BasicDistribution<Real>& empirical, std::uint64_t sample_size,
                                           const BasicDistribution<Real>& analytic, Real z) {
  if (empirical.labels() != analytic.labels()) throw LabelMismatch("agreement_check: label sets differ");
  if (sample_size == 0) throw InvalidArgument("agreement_check: sample size must be positive");
  BasicAgreementReport<Real> report{{}, sample_size, z, true};
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const Real p = analytic[i].probability;
    const Real f = empirical[i].probability;
    const Real gate = z * std::sqrt(p * (Real(1) - p) / static_cast<Real>(sample_size)) + Tolerance<Real>::norm;
    const bool ok = std::abs(f - p) <= gate;
    report.entries.push_back({analytic[i].label, f, p, gate, ok});
    report.pass = report.pass && ok;
  }
  return report;
}

inline constexpr double kDefaultZ = 5.0;
inline constexpr std::uint64_t kDefaultTrials = 100000;

using Stage = BasicStage<double>;
using Protocol = BasicProtocol<double>;
using BipartiteProtocol = BasicBipartiteProtocol<double>;
using EnsembleStats = BasicEnsembleStats<double>;
using ConditionalFrequencies = BasicConditionalFrequencies<double>;
using AgreementReport = BasicAgreementReport<double>;

}  // namespace tsqc
