#include "tsqc/verify.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tsqc/random_instances.hpp"
#include "tsqc/reference.hpp"

namespace tsqc {

namespace {

constexpr std::size_t kMaxNotes = 5;

class Tally {
 public:
  explicit Tally(std::string name) { result_.name = std::move(name); }

  /// Records one instance whose worst deviation is `deviation` against `tol`.
  void numeric(double deviation, double tol, const std::string& what) {
    result_.max_deviation = std::max(result_.max_deviation, deviation);
    boolean(deviation <= tol, what + " (deviation " + format(deviation) + ")");
  }

  void boolean(bool ok, const std::string& what) {
    ++result_.instances;
    if (ok) return;
    ++result_.failures;
    if (result_.notes.size() < kMaxNotes) result_.notes.push_back(what);
  }

  void skip() { ++result_.skipped; }

  void summarize(std::string text) { result_.summary = std::move(text); }

  SuiteResult finish() { return std::move(result_); }

 private:
  static std::string format(double v) {
    std::ostringstream out;
    out.precision(3);
    out << std::scientific << v;
    return out.str();
  }

  SuiteResult result_;
};

double max_abs_diff(const Distribution& a, const Distribution& b) {
  if (a.labels() != b.labels()) return 1.0;
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i].probability - b[i].probability));
  return worst;
}

std::string label_of(std::uint64_t i) { return "instance " + std::to_string(i); }

/// A randomized pre/post/query configuration in `dim` dimensions.
struct Instance {
  SelectionBase base;
  std::string post_label;
  ProjectiveMeasurement query;

  SelectionContext context() const { return SelectionContext(base, post_label); }
};

long random_dim(StreamRng& rng, long lo, long hi) { return lo + static_cast<long>(rng.below(hi - lo + 1)); }

Instance random_instance(StreamRng& rng, long dim, bool with_evolution) {
  auto pre = random::state(rng, dim);
  auto post = random::pvm(rng, dim, rng.uniform() < 0.5, "b");
  auto query = random::pvm(rng, dim, rng.uniform() < 0.5, "q");
  auto u = with_evolution ? random::unitary(rng, dim) : UnitaryOp::identity(dim);
  auto v = with_evolution ? random::unitary(rng, dim) : UnitaryOp::identity(dim);
  const std::string label = post[rng.below(post.size())].label;
  return {SelectionBase(std::move(pre), std::move(post), std::move(u), std::move(v)), label, std::move(query)};
}

ProjectiveMeasurement relabeled(const ProjectiveMeasurement& pvm, const std::string& prefix) {
  std::vector<ProjectiveMeasurement::Outcome> outs;
  for (std::size_t i = 0; i < pvm.size(); ++i) outs.push_back({prefix + std::to_string(i), pvm[i].projector, std::nullopt});
  return ProjectiveMeasurement(std::move(outs));
}

}  // namespace

SuiteResult abl_sum_suite(std::uint64_t seed, std::uint64_t instances) {
  Tally tally("abl_sum_to_one");
  for (std::uint64_t i = 0; i < instances; ++i) {
    StreamRng rng(seed, i);
    const auto inst = random_instance(rng, random_dim(rng, 2, 4), rng.uniform() < 0.5);
    try {
      const auto d = abl_distribution(inst.context(), inst.query);
      double sum = 0;
      for (const auto& e : d) sum += e.probability;
      tally.numeric(std::abs(sum - 1.0), kEpsNorm, label_of(i));
    } catch (const ImpossiblePostSelection&) {
      tally.skip();
    }
  }
  return tally.finish();
}

SuiteResult time_symmetry_suite(std::uint64_t seed, std::uint64_t instances) {
  Tally tally("time_symmetry");
  for (std::uint64_t i = 0; i < instances; ++i) {
    StreamRng rng(seed, i);
    const long dim = random_dim(rng, 2, 4);
    const auto a = random::state(rng, dim);
    const auto b = random::state(rng, dim);
    const auto q = random::pvm(rng, dim, rng.uniform() < 0.5);
    try {
      const auto forward = abl_distribution(SelectionContext::with_post_state(a, b), q);
      const auto backward = abl_distribution(SelectionContext::with_post_state(b, a), q);
      tally.numeric(max_abs_diff(forward, backward), kEpsNorm, label_of(i));
    } catch (const ImpossiblePostSelection&) {
      tally.skip();
    }
  }
  return tally.finish();
}

SuiteResult born_marginalization_suite(std::uint64_t seed, std::uint64_t instances) {
  Tally tally("born_marginalization");
  for (std::uint64_t i = 0; i < instances; ++i) {
    StreamRng rng(seed, i);
    const auto inst = random_instance(rng, random_dim(rng, 2, 4), rng.uniform() < 0.5);
    const auto finals = post_outcome_distribution(inst.base, std::optional<ProjectiveMeasurement>(inst.query));
    std::vector<double> mixed(inst.query.size(), 0.0);
    bool ok = true;
    for (const auto& k : finals) {
      if (k.probability <= kEpsProb) continue;
      try {
        const auto abl = abl_distribution(SelectionContext(inst.base, k.label), inst.query);
        for (std::size_t j = 0; j < mixed.size(); ++j) mixed[j] += k.probability * abl[j].probability;
      } catch (const ImpossiblePostSelection&) {
        ok = false;
      }
    }
    const auto born = born_distribution(inst.base.state_at_t(), inst.query);
    double worst = 0;
    for (std::size_t j = 0; j < mixed.size(); ++j) worst = std::max(worst, std::abs(mixed[j] - born[j].probability));
    tally.numeric(ok ? worst : 1.0, kEpsNorm, label_of(i));
  }
  return tally.finish();
}

SuiteResult oracle_equivalence_suite(std::uint64_t seed, std::uint64_t instances) {
  Tally tally("oracle_equivalence");
  for (std::uint64_t i = 0; i < instances; ++i) {
    StreamRng rng(seed, i);
    const long dim = random_dim(rng, 2, 4);
    const bool evolve_too = rng.uniform() < 0.5;
    const auto u = evolve_too ? random::unitary(rng, dim) : UnitaryOp::identity(dim);
    const auto v = evolve_too ? random::unitary(rng, dim) : UnitaryOp::identity(dim);
    const auto a = random::state(rng, dim);

    if (i % 2 == 0) {
      // Rank-1 query and post state: check against the closed form as well.
      const auto b = random::state(rng, dim);
      const Matrix<double> q_basis = random::unitary_matrix(rng, dim);
      std::vector<std::string> labels;
      for (long j = 0; j < dim; ++j) labels.push_back("q" + std::to_string(j));
      const auto q = ProjectiveMeasurement::from_basis(q_basis, labels);
      const SelectionContext ctx(SelectionBase(a, ProjectiveMeasurement::lift(b, "b", "not_b"), u, v), "b");
      const auto closed = reference::rank_one_abl(a.amplitudes(), b.amplitudes(), u.matrix(), v.matrix(), q_basis);
      const auto table = reference::path_table(a.amplitudes(), u.matrix(), v.matrix(), reference::kraus_operators(q),
                                               reference::projectors(ctx.post_pvm));
      const auto enumerated = reference::conditional_on_final(table, 0);
      const auto got = abl_distribution(ctx, q);
      double worst = 0;
      for (std::size_t j = 0; j < got.size(); ++j) {
        worst = std::max(worst, std::abs(got[j].probability - closed[j]));
        worst = std::max(worst, enumerated ? std::abs(got[j].probability - (*enumerated)[j]) : 1.0);
      }
      tally.numeric(worst, kEpsNorm, label_of(i) + " (rank one)");
      continue;
    }

    const auto post = random::pvm(rng, dim, true, "b");
    const auto q = random::pvm(rng, dim, true, "q");
    const std::size_t k = rng.below(post.size());
    const SelectionContext ctx(SelectionBase(a, post, u, v), post[k].label);
    const auto table = reference::path_table(a.amplitudes(), u.matrix(), v.matrix(), reference::kraus_operators(q),
                                             reference::projectors(post));
    const auto enumerated = reference::conditional_on_final(table, k);
    try {
      const auto got = abl_distribution(ctx, q);
      double worst = enumerated ? 0.0 : 1.0;
      for (std::size_t j = 0; enumerated && j < got.size(); ++j) {
        worst = std::max(worst, std::abs(got[j].probability - (*enumerated)[j]));
      }
      tally.numeric(worst, kEpsNorm, label_of(i) + " (degenerate)");
    } catch (const ImpossiblePostSelection&) {
      tally.boolean(!enumerated, label_of(i) + ": engine reports impossible, oracle does not");
    }
  }
  return tally.finish();
}

SuiteResult compound_triviality_suite(std::uint64_t seed, std::uint64_t triples) {
  Tally tally("compound_triviality");
  std::uint64_t nontrivial_count = 0;
  for (std::uint64_t i = 0; i < triples; ++i) {
    StreamRng rng(seed, i);
    const long dim = 2 + static_cast<long>(i % 2);
    const auto pre = random::state(rng, dim);
    const auto post = random::pvm(rng, dim, rng.uniform() < 0.5, "b");
    const std::string label = post[rng.below(post.size())].label;
    // A quarter of the queries commute with the post measurement and a quarter
    // share the preparation as an eigenvector, so both classifications occur.
    ProjectiveMeasurement query = random::pvm(rng, dim, rng.uniform() < 0.5, "q");
    if (i % 4 == 1) query = relabeled(post, "q");
    if (i % 4 == 3) query = ProjectiveMeasurement::lift(pre, "q_pre", "q_rest");
    const Protocol actual(pre, Nothing{}, post, label);
    try {
      const auto verdict = evaluate(CounterfactualStatement(actual, query, Flavor::CompoundAntecedent));
      const bool nontrivial = verdict.classification == Classification::NontriviallyTrue;
      nontrivial_count += nontrivial ? 1 : 0;
      const bool consistent = nontrivial == (verdict.cotenability.tvd <= kEpsCoten);
      tally.numeric(consistent ? verdict.max_deviation : 1.0, kEpsNorm,
                    label_of(i) + (consistent ? "" : ": classification disagrees with cotenability"));
    } catch (const ImpossiblePostSelection&) {
      tally.skip();
    }
  }
  tally.summarize(std::to_string(nontrivial_count) + " NONTRIVIALLY_TRUE, " + std::to_string(triples - nontrivial_count) +
                  " other");
  return tally.finish();
}

SuiteResult single_antecedent_suite(std::uint64_t seed, std::uint64_t instances) {
  Tally tally("single_antecedent_classification");
  for (std::uint64_t i = 0; i < instances; ++i) {
    StreamRng rng(seed, i);
    const long dim = random_dim(rng, 2, 4);
    const bool commuting = i % 3 == 0;
    ProjectiveMeasurement post = random::pvm(rng, dim, false, "b");
    // Commuting case: the preparation is an eigenvector of the post
    // measurement and the query is the post measurement itself.
    PureState pre = commuting ? PureState(post[rng.below(post.size())].projector.col(0).normalized())
                              : random::state(rng, dim);
    if (commuting) {
      const std::size_t j = rng.below(post.size());
      Vector<double> col = post[j].projector * random::gaussian_vector(rng, dim);
      pre = PureState(col / col.norm());
    }
    const ProjectiveMeasurement query = commuting ? relabeled(post, "q") : random::pvm(rng, dim, rng.uniform() < 0.5, "q");
    const std::string label = commuting ? std::string() : post[rng.below(post.size())].label;
    std::string selected = label;
    if (commuting) {
      for (const auto& o : post.outcomes()) {
        if (born_distribution(pre, post)[o.label] > 0.5) selected = o.label;
      }
    }
    const Protocol actual(pre, Nothing{}, post, selected);
    try {
      const auto verdict = evaluate(CounterfactualStatement(actual, query, Flavor::SingleAntecedent));
      const bool false_iff = (verdict.classification == Classification::False) == (verdict.max_deviation > kEpsNorm);
      if (commuting) {
        tally.numeric(false_iff ? verdict.max_deviation : 1.0, kEpsNorm, label_of(i) + " (commuting)");
      } else {
        tally.boolean(false_iff, label_of(i) + ": classification disagrees with deviation");
      }
    } catch (const ImpossiblePostSelection&) {
      tally.skip();
    }
  }
  return tally.finish();
}

SuiteResult core_invariant_suite(std::uint64_t seed, std::uint64_t instances) {
  Tally tally("core_invariants");
  const auto singlet = catalog::singlet();
  const auto bob = catalog::sigma_z();
  for (std::uint64_t i = 0; i < instances; ++i) {
    StreamRng rng(seed, i);
    const long dim = random_dim(rng, 2, 4);
    const auto psi = random::state(rng, dim);
    const auto pvm = random::pvm(rng, dim, rng.uniform() < 0.5);
    const auto u = random::unitary(rng, dim);
    double worst = 0;

    const auto born = born_distribution(psi, pvm);
    double sum = 0;
    for (const auto& e : born) sum += e.probability;
    worst = std::max(worst, std::abs(sum - 1.0));

    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    const PureState rotated = psi.with_amplitudes(psi.amplitudes() * std::polar(1.0, phase));
    worst = std::max(worst, max_abs_diff(born, born_distribution(rotated, pvm)));

    for (const auto& e : born) {
      if (e.probability <= 1e-6) continue;
      const auto once = collapse(psi, pvm, e.label);
      const auto twice = collapse(once, pvm, e.label);
      worst = std::max(worst, (once.amplitudes() - twice.amplitudes()).cwiseAbs().maxCoeff());
    }

    worst = std::max(worst, std::abs(evolve(psi, u).amplitudes().norm() - 1.0));

    const long dl = random_dim(rng, 2, 4);
    const long dr = random_dim(rng, 2, 4);
    const Vector<double> amps = random::gaussian_vector(rng, dl * dr);
    const BipartiteState bi(detail::index_labels(dl), detail::index_labels(dr), amps / amps.norm());
    for (Side side : {Side::Left, Side::Right}) {
      const auto rho = reduced_density(bi, side);
      worst = std::max(worst, std::abs(rho.matrix().trace().real() - 1.0));
      worst = std::max(worst, std::max(0.0, -rho.eigenvalues().minCoeff()));
      worst = std::max(worst, std::max(0.0, rho.eigenvalues().maxCoeff() - 1.0));
    }

    // No-signaling on the singlet for a random left measurement.
    const auto left = random::pvm(rng, 2);
    std::vector<double> marginal(2, 0.0);
    for (const auto& l : measure_subsystem(singlet, left, Side::Left)) {
      if (!l.conditional) continue;
      const auto r = measure_subsystem(*l.conditional, bob, Side::Right);
      for (std::size_t k = 0; k < 2; ++k) marginal[k] += l.probability * r[k].probability;
    }
    const auto idle = measure_subsystem(singlet, bob, Side::Right);
    for (std::size_t k = 0; k < 2; ++k) worst = std::max(worst, std::abs(marginal[k] - idle[k].probability));

    tally.numeric(worst, kEpsNorm, label_of(i));
  }
  return tally.finish();
}

SuiteResult commuting_cotenability_suite(std::uint64_t seed, std::uint64_t instances) {
  Tally tally("commuting_cotenability");
  for (std::uint64_t i = 0; i < instances; ++i) {
    StreamRng rng(seed, i);
    const long dim = random_dim(rng, 2, 4);
    const auto post = random::pvm(rng, dim, rng.uniform() < 0.5, "b");
    // Query built from the post projectors: the post measurement itself or a
    // refinement of it by eigenvectors of its projectors.
    std::vector<ProjectiveMeasurement::Outcome> outs;
    for (std::size_t k = 0; k < post.size(); ++k) {
      Eigen::SelfAdjointEigenSolver<Matrix<double>> eig(post[k].projector);
      for (long c = 0; c < dim; ++c) {
        if (eig.eigenvalues()(c) < 0.5) continue;
        const Vector<double> e = eig.eigenvectors().col(c);
        outs.push_back({"q" + std::to_string(outs.size()), e * e.adjoint(), std::nullopt});
      }
    }
    const ProjectiveMeasurement query = i % 2 == 0 ? relabeled(post, "q") : ProjectiveMeasurement(std::move(outs));
    const Protocol actual(random::state(rng, dim), Nothing{}, post, post[0].label);
    const auto report = cotenability_report(actual, query);
    tally.numeric(report.cotenable ? report.tvd : 1.0, kEpsCoten, label_of(i));
  }
  return tally.finish();
}

std::uint64_t VerifyReport::passed_count() const {
  std::uint64_t n = 0;
  for (const auto& s : suites) n += s.passed() ? 1 : 0;
  for (const auto& s : scenarios) n += s.passed() ? 1 : 0;
  return n;
}

std::uint64_t VerifyReport::failed_count() const { return suites.size() + scenarios.size() - passed_count(); }

const SuiteResult& VerifyReport::suite(const std::string& name) const {
  for (const auto& s : suites) {
    if (s.name == name) return s;
  }
  throw UnknownLabel(name);
}

VerifyReport run_verification(const VerifyOptions& options) {
  VerifyReport report;
  report.options = options;
  const auto suite_seed = [&](std::uint64_t k) { return derive_seed(options.seed, 1000 + k); };
  report.suites.push_back(core_invariant_suite(suite_seed(0), options.instances));
  report.suites.push_back(abl_sum_suite(suite_seed(1), options.instances));
  report.suites.push_back(time_symmetry_suite(suite_seed(2), options.instances));
  report.suites.push_back(born_marginalization_suite(suite_seed(3), options.instances));
  report.suites.push_back(oracle_equivalence_suite(suite_seed(4), options.instances));
  report.suites.push_back(compound_triviality_suite(suite_seed(5), options.triples));
  report.suites.push_back(single_antecedent_suite(suite_seed(6), options.instances));
  report.suites.push_back(commuting_cotenability_suite(suite_seed(7), options.instances));

  for (const auto& info : scenario_catalogue()) {
    report.scenarios.push_back(
        run_scenario(info.name, nlohmann::json::object(), options.trials, options.seed, options.execution, options.z));
  }
  report.scenarios.push_back(run_scenario("quantum_raffle", {{"raffle_held", false}}, options.trials, options.seed,
                                          options.execution, options.z));
  return report;
}

}  // namespace tsqc
