#include "tsqc/scenarios.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "tsqc/json_io.hpp"

namespace tsqc {

namespace {

using nlohmann::json;

template <typename Container>
const auto& find_named(const Container& items, const std::string& name) {
  for (const auto& item : items) {
    if (item.name == name) return item;
  }
  throw UnknownLabel(name);
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed << v;
  return out.str();
}

std::string fmt_sci(double v) {
  std::ostringstream out;
  out.precision(1);
  out << std::scientific << v;
  return out.str();
}

/// Validated access to a scenario's parameter object.
class Params {
 public:
  Params(const json& params, const ScenarioInfo& info) : params_(params.is_null() ? json::object() : params) {
    if (!params_.is_object()) throw InvalidArgument("scenario parameters must be a JSON object");
    for (const auto& [key, value] : params_.items()) {
      bool known = false;
      for (const auto& doc : info.params) known = known || doc.name == key;
      if (!known) throw InvalidArgument("scenario '" + info.name + "' has no parameter '" + key + "'");
    }
  }

  double number(const std::string& key, double fallback) const {
    if (!params_.contains(key)) return fallback;
    if (!params_[key].is_number()) throw InvalidArgument("parameter '" + key + "' must be a number");
    const double v = params_[key].get<double>();
    if (!std::isfinite(v)) throw InvalidArgument("parameter '" + key + "' must be finite");
    return v;
  }

  long integer(const std::string& key, long fallback) const {
    if (!params_.contains(key)) return fallback;
    if (!params_[key].is_number_integer()) throw InvalidArgument("parameter '" + key + "' must be an integer");
    return params_[key].get<long>();
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!params_.contains(key)) return fallback;
    if (!params_[key].is_boolean()) throw InvalidArgument("parameter '" + key + "' must be true or false");
    return params_[key].get<bool>();
  }

 private:
  json params_;
};

/// Accumulates the sections of a report and numbers the ensemble runs so each
/// gets its own derived seed.
class ReportBuilder {
 public:
  ReportBuilder(ScenarioReport& report, const ExecutionOptions& options, double z)
      : report_(report), options_(options), z_(z) {}

  std::uint64_t next_seed() { return derive_seed(report_.seed, runs_++); }

  const EnsembleStats& run(const std::string& name, const Protocol& protocol) {
    return add_run(name, run_ensemble(protocol, report_.trials, next_seed(), options_));
  }

  const EnsembleStats& run(const std::string& name, const BipartiteProtocol& protocol) {
    return add_run(name, run_ensemble(protocol, report_.trials, next_seed(), options_));
  }

  const EnsembleStats& add_run(const std::string& name, EnsembleStats stats) {
    report_.runs.push_back({name, std::move(stats)});
    return report_.runs.back().stats;
  }

  void analytic(const std::string& name, const Distribution& d) { report_.analytic.push_back({name, d}); }
  void value(const std::string& name, double v) { report_.values.push_back({name, v}); }
  void say(const std::string& line) { report_.narrative.push_back(line); }

  void check(const std::string& name, bool pass, const std::string& detail) {
    report_.checks.push_back({name, pass, detail});
  }

  void close(const std::string& name, double actual, double expected, double tol = kEpsNorm) {
    check(name, std::abs(actual - expected) <= tol,
          "value " + fmt(actual) + " vs expected " + fmt(expected) + " (tolerance " + fmt_sci(tol) + ")");
  }

  void gate(const std::string& name, const Distribution& empirical, std::uint64_t n, const Distribution& analytic) {
    report_.empirical.push_back({name, empirical});
    report_.gates.push_back({name, agreement_check(empirical, n, analytic, z_)});
  }

  /// Gate on intermediate outcomes among trials selected on `condition`.
  /// Returns the matched count; a run with no selected trial fails a check.
  std::uint64_t conditional_gate(const std::string& name, const EnsembleStats& stats, const std::string& condition,
                                 const Distribution& analytic) {
    try {
      const auto cond = conditional_frequencies(stats, condition);
      gate(name, cond.distribution, cond.matched, analytic);
      return cond.matched;
    } catch (const EmptySelection& e) {
      check(name, false, e.what());
      return 0;
    }
  }

  void verdict(const std::string& name, const CounterfactualStatement& stmt) {
    report_.verdicts.push_back({name, evaluate(stmt)});
  }

  const Distribution& analytic_at(const std::string& name) const { return report_.analytic_distribution(name); }
  const EnsembleStats& run_at(const std::string& name) const { return report_.run(name); }
  std::uint64_t trials() const { return report_.trials; }
  const ExecutionOptions& options() const { return options_; }
  double z() const { return z_; }

 private:
  ScenarioReport& report_;
  ExecutionOptions options_;
  double z_;
  std::uint64_t runs_ = 0;
};

Distribution two_way(const std::string& yes, double p_yes, const std::string& no) {
  return Distribution({{yes, p_yes}, {no, 1.0 - p_yes}});
}

std::optional<ProjectiveMeasurement> measured(const ProjectiveMeasurement& q) { return q; }

/// Shared treatment of one counterfactual query on a selected protocol:
/// analytic ABL and Born, a run with the query measured at t, the three
/// agreement gates, and both verdicts.
void query_section(ReportBuilder& b, const std::string& tag, const Protocol& actual,
                   const ProjectiveMeasurement& query) {
  const auto base = selection_base(actual);
  const auto ctx = selection_context(actual);
  const auto abl = abl_distribution(ctx, query);
  const auto born = born_distribution(base.state_at_t(), query);
  const auto final_with = post_outcome_distribution(base, measured(query));
  b.analytic("abl_" + tag, abl);
  b.analytic("born_" + tag, born);
  b.analytic("final_with_" + tag, final_with);

  const Protocol measuring(actual.preparation, query, actual.pre_to_t, base.t_to_post, actual.post_pvm,
                           actual.selection);
  const auto& stats = b.run("measure_" + tag, measuring);
  b.conditional_gate("conditional_" + tag, stats, *actual.selection, abl);
  b.gate("unfiltered_" + tag, intermediate_frequencies(stats), stats.trials, born);
  b.gate("final_" + tag, final_frequencies(stats), stats.trials, final_with);

  b.verdict("single_" + tag, CounterfactualStatement(actual, query, Flavor::SingleAntecedent));
  b.verdict("compound_" + tag, CounterfactualStatement(actual, query, Flavor::CompoundAntecedent));
}

/// Exact check that every selected trial shows `label` at t.
void exact_conditional(ReportBuilder& b, const std::string& name, const EnsembleStats& stats,
                       const std::string& condition, const std::string& label) {
  const std::uint64_t matched = stats.final_count(condition);
  const std::uint64_t hits = stats.count(std::optional<std::string>(label), condition);
  b.check(name, matched >= 1 && hits == matched,
          std::to_string(hits) + " of " + std::to_string(matched) + " selected trials show " + label);
}

// ---------------------------------------------------------------------------

void three_box(ReportBuilder& b, const Params&) {
  const auto pre = catalog::three_box_pre();
  const auto post = ProjectiveMeasurement::lift(catalog::three_box_post(), "b", "not_b");
  const Protocol actual(pre, Nothing{}, post, "b");

  const auto undisturbed = post_outcome_distribution(selection_base(actual));
  b.analytic("final_undisturbed", undisturbed);
  b.value("p_b_undisturbed", undisturbed["b"]);
  const auto& idle = b.run("no_measurement", actual);
  b.gate("final_undisturbed", final_frequencies(idle), idle.trials, undisturbed);

  for (const std::string box : {"A", "B"}) {
    const std::string tag = "box_" + box;
    query_section(b, tag, actual, catalog::box_query(box));
    const auto& abl = b.analytic_at("abl_" + tag);
    b.close("abl_in_" + box + "_is_one", abl["in_" + box], 1.0);
    exact_conditional(b, "selected_all_in_" + box, b.run_at("measure_" + tag), "b", "in_" + box);
  }
  b.say("Pre (|A>+|B>+|C>)/sqrt3, post (|A>+|B>-|C>)/sqrt3: ABL gives in_A = 1 when box A is opened "
        "and in_B = 1 when box B is opened instead.");
  b.say("The two openings are alternative runs; no trial opens both boxes.");
  b.say("Single-antecedent reading: without filtering on b the box-A query gives the Born value 1/3, so the "
        "statement is false.");
  b.say("Compound-antecedent reading: filtering the counterfactual world on b reproduces ABL exactly.");
}

void aad_dispersion_free(ReportBuilder& b, const Params&) {
  const Protocol actual(catalog::z_plus(), Nothing{}, catalog::sigma_x(), "x+");
  const auto undisturbed = post_outcome_distribution(selection_base(actual));
  b.analytic("final_undisturbed", undisturbed);

  query_section(b, "sigma_z", actual, catalog::sigma_z());
  query_section(b, "sigma_x", actual, catalog::sigma_x());
  b.close("abl_z_plus_is_one", b.analytic_at("abl_sigma_z")["z+"], 1.0);
  b.close("abl_x_plus_is_one", b.analytic_at("abl_sigma_x")["x+"], 1.0);
  exact_conditional(b, "selected_all_z_plus", b.run_at("measure_sigma_z"), "x+", "z+");
  exact_conditional(b, "selected_all_x_plus", b.run_at("measure_sigma_x"), "x+", "x+");
  b.say("Pre z+, post x+: ABL assigns probability 1 to z+ for a sigma_z query and to x+ for a sigma_x query.");
  b.say("Those certainties hold only among post-selected trials; unfiltered, sigma_x at t is 50/50.");
}

void crossed_polarizers(ReportBuilder& b, const Params& p) {
  const double theta = p.number("theta", std::numbers::pi / 4);
  b.value("theta", theta);
  const auto middle = catalog::absorbing_polarizer(theta);
  const Protocol actual(catalog::photon_x(), Nothing{}, catalog::absorbing_polarizer(std::numbers::pi / 2), "pass");
  const auto base = selection_base(actual);
  const auto ctx = selection_context(actual);

  const auto without = post_outcome_distribution(base);
  const auto with = post_outcome_distribution(base, measured(middle));
  b.analytic("final_without_middle", without);
  b.analytic("final_with_middle", with);
  const double t_without = sequence_probability<double>(ctx, std::nullopt);
  const double t_with = sequence_probability<double>(ctx, IntermediateEvent{middle, "pass"});
  b.value("transmission_without_middle", t_without);
  b.value("transmission_with_middle", t_with);
  const double malus = std::pow(std::cos(theta), 2) * std::pow(std::sin(theta), 2);
  b.close("no_transmission_without_middle", t_without, 0.0);
  b.close("transmission_matches_malus", t_with, malus);
  b.close("absorbed_light_never_passes", with["pass"], t_with);

  const auto& dark = b.run("no_middle_polarizer", actual);
  b.check("zero_sampled_passes", dark.final_count("pass") == 0,
          std::to_string(dark.final_count("pass")) + " of " + std::to_string(dark.trials) + " photons passed");
  b.gate("final_without_middle", final_frequencies(dark), dark.trials, without);

  const auto& lit = b.run("middle_polarizer", actual.with_stage(middle));
  b.gate("final_with_middle", final_frequencies(lit), lit.trials, with);
  const double through = static_cast<double>(lit.count(std::optional<std::string>("pass"), "pass")) /
                         static_cast<double>(lit.trials);
  b.gate("transmitted_both", two_way("transmitted", through, "stopped"), lit.trials,
         two_way("transmitted", t_with, "stopped"));

  const auto coten = cotenability_report(actual, middle);
  b.value("cotenability_tvd", coten.tvd);
  b.value("delta_selected", coten.delta_selected.value_or(0.0));
  b.close("delta_selected_matches_transmission", coten.delta_selected.value_or(0.0), t_with);
  b.check("middle_polarizer_not_cotenable", !coten.cotenable || malus <= kEpsProb,
          "tvd " + fmt(coten.tvd) + ", cotenable = " + (coten.cotenable ? "true" : "false"));

  b.say("Crossed polarizers at 0 and pi/2 pass no photons: " + std::to_string(dark.final_count("pass")) +
        " passes in " + std::to_string(dark.trials) + " trials.");
  b.say("Inserting a polarizer at theta = " + fmt(theta) + " lets cos^2 sin^2 = " + fmt(t_with) + " through.");
  if (malus <= kEpsProb) {
    // Nothing passes either way, so there is no post-selected ensemble to
    // make a counterfactual claim about.
    b.say("No photon reaches 'pass' even with the inserted polarizer; the counterfactual verdicts are undefined.");
    return;
  }
  b.verdict("single_middle", CounterfactualStatement(actual, middle, Flavor::SingleAntecedent));
  b.verdict("compound_middle", CounterfactualStatement(actual, middle, Flavor::CompoundAntecedent));
  b.say("Whoever watches the last polarizer can tell the middle one was inserted: it is not cotenable with the "
        "actual background, delta at 'pass' = " + fmt(coten.delta_selected.value_or(0.0)) + ".");
}

/// Right-side marginal when the left side is measured with `left` (or not at all).
Distribution right_marginal(const BipartiteState& state, const std::optional<ProjectiveMeasurement>& left,
                            const ProjectiveMeasurement& right) {
  std::vector<double> probs(right.size(), 0.0);
  if (!left) {
    const auto outs = measure_subsystem(state, right, Side::Right);
    for (std::size_t k = 0; k < outs.size(); ++k) probs[k] = outs[k].probability;
  } else {
    for (const auto& l : measure_subsystem(state, *left, Side::Left)) {
      if (!l.conditional) continue;
      const auto outs = measure_subsystem(*l.conditional, right, Side::Right);
      for (std::size_t k = 0; k < outs.size(); ++k) probs[k] += l.probability * outs[k].probability;
    }
  }
  return Distribution(right.labels(), probs);
}

void epr_no_signaling(ReportBuilder& b, const Params&) {
  const auto singlet = catalog::singlet();
  const Matrix<double> half_identity = Matrix<double>::Identity(2, 2) / 2.0;
  for (const auto& [side, tag] : {std::pair{Side::Left, "left"}, std::pair{Side::Right, "right"}}) {
    const auto rho = reduced_density(singlet, side);
    const double dev = (rho.matrix() - half_identity).cwiseAbs().maxCoeff();
    b.value(std::string("reduced_") + tag + "_max_deviation_from_half_identity", dev);
    b.close(std::string("reduced_") + tag + "_is_half_identity", dev, 0.0);
  }

  const auto bob = catalog::sigma_z();
  const std::vector<std::pair<std::string, std::optional<ProjectiveMeasurement>>> settings = {
      {"z", catalog::sigma_z()}, {"x", catalog::sigma_x()}, {"none", std::nullopt}};
  std::vector<Distribution> empirical;
  for (const auto& [name, alice] : settings) {
    const auto analytic = right_marginal(singlet, alice, bob);
    b.analytic("bob_alice_" + name, analytic);
    const auto& stats = b.run("alice_" + name, BipartiteProtocol(singlet, alice, bob));
    empirical.push_back(final_frequencies(stats));
    b.gate("bob_alice_" + name, empirical.back(), stats.trials, analytic);
  }
  const auto& z_run = b.run_at("alice_z");
  b.check("anticorrelated_along_z",
          z_run.count(std::optional<std::string>("z+"), "z+") == 0 && z_run.count(std::optional<std::string>("z-"), "z-") == 0,
          "equal outcomes on both sides never occur");

  // Two independent frequencies with p = 1/2 differ by sd sqrt(2 * 1/4 / n).
  const double n = static_cast<double>(b.trials());
  const double pair_gate = b.z() * std::sqrt(0.5 / n) + kEpsNorm;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    for (std::size_t j = i + 1; j < settings.size(); ++j) {
      const double tvd = total_variation(empirical[i], empirical[j]);
      const std::string name = "bob_tvd_" + settings[i].first + "_vs_" + settings[j].first;
      b.value(name, tvd);
      b.check(name, tvd <= pair_gate, "tvd " + fmt(tvd) + " vs gate " + fmt(pair_gate));
    }
  }
  b.say("Each half of the singlet has reduced state I/2, so Bob's sigma_z statistics carry no trace of "
        "Alice's setting (z, x or none).");
}

void epr_timelike_detection(ReportBuilder& b, const Params&) {
  const Protocol actual(catalog::z_plus(), Nothing{}, catalog::sigma_z(), "z+");
  const auto base = selection_base(actual);
  const auto idle_dist = post_outcome_distribution(base);
  const auto busy_dist = post_outcome_distribution(base, measured(catalog::sigma_x()));
  b.analytic("bob_alice_idle", idle_dist);
  b.analytic("bob_alice_measures_x", busy_dist);
  b.value("detection_probability", busy_dist["z-"]);
  b.close("detection_probability_is_half", busy_dist["z-"], 0.5);

  const auto& idle = b.run("alice_idle", actual);
  b.check("idle_never_detected", idle.final_count("z-") == 0,
          std::to_string(idle.final_count("z-")) + " z- results with Alice idle");
  b.gate("bob_alice_idle", final_frequencies(idle), idle.trials, idle_dist);
  const auto& busy = b.run("alice_measures_x", actual.with_stage(catalog::sigma_x()));
  b.gate("bob_alice_measures_x", final_frequencies(busy), busy.trials, busy_dist);

  const auto coten = cotenability_report(actual, catalog::sigma_x());
  b.value("delta_selected", coten.delta_selected.value_or(0.0));
  b.check("alice_measurement_not_cotenable", !coten.cotenable, "tvd " + fmt(coten.tvd));
  b.say("Single spin prepared z+ at t_a, Bob measures sigma_z at t_b.");
  b.say("With Alice idle Bob never sees z-; if Alice measures sigma_x at t he sees z- half the time, and each "
        "z- tells him with certainty that she measured.");
}

void quantum_raffle(ReportBuilder& b, const Params& p) {
  const long n_coins = p.integer("n_coins", 3);
  if (n_coins < 1 || n_coins > 64) throw InvalidArgument("n_coins must be between 1 and 64");
  const bool held = p.flag("raffle_held", true);
  b.value("n_coins", static_cast<double>(n_coins));

  const Stage stage = held ? Stage(catalog::coin_flip()) : Stage(Nothing{});
  const Protocol coin(catalog::coin_ready(), stage, catalog::heads_query());
  const auto per_coin = post_outcome_distribution(selection_base(coin));
  b.analytic("coin", per_coin);
  const double p_heads = per_coin["heads"];

  // Binomial law of the number M of heads among independent coins.
  std::vector<std::string> m_labels;
  std::vector<double> m_probs;
  for (long m = 0; m <= n_coins; ++m) {
    m_labels.push_back("M=" + std::to_string(m));
    const double choose = std::exp(std::lgamma(n_coins + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n_coins - m + 1.0));
    m_probs.push_back(choose * std::pow(p_heads, m) * std::pow(1.0 - p_heads, n_coins - m));
  }
  double total = 0;
  for (double q : m_probs) total += q;
  for (double& q : m_probs) q /= total;
  const Distribution entrants(m_labels, m_probs);
  b.analytic("entrants", entrants);
  b.value("p_no_winner", m_probs[0]);

  // Raffle r uses coin trials r * n_coins ... r * n_coins + n_coins - 1 of one stream.
  const std::uint64_t seed = b.next_seed();
  const std::uint64_t coins = b.trials() * static_cast<std::uint64_t>(n_coins);
  const auto& coin_stats = b.add_run("coins", run_ensemble(coin, coins, seed, b.options()));
  const auto heads_index = coin.post_pvm.index_of("heads");
  const auto histogram = detail::accumulate_trials(
      b.trials(), static_cast<std::size_t>(n_coins + 1), b.options(), [&](std::uint64_t r, auto& counts) {
        std::size_t m = 0;
        for (long c = 0; c < n_coins; ++c) {
          const auto rec = run_trial(coin, seed, r * static_cast<std::uint64_t>(n_coins) + static_cast<std::uint64_t>(c));
          if (rec.final_outcome == coin.post_pvm[heads_index].label) ++m;
        }
        ++counts[m];
      });
  std::vector<double> m_freqs;
  for (auto c : histogram) m_freqs.push_back(static_cast<double>(c) / static_cast<double>(b.trials()));

  b.gate("coin", final_frequencies(coin_stats), coin_stats.trials, per_coin);
  b.gate("entrants", Distribution(m_labels, m_freqs), b.trials(), entrants);
  b.gate("no_winner", two_way("no_winner", m_freqs[0], "winner"), b.trials(), two_way("no_winner", m_probs[0], "winner"));
  if (!held) {
    b.check("no_heads_without_raffle", coin_stats.final_count("heads") == 0 && histogram[0] == b.trials(),
            std::to_string(coin_stats.final_count("heads")) + " heads, " + std::to_string(histogram[0]) + " of " +
                std::to_string(b.trials()) + " raffles with M = 0");
  }
  b.say(held ? "Raffle held: every coin is flipped to (|heads>+|tails>)/sqrt2, so M is binomial(N, 1/2) and "
               "there is no winner with probability 2^-N."
             : "No raffle: every coin stays ready, which is orthogonal to heads, so M = 0 and there is never a "
               "winner.");
  b.say("How a winner is drawn from the entrants is not modeled; a winner exists iff M > 0.");
}

using Runner = std::function<void(ReportBuilder&, const Params&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"three_box", three_box},
      {"quantum_raffle", quantum_raffle},
      {"crossed_polarizers", crossed_polarizers},
      {"epr_no_signaling", epr_no_signaling},
      {"epr_timelike_detection", epr_timelike_detection},
      {"aad_dispersion_free", aad_dispersion_free},
  };
  return table;
}

}  // namespace

bool ScenarioReport::passed() const {
  for (const auto& g : gates) {
    if (!g.report.pass) return false;
  }
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

const Distribution& ScenarioReport::analytic_distribution(const std::string& name) const {
  return find_named(analytic, name).distribution;
}

const Distribution& ScenarioReport::empirical_distribution(const std::string& name) const {
  return find_named(empirical, name).distribution;
}

double ScenarioReport::value(const std::string& name) const { return find_named(values, name).value; }
const EnsembleStats& ScenarioReport::run(const std::string& name) const { return find_named(runs, name).stats; }
const Gate& ScenarioReport::gate(const std::string& name) const { return find_named(gates, name); }
const Check& ScenarioReport::check(const std::string& name) const { return find_named(checks, name); }
const Verdict& ScenarioReport::verdict(const std::string& name) const { return find_named(verdicts, name).verdict; }

const std::vector<ScenarioInfo>& scenario_catalogue() {
  static const std::vector<ScenarioInfo> catalogue = {
      {"three_box",
       "Three-box pre/post-selection; box A and box B as alternative queries, with both counterfactual readings.",
       {}},
      {"quantum_raffle",
       "N quantum coins on {ready, heads, tails}; M = number of heads at t_b decides whether there is a winner.",
       {{"n_coins", "integer", "3", "number of prospective entrants (1..64)"},
        {"raffle_held", "boolean", "true", "flip the coins at t (otherwise they stay ready)"}}},
      {"crossed_polarizers",
       "Absorbing polarizers at 0 and pi/2, optionally with a third at theta in between; cotenability of the insertion.",
       {{"theta", "number", "pi/4", "angle of the inserted polarizer in radians"}}},
      {"epr_no_signaling", "Singlet pair: reduced states and Bob's sigma_z marginal across Alice's settings z, x, none.",
       {}},
      {"epr_timelike_detection",
       "One spin prepared z+; Bob's sigma_z at t_b reveals whether Alice measured sigma_x at t.", {}},
      {"aad_dispersion_free",
       "Pre z+, post x+: ABL certainty for both sigma_z and sigma_x queries, with both counterfactual readings.", {}},
  };
  return catalogue;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) { return mix64(seed ^ mix64(k + 1)); }

ScenarioReport run_scenario(const std::string& name, const nlohmann::json& params, std::uint64_t trials,
                            std::uint64_t seed, const ExecutionOptions& options, double z) {
  const auto it = runners().find(name);
  if (it == runners().end()) throw UnknownScenario(name);
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  const ScenarioInfo* info = nullptr;
  for (const auto& i : scenario_catalogue()) {
    if (i.name == name) info = &i;
  }
  const Params p(params, *info);
  ScenarioReport report;
  report.name = name;
  report.params = params.is_null() ? json::object() : params;
  report.trials = trials;
  report.seed = seed;
  ReportBuilder builder(report, options, z);
  it->second(builder, p);
  return report;
}

ScenarioReport run_custom_scenario(const nlohmann::json& definition, std::uint64_t trials, std::uint64_t seed,
                                   const ExecutionOptions& options, double z) {
  if (!definition.is_object()) throw InvalidArgument("custom scenario must be a JSON object");
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (!definition.contains("base_protocol")) throw InvalidArgument("custom scenario needs 'base_protocol'");
  if (!definition.contains("queries") || !definition["queries"].is_array() || definition["queries"].empty()) {
    throw InvalidArgument("custom scenario needs a non-empty 'queries' array");
  }
  const Protocol actual = io::decode_protocol(definition["base_protocol"]);
  if (!actual.selection) throw InvalidArgument("custom scenario base_protocol needs a 'selection'");
  std::vector<ProjectiveMeasurement> queries;
  for (const auto& q : definition["queries"]) queries.push_back(io::decode_pvm(q));

  ScenarioReport report;
  report.name = definition.value("name", std::string("custom"));
  report.params = definition;
  report.trials = trials;
  report.seed = seed;
  ReportBuilder b(report, options, z);

  std::optional<ProjectiveMeasurement> actual_measurement;
  if (const auto* m = actual.measurement()) actual_measurement = *m;
  const auto actual_final = post_outcome_distribution(selection_base(actual), actual_measurement);
  b.analytic("final_actual", actual_final);
  const auto& stats = b.run("actual", actual);
  b.gate("final_actual", final_frequencies(stats), stats.trials, actual_final);

  for (std::size_t i = 0; i < queries.size(); ++i) {
    const std::string tag = "query_" + std::to_string(i);
    try {
      query_section(b, tag, actual, queries[i]);
      b.say(tag + ": ABL claim vs single-antecedent world deviation " +
            fmt(report.verdict("single_" + tag).max_deviation) + ", compound reading " +
            std::string(to_string(report.verdict("compound_" + tag).classification)) + ".");
    } catch (const ImpossiblePostSelection& e) {
      b.check(tag + "_post_selection_reachable", false, e.what());
    }
  }
  return report;
}

}  // namespace tsqc
