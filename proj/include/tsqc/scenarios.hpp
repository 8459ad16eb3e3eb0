#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "json.hpp"
#include "tsqc/counterfactual.hpp"
#include "tsqc/ensemble.hpp"

namespace tsqc {

struct NamedDistribution {
  std::string name;
  Distribution distribution;
};

struct NamedValue {
  std::string name;
  double value;
};

struct MonteCarloRun {
  std::string name;
  EnsembleStats stats;
};

/// A statistical agreement gate between an empirical and an analytic distribution.
struct Gate {
  std::string name;
  AgreementReport report;
};

/// A deterministic check (exact counts, analytic values at EPS_NORM).
struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

struct NamedVerdict {
  std::string name;
  Verdict verdict;
};

/// Sections are deques so references handed out while a report is being
/// filled stay valid.
struct ScenarioReport {
  std::string name;
  nlohmann::json params;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::deque<NamedDistribution> analytic;
  std::deque<NamedValue> values;
  std::deque<MonteCarloRun> runs;
  std::deque<NamedDistribution> empirical;
  std::deque<Gate> gates;
  std::deque<Check> checks;
  std::deque<NamedVerdict> verdicts;
  std::vector<std::string> narrative;

  bool passed() const;
  const Distribution& analytic_distribution(const std::string& name) const;
  const Distribution& empirical_distribution(const std::string& name) const;
  double value(const std::string& name) const;
  const EnsembleStats& run(const std::string& name) const;
  const Gate& gate(const std::string& name) const;
  const Check& check(const std::string& name) const;
  const Verdict& verdict(const std::string& name) const;
};

struct ParamDoc {
  std::string name;
  std::string type;
  std::string default_value;
  std::string description;
};

struct ScenarioInfo {
  std::string name;
  std::string summary;
  std::vector<ParamDoc> params;
};

const std::vector<ScenarioInfo>& scenario_catalogue();

/// Runs a catalogue scenario. `params` must be an object whose keys are among
/// the scenario's documented parameters. Throws UnknownScenario or
/// InvalidArgument.
ScenarioReport run_scenario(const std::string& name, const nlohmann::json& params, std::uint64_t trials,
                            std::uint64_t seed, const ExecutionOptions& options = {}, double z = kDefaultZ);

/// Runs a user-defined scenario:
///   {"name": s, "base_protocol": Protocol, "queries": [PVM, ...]}
/// For every query: the ABL claim, both counterfactual verdicts, and a Monte
/// Carlo run with the query measured at t.
ScenarioReport run_custom_scenario(const nlohmann::json& definition, std::uint64_t trials, std::uint64_t seed,
                                   const ExecutionOptions& options = {}, double z = kDefaultZ);

/// Seed of the k-th ensemble inside a scenario run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

}  // namespace tsqc
