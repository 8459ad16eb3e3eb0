#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsqc/ensemble.hpp"
#include "tsqc/scenarios.hpp"

namespace tsqc {

struct SuiteResult {
  std::string name;
  std::uint64_t instances = 0;
  std::uint64_t failures = 0;
  std::uint64_t skipped = 0;
  /// Largest observed deviation for numeric suites (0 for boolean suites).
  double max_deviation = 0;
  /// First few failure descriptions.
  std::vector<std::string> notes;
  /// Optional one-line breakdown of what the instances covered.
  std::string summary;

  bool passed() const { return failures == 0 && instances > 0; }
};

struct VerifyOptions {
  std::uint64_t trials = kDefaultTrials;
  std::uint64_t seed = 0;
  ExecutionOptions execution{};
  /// Randomized instances per identity suite.
  std::uint64_t instances = 500;
  /// Randomized (pre, post, query) triples for the compound-antecedent suite.
  std::uint64_t triples = 200;
  double z = kDefaultZ;
};

struct VerifyReport {
  VerifyOptions options;
  std::vector<SuiteResult> suites;
  std::vector<ScenarioReport> scenarios;

  std::uint64_t passed_count() const;
  std::uint64_t failed_count() const;
  bool passed() const { return failed_count() == 0; }
  const SuiteResult& suite(const std::string& name) const;
};

// Individual suites, also used directly by the tests.
SuiteResult abl_sum_suite(std::uint64_t seed, std::uint64_t instances);
SuiteResult time_symmetry_suite(std::uint64_t seed, std::uint64_t instances);
SuiteResult born_marginalization_suite(std::uint64_t seed, std::uint64_t instances);
SuiteResult oracle_equivalence_suite(std::uint64_t seed, std::uint64_t instances);
SuiteResult compound_triviality_suite(std::uint64_t seed, std::uint64_t triples);
SuiteResult single_antecedent_suite(std::uint64_t seed, std::uint64_t instances);
SuiteResult core_invariant_suite(std::uint64_t seed, std::uint64_t instances);
SuiteResult commuting_cotenability_suite(std::uint64_t seed, std::uint64_t instances);

/// Every invariant suite plus every catalogue scenario.
VerifyReport run_verification(const VerifyOptions& options);

}  // namespace tsqc
