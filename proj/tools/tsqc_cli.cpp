// tsqc: run catalogue scenarios, evaluate counterfactual statements, and run
// the verification suite.
//
//   tsqc list
//   tsqc scenario three_box --trials 100000 --seed 42 --format json
//   tsqc scenario crossed_polarizers --config params.json
//   tsqc scenario custom --config my_scenario.json
//   tsqc evaluate --config statement.json
//   tsqc verify --seed 1
//
// Exit status: 0 on success, 1 when a gate or check fails, 2 on usage or
// input errors. TSQC_THREADS=n forces the Monte Carlo thread count.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "tsqc/json_io.hpp"
#include "tsqc/render.hpp"
#include "tsqc/scenarios.hpp"
#include "tsqc/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kGateFailure = 1;
constexpr int kUsageError = 2;

struct Settings {
  std::string scenario;
  std::string config;
  std::string output;
  std::string format = "text";
  std::uint64_t trials = tsqc::kDefaultTrials;
  std::uint64_t seed = 0;
};

tsqc::ExecutionOptions execution_from_env() {
  tsqc::ExecutionOptions options;
  if (const char* env = std::getenv("TSQC_THREADS"); env && *env) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (*end != '\0' || n == 0) throw tsqc::InvalidArgument("TSQC_THREADS must be a positive integer");
    options.threads = static_cast<unsigned>(n);
  }
  return options;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tsqc::InvalidArgument("cannot open output file '" + path + "'");
  out << text;
  if (!out) throw tsqc::InvalidArgument("failed writing output file '" + path + "'");
}

int run_scenario_command(const Settings& s, tsqc::render::Format format) {
  const auto execution = execution_from_env();
  tsqc::ScenarioReport report;
  if (s.scenario == "custom") {
    if (s.config.empty()) throw tsqc::InvalidArgument("scenario custom needs --config");
    report = tsqc::run_custom_scenario(tsqc::io::read_json_file(s.config), s.trials, s.seed, execution);
  } else {
    const auto params = s.config.empty() ? nlohmann::json::object() : tsqc::io::read_json_file(s.config);
    report = tsqc::run_scenario(s.scenario, params, s.trials, s.seed, execution);
  }
  emit(tsqc::render::scenario(report, format), s.output);
  return report.passed() ? kOk : kGateFailure;
}

int run_evaluate_command(const Settings& s, tsqc::render::Format format) {
  if (s.config.empty()) throw tsqc::InvalidArgument("evaluate needs --config");
  const auto statement = tsqc::io::decode_statement(tsqc::io::read_json_file(s.config));
  const auto verdict = tsqc::evaluate(statement);
  emit(tsqc::render::verdict(statement, verdict, format), s.output);
  return kOk;
}

int run_verify_command(const Settings& s, tsqc::render::Format format) {
  tsqc::VerifyOptions options;
  options.trials = s.trials;
  options.seed = s.seed;
  options.execution = execution_from_env();
  const auto report = tsqc::run_verification(options);
  emit(tsqc::render::verification(report, format), s.output);
  return report.passed() ? kOk : kGateFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-symmetric quantum counterfactuals: scenarios, verdicts and verification"};
  app.require_subcommand(1);
  Settings s;

  const auto add_common = [&s](CLI::App* cmd) {
    cmd->add_option("--trials", s.trials, "Monte Carlo trials per ensemble")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", s.seed, "Base seed");
    cmd->add_option("--format", s.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
    cmd->add_option("--output", s.output, "Write the report here instead of standard output");
  };

  auto* list = app.add_subcommand("list", "List the scenario catalogue with parameter docs");
  list->add_option("--format", s.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  list->add_option("--output", s.output, "Write the report here instead of standard output");

  auto* scenario = app.add_subcommand("scenario", "Run a catalogue scenario, or 'custom' with --config");
  scenario->add_option("name", s.scenario, "Scenario name")->required();
  scenario->add_option("--config", s.config, "Parameter JSON (custom scenario JSON for 'custom')");
  add_common(scenario);

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a counterfactual statement");
  evaluate->add_option("--config", s.config, "Statement JSON")->required();
  add_common(evaluate);

  auto* verify = app.add_subcommand("verify", "Run the invariant suites and every scenario");
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? kOk : kUsageError;
  }

  try {
    const auto format = tsqc::render::parse_format(s.format);
    if (list->parsed()) {
      emit(tsqc::render::catalogue(format), s.output);
      return kOk;
    }
    if (scenario->parsed()) return run_scenario_command(s, format);
    if (evaluate->parsed()) return run_evaluate_command(s, format);
    return run_verify_command(s, format);
  } catch (const tsqc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
}
