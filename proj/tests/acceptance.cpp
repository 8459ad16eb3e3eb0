// Acceptance run: one PASS/FAIL line per criterion. Expected values are
// literal constants; sample sizes are N = 100000 with a z = 5 gate.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "tsqc/counterfactual.hpp"
#include "tsqc/json_io.hpp"
#include "tsqc/render.hpp"
#include "tsqc/scenarios.hpp"
#include "tsqc/verify.hpp"

using namespace tsqc;

namespace {

constexpr std::uint64_t kN = 100000;
constexpr double kZ = 5.0;
constexpr double kTol = 1e-10;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!detail.str().empty()) detail << "; ";
    detail << what << (ok ? "" : " [FAILED]");
    pass = pass && ok;
  }
};

std::string num(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

/// |f - p| <= z sqrt(p (1 - p) / n) + 1e-10 against a literal p.
bool within_gate(double frequency, double p, std::uint64_t n) {
  return std::abs(frequency - p) <= kZ * std::sqrt(p * (1 - p) / static_cast<double>(n)) + kTol;
}

double frequency(const EnsembleStats& s, std::uint64_t hits) {
  return static_cast<double>(hits) / static_cast<double>(s.trials);
}

void aad(Outcome& o) {
  const SelectionContext ctx(catalog::z_plus(), catalog::sigma_x(), "x+");
  const double pz = abl_distribution(ctx, catalog::sigma_z())["z+"];
  const double px = abl_distribution(ctx, catalog::sigma_x())["x+"];
  o.require(std::abs(pz - 1) <= kTol, "ABL(z+) = " + num(pz));
  o.require(std::abs(px - 1) <= kTol, "ABL(x+) = " + num(px));
}

void three_box(Outcome& o) {
  const auto post = ProjectiveMeasurement::lift(catalog::three_box_post(), "b", "not_b");
  const auto ctx = SelectionContext(catalog::three_box_pre(), post, "b");
  for (const std::string box : {"A", "B"}) {
    const auto q = catalog::box_query(box);
    const double p = abl_distribution(ctx, q)["in_" + box];
    o.require(std::abs(p - 1) <= kTol, "ABL(in_" + box + ") = " + num(p));
    const auto stats = run_ensemble(Protocol(catalog::three_box_pre(), q, post, "b"), kN, derive_seed(0, box[0]));
    const auto cond = conditional_frequencies(stats, "b");
    o.require(cond.matched >= 1 && cond.distribution["in_" + box] == 1.0,
              "MC in_" + box + " among " + std::to_string(cond.matched) + " selected = " +
                  num(cond.distribution["in_" + box]));
  }
}

void statement_three(Outcome& o) {
  const Protocol actual(catalog::z_plus(), Nothing{}, catalog::sigma_x(), "x+");
  const auto v = evaluate(CounterfactualStatement(actual, catalog::sigma_x(), Flavor::SingleAntecedent));
  o.require(std::abs(v.max_deviation - 0.5) <= kTol, "max_deviation = " + num(v.max_deviation));
  o.require(v.classification == Classification::False,
            "classification " + std::string(to_string(v.classification)));
  const auto stats = run_ensemble(actual.with_stage(catalog::sigma_x()), kN, derive_seed(0, 3));
  const double f = intermediate_frequencies(stats)["x+"];
  o.require(within_gate(f, 0.5, kN), "unfiltered x+ frequency " + num(f));
}

void statement_one_prime(Outcome& o) {
  const auto s = compound_triviality_suite(derive_seed(0, 4), 200);
  o.require(s.instances + s.skipped == 200 && s.skipped == 0, std::to_string(s.instances) + " triples");
  o.require(s.failures == 0, std::to_string(s.failures) + " failures, max_deviation " + num(s.max_deviation));
  o.detail << "; " << s.summary;
}

void crossed_polarizers(Outcome& o) {
  const Protocol crossed(catalog::photon_x(), Nothing{}, catalog::absorbing_polarizer(std::numbers::pi / 2), "pass");
  const auto middle = catalog::absorbing_polarizer(std::numbers::pi / 4);
  const auto dark = run_ensemble(crossed, kN, derive_seed(0, 5));
  o.require(dark.final_count("pass") == 0, std::to_string(dark.final_count("pass")) + " passes without middle");
  const auto lit = run_ensemble(crossed.with_stage(middle), kN, derive_seed(0, 6));
  const double f = frequency(lit, lit.final_count("pass"));
  o.require(within_gate(f, 0.25, kN), "pass frequency with middle " + num(f));
  const auto r = cotenability_report(crossed, middle);
  o.require(!r.cotenable, "not cotenable (tvd " + num(r.tvd) + ")");
  o.require(r.delta_selected && std::abs(*r.delta_selected - 0.25) <= kTol,
            "delta_selected " + num(r.delta_selected.value_or(NAN)));
}

void epr(Outcome& o) {
  const auto singlet = catalog::singlet();
  const Matrix<double> half = Matrix<double>::Identity(2, 2) / 2.0;
  for (Side side : {Side::Left, Side::Right}) {
    const double dev = (reduced_density(singlet, side).matrix() - half).cwiseAbs().maxCoeff();
    o.require(dev <= kTol, std::string(side == Side::Left ? "left" : "right") + " reduced deviation " + num(dev));
  }
  const auto bob = catalog::sigma_z();
  std::vector<double> f;
  std::uint64_t k = 10;
  for (const auto& alice : {std::optional(catalog::sigma_z()), std::optional(catalog::sigma_x()),
                            std::optional<ProjectiveMeasurement>()}) {
    const auto stats = run_ensemble(BipartiteProtocol(singlet, alice, bob), kN, derive_seed(0, k++));
    f.push_back(frequency(stats, stats.final_count("z+")));
  }
  const double pair_gate = kZ * std::sqrt(0.5 / static_cast<double>(kN)) + kTol;
  double worst = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j) worst = std::max(worst, std::abs(f[i] - f[j]));
  o.require(worst <= pair_gate, "Bob marginal TVD across settings " + num(worst) + " <= " + num(pair_gate));

  const Protocol timelike(catalog::z_plus(), Nothing{}, catalog::sigma_z(), "z-");
  const auto idle = run_ensemble(timelike, kN, derive_seed(0, 20));
  o.require(idle.final_count("z-") == 0, std::to_string(idle.final_count("z-")) + " detections with Alice idle");
  const auto busy = run_ensemble(timelike.with_stage(catalog::sigma_x()), kN, derive_seed(0, 21));
  const double p = frequency(busy, busy.final_count("z-"));
  o.require(within_gate(p, 0.5, kN), "detection frequency with sigma_x " + num(p));
}

void raffle(Outcome& o) {
  const auto idle = run_scenario("quantum_raffle", {{"raffle_held", false}}, kN, 0);
  const double m0_idle = idle.empirical_distribution("entrants")["M=0"];
  o.require(m0_idle == 1.0, "raffle not held: M=0 in " + num(100 * m0_idle) + "% of trials");
  const auto held = run_scenario("quantum_raffle", {{"n_coins", 3}, {"raffle_held", true}}, kN, 0);
  const double m0 = held.empirical_distribution("entrants")["M=0"];
  o.require(within_gate(m0, 0.125, kN), "raffle held, 3 coins: P(M=0) frequency " + num(m0));
}

void identity_suites(Outcome& o) {
  for (const auto& s : {abl_sum_suite(derive_seed(0, 30), 500), time_symmetry_suite(derive_seed(0, 31), 500),
                        born_marginalization_suite(derive_seed(0, 32), 500),
                        oracle_equivalence_suite(derive_seed(0, 33), 500)}) {
    o.require(s.passed() && s.instances >= 500 && s.max_deviation <= kTol,
              s.name + " " + std::to_string(s.instances) + " instances, max " + num(s.max_deviation));
  }
}

void reproducibility(Outcome& o) {
  VerifyOptions options;
  options.seed = 1;
  const auto first = io::dump(render::to_json(run_verification(options)));
  const auto second = io::dump(render::to_json(run_verification(options)));
  options.execution.threads = 1;
  const auto single = io::dump(render::to_json(run_verification(options)));
  o.require(first == second, "verify repeated");
  o.require(first == single, "verify single-threaded");
  bool scenarios_equal = true;
  for (const auto& info : scenario_catalogue()) {
    const auto a = io::dump(render::to_json(run_scenario(info.name, nlohmann::json::object(), kN, 7)));
    const auto b = io::dump(render::to_json(run_scenario(info.name, nlohmann::json::object(), kN, 7, {1})));
    scenarios_equal = scenarios_equal && a == b;
  }
  o.require(scenarios_equal, "every scenario, default vs single-threaded");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"AAD determinism", aad},
      {"three-box", three_box},
      {"single-antecedent statement is false", statement_three},
      {"compound-antecedent triviality", statement_one_prime},
      {"crossed polarizers", crossed_polarizers},
      {"EPR no-signaling and timelike detection", epr},
      {"quantum raffle", raffle},
      {"identity suites", identity_suites},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.str().c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
