#include "tsqc/ensemble.hpp"

#include <set>

#include "gtest/gtest.h"
#include "tsqc/abl.hpp"

using namespace tsqc;

TEST(Rng, splitmix64_reference_outputs) {
  // SplitMix64 seeded with 0 yields these three words.
  EXPECT_EQ(mix64(StreamRng::kGolden), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(mix64(2 * StreamRng::kGolden), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(mix64(3 * StreamRng::kGolden), 0x06c45d188009454fULL);
}

TEST(Rng, streams_are_replayable_and_distinct) {
  StreamRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  const auto x = a.next();
  EXPECT_EQ(x, b.next());
  EXPECT_NE(x, c.next());
  EXPECT_NE(x, d.next());
}

TEST(Rng, uniform_range_and_mean) {
  StreamRng rng(1, 0);
  double sum = 0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Mean 1/2, standard error sqrt(1/12/n).
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
}

TEST(Sampling, never_picks_zero_probability_outcomes) {
  const std::vector<double> p{0.0, 0.5, 1e-13, 0.5, 0.0};
  for (double u : {0.0, 0.25, 0.4999999, 0.5, 0.75, std::nextafter(1.0, 0.0)}) {
    const auto i = detail::sample_index(p, u);
    EXPECT_TRUE(i == 1 || i == 3) << u;
  }
  EXPECT_EQ(detail::sample_index(p, 0.0), 1u);
  EXPECT_EQ(detail::sample_index(p, std::nextafter(1.0, 0.0)), 3u);
}

TEST(Ensemble, counts_total_and_certain_outcomes) {
  const Protocol p(catalog::z_plus(), Nothing{}, catalog::sigma_z());
  const auto stats = run_ensemble(p, 5000, 3);
  EXPECT_EQ(stats.total(), 5000u);
  EXPECT_EQ(stats.final_count("z-"), 0u);
  EXPECT_FALSE(stats.has_intermediate());
  EXPECT_THROW(run_ensemble(p, 0, 3), InvalidArgument);
}

TEST(Ensemble, counts_do_not_depend_on_thread_count) {
  const Protocol p(catalog::three_box_pre(), catalog::box_query("A"),
                   ProjectiveMeasurement::lift(catalog::three_box_post(), "b", "not_b"), "b");
  const auto one = run_ensemble(p, 50000, 11, {1});
  for (unsigned threads : {2u, 3u, 8u, 0u}) {
    EXPECT_EQ(run_ensemble(p, 50000, 11, {threads}).counts, one.counts) << threads;
  }
  EXPECT_NE(run_ensemble(p, 50000, 12, {1}).counts, one.counts);
}

TEST(Ensemble, trial_replay_matches_ensemble) {
  const Protocol p(catalog::z_plus(), catalog::sigma_x(), catalog::sigma_z());
  const auto stats = run_ensemble(p, 1000, 5, {4});
  std::uint64_t plus_plus = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto r = run_trial(p, 5, i);
    plus_plus += (r.intermediate_outcome == "x+" && r.final_outcome == "z+") ? 1 : 0;
  }
  EXPECT_EQ(stats.count(std::optional<std::string>("x+"), "z+"), plus_plus);
}

TEST(Ensemble, post_selected_three_box_always_finds_the_ball) {
  const Protocol p(catalog::three_box_pre(), catalog::box_query("A"),
                   ProjectiveMeasurement::lift(catalog::three_box_post(), "b", "not_b"), "b");
  const auto stats = run_ensemble(p, 100000, 0);
  const auto cond = conditional_frequencies(stats, "b");
  EXPECT_GT(cond.matched, 0u);
  EXPECT_EQ(cond.distribution["in_A"], 1.0);
}

TEST(Ensemble, empty_selection) {
  const Protocol p(catalog::z_plus(), Nothing{}, catalog::sigma_z(), "z-");
  const auto stats = run_ensemble(p, 1000, 0);
  try {
    conditional_frequencies(stats, "z-");
    FAIL();
  } catch (const EmptySelection& e) {
    EXPECT_EQ(e.matched(), 0u);
    EXPECT_EQ(e.trials(), 1000u);
  }
}

TEST(Ensemble, frequencies_agree_with_born) {
  const Protocol p(catalog::z_plus(), catalog::sigma_x(), catalog::sigma_z());
  const auto stats = run_ensemble(p, 100000, 2);
  const auto report = agreement_check(intermediate_frequencies(stats), stats.trials,
                                      born_distribution(catalog::z_plus(), catalog::sigma_x()), kDefaultZ);
  EXPECT_TRUE(report.pass);
  const auto fin = agreement_check(final_frequencies(stats), stats.trials,
                                   post_outcome_distribution(SelectionBase(catalog::z_plus(), catalog::sigma_z()),
                                                             catalog::sigma_x()),
                                   kDefaultZ);
  EXPECT_TRUE(fin.pass);
}

TEST(Agreement, gate_arithmetic) {
  const Distribution p({"a", "b"}, {0.5, 0.5});
  // n = 100: gate = 5 * sqrt(0.25 / 100) + 1e-10 = 0.25.
  EXPECT_TRUE(agreement_check(Distribution({"a", "b"}, {0.74, 0.26}), 100, p, 5.0).pass);
  const auto bad = agreement_check(Distribution({"a", "b"}, {0.76, 0.24}), 100, p, 5.0);
  EXPECT_FALSE(bad.pass);
  EXPECT_NEAR(bad.entries[0].gate, 0.25, 1e-9);
  // A zero analytic probability tolerates no hits at all.
  EXPECT_FALSE(agreement_check(Distribution({"a", "b"}, {0.99999, 0.00001}), 100000,
                               Distribution({"a", "b"}, {1.0, 0.0}), 5.0)
                   .pass);
  EXPECT_THROW(agreement_check(Distribution({"a", "c"}, {0.5, 0.5}), 100, p, 5.0), LabelMismatch);
  EXPECT_THROW(agreement_check(p, 0, p, 5.0), InvalidArgument);
}

TEST(Ensemble, bipartite_singlet) {
  const BipartiteProtocol p(catalog::singlet(), catalog::sigma_z(), catalog::sigma_z());
  const auto stats = run_ensemble(p, 20000, 9);
  EXPECT_EQ(stats.count(std::optional<std::string>("z+"), "z+"), 0u);
  EXPECT_EQ(stats.count(std::optional<std::string>("z-"), "z-"), 0u);
  EXPECT_EQ(stats.total(), 20000u);
  EXPECT_EQ(run_ensemble(p, 20000, 9, {3}).counts, stats.counts);
}

TEST(Ensemble, rejects_mismatched_protocols) {
  EXPECT_THROW(Protocol(catalog::z_plus(), catalog::box_query("A"), catalog::sigma_z()), DimensionMismatch);
  EXPECT_THROW(Protocol(catalog::z_plus(), Nothing{}, catalog::sigma_z(), "x+"), UnknownLabel);
  EXPECT_THROW(BipartiteProtocol(catalog::singlet(), catalog::box_query("A"), catalog::sigma_z()), DimensionMismatch);
}
