#include "tsqc/counterfactual.hpp"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"
#include "tsqc/random_instances.hpp"

using namespace tsqc;

namespace {

Protocol aad() { return Protocol(catalog::z_plus(), Nothing{}, catalog::sigma_x(), "x+"); }

Protocol three_box() {
  return Protocol(catalog::three_box_pre(), Nothing{}, ProjectiveMeasurement::lift(catalog::three_box_post(), "b", "not_b"),
                  "b");
}

}  // namespace

TEST(Classify, table) {
  EXPECT_EQ(classify(Flavor::SingleAntecedent, 0.0, false), Classification::TrueByCoincidence);
  EXPECT_EQ(classify(Flavor::SingleAntecedent, 1e-11, true), Classification::TrueByCoincidence);
  EXPECT_EQ(classify(Flavor::SingleAntecedent, 1e-9, true), Classification::False);
  EXPECT_EQ(classify(Flavor::CompoundAntecedent, 0.0, true), Classification::NontriviallyTrue);
  EXPECT_EQ(classify(Flavor::CompoundAntecedent, 0.0, false), Classification::TriviallyTrue);
  EXPECT_EQ(to_string(Classification::TrueByCoincidence), "TRUE_BY_COINCIDENCE");
  EXPECT_EQ(to_string(Flavor::CompoundAntecedent), "compound");
}

TEST(Counterfactual, aad_sigma_x_single_reading_is_false) {
  const auto v = evaluate(CounterfactualStatement(aad(), catalog::sigma_x(), Flavor::SingleAntecedent));
  EXPECT_NEAR(v.max_deviation, 0.5, 1e-10);
  EXPECT_EQ(v.classification, Classification::False);
  EXPECT_NEAR(v.counterfactual_world["x+"], 0.5, 1e-12);
  EXPECT_NEAR(v.claimed["x+"], 1.0, 1e-12);
}

TEST(Counterfactual, aad_sigma_z_single_reading_agrees_by_coincidence) {
  const auto v = evaluate(CounterfactualStatement(aad(), catalog::sigma_z(), Flavor::SingleAntecedent));
  EXPECT_LE(v.max_deviation, 1e-10);
  EXPECT_EQ(v.classification, Classification::TrueByCoincidence);
}

TEST(Counterfactual, aad_compound_reading_is_cotenable) {
  for (const auto& q : {catalog::sigma_x(), catalog::sigma_z()}) {
    const auto v = evaluate(CounterfactualStatement(aad(), q, Flavor::CompoundAntecedent));
    EXPECT_LE(v.max_deviation, 1e-10);
    EXPECT_TRUE(v.cotenable);
    EXPECT_EQ(v.classification, Classification::NontriviallyTrue);
  }
}

TEST(Counterfactual, three_box) {
  const auto single = evaluate(CounterfactualStatement(three_box(), catalog::box_query("A"), Flavor::SingleAntecedent));
  EXPECT_NEAR(single.max_deviation, 2.0 / 3, 1e-10);
  EXPECT_EQ(single.classification, Classification::False);
  const auto compound =
      evaluate(CounterfactualStatement(three_box(), catalog::box_query("A"), Flavor::CompoundAntecedent));
  EXPECT_EQ(compound.classification, Classification::NontriviallyTrue);
  EXPECT_NEAR(compound.cotenability.undisturbed["b"], 1.0 / 9, 1e-12);
  // Box C disturbs the post statistics: P(b) rises from 1/9 to 5/9.
  const auto c = cotenability_report(three_box(), catalog::box_query("C"));
  EXPECT_FALSE(c.cotenable);
  EXPECT_NEAR(*c.delta_selected, 4.0 / 9, 1e-12);
}

TEST(Cotenability, crossed_polarizers) {
  const double half_pi = std::numbers::pi / 2;
  const Protocol crossed(catalog::photon_x(), Nothing{}, catalog::absorbing_polarizer(half_pi), "pass");
  const auto r = cotenability_report(crossed, catalog::absorbing_polarizer(std::numbers::pi / 4));
  EXPECT_FALSE(r.cotenable);
  EXPECT_NEAR(r.undisturbed["pass"], 0.0, 1e-15);
  EXPECT_NEAR(r.disturbed["pass"], 0.25, 1e-12);
  EXPECT_NEAR(*r.delta_selected, 0.25, 1e-10);
  EXPECT_NEAR(r.tvd, 0.25, 1e-10);
}

TEST(Cotenability, query_replaces_actual_measurement) {
  // Actually measured sigma_x; the query sigma_x is then no change at all.
  const Protocol actual(catalog::z_plus(), catalog::sigma_x(), catalog::sigma_z(), "z+");
  EXPECT_TRUE(cotenability_report(actual, catalog::sigma_x()).cotenable);
  // Swapping it for sigma_z changes P(z+) from 1/2 to 1.
  const auto r = cotenability_report(actual, catalog::sigma_z());
  EXPECT_NEAR(*r.delta_selected, 0.5, 1e-12);
}

TEST(Counterfactual, unitary_stage_acts_after_the_query) {
  Matrix<double> h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  // z+ --(query)--> H --> measure sigma_z, select z+.
  const Protocol p(catalog::z_plus(), UnitaryOp(h), catalog::sigma_z(), "z+");
  const auto ctx = selection_context(p);
  const SelectionContext explicit_ctx(SelectionBase(catalog::z_plus(), catalog::sigma_z(), UnitaryOp::identity(2),
                                                    UnitaryOp(h)),
                                      "z+");
  const auto q = catalog::sigma_x();
  EXPECT_LE(total_variation(abl_distribution(ctx, q), abl_distribution(explicit_ctx, q)), 1e-12);
  // H z+ = x+, so without a query P(z+) = 1/2.
  EXPECT_NEAR(cotenability_report(p, q).undisturbed["z+"], 0.5, 1e-12);
}

TEST(Counterfactual, requires_selection_and_matching_dims) {
  const Protocol unselected(catalog::z_plus(), Nothing{}, catalog::sigma_x());
  EXPECT_THROW(CounterfactualStatement(unselected, catalog::sigma_z(), Flavor::SingleAntecedent), InvalidArgument);
  EXPECT_THROW(CounterfactualStatement(aad(), catalog::box_query("A"), Flavor::SingleAntecedent), DimensionMismatch);
  const Protocol impossible(catalog::z_plus(), Nothing{}, catalog::sigma_z(), "z-");
  EXPECT_THROW(evaluate(CounterfactualStatement(impossible, catalog::sigma_z(), Flavor::CompoundAntecedent)),
               ImpossiblePostSelection);
}

class CounterfactualProperty : public ::testing::TestWithParam<int> {};

TEST_P(CounterfactualProperty, compound_reading_always_reproduces_abl) {
  StreamRng rng(404, static_cast<std::uint64_t>(GetParam()));
  const long dim = 2 + GetParam() % 2;
  const auto pre = random::state(rng, dim);
  const auto post = random::pvm(rng, dim, true, "b");
  const auto q = random::pvm(rng, dim, GetParam() % 3 == 0);
  const Protocol p(pre, Nothing{}, post, "b0");
  const auto v = evaluate(CounterfactualStatement(p, q, Flavor::CompoundAntecedent));
  EXPECT_LE(v.max_deviation, 1e-10);
  EXPECT_EQ(v.classification == Classification::NontriviallyTrue, v.cotenability.tvd <= 1e-10);
}

TEST_P(CounterfactualProperty, commuting_query_is_cotenable) {
  StreamRng rng(505, static_cast<std::uint64_t>(GetParam()));
  const long dim = 2 + GetParam() % 3;
  const auto post = random::pvm(rng, dim, true, "b");
  const Protocol p(random::state(rng, dim), Nothing{}, post, "b0");
  std::vector<ProjectiveMeasurement::Outcome> same;
  for (const auto& o : post.outcomes()) same.push_back({"q_" + o.label, o.projector, std::nullopt});
  const ProjectiveMeasurement q(std::move(same));
  ASSERT_TRUE(q.commutes_with(post));
  const auto v = evaluate(CounterfactualStatement(p, q, Flavor::CompoundAntecedent));
  EXPECT_TRUE(v.cotenable);
  EXPECT_EQ(v.classification, Classification::NontriviallyTrue);
}

INSTANTIATE_TEST_SUITE_P(Random, CounterfactualProperty, ::testing::Range(0, 60));
