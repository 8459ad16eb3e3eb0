#include "tsqc/abl.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "test_util.hpp"
#include "tsqc/random_instances.hpp"
#include "tsqc/reference.hpp"

using namespace tsqc;
using tsqc::test::braket;
using tsqc::test::vec;

namespace {

// Density-matrix oracle: rho_j = V P_j U rho U^dag P_j V^dag, weight tr(P_b rho_j),
// normalized over j. Written with explicit loops over matrix entries.
std::vector<double> mixed_state_oracle(const SelectionContext& ctx, const ProjectiveMeasurement& q) {
  const long d = ctx.dim();
  const Vector<double> a = ctx.pre_to_t.matrix() * ctx.pre.amplitudes();
  Matrix<double> rho(d, d);
  for (long r = 0; r < d; ++r)
    for (long c = 0; c < d; ++c) rho(r, c) = a(r) * std::conj(a(c));
  const Matrix<double>& v = ctx.t_to_post.matrix();
  const Matrix<double>& pb = ctx.post_pvm.projector(ctx.post_label);
  std::vector<double> weights;
  double total = 0;
  for (const auto& o : q.outcomes()) {
    Matrix<double> k = v * o.projector;
    if (o.route) k = v * o.route->matrix() * o.projector;
    const Matrix<double> rj = k * rho * k.adjoint();
    double w = 0;
    for (long r = 0; r < d; ++r)
      for (long c = 0; c < d; ++c) w += (pb(r, c) * rj(c, r)).real();
    weights.push_back(w);
    total += w;
  }
  for (auto& w : weights) w /= total;
  return weights;
}

}  // namespace

TEST(Abl, dispersion_free_pair) {
  const auto ctx = SelectionContext(catalog::z_plus(), catalog::sigma_x(), "x+");
  EXPECT_NEAR(abl_distribution(ctx, catalog::sigma_z())["z+"], 1.0, 1e-10);
  EXPECT_NEAR(abl_distribution(ctx, catalog::sigma_x())["x+"], 1.0, 1e-10);
}

TEST(Abl, three_box_alternatives) {
  const auto ctx = SelectionContext::with_post_state(catalog::three_box_pre(), catalog::three_box_post());
  EXPECT_NEAR(abl_distribution(ctx, catalog::box_query("A"))["in_A"], 1.0, 1e-10);
  EXPECT_NEAR(abl_distribution(ctx, catalog::box_query("B"))["in_B"], 1.0, 1e-10);
  // Box C: |<b|P_C|a>|^2 = 1/9 against |<b|(1 - P_C)|a>|^2 = 4/9.
  const double k = 1 / std::sqrt(3.0);
  const auto a = vec({k, k, k});
  const auto b = vec({k, k, -k});
  const double in_c = std::norm(braket(b, vec({0, 0, a(2)})));
  const double not_c = std::norm(braket(b, vec({a(0), a(1), 0})));
  EXPECT_NEAR(abl_distribution(ctx, catalog::box_query("C"))["in_C"], in_c / (in_c + not_c), 1e-12);
  EXPECT_NEAR(in_c / (in_c + not_c), 0.2, 1e-12);
}

TEST(Abl, impossible_post_selection) {
  const auto ctx = SelectionContext(catalog::z_plus(), catalog::sigma_z(), "z-");
  EXPECT_THROW(abl_distribution(ctx, catalog::sigma_z()), ImpossiblePostSelection);
  // With sigma_x in between, z- becomes reachable.
  EXPECT_NEAR(abl_distribution(ctx, catalog::sigma_x())["x+"], 0.5, 1e-12);
}

TEST(Abl, rejects_bad_input) {
  const auto ctx = SelectionContext(catalog::z_plus(), catalog::sigma_x(), "x+");
  EXPECT_THROW(abl_distribution(ctx, catalog::box_query("A")), DimensionMismatch);
  EXPECT_THROW(SelectionContext(catalog::z_plus(), catalog::sigma_x(), "y+"), UnknownLabel);
  EXPECT_THROW(SelectionContext(catalog::z_plus(), catalog::box_query("A"), "in_A"), DimensionMismatch);
}

TEST(Abl, evolutions_enter_in_order) {
  // U = X flips z+ to z-; V = identity. Post z-, query sigma_z: certainly z-.
  Matrix<double> x(2, 2);
  x << 0, 1, 1, 0;
  const SelectionContext ctx(SelectionBase(catalog::z_plus(), catalog::sigma_z(), UnitaryOp(x), UnitaryOp::identity(2)),
                             "z-");
  EXPECT_NEAR(abl_distribution(ctx, catalog::sigma_z())["z-"], 1.0, 1e-12);
  // Same U placed after t instead: the query sees z+.
  const SelectionContext late(SelectionBase(catalog::z_plus(), catalog::sigma_z(), UnitaryOp::identity(2), UnitaryOp(x)),
                              "z-");
  EXPECT_NEAR(abl_distribution(late, catalog::sigma_z())["z+"], 1.0, 1e-12);
}

TEST(Abl, sequence_probability_is_the_numerator) {
  const auto ctx = SelectionContext::with_post_state(catalog::three_box_pre(), catalog::three_box_post());
  EXPECT_NEAR(sequence_probability<double>(ctx, std::nullopt), 1.0 / 9, 1e-12);
  const IntermediateEvent in_c{catalog::box_query("C"), "in_C"};
  // Born(in_C) = 1/3, then |<b|C>|^2 = 1/3.
  EXPECT_NEAR(sequence_probability<double>(ctx, in_c), 1.0 / 9, 1e-12);
  const IntermediateEvent not_c{catalog::box_query("C"), "not_C"};
  EXPECT_NEAR(sequence_probability<double>(ctx, not_c), 4.0 / 9, 1e-12);
}

TEST(Abl, post_outcome_distribution_with_and_without_query) {
  const SelectionBase base(catalog::z_plus(), catalog::sigma_z());
  EXPECT_NEAR(post_outcome_distribution(base)["z+"], 1.0, 1e-12);
  EXPECT_NEAR(post_outcome_distribution(base, catalog::sigma_x())["z+"], 0.5, 1e-12);
}

TEST(Abl, long_double_instantiation) {
  using LD = long double;
  const BasicSelectionContext<LD> ctx(catalog::z_plus<LD>(), catalog::sigma_x<LD>(), "x+");
  EXPECT_NEAR(static_cast<double>(abl_distribution(ctx, catalog::sigma_z<LD>())["z+"]), 1.0, 1e-12);
}

class AblProperty : public ::testing::TestWithParam<int> {};

TEST_P(AblProperty, matches_mixed_state_oracle_and_sums_to_one) {
  StreamRng rng(101, static_cast<std::uint64_t>(GetParam()));
  const long dim = 2 + GetParam() % 3;
  const SelectionContext ctx(SelectionBase(random::state(rng, dim), random::pvm(rng, dim, true, "b"),
                                           random::unitary(rng, dim), random::unitary(rng, dim)),
                             "b0");
  const auto q = random::pvm(rng, dim, GetParam() % 2 == 1);
  const auto got = abl_distribution(ctx, q);
  const auto want = mixed_state_oracle(ctx, q);
  double sum = 0;
  for (std::size_t j = 0; j < got.size(); ++j) {
    EXPECT_NEAR(got[j].probability, want[j], 1e-10);
    sum += got[j].probability;
  }
  EXPECT_NEAR(sum, 1.0, 1e-10);
}

TEST_P(AblProperty, time_symmetric_under_swapping_pre_and_post) {
  StreamRng rng(202, static_cast<std::uint64_t>(GetParam()));
  const long dim = 2 + GetParam() % 3;
  const auto a = random::state(rng, dim);
  const auto b = random::state(rng, dim);
  const auto q = random::pvm(rng, dim, true);
  const auto forward = abl_distribution(SelectionContext::with_post_state(a, b), q);
  const auto backward = abl_distribution(SelectionContext::with_post_state(b, a), q);
  EXPECT_LE(total_variation(forward, backward), 1e-10);
}

TEST_P(AblProperty, reference_oracles_agree) {
  StreamRng rng(303, static_cast<std::uint64_t>(GetParam()));
  const long dim = 2 + GetParam() % 3;
  const auto a = random::state(rng, dim);
  const auto b = random::state(rng, dim);
  const auto u = random::unitary(rng, dim);
  const auto v = random::unitary(rng, dim);
  const Matrix<double> basis = random::unitary_matrix(rng, dim);
  const auto q = ProjectiveMeasurement::from_basis(basis, detail::index_labels(dim));
  const SelectionContext ctx(SelectionBase(a, ProjectiveMeasurement::lift(b, "b", "not_b"), u, v), "b");
  const auto closed = reference::rank_one_abl(a.amplitudes(), b.amplitudes(), u.matrix(), v.matrix(), basis);
  const auto mine = mixed_state_oracle(ctx, q);
  const auto got = abl_distribution(ctx, q);
  for (std::size_t j = 0; j < got.size(); ++j) {
    EXPECT_NEAR(closed[j], mine[j], 1e-10);
    EXPECT_NEAR(got[j].probability, closed[j], 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Random, AblProperty, ::testing::Range(0, 90));
