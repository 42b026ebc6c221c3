#include <gtest/gtest.h>

#include "lclh/convex_engine.hpp"

using namespace lclh;

namespace {

// Euclidean ball of radius `rad` around `center`, with exact separation.
MembershipOracle ball_oracle(RVector center, double rad) {
  return [center, rad](const RVector& x) {
    const RVector diff = x - center;
    const double norm = diff.norm();
    if (norm <= rad) return OracleAnswer::member();
    const RVector g = diff / norm;
    return OracleAnswer::not_member(g, g.dot(center) + rad);
  };
}

// Axis box [lo, hi]^n.
MembershipOracle box_oracle(double lo, double hi) {
  return [lo, hi](const RVector& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      RVector g = RVector::Zero(x.size());
      if (x(i) > hi) {
        g(i) = 1;
        return OracleAnswer::not_member(g, hi);
      }
      if (x(i) < lo) {
        g(i) = -1;
        return OracleAnswer::not_member(g, -lo);
      }
    }
    return OracleAnswer::member();
  };
}

ConvexBodySpec spec_for(int n, double outer, double inner) {
  ConvexBodySpec s;
  s.dim = n;
  s.outer_radius = outer;
  s.inner_center = RVector::Zero(n);
  s.inner_radius = inner;
  return s;
}

RVector unit(int n, int i) {
  RVector e = RVector::Zero(n);
  e(i) = 1;
  return e;
}

}  // namespace

TEST(Optimize, BallYesAndNo) {
  for (auto mode : {OracleMode::Separation, OracleMode::MembershipOnly}) {
    for (int n : {1, 2, 5}) {
      const auto body = spec_for(n, 1.0, 0.3);
      EngineOptions opt;
      opt.mode = mode;
      // max e0.x over the ball of radius 0.8 is 0.8.
      const auto yes = optimize(body, ball_oracle(RVector::Zero(n), 0.8), {unit(n, 0), 0.7, 0.05}, opt);
      EXPECT_TRUE(yes.yes) << "n=" << n;
      ASSERT_TRUE(yes.witness.has_value());
      EXPECT_LE(yes.witness->norm(), 0.8 + 1e-12);
      EXPECT_GT(yes.witness->dot(unit(n, 0)), 0.65);
      const auto no = optimize(body, ball_oracle(RVector::Zero(n), 0.8), {unit(n, 0), 0.9, 0.05}, opt);
      EXPECT_FALSE(no.yes) << "n=" << n << " " << no.transcript.termination;
      EXPECT_LE(no.transcript.iterations, no.transcript.budget);
    }
  }
}

TEST(Optimize, BoxWithDiagonalObjective) {
  const int n = 4;
  auto body = spec_for(n, 2.0 * std::sqrt(n), 0.5);
  body.box_lower = RVector::Constant(n, -1.0);
  body.box_upper = RVector::Constant(n, 1.0);
  const RVector c = RVector::Ones(n) / std::sqrt(n);
  // max over the unit box of c.x is sqrt(n) = 2.
  EXPECT_TRUE(optimize(body, box_oracle(-1, 1), {c, 1.9, 0.05}).yes);
  EXPECT_FALSE(optimize(body, box_oracle(-1, 1), {c, 2.1, 0.05}).yes);
}

TEST(Optimize, TranscriptVolumeShrinks) {
  const auto body = spec_for(3, 1.0, 0.2);
  EngineOptions opt;
  opt.record_points = true;
  const auto r = optimize(body, ball_oracle(RVector::Zero(3), 0.5), {unit(3, 1), 0.7, 0.05}, opt);
  EXPECT_FALSE(r.yes);
  EXPECT_LT(r.transcript.final_log_volume, r.transcript.initial_log_volume);
  ASSERT_FALSE(r.transcript.records.empty());
  for (std::size_t i = 1; i < r.transcript.records.size(); ++i) {
    EXPECT_LE(r.transcript.records[i].log_volume, r.transcript.records[i - 1].log_volume + 1e-12);
    EXPECT_TRUE(r.transcript.records[i].point.has_value());
  }
}

TEST(Optimize, ContractViolationsAreReported) {
  const auto body = spec_for(2, 1.0, 0.2);
  // A "cut" that keeps the query point.
  const MembershipOracle lying = [](const RVector& x) {
    if (x.norm() <= 0.1) return OracleAnswer::member();
    return OracleAnswer::not_member(x / x.norm(), x.norm() + 1.0);
  };
  EXPECT_THROW(optimize(body, lying, {unit(2, 0), 0.5, 0.05}), OracleContractViolation);
  // A cut with no normal.
  const MembershipOracle degenerate = [](const RVector& x) {
    if (x.norm() <= 0.1) return OracleAnswer::member();
    return OracleAnswer::not_member(RVector::Zero(2), 1.0);
  };
  EXPECT_THROW(optimize(body, degenerate, {unit(2, 0), 0.5, 0.05}), OracleContractViolation);
  // Cut that slices into the promised inner ball.
  const MembershipOracle clipping = [](const RVector& x) {
    if (x.norm() <= 0.05) return OracleAnswer::member();
    return OracleAnswer::not_member(unit(2, 0), 0.0);
  };
  EXPECT_THROW(optimize(body, clipping, {unit(2, 0), 0.5, 0.05}), OracleContractViolation);
}

TEST(Optimize, BudgetAndInputChecks) {
  const auto body = spec_for(3, 1.0, 0.2);
  EngineOptions opt;
  opt.max_iterations = 2;
  EXPECT_THROW(optimize(body, ball_oracle(RVector::Zero(3), 0.6), {unit(3, 0), 0.62, 1e-3}, opt), BudgetExhausted);
  EXPECT_THROW(optimize(body, ball_oracle(RVector::Zero(3), 0.6), {RVector::Ones(3), 0.5, 0.05}), InvalidArgument);
  EXPECT_THROW(optimize(body, ball_oracle(RVector::Zero(3), 0.6), {unit(2, 0), 0.5, 0.05}), InvalidArgument);
  auto bad = spec_for(3, 0.1, 0.2);
  EXPECT_THROW(optimize(bad, ball_oracle(RVector::Zero(3), 0.6), {unit(3, 0), 0.5, 0.05}), InvalidArgument);
}

TEST(MembershipToCut, ProducesValidSeparation) {
  const auto body = spec_for(3, 2.0, 0.3);
  const auto oracle = ball_oracle(RVector::Zero(3), 1.0);
  const RVector y = RVector::Constant(3, 1.0);
  const Cut cut = membership_to_cut(body, oracle, y);
  EXPECT_GT(cut.g.dot(y), cut.c);
  // Every point of the unit ball satisfies the cut: support is |g| = 1.
  EXPECT_LE(cut.g.norm(), cut.c + 1e-9);
  EXPECT_THROW(membership_to_cut(body, oracle, RVector::Constant(3, 0.05)), OracleContractViolation);
}

TEST(Maximize, BracketsTheOptimum) {
  const int n = 3;
  const RVector center = RVector::Constant(n, 0.1);
  auto body = spec_for(n, 1.5, 0.3);
  body.inner_center = center;
  const RVector c = RVector::Ones(n) / std::sqrt(n);
  const double truth = c.dot(center) + 0.9;
  const auto r = maximize(body, ball_oracle(center, 0.9), c, 1e-3);
  EXPECT_LE(r.lower, truth + 1e-12);
  EXPECT_GE(r.upper, truth - 1e-12);
  EXPECT_LT(r.upper - r.lower, 1e-2);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_NEAR(c.dot(*r.witness), r.lower, 1e-12);
}
