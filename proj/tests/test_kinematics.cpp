#include <gtest/gtest.h>

#include <cmath>

#include "influence/kinematics.hpp"
#include "influence/random.hpp"

using namespace influence;

TEST(EmergentState, RestCase) {
  const auto s = emergent_state(2, 1, 1);
  EXPECT_DOUBLE_EQ(s.r_p, 1);
  EXPECT_DOUBLE_EQ(s.r_q, 1);
  EXPECT_DOUBLE_EQ(s.mass, 1);
  EXPECT_DOUBLE_EQ(s.momentum, 0);
  EXPECT_DOUBLE_EQ(s.energy, 1);
  EXPECT_DOUBLE_EQ(s.tau, 1);
}

TEST(EmergentState, MovingCase) {
  const auto s = emergent_state(2, 4, 1);
  EXPECT_DOUBLE_EQ(s.r_p, 0.25);
  EXPECT_DOUBLE_EQ(s.r_q, 1);
  EXPECT_DOUBLE_EQ(s.mass, 0.5);
  EXPECT_DOUBLE_EQ(s.momentum, 0.375);
  EXPECT_DOUBLE_EQ(s.energy, 0.625);
  EXPECT_DOUBLE_EQ(s.energy * s.energy - s.momentum * s.momentum, s.mass * s.mass);
}

TEST(EmergentState, RejectsNonPositiveInputs) {
  EXPECT_THROW(emergent_state(2, 0, 1), DomainError);
  EXPECT_THROW(emergent_state(2, 1, -1), DomainError);
  EXPECT_THROW(emergent_state(0, 1, 1), DomainError);
}

TEST(EmergentState, MassIsFrameInvariant) {
  RandomStream rng(21);
  for (int i = 0; i < 1000; ++i) {
    const auto n = 1 + rng.below(1000);
    const double dp = 1 + 99 * rng.uniform();
    const double dq = 1 + 99 * rng.uniform();
    const FrameRelation rel(1 + rng.below(20), 1 + rng.below(20));
    const auto t = transform_interval(rel, dp, dq);
    EXPECT_NEAR(emergent_state(n, t.dp, t.dq).mass, emergent_state(n, dp, dq).mass,
                1e-12 * emergent_state(n, dp, dq).mass);
  }
}

TEST(Frame, RelationFields) {
  const FrameRelation rel(4, 1);
  EXPECT_DOUBLE_EQ(rel.k(), 2);
  EXPECT_DOUBLE_EQ(rel.v(), 0.6);
  EXPECT_DOUBLE_EQ(rel.k(), k_from_velocity(rel.v()));
  EXPECT_DOUBLE_EQ(velocity_from_k(rel.k()), rel.v());
  EXPECT_THROW(FrameRelation(0, 1), DomainError);
}

TEST(Frame, TransformRestIntervalMovesAtFrameVelocity) {
  const auto t = transform_interval(FrameRelation(4, 1), 1, 1);
  EXPECT_DOUBLE_EQ(t.dp, 2);
  EXPECT_DOUBLE_EQ(t.dq, 0.5);
  EXPECT_DOUBLE_EQ((t.dp - t.dq) / (t.dp + t.dq), 0.6);
}

TEST(Frame, IdentityAndInvariance) {
  const auto id = transform_interval(1.0, 3, 7);
  EXPECT_EQ(id.dp, 3);
  EXPECT_EQ(id.dq, 7);
  RandomStream rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double k = 0.01 + 10 * rng.uniform();
    const double dp = 10 * rng.uniform();
    const double dq = 10 * rng.uniform();
    const auto t = transform_interval(k, dp, dq);
    EXPECT_NEAR(t.dp * t.dq, dp * dq, 1e-12 * (1 + dp * dq));
  }
}

TEST(Frame, CompositionMultipliesK) {
  RandomStream rng(8);
  for (int i = 0; i < 1000; ++i) {
    const FrameRelation a(1 + rng.below(30), 1 + rng.below(30));
    const FrameRelation b(1 + rng.below(30), 1 + rng.below(30));
    const double dp = 1 + rng.uniform();
    const double dq = 1 + rng.uniform();
    const auto two = transform_interval(b, transform_interval(a, dp, dq).dp,
                                        transform_interval(a, dp, dq).dq);
    const auto one = transform_interval(a.k() * b.k(), dp, dq);
    EXPECT_NEAR(two.dp, one.dp, 1e-12 * one.dp);
    EXPECT_NEAR(two.dq, one.dq, 1e-12 * one.dq);
    EXPECT_NEAR(a.then(b).k(), a.k() * b.k(), 1e-12 * a.k() * b.k());
    EXPECT_NEAR(a.then(b).rapidity(), a.rapidity() + b.rapidity(), 1e-12);
  }
}

TEST(Lorentz, IdentityAtRest) {
  const auto b = lorentz(3, 1, 0);
  EXPECT_EQ(b.dt, 3);
  EXPECT_EQ(b.dx, 1);
}

TEST(Lorentz, RejectsSuperluminalFrames) {
  EXPECT_THROW(lorentz(1, 0, 1.0), DomainError);
  EXPECT_THROW(lorentz(1, 0, -1.5), DomainError);
}

TEST(Lorentz, MatchesProjectedLengthTransform) {
  RandomStream rng(12);
  for (int i = 0; i < 1000; ++i) {
    const double v = 1.8 * rng.uniform() - 0.9;
    const double dp = 10 * rng.uniform();
    const double dq = 10 * rng.uniform();
    const double dt = 0.5 * (dp + dq);
    const double dx = 0.5 * (dp - dq);
    const auto b = lorentz(dt, dx, v);
    const auto t = transform_interval(std::sqrt((1 - v) / (1 + v)), dp, dq);
    EXPECT_NEAR(b.dt, 0.5 * (t.dp + t.dq), 1e-12 * 10 * lorentz_gamma(v));
    EXPECT_NEAR(b.dx, 0.5 * (t.dp - t.dq), 1e-12 * 10 * lorentz_gamma(v));
  }
}

TEST(StepStats, FiveStepWalk) {
  const auto s = step_stats(3, 5, FrameRelation(1, 1));
  EXPECT_DOUBLE_EQ(s.pr_right, 0.6);
  EXPECT_DOUBLE_EQ(s.pr_left, 0.4);
  EXPECT_NEAR(s.m_rel, 1.0206207261596576, 1e-15);
  EXPECT_DOUBLE_EQ(s.dp_frame, 3);
  EXPECT_DOUBLE_EQ(s.dq_frame, 2);
}

TEST(StepStats, RestWalkHasUnitMass) {
  const auto s = step_stats(50, 100, FrameRelation(1, 1));
  EXPECT_DOUBLE_EQ(s.m_rel, 1);
  EXPECT_DOUBLE_EQ(s.gamma, 1);
}

TEST(StepStats, RelativisticMassIsGammaTimesRestMass) {
  RandomStream rng(6);
  for (int i = 0; i < 1000; ++i) {
    const auto n = 2 + rng.below(10000);
    const auto np = 1 + rng.below(n - 1);
    const auto s = step_stats(np, n, FrameRelation(1, 1));
    EXPECT_GE(s.m_rel, 1.0);
    EXPECT_EQ(s.pr_right + s.pr_left, 1.0);
    const double beta = 2 * s.pr_right - 1;
    EXPECT_NEAR(s.m_rel, lorentz_gamma(beta) * 1.0, 1e-12 * s.m_rel);
    EXPECT_NEAR(s.rest_mass, 1.0, 1e-12);
    // gamma from velocity equals dt / dtau of the walk.
    const auto e = emergent_state(n, static_cast<double>(np), static_cast<double>(n - np));
    EXPECT_NEAR(s.gamma, 0.5 * static_cast<double>(n) / e.tau, 1e-12 * s.gamma);
  }
}

TEST(StepStats, ProbabilityIgnoresFrame) {
  const auto a = step_stats(30, 70, FrameRelation(1, 1));
  const auto b = step_stats(30, 70, FrameRelation(9, 4));
  EXPECT_EQ(a.pr_right, b.pr_right);
  EXPECT_DOUBLE_EQ(b.dp_frame, 70 * a.pr_right * 1.5);
  EXPECT_DOUBLE_EQ(b.dq_frame, 70 * a.pr_left / 1.5);
}

TEST(StepStats, DegenerateWalksRejected) {
  EXPECT_THROW(step_stats(0, 5, FrameRelation(1, 1)), DomainError);
  EXPECT_THROW(step_stats(5, 5, FrameRelation(1, 1)), DomainError);
  EXPECT_THROW(step_stats(6, 5, FrameRelation(1, 1)), DomainError);
}
