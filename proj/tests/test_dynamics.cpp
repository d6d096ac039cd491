#include <gtest/gtest.h>

#include <cmath>

#include "influence/dynamics.hpp"
#include "influence/random.hpp"

using namespace influence;

TEST(Receipt, FromTheRight) {
  const auto s = receive_right(DynamicState(1, 1, 1));
  EXPECT_EQ(s.dp, 2);
  EXPECT_EQ(s.dq, 0.5);
  EXPECT_EQ(s.dp * s.dq, 1);
}

TEST(Receipt, FromTheLeft) {
  const auto s = receive_left(DynamicState(1, 1, 1));
  EXPECT_EQ(s.dp, 0.5);
  EXPECT_EQ(s.dq, 2);
}

TEST(Receipt, ZeroStepIsIdentity) {
  const DynamicState s(3, 5, 0);
  EXPECT_EQ(receive_right(s).dp, 3);
  EXPECT_EQ(receive_right(s).dq, 5);
  EXPECT_EQ(receive_left(s).dp, 3);
  EXPECT_EQ(receive_left(s).dq, 5);
}

TEST(Receipt, RepeatedReceiptsMatchClosedForm) {
  DynamicState s(2, 3, 1);
  for (int n = 1; n <= 1000; ++n) {
    s = receive_right(s);
    EXPECT_EQ(s.dp, 2.0 + n);
    EXPECT_NEAR(s.dq, 6.0 / (2.0 + n), 1e-13 * s.dq);
  }
}

TEST(Receipt, ProductInvariantForRandomStates) {
  RandomStream rng(1);
  for (int i = 0; i < 10000; ++i) {
    const DynamicState s(0.1 + 100 * rng.uniform(), 0.1 + 100 * rng.uniform(),
                         rng.uniform());
    const auto r = rng.bernoulli(0.5) ? receive_right(s) : receive_left(s);
    EXPECT_NEAR(r.dp * r.dq, s.dp * s.dq, 1e-13 * s.dp * s.dq);
    EXPECT_NEAR(r.tau() * r.tau(), r.dp * r.dq, 1e-12 * r.dp * r.dq);
  }
}

TEST(Receipt, TaylorRegime) {
  const DynamicState s(1e4, 3e3, 1);  // k / dp = 1e-4
  const auto r = receive_right(s);
  const double expected = -(s.dq / s.dp) * s.k_step;
  EXPECT_NEAR((r.dq - s.dq) / expected, 1.0, 1e-3);
}

TEST(Receipt, InvalidStatesRejected) {
  EXPECT_THROW(DynamicState(0, 1), DomainError);
  EXPECT_THROW(DynamicState(1, -2), DomainError);
  EXPECT_THROW(DynamicState(1, 1, -1), DomainError);
}

TEST(Rate, CountBased) {
  EXPECT_EQ(influence_rate(0, 10, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(influence_rate(1, 100, 0.1), 0.1);
  EXPECT_THROW(influence_rate(1, 0, 1.0), DomainError);
  EXPECT_THROW(influence_rate(1, 1, 0.0), DomainError);
  const auto r = InfluenceRates::from_counts(3, 1, 100, 0.1);
  EXPECT_DOUBLE_EQ(r.r_net(), 0.2);
  EXPECT_EQ(InfluenceRates::net(-0.5).r_left, 0.5);
  EXPECT_EQ(InfluenceRates::net(-0.5).r_net(), -0.5);
}

TEST(Analytic, BetaValues) {
  EXPECT_EQ(analytic_beta(7.0, {0.0, 0.0}), 0.0);
  double prev = -1;
  for (double t = 0; t < 50; t += 0.5) {
    const double b = analytic_beta(t, {0.3, 0.1});
    EXPECT_GE(b, prev);
    EXPECT_LE(b, 1.0);
    prev = b;
  }
  EXPECT_NEAR(analytic_beta(100, {1.0, 0}), 1.0, 1e-15);
}

TEST(Analytic, BetaFromDeltas) {
  RandomStream rng(2);
  for (int i = 0; i < 1000; ++i) {
    const AnalyticAccel sol{rng.uniform() - 0.5, 2 * rng.uniform() - 1};
    const double tau = 0.1 + 10 * rng.uniform();
    const auto d = analytic_deltas(tau, sol);
    EXPECT_NEAR((d.dp - d.dq) / (d.dp + d.dq), analytic_beta(tau, sol), 1e-12);
    EXPECT_NEAR(d.dp * d.dq, tau * tau, 1e-12 * tau * tau);
    EXPECT_NEAR(sol.a() * sol.b(), 1.0, 1e-12);
  }
}

TEST(Analytic, ThroughState) {
  const auto s = DynamicState::at(2.0, 0.7);
  const auto sol = AnalyticAccel::through(s, 0.1);
  EXPECT_NEAR(analytic_beta(2.0, sol), s.beta(), 1e-15);
}

TEST(ForceLaw, Values) {
  EXPECT_EQ(force(2.0, 1.5, 0.0), 0.0);
  EXPECT_EQ(force(2.0, 1.0, 0.3), 0.6);
  EXPECT_EQ(power(3.0, 0.0), 0.0);
  EXPECT_GT(power(-2.0, -0.5), 0.0);
  EXPECT_LT(power(2.0, -0.5), 0.0);
}

TEST(Evolve, FreeParticleStaysAtRest) {
  const auto traj = evolve_ode(DynamicState(1, 1), constant_rate(0), 9.0, 1e-2);
  for (const auto& s : traj) {
    EXPECT_NEAR(s.beta, 0, 1e-14);
    EXPECT_NEAR(s.dp, s.tau, 1e-9 * s.tau);
    EXPECT_NEAR(s.dq, s.tau, 1e-9 * s.tau);
  }
  EXPECT_NEAR(traj.back().tau, 10.0, 1e-12);
}

TEST(Evolve, ConstantRateMatchesClosedForm) {
  const double r = 0.05;
  const AnalyticAccel sol{r, 0.2};
  const auto start = DynamicState::at(1.0, r + 0.2);
  const auto traj = evolve_ode(start, constant_rate(r), 9.0, 1e-3);
  ASSERT_EQ(traj.size(), 9001u);
  for (const auto& s : traj) {
    const auto d = sol.deltas(s.tau);
    EXPECT_NEAR(s.dp, d.dp, 1e-8 * d.dp);
    EXPECT_NEAR(s.dq, d.dq, 1e-8 * d.dq);
    EXPECT_NEAR(std::atanh(s.beta) - sol.phi0, r * s.tau, 1e-8);
    EXPECT_NEAR(s.dp * s.dq, s.tau * s.tau, 1e-8 * s.tau * s.tau);
  }
}

TEST(Evolve, SampleStrideKeepsEndpoints) {
  const auto traj =
      evolve_ode(DynamicState(1, 1), constant_rate(0.1), 1.0, 0.01, {1.0, 30});
  EXPECT_EQ(traj.front().tau, 1.0);
  EXPECT_NEAR(traj.back().tau, 2.0, 1e-12);
  EXPECT_EQ(traj.size(), 5u);  // start, steps 30, 60, 90, 100
}

TEST(Evolve, PiecewiseRateKinksRapidity) {
  const RateField rates = [](double tau, double) {
    return InfluenceRates::net(tau < 5.0 ? 0.1 : 0.3);
  };
  const auto traj = evolve_ode(DynamicState(1, 1), rates, 9.0, 1e-3);
  auto at = [&](double tau) {
    const auto i = static_cast<std::size_t>(std::llround((tau - 1.0) / 1e-3));
    return traj[i];
  };
  // The step ending at tau = 5 already samples the new rate in its last
  // stage, so measure the old slope up to the step before it.
  const double h = 0.1;
  const double before =
      (std::atanh(at(4.999).beta) - std::atanh(at(4.999 - h).beta)) / h;
  const double after = (std::atanh(at(5.0 + h).beta) - std::atanh(at(5.0).beta)) / h;
  EXPECT_NEAR(before, 0.1, 1e-6);
  EXPECT_NEAR(after, 0.3, 1e-6);
  EXPECT_NEAR(at(5.0 + 1e-3).beta, at(5.0).beta, 1e-3);
}

TEST(Evolve, EmergentQuantitiesFollowRapidity) {
  const auto traj = evolve_ode(DynamicState::at(1.0, 0.3), constant_rate(0.2), 4.0,
                               1e-2, {2.5, 10});
  for (const auto& s : traj) {
    const double phi = std::atanh(s.beta);
    EXPECT_NEAR(s.mass, 2.5, 1e-9);
    EXPECT_NEAR(s.momentum, 2.5 * std::sinh(phi), 1e-9);
    EXPECT_NEAR(s.energy, 2.5 * std::cosh(phi), 1e-9);
    EXPECT_NEAR(s.force, 2.5 * s.gamma * 0.2, 1e-9);
    EXPECT_NEAR(s.power, s.force * s.beta, 1e-12);
  }
}

TEST(Evolve, RejectsBadArguments) {
  EXPECT_THROW(evolve_ode(DynamicState(1, 1), constant_rate(0), 1.0, 0.0), DomainError);
  EXPECT_THROW(evolve_ode(DynamicState(1, 1), constant_rate(0), -1.0, 0.1), DomainError);
  DynamicState zero;
  zero.dp = 0;
  EXPECT_THROW(evolve_ode(zero, constant_rate(0), 1.0, 0.1), SingularTimeError);
}

TEST(Evolve, FourthOrderConvergence) {
  const double r = 0.05;
  const AnalyticAccel sol{r, 0};
  const auto start = DynamicState::at(1.0, r);
  auto error = [&](double h) {
    const auto end = evolve_ode(start, constant_rate(r), 9.0, h).back();
    const auto d = sol.deltas(10.0);
    return std::max(std::abs(end.dp - d.dp) / d.dp, std::abs(end.dq - d.dq) / d.dq);
  };
  const double ratio = error(0.1) / error(0.05);
  EXPECT_NEAR(ratio, 16.0, 16.0 * 0.2);
}
