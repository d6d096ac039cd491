#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "influence/poset_io.hpp"
#include "influence/quantification.hpp"
#include "influence/simulation.hpp"

using namespace influence;

namespace {

ScenarioConfig free_run(double pr, std::uint64_t seed) {
  ScenarioConfig c;
  c.kind = ScenarioKind::free;
  c.pr_right = pr;
  c.n_events = 100000;
  c.window = 1000;
  c.seed = seed;
  return c;
}

ScenarioConfig accel_run(double r, std::uint64_t seed) {
  ScenarioConfig c;
  c.kind = ScenarioKind::accelerated;
  c.r = r;
  c.n_events = 100000;
  c.window = 1000;
  c.seed = seed;
  return c;
}

std::vector<Step> steps_of(const std::string& s) {
  std::vector<Step> out;
  for (char ch : s) {
    switch (ch) {
      case 'P': out.push_back(Step::p_emission); break;
      case 'Q': out.push_back(Step::q_emission); break;
      case 'R': out.push_back(Step::receipt_right); break;
      case 'L': out.push_back(Step::receipt_left); break;
    }
  }
  return out;
}

}  // namespace

TEST(FreeRun, FairCoinHasZeroVelocity) {
  const auto path = simulate_free(free_run(0.5, 1));
  EXPECT_EQ(path.emissions(), 100000u);
  EXPECT_EQ(path.receipts_right() + path.receipts_left(), 0u);
  const double sigma = std::sqrt(0.25 / 1e5);
  EXPECT_NEAR(path.pr_right(), 0.5, 3 * sigma);
}

TEST(FreeRun, BiasedCoinVelocity) {
  const auto path = simulate_free(free_run(0.6, 2));
  const double sigma = std::sqrt(0.24 / 1e5);
  EXPECT_NEAR(path.pr_right(), 0.6, 3 * sigma);
  const auto traj = coarse_grain(path, 1000);
  double mean = 0;
  for (const auto& s : traj.samples) mean += s.beta_hat;
  mean /= static_cast<double>(traj.samples.size());
  EXPECT_NEAR(mean, 0.2, 6 * sigma);
  // Bookkeeping velocity stays on the configured value.
  for (const auto& s : traj.samples) EXPECT_NEAR(s.beta_bookkeeping, 0.2, 1e-9);
}

TEST(FreeRun, ShortWalkPrefixReproducesFixtureCounts) {
  // Find the first seed whose five-step prefix has three P-steps; the search
  // is deterministic so the seed is stable.
  std::uint64_t seed = 0;
  for (; seed < 100; ++seed) {
    auto c = free_run(0.6, seed);
    c.n_events = 1000;
    c.window = 100;
    auto path = simulate(c);
    path.prefix(5);
    if (path.n_p() == 3) break;
  }
  ASSERT_LT(seed, 100u);
  auto c = free_run(0.6, seed);
  c.n_events = 1000;
  c.window = 100;
  auto path = simulate(c);
  path.prefix(5);
  EXPECT_EQ(path.emissions(), 5u);
  EXPECT_EQ(path.n_q(), 2u);
  EXPECT_DOUBLE_EQ(path.pr_right(), 0.6);
}

TEST(FreeRun, KindMismatchRejected) {
  EXPECT_THROW(simulate_free(accel_run(0.01, 1)), ConfigError);
  EXPECT_THROW(simulate_accelerated(free_run(0.5, 1)), ConfigError);
}

TEST(AcceleratedRun, ZeroRateStaysAtRest) {
  const auto path = simulate_accelerated(accel_run(0.0, 3));
  EXPECT_EQ(path.receipts_right() + path.receipts_left(), 0u);
  for (const auto& s : coarse_grain(path, 1000).samples) {
    EXPECT_LE(std::abs(s.beta_hat), 2.0 / 1000);
  }
}

TEST(AcceleratedRun, RealizedRateMatchesConfigured) {
  const auto path = simulate_accelerated(accel_run(0.01, 42));
  EXPECT_GT(path.receipts_right(), 0u);
  EXPECT_EQ(path.receipts_left(), 0u);
  EXPECT_NEAR(realized_receipt_rate(path), 0.01, 0.02 * 0.01);
}

TEST(AcceleratedRun, NegativeRateReceivesFromTheLeft) {
  const auto path = simulate_accelerated(accel_run(-0.01, 5));
  EXPECT_EQ(path.receipts_right(), 0u);
  EXPECT_GT(path.receipts_left(), 0u);
  EXPECT_NEAR(realized_receipt_rate(path), -0.01, 0.02 * 0.01);
  const auto fit = fit_rapidity(coarse_grain(path, 1000));
  EXPECT_NEAR(fit.slope, -0.01, 0.05 * 0.01);
}

TEST(AcceleratedRun, FollowsClosedForm) {
  const auto c = accel_run(0.01, 42);
  const auto traj = coarse_grain(simulate(c), c.window);
  EXPECT_LT(max_abs_residual(traj, AnalyticAccel{c.r, c.phi0}), 0.05);
  const auto fit = fit_rapidity(traj);
  EXPECT_NEAR(fit.slope, 0.01, 0.05 * 0.01);
}

TEST(AcceleratedRun, DeterministicReceiptsAlsoTrack) {
  auto c = accel_run(0.01, 1);
  c.receipts = ReceiptSchedule::deterministic;
  const auto path = simulate(c);
  EXPECT_NEAR(realized_receipt_rate(path), 0.01, 1e-3 * 0.01 + 1.0 / path.exposure_right());
  EXPECT_LT(max_abs_residual(coarse_grain(path, c.window), AnalyticAccel{c.r, c.phi0}),
            0.05);
}

TEST(AcceleratedRun, UnresolvableRateRaises) {
  EXPECT_THROW(simulate(accel_run(0.5, 1)), ResolutionError);
}

TEST(AcceleratedRun, ProperTimeFollowsBookkeeping) {
  const auto c = accel_run(0.005, 4);
  const auto path = simulate(c);
  EXPECT_NEAR(path.initial().tau, c.tau0, 1e-12);
  for (const auto& b : path.bookkeeping()) {
    EXPECT_NEAR(b.tau, std::sqrt(b.dp * b.dq) / path.mass(), 1e-9 * b.tau);
  }
  // Proper time grows by about 1 / (2 mass) per emission.
  const double expected = c.tau0 + static_cast<double>(c.n_events) / (2 * path.mass());
  EXPECT_NEAR(path.bookkeeping().back().tau / expected, 1.0, 0.1);
}

TEST(Replicas, IndependentOfThreadCount) {
  auto c = accel_run(0.01, 11);
  c.n_events = 20000;
  const auto one = simulate_replicas(c, 4, 1);
  const auto three = simulate_replicas(c, 4, 3);
  ASSERT_EQ(one.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    ASSERT_EQ(one[i].steps().size(), three[i].steps().size());
    EXPECT_TRUE(std::equal(one[i].steps().begin(), one[i].steps().end(),
                           three[i].steps().begin()));
  }
  EXPECT_FALSE(std::equal(one[0].steps().begin(), one[0].steps().end(),
                          one[1].steps().begin(), one[1].steps().end()));
}

TEST(Replicas, AggregateAveragesWindows) {
  auto c = free_run(0.6, 12);
  c.n_events = 10000;
  c.window = 100;
  std::vector<MeasuredTrajectory> runs;
  for (const auto& p : simulate_replicas(c, 8, 2)) runs.push_back(coarse_grain(p, c.window));
  const auto agg = aggregate(runs);
  ASSERT_EQ(agg.samples.size(), 100u);
  for (std::size_t k = 0; k < agg.samples.size(); ++k) {
    double m = 0;
    for (const auto& r : runs) m += r.samples[k].beta_hat;
    EXPECT_NEAR(agg.samples[k].beta_hat, m / 8, 1e-12);
  }
}

TEST(Frames, TransformedPathKeepsProperTimeAndShiftsRapidity) {
  auto c = accel_run(0.01, 6);
  c.n_events = 10000;
  c.window = 100;
  const auto path = simulate(c);
  const FrameRelation rel(9, 4);
  const auto moved = path.transformed(rel);
  EXPECT_EQ(moved.n_p(), path.n_p());
  for (std::size_t i = 0; i < path.bookkeeping().size(); i += 97) {
    const auto& a = path.bookkeeping()[i];
    const auto& b = moved.bookkeeping()[i];
    EXPECT_NEAR(std::sqrt(b.dp * b.dq), std::sqrt(a.dp * a.dq), 1e-9 * std::sqrt(a.dp * a.dq));
    EXPECT_NEAR(0.5 * std::log(b.dp / b.dq) - 0.5 * std::log(a.dp / a.dq), rel.rapidity(),
                1e-12);
  }
}

TEST(CoarseGrain, ExtremesAndErrors) {
  const auto all_p = ZitterPath::from_steps(steps_of(std::string(20, 'P')));
  const auto t = coarse_grain(all_p, 10);
  ASSERT_EQ(t.samples.size(), 2u);
  EXPECT_EQ(t.samples[0].beta_hat, 1.0);
  EXPECT_EQ(t.samples[0].n_p, 10u);

  std::string alt;
  for (int i = 0; i < 10; ++i) alt += "PQ";
  const auto balanced = coarse_grain(ZitterPath::from_steps(steps_of(alt)), 10);
  for (const auto& s : balanced.samples) EXPECT_EQ(s.beta_hat, 0.0);

  EXPECT_THROW(coarse_grain(ZitterPath::from_steps(steps_of("PQP")), 10), DomainError);
  EXPECT_THROW(coarse_grain(all_p, 5), DomainError);
}

TEST(CoarseGrain, ReceiptsDoNotCountAsEmissions) {
  const auto path = ZitterPath::from_steps(steps_of("PRPQLQPQPQPQ"));
  EXPECT_EQ(path.emissions(), 10u);
  EXPECT_EQ(path.receipts_right(), 1u);
  EXPECT_EQ(path.receipts_left(), 1u);
  const auto t = coarse_grain(path, 10);
  ASSERT_EQ(t.samples.size(), 1u);
  EXPECT_EQ(t.samples[0].n_p, 5u);
}

TEST(CoarseGrain, AgreesWithBookkeepingOnAverage) {
  const auto c = accel_run(0.01, 8);
  const auto traj = coarse_grain(simulate(c), c.window);
  double worst = 0;
  for (const auto& s : traj.samples) {
    worst = std::max(worst, std::abs(s.beta_hat - s.beta_bookkeeping));
  }
  // Error diffusion keeps each window within a few counts of its expectation.
  EXPECT_LT(worst, 10.0 / static_cast<double>(c.window));
}

TEST(SpacetimePath, UnitSteps) {
  const auto pts = ZitterPath::from_steps(steps_of("PQRPP")).spacetime();
  ASSERT_EQ(pts.size(), 5u);
  EXPECT_EQ(pts[2].t, 1.0);
  EXPECT_EQ(pts[2].x, 0.0);
  EXPECT_EQ(pts[3].t, 1.0);  // receipt does not advance
  EXPECT_EQ(pts[4].x, 0.5);
}

TEST(BuildPoset, FiveStepWalkMatchesFixture) {
  const auto built = build_poset(ZitterPath::from_steps(steps_of("PQPQP")));
  std::ifstream in(std::string(INFLUENCE_TEST_DATA) + "/five_step.poset");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto text = ss.str();
  EXPECT_EQ(to_text(built), text.substr(text.find('\n') + 1));
}

TEST(BuildPoset, EmptyPath) {
  const auto p = build_poset(ZitterPath{});
  EXPECT_EQ(p.chain(kParticle).size(), 0u);
  EXPECT_TRUE(check_coordination(CoordinatedPair(p, p.chain(kObserverP), p.chain(kObserverQ))));
}

TEST(BuildPoset, CountsSurviveTextRoundTrip) {
  auto c = accel_run(0.1, 9);
  c.n_events = 400;
  c.window = 40;
  c.mass = 200;
  const auto path = simulate(c);
  const auto p = poset_from_text(to_text(build_poset(path)));
  const auto& pi = p.chain(kParticle);
  ASSERT_EQ(pi.size(), path.steps().size());
  std::uint64_t to_p = 0, to_q = 0, from_q = 0, from_p = 0;
  const auto P = p.chain(kObserverP).id();
  const auto Q = p.chain(kObserverQ).id();
  for (const auto& e : p.edges()) {
    if (e.kind != EdgeKind::influence) continue;
    const auto cf = p.chain_of(e.src);
    const auto ct = p.chain_of(e.dst);
    if (*cf == pi.id() && *ct == P) ++to_p;
    if (*cf == pi.id() && *ct == Q) ++to_q;
    if (*cf == Q && *ct == pi.id()) ++from_q;
    if (*cf == P && *ct == pi.id()) ++from_p;
  }
  EXPECT_EQ(to_p, path.n_p());
  EXPECT_EQ(to_q, path.n_q());
  EXPECT_EQ(from_q, path.receipts_right());
  EXPECT_EQ(from_p, path.receipts_left());
}

TEST(BuildPoset, StepCountsAreProjectedLengths) {
  const auto steps = steps_of("PPQPQQPPPQ");
  const auto p = build_poset(ZitterPath::from_steps(steps));
  const CoordinatedPair pair(p, p.chain(kObserverP), p.chain(kObserverQ));
  const auto& pi = p.chain(kParticle);
  // Events 0 to 8 are separated by steps PPQPQQPP. Event 8 emits to P and
  // event 9 to Q, so both projections of event 8 are direct.
  const auto q = quantify(pair, pi.event_at(0), pi.event_at(8));
  EXPECT_EQ(q.dp, 5);
  EXPECT_EQ(q.dq, 3);
}
