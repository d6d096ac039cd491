#pragma once

// Randomized invariant suites shared by the command-line verifier and the
// acceptance tests. Each suite draws from its own split of the seed.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "influence/dynamics.hpp"
#include "influence/kinematics.hpp"
#include "influence/oracle.hpp"
#include "influence/poset.hpp"
#include "influence/quantification.hpp"
#include "influence/random.hpp"

namespace influence {

struct SuiteResult {
  std::string name;
  bool passed{true};
  std::uint64_t trials{};
  std::uint64_t failures{};
  double worst{};       // largest observed error measure
  double tolerance{};
  std::string detail;   // first failure, if any
  double seconds{};

  void fail(const std::string& what) {
    passed = false;
    if (failures++ == 0) detail = what;
  }
};

namespace detail {

inline double log_uniform(RandomStream& rng, double lo, double hi) {
  return lo * std::exp(rng.uniform() * std::log(hi / lo));
}

template <class F>
SuiteResult timed(const std::string& name, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = name;
  body(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                  .count();
  return r;
}

}  // namespace detail

/// E^2 - P^2 = M^2 for random (N, dp, dq).
inline SuiteResult suite_mass_shell(std::uint64_t trials, std::uint64_t seed) {
  return detail::timed("mass-shell", [&](SuiteResult& r) {
    RandomStream rng = RandomStream(seed).split(1);
    r.tolerance = 1e-12;
    for (std::uint64_t i = 0; i < trials; ++i) {
      const auto n = 1 + rng.below(1'000'000);
      const double dp = detail::log_uniform(rng, 1.0, 1e3);
      const double dq = detail::log_uniform(rng, 1.0, 1e3);
      const auto s = emergent_state(n, dp, dq);
      const double m2 = s.mass * s.mass;
      const double err =
          std::abs(s.energy * s.energy - s.momentum * s.momentum - m2) / m2;
      r.worst = std::max(r.worst, err);
      ++r.trials;
      if (!(err <= r.tolerance)) {
        std::ostringstream os;
        os << "N=" << n << " dp=" << dp << " dq=" << dq << " relative error " << err;
        r.fail(os.str());
      }
    }
  });
}

/// dt^2 - dx^2 = dp dq for random projected lengths.
inline SuiteResult suite_minkowski(std::uint64_t trials, std::uint64_t seed) {
  return detail::timed("minkowski", [&](SuiteResult& r) {
    RandomStream rng = RandomStream(seed).split(2);
    r.tolerance = 1e-12;
    for (std::uint64_t i = 0; i < trials; ++i) {
      const double dp = 1.0 + 999.0 * rng.uniform();
      const double dq = 1.0 + 999.0 * rng.uniform();
      const auto q = quantify_interval(dp, dq);
      const double err = std::abs(q.dt * q.dt - q.dx * q.dx - q.ds2) / std::abs(q.ds2);
      r.worst = std::max(r.worst, err);
      ++r.trials;
      if (!(err <= r.tolerance)) {
        std::ostringstream os;
        os << "dp=" << dp << " dq=" << dq << " relative error " << err;
        r.fail(os.str());
      }
    }
  });
}

/// Chained receipts from random sides keep dp * dq fixed.
inline SuiteResult suite_product_preservation(std::uint64_t trials,
                                              std::uint64_t seed) {
  return detail::timed("product-preservation", [&](SuiteResult& r) {
    RandomStream rng = RandomStream(seed).split(3);
    r.tolerance = 1e-9;
    DynamicState s(1000.0, 1000.0, 1.0);
    const double p0 = s.dp * s.dq;
    for (std::uint64_t i = 0; i < trials; ++i) {
      s = rng.bernoulli(0.5) ? receive_right(s) : receive_left(s);
      ++r.trials;
    }
    r.worst = std::abs(s.dp * s.dq - p0) / p0;
    if (!(r.worst <= r.tolerance)) {
      std::ostringstream os;
      os << "relative drift " << r.worst << " after " << trials << " receipts";
      r.fail(os.str());
    }
  });
}

/// Compares indexed queries with the brute-force oracle on one poset, from
/// at most `max_sources` evenly spaced source events. Returns an empty
/// string on agreement, else a description.
inline std::string compare_with_oracle(const Poset& poset,
                                       std::size_t max_sources = 256) {
  const ReachOracle oracle(poset);
  const std::size_t n = poset.event_count();
  const std::size_t stride = n <= max_sources ? 1 : (n + max_sources - 1) / max_sources;
  for (std::size_t src = 0; src < n; src += stride) {
    const auto i = static_cast<std::uint32_t>(src);
    const EventId x{i};
    const auto up = oracle.reach(x, true);
    const auto down = oracle.reach(x, false);
    for (const auto& chain : poset.chains()) {
      const auto f = ReachOracle::extreme(up, chain, true);
      const auto b = ReachOracle::extreme(down, chain, false);
      if (poset.forward_project(x, chain.id()) != f) {
        return "forward projection of event " + std::to_string(i) + " onto " +
               chain.name() + " disagrees with exhaustive search";
      }
      if (poset.backward_project(x, chain.id()) != b) {
        return "backward projection of event " + std::to_string(i) + " onto " +
               chain.name() + " disagrees with exhaustive search";
      }
    }
    for (std::uint32_t j = 0; j < poset.event_count(); ++j) {
      if (poset.leq(x, EventId{j}) != (up[j] != 0)) {
        return "order relation " + std::to_string(i) + " <= " + std::to_string(j) +
               " disagrees with exhaustive search";
      }
    }
  }
  return {};
}

/// Indexed projections and order queries against exhaustive search on
/// random posets of up to `max_events` events.
inline SuiteResult suite_projection_oracle(std::uint64_t trials, std::uint64_t seed,
                                           std::size_t max_events = 200) {
  return detail::timed("projection-oracle", [&](SuiteResult& r) {
    RandomStream rng = RandomStream(seed).split(4);
    for (std::uint64_t t = 0; t < trials; ++t) {
      const auto poset = random_poset(rng, max_events);
      ++r.trials;
      if (auto msg = compare_with_oracle(poset); !msg.empty()) {
        r.fail("poset " + std::to_string(t) + ": " + msg);
      }
    }
  });
}

/// Boosts preserve dt^2 - dx^2, agree with the projected-length transform,
/// and compose by adding rapidities.
inline SuiteResult suite_lorentz(std::uint64_t trials, std::uint64_t seed) {
  return detail::timed("lorentz", [&](SuiteResult& r) {
    RandomStream rng = RandomStream(seed).split(5);
    r.tolerance = 1e-12;
    auto check = [&](double err, const std::string& what) {
      r.worst = std::max(r.worst, err);
      if (!(err <= r.tolerance)) r.fail(what + " relative error " + std::to_string(err));
    };
    for (std::uint64_t i = 0; i < trials; ++i) {
      ++r.trials;
      const double v = 1.8 * rng.uniform() - 0.9;
      const double dt = 1.0 + 99.0 * rng.uniform();
      const double dx = (2.0 * rng.uniform() - 1.0) * 100.0;
      const auto b = lorentz(dt, dx, v);
      const double scale = dt * dt + dx * dx;
      check(std::abs((b.dt * b.dt - b.dx * b.dx) - (dt * dt - dx * dx)) /
                (lorentz_gamma(v) * lorentz_gamma(v) * scale),
            "interval invariance");

      // Same boost as a projected-length transform.
      const double dp = dt + dx;
      const double dq = dt - dx;
      const auto pl = transform_interval(std::sqrt((1 - v) / (1 + v)), dp, dq);
      const double mag = lorentz_gamma(v) * (std::abs(dt) + std::abs(dx));
      check((std::abs(0.5 * (pl.dp + pl.dq) - b.dt) +
             std::abs(0.5 * (pl.dp - pl.dq) - b.dx)) / mag,
            "projected-length transform");

      // Rapidity additivity of composed frame relations.
      const FrameRelation a(1 + rng.below(50), 1 + rng.below(50));
      const FrameRelation c(1 + rng.below(50), 1 + rng.below(50));
      const double sum = a.rapidity() + c.rapidity();
      check(std::abs(a.then(c).rapidity() - sum) /
                std::max(1.0, std::abs(a.rapidity()) + std::abs(c.rapidity())),
            "rapidity additivity");

      // Velocity composition through two boosts.
      const double w = 1.8 * rng.uniform() - 0.9;
      const auto two = lorentz(b.dt, b.dx, w);
      const auto one = lorentz(dt, dx, (v + w) / (1 + v * w));
      const double g2 = lorentz_gamma(v) * lorentz_gamma(w);
      check((std::abs(two.dt - one.dt) + std::abs(two.dx - one.dx)) /
                (g2 * g2 * (std::abs(dt) + std::abs(dx))),
            "boost composition");
    }
  });
}

struct SuiteSpec {
  std::string name;
  std::uint64_t default_trials;
  std::function<SuiteResult(std::uint64_t trials, std::uint64_t seed)> run;
};

inline const std::vector<SuiteSpec>& all_suites() {
  static const std::vector<SuiteSpec> suites{
      {"mass-shell", 100000, suite_mass_shell},
      {"minkowski", 100000, suite_minkowski},
      {"product-preservation", 1000000, suite_product_preservation},
      {"projection-oracle", 1000,
       [](std::uint64_t t, std::uint64_t s) { return suite_projection_oracle(t, s); }},
      {"lorentz", 100000, suite_lorentz},
  };
  return suites;
}

}  // namespace influence
