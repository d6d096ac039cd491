#pragma once

// Monte Carlo influence-event sequences and their coarse-grained kinematics.
//
// A particle alternates emissions towards P (a step to the right) and Q (a
// step to the left). Its bookkeeping state (dp, dq), in unit steps, sets the
// chance of a P-emission, dp / (dp + dq). Between receipts the state grows
// proportionally, which keeps its velocity fixed; receipts from the right
// (after P-emissions) or the left (after Q-emissions) apply receive_right /
// receive_left and change the velocity.
//
// Proper time is reported as sqrt(dp dq) / mass, where `mass` is the number
// of emissions per two units of proper time at rest. The default mass is
// window / 2, so one coarse-graining window at rest spans one unit of proper
// time and rates are expressed per that unit.
//
// Receipt scheduling: after a qualifying emission a receipt occurs with
// probability r * (dp / k) * dtau / Pr(emission kind), i.e. receipts per
// unit proper time equal r times the accumulated number of P-steps, which
// reduces to r * tau. Positioning receipts directly after the emission
// towards the sender's opposite observer is a modelling choice.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "influence/dynamics.hpp"
#include "influence/errors.hpp"
#include "influence/kinematics.hpp"
#include "influence/poset.hpp"
#include "influence/random.hpp"

namespace influence {

enum class ScenarioKind { free, accelerated };

/// Order of P/Q emissions given the bookkeeping probability. `bernoulli`
/// draws each emission independently; `zitter` places them deterministically
/// by error diffusion, so a particle at rest alternates P, Q, P, Q, ...
enum class EmissionOrder { bernoulli, zitter };

enum class ReceiptSchedule { bernoulli, deterministic };

inline std::string to_string(ScenarioKind k) {
  return k == ScenarioKind::free ? "free" : "accelerated";
}
inline std::string to_string(EmissionOrder e) {
  return e == EmissionOrder::bernoulli ? "bernoulli" : "zitter";
}
inline std::string to_string(ReceiptSchedule s) {
  return s == ReceiptSchedule::bernoulli ? "bernoulli" : "deterministic";
}

struct ScenarioConfig {
  ScenarioKind kind{ScenarioKind::free};
  double pr_right{0.5};
  double r{0.0};
  double phi0{0.0};
  std::uint64_t n_events{100000};
  std::uint64_t window{1000};
  std::uint64_t seed{0};
  std::optional<double> mass;
  double tau0{1.0};
  std::optional<EmissionOrder> emission;
  ReceiptSchedule receipts{ReceiptSchedule::bernoulli};

  double effective_mass() const {
    return mass.value_or(static_cast<double>(window) / 2.0);
  }

  EmissionOrder effective_emission() const {
    if (emission) return *emission;
    return kind == ScenarioKind::free ? EmissionOrder::bernoulli
                                      : EmissionOrder::zitter;
  }

  /// Rapidity at tau0. Accelerated runs start on the closed-form solution
  /// tanh(r tau + phi0), so phi0 is the rapidity extrapolated to tau = 0.
  double initial_rapidity() const {
    return kind == ScenarioKind::free ? 0.5 * std::log(pr_right / (1 - pr_right))
                                      : phi0 + r * tau0;
  }

  double net_rate() const { return kind == ScenarioKind::free ? 0.0 : r; }

  void validate() const {
    if (kind == ScenarioKind::free && !(pr_right > 0.0 && pr_right < 1.0)) {
      throw ConfigError("pr_right must lie strictly between 0 and 1");
    }
    if (kind == ScenarioKind::accelerated &&
        (!std::isfinite(r) || !std::isfinite(phi0))) {
      throw ConfigError("r and phi0 must be finite");
    }
    if (window < 10) throw ConfigError("window must be at least 10");
    if (n_events < 10 * window) {
      throw ConfigError("n_events must be at least 10 * window");
    }
    if (!(effective_mass() > 0.0)) throw ConfigError("mass must be positive");
    if (!(tau0 > 0.0)) throw ConfigError("tau0 must be positive");
  }
};

enum class Step : std::uint8_t {
  p_emission,
  q_emission,
  receipt_right,
  receipt_left
};

inline bool is_emission(Step s) {
  return s == Step::p_emission || s == Step::q_emission;
}

struct Bookkeeping {
  double dp{};   // unit steps
  double dq{};   // unit steps
  double tau{};  // proper time, sqrt(dp dq) / mass
};

struct SpacetimePoint {
  double t{};
  double x{};
};

/// Sequence of particle steps plus the bookkeeping state after each
/// emission.
class ZitterPath {
 public:
  ZitterPath() = default;

  /// A hand-built path whose bookkeeping is the running emission count.
  static ZitterPath from_steps(std::vector<Step> steps) {
    ZitterPath p;
    p.mass_ = 1.0;
    double np = 0, nq = 0;
    for (auto s : steps) {
      if (!is_emission(s)) continue;
      (s == Step::p_emission ? np : nq) += 1;
      p.bookkeeping_.push_back({np, nq, std::sqrt(np * nq)});
    }
    p.steps_ = std::move(steps);
    p.recount();
    return p;
  }

  std::span<const Step> steps() const noexcept { return steps_; }
  std::span<const Bookkeeping> bookkeeping() const noexcept {
    return bookkeeping_;
  }
  const Bookkeeping& initial() const noexcept { return initial_; }
  double mass() const noexcept { return mass_; }

  std::uint64_t n_p() const noexcept { return n_p_; }
  std::uint64_t n_q() const noexcept { return n_q_; }
  std::uint64_t emissions() const noexcept { return n_p_ + n_q_; }
  std::uint64_t receipts_right() const noexcept { return n_rr_; }
  std::uint64_t receipts_left() const noexcept { return n_rl_; }

  /// Sum over qualifying emissions of receipt probability / rate; the
  /// expected number of receipts is rate times exposure.
  double exposure_right() const noexcept { return exposure_right_; }
  double exposure_left() const noexcept { return exposure_left_; }

  double pr_right() const {
    return emissions() == 0 ? 0.0
                            : static_cast<double>(n_p_) /
                                  static_cast<double>(emissions());
  }

  /// (t, x) of each particle event in the unit-step frame; receipts do not
  /// advance the particle.
  std::vector<SpacetimePoint> spacetime() const {
    std::vector<SpacetimePoint> out;
    out.reserve(steps_.size());
    double t = 0, x = 0;
    for (auto s : steps_) {
      out.push_back({t, x});
      if (s == Step::p_emission) {
        t += 0.5;
        x += 0.5;
      } else if (s == Step::q_emission) {
        t += 0.5;
        x -= 0.5;
      }
    }
    return out;
  }

  /// The same path described from another frame: projected lengths scale
  /// by k and 1/k, step counts are untouched.
  ZitterPath transformed(const FrameRelation& rel) const {
    ZitterPath p = *this;
    auto apply = [&](Bookkeeping& b) {
      auto t = transform_interval(rel, b.dp, b.dq);
      b.dp = t.dp;
      b.dq = t.dq;
    };
    apply(p.initial_);
    for (auto& b : p.bookkeeping_) apply(b);
    return p;
  }

  void prefix(std::size_t n_steps) {
    steps_.resize(std::min(n_steps, steps_.size()));
    const auto em = static_cast<std::size_t>(
        std::count_if(steps_.begin(), steps_.end(), is_emission));
    bookkeeping_.resize(std::min(em, bookkeeping_.size()));
    recount();
  }

 private:
  friend ZitterPath simulate(const ScenarioConfig&, RandomStream);

  void recount() {
    n_p_ = n_q_ = n_rr_ = n_rl_ = 0;
    for (auto s : steps_) {
      switch (s) {
        case Step::p_emission: ++n_p_; break;
        case Step::q_emission: ++n_q_; break;
        case Step::receipt_right: ++n_rr_; break;
        case Step::receipt_left: ++n_rl_; break;
      }
    }
  }

  std::vector<Step> steps_;
  std::vector<Bookkeeping> bookkeeping_;
  Bookkeeping initial_{};
  double mass_{1.0};
  std::uint64_t n_p_{}, n_q_{}, n_rr_{}, n_rl_{};
  double exposure_right_{}, exposure_left_{};
};

/// Runs one scenario on an explicit random stream.
inline ZitterPath simulate(const ScenarioConfig& config, RandomStream rng) {
  config.validate();
  const double mass = config.effective_mass();
  const auto order = config.effective_emission();
  const auto rates = InfluenceRates::net(config.net_rate());

  DynamicState state = DynamicState::at(mass * config.tau0,
                                        config.initial_rapidity(), 1.0);
  ZitterPath path;
  path.mass_ = mass;
  path.initial_ = {state.dp, state.dq, state.tau() / mass};
  path.steps_.reserve(config.n_events + config.n_events / 4);
  path.bookkeeping_.reserve(config.n_events);

  double emit_acc = 0.5;
  double recv_acc = 0.0;
  auto receipt_due = [&](double rho) {
    if (rho > 1.0) {
      throw ResolutionError(
          "expected receipts per emission " + std::to_string(rho) +
          " exceed 1 at tau " + std::to_string(state.tau() / mass) +
          "; lower r or raise mass/window");
    }
    if (config.receipts == ReceiptSchedule::bernoulli) return rng.bernoulli(rho);
    recv_acc += rho;
    if (recv_acc >= 1.0) {
      recv_acc -= 1.0;
      return true;
    }
    return false;
  };

  for (std::uint64_t i = 0; i < config.n_events; ++i) {
    const double dp = state.dp;
    const double dq = state.dq;
    const double pi = dp / (dp + dq);
    const double g = 1.0 / (dp + dq);
    const double dtau = std::sqrt(dp * dq) / mass * g;

    bool to_p;
    if (order == EmissionOrder::bernoulli) {
      to_p = rng.bernoulli(pi);
    } else {
      emit_acc += pi;
      to_p = emit_acc >= 1.0;
      if (to_p) emit_acc -= 1.0;
    }
    state.dp = dp * (1.0 + g);
    state.dq = dq * (1.0 + g);
    path.steps_.push_back(to_p ? Step::p_emission : Step::q_emission);

    if (to_p && rates.r_right > 0.0) {
      const double exposure = dp * dtau / pi;
      path.exposure_right_ += exposure;
      if (receipt_due(rates.r_right * exposure)) {
        state = receive_right(state);
        path.steps_.push_back(Step::receipt_right);
      }
    } else if (!to_p && rates.r_left > 0.0) {
      const double exposure = dq * dtau / (1.0 - pi);
      path.exposure_left_ += exposure;
      if (receipt_due(rates.r_left * exposure)) {
        state = receive_left(state);
        path.steps_.push_back(Step::receipt_left);
      }
    }
    path.bookkeeping_.push_back({state.dp, state.dq, state.tau() / mass});
  }
  path.recount();
  return path;
}

/// Free particle: each emission independently a P-step with pr_right.
inline ZitterPath simulate_free(const ScenarioConfig& config) {
  if (config.kind != ScenarioKind::free) {
    throw ConfigError("simulate_free requires kind = free");
  }
  return simulate(config, RandomStream(config.seed).split(0));
}

/// Particle receiving influence at net rate r with initial rapidity phi0.
inline ZitterPath simulate_accelerated(const ScenarioConfig& config) {
  if (config.kind != ScenarioKind::accelerated) {
    throw ConfigError("simulate_accelerated requires kind = accelerated");
  }
  return simulate(config, RandomStream(config.seed).split(0));
}

inline ZitterPath simulate(const ScenarioConfig& config) {
  return simulate(config, RandomStream(config.seed).split(0));
}

/// Independent replicas; replica i uses stream split(i) of the config seed,
/// so results do not depend on `threads`.
inline std::vector<ZitterPath> simulate_replicas(const ScenarioConfig& config,
                                                 std::size_t replicas,
                                                 std::size_t threads = 1) {
  config.validate();
  std::vector<ZitterPath> out(replicas);
  const RandomStream root(config.seed);
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(replicas, 1));
  // First failure per worker, rethrown in replica order after joining.
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < replicas; i += threads) {
          out[i] = simulate(config, root.split(i));
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/// Windowed estimate over `window` consecutive emissions.
struct WindowSample {
  double tau_mid{};
  double beta_hat{};
  double stderr_{};
  std::uint64_t n_p{};
  std::uint64_t n_q{};
  double beta_bookkeeping{};  // mean bookkeeping velocity over the window
};

struct MeasuredTrajectory {
  std::uint64_t window{};
  std::vector<WindowSample> samples;
};

inline MeasuredTrajectory coarse_grain(const ZitterPath& path,
                                       std::uint64_t window) {
  if (window < 10) throw DomainError("coarse_grain window must be >= 10");
  const auto& bk = path.bookkeeping();
  if (bk.size() < window) {
    throw DomainError("path has fewer emissions than one window");
  }
  std::vector<bool> to_p;
  to_p.reserve(bk.size());
  for (auto s : path.steps()) {
    if (is_emission(s)) to_p.push_back(s == Step::p_emission);
  }

  MeasuredTrajectory out;
  out.window = window;
  const auto n_windows = bk.size() / window;
  const double w = static_cast<double>(window);
  for (std::size_t k = 0; k < n_windows; ++k) {
    const auto begin = k * window;
    const auto end = begin + window;
    WindowSample s;
    double bsum = 0.0;
    for (auto i = begin; i < end; ++i) {
      (to_p[i] ? s.n_p : s.n_q) += 1;
      const auto& pre = i == 0 ? path.initial() : bk[i - 1];
      if (pre.dp + pre.dq > 0) bsum += (pre.dp - pre.dq) / (pre.dp + pre.dq);
    }
    const double tau_start = begin == 0 ? path.initial().tau : bk[begin - 1].tau;
    s.tau_mid = 0.5 * (tau_start + bk[end - 1].tau);
    s.beta_hat = (static_cast<double>(s.n_p) - static_cast<double>(s.n_q)) / w;
    const double pt = (static_cast<double>(s.n_p) + 1.0) / (w + 2.0);
    s.stderr_ = 2.0 * std::sqrt(pt * (1.0 - pt) / w);
    s.beta_bookkeeping = bsum / w;
    out.samples.push_back(s);
  }
  return out;
}

/// Mean over replicas window by window; stderr is the replica standard
/// error of the mean (or the single-run binomial one for one replica).
inline MeasuredTrajectory aggregate(const std::vector<MeasuredTrajectory>& runs) {
  if (runs.empty()) return {};
  if (runs.size() == 1) return runs.front();
  MeasuredTrajectory out;
  out.window = runs.front().window;
  std::size_t n = runs.front().samples.size();
  for (const auto& r : runs) n = std::min(n, r.samples.size());
  const double m = static_cast<double>(runs.size());
  for (std::size_t k = 0; k < n; ++k) {
    WindowSample s;
    double sum = 0, sum2 = 0, tau = 0, bk = 0;
    for (const auto& r : runs) {
      const auto& x = r.samples[k];
      sum += x.beta_hat;
      sum2 += x.beta_hat * x.beta_hat;
      tau += x.tau_mid;
      bk += x.beta_bookkeeping;
      s.n_p += x.n_p;
      s.n_q += x.n_q;
    }
    s.beta_hat = sum / m;
    s.tau_mid = tau / m;
    s.beta_bookkeeping = bk / m;
    const double var = std::max(0.0, (sum2 - m * s.beta_hat * s.beta_hat) / (m - 1));
    double se = std::sqrt(var / m);
    if (!(se > 0.0)) {
      double pooled = 0;
      for (const auto& r : runs) pooled += r.samples[k].stderr_;
      se = pooled / m / std::sqrt(m);
    }
    s.stderr_ = se;
    out.samples.push_back(s);
  }
  return out;
}

inline std::vector<double> residuals(const MeasuredTrajectory& traj,
                                     const AnalyticAccel& sol) {
  std::vector<double> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    out.push_back(s.beta_hat - analytic_beta(s.tau_mid, sol));
  }
  return out;
}

inline double max_abs_residual(const MeasuredTrajectory& traj,
                               const AnalyticAccel& sol) {
  double m = 0;
  for (double r : residuals(traj, sol)) m = std::max(m, std::abs(r));
  return m;
}

struct RapidityFit {
  double slope{};
  double intercept{};
  double slope_stderr{};
  std::size_t used{};
};

/// Ordinary least squares of artanh(beta_hat) on tau_mid. Lightlike windows
/// (|beta_hat| = 1) carry no finite rapidity and are skipped.
inline RapidityFit fit_rapidity(const MeasuredTrajectory& traj) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : traj.samples) {
    if (std::abs(s.beta_hat) < 1.0) {
      pts.emplace_back(s.tau_mid, std::atanh(s.beta_hat));
    }
  }
  RapidityFit fit;
  fit.used = pts.size();
  if (pts.size() < 3) throw DomainError("too few windows to fit rapidity");
  const double n = static_cast<double>(pts.size());
  double mx = 0, my = 0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0)) throw DomainError("degenerate proper-time range");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (auto [x, y] : pts) {
    const double e = y - (fit.intercept + fit.slope * x);
    ss += e * e;
  }
  fit.slope_stderr = std::sqrt(ss / (n - 2) / sxx);
  return fit;
}

/// Count-based receipt rate: receipts over exposure, i.e. N_r / (N_p dtau)
/// accumulated emission by emission.
inline double realized_receipt_rate(const ZitterPath& path) {
  const double exposure = path.exposure_right() + path.exposure_left();
  if (!(exposure > 0.0)) return 0.0;
  const double net = static_cast<double>(path.receipts_right()) -
                     static_cast<double>(path.receipts_left());
  return net / exposure;
}

/// Names of the chains produced by build_poset.
inline constexpr const char* kObserverP = "P";
inline constexpr const char* kObserverQ = "Q";
inline constexpr const char* kParticle = "Pi";

/// Explicit poset for a path: particle chain "Pi" between observer chains
/// "P" (left) and "Q" (right). Particle events sit on a light-cone lattice
/// (u, w): a P-emission influences P event u and advances u, a Q-emission
/// influences Q event w and advances w. The observers exchange relays
/// p_i -> q_{i+s} and q_j -> p_{j+s} with separation s greater than any
/// |u - w| the particle reaches, which makes them coordinated. A receipt
/// from the right is influenced by Q event u - s (from the left: P event
/// w - s), the observer event on the particle's past light cone.
inline Poset build_poset(const ZitterPath& path) {
  const auto steps = path.steps();
  bool receipts = false;
  std::int64_t spread = 0;
  {
    std::int64_t u = 0, w = 0;
    for (auto s : steps) {
      spread = std::max<std::int64_t>(spread, std::abs(u - w));
      if (s == Step::p_emission) ++u;
      if (s == Step::q_emission) ++w;
      if (!is_emission(s)) receipts = true;
    }
  }
  const std::int64_t sep = spread + 1;
  const std::int64_t origin = receipts ? sep + 1 : 1;

  enum Kind : int { kP = 0, kQ = 1, kPi = 2 };
  struct Node {
    std::int64_t time2;  // doubled coordinate time
    int kind;
    std::int64_t seq;    // label on P/Q, step index on Pi
  };
  std::vector<Node> nodes;
  struct Coord {
    std::int64_t u, w;
  };
  std::vector<Coord> coords;
  coords.reserve(steps.size());
  std::int64_t u = origin, w = origin;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    coords.push_back({u, w});
    nodes.push_back({u + w, kPi, static_cast<std::int64_t>(i)});
    if (steps[i] == Step::p_emission) ++u;
    if (steps[i] == Step::q_emission) ++w;
  }
  const std::int64_t last = std::max(u, w) + sep;
  for (std::int64_t a = 1; a <= last; ++a) {
    nodes.push_back({2 * a + sep, kP, a});
    nodes.push_back({2 * a + sep, kQ, a});
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& x, const Node& y) {
    return std::tie(x.time2, x.kind, x.seq) < std::tie(y.time2, y.kind, y.seq);
  });

  PosetBuilder b;
  const auto cp = b.add_chain(kObserverP);
  const auto cq = b.add_chain(kObserverQ);
  const auto cpi = b.add_chain(kParticle);
  const auto n_obs = static_cast<std::size_t>(last + 1);
  std::vector<EventId> p_ev(n_obs), q_ev(n_obs), pi_ev(steps.size());
  for (const auto& n : nodes) {
    switch (n.kind) {
      case kP: p_ev[n.seq] = b.add_event(cp, n.seq); break;
      case kQ: q_ev[n.seq] = b.add_event(cq, n.seq); break;
      default: pi_ev[n.seq] = b.add_event(cpi); break;
    }
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto [cu, cw] = coords[i];
    switch (steps[i]) {
      case Step::p_emission: b.add_influence(pi_ev[i], p_ev[cu]); break;
      case Step::q_emission: b.add_influence(pi_ev[i], q_ev[cw]); break;
      case Step::receipt_right: b.add_influence(q_ev[cu - sep], pi_ev[i]); break;
      case Step::receipt_left: b.add_influence(p_ev[cw - sep], pi_ev[i]); break;
    }
  }
  for (std::int64_t a = 1; a + sep <= last; ++a) {
    b.add_influence(p_ev[a], q_ev[a + sep]);
    b.add_influence(q_ev[a], p_ev[a + sep]);
  }
  return std::move(b).freeze();
}

}  // namespace influence
