#pragma once

// Effect of received influence on a particle chain.
//
// A received influence adds one step length k to one projected length and
// rescales the other so that dp * dq, and with it the proper time, is
// unchanged. In the continuum these receipts, together with emission,
// give
//
//   d(dp)/dtau = ( r + 1/tau) dp
//   d(dq)/dtau = (-r + 1/tau) dq,        r = r_right - r_left,
//
// whose solution dp = e^phi0 tau e^{r tau}, dq = e^-phi0 tau e^{-r tau} moves
// with beta = tanh(r tau + phi0).

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "influence/errors.hpp"
#include "influence/kinematics.hpp"

namespace influence {

struct DynamicState {
  double dp{1.0};
  double dq{1.0};
  double k_step{1.0};

  DynamicState() = default;
  DynamicState(double dp_, double dq_, double k = 1.0)
      : dp{dp_}, dq{dq_}, k_step{k} {
    if (!(dp > 0.0) || !(dq > 0.0)) {
      throw DomainError("dynamic state requires dp > 0 and dq > 0");
    }
    if (!(k >= 0.0)) throw DomainError("step length must be non-negative");
  }

  /// Starts at proper time tau with rapidity phi.
  static DynamicState at(double tau, double phi, double k = 1.0) {
    return {tau * std::exp(phi), tau * std::exp(-phi), k};
  }

  double tau() const noexcept { return std::sqrt(dp * dq); }
  double beta() const noexcept { return (dp - dq) / (dp + dq); }
  double rapidity() const noexcept { return 0.5 * std::log(dp / dq); }
  double gamma() const noexcept { return 0.5 * (dp + dq) / tau(); }
};

/// Receipt of one influence from the right (from Q).
inline DynamicState receive_right(const DynamicState& s) {
  DynamicState out = s;
  out.dp = s.dp + s.k_step;
  out.dq = s.dq * (s.dp / out.dp);
  return out;
}

/// Receipt of one influence from the left (from P); mirror of receive_right.
inline DynamicState receive_left(const DynamicState& s) {
  DynamicState out = s;
  out.dq = s.dq + s.k_step;
  out.dp = s.dp * (s.dq / out.dq);
  return out;
}

/// Receipts per P-emission per unit proper time.
inline double influence_rate(std::uint64_t n_r, std::uint64_t n_p,
                             double dtau) {
  if (n_p == 0 || !(dtau > 0.0)) {
    throw DomainError("influence_rate requires n_p > 0 and dtau > 0");
  }
  return static_cast<double>(n_r) / (static_cast<double>(n_p) * dtau);
}

struct InfluenceRates {
  double r_right{};
  double r_left{};

  double r_net() const noexcept { return r_right - r_left; }

  /// Rates from counts: n_r receipts per n_p emissions over dtau.
  static InfluenceRates from_counts(std::uint64_t n_right, std::uint64_t n_left,
                                    std::uint64_t n_p, double dtau) {
    return {influence_rate(n_right, n_p, dtau), influence_rate(n_left, n_p, dtau)};
  }

  /// Net rate r as receipts from the right (r >= 0) or left (r < 0).
  static InfluenceRates net(double r) {
    return r >= 0.0 ? InfluenceRates{r, 0.0} : InfluenceRates{0.0, -r};
  }
};

/// Rates as a function of proper time and emergent position.
using RateField = std::function<InfluenceRates(double tau, double x)>;

inline RateField constant_rate(double r) {
  return [rates = InfluenceRates::net(r)](double, double) { return rates; };
}

/// Closed-form constant-acceleration solution, parameterized by the
/// acceleration r and initial rapidity phi0 (A = e^phi0, B = 1/A).
struct AnalyticAccel {
  double r{};
  double phi0{};

  double a() const noexcept { return std::exp(phi0); }
  double b() const noexcept { return std::exp(-phi0); }

  /// The solution passing through `s` at its proper time.
  static AnalyticAccel through(const DynamicState& s, double r) {
    return {r, s.rapidity() - r * s.tau()};
  }

  ProjectedLengths deltas(double tau) const {
    return {a() * tau * std::exp(r * tau), b() * tau * std::exp(-r * tau)};
  }
};

inline double analytic_beta(double tau, const AnalyticAccel& sol) {
  return std::tanh(sol.r * tau + sol.phi0);
}

inline ProjectedLengths analytic_deltas(double tau, const AnalyticAccel& sol) {
  return sol.deltas(tau);
}

/// Relativistic Newton's second law: dP/dtau = M gamma r.
inline double force(double mass, double gamma, double r) {
  return mass * gamma * r;
}

/// dE/dtau = F beta.
inline double power(double force_value, double beta) {
  return force_value * beta;
}

/// One classical fourth-order Runge-Kutta step of y' = f(t, y).
template <class State, class Rhs>
State rk4_step(const Rhs& f, double t, const State& y, double h) {
  auto axpy = [](const State& base, double a, const State& d) {
    State out = base;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * d[i];
    return out;
  };
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * h, axpy(y, 0.5 * h, k1));
  const State k3 = f(t + 0.5 * h, axpy(y, 0.5 * h, k2));
  const State k4 = f(t + h, axpy(y, h, k3));
  State out = y;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

struct TrajectorySample {
  double tau{};
  double dp{};
  double dq{};
  double beta{};
  double gamma{};
  double mass{};
  double momentum{};
  double energy{};
  double r{};
  double force{};
  double power{};
};

using Trajectory = std::vector<TrajectorySample>;

struct EvolveOptions {
  double mass{1.0};  // rest mass M; emergent quantities use N = 2 M tau
  std::size_t sample_stride{1};
};

inline TrajectorySample make_sample(double tau, double dp, double dq, double r,
                                    double mass) {
  const auto em = emergent_state_continuum(2.0 * mass * tau, dp, dq);
  TrajectorySample s;
  s.tau = tau;
  s.dp = dp;
  s.dq = dq;
  s.beta = (dp - dq) / (dp + dq);
  s.gamma = 0.5 * (dp + dq) / std::sqrt(dp * dq);
  s.mass = em.mass;
  s.momentum = em.momentum;
  s.energy = em.energy;
  s.r = r;
  s.force = force(em.mass, s.gamma, r);
  s.power = power(s.force, s.beta);
  return s;
}

/// Integrates the receipt/emission equations from `initial` (whose proper
/// time must be positive) over `tau_span` with fixed RK4 steps of about
/// `dtau`. The step is shrunk so that an integer number of steps lands
/// exactly on the end time.
inline Trajectory evolve_ode(const DynamicState& initial, const RateField& rates,
                             double tau_span, double dtau,
                             const EvolveOptions& opts = {}) {
  if (!(dtau > 0.0)) throw DomainError("evolve_ode requires dtau > 0");
  if (!(tau_span >= 0.0)) throw DomainError("evolve_ode requires tau_span >= 0");
  const double tau0 = initial.tau();
  if (!(tau0 > 0.0)) {
    throw SingularTimeError("integration must start at proper time > 0");
  }
  const auto steps =
      static_cast<std::size_t>(std::ceil(tau_span / dtau - 1e-9));
  const double h = steps == 0 ? 0.0 : tau_span / static_cast<double>(steps);
  const std::size_t stride = opts.sample_stride == 0 ? 1 : opts.sample_stride;

  using Y = std::array<double, 2>;
  auto rhs = [&rates](double tau, const Y& y) -> Y {
    const double r = rates(tau, 0.5 * (y[0] - y[1])).r_net();
    const double inv = 1.0 / tau;
    return {(r + inv) * y[0], (-r + inv) * y[1]};
  };

  Trajectory out;
  out.reserve(steps / stride + 2);
  Y y{initial.dp, initial.dq};
  auto emit = [&](double tau) {
    const double r = rates(tau, 0.5 * (y[0] - y[1])).r_net();
    out.push_back(make_sample(tau, y[0], y[1], r, opts.mass));
  };
  emit(tau0);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t = tau0 + static_cast<double>(i - 1) * h;
    y = rk4_step(rhs, t, y, h);
    if (!(y[0] > 0.0) || !(y[1] > 0.0)) {
      throw DomainError("projected lengths left the positive quadrant");
    }
    if (i % stride == 0 || i == steps) {
      emit(tau0 + static_cast<double>(i) * h);
    }
  }
  return out;
}

}  // namespace influence
