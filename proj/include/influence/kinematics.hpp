#pragma once

// Rates, emergent mass/momentum/energy, step statistics and frame changes.
//
// Rate convention: r_p = N / (2 dp) and r_q = N / (2 dq), i.e. each observer
// chain receives half of the N influences. Some earlier treatments omit the
// factor 1/2; all quantities here follow the halved convention.

#include <cmath>
#include <cstdint>
#include <string>

#include "influence/errors.hpp"

namespace influence {

struct EmergentState {
  std::uint64_t n_total{};
  double dp{};
  double dq{};
  double r_p{};
  double r_q{};
  double mass{};
  double momentum{};
  double energy{};
  double tau{};
};

/// Real-valued N, used by the continuum dynamics where N = 2 M tau.
inline EmergentState emergent_state_continuum(double n_total, double dp, double dq) {
  if (!(dp > 0.0) || !(dq > 0.0) || !(n_total > 0.0)) {
    throw DomainError("emergent_state requires N, dp, dq > 0");
  }
  EmergentState s;
  s.n_total = static_cast<std::uint64_t>(std::llround(n_total));
  s.dp = dp;
  s.dq = dq;
  s.r_p = n_total / (2.0 * dp);
  s.r_q = n_total / (2.0 * dq);
  s.tau = std::sqrt(dp * dq);
  s.mass = n_total / (2.0 * s.tau);
  s.momentum = 0.5 * (s.r_q - s.r_p);
  s.energy = 0.5 * (s.r_p + s.r_q);
  return s;
}

inline EmergentState emergent_state(std::uint64_t n_total, double dp,
                                    double dq) {
  if (!(dp > 0.0) || !(dq > 0.0)) {
    throw DomainError("emergent_state requires dp > 0 and dq > 0");
  }
  if (n_total == 0) throw DomainError("emergent_state requires N > 0");
  return emergent_state_continuum(static_cast<double>(n_total), dp, dq);
}

inline double k_from_velocity(double v) { return std::sqrt((1 + v) / (1 - v)); }
inline double velocity_from_k(double k) { return (k * k - 1) / (k * k + 1); }
inline double rapidity_from_velocity(double v) { return std::atanh(v); }

/// Relation between an unprimed and a primed coordinated pair: an interval of
/// length k on P forward-projects to length m and back-projects to length n
/// on P'.
class FrameRelation {
 public:
  FrameRelation(std::uint64_t m, std::uint64_t n) : m_{m}, n_{n} {
    if (m == 0 || n == 0) {
      throw DomainError("frame relation requires m > 0 and n > 0");
    }
    k_ = std::sqrt(static_cast<double>(m) / static_cast<double>(n));
    v_ = (static_cast<double>(m) - static_cast<double>(n)) /
         (static_cast<double>(m) + static_cast<double>(n));
  }

  std::uint64_t m() const noexcept { return m_; }
  std::uint64_t n() const noexcept { return n_; }
  double k() const noexcept { return k_; }
  double v() const noexcept { return v_; }
  double rapidity() const noexcept { return std::log(k_); }

  /// Applying `*this` then `next` is the relation with k = k1 * k2.
  FrameRelation then(const FrameRelation& next) const {
    return {m_ * next.m_, n_ * next.n_};
  }

 private:
  std::uint64_t m_;
  std::uint64_t n_;
  double k_;
  double v_;
};

struct ProjectedLengths {
  double dp{};
  double dq{};
};

inline ProjectedLengths transform_interval(double k, double dp, double dq) {
  return {k * dp, dq / k};
}

inline ProjectedLengths transform_interval(const FrameRelation& rel, double dp,
                                           double dq) {
  return transform_interval(rel.k(), dp, dq);
}

struct SpacetimeInterval {
  double dt{};
  double dx{};
};

inline double lorentz_gamma(double v) { return 1.0 / std::sqrt(1.0 - v * v); }

/// Boost into a frame moving with velocity v. Equivalent to
/// transform_interval with k = sqrt((1 - v) / (1 + v)) under dt = (dp+dq)/2,
/// dx = (dp-dq)/2.
inline SpacetimeInterval lorentz(double dt, double dx, double v) {
  if (!(std::abs(v) < 1.0)) {
    throw DomainError("lorentz requires |v| < 1, got " + std::to_string(v));
  }
  const double g = lorentz_gamma(v);
  return {g * (dt - v * dx), g * (dx - v * dt)};
}

struct StepStats {
  std::uint64_t n_p{};
  std::uint64_t n_total{};
  double pr_right{};
  double pr_left{};
  double m_rel{};
  double gamma{};
  double rest_mass{};  // m_rel / gamma; 1 in the unit-step frame
  double dp_frame{};   // N Pr(R) k
  double dq_frame{};   // N (1 - Pr(R)) / k
};

/// Statistics of a walk of n_total emissions, n_p of them towards P, seen
/// from `frame`. Pr(R) depends only on the counts, never on the frame.
inline StepStats step_stats(std::uint64_t n_p, std::uint64_t n_total,
                            const FrameRelation& frame) {
  if (n_total == 0 || n_p > n_total) {
    throw DomainError("step_stats requires 0 <= n_p <= n_total, n_total > 0");
  }
  if (n_p == 0 || n_p == n_total) {
    throw DomainError("degenerate lightlike walk: relativistic mass undefined");
  }
  StepStats s;
  s.n_p = n_p;
  s.n_total = n_total;
  s.pr_right = static_cast<double>(n_p) / static_cast<double>(n_total);
  s.pr_left = 1.0 - s.pr_right;
  s.m_rel = 1.0 / (2.0 * std::sqrt(s.pr_right * s.pr_left));
  const double beta = s.pr_right - s.pr_left;
  s.gamma = 1.0 / std::sqrt(1.0 - beta * beta);
  s.rest_mass = s.m_rel / s.gamma;
  const double n = static_cast<double>(n_total);
  s.dp_frame = n * s.pr_right * frame.k();
  s.dq_frame = n * s.pr_left / frame.k();
  return s;
}

}  // namespace influence
