#pragma once

// Quantifying intervals with a coordinated pair of observer chains.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "influence/errors.hpp"
#include "influence/poset.hpp"

namespace influence {

/// Emergent description of one generalized interval. dp and dq are real so
/// the continuum dynamics can reuse this type.
struct IntervalQuant {
  double dp{};
  double dq{};
  double dt{};   // (dp + dq) / 2
  double dx{};   // (dp - dq) / 2
  double ds2{};  // dp * dq == dt^2 - dx^2
  std::optional<double> beta;  // dx / dt, absent when dt == 0
};

inline IntervalQuant quantify_interval(double dp, double dq) {
  IntervalQuant q;
  q.dp = dp;
  q.dq = dq;
  q.dt = 0.5 * (dp + dq);
  q.dx = 0.5 * (dp - dq);
  q.ds2 = dp * dq;
  if (dp + dq != 0.0) q.beta = (dp - dq) / (dp + dq);
  return q;
}

enum class Projection { forward, backward };

/// Two observer chains of one poset. Construction only checks ownership;
/// call check_coordination before relying on the pair as a frame.
class CoordinatedPair {
 public:
  CoordinatedPair(const Poset& poset, const Chain& p, const Chain& q)
      : poset_{&poset}, p_{p.id()}, q_{q.id()} {
    if (!owns(poset, p) || !owns(poset, q)) {
      throw DomainError("observer chains must belong to the same poset");
    }
  }

  CoordinatedPair(const Poset& poset, ChainId p, ChainId q)
      : CoordinatedPair(poset, poset.chain(p), poset.chain(q)) {}

  const Poset& poset() const noexcept { return *poset_; }
  const Chain& p() const { return poset_->chain(p_); }
  const Chain& q() const { return poset_->chain(q_); }

  CoordinatedPair swapped() const { return {*poset_, q_, p_}; }

 private:
  static bool owns(const Poset& poset, const Chain& c) {
    return c.id().value < poset.chains().size() &&
           &poset.chains()[c.id().value] == &c;
  }

  const Poset* poset_;
  ChainId p_;
  ChainId q_;
};

struct CoordinationReport {
  bool coordinated{};
  std::vector<std::string> diagnostics;

  explicit operator bool() const noexcept { return coordinated; }
};

namespace detail {

inline std::optional<EventId> project(const Poset& poset, EventId x,
                                      ChainId target, Projection kind) {
  return kind == Projection::forward ? poset.forward_project(x, target)
                                     : poset.backward_project(x, target);
}

// Checks that projecting `from` onto `to` is a length-preserving bijection
// over the covered segment. Appends diagnostics for the first violation.
inline bool check_projection_map(const Poset& poset, const Chain& from,
                                 const Chain& to, Projection kind,
                                 std::vector<std::string>& diagnostics) {
  const char* label = kind == Projection::forward ? "forward" : "backward";
  std::optional<std::size_t> prev_src;
  std::size_t prev_img = 0;
  bool covered = false;
  for (std::size_t i = 0; i < from.size(); ++i) {
    auto img = project(poset, from.event_at(i), to.id(), kind);
    if (!img) continue;
    const auto pos = *to.position(*img);
    if (prev_src) {
      const auto src_len = from.valuation_at(i) - from.valuation_at(*prev_src);
      const auto img_len = to.valuation_at(pos) - to.valuation_at(prev_img);
      const auto src_steps = i - *prev_src;
      const auto img_steps =
          static_cast<std::ptrdiff_t>(pos) - static_cast<std::ptrdiff_t>(prev_img);
      if (src_len != img_len ||
          img_steps != static_cast<std::ptrdiff_t>(src_steps)) {
        diagnostics.push_back(
            std::string(label) + " projection " + from.name() + "->" +
            to.name() + ": interval [" + from.name() + ":" +
            std::to_string(from.valuation_at(*prev_src)) + ", " + from.name() +
            ":" + std::to_string(from.valuation_at(i)) + "] of length " +
            std::to_string(src_len) + " maps to [" + to.name() + ":" +
            std::to_string(to.valuation_at(prev_img)) + ", " + to.name() + ":" +
            std::to_string(to.valuation_at(pos)) + "] of length " +
            std::to_string(img_len));
        return false;
      }
    }
    covered = true;
    prev_src = i;
    prev_img = pos;
  }
  if (!covered) {
    diagnostics.push_back(std::string("no event of ") + from.name() + " " +
                          label + "-projects onto " + to.name());
    return false;
  }
  return true;
}

}  // namespace detail

/// Compatibility (forward and backward projections are bijections between
/// the covered segments) plus coordination (they preserve interval length),
/// checked in both directions.
inline CoordinationReport check_coordination(const CoordinatedPair& pair) {
  CoordinationReport report;
  const auto& poset = pair.poset();
  bool ok = true;
  for (auto kind : {Projection::forward, Projection::backward}) {
    ok &= detail::check_projection_map(poset, pair.p(), pair.q(), kind,
                                       report.diagnostics);
    ok &= detail::check_projection_map(poset, pair.q(), pair.p(), kind,
                                       report.diagnostics);
  }
  report.coordinated = ok;
  return report;
}

namespace detail {

inline std::int64_t projected_valuation(const Poset& poset, EventId x,
                                        const Chain& target, Projection kind) {
  auto img = project(poset, x, target.id(), kind);
  if (!img) {
    throw ProjectionIncompleteError("event " + std::to_string(x.value) +
                                    " does not project onto " + target.name());
  }
  return *target.valuation(*img);
}

}  // namespace detail

/// Length of an interval on P as seen by the pair: (dp + dq) / 2.
inline double quantify_length(const CoordinatedPair& pair,
                              const ChainInterval& on_p) {
  if (on_p.chain != pair.p().id()) {
    throw DomainError("interval must lie on the pair's first chain");
  }
  const auto& q = pair.q();
  const auto dq =
      detail::projected_valuation(pair.poset(), on_p.hi, q, Projection::forward) -
      detail::projected_valuation(pair.poset(), on_p.lo, q, Projection::forward);
  return 0.5 * static_cast<double>(on_p.length + dq);
}

/// Distance between the pair's chains measured through [p_x, q_y]:
/// (dp - dq) / 2 with dp = P(q_y) - p_x and dq = q_y - Q(p_x).
inline double distance(const CoordinatedPair& pair, EventId p_x, EventId q_y) {
  const auto& p = pair.p();
  const auto& q = pair.q();
  const auto vx = p.valuation(p_x);
  const auto vy = q.valuation(q_y);
  if (!vx || !vy) {
    throw DomainError("distance endpoints must lie on P and Q respectively");
  }
  const auto dp =
      detail::projected_valuation(pair.poset(), q_y, p, Projection::forward) -
      *vx;
  const auto dq =
      *vy -
      detail::projected_valuation(pair.poset(), p_x, q, Projection::forward);
  return 0.5 * static_cast<double>(dp - dq);
}

/// Generalized interval [x, y] quantified by projecting both endpoints onto
/// both chains with the same projection kind.
inline IntervalQuant quantify(const CoordinatedPair& pair, EventId x, EventId y,
                              Projection kind = Projection::forward) {
  const auto& poset = pair.poset();
  const auto dp = detail::projected_valuation(poset, y, pair.p(), kind) -
                  detail::projected_valuation(poset, x, pair.p(), kind);
  const auto dq = detail::projected_valuation(poset, y, pair.q(), kind) -
                  detail::projected_valuation(poset, x, pair.q(), kind);
  return quantify_interval(static_cast<double>(dp), static_cast<double>(dq));
}

}  // namespace influence
