#pragma once

// Brute-force reference answers for order queries, computed by exhaustive
// depth-first search over the edge list. Quadratic; meant for checking the
// indexed queries on small posets.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "influence/poset.hpp"
#include "influence/random.hpp"

namespace influence {

/// Adjacency lists built once from the edge list; each query is a fresh
/// depth-first search.
class ReachOracle {
 public:
  explicit ReachOracle(const Poset& poset)
      : poset_{&poset}, out_(poset.event_count()), in_(poset.event_count()) {
    for (const auto& e : poset.edges()) {
      out_[e.src.value].push_back(e.dst.value);
      in_[e.dst.value].push_back(e.src.value);
    }
  }

  /// Events y with x <= y (forward) or y <= x (backward).
  std::vector<char> reach(EventId x, bool forward) const {
    const auto& adj = forward ? out_ : in_;
    std::vector<char> seen(adj.size(), 0);
    std::vector<std::uint32_t> stack{x.value};
    seen[x.value] = 1;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    return seen;
  }

  bool leq(EventId x, EventId y) const { return reach(x, true)[y.value] != 0; }

  /// Least event of `chain` reachable from x.
  std::optional<EventId> project(EventId x, const Chain& chain) const {
    return extreme(reach(x, true), chain, true);
  }

  /// Greatest event of `chain` from which x is reachable.
  std::optional<EventId> backward_project(EventId x, const Chain& chain) const {
    return extreme(reach(x, false), chain, false);
  }

  static std::optional<EventId> extreme(const std::vector<char>& seen,
                                        const Chain& chain, bool least) {
    if (least) {
      for (std::size_t i = 0; i < chain.size(); ++i) {
        if (seen[chain.event_at(i).value]) return chain.event_at(i);
      }
    } else {
      for (std::size_t i = chain.size(); i-- > 0;) {
        if (seen[chain.event_at(i).value]) return chain.event_at(i);
      }
    }
    return std::nullopt;
  }

  const Poset& poset() const noexcept { return *poset_; }

 private:
  const Poset* poset_;
  std::vector<std::vector<std::uint32_t>> out_;
  std::vector<std::vector<std::uint32_t>> in_;
};

inline bool oracle_leq(const Poset& poset, EventId x, EventId y) {
  return ReachOracle(poset).leq(x, y);
}

inline std::optional<EventId> oracle_project(const Poset& poset, EventId x,
                                             const Chain& chain) {
  return ReachOracle(poset).project(x, chain);
}

inline std::optional<EventId> oracle_backward_project(const Poset& poset,
                                                      EventId x,
                                                      const Chain& chain) {
  return ReachOracle(poset).backward_project(x, chain);
}

/// Random poset with at most `max_events` events: a few chains, some
/// unowned events, and random influence edges that respect a hidden
/// creation order (so the result is acyclic).
inline Poset random_poset(RandomStream& rng, std::size_t max_events) {
  PosetBuilder b;
  const auto n = 1 + rng.below(max_events);
  const auto n_chains = 1 + rng.below(5);
  std::vector<ChainId> chains;
  for (std::uint64_t c = 0; c < n_chains; ++c) {
    chains.push_back(b.add_chain("C" + std::to_string(c)));
  }
  std::vector<EventId> events;
  std::vector<std::optional<ChainId>> owner;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (rng.bernoulli(0.1)) {
      events.push_back(b.add_event());
      owner.push_back(std::nullopt);
    } else {
      const auto c = chains[rng.below(chains.size())];
      const auto& chain = b.chain(c);
      const auto gap = 1 + static_cast<std::int64_t>(rng.below(2));
      const auto v = chain.empty() ? gap
                                   : chain.valuation_at(chain.size() - 1) + gap;
      events.push_back(b.add_event(c, v));
      owner.push_back(c);
    }
  }
  const double density = 2.0 / static_cast<double>(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = i + 1; j < n; ++j) {
      if (owner[i] && owner[j] && *owner[i] == *owner[j]) continue;
      if (rng.bernoulli(density)) b.add_influence(events[i], events[j]);
    }
  }
  return std::move(b).freeze();
}

}  // namespace influence
