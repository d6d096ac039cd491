#pragma once

// Partially ordered sets of influence events.
//
// Events live on chains (particle or observer histories) or stand alone.
// Chain edges join consecutive events of one chain; influence edges join
// events on different chains. The order x <= y holds when y is reachable
// from x through zero or more edges.
//
// A PosetBuilder accepts mutations and rejects any edge that would close a
// cycle. freeze() produces an immutable Poset carrying a reachability index
// that answers order and projection queries in constant time.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "influence/errors.hpp"

namespace influence {

struct EventId {
  std::uint32_t value{};
  friend constexpr auto operator<=>(EventId, EventId) = default;
};

struct ChainId {
  std::uint32_t value{};
  friend constexpr auto operator<=>(ChainId, ChainId) = default;
};

enum class EdgeKind : std::uint8_t { chain, influence };

struct Edge {
  EdgeKind kind;
  EventId src;
  EventId dst;
};

/// A totally ordered sequence of events with strictly increasing integer
/// valuations. Event ids increase along a chain because events are only
/// ever appended at the tail.
class Chain {
 public:
  Chain(ChainId id, std::string name) : id_{id}, name_{std::move(name)} {}

  ChainId id() const noexcept { return id_; }
  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

  std::span<const EventId> events() const noexcept { return events_; }
  std::span<const std::int64_t> valuations() const noexcept {
    return valuations_;
  }

  EventId event_at(std::size_t pos) const { return events_.at(pos); }
  std::int64_t valuation_at(std::size_t pos) const {
    return valuations_.at(pos);
  }

  std::optional<std::size_t> position(EventId e) const noexcept {
    auto it = std::lower_bound(events_.begin(), events_.end(), e);
    if (it == events_.end() || *it != e) return std::nullopt;
    return static_cast<std::size_t>(it - events_.begin());
  }

  bool contains(EventId e) const noexcept { return position(e).has_value(); }

  std::optional<std::int64_t> valuation(EventId e) const noexcept {
    if (auto p = position(e)) return valuations_[*p];
    return std::nullopt;
  }

 private:
  friend class PosetBuilder;

  ChainId id_;
  std::string name_;
  std::vector<EventId> events_;
  std::vector<std::int64_t> valuations_;
};

/// Closed interval [lo, hi] along one chain.
struct ChainInterval {
  ChainId chain;
  EventId lo;
  EventId hi;
  std::size_t lo_pos;
  std::size_t hi_pos;
  std::int64_t length;

  /// Events lo..hi inclusive.
  std::span<const EventId> members(const Chain& c) const {
    return c.events().subspan(lo_pos, hi_pos - lo_pos + 1);
  }
};

class Poset;

class PosetBuilder {
 public:
  PosetBuilder() = default;

  ChainId add_chain(std::string name) {
    if (name.empty() || name == "-" ||
        name.find_first_of(" \t\r\n=") != std::string::npos) {
      throw DomainError("invalid chain name '" + name + "'");
    }
    if (find_chain(name)) throw DomainError("duplicate chain name " + name);
    ChainId id{static_cast<std::uint32_t>(chains_.size())};
    chains_.emplace_back(id, std::move(name));
    return id;
  }

  std::optional<ChainId> find_chain(std::string_view name) const noexcept {
    for (const auto& c : chains_)
      if (c.name() == name) return c.id();
    return std::nullopt;
  }

  /// Appends an event to the chain with valuation one past the tail (1 for
  /// an empty chain).
  EventId add_event(ChainId chain) {
    const auto& c = chain_ref(chain);
    return add_event(chain, c.empty() ? 1 : c.valuations_.back() + 1);
  }

  EventId add_event(ChainId chain, std::int64_t valuation) {
    auto& c = chain_ref(chain);
    if (!c.empty() && valuation <= c.valuations_.back()) {
      throw DomainError("valuations must strictly increase along chain " +
                        c.name());
    }
    const EventId e = new_node(chain);
    const auto pos = static_cast<std::uint32_t>(c.events_.size());
    c.events_.push_back(e);
    c.valuations_.push_back(valuation);
    records_.back().position = pos;
    if (pos > 0) link(EdgeKind::chain, c.events_[pos - 1], e);
    return e;
  }

  /// An event owned by no chain.
  EventId add_event() { return new_node(std::nullopt); }

  /// Adds an influence edge src -> dst. Throws CycleError if dst already
  /// precedes src, DomainError if both lie on the same chain or the edge
  /// already exists.
  void add_influence(EventId src, EventId dst) {
    check(src);
    check(dst);
    const auto& rs = records_[src.value];
    const auto& rd = records_[dst.value];
    if (src == dst) throw CycleError("influence edge from an event to itself");
    if (rs.chain && rd.chain && *rs.chain == *rd.chain) {
      throw DomainError("influence edge within chain " +
                        chains_[rs.chain->value].name());
    }
    for (auto s : succ_[src.value]) {
      if (s == dst.value) throw DomainError("duplicate influence edge");
    }
    reorder_for(src.value, dst.value);
    link(EdgeKind::influence, src, dst);
  }

  /// Like add_influence but reports a would-be cycle instead of throwing.
  bool try_add_influence(EventId src, EventId dst) {
    try {
      add_influence(src, dst);
      return true;
    } catch (const CycleError&) {
      return false;
    }
  }

  std::size_t event_count() const noexcept { return records_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const Chain& chain(ChainId id) const { return chain_ref(id); }
  std::span<const Chain> chains() const noexcept { return chains_; }

  Poset freeze() const&;
  Poset freeze() &&;

 private:
  friend class Poset;

  struct Record {
    std::optional<ChainId> chain;
    std::uint32_t position{};
  };

  Chain& chain_ref(ChainId id) {
    if (id.value >= chains_.size()) throw IdentifierError("unknown chain id");
    return chains_[id.value];
  }
  const Chain& chain_ref(ChainId id) const {
    if (id.value >= chains_.size()) throw IdentifierError("unknown chain id");
    return chains_[id.value];
  }

  void check(EventId e) const {
    if (e.value >= records_.size()) {
      throw IdentifierError("unknown event id " + std::to_string(e.value));
    }
  }

  EventId new_node(std::optional<ChainId> chain) {
    const auto n = static_cast<std::uint32_t>(records_.size());
    records_.push_back({chain, 0});
    succ_.emplace_back();
    pred_.emplace_back();
    order_.push_back(n);
    at_.push_back(n);
    mark_.push_back(0);
    return EventId{n};
  }

  void link(EdgeKind kind, EventId src, EventId dst) {
    succ_[src.value].push_back(dst.value);
    pred_[dst.value].push_back(src.value);
    edges_.push_back({kind, src, dst});
  }

  // Pearce-Kelly: keep order_ a topological order under insertion of x -> y.
  void reorder_for(std::uint32_t x, std::uint32_t y) {
    const auto lb = order_[y];
    const auto ub = order_[x];
    if (lb > ub) return;

    std::vector<std::uint32_t> fwd;
    std::vector<std::uint32_t> stack{y};
    mark_[y] = 1;
    bool cycle = false;
    while (!stack.empty() && !cycle) {
      const auto n = stack.back();
      stack.pop_back();
      fwd.push_back(n);
      for (auto s : succ_[n]) {
        if (s == x) {
          cycle = true;
          break;
        }
        if (!mark_[s] && order_[s] < ub) {
          mark_[s] = 1;
          stack.push_back(s);
        }
      }
    }
    if (cycle) {
      for (auto n : fwd) mark_[n] = 0;
      for (auto n : stack) mark_[n] = 0;
      throw CycleError("influence edge " + std::to_string(x) + " -> " +
                       std::to_string(y) + " would create a cycle");
    }

    std::vector<std::uint32_t> bwd;
    stack.push_back(x);
    mark_[x] = 1;
    while (!stack.empty()) {
      const auto n = stack.back();
      stack.pop_back();
      bwd.push_back(n);
      for (auto p : pred_[n]) {
        if (!mark_[p] && order_[p] > lb) {
          mark_[p] = 1;
          stack.push_back(p);
        }
      }
    }

    auto by_order = [this](std::uint32_t a, std::uint32_t b) {
      return order_[a] < order_[b];
    };
    std::sort(fwd.begin(), fwd.end(), by_order);
    std::sort(bwd.begin(), bwd.end(), by_order);

    std::vector<std::uint32_t> slots;
    slots.reserve(fwd.size() + bwd.size());
    for (auto n : bwd) slots.push_back(order_[n]);
    for (auto n : fwd) slots.push_back(order_[n]);
    std::sort(slots.begin(), slots.end());

    std::size_t i = 0;
    for (auto n : bwd) {
      order_[n] = slots[i];
      at_[slots[i++]] = n;
      mark_[n] = 0;
    }
    for (auto n : fwd) {
      order_[n] = slots[i];
      at_[slots[i++]] = n;
      mark_[n] = 0;
    }
  }

  std::vector<Chain> chains_;
  std::vector<Record> records_;
  std::vector<std::vector<std::uint32_t>> succ_;
  std::vector<std::vector<std::uint32_t>> pred_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> order_;  // node -> topological slot
  std::vector<std::uint32_t> at_;     // topological slot -> node
  std::vector<std::uint8_t> mark_;
};

/// Immutable poset with a chain-decomposition reachability index.
///
/// Every event is assigned to one index column: its chain, or a private
/// singleton column when it has no chain. For each event x and column c the
/// index stores the least position on c reachable from x and the greatest
/// position on c from which x is reachable. Because each column is totally
/// ordered, x <= y iff least(x, column(y)) <= position(y).
class Poset {
 public:
  Poset() = default;

  std::size_t event_count() const noexcept { return records_.size(); }
  std::span<const Chain> chains() const noexcept { return chains_; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  const Chain& chain(ChainId id) const {
    if (id.value >= chains_.size()) throw IdentifierError("unknown chain id");
    return chains_[id.value];
  }

  std::optional<ChainId> find_chain(std::string_view name) const noexcept {
    for (const auto& c : chains_)
      if (c.name() == name) return c.id();
    return std::nullopt;
  }

  const Chain& chain(std::string_view name) const {
    if (auto id = find_chain(name)) return chains_[id->value];
    throw IdentifierError("unknown chain " + std::string(name));
  }

  std::optional<ChainId> chain_of(EventId e) const {
    check(e);
    return records_[e.value].chain;
  }

  std::optional<std::int64_t> valuation(EventId e) const {
    check(e);
    const auto& r = records_[e.value];
    if (!r.chain) return std::nullopt;
    return chains_[r.chain->value].valuation_at(r.position);
  }

  std::span<const std::uint32_t> successors(EventId e) const {
    check(e);
    return succ_[e.value];
  }
  std::span<const std::uint32_t> predecessors(EventId e) const {
    check(e);
    return pred_[e.value];
  }

  /// Events in a topological order of the edge relation.
  std::span<const std::uint32_t> topological_order() const noexcept {
    return topo_;
  }

  bool leq(EventId x, EventId y) const {
    check(x);
    check(y);
    const auto col = column_[y.value];
    return least_[index(x.value, col)] <= column_pos_[y.value];
  }

  bool less(EventId x, EventId y) const { return x != y && leq(x, y); }

  bool comparable(EventId x, EventId y) const {
    return leq(x, y) || leq(y, x);
  }

  /// Least event of the chain that includes x, if any.
  std::optional<EventId> forward_project(EventId x, ChainId target) const {
    check(x);
    const auto& c = chain(target);
    const auto pos = least_[index(x.value, target.value)];
    if (pos == kNone) return std::nullopt;
    return c.event_at(pos);
  }

  /// Greatest event of the chain included by x, if any.
  std::optional<EventId> backward_project(EventId x, ChainId target) const {
    check(x);
    const auto& c = chain(target);
    const auto pos = greatest_[index(x.value, target.value)];
    if (pos == 0) return std::nullopt;
    return c.event_at(pos - 1);
  }

  /// The pair (Px, P̄x) of valuations when x projects both ways onto target.
  std::optional<std::pair<std::int64_t, std::int64_t>> coordinates(
      EventId x, ChainId target) const {
    auto f = forward_project(x, target);
    auto b = backward_project(x, target);
    if (!f || !b) return std::nullopt;
    const auto& c = chain(target);
    return std::pair{*c.valuation(*f), *c.valuation(*b)};
  }

  ChainInterval chain_interval(ChainId cid, EventId x, EventId z) const {
    const auto& c = chain(cid);
    const auto px = c.position(x);
    const auto pz = c.position(z);
    if (!px || !pz) {
      throw DomainError("interval endpoints must lie on chain " + c.name());
    }
    if (*px > *pz) {
      throw DomainError("interval endpoints out of order on chain " +
                        c.name());
    }
    return {cid, x, z, *px, *pz, c.valuation_at(*pz) - c.valuation_at(*px)};
  }

  PosetBuilder thaw() const {
    PosetBuilder b;
    b.chains_ = chains_;
    b.records_.reserve(records_.size());
    for (const auto& r : records_) b.records_.push_back({r.chain, r.position});
    b.succ_ = succ_;
    b.pred_ = pred_;
    b.edges_ = edges_;
    b.order_.resize(records_.size());
    b.at_ = topo_;
    for (std::uint32_t i = 0; i < topo_.size(); ++i) b.order_[topo_[i]] = i;
    b.mark_.assign(records_.size(), 0);
    return b;
  }

 private:
  friend class PosetBuilder;

  static constexpr std::uint32_t kNone =
      std::numeric_limits<std::uint32_t>::max();

  struct Record {
    std::optional<ChainId> chain;
    std::uint32_t position{};
  };

  void check(EventId e) const {
    if (e.value >= records_.size()) {
      throw IdentifierError("unknown event id " + std::to_string(e.value));
    }
  }

  std::size_t index(std::uint32_t node, std::uint32_t col) const noexcept {
    return static_cast<std::size_t>(node) * columns_ + col;
  }

  void build_index() {
    const auto n = records_.size();
    columns_ = static_cast<std::uint32_t>(chains_.size());
    column_.resize(n);
    column_pos_.resize(n);
    for (std::uint32_t v = 0; v < n; ++v) {
      const auto& r = records_[v];
      if (r.chain) {
        column_[v] = r.chain->value;
        column_pos_[v] = r.position;
      } else {
        column_[v] = columns_++;
        column_pos_[v] = 0;
      }
    }
    least_.assign(n * columns_, kNone);
    greatest_.assign(n * columns_, 0);

    for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
      const auto v = *it;
      auto* row = &least_[index(v, 0)];
      row[column_[v]] = column_pos_[v];
      for (auto s : succ_[v]) {
        const auto* srow = &least_[index(s, 0)];
        for (std::uint32_t c = 0; c < columns_; ++c)
          row[c] = std::min(row[c], srow[c]);
      }
    }
    for (const auto v : topo_) {
      auto* row = &greatest_[index(v, 0)];
      row[column_[v]] = column_pos_[v] + 1;
      for (auto p : pred_[v]) {
        const auto* prow = &greatest_[index(p, 0)];
        for (std::uint32_t c = 0; c < columns_; ++c)
          row[c] = std::max(row[c], prow[c]);
      }
    }
  }

  std::vector<Chain> chains_;
  std::vector<Record> records_;
  std::vector<std::vector<std::uint32_t>> succ_;
  std::vector<std::vector<std::uint32_t>> pred_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> topo_;

  std::uint32_t columns_{};
  std::vector<std::uint32_t> column_;
  std::vector<std::uint32_t> column_pos_;
  std::vector<std::uint32_t> least_;     // kNone when unreachable
  std::vector<std::uint32_t> greatest_;  // position + 1, 0 when none
};

inline Poset PosetBuilder::freeze() const& { return PosetBuilder(*this).freeze(); }

inline Poset PosetBuilder::freeze() && {
  Poset p;
  p.chains_ = std::move(chains_);
  p.records_.reserve(records_.size());
  for (const auto& r : records_) p.records_.push_back({r.chain, r.position});
  p.succ_ = std::move(succ_);
  p.pred_ = std::move(pred_);
  p.edges_ = std::move(edges_);
  p.topo_ = std::move(at_);
  p.build_index();
  *this = PosetBuilder{};
  return p;
}

}  // namespace influence
