#pragma once

// Line-oriented poset text format.
//
//   event <id> chain=<name> v=<valuation>     (chain=- v=0 for unowned)
//   edge chain <src> <dst>
//   edge influence <src> <dst>
//
// Blank lines and lines starting with '#' are ignored. Event ids must be
// 0..n-1 and, within a chain, must increase with valuation. The writer emits
// events by id and edges by (src, dst), so output is stable for golden files.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "influence/errors.hpp"
#include "influence/poset.hpp"

namespace influence {

inline void write_poset(std::ostream& os, const Poset& poset) {
  for (std::uint32_t i = 0; i < poset.event_count(); ++i) {
    const EventId e{i};
    os << "event " << i << " chain=";
    if (auto c = poset.chain_of(e)) {
      os << poset.chain(*c).name() << " v=" << *poset.valuation(e);
    } else {
      os << "- v=0";
    }
    os << '\n';
  }
  std::vector<Edge> edges(poset.edges().begin(), poset.edges().end());
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  for (const auto& e : edges) {
    os << "edge " << (e.kind == EdgeKind::chain ? "chain" : "influence")
       << ' ' << e.src.value << ' ' << e.dst.value << '\n';
  }
}

inline std::string to_text(const Poset& poset) {
  std::ostringstream os;
  write_poset(os, poset);
  return os.str();
}

namespace detail {

template <class T>
T parse_number(std::string_view s, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError("line " + std::to_string(line) + ": bad number '" +
                      std::string(s) + "'");
  }
  return value;
}

inline std::string_view strip_key(std::string_view token,
                                  std::string_view key, std::size_t line) {
  if (token.substr(0, key.size()) != key) {
    throw FormatError("line " + std::to_string(line) + ": expected " +
                      std::string(key) + "...");
  }
  return token.substr(key.size());
}

}  // namespace detail

/// Parses the text format. CycleError propagates unchanged so callers can
/// report an acyclicity violation separately from malformed input.
inline Poset read_poset(std::istream& is) {
  struct EventLine {
    std::string chain;
    std::int64_t v;
    std::size_t line;
  };
  struct EdgeLine {
    EdgeKind kind;
    std::uint32_t src, dst;
    std::size_t line;
  };
  std::map<std::uint32_t, EventLine> events;
  std::vector<EdgeLine> edges;

  std::string raw;
  std::size_t line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::istringstream ls(raw);
    std::string head;
    if (!(ls >> head) || head.front() == '#') continue;
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (head == "event") {
      if (tok.size() != 3) {
        throw FormatError("line " + std::to_string(line) +
                          ": expected 'event <id> chain=<name> v=<int>'");
      }
      const auto id = detail::parse_number<std::uint32_t>(tok[0], line);
      auto chain = std::string(detail::strip_key(tok[1], "chain=", line));
      const auto v = detail::parse_number<std::int64_t>(
          detail::strip_key(tok[2], "v=", line), line);
      if (!events.emplace(id, EventLine{chain, v, line}).second) {
        throw FormatError("line " + std::to_string(line) +
                          ": duplicate event id " + tok[0]);
      }
    } else if (head == "edge") {
      if (tok.size() != 3 || (tok[0] != "chain" && tok[0] != "influence")) {
        throw FormatError("line " + std::to_string(line) +
                          ": expected 'edge chain|influence <src> <dst>'");
      }
      edges.push_back({tok[0] == "chain" ? EdgeKind::chain
                                         : EdgeKind::influence,
                       detail::parse_number<std::uint32_t>(tok[1], line),
                       detail::parse_number<std::uint32_t>(tok[2], line),
                       line});
    } else {
      throw FormatError("line " + std::to_string(line) + ": unknown record '" +
                        head + "'");
    }
  }

  PosetBuilder b;
  std::uint32_t expected = 0;
  for (const auto& [id, ev] : events) {
    if (id != expected++) {
      throw FormatError("event ids must be dense from 0; missing " +
                        std::to_string(expected - 1));
    }
    if (ev.chain == "-") {
      b.add_event();
      continue;
    }
    auto cid = b.find_chain(ev.chain);
    if (!cid) cid = b.add_chain(ev.chain);
    try {
      b.add_event(*cid, ev.v);
    } catch (const DomainError& err) {
      throw FormatError("line " + std::to_string(ev.line) + ": " + err.what());
    }
  }

  std::set<std::uint32_t> chain_edge_srcs;
  for (const auto& e : edges) {
    if (e.src >= b.event_count() || e.dst >= b.event_count()) {
      throw FormatError("line " + std::to_string(e.line) +
                        ": edge references unknown event");
    }
    if (e.kind == EdgeKind::chain) {
      if (!chain_edge_srcs.insert(e.src).second) {
        throw FormatError("line " + std::to_string(e.line) +
                          ": duplicate chain edge");
      }
      const auto& rec_chain = events.at(e.src).chain;
      bool ok = rec_chain != "-" && rec_chain == events.at(e.dst).chain;
      if (ok) {
        const auto& c = b.chain(*b.find_chain(rec_chain));
        const auto ps = c.position(EventId{e.src});
        const auto pd = c.position(EventId{e.dst});
        ok = ps && pd && *pd == *ps + 1;
      }
      if (!ok) {
        throw FormatError("line " + std::to_string(e.line) +
                          ": chain edge must join consecutive chain events");
      }
    } else {
      b.add_influence(EventId{e.src}, EventId{e.dst});
    }
  }
  std::size_t implied = 0;
  for (const auto& c : b.chains()) implied += c.empty() ? 0 : c.size() - 1;
  if (chain_edge_srcs.size() != implied) {
    throw FormatError("chain edges listed (" + std::to_string(chain_edge_srcs.size()) +
                      ") do not match chain structure (" +
                      std::to_string(implied) + ")");
  }
  return std::move(b).freeze();
}

inline Poset poset_from_text(const std::string& text) {
  std::istringstream is(text);
  return read_poset(is);
}

inline Poset load_poset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return read_poset(in);
}

inline void save_poset(const std::string& path, const Poset& poset) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  write_poset(out, poset);
}

}  // namespace influence
