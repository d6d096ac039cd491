#pragma once

// Scenario files and CSV tables.
//
// Scenario files are `key = value` lines; '#' starts a comment. The
// `schema_version` key is required and must be 1. Numbers in CSV output use
// the shortest representation that round-trips, so files are byte-stable.

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "influence/dynamics.hpp"
#include "influence/errors.hpp"
#include "influence/simulation.hpp"

namespace influence {

inline constexpr int kScenarioSchemaVersion = 1;

inline std::string format_number(double x) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T config_number(const std::map<std::string, std::string>& kv,
                const std::string& key) {
  const auto& s = kv.at(key);
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("config field '" + key + "': bad value '" + s + "'");
  }
  return value;
}

}  // namespace detail

inline ScenarioKind parse_kind(std::string_view s) {
  if (s == "free") return ScenarioKind::free;
  if (s == "accelerated" || s == "accel") return ScenarioKind::accelerated;
  throw ConfigError("config field 'kind': expected free or accelerated, got '" +
                    std::string(s) + "'");
}

inline EmissionOrder parse_emission(std::string_view s) {
  if (s == "bernoulli") return EmissionOrder::bernoulli;
  if (s == "zitter") return EmissionOrder::zitter;
  throw ConfigError("config field 'emission': expected bernoulli or zitter, got '" +
                    std::string(s) + "'");
}

inline ReceiptSchedule parse_receipts(std::string_view s) {
  if (s == "bernoulli") return ReceiptSchedule::bernoulli;
  if (s == "deterministic") return ReceiptSchedule::deterministic;
  throw ConfigError(
      "config field 'receipts': expected bernoulli or deterministic, got '" +
      std::string(s) + "'");
}

/// Raw key/value pairs; duplicate or unknown keys are errors.
inline std::map<std::string, std::string> read_key_values(std::istream& is) {
  static const std::array<std::string_view, 12> known{
      "schema_version", "kind", "pr_right", "r",    "phi0",     "n_events",
      "window",         "seed", "mass",     "tau0", "emission", "receipts"};
  std::map<std::string, std::string> kv;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string_view s = raw;
    if (auto hash = s.find('#'); hash != std::string_view::npos) {
      s = s.substr(0, hash);
    }
    s = detail::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line) +
                        ": expected key = value");
    }
    const std::string key(detail::trim(s.substr(0, eq)));
    const std::string value(detail::trim(s.substr(eq + 1)));
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("config line " + std::to_string(line) +
                        ": unknown field '" + key + "'");
    }
    if (!kv.emplace(key, value).second) {
      throw ConfigError("config field '" + key + "' given twice");
    }
  }
  return kv;
}

/// Builds a config from key/values. `seed_fallback` is used when the file
/// has no seed.
inline ScenarioConfig config_from_key_values(
    const std::map<std::string, std::string>& kv,
    std::optional<std::uint64_t> seed_fallback = std::nullopt) {
  auto require = [&](const std::string& key) {
    if (!kv.contains(key)) {
      throw ConfigError("missing config field '" + key + "'");
    }
  };
  require("schema_version");
  if (detail::config_number<int>(kv, "schema_version") != kScenarioSchemaVersion) {
    throw ConfigError("config field 'schema_version': unsupported version '" +
                      kv.at("schema_version") + "'");
  }
  ScenarioConfig c;
  require("kind");
  c.kind = parse_kind(kv.at("kind"));
  if (c.kind == ScenarioKind::free) {
    require("pr_right");
    c.pr_right = detail::config_number<double>(kv, "pr_right");
  } else {
    require("r");
    c.r = detail::config_number<double>(kv, "r");
    if (kv.contains("phi0")) c.phi0 = detail::config_number<double>(kv, "phi0");
  }
  require("n_events");
  c.n_events = detail::config_number<std::uint64_t>(kv, "n_events");
  if (kv.contains("window")) {
    c.window = detail::config_number<std::uint64_t>(kv, "window");
  }
  if (kv.contains("seed")) {
    c.seed = detail::config_number<std::uint64_t>(kv, "seed");
  } else if (seed_fallback) {
    c.seed = *seed_fallback;
  } else {
    throw ConfigError("missing config field 'seed'");
  }
  if (kv.contains("mass")) c.mass = detail::config_number<double>(kv, "mass");
  if (kv.contains("tau0")) c.tau0 = detail::config_number<double>(kv, "tau0");
  if (kv.contains("emission")) c.emission = parse_emission(kv.at("emission"));
  if (kv.contains("receipts")) c.receipts = parse_receipts(kv.at("receipts"));
  c.validate();
  return c;
}

inline ScenarioConfig read_config(std::istream& is,
                                  std::optional<std::uint64_t> seed_fallback =
                                      std::nullopt) {
  return config_from_key_values(read_key_values(is), seed_fallback);
}

inline ScenarioConfig load_config(const std::string& path,
                                  std::optional<std::uint64_t> seed_fallback =
                                      std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return read_config(in, seed_fallback);
}

/// Writes every field, defaults resolved, in a form read_config accepts.
inline void write_config(std::ostream& os, const ScenarioConfig& c) {
  os << "schema_version = " << kScenarioSchemaVersion << '\n'
     << "kind = " << to_string(c.kind) << '\n';
  if (c.kind == ScenarioKind::free) {
    os << "pr_right = " << format_number(c.pr_right) << '\n';
  } else {
    os << "r = " << format_number(c.r) << '\n'
       << "phi0 = " << format_number(c.phi0) << '\n';
  }
  os << "n_events = " << c.n_events << '\n'
     << "window = " << c.window << '\n'
     << "seed = " << c.seed << '\n'
     << "mass = " << format_number(c.effective_mass()) << '\n'
     << "tau0 = " << format_number(c.tau0) << '\n'
     << "emission = " << to_string(c.effective_emission()) << '\n'
     << "receipts = " << to_string(c.receipts) << '\n';
}

// ---------------------------------------------------------------- CSV

inline constexpr std::string_view kMeasuredHeader =
    "window,tau_mid,n_p,n_q,beta_hat,stderr,beta_bookkeeping,beta_analytic,"
    "residual";

/// One row per window. The analytic columns are left empty without `sol`.
inline void write_measured_csv(std::ostream& os, const MeasuredTrajectory& traj,
                               const std::optional<AnalyticAccel>& sol) {
  os << kMeasuredHeader << '\n';
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    os << i << ',' << format_number(s.tau_mid) << ',' << s.n_p << ',' << s.n_q
       << ',' << format_number(s.beta_hat) << ',' << format_number(s.stderr_)
       << ',' << format_number(s.beta_bookkeeping) << ',';
    if (sol) {
      const double b = analytic_beta(s.tau_mid, *sol);
      os << format_number(b) << ',' << format_number(s.beta_hat - b);
    } else {
      os << ',';
    }
    os << '\n';
  }
}

/// Row of a measured-trajectory CSV as read back for plotting.
struct MeasuredRow {
  double tau_mid{};
  double beta_hat{};
  double stderr_{};
  std::optional<double> beta_analytic;
};

inline std::vector<MeasuredRow> read_measured_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || detail::trim(line) != kMeasuredHeader) {
    throw FormatError("measured CSV: missing or unexpected header");
  }
  std::vector<MeasuredRow> rows;
  std::size_t n = 1;
  auto number = [&](const std::string& s) {
    double v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw FormatError("measured CSV line " + std::to_string(n) +
                        ": bad number '" + s + "'");
    }
    return v;
  };
  while (std::getline(is, line)) {
    ++n;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss{std::string(detail::trim(line))};
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() == 8) cells.emplace_back();
    if (cells.size() != 9) {
      throw FormatError("measured CSV line " + std::to_string(n) +
                        ": expected 9 columns");
    }
    MeasuredRow r;
    r.tau_mid = number(cells[1]);
    r.beta_hat = number(cells[4]);
    r.stderr_ = number(cells[5]);
    if (!cells[7].empty()) r.beta_analytic = number(cells[7]);
    rows.push_back(r);
  }
  return rows;
}

inline constexpr std::string_view kTrajectoryHeader =
    "tau,dp,dq,beta,gamma,mass,momentum,energy,force,power";

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << kTrajectoryHeader << '\n';
  for (const auto& s : traj) {
    os << format_number(s.tau) << ',' << format_number(s.dp) << ','
       << format_number(s.dq) << ',' << format_number(s.beta) << ','
       << format_number(s.gamma) << ',' << format_number(s.mass) << ','
       << format_number(s.momentum) << ',' << format_number(s.energy) << ','
       << format_number(s.force) << ','
       << format_number(s.power) << '\n';
  }
}

}  // namespace influence
