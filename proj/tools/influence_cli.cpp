// influence: run scenarios, verify invariants, transform frames, plot.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or config error,
// 3 runtime error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "influence/dynamics.hpp"
#include "influence/errors.hpp"
#include "influence/kinematics.hpp"
#include "influence/plot.hpp"
#include "influence/poset_io.hpp"
#include "influence/quantification.hpp"
#include "influence/scenario_io.hpp"
#include "influence/simulation.hpp"
#include "influence/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace influence;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;
constexpr int kRuntime = 3;

constexpr double kResidualTolerance = 0.02;
constexpr double kSlopeTolerance = 0.05;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("INFLUENCE_SEED");
  if (!s || !*s) return std::nullopt;
  std::uint64_t v{};
  const std::string_view sv(s);
  auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
  if (ec != std::errc{} || ptr != sv.data() + sv.size()) {
    throw ConfigError("INFLUENCE_SEED is not an unsigned integer: " + std::string(sv));
  }
  return v;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json config_json(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["kind"] = to_string(c.kind);
  if (c.kind == ScenarioKind::free) {
    j["pr_right"] = c.pr_right;
  } else {
    j["r"] = c.r;
    j["phi0"] = c.phi0;
  }
  j["n_events"] = c.n_events;
  j["window"] = c.window;
  j["seed"] = c.seed;
  j["mass"] = c.effective_mass();
  j["tau0"] = c.tau0;
  j["emission"] = to_string(c.effective_emission());
  j["receipts"] = to_string(c.receipts);
  return j;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config;
  std::map<std::string, std::string> flags;
  std::size_t replicas{1};
  std::size_t threads{1};
  std::string out;
  bool emit_poset{false};
};

int cmd_simulate(const SimulateArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  std::map<std::string, std::string> kv;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw ConfigError("cannot open config file " + a.config);
    kv = read_key_values(in);
  } else {
    kv["schema_version"] = std::to_string(kScenarioSchemaVersion);
  }
  for (const auto& [k, v] : a.flags) kv[k] = v;
  const auto config = config_from_key_values(kv, env_seed());
  if (a.replicas == 0) throw UsageError("--replicas must be at least 1");

  const auto paths = simulate_replicas(config, a.replicas, a.threads);
  std::vector<MeasuredTrajectory> measured;
  measured.reserve(paths.size());
  for (const auto& p : paths) measured.push_back(coarse_grain(p, config.window));
  const auto traj = aggregate(measured);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  std::vector<std::string> artifacts;

  const bool accel = config.kind == ScenarioKind::accelerated;
  const std::optional<AnalyticAccel> sol =
      accel ? std::optional<AnalyticAccel>(AnalyticAccel{config.r, config.phi0})
            : std::nullopt;
  {
    std::ostringstream csv;
    write_measured_csv(csv, traj, sol);
    write_file(dir / "measured.csv", csv.str());
    artifacts.emplace_back("measured.csv");
  }
  {
    std::ostringstream cfg;
    write_config(cfg, config);
    write_file(dir / "config.cfg", cfg.str());
    artifacts.emplace_back("config.cfg");
  }
  if (a.emit_poset) {
    write_file(dir / "poset.txt", to_text(build_poset(paths.front())));
    artifacts.emplace_back("poset.txt");
  }

  std::uint64_t n_p = 0, n_q = 0, rr = 0, rl = 0;
  double exposure = 0;
  for (const auto& p : paths) {
    n_p += p.n_p();
    n_q += p.n_q();
    rr += p.receipts_right();
    rl += p.receipts_left();
    exposure += p.exposure_right() + p.exposure_left();
  }
  double mean_beta = 0;
  for (const auto& s : traj.samples) mean_beta += s.beta_hat;
  mean_beta /= static_cast<double>(traj.samples.size());

  json summary;
  summary["schema_version"] = 1;
  summary["kind"] = to_string(config.kind);
  summary["replicas"] = a.replicas;
  summary["windows"] = traj.samples.size();
  summary["emissions_right"] = n_p;
  summary["emissions_left"] = n_q;
  summary["pr_right_empirical"] =
      static_cast<double>(n_p) / static_cast<double>(n_p + n_q);
  summary["mean_beta_hat"] = mean_beta;
  summary["tau_end"] = traj.samples.back().tau_mid;
  bool pass = true;
  if (accel) {
    summary["receipts_right"] = rr;
    summary["receipts_left"] = rl;
    summary["realized_rate"] =
        exposure > 0 ? (static_cast<double>(rr) - static_cast<double>(rl)) / exposure
                     : 0.0;
    const auto fit = fit_rapidity(traj);
    const double rel = config.r != 0.0 ? std::abs(fit.slope - config.r) / std::abs(config.r)
                                       : std::abs(fit.slope);
    const double max_res = max_abs_residual(traj, *sol);
    const bool slope_ok = rel <= kSlopeTolerance;
    const bool res_ok = max_res <= kResidualTolerance;
    pass = slope_ok && res_ok;
    summary["fit"] = {{"slope", fit.slope},
                      {"intercept", fit.intercept},
                      {"slope_stderr", fit.slope_stderr},
                      {"slope_relative_error", rel},
                      {"slope_tolerance", kSlopeTolerance},
                      {"slope_pass", slope_ok},
                      {"windows_used", fit.used}};
    summary["max_abs_residual"] = max_res;
    summary["residual_tolerance"] = kResidualTolerance;
    summary["residual_pass"] = res_ok;
  } else {
    const double expected = 2.0 * config.pr_right - 1.0;
    const double se =
        2.0 * std::sqrt(config.pr_right * (1 - config.pr_right) /
                        static_cast<double>(n_p + n_q));
    pass = std::abs(mean_beta - expected) <= 3.0 * se;
    summary["expected_beta"] = expected;
    summary["mean_beta_stderr"] = se;
  }
  summary["tanh_fit_pass"] = pass;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  artifacts.emplace_back("summary.json");

  json manifest;
  manifest["schema_version"] = 1;
  manifest["command"] = "simulate";
  manifest["config"] = config_json(config);
  manifest["seed"] = config.seed;
  manifest["replicas"] = a.replicas;
  manifest["artifacts"] = artifacts;
  manifest["artifacts"].push_back("manifest.json");
  manifest["timing"] = {
      {"seconds",
       std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");

  fmt::print("{} windows, {} replica(s); summary in {}\n", traj.samples.size(),
             a.replicas, (dir / "summary.json").string());
  if (accel) {
    fmt::print("slope {:.6g} (r = {:.6g}), max |residual| {:.4g}\n",
               summary["fit"]["slope"].get<double>(), config.r,
               summary["max_abs_residual"].get<double>());
  } else {
    fmt::print("mean beta {:.6g} (expected {:.6g})\n", mean_beta,
               2.0 * config.pr_right - 1.0);
  }
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::vector<std::string> suites;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::string fixture;
  std::string p_name{"P"};
  std::string q_name{"Q"};
};

void print_row(const SuiteResult& r) {
  fmt::print("{:<22} {:>9} {:>12.3g} {:>9.3f}s  {}\n", r.name, r.trials, r.worst,
             r.seconds, r.passed ? "PASS" : "FAIL");
}

std::vector<SuiteResult> fixture_checks(const VerifyArgs& a) {
  std::vector<SuiteResult> out;
  SuiteResult acyclic;
  acyclic.name = "acyclicity";
  acyclic.trials = 1;
  std::optional<Poset> poset;
  try {
    poset = poset_from_text(read_file(a.fixture));
  } catch (const CycleError& e) {
    acyclic.fail(e.what());
  }
  out.push_back(acyclic);
  if (!poset) return out;

  SuiteResult oracle;
  oracle.name = "projection-oracle";
  oracle.trials = 1;
  if (auto msg = compare_with_oracle(*poset); !msg.empty()) oracle.fail(msg);
  out.push_back(oracle);

  SuiteResult coord;
  coord.name = "coordination";
  coord.trials = 1;
  const auto cp = poset->find_chain(a.p_name);
  const auto cq = poset->find_chain(a.q_name);
  if (!cp || !cq) {
    coord.fail("fixture has no observer chains " + a.p_name + " and " + a.q_name);
  } else {
    const auto report = check_coordination(CoordinatedPair(*poset, *cp, *cq));
    if (!report) {
      std::string msg;
      for (const auto& d : report.diagnostics) msg += (msg.empty() ? "" : "; ") + d;
      coord.fail(msg);
    }
  }
  out.push_back(coord);
  return out;
}

int cmd_verify(const VerifyArgs& a) {
  const auto seed = a.seed ? *a.seed : env_seed().value_or(1);
  for (const auto& s : a.suites) {
    bool known = false;
    for (const auto& suite : all_suites()) known |= suite.name == s;
    if (!known) throw UsageError("unknown suite '" + s + "'");
  }
  std::vector<SuiteResult> results;
  if (!a.fixture.empty()) results = fixture_checks(a);
  if (a.fixture.empty() || !a.suites.empty()) {
    for (const auto& suite : all_suites()) {
      if (!a.suites.empty() &&
          std::find(a.suites.begin(), a.suites.end(), suite.name) == a.suites.end()) {
        continue;
      }
      results.push_back(suite.run(a.trials.value_or(suite.default_trials), seed));
    }
  }
  fmt::print("{:<22} {:>9} {:>12} {:>10}  {}\n", "invariant", "trials", "worst",
             "time", "result");
  bool ok = true;
  for (const auto& r : results) {
    print_row(r);
    ok &= r.passed;
  }
  for (const auto& r : results) {
    if (!r.passed) fmt::print("FAILED {}: {}\n", r.name, r.detail);
  }
  return ok ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------- plot

struct PlotArgs {
  std::string poset;
  std::string csv;
  std::string out;
  double band{kResidualTolerance};
};

int cmd_plot(const PlotArgs& a) {
  if (a.poset.empty() == a.csv.empty()) {
    throw UsageError("plot needs exactly one of --poset or --csv");
  }
  std::string svg;
  if (!a.poset.empty()) {
    svg = spacetime_svg(poset_from_text(read_file(a.poset)));
  } else {
    std::istringstream in(read_file(a.csv));
    svg = beta_svg(read_measured_csv(in), a.band);
  }
  if (a.out.empty() || a.out == "-") {
    std::cout << svg;
  } else {
    write_file(a.out, svg);
  }
  return kOk;
}

// ---------------------------------------------------------------- evolve

struct EvolveArgs {
  double r{0.05};
  double phi0{0.0};
  double tau0{1.0};
  double tau_end{10.0};
  double dtau{1e-3};
  double mass{1.0};
  std::size_t stride{1};
  std::string out;
};

int cmd_evolve(const EvolveArgs& a) {
  if (!(a.tau_end >= a.tau0)) throw UsageError("--tau-end must not precede --tau0");
  const auto start = DynamicState::at(a.tau0, a.phi0 + a.r * a.tau0);
  const auto traj = evolve_ode(start, constant_rate(a.r), a.tau_end - a.tau0, a.dtau,
                               {a.mass, a.stride});
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  if (a.out.empty() || a.out == "-") {
    std::cout << csv.str();
  } else {
    write_file(a.out, csv.str());
  }
  return kOk;
}

// ---------------------------------------------------------------- transform

struct TransformArgs {
  std::optional<std::uint64_t> m, n;
  std::optional<double> v;
  std::optional<double> dp, dq, dt, dx;
};

int cmd_transform(const TransformArgs& a) {
  json j;
  if (a.m && a.n) {
    if (!a.dp || !a.dq) throw UsageError("--m/--n need --dp and --dq");
    const FrameRelation rel(*a.m, *a.n);
    const auto t = transform_interval(rel, *a.dp, *a.dq);
    j["k"] = rel.k();
    j["v"] = rel.v();
    j["rapidity"] = rel.rapidity();
    j["dp"] = t.dp;
    j["dq"] = t.dq;
    j["proper_time"] = std::sqrt(t.dp * t.dq);
    j["proper_time_before"] = std::sqrt(*a.dp * *a.dq);
  } else if (a.v) {
    if (!a.dt || !a.dx) throw UsageError("--v needs --dt and --dx");
    const auto b = lorentz(*a.dt, *a.dx, *a.v);
    j["gamma"] = lorentz_gamma(*a.v);
    j["dt"] = b.dt;
    j["dx"] = b.dx;
    j["interval"] = b.dt * b.dt - b.dx * b.dx;
    j["interval_before"] = *a.dt * *a.dt - *a.dx * *a.dx;
  } else {
    throw UsageError("transform needs --m and --n, or --v");
  }
  std::cout << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Influence-event posets: simulation, verification and plots"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run a scenario and write CSV/JSON results");
  s->add_option("--config", sim.config, "Scenario file (key = value)");
  auto flag = [&](const char* name, const char* key, const char* help) {
    s->add_option_function<std::string>(
        name, [&sim, key](const std::string& v) { sim.flags[key] = v; }, help);
  };
  flag("--kind", "kind", "free or accel");
  flag("--pr-right", "pr_right", "Pr(P-emission) for free runs");
  flag("--r", "r", "Net influence rate for accelerated runs");
  flag("--phi0", "phi0", "Initial rapidity (extrapolated to tau = 0)");
  flag("--n", "n_events", "Number of emissions");
  flag("--window", "window", "Coarse-graining window in emissions");
  flag("--seed", "seed", "Seed (falls back to INFLUENCE_SEED)");
  flag("--mass", "mass", "Emissions per two units of proper time at rest");
  flag("--tau0", "tau0", "Proper time at the start");
  flag("--emission", "emission", "bernoulli or zitter");
  flag("--receipts", "receipts", "bernoulli or deterministic");
  s->add_option("--replicas", sim.replicas, "Independent replicas to average");
  s->add_option("--threads", sim.threads, "Worker threads for replicas");
  s->add_option("--out", sim.out, "Output directory")->required();
  s->add_flag("--emit-poset", sim.emit_poset, "Also write the first replica's poset");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Run invariant suites");
  v->add_option("--suite", ver.suites, "Suite name (repeatable)");
  v->add_option("--trials", ver.trials, "Trials per suite");
  v->add_option("--seed", ver.seed, "Seed (falls back to INFLUENCE_SEED)");
  v->add_option("--fixture", ver.fixture, "Check a poset file instead");
  v->add_option("--observers", [&ver](const CLI::results_t& r) {
     ver.p_name = r.at(0);
     ver.q_name = r.at(1);
     return true;
   }, "Observer chain names in the fixture")->expected(2);

  PlotArgs plt;
  auto* p = app.add_subcommand("plot", "Write an SVG figure");
  p->add_option("--poset", plt.poset, "Poset file: spacetime diagram");
  p->add_option("--csv", plt.csv, "measured.csv: beta against proper time");
  p->add_option("--band", plt.band, "Half-width of the residual band");
  p->add_option("--out", plt.out, "Output SVG (default stdout)");

  EvolveArgs evo;
  auto* e = app.add_subcommand("evolve", "Integrate the continuum equations");
  e->add_option("--r", evo.r, "Net influence rate");
  e->add_option("--phi0", evo.phi0, "Initial rapidity (extrapolated to tau = 0)");
  e->add_option("--tau0", evo.tau0, "Start proper time");
  e->add_option("--tau-end", evo.tau_end, "End proper time");
  e->add_option("--dtau", evo.dtau, "Step size");
  e->add_option("--mass", evo.mass, "Rest mass");
  e->add_option("--stride", evo.stride, "Write every n-th step");
  e->add_option("--out", evo.out, "Output CSV (default stdout)");

  TransformArgs tr;
  auto* t = app.add_subcommand("transform", "Change frame of an interval");
  t->add_option("--m", tr.m, "Forward-projected length of a unit step");
  t->add_option("--n", tr.n, "Backward-projected length of a unit step");
  t->add_option("--dp", tr.dp);
  t->add_option("--dq", tr.dq);
  t->add_option("--v", tr.v, "Boost velocity");
  t->add_option("--dt", tr.dt);
  t->add_option("--dx", tr.dx);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return cmd_simulate(sim);
    if (*v) return cmd_verify(ver);
    if (*p) return cmd_plot(plt);
    if (*e) return cmd_evolve(evo);
    if (*t) return cmd_transform(tr);
  } catch (const ConfigError& err) {
    fmt::print(stderr, "config error: {}\n", err.what());
    return kUsage;
  } catch (const UsageError& err) {
    fmt::print(stderr, "usage error: {}\n", err.what());
    return kUsage;
  } catch (const FormatError& err) {
    fmt::print(stderr, "input error: {}\n", err.what());
    return kUsage;
  } catch (const CycleError& err) {
    fmt::print(stderr, "input error: {}\n", err.what());
    return kUsage;
  } catch (const std::exception& err) {
    fmt::print(stderr, "error: {}\n", err.what());
    return kRuntime;
  }
  return kUsage;
}
