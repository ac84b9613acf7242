// Copyright 2026 The BBM92 Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Command layer behind the `bbm92` executable. Each command turns a validated
// RunConfig into a Table plus a summary; `run` handles parsing, output and
// exit codes so that tests can drive it in-process.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bbm92/bbm92.hpp"
#include "bbm92/selftest.hpp"

#ifndef BBM92_VERSION
#define BBM92_VERSION "0.0.0"
#endif

namespace bbm92::cli {

enum ExitCode : int { kOk = 0, kInvalidArgument = 2, kInfeasible = 3, kNumericalFailure = 4 };

// Inclusive `start:stop:count` grid.
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  static GridSpec parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    detail::require(parts.size() == 3, "grid spec must be start:stop:count, got '" + text + "'");
    GridSpec g;
    try {
      std::size_t used = 0;
      g.start = std::stod(parts[0], &used);
      detail::require(used == parts[0].size(), "bad grid start");
      g.stop = std::stod(parts[1], &used);
      detail::require(used == parts[1].size(), "bad grid stop");
      g.count = std::stoi(parts[2], &used);
      detail::require(used == parts[2].size(), "bad grid count");
    } catch (const std::logic_error&) {
      throw InvalidArgument("grid spec must be start:stop:count, got '" + text + "'");
    }
    detail::require(std::isfinite(g.start) && std::isfinite(g.stop), "grid ends must be finite");
    detail::require(g.count >= 1, "grid count must be >= 1");
    detail::require(g.count > 1 || g.start == g.stop, "a one-point grid needs start == stop");
    return g;
  }

  std::vector<double> values() const {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) {
      v[i] = count == 1 ? start : start + (stop - start) * i / (count - 1);
    }
    if (count > 1) v.back() = stop;
    return v;
  }
};

struct RunConfig {
  std::string command;
  std::optional<double> delta, eps;
  std::optional<std::string> delta_grid, eps_grid;
  double f = 1.0;
  int na = 1, nb = 2;
  std::optional<int> resolution;  // per-command default when unset
  int states = 1000;
  std::optional<double> alpha, beta;
  int sweep = 0;
  std::string source = "ideal";
  std::uint64_t events = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
  std::string format = "csv";
  std::string config;
};

struct CommandOutput {
  Table table;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  int exit_code = kOk;
};

inline const std::map<std::string, std::set<std::string>>& command_flags() {
  static const std::map<std::string, std::set<std::string>> flags = {
      {"tau", {"delta", "eps", "delta-grid", "eps-grid", "resolution"}},
      {"keyrate", {"delta", "eps", "delta-grid", "eps-grid", "f"}},
      {"tradeoff", {"na", "nb", "resolution", "states", "seed"}},
      {"attack", {"alpha", "beta", "sweep"}},
      {"simulate", {"source", "events", "seed", "threads", "f"}},
      {"selftest", {}},
  };
  return flags;
}

namespace impl {

inline double nan_if_empty(const std::optional<double>& v) { return v.value_or(rates::kNaN); }

inline std::vector<double> axis(const std::optional<double>& scalar,
                                const std::optional<std::string>& grid,
                                const std::string& fallback, const std::string& name) {
  detail::require(!(scalar && grid), "give either --" + name + " or --" + name + "-grid");
  if (scalar) return {*scalar};
  return GridSpec::parse(grid.value_or(fallback)).values();
}

struct Axes {
  std::vector<double> deltas, eps;
  bool scalar = false;
};

inline Axes observed_axes(const RunConfig& c) {
  Axes a;
  a.deltas = axis(c.delta, c.delta_grid, "0:0.25:26", "delta");
  a.eps = axis(c.eps, c.eps_grid, "0:0:1", "eps");
  a.scalar = !c.delta_grid && !c.eps_grid;
  return a;
}

// Scalar inputs: bad values are argument errors, points outside the domain
// of tau are infeasible. Grid inputs: such points become infeasible rows.
inline std::optional<rates::ObservedStats> stats_at(double delta, double eps, bool scalar) {
  try {
    return rates::ObservedStats(delta, eps);
  } catch (const InvalidArgument&) {
    if (scalar) throw;
    return std::nullopt;
  }
}

inline void throw_if_infeasible(const rates::TauResult& t, double delta, double eps) {
  if (t.feasible()) return;
  throw Infeasible("(delta, eps) = (" + format_number(delta) + ", " + format_number(eps) +
                   ") is outside the region where tau is defined");
}

// Ellipse traced by the attack: lower branch (1 - d)/2 - sqrt(d(1 - 2d)) and
// its mirror 1 - d - lower, for d in [0, 1/2].
inline double attack_curve(double delta_m, bool lower) {
  const double d = std::clamp(delta_m, 0.0, 0.5);
  const double low = 0.5 * (1.0 - d) - std::sqrt(std::max(0.0, d * (1.0 - 2.0 * d)));
  return lower ? low : 1.0 - d - low;
}

inline double g_clamped(double delta_m) { return rates::g(std::clamp(delta_m, 0.0, 1.0 / 3.0)); }

}  // namespace impl

inline CommandOutput cmd_tau(const RunConfig& c) {
  const impl::Axes ax = impl::observed_axes(c);
  const int resolution = c.resolution.value_or(2000);
  detail::require(resolution >= 10, "resolution must be >= 10");
  CommandOutput o;
  o.table.columns = {"delta", "eps", "tau_closed", "tau_numeric", "tau_low", "region"};
  double worst = 0.0;
  int infeasible = 0;
  for (double d : ax.deltas) {
    for (double e : ax.eps) {
      const auto s = impl::stats_at(d, e, ax.scalar);
      const rates::TauResult t = s ? rates::tau_closed_form(*s) : rates::TauResult{};
      if (ax.scalar) impl::throw_if_infeasible(t, d, e);
      if (!t.feasible()) {
        ++infeasible;
        o.table.add_row({d, e, rates::kNaN, rates::kNaN, rates::kNaN, std::string("infeasible")});
        continue;
      }
      const double numeric = impl::nan_if_empty(rates::tau_numeric(*s, resolution));
      const double low = impl::nan_if_empty(rates::tau_low(*s));
      worst = std::max(worst, std::abs(numeric - t.tau));
      o.table.add_row({d, e, t.tau, numeric, low, rates::to_string(t.region)});
    }
  }
  o.summary["rows"] = o.table.rows.size();
  o.summary["infeasible_rows"] = infeasible;
  o.summary["max_closed_vs_numeric"] = worst;
  return o;
}

inline CommandOutput cmd_keyrate(const RunConfig& c) {
  const impl::Axes ax = impl::observed_axes(c);
  detail::require(c.f >= 1.0, "--f must be >= 1");
  CommandOutput o;
  o.table.columns = {"delta",  "eps",          "f",        "region",
                     "r_key",  "r_upper",      "r_conjectured", "conjectured_marker"};
  int violations = 0;
  for (double d : ax.deltas) {
    for (double e : ax.eps) {
      const auto s = impl::stats_at(d, e, ax.scalar);
      rates::KeyRateResult r;
      std::optional<double> upper, conj;
      if (s) {
        const double qber = s->qber();
        if (qber <= 0.5) {
          r = rates::key_rate(*s, c.f);
          upper = rates::key_rate_upper(*s, c.f);
        }
        if (e + 0.5 * d <= 0.5) conj = rates::conjectured_random_assignment_rate(*s);
      }
      if (ax.scalar && !r.feasible) {
        throw Infeasible("(delta, eps) = (" + format_number(d) + ", " + format_number(e) +
                         ") is outside the region where the key rate is defined");
      }
      if (r.feasible && upper && *upper < r.r_key - 1e-9) ++violations;
      o.table.add_row({d, e, c.f, rates::to_string(r.region), r.r_key,
                       r.feasible ? impl::nan_if_empty(upper) : rates::kNaN,
                       impl::nan_if_empty(conj), std::string("CONJECTURED")});
    }
  }
  o.summary["rows"] = o.table.rows.size();
  o.summary["upper_below_proved"] = violations;
  if (violations > 0) o.exit_code = kNumericalFailure;
  return o;
}

inline CommandOutput cmd_tradeoff(const RunConfig& c) {
  const povm::PhotonPair pair{c.na, c.nb};
  povm::validate(pair);
  detail::require(c.states >= 0, "--states must be >= 0");
  CommandOutput o;
  o.summary["pair"] = povm::to_string(pair);
  const povm::ParityCase pc = povm::parity_case(pair);

  if (pc == povm::ParityCase::SinglePhoton || pc == povm::ParityCase::OddOdd) {
    const double min_dbl =
        pc == povm::ParityCase::SinglePhoton ? 0.0 : povm::min_double_click(pair);
    const int l = (c.na - 1) / 2 + (c.nb - 1) / 2;
    const double closed = 0.5 * (1.0 - std::ldexp(1.0, -l));
    o.table.columns = {"n_a", "n_b", "min_delta_m", "closed_form", "deviation"};
    o.table.add_row({std::uint64_t(c.na), std::uint64_t(c.nb), min_dbl, closed,
                     std::abs(min_dbl - closed)});
    o.summary["min_delta_m"] = min_dbl;
    return o;
  }

  povm::TraceOptions opt;
  opt.num_points = c.resolution.value_or(200);
  detail::require(opt.num_points >= 2, "resolution must be >= 2");
  const auto samples = povm::trace_boundary(pair, opt);
  o.table.columns = {"slope", "delta_m", "eps_m", "g", "deviation", "facet"};
  double max_dev = 0.0, min_delta = 1.0;
  int below = 0;
  for (const auto& s : samples) {
    const double d = s.point.delta_m, e = s.point.eps_m;
    min_delta = std::min(min_delta, d);
    const bool in_range = d <= 1.0 / 3.0 + 1e-12;
    const double gv = in_range ? impl::g_clamped(d) : 0.0;
    if (in_range) max_dev = std::max(max_dev, std::abs(e - gv));
    if (e < gv - 1e-8) ++below;
    o.table.add_row({s.slope, d, e, in_range ? gv : rates::kNaN,
                     in_range ? std::abs(e - gv) : rates::kNaN,
                     std::string(s.facet ? "facet" : "vertex")});
  }
  int outside = 0;
  for (const auto& p : povm::random_state_points(pair, c.states, c.seed)) {
    if (!povm::region_membership(p, 1e-8)) ++outside;
  }
  o.summary["points"] = samples.size();
  o.summary["min_delta_m"] = std::max(0.0, min_delta);
  o.summary["max_abs_eps_minus_g"] = max_dev;
  o.summary["points_below_g"] = below;
  o.summary["random_states"] = c.states;
  o.summary["random_states_outside_region"] = outside;
  if (below > 0 || outside > 0) o.exit_code = kNumericalFailure;
  return o;
}

inline CommandOutput cmd_attack(const RunConfig& c) {
  CommandOutput o;
  o.table.columns = {"alpha", "beta",      "delta_m",      "eps_m",
                     "boundary", "deviation", "eve_accuracy", "branch"};
  auto add = [&](double alpha, double beta, const attack::AttackOutcome& r, bool lower) {
    const double b = impl::attack_curve(r.delta_m, lower);
    o.table.add_row({alpha, beta, r.delta_m, r.eps_m, b, std::abs(r.eps_m - b),
                     r.eve_bit_accuracy, std::string(lower ? "lower" : "upper")});
  };
  if (c.sweep > 0) {
    detail::require(!c.alpha && !c.beta, "--sweep excludes --alpha/--beta");
    std::vector<double> covered;
    double max_dev = 0.0, min_acc = 1.0;
    for (const auto& p : attack::sweep(c.sweep)) {
      add(p.alpha, p.beta, p.outcome, p.lower_branch);
      min_acc = std::min(min_acc, p.outcome.eve_bit_accuracy);
      const double d = p.outcome.delta_m;
      if (p.lower_branch && d <= 1.0 / 3.0 + 1e-12) {
        covered.push_back(std::max(0.0, d));
        max_dev = std::max(max_dev, std::abs(p.outcome.eps_m - impl::g_clamped(d)));
      }
    }
    std::sort(covered.begin(), covered.end());
    double gap = covered.empty() ? 1.0 / 3.0 : covered.front();
    for (std::size_t i = 1; i < covered.size(); ++i) gap = std::max(gap, covered[i] - covered[i - 1]);
    if (!covered.empty()) gap = std::max(gap, 1.0 / 3.0 - covered.back());
    o.summary["points"] = c.sweep;
    o.summary["lower_branch_points_in_range"] = covered.size();
    o.summary["coverage_min_delta_m"] = covered.empty() ? rates::kNaN : covered.front();
    o.summary["coverage_max_delta_m"] = covered.empty() ? rates::kNaN : covered.back();
    o.summary["coverage_max_gap"] = gap;
    o.summary["max_abs_eps_minus_g"] = max_dev;
    o.summary["min_eve_accuracy"] = min_acc;
    return o;
  }
  const double alpha = c.alpha.value_or(1.0), beta = c.beta.value_or(0.0);
  const auto r = attack::run_attack(attack::boundary_state(alpha, beta));
  add(alpha, beta, r, r.eps_m <= 0.5 * (1.0 - r.delta_m) + 1e-12);
  o.summary["eve_accuracy"] = r.eve_bit_accuracy;
  return o;
}

// Source specs: ideal | werner:V | attack:ALPHA,BETA,XI | custom:PATH.json
inline sim::SourceModel parse_source(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::logic_error&) {
    }
    throw InvalidArgument("bad number '" + s + "' in source spec '" + spec + "'");
  };
  if (kind == "ideal" && colon == std::string::npos) return sim::SourceModel::ideal_pair();
  if (kind == "werner" && !arg.empty()) return sim::SourceModel::werner(number(arg));
  if (kind == "attack") {
    std::vector<double> v;
    std::stringstream ss(arg);
    for (std::string item; std::getline(ss, item, ',');) v.push_back(number(item));
    detail::require(v.size() == 3, "attack source needs attack:ALPHA,BETA,XI");
    return sim::SourceModel::eve_attack(attack::boundary_state(v[0], v[1]), v[2]);
  }
  if (kind == "custom" && !arg.empty()) {
    std::ifstream in(arg);
    detail::require(in.good(), "cannot open custom source file " + arg);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
      std::vector<sim::SourceComponent> comps;
      for (const auto& jc : j.at("components")) {
        sim::SourceComponent sc;
        sc.weight = jc.at("weight").get<double>();
        sc.pair = {jc.at("n_a").get<int>(), jc.at("n_b").get<int>()};
        povm::validate(sc.pair);
        const int dim = sc.pair.dim();
        if (jc.contains("state")) {
          const auto amps = jc.at("state").get<std::vector<double>>();
          detail::require(static_cast<int>(amps.size()) == dim, "state length does not match pair");
          Vector psi = Eigen::Map<const Vector>(amps.data(), dim);
          detail::require(psi.norm() > 0.0, "state must be nonzero");
          sc.density = outer(psi.normalized());
        } else {
          const auto rows = jc.at("density").get<std::vector<std::vector<double>>>();
          detail::require(static_cast<int>(rows.size()) == dim, "density size does not match pair");
          sc.density = Matrix(dim, dim);
          for (int i = 0; i < dim; ++i) {
            detail::require(static_cast<int>(rows[i].size()) == dim, "density must be square");
            for (int k = 0; k < dim; ++k) sc.density(i, k) = rows[i][k];
          }
        }
        comps.push_back(std::move(sc));
      }
      return sim::SourceModel::custom(std::move(comps), j.value("vacuum_weight", 0.0));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("malformed custom source file: ") + e.what());
    }
  }
  throw InvalidArgument("unknown source spec '" + spec +
                        "' (use ideal, werner:V, attack:ALPHA,BETA,XI or custom:PATH)");
}

inline CommandOutput cmd_simulate(const RunConfig& c) {
  detail::require(c.events >= 1, "--events must be >= 1");
  const sim::SimulationReport r =
      sim::end_to_end(parse_source(c.source), c.events, c.f, c.seed, c.threads);
  CommandOutput o;
  o.table.columns = {"source",        "seed",          "events",       "sifted_same_basis",
                     "n_dbl",         "n_err",         "delta_hat",    "eps_hat",
                     "se_delta",      "se_eps",        "delta_exact",  "eps_exact",
                     "r_key_sampled", "r_key_exact",   "rate_difference", "rate_tolerance",
                     "r_conjectured_sampled", "conjectured_marker", "note"};
  o.table.add_row({r.source, r.seed, r.tally.events, r.tally.n, r.tally.n_dbl, r.tally.n_err,
                   r.delta_hat, r.eps_hat, r.se_delta,
                   r.se_eps, r.analytic.delta, r.analytic.eps, r.sampled_rate.r_key,
                   r.analytic_rate.r_key, r.rate_difference, r.rate_tolerance,
                   impl::nan_if_empty(r.conjectured_sampled), std::string("CONJECTURED"), r.note});
  o.summary["seed"] = r.seed;
  o.summary["delta_hat"] = r.delta_hat;
  o.summary["eps_hat"] = r.eps_hat;
  o.summary["r_key_sampled"] = r.sampled_rate.r_key;
  return o;
}

inline CommandOutput cmd_selftest(const RunConfig&) {
  CommandOutput o;
  o.table.columns = {"check", "status", "detail"};
  int failed = 0;
  for (const auto& r : selftest::run_all()) {
    if (!r.passed) ++failed;
    o.table.add_row({r.name, std::string(r.passed ? "PASS" : "FAIL"), r.detail});
  }
  o.summary["checks"] = o.table.rows.size();
  o.summary["failed"] = failed;
  if (failed > 0) o.exit_code = kNumericalFailure;
  return o;
}

namespace impl {

inline CommandOutput dispatch(const RunConfig& c) {
  if (c.command == "tau") return cmd_tau(c);
  if (c.command == "keyrate") return cmd_keyrate(c);
  if (c.command == "tradeoff") return cmd_tradeoff(c);
  if (c.command == "attack") return cmd_attack(c);
  if (c.command == "simulate") return cmd_simulate(c);
  if (c.command == "selftest") return cmd_selftest(c);
  throw InvalidArgument("unknown command '" + c.command + "'");
}

// Effective value of every flag the command accepts, for the JSON meta block.
inline nlohmann::ordered_json flag_set(const RunConfig& c) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  const auto& allowed = command_flags().at(c.command);
  auto opt = [](const auto& v) -> nlohmann::ordered_json {
    if (v) return *v;
    return nullptr;
  };
  const std::map<std::string, nlohmann::ordered_json> all = {
      {"delta", opt(c.delta)},         {"eps", opt(c.eps)},
      {"delta-grid", opt(c.delta_grid)}, {"eps-grid", opt(c.eps_grid)},
      {"f", c.f},                      {"na", c.na},
      {"nb", c.nb},                    {"resolution", opt(c.resolution)},
      {"states", c.states},            {"alpha", opt(c.alpha)},
      {"beta", opt(c.beta)},           {"sweep", c.sweep},
      {"source", c.source},            {"events", c.events},
      {"seed", c.seed},                {"threads", c.threads}};
  for (const auto& [name, value] : all) {
    if (allowed.count(name)) j[name] = value;
  }
  j["format"] = c.format;
  j["out"] = c.out;
  j["config"] = c.config;
  return j;
}

// Flat `key = value` file; '#' starts a comment. Keys are long flag names.
inline std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  detail::require(in.good(), "cannot open config file " + path);
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    detail::require(eq != std::string::npos,
                    path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    detail::require(!key.empty() && key != "config",
                    path + ":" + std::to_string(lineno) + ": invalid key '" + key + "'");
    out.push_back("--" + key);
    out.push_back(value);
  }
  return out;
}

inline std::string find_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  return path;
}

inline std::string resolve_output_path(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("BBM92_OUTPUT_DIR"); dir && *dir) {
      p = std::filesystem::path(dir) / p;
    }
  }
  return p.string();
}

inline std::string summary_text(const nlohmann::ordered_json& summary) {
  std::string s;
  for (const auto& [key, value] : summary.items()) {
    std::string v;
    if (value.is_number()) {
      v = format_number(value.get<double>());
    } else if (value.is_string()) {
      v = value.get<std::string>();
    } else {
      v = value.dump();
    }
    s += "# " + key + ": " + v + "\n";
  }
  return s;
}

}  // namespace impl

// Parses `args` (without the program name), runs the command and writes the
// table to `out` (or to --out) and diagnostics to `err`. Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"BBM92 security-analysis toolkit", "bbm92"};
  app.set_version_flag("--version", std::string(BBM92_VERSION));
  app.add_option("command", c.command, "tau | keyrate | tradeoff | attack | simulate | selftest")
      ->required();
  std::map<std::string, CLI::Option*> opts;
  auto add = [&](const std::string& name, auto& target, const std::string& help) {
    opts[name] = app.add_option("--" + name, target, help)
                     ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };
  add("delta", c.delta, "observed double-click fraction");
  add("eps", c.eps, "observed bit-error fraction");
  add("delta-grid", c.delta_grid, "delta grid start:stop:count");
  add("eps-grid", c.eps_grid, "eps grid start:stop:count");
  add("f", c.f, "error-correction inefficiency (>= 1)");
  add("na", c.na, "Alice photon number");
  add("nb", c.nb, "Bob photon number");
  add("resolution", c.resolution, "tau: hull search resolution; tradeoff: slope count");
  add("states", c.states, "random states checked against the region");
  add("alpha", c.alpha, "probe amplitude on |0>");
  add("beta", c.beta, "probe amplitude on |1>");
  add("sweep", c.sweep, "number of (alpha, beta) sweep points");
  add("source", c.source, "ideal | werner:V | attack:ALPHA,BETA,XI | custom:PATH.json");
  add("events", c.events, "number of simulated events");
  add("seed", c.seed, "random seed");
  add("threads", c.threads, "worker threads (0 = hardware concurrency)");
  add("out", c.out, "output file (default stdout)");
  add("format", c.format, "csv | json");
  opts["format"]->check(CLI::IsMember({"csv", "json"}));
  add("config", c.config, "flat key = value file of flag defaults");

  try {
    std::vector<std::string> tokens;
    if (const std::string path = impl::find_config(args); !path.empty()) {
      tokens = impl::config_tokens(path);
    }
    tokens.insert(tokens.end(), args.begin(), args.end());
    std::reverse(tokens.begin(), tokens.end());
    app.parse(tokens);

    const auto known = command_flags().find(c.command);
    detail::require(known != command_flags().end(), "unknown command '" + c.command + "'");
    for (const auto& [name, opt] : opts) {
      if (opt->count() == 0 || name == "out" || name == "format" || name == "config") continue;
      detail::require(known->second.count(name) > 0,
                      "--" + name + " does not apply to '" + c.command + "'");
    }

    CommandOutput result = impl::dispatch(c);
    std::string body;
    if (c.format == "json") {
      nlohmann::ordered_json meta;
      meta["version"] = BBM92_VERSION;
      meta["command"] = c.command;
      meta["flags"] = impl::flag_set(c);
      meta["summary"] = result.summary;
      body = bbm92::to_json(result.table, meta).dump(2) + "\n";
    } else {
      body = to_csv(result.table);
      err << impl::summary_text(result.summary);
    }
    if (c.out.empty()) {
      out << body;
    } else {
      const std::string path = impl::resolve_output_path(c.out);
      std::ofstream file(path, std::ios::binary);
      detail::require(file.good(), "cannot write " + path);
      file << body;
    }
    return result.exit_code;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? std::string(BBM92_VERSION) + "\n"
                                                           : app.help());
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kInvalidArgument;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidArgument;
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace bbm92::cli
