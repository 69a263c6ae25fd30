#pragma once

// Command-line front end. Exit status: 0 success, 1 failed check, 2 bad input.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aoi_lab/config.hpp"
#include "aoi_lab/experiments.hpp"
#include "aoi_lab/report_io.hpp"
#include "aoi_lab/validation.hpp"

namespace aoi {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitBadInput = 2;

inline json config_to_json(const RunConfig& c) {
  json j = json::object();
  for (const auto& [k, v] : to_key_values(c)) j[k] = v;
  return j;
}

inline RunConfig config_from_json(const json& j) {
  KeyValues kv;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw ConfigError(k, "expected a string value");
    kv[k] = v.get<std::string>();
  }
  return build_config(kv);
}

namespace cli_detail {

inline constexpr const char* kDefaultCapacityGrid = "0.0005:0.002:16";

struct Context {
  RunConfig cfg;
  std::filesystem::path out_dir;
  std::ostream& out;
};

inline std::string fixed(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::string percent(double p) { return fixed(100.0 * p, 2) + "%"; }

inline json metadata(const Context& ctx, std::string_view command,
                     std::optional<SimConfig> sim = std::nullopt) {
  json m = {{"tool", "aoi_lab"}, {"version", kToolVersion}, {"command", command}};
  m["seed"] = ctx.cfg.seed;
  if (sim) {
    m["stop"] = to_string(sim->stop.kind);
    m["horizon"] = sim->stop.limit;
    m["replications"] = sim->reps;
    m["success_mode"] = to_string(sim->mode);
  }
  return m;
}

inline json envelope(const Context& ctx, std::string_view command,
                     std::optional<SimConfig> sim = std::nullopt) {
  return {{"metadata", metadata(ctx, command, sim)}, {"config", config_to_json(ctx.cfg)}};
}

inline json channel_json(const ChannelParams& c) {
  return {{"lambda", c.lambda},
          {"beta", c.beta},
          {"pi", c.pi},
          {"noise_w", c.noise_w},
          {"battery_capacity_j", c.battery_capacity_j}};
}

inline SchemePolicy scheme_of(const RunConfig& c, double pi) {
  return scheme_for_target(c.scheme, pi, c.delta);
}

inline void print_report(std::ostream& o, const ChannelParams& ch, const AnalyticReport& r) {
  o << "scheme         " << to_string(r.scheme) << "\n"
    << "beta           " << fmt6(ch.beta) << "\n"
    << "pi             " << fmt6(ch.pi) << "\n";
  if (r.k > 0) o << "retry limit k  " << r.k << "\n";
  if (r.scheme == SchemeKind::Randomized) o << "alpha          " << fmt6(r.alpha) << "\n";
  o << "E[T]           " << fmt6(r.charge.mean) << "   E[T^2] " << fmt6(r.charge.second) << "\n"
    << "E[X]           " << fmt6(r.intersuccess.mean) << "   E[X^2] "
    << fmt6(r.intersuccess.second) << "\n"
    << "E[H]           " << fmt6(r.stale_head_mean) << "\n";
  if (r.mixture)
    o << "  p / h1 / h2  " << fmt6(r.mixture->p) << " / " << fmt6(r.mixture->h1) << " / "
      << fmt6(r.mixture->h2) << "\n";
  o << "avg AoI        " << fixed(r.avg_aoi, 1) << " slots (" << fmt6(r.avg_aoi) << ")\n"
    << "reliability    " << percent(r.reliability) << "\n";
}

inline int cmd_analytic(Context& ctx) {
  const ChannelParams ch = channel_of(ctx.cfg);
  const AnalyticReport r = analyze(ch.beta, ch.pi, scheme_of(ctx.cfg, ch.pi));
  print_report(ctx.out, ch, r);
  if (ctx.cfg.write_json) {
    json j = envelope(ctx, "analytic");
    j["channel"] = channel_json(ch);
    j["report"] = to_json(r);
    write_json_file(ctx.out_dir / "analytic.json", j);
  }
  return kExitOk;
}

inline int cmd_simulate(Context& ctx) {
  const ChannelParams ch = channel_of(ctx.cfg);
  const SchemePolicy scheme = scheme_of(ctx.cfg, ch.pi);
  const SimConfig sim = sim_config_of(ctx.cfg, StopKind::MaxStatusesSensed);
  const ReplicationSummary s =
      replicate(ch, scheme, sim.stop, sim.reps, sim.seed, sim.mode, sim.threads);
  const AnalyticReport an = analyze(ch.beta, ch.pi, scheme);

  std::uint64_t sent = 0, received = 0, slots = 0;
  for (const auto& r : s.runs) {
    sent += r.statuses_sensed;
    received += r.statuses_delivered;
    slots += r.slots_run;
  }
  auto& o = ctx.out;
  o << "scheme         " << to_string(scheme.kind) << "  (beta " << fmt6(ch.beta) << ", pi "
    << fmt6(ch.pi) << ")\n"
    << "replications   " << sim.reps << "  seed " << sim.seed << "\n"
    << "slots          " << slots << "\n"
    << "statuses       " << sent << " sent, " << received << " received\n"
    << "avg AoI        " << fixed(s.avg_aoi.mean, 1) << "  95% CI [" << fixed(s.avg_aoi.ci_low, 1)
    << ", " << fixed(s.avg_aoi.ci_high, 1) << "]  analytic " << fixed(an.avg_aoi, 1) << "\n"
    << "reliability    " << percent(s.reliability.mean) << "  95% CI ["
    << percent(s.reliability.ci_low) << ", " << percent(s.reliability.ci_high) << "]  analytic "
    << percent(an.reliability) << "\n";

  if (ctx.cfg.write_json) {
    json j = envelope(ctx, "simulate", sim);
    j["channel"] = channel_json(ch);
    j["analytic"] = to_json(an);
    j["simulation"] = to_json(s);
    write_json_file(ctx.out_dir / "simulate.json", j);
  }
  if (ctx.cfg.write_csv) write_text_file(ctx.out_dir / "cycles.csv", cycles_csv(s));
  return kExitOk;
}

inline int cmd_tradeoff(Context& ctx) {
  const ChannelParams ch = channel_of(ctx.cfg);
  const auto grid = default_delta_grid(ch.pi, ctx.cfg.grid_points);
  const auto pts = tradeoff_curve(ch.beta, ch.pi, grid);
  ctx.out << "trade-off curve: " << pts.size() << " points, delta in [" << fmt6(grid.front())
          << ", " << fmt6(grid.back()) << "], zero-error AoI " << fixed(pts.front().aoi_zero_error, 2)
          << "\n";
  if (ctx.cfg.write_csv) write_text_file(ctx.out_dir / "tradeoff.csv", tradeoff_csv(pts));
  if (ctx.cfg.write_json) {
    json j = envelope(ctx, "tradeoff");
    j["beta"] = ch.beta;
    j["pi"] = ch.pi;
    j["points"] = to_json(pts);
    write_json_file(ctx.out_dir / "tradeoff.json", j);
  }
  return kExitOk;
}

inline int cmd_sweep(Context& ctx) {
  if (!ctx.cfg.physical) throw ConfigError("d", "sweep needs physical parameters (--d, --P)");
  const auto& grid = ctx.cfg.b_grid;
  std::optional<SimConfig> sim;
  if (ctx.cfg.with_sim) sim = sim_config_of(ctx.cfg, StopKind::MaxStatusesSensed);
  const auto rows = capacity_sweep(*ctx.cfg.physical, grid, ctx.cfg.scheme, ctx.cfg.delta, sim);
  for (const auto& r : rows) {
    ctx.out << "B " << fmt6(r.battery_j) << "  beta " << fmt6(r.beta) << "  pi " << fmt6(r.pi)
            << "  " << to_string(r.scheme) << "  AoI " << fixed(r.analytic_aoi, 1);
    if (r.sim)
      ctx.out << "  sim " << fixed(r.sim->avg_aoi.mean, 1) << " +- "
              << fixed(r.sim->avg_aoi.ci_half_width(), 1);
    ctx.out << "\n";
  }
  if (ctx.cfg.write_csv) write_text_file(ctx.out_dir / "capacity_sweep.csv", capacity_sweep_csv(rows));
  if (ctx.cfg.write_json) {
    json j = envelope(ctx, "sweep", sim);
    j["rows"] = to_json(rows);
    write_json_file(ctx.out_dir / "capacity_sweep.json", j);
  }
  return kExitOk;
}

inline int cmd_tables(Context& ctx) {
  const SimConfig sim1 = sim_config_of(ctx.cfg, StopKind::MaxSuccesses);
  const SimConfig sim2 = sim_config_of(ctx.cfg, StopKind::MaxStatusesSensed);
  const Table1Report t1 = reproduce_table1(sim1);
  const Table2Report t2 = reproduce_table2(sim2);
  auto& o = ctx.out;

  o << "Average AoI, d = 20 m, P = 1 W\n"
    << "  B         delta  det theory  det sim        rand theory  rand sim\n";
  for (const auto& r : t1.rows) {
    char line[200];
    std::snprintf(line, sizeof line, "  %-9.3g %-6.2g %-11.1f %-14s %-12.1f %-14s", r.battery_j,
                  r.delta, r.det.avg_aoi,
                  (fixed(r.det_sim->avg_aoi.mean, 1) + " +- " +
                   fixed(r.det_sim->avg_aoi.ci_half_width(), 1)).c_str(),
                  r.rand.avg_aoi,
                  (fixed(r.rand_sim->avg_aoi.mean, 1) + " +- " +
                   fixed(r.rand_sim->avg_aoi.ci_half_width(), 1)).c_str());
    o << line;
    if (!r.det_matches_golden)
      o << "  [det theory differs from reference " << fixed(r.golden.det_theory, 1) << "]";
    if (!r.rand_matches_golden)
      o << "  [rand theory differs from reference " << fixed(r.golden.rand_theory, 1) << "]";
    if (!r.det_sim_consistent || !r.rand_sim_consistent) o << "  [simulation outside 3 SE]";
    o << "\n";
  }
  o << "Reliability, randomized scheme\n"
    << "  B         target  sent    received  empirical\n";
  for (const auto& r : t2.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-9.3g %-7s %-7llu %-9llu %s", r.battery_j,
                  percent(r.target_reliability).c_str(),
                  static_cast<unsigned long long>(r.sim.statuses_sent),
                  static_cast<unsigned long long>(r.sim.statuses_received),
                  percent(r.sim.reliability.mean).c_str());
    o << line << (r.sim_consistent ? "" : "  [outside 3 SE]") << "\n";
  }

  if (ctx.cfg.write_csv) {
    write_text_file(ctx.out_dir / "table1.csv", table1_csv(t1));
    write_text_file(ctx.out_dir / "table2.csv", table2_csv(t2));
  }
  if (ctx.cfg.write_json) {
    json j = envelope(ctx, "tables", sim1);
    j["metadata"]["table2_stop"] = to_string(sim2.stop.kind);
    j["table1"] = to_json(t1);
    j["table2"] = to_json(t2);
    write_json_file(ctx.out_dir / "tables.json", j);
  }
  const bool ok = t1.sim_consistent() && t2.sim_consistent();
  if (!ok) o << "error: an analytic value falls outside its simulation's 3-standard-error band\n";
  return ok ? kExitOk : kExitCheckFailed;
}

inline int cmd_validate(Context& ctx) {
  const auto checks = run_invariant_suite(true);
  bool ok = true;
  json arr = json::array();
  for (const auto& c : checks) {
    ok = ok && c.passed;
    ctx.out << (c.passed ? "PASS  " : "FAIL  ") << c.name;
    if (!c.detail.empty()) ctx.out << "  (" << c.detail << ")";
    ctx.out << "\n";
    arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  if (ctx.cfg.write_json) {
    json j = envelope(ctx, "validate");
    j["checks"] = std::move(arr);
    j["passed"] = ok;
    write_json_file(ctx.out_dir / "validate.json", j);
  }
  return ok ? kExitOk : kExitCheckFailed;
}

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

inline const std::vector<FlagSpec>& value_flags() {
  static const std::vector<FlagSpec> flags{
      {"--out", "out", "output directory (default: $AOI_LAB_OUT, else ./results)"},
      {"--seed", "seed", "base seed (default 42)"},
      {"--reps", "reps", "independent replications"},
      {"--horizon", "horizon", "stop-rule limit (default 50000)"},
      {"--stop", "stop", "slots | statuses | successes"},
      {"--scheme", "scheme", "single-shot | det | rand | zero-error"},
      {"--delta", "delta", "failure-probability target; 0 selects zero-error"},
      {"--beta", "beta", "direct mode: lambda*B/(eta*P)"},
      {"--pi", "pi", "direct mode: per-transmission success probability"},
      {"--d", "d", "distance in metres"},
      {"--P", "P", "transmit power in watts"},
      {"--eta", "eta", "RF-to-DC conversion efficiency"},
      {"--B", "B", "battery capacity in joules"},
      {"--noise-dbm", "noise_dbm", "receiver noise power in dBm"},
      {"--r", "r", "spectral efficiency in bits per channel use"},
      {"--pathloss-coeff", "pathloss_coeff", "lambda = coeff * d^exp"},
      {"--pathloss-exp", "pathloss_exp", "path-loss exponent"},
      {"--success-mode", "success_mode", "bernoulli | fading"},
      {"--format", "format", "csv,json (comma-separated)"},
      {"--grid-points", "grid_points", "trade-off grid size"},
      {"--b-grid", "b_grid", "capacity grid, lo:hi:n or a comma list"},
      {"--threads", "threads", "worker threads (0: all cores)"},
  };
  return flags;
}

}  // namespace cli_detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"Age-of-information and reliability of retry-limited energy-harvesting links",
               "aoi_lab"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(Context&);
  };
  const std::vector<Sub> subs{
      {"analytic", "closed-form report for one setting", cmd_analytic},
      {"simulate", "Monte Carlo replications with confidence intervals", cmd_simulate},
      {"tradeoff", "AoI-reliability curve (tradeoff.csv)", cmd_tradeoff},
      {"sweep", "battery-capacity sweep (capacity_sweep.csv)", cmd_sweep},
      {"tables", "reference tables: analytic vs simulation (table1.csv, table2.csv)", cmd_tables},
      {"validate", "run the invariant suite", cmd_validate},
  };

  std::string config_path;
  std::map<std::string, std::string> values;  // flag key -> raw value
  bool with_sim = false;
  std::vector<CLI::App*> handles;
  for (const auto& s : subs) {
    CLI::App* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("--config", config_path, "key = value configuration file");
    for (const auto& f : value_flags()) sc->add_option(f.flag, values[f.key], f.help);
    if (std::string_view(s.name) == "sweep")
      sc->add_flag("--with-sim", with_sim, "attach simulation estimates");
    handles.push_back(sc);
  }

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }

  try {
    std::size_t which = 0;
    while (which < handles.size() && !handles[which]->parsed()) ++which;
    CLI::App* sc = handles[which];

    KeyValues flags;
    for (const auto& f : value_flags())
      if (sc->count(f.flag) > 0) flags[f.key] = values[f.key];
    if (with_sim) flags["with_sim"] = "true";
    KeyValues file;
    if (!config_path.empty()) file = read_config_file(config_path);
    KeyValues merged = merge(file, flags);
    if (std::string_view(subs[which].name) == "sweep" && !merged.count("b_grid"))
      merged["b_grid"] = kDefaultCapacityGrid;
    RunConfig cfg = build_config(merged);

    std::filesystem::path out_dir = "results";
    if (cfg.out_dir) out_dir = *cfg.out_dir;
    else if (const char* env = std::getenv("AOI_LAB_OUT"); env && *env) out_dir = env;

    Context ctx{std::move(cfg), out_dir, out};
    return subs[which].run(ctx);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

inline int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace aoi
