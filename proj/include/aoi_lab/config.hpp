#pragma once

// Run configuration: a flat `key = value` text format, '#' starts a comment.
// Command-line flags map onto the same keys and override file values.

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aoi_lab/core_model.hpp"
#include "aoi_lab/experiments.hpp"
#include "aoi_lab/simulator.hpp"

namespace aoi {

/// Bad configuration input; `key()` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : "'" + key + "': " + what), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

using KeyValues = std::map<std::string, std::string>;

inline const std::vector<std::string_view>& physical_keys() {
  static const std::vector<std::string_view> keys{"d", "P", "eta", "B", "noise_dbm", "r",
                                                  "pathloss_coeff", "pathloss_exp"};
  return keys;
}

inline const std::vector<std::string_view>& known_keys() {
  static const std::vector<std::string_view> keys{
      "d",     "P",       "eta",    "B",       "noise_dbm",    "r",      "pathloss_coeff",
      "pathloss_exp", "beta", "pi",  "scheme",  "delta",        "stop",   "horizon",
      "reps",  "seed",    "success_mode", "out", "format",      "grid_points", "b_grid",
      "with_sim", "threads"};
  return keys;
}

struct RunConfig {
  std::optional<PhysicalParams> physical;
  std::optional<double> beta;
  std::optional<double> pi;
  SchemeKind scheme = SchemeKind::Randomized;
  double delta = 0.1;
  std::optional<StopKind> stop;  // unset: each subcommand picks its own default
  std::uint64_t horizon = kDefaultHorizon;
  std::size_t reps = 1;
  std::uint64_t seed = kDefaultSeed;
  SuccessMode success_mode = SuccessMode::Bernoulli;
  std::optional<std::string> out_dir;
  bool write_csv = true;
  bool write_json = true;
  std::size_t grid_points = 200;
  std::vector<double> b_grid;
  bool with_sim = false;
  unsigned threads = 0;

  [[nodiscard]] bool direct_mode() const { return beta.has_value(); }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, std::string_view v) {
  // strtod accepts "1e-3" and friends; require the whole token be consumed.
  const std::string s(v);
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(x))
    throw ConfigError(key, "expected a finite number, got '" + s + "'");
  return x;
}

inline std::uint64_t parse_u64(const std::string& key, std::string_view v) {
  std::uint64_t x = 0;
  const auto* first = v.data();
  const auto* last = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (v.empty() || ec != std::errc{} || ptr != last)
    throw ConfigError(key, "expected a non-negative integer, got '" + std::string(v) + "'");
  return x;
}

inline bool parse_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key, "expected a boolean, got '" + std::string(v) + "'");
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

/// "lo:hi:n" (linear, inclusive) or a comma-separated list.
inline std::vector<double> parse_grid(const std::string& key, std::string_view v) {
  std::vector<double> out;
  if (v.find(':') != std::string_view::npos) {
    const auto parts = split(v, ':');
    if (parts.size() != 3) throw ConfigError(key, "expected lo:hi:n");
    const double lo = parse_double(key, parts[0]);
    const double hi = parse_double(key, parts[1]);
    const auto n = parse_u64(key, parts[2]);
    if (n < 1) throw ConfigError(key, "grid needs at least one point");
    if (n == 1) return {lo};
    for (std::uint64_t i = 0; i < n; ++i)
      out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.back() = hi;
  } else {
    for (auto p : split(v, ',')) out.push_back(parse_double(key, p));
  }
  return out;
}

/// Shortest text that parses back to exactly `x`.
inline std::string format_double(double x) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

inline bool is_known(std::string_view key) {
  for (auto k : known_keys())
    if (k == key) return true;
  return false;
}

}  // namespace detail

inline KeyValues parse_config_text(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  for (auto raw : detail::split(text, '\n')) {
    ++line_no;
    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
    if (!detail::is_known(key)) throw ConfigError(key, "unknown key");
    if (kv.count(key)) throw ConfigError(key, "duplicate key");
    kv[key] = value;
  }
  return kv;
}

inline KeyValues read_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

/// Later maps override earlier ones.
inline KeyValues merge(KeyValues base, const KeyValues& overrides) {
  for (const auto& [k, v] : overrides) base[k] = v;
  return base;
}

inline RunConfig build_config(const KeyValues& kv) {
  using namespace detail;
  for (const auto& [k, v] : kv)
    if (!is_known(k)) throw ConfigError(k, "unknown key");

  auto get = [&](std::string_view key) -> const std::string* {
    auto it = kv.find(std::string(key));
    return it == kv.end() ? nullptr : &it->second;
  };
  auto num = [&](std::string_view key) -> std::optional<double> {
    if (auto* v = get(key)) return parse_double(std::string(key), *v);
    return std::nullopt;
  };

  RunConfig c;
  const bool any_direct = get("beta") || get("pi");
  std::optional<std::string> first_physical;
  for (auto k : physical_keys())
    if (get(k)) {
      first_physical = std::string(k);
      break;
    }
  if (any_direct && first_physical)
    throw ConfigError(*first_physical,
                      "physical parameters cannot be mixed with direct beta/pi");
  if (any_direct) {
    if (!get("beta")) throw ConfigError("beta", "direct mode needs both beta and pi");
    if (!get("pi")) throw ConfigError("pi", "direct mode needs both beta and pi");
    c.beta = num("beta");
    c.pi = num("pi");
    try {
      direct_channel(*c.beta, *c.pi);
    } catch (const InvalidParameter& e) {
      throw ConfigError(*c.beta > 0.0 ? "pi" : "beta", e.what());
    }
    if (get("b_grid")) throw ConfigError("b_grid", "capacity grid needs physical parameters");
  } else if (first_physical || get("b_grid")) {
    if (get("b_grid")) c.b_grid = parse_grid("b_grid", *get("b_grid"));
    for (std::string_view req : {"d", "P"})
      if (!get(req)) throw ConfigError(std::string(req), "missing from the physical parameter set");
    if (!get("B") && c.b_grid.empty())
      throw ConfigError("B", "missing from the physical parameter set");
    PhysicalParams p;
    p.distance_m = *num("d");
    p.tx_power_w = *num("P");
    p.battery_capacity_j = get("B") ? *num("B") : c.b_grid.front();
    if (auto v = num("eta")) p.conversion_eff = *v;
    if (auto v = num("noise_dbm")) p.noise_dbm = *v;
    if (auto v = num("r")) p.spectral_eff_bpcu = *v;
    if (auto v = num("pathloss_coeff")) p.pathloss_coeff = *v;
    if (auto v = num("pathloss_exp")) p.pathloss_exp = *v;
    try {
      validate(p);
    } catch (const InvalidParameter& e) {
      throw ConfigError(*first_physical, e.what());
    }
    c.physical = p;
  }

  if (auto* v = get("scheme")) {
    try {
      c.scheme = parse_scheme(*v);
    } catch (const InvalidParameter& e) {
      throw ConfigError("scheme", e.what());
    }
  }
  if (auto v = num("delta")) {
    if (!(*v >= 0.0 && *v <= 1.0)) throw ConfigError("delta", "must lie in [0, 1]");
    c.delta = *v;
  }
  if (auto* v = get("stop")) {
    if (*v == "slots") c.stop = StopKind::MaxSlots;
    else if (*v == "statuses") c.stop = StopKind::MaxStatusesSensed;
    else if (*v == "successes") c.stop = StopKind::MaxSuccesses;
    else throw ConfigError("stop", "expected slots, statuses or successes");
  }
  if (auto* v = get("horizon")) {
    c.horizon = parse_u64("horizon", *v);
    if (c.horizon == 0) throw ConfigError("horizon", "must be at least 1");
  }
  if (auto* v = get("reps")) {
    c.reps = parse_u64("reps", *v);
    if (c.reps == 0) throw ConfigError("reps", "must be at least 1");
  }
  if (auto* v = get("seed")) c.seed = parse_u64("seed", *v);
  if (auto* v = get("success_mode")) {
    if (*v == "bernoulli") c.success_mode = SuccessMode::Bernoulli;
    else if (*v == "fading") c.success_mode = SuccessMode::FadingLevel;
    else throw ConfigError("success_mode", "expected bernoulli or fading");
  }
  if (auto* v = get("out")) {
    if (v->empty()) throw ConfigError("out", "empty output directory");
    c.out_dir = *v;
  }
  if (auto* v = get("format")) {
    c.write_csv = c.write_json = false;
    for (auto f : split(*v, ',')) {
      if (f == "csv") c.write_csv = true;
      else if (f == "json") c.write_json = true;
      else throw ConfigError("format", "expected csv and/or json, got '" + std::string(f) + "'");
    }
  }
  if (auto* v = get("grid_points")) {
    c.grid_points = parse_u64("grid_points", *v);
    if (c.grid_points < 2) throw ConfigError("grid_points", "must be at least 2");
  }
  if (auto* v = get("with_sim")) c.with_sim = parse_bool("with_sim", *v);
  if (auto* v = get("threads")) c.threads = static_cast<unsigned>(parse_u64("threads", *v));
  return c;
}

inline RunConfig load_config(const std::string& path) { return build_config(read_config_file(path)); }

/// Inverse of build_config: keys that reproduce `c` exactly.
inline KeyValues to_key_values(const RunConfig& c) {
  using detail::format_double;
  KeyValues kv;
  if (c.physical) {
    const PhysicalParams& p = *c.physical;
    kv["d"] = format_double(p.distance_m);
    kv["P"] = format_double(p.tx_power_w);
    kv["eta"] = format_double(p.conversion_eff);
    kv["B"] = format_double(p.battery_capacity_j);
    kv["noise_dbm"] = format_double(p.noise_dbm);
    kv["r"] = format_double(p.spectral_eff_bpcu);
    kv["pathloss_coeff"] = format_double(p.pathloss_coeff);
    kv["pathloss_exp"] = format_double(p.pathloss_exp);
  }
  if (c.beta) kv["beta"] = format_double(*c.beta);
  if (c.pi) kv["pi"] = format_double(*c.pi);
  kv["scheme"] = std::string(to_string(c.scheme));
  kv["delta"] = format_double(c.delta);
  if (c.stop) kv["stop"] = std::string(to_string(*c.stop));
  kv["horizon"] = std::to_string(c.horizon);
  kv["reps"] = std::to_string(c.reps);
  kv["seed"] = std::to_string(c.seed);
  kv["success_mode"] = std::string(to_string(c.success_mode));
  if (c.out_dir) kv["out"] = *c.out_dir;
  std::string fmt;
  if (c.write_csv) fmt = "csv";
  if (c.write_json) fmt += fmt.empty() ? "json" : ",json";
  kv["format"] = fmt;
  kv["grid_points"] = std::to_string(c.grid_points);
  if (!c.b_grid.empty()) {
    std::string g;
    for (double b : c.b_grid) g += (g.empty() ? "" : ",") + format_double(b);
    kv["b_grid"] = g;
  }
  kv["with_sim"] = c.with_sim ? "true" : "false";
  kv["threads"] = std::to_string(c.threads);
  return kv;
}

inline std::string to_config_text(const RunConfig& c) {
  std::string s;
  for (const auto& [k, v] : to_key_values(c)) s += k + " = " + v + "\n";
  return s;
}

inline ChannelParams channel_of(const RunConfig& c) {
  if (c.direct_mode()) return direct_channel(*c.beta, *c.pi);
  if (c.physical) return derive_channel(*c.physical);
  throw ConfigError("beta", "no channel given: pass --beta/--pi or --d/--P/--B");
}

inline SimConfig sim_config_of(const RunConfig& c, StopKind default_stop) {
  SimConfig s;
  s.stop = {c.stop.value_or(default_stop), c.horizon};
  s.reps = c.reps;
  s.seed = c.seed;
  s.mode = c.success_mode;
  s.threads = c.threads;
  return s;
}

}  // namespace aoi
