#pragma once

// CSV and JSON renderings of experiment outputs. CSV numbers carry six
// significant digits; JSON keeps full double precision.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoi_lab/experiments.hpp"

namespace aoi {

#ifndef AOI_LAB_VERSION
#define AOI_LAB_VERSION "1.0.0"
#endif

inline constexpr const char* kToolVersion = AOI_LAB_VERSION;

using json = nlohmann::ordered_json;

inline std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string fmt6(const std::optional<double>& v) { return v ? fmt6(*v) : std::string(); }

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  [[nodiscard]] std::string str() const { return out_.str(); }

 private:
  std::size_t columns_;
  std::ostringstream out_;
};

inline std::string tradeoff_csv(const std::vector<CurvePoint>& pts) {
  CsvWriter w({"delta", "reliability", "k", "aoi_det", "aoi_rand", "aoi_zero_error"});
  for (const auto& p : pts)
    w.row({fmt6(p.delta), fmt6(p.reliability), std::to_string(p.k), fmt6(p.aoi_det),
           fmt6(p.aoi_rand), fmt6(p.aoi_zero_error)});
  return w.str();
}

inline std::string capacity_sweep_csv(const std::vector<SweepRow>& rows) {
  CsvWriter w({"battery_j", "beta", "pi", "scheme", "delta", "aoi_analytic", "aoi_sim_mean",
               "aoi_sim_ci_half"});
  for (const auto& r : rows) {
    std::optional<double> mean, half;
    if (r.sim) {
      mean = r.sim->avg_aoi.mean;
      half = r.sim->avg_aoi.ci_half_width();
    }
    w.row({fmt6(r.battery_j), fmt6(r.beta), fmt6(r.pi), std::string(to_string(r.scheme)),
           fmt6(r.delta), fmt6(r.analytic_aoi), fmt6(mean), fmt6(half)});
  }
  return w.str();
}

inline std::string table1_csv(const Table1Report& t) {
  CsvWriter w({"battery_j", "delta", "det_theory", "det_sim", "rand_theory", "rand_sim"});
  for (const auto& r : t.rows) {
    std::optional<double> ds, rs;
    if (r.det_sim) ds = r.det_sim->avg_aoi.mean;
    if (r.rand_sim) rs = r.rand_sim->avg_aoi.mean;
    w.row({fmt6(r.battery_j), fmt6(r.delta), fmt6(r.det.avg_aoi), fmt6(ds), fmt6(r.rand.avg_aoi),
           fmt6(rs)});
  }
  return w.str();
}

inline std::string table2_csv(const Table2Report& t) {
  CsvWriter w({"battery_j", "target_reliability", "statuses_sent", "statuses_received",
               "empirical_reliability"});
  for (const auto& r : t.rows)
    w.row({fmt6(r.battery_j), fmt6(r.target_reliability), std::to_string(r.sim.statuses_sent),
           std::to_string(r.sim.statuses_received), fmt6(r.sim.reliability.mean)});
  return w.str();
}

inline std::string cycles_csv(const ReplicationSummary& s) {
  CsvWriter w({"replication", "length", "stale_head", "attempts"});
  for (std::size_t i = 0; i < s.runs.size(); ++i)
    for (const auto& c : s.runs[i].cycles)
      w.row({std::to_string(i), std::to_string(c.length), std::to_string(c.stale_head),
             std::to_string(c.attempts)});
  return w.str();
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const Estimate& e) {
  return {{"mean", e.mean},
          {"std_error", e.std_error},
          {"ci95_low", e.ci_low},
          {"ci95_high", e.ci_high}};
}

inline json to_json(const AnalyticReport& r) {
  json j = {{"scheme", to_string(r.scheme)},
            {"k", r.k},
            {"alpha", r.alpha},
            {"charge_mean", r.charge.mean},
            {"charge_second", r.charge.second},
            {"geom_mean", r.geom.mean},
            {"geom_second", r.geom.second},
            {"intersuccess_mean", r.intersuccess.mean},
            {"intersuccess_second", r.intersuccess.second},
            {"stale_head_mean", r.stale_head_mean},
            {"triangle_mean", r.triangle_mean},
            {"rectangle_mean", r.rectangle_mean},
            {"cycle_area_mean", r.cycle_area_mean},
            {"avg_aoi", r.avg_aoi},
            {"reliability", r.reliability}};
  if (r.mixture)
    j["mixture"] = {{"p", r.mixture->p}, {"h1", r.mixture->h1}, {"h2", r.mixture->h2}};
  return j;
}

inline json to_json(const SimCell& c) {
  return {{"avg_aoi", to_json(c.avg_aoi)},
          {"reliability", to_json(c.reliability)},
          {"slots", c.slots},
          {"statuses_sent", c.statuses_sent},
          {"statuses_received", c.statuses_received},
          {"seed", c.seed}};
}

inline json to_json(const SimResult& r) {
  return {{"seed", r.seed},
          {"slots_run", r.slots_run},
          {"statuses_sensed", r.statuses_sensed},
          {"statuses_delivered", r.statuses_delivered},
          {"transmissions", r.transmissions},
          {"empirical_reliability", r.empirical_reliability},
          {"empirical_avg_aoi", r.empirical_avg_aoi},
          {"aoi_std_error", r.aoi_std_error},
          {"measured_cycles", r.cycles.size()},
          {"measured_slots", r.measured_slots},
          {"charge_count", r.charge_count},
          {"limit_high_count", r.limit_high_count},
          {"limit_low_count", r.limit_low_count},
          {"max_attempts_per_status", r.max_attempts_per_status}};
}

inline json to_json(const ReplicationSummary& s) {
  json runs = json::array();
  for (const auto& r : s.runs) runs.push_back(to_json(r));
  return {{"base_seed", s.base_seed},
          {"avg_aoi", to_json(s.avg_aoi)},
          {"reliability", to_json(s.reliability)},
          {"replications", std::move(runs)}};
}

inline json optional_cell(const std::optional<SimCell>& c) { return c ? to_json(*c) : json(); }

inline json to_json(const std::vector<CurvePoint>& pts) {
  json a = json::array();
  for (const auto& p : pts)
    a.push_back({{"delta", p.delta},
                 {"reliability", p.reliability},
                 {"k", p.k},
                 {"aoi_det", p.aoi_det},
                 {"aoi_rand", p.aoi_rand},
                 {"aoi_zero_error", p.aoi_zero_error}});
  return a;
}

inline json to_json(const std::vector<SweepRow>& rows) {
  json a = json::array();
  for (const auto& r : rows)
    a.push_back({{"battery_j", r.battery_j},
                 {"beta", r.beta},
                 {"pi", r.pi},
                 {"scheme", to_string(r.scheme)},
                 {"delta", r.delta},
                 {"aoi_analytic", r.analytic_aoi},
                 {"sim", optional_cell(r.sim)}});
  return a;
}

inline json to_json(const Table1Report& t) {
  json a = json::array();
  for (const auto& r : t.rows)
    a.push_back({{"battery_j", r.battery_j},
                 {"delta", r.delta},
                 {"beta", r.beta},
                 {"pi", r.pi},
                 {"det_theory", r.det.avg_aoi},
                 {"det_sim", optional_cell(r.det_sim)},
                 {"rand_theory", r.rand.avg_aoi},
                 {"rand_sim", optional_cell(r.rand_sim)},
                 {"det_k", r.det.k},
                 {"rand_k", r.rand.k},
                 {"rand_alpha", r.rand.alpha},
                 {"reference_det_theory", r.golden.det_theory},
                 {"reference_rand_theory", r.golden.rand_theory},
                 {"reference_det_sim", r.golden.det_sim},
                 {"reference_rand_sim", r.golden.rand_sim},
                 {"det_matches_reference", r.det_matches_golden},
                 {"rand_matches_reference", r.rand_matches_golden},
                 {"det_sim_consistent", r.det_sim_consistent},
                 {"rand_sim_consistent", r.rand_sim_consistent}});
  return a;
}

inline json to_json(const Table2Report& t) {
  json a = json::array();
  for (const auto& r : t.rows)
    a.push_back({{"battery_j", r.battery_j},
                 {"target_reliability", r.target_reliability},
                 {"delta", r.delta},
                 {"beta", r.beta},
                 {"pi", r.pi},
                 {"analytic_reliability", r.analytic_reliability},
                 {"statuses_sent", r.sim.statuses_sent},
                 {"statuses_received", r.sim.statuses_received},
                 {"empirical_reliability", to_json(r.sim.reliability)},
                 {"reference_statuses_sent", r.golden.statuses_sent},
                 {"reference_statuses_received", r.golden.statuses_received},
                 {"reference_reliability", r.golden.reliability},
                 {"sim_consistent", r.sim_consistent}});
  return a;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace aoi
