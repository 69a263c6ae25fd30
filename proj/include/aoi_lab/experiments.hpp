#pragma once

// Parameter sweeps and the reference-table reproductions that combine the
// analytic engine with the simulator.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aoi_lab/analytic.hpp"
#include "aoi_lab/core_model.hpp"
#include "aoi_lab/parallel.hpp"
#include "aoi_lab/simulator.hpp"

namespace aoi {

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr std::uint64_t kDefaultHorizon = 50'000;

struct SimConfig {
  StopRule stop{StopKind::MaxStatusesSensed, kDefaultHorizon};
  std::size_t reps = 1;
  std::uint64_t seed = kDefaultSeed;
  SuccessMode mode = SuccessMode::Bernoulli;
  unsigned threads = 0;
};

/// Simulated estimate for one cell of a table or sweep.
struct SimCell {
  Estimate avg_aoi;
  Estimate reliability;
  std::uint64_t slots = 0;
  std::uint64_t statuses_sent = 0;
  std::uint64_t statuses_received = 0;
  std::uint64_t seed = 0;
};

inline SimCell simulate_cell(const ChannelParams& chan, const SchemePolicy& scheme,
                             const SimConfig& cfg, std::uint64_t seed) {
  // The outer loop already parallelises over cells.
  const ReplicationSummary s = replicate(chan, scheme, cfg.stop, cfg.reps, seed, cfg.mode, 1);
  SimCell c;
  c.avg_aoi = s.avg_aoi;
  c.reliability = s.reliability;
  c.seed = seed;
  for (const auto& r : s.runs) {
    c.slots += r.slots_run;
    c.statuses_sent += r.statuses_sensed;
    c.statuses_received += r.statuses_delivered;
  }
  return c;
}

// ---------------------------------------------------------------------------
// AoI-reliability trade-off

struct CurvePoint {
  double delta = 0.0;
  double reliability = 0.0;  // guarantee of the randomized scheme
  int k = 1;                 // deterministic retry limit
  double aoi_det = 0.0;
  double aoi_rand = 0.0;
  double aoi_zero_error = 0.0;
};

/// `points` log-spaced failure targets from (1-pi)^6 up to 1-pi, both ends exact.
inline std::vector<double> default_delta_grid(double pi, std::size_t points = 200,
                                              int depth = 6) {
  detail::require(detail::is_probability_open(pi), "pi must lie in (0, 1)");
  detail::require(points >= 2, "grid needs at least two points");
  detail::require(depth >= 1, "grid depth must be at least 1");
  std::vector<double> grid(points);
  const double lo = static_cast<double>(depth);
  for (std::size_t i = 0; i < points; ++i) {
    const double e = lo - (lo - 1.0) * static_cast<double>(i) / static_cast<double>(points - 1);
    grid[i] = failure_power(pi, e);
  }
  grid.front() = failure_power(pi, lo);
  grid.back() = 1.0 - pi;
  return grid;
}

inline std::vector<CurvePoint> tradeoff_curve(double beta, double pi,
                                              const std::vector<double>& delta_grid) {
  detail::require(!delta_grid.empty(), "delta grid is empty");
  detail::require(std::is_sorted(delta_grid.begin(), delta_grid.end()), "delta grid must be sorted");
  const double top = 1.0 - pi;
  const double zero_error = aoi_zero_error(beta, pi).avg_aoi;
  std::vector<CurvePoint> out;
  out.reserve(delta_grid.size());
  for (double delta : delta_grid) {
    detail::require(delta > 0.0 && delta <= top * (1.0 + 1e-12),
                    "delta " + std::to_string(delta) + " outside (0, 1-pi]");
    const double d = std::min(delta, top);
    const AnalyticReport det = aoi_det(beta, pi, d);
    const AnalyticReport rnd = aoi_rand(beta, pi, d);
    out.push_back({d, rnd.reliability, det.k, det.avg_aoi, rnd.avg_aoi, zero_error});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Battery-capacity sweep

struct SweepRow {
  double battery_j = 0.0;
  double beta = 0.0;
  double pi = 0.0;
  SchemeKind scheme = SchemeKind::Randomized;
  double delta = 0.0;
  double analytic_aoi = 0.0;
  std::optional<SimCell> sim;
};

/// delta = 0 selects the zero-error scheme for the retry-limited kinds.
inline SchemePolicy scheme_for_target(SchemeKind kind, double pi, double delta) {
  if ((kind == SchemeKind::Deterministic || kind == SchemeKind::Randomized) && delta == 0.0)
    return make_scheme(SchemeKind::ZeroError, pi);
  return make_scheme(kind, pi, delta);
}

inline std::vector<SweepRow> capacity_sweep(const PhysicalParams& base,
                                            const std::vector<double>& capacities,
                                            SchemeKind kind, double delta,
                                            const std::optional<SimConfig>& sim = std::nullopt) {
  detail::require(!capacities.empty(), "capacity grid is empty");
  detail::require(std::is_sorted(capacities.begin(), capacities.end()),
                  "capacity grid must be sorted");
  detail::require(capacities.front() > 0.0, "capacities must be positive");

  std::vector<SweepRow> rows(capacities.size());
  std::vector<ChannelParams> chans(capacities.size());
  std::vector<SchemePolicy> schemes(capacities.size());
  for (std::size_t i = 0; i < capacities.size(); ++i) {
    PhysicalParams p = base;
    p.battery_capacity_j = capacities[i];
    chans[i] = derive_channel(p);
    schemes[i] = scheme_for_target(kind, chans[i].pi, delta);
    SweepRow& r = rows[i];
    r.battery_j = capacities[i];
    r.beta = chans[i].beta;
    r.pi = chans[i].pi;
    r.scheme = schemes[i].kind;
    r.delta = delta;
    r.analytic_aoi = analyze(r.beta, r.pi, schemes[i]).avg_aoi;
  }
  if (sim) {
    parallel_for_index(rows.size(), sim->threads, [&](std::size_t i) {
      rows[i].sim = simulate_cell(chans[i], schemes[i], *sim, derive_seed(sim->seed, i));
    });
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reference tables (d = 20 m, P = 1 W, remaining parameters at their defaults)

/// Relative tolerance for agreement with the published theory values.
inline constexpr double kGoldenRelTol = 1e-3;

struct Table1Golden {
  double battery_j;
  double delta;
  double det_theory;
  double det_sim;
  double rand_theory;
  double rand_sim;
};

inline constexpr std::array<Table1Golden, 4> kTable1Golden{{
    {1.0e-3, 0.1, 1425.6, 1437.7, 1361.2, 1364.5},
    {1.5e-3, 0.1, 1799.1, 1797.2, 1641.3, 1641.7},
    {1.0e-3, 0.2, 1425.6, 1421.6, 1204.7, 1204.0},
    {1.5e-3, 0.2, 1799.1, 1804.1, 1502.0, 1502.6},
}};

struct Table2Golden {
  double battery_j;
  double target_reliability;
  std::uint64_t statuses_sent;
  std::uint64_t statuses_received;
  double reliability;
};

inline constexpr std::array<Table2Golden, 6> kTable2Golden{{
    {0.8e-3, 0.90, 69181, 62220, 0.8994},
    {0.8e-3, 0.99, 62933, 62314, 0.9902},
    {1.0e-3, 0.90, 58964, 53082, 0.9002},
    {1.0e-3, 0.99, 53638, 53089, 0.9898},
    {1.5e-3, 0.90, 42844, 38514, 0.8989},
    {1.5e-3, 0.99, 39014, 38649, 0.9906},
}};

inline PhysicalParams reference_physical(double battery_j) {
  PhysicalParams p;
  p.distance_m = 20.0;
  p.tx_power_w = 1.0;
  p.battery_capacity_j = battery_j;
  return p;
}

inline bool within_rel(double value, double ref, double rel_tol) {
  return std::abs(value - ref) <= rel_tol * std::abs(ref);
}

struct Table1Row {
  double battery_j = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  double pi = 0.0;
  AnalyticReport det;
  AnalyticReport rand;
  std::optional<SimCell> det_sim;
  std::optional<SimCell> rand_sim;
  Table1Golden golden{};
  bool det_matches_golden = false;
  bool rand_matches_golden = false;
  /// Analytic value inside the 3-standard-error band of the simulation.
  bool det_sim_consistent = true;
  bool rand_sim_consistent = true;
};

struct Table1Report {
  std::vector<Table1Row> rows;
  [[nodiscard]] bool golden_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const Table1Row& r) {
      return r.det_matches_golden && r.rand_matches_golden;
    });
  }
  [[nodiscard]] bool sim_consistent() const {
    return std::all_of(rows.begin(), rows.end(), [](const Table1Row& r) {
      return r.det_sim_consistent && r.rand_sim_consistent;
    });
  }
};

/// sim = nullopt skips the simulation columns.
inline Table1Report reproduce_table1(const std::optional<SimConfig>& sim) {
  Table1Report rep;
  rep.rows.resize(kTable1Golden.size());
  std::vector<ChannelParams> chans(rep.rows.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const Table1Golden& g = kTable1Golden[i];
    Table1Row& r = rep.rows[i];
    chans[i] = derive_channel(reference_physical(g.battery_j));
    r.battery_j = g.battery_j;
    r.delta = g.delta;
    r.beta = chans[i].beta;
    r.pi = chans[i].pi;
    r.det = aoi_det(r.beta, r.pi, g.delta);
    r.rand = aoi_rand(r.beta, r.pi, g.delta);
    r.golden = g;
    r.det_matches_golden = within_rel(r.det.avg_aoi, g.det_theory, kGoldenRelTol);
    r.rand_matches_golden = within_rel(r.rand.avg_aoi, g.rand_theory, kGoldenRelTol);
  }
  if (sim) {
    // Cell 2i is the deterministic run of row i, cell 2i+1 the randomized one.
    std::vector<SimCell> cells(2 * rep.rows.size());
    parallel_for_index(cells.size(), sim->threads, [&](std::size_t c) {
      const std::size_t i = c / 2;
      const SchemeKind kind = c % 2 == 0 ? SchemeKind::Deterministic : SchemeKind::Randomized;
      const SchemePolicy scheme = make_scheme(kind, chans[i].pi, rep.rows[i].delta);
      cells[c] = simulate_cell(chans[i], scheme, *sim, derive_seed(sim->seed, 100 + c));
    });
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      Table1Row& r = rep.rows[i];
      r.det_sim = cells[2 * i];
      r.rand_sim = cells[2 * i + 1];
      r.det_sim_consistent = r.det_sim->avg_aoi.covers(r.det.avg_aoi);
      r.rand_sim_consistent = r.rand_sim->avg_aoi.covers(r.rand.avg_aoi);
    }
  }
  return rep;
}

struct Table2Row {
  double battery_j = 0.0;
  double target_reliability = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  double pi = 0.0;
  double analytic_reliability = 0.0;
  SimCell sim;
  Table2Golden golden{};
  bool sim_consistent = true;
};

struct Table2Report {
  std::vector<Table2Row> rows;
  [[nodiscard]] bool sim_consistent() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const Table2Row& r) { return r.sim_consistent; });
  }
};

/// Randomized scheme at each (capacity, target) cell.
inline Table2Report reproduce_table2(const SimConfig& sim) {
  Table2Report rep;
  rep.rows.resize(kTable2Golden.size());
  std::vector<ChannelParams> chans(rep.rows.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const Table2Golden& g = kTable2Golden[i];
    Table2Row& r = rep.rows[i];
    chans[i] = derive_channel(reference_physical(g.battery_j));
    r.battery_j = g.battery_j;
    r.target_reliability = g.target_reliability;
    r.delta = 1.0 - g.target_reliability;
    r.beta = chans[i].beta;
    r.pi = chans[i].pi;
    r.analytic_reliability = aoi_rand(r.beta, r.pi, r.delta).reliability;
    r.golden = g;
  }
  parallel_for_index(rep.rows.size(), sim.threads, [&](std::size_t i) {
    Table2Row& r = rep.rows[i];
    const SchemePolicy scheme = make_scheme(SchemeKind::Randomized, r.pi, r.delta);
    r.sim = simulate_cell(chans[i], scheme, sim, derive_seed(sim.seed, 200 + i));
  });
  for (auto& r : rep.rows) r.sim_consistent = r.sim.reliability.covers(r.analytic_reliability);
  return rep;
}

}  // namespace aoi
