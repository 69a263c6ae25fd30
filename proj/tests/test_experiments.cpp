#include <gtest/gtest.h>

#include <cmath>

#include "aoi_lab/experiments.hpp"
#include "aoi_lab/report_io.hpp"

using namespace aoi;

TEST(DeltaGrid, LogSpacedWithExactEnds) {
  const auto g = default_delta_grid(0.65);
  ASSERT_EQ(g.size(), 200u);
  EXPECT_EQ(g.front(), failure_power(0.65, 6.0));
  EXPECT_EQ(g.back(), 1.0 - 0.65);
  for (std::size_t i = 1; i < g.size(); ++i) {
    EXPECT_GT(g[i], g[i - 1]);
    EXPECT_NEAR(std::log(g[i] / g[i - 1]), std::log(g[1] / g[0]), 1e-9);
  }
}

TEST(TradeoffCurve, Staircase) {
  const double beta = 87, pi = 0.65;
  const auto pts = tradeoff_curve(beta, pi, default_delta_grid(pi, 400));
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto& a = pts[i - 1];
    const auto& b = pts[i];
    EXPECT_LE(b.k, a.k);
    if (a.k == b.k) {
      EXPECT_DOUBLE_EQ(a.aoi_det, b.aoi_det);
    } else {
      // A jump of k means a threshold (1-pi)^j lies in (a.delta, b.delta].
      const double t = failure_power(pi, b.k);
      EXPECT_GT(t * (1 + 1e-12), a.delta);
      EXPECT_LE(t, b.delta * (1 + 1e-12));
      EXPECT_GT(a.aoi_det, b.aoi_det);
    }
    // AoI of the randomized scheme decreases smoothly as delta grows.
    EXPECT_LE(b.aoi_rand, a.aoi_rand * (1 + 1e-12));
    EXPECT_LT(a.aoi_rand - b.aoi_rand, 0.05 * a.aoi_rand);
    EXPECT_LE(b.aoi_rand, b.aoi_det * (1 + 1e-12));
    EXPECT_LE(b.aoi_det, b.aoi_zero_error);
  }
}

TEST(TradeoffCurve, SinglePointAtSingleShotFailure) {
  const auto pts = tradeoff_curve(87, 0.65, {0.35});
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].k, 1);
  EXPECT_DOUBLE_EQ(pts[0].aoi_det, pts[0].aoi_rand);
  EXPECT_DOUBLE_EQ(pts[0].reliability, 0.65);
}

TEST(TradeoffCurve, RejectsBadGrids) {
  EXPECT_THROW(tradeoff_curve(87, 0.65, {}), InvalidParameter);
  EXPECT_THROW(tradeoff_curve(87, 0.65, {0.2, 0.1}), InvalidParameter);
  EXPECT_THROW(tradeoff_curve(87, 0.65, {0.1, 0.5}), InvalidParameter);
}

TEST(CapacitySweep, DistancePowerConfigurations) {
  std::vector<double> grid;
  for (int i = 0; i < 16; ++i) grid.push_back(0.5e-3 + 0.1e-3 * i);
  const std::pair<double, double> configs[] = {{20, 1}, {15, 1}, {20, 3}, {20, 5}, {20, 10}};
  for (auto [d, P] : configs) {
    PhysicalParams p;
    p.distance_m = d;
    p.tx_power_w = P;
    const auto rows = capacity_sweep(p, grid, SchemeKind::Randomized, 0.01);
    ASSERT_EQ(rows.size(), grid.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_EQ(rows[i].battery_j, grid[i]);
      if (i) EXPECT_GT(rows[i].beta, rows[i - 1].beta);
      if (i) EXPECT_GT(rows[i].pi, rows[i - 1].pi);
      EXPECT_FALSE(rows[i].sim.has_value());
      PhysicalParams q = p;
      q.battery_capacity_j = grid[i];
      const ChannelParams c = derive_channel(q);
      EXPECT_DOUBLE_EQ(rows[i].analytic_aoi, aoi_rand(c.beta, c.pi, 0.01).avg_aoi);
    }
  }
}

TEST(CapacitySweep, SingleShotRow) {
  PhysicalParams p;
  const auto rows = capacity_sweep(p, {1e-3}, SchemeKind::Deterministic, 1.0);
  const ChannelParams c = derive_channel(p);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].analytic_aoi, aoi_single_shot(c.beta, c.pi).avg_aoi);
}

TEST(CapacitySweep, StricterTargetsNeverLowerAoi) {
  PhysicalParams p;
  std::vector<double> grid{0.5e-3, 0.8e-3, 1e-3, 1.5e-3, 2e-3};
  std::vector<std::vector<SweepRow>> curves;
  for (double delta : {1.0, 0.1, 0.01, 0.0})
    curves.push_back(capacity_sweep(p, grid, SchemeKind::Randomized, delta));
  EXPECT_EQ(curves.back().front().scheme, SchemeKind::ZeroError);
  for (std::size_t c = 1; c < curves.size(); ++c)
    for (std::size_t i = 0; i < grid.size(); ++i)
      EXPECT_GE(curves[c][i].analytic_aoi, curves[c - 1][i].analytic_aoi * (1 - 1e-12));
}

TEST(CapacitySweep, SimulationIsReproducible) {
  PhysicalParams p;
  SimConfig cfg;
  cfg.stop = {StopKind::MaxSuccesses, 2000};
  const auto a = capacity_sweep(p, {0.8e-3, 1e-3}, SchemeKind::Randomized, 0.1, cfg);
  const auto b = capacity_sweep(p, {0.8e-3, 1e-3}, SchemeKind::Randomized, 0.1, cfg);
  EXPECT_EQ(capacity_sweep_csv(a), capacity_sweep_csv(b));
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  ASSERT_TRUE(a[0].sim.has_value());
  EXPECT_NE(a[0].sim->seed, a[1].sim->seed);
}

TEST(AoiTable, TheoryColumns) {
  const Table1Report t = reproduce_table1(std::nullopt);
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_NEAR(t.rows[0].det.avg_aoi, 1425.6, 0.1);
  EXPECT_NEAR(t.rows[0].rand.avg_aoi, 1361.2, 0.1);
  EXPECT_NEAR(t.rows[1].det.avg_aoi, 1799.1, 0.1);
  EXPECT_NEAR(t.rows[1].rand.avg_aoi, 1641.3, 0.1);
  EXPECT_NEAR(t.rows[2].det.avg_aoi, 1425.6, 0.1);
  EXPECT_NEAR(t.rows[2].rand.avg_aoi, 1204.7, 0.1);
  EXPECT_NEAR(t.rows[3].rand.avg_aoi, 1502.0, 0.1);
  for (const auto& r : t.rows) {
    EXPECT_TRUE(r.rand_matches_golden);
    EXPECT_FALSE(r.det_sim.has_value());
  }
  EXPECT_TRUE(t.rows[0].det_matches_golden);
  EXPECT_TRUE(t.rows[1].det_matches_golden);
  EXPECT_TRUE(t.rows[2].det_matches_golden);
  // delta = 0.2 exceeds 1 - pi at B = 1.5e-3, so the limit is one attempt.
  EXPECT_EQ(t.rows[3].det.k, 1);
  EXPECT_FALSE(t.rows[3].det_matches_golden);
}

TEST(AoiTable, CsvLayout) {
  const std::string csv = table1_csv(reproduce_table1(std::nullopt));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "battery_j,delta,det_theory,det_sim,rand_theory,rand_sim");
  const std::string row = csv.substr(csv.find('\n') + 1, csv.find('\n', csv.find('\n') + 1) - csv.find('\n') - 1);
  EXPECT_EQ(row, "0.001,0.1,1425.6,,1361.29,");
}

TEST(ReliabilityTable, ShortRunIsReproducibleAndNearTarget) {
  SimConfig cfg;
  cfg.stop = {StopKind::MaxStatusesSensed, 8000};
  const Table2Report a = reproduce_table2(cfg);
  const Table2Report b = reproduce_table2(cfg);
  EXPECT_EQ(table2_csv(a), table2_csv(b));
  ASSERT_EQ(a.rows.size(), 6u);
  for (const auto& r : a.rows) {
    EXPECT_EQ(r.sim.statuses_sent, 8000u);
    EXPECT_DOUBLE_EQ(r.analytic_reliability, r.target_reliability);
    EXPECT_NEAR(r.sim.reliability.mean, r.target_reliability, 0.02);
  }
}

TEST(Report, EstimateCoverage) {
  const Estimate e = Estimate::from(10.0, 1.0);
  EXPECT_TRUE(e.covers(12.9));
  EXPECT_FALSE(e.covers(13.1));
  EXPECT_NEAR(e.ci_high - e.ci_low, 2 * kZ95, 1e-12);
}
