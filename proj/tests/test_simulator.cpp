#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>

#include "aoi_lab/analytic.hpp"
#include "aoi_lab/simulator.hpp"

using namespace aoi;

namespace {

ChannelParams certain_channel(double beta) {
  ChannelParams c;
  c.beta = beta;
  c.pi = 1.0;
  c.noise_w = 0.0;
  return c;
}

double z_score(double empirical, double expected, double se) { return (empirical - expected) / se; }

}  // namespace

TEST(RunEpisode, CertainSuccessDeliversEveryStatusOnce) {
  for (SuccessMode mode : {SuccessMode::Bernoulli, SuccessMode::FadingLevel}) {
    const SimResult r = run_episode(certain_channel(3.0), make_scheme(SchemeKind::ZeroError, 0.5),
                                    {StopKind::MaxStatusesSensed, 5000}, 9, mode);
    EXPECT_EQ(r.empirical_reliability, 1.0);
    EXPECT_EQ(r.statuses_delivered, r.statuses_sensed);
    EXPECT_EQ(r.transmissions, r.statuses_sensed);
    EXPECT_EQ(r.max_attempts_per_status, 1);
    for (const auto& c : r.cycles) {
      EXPECT_EQ(c.attempts, 1u);
      EXPECT_EQ(c.stale_head, 0u);
    }
  }
}

TEST(RunEpisode, TinyBetaChargesEverySlot) {
  const SimResult r = run_episode(direct_channel(1e-9, 0.5), make_scheme(SchemeKind::ZeroError, 0.5),
                                  {StopKind::MaxSlots, 20000}, 3);
  EXPECT_EQ(r.charge_count, r.slots_run);
  EXPECT_EQ(r.charge_sum, r.charge_count);
  const EmpiricalMoments m = empirical_charge_moments(r);
  EXPECT_EQ(m.mean, 1.0);
  EXPECT_EQ(m.second, 1.0);
}

TEST(RunEpisode, DeterministicGivenSeed) {
  const ChannelParams c = direct_channel(20.0, 0.4);
  const SchemePolicy s = make_scheme(SchemeKind::Randomized, 0.4, 0.03);
  const StopRule stop{StopKind::MaxStatusesSensed, 3000};
  EXPECT_EQ(run_episode(c, s, stop, 77), run_episode(c, s, stop, 77));
  EXPECT_FALSE(run_episode(c, s, stop, 77) == run_episode(c, s, stop, 78));
  EXPECT_EQ(run_episode(c, s, stop, 77, SuccessMode::FadingLevel),
            run_episode(c, s, stop, 77, SuccessMode::FadingLevel));
}

TEST(RunEpisode, StopRulesAreHonoured) {
  const ChannelParams c = direct_channel(5.0, 0.5);
  const SchemePolicy s = make_scheme(SchemeKind::Deterministic, 0.5, 0.1);
  EXPECT_EQ(run_episode(c, s, {StopKind::MaxSlots, 12345}, 1).slots_run, 12345u);
  EXPECT_EQ(run_episode(c, s, {StopKind::MaxStatusesSensed, 777}, 1).statuses_sensed, 777u);
  EXPECT_EQ(run_episode(c, s, {StopKind::MaxSuccesses, 500}, 1).statuses_delivered, 500u);
  EXPECT_THROW(run_episode(c, s, {StopKind::MaxSlots, 0}, 1), InvalidParameter);
  EXPECT_THROW(run_episode(c, s, {StopKind::MaxSlots, 2}, 1), SimulationError);
}

TEST(RunEpisode, RenewalAccountingIsExact) {
  for (SchemeKind k : {SchemeKind::SingleShot, SchemeKind::Deterministic, SchemeKind::Randomized,
                       SchemeKind::ZeroError}) {
    const SimResult r = run_episode(direct_channel(6.0, 0.45), make_scheme(k, 0.45, 0.07),
                                    {StopKind::MaxSuccesses, 4000}, 21);
    std::uint64_t area = 0, slots = 0;
    for (const auto& c : r.cycles) {
      area += c.area();
      slots += c.length;
    }
    EXPECT_EQ(area, r.measured_aoi_area) << to_string(k);
    EXPECT_EQ(slots, r.measured_slots) << to_string(k);
  }
}

TEST(Episode, PerSlotStateInvariants) {
  const ChannelParams c = direct_channel(4.0, 0.5);
  const SchemePolicy s = make_scheme(SchemeKind::Randomized, 0.5, 0.1);
  Episode ep(c, s, 5);
  std::uint64_t prev_aoi = 0;
  bool delivered = false;
  for (int t = 0; t < 200000; ++t) {
    ep.step();
    const SimState& st = ep.state();
    ASSERT_GE(st.battery_j, 0.0);
    ASSERT_LE(st.battery_j, c.battery_capacity_j);
    ASSERT_LE(st.attempts_used, st.attempt_limit);
    ASSERT_LE(st.attempt_limit, s.retry.k);
    if (st.status_pending) ASSERT_LE(st.current_status_birth, st.slot);
    if (st.last_delivered_birth) {
      ASSERT_EQ(st.receiver_aoi, st.slot - *st.last_delivered_birth);
      // AoI grows by one per slot except at a delivery, where it drops.
      if (delivered) ASSERT_LE(st.receiver_aoi, prev_aoi + 1);
      ASSERT_GE(st.receiver_aoi, 1u);
      prev_aoi = st.receiver_aoi;
      delivered = true;
    }
  }
  const SimResult r = ep.finish();
  EXPECT_LE(r.max_attempts_per_status, s.retry.k);
}

TEST(RunEpisode, DeterministicSchemeRespectsRetryLimit) {
  const SchemePolicy s = make_scheme(SchemeKind::Deterministic, 0.3, 0.05);
  const SimResult r =
      run_episode(direct_channel(2.0, 0.3), s, {StopKind::MaxStatusesSensed, 20000}, 8);
  EXPECT_EQ(r.max_attempts_per_status, s.retry.k);
  const double expected = 1.0 - failure_power(0.3, s.retry.k);
  EXPECT_LT(std::abs(z_score(r.empirical_reliability, expected, r.reliability_std_error)), 3.0);
}

TEST(RunEpisode, RandomizedLimitProportionMatchesAlpha) {
  const double pi = 0.65;
  const SchemePolicy s = make_scheme(SchemeKind::Randomized, pi, 0.1);
  ASSERT_EQ(s.retry.k, 3);
  const SimResult r =
      run_episode(direct_channel(2.0, pi), s, {StopKind::MaxStatusesSensed, 50000}, 31);
  const double n = static_cast<double>(r.limit_high_count + r.limit_low_count);
  const double share = static_cast<double>(r.limit_high_count) / n;
  const double se = std::sqrt(s.retry.alpha * (1 - s.retry.alpha) / n);
  EXPECT_LT(std::abs(z_score(share, s.retry.alpha, se)), 3.0);
  EXPECT_LE(r.max_attempts_per_status, 3);
  EXPECT_LT(std::abs(z_score(r.empirical_reliability, 0.9, r.reliability_std_error)), 3.0);
}

TEST(RunEpisode, ModesAgreeOnReliability) {
  const ChannelParams c = direct_channel(3.0, 0.55);
  const SchemePolicy s = make_scheme(SchemeKind::Deterministic, 0.55, 0.1);
  const StopRule stop{StopKind::MaxStatusesSensed, 40000};
  const SimResult a = run_episode(c, s, stop, 101, SuccessMode::Bernoulli);
  const SimResult b = run_episode(c, s, stop, 202, SuccessMode::FadingLevel);
  const double se = std::hypot(a.reliability_std_error, b.reliability_std_error);
  EXPECT_LT(std::abs(a.empirical_reliability - b.empirical_reliability), 3 * se);
}

TEST(RunEpisode, FadingModeUsesPhysicalThreshold) {
  PhysicalParams p;
  const ChannelParams c = derive_channel(p);
  const SchemePolicy s = make_scheme(SchemeKind::SingleShot, c.pi);
  const SimResult r = run_episode(c, s, {StopKind::MaxStatusesSensed, 5000}, 4, SuccessMode::FadingLevel);
  EXPECT_LT(std::abs(z_score(r.empirical_reliability, c.pi, r.reliability_std_error)), 3.0);
}

TEST(Empirical, ChargeMomentsMatchAnalytic) {
  for (double beta : {1.0, 87.0}) {
    const SimResult r = run_episode(direct_channel(beta, 0.5), make_scheme(SchemeKind::ZeroError, 0.5),
                                    {StopKind::MaxSuccesses, 20000}, 17);
    const EmpiricalMoments m = empirical_charge_moments(r);
    const ChargeMoments t = charge_time_moments(beta);
    EXPECT_LT(std::abs(z_score(m.mean, t.mean, m.mean_std_error)), 3.0) << beta;
    EXPECT_LT(std::abs(z_score(m.second, t.second, m.second_std_error)), 3.0) << beta;
  }
}

TEST(Empirical, ChargeMomentsNeedEnoughSamples) {
  const SimResult r = run_episode(direct_channel(50.0, 0.5), make_scheme(SchemeKind::ZeroError, 0.5),
                                  {StopKind::MaxSuccesses, 10}, 1);
  EXPECT_THROW(empirical_charge_moments(r), SimulationError);
}

TEST(Empirical, CycleMomentsMatchAnalytic) {
  const double beta = 4.0, pi = 0.6;
  const SchemePolicy s = make_scheme(SchemeKind::Deterministic, pi, 0.05);
  const SimResult r = run_episode(direct_channel(beta, pi), s, {StopKind::MaxSuccesses, 60000}, 12);
  const EmpiricalMoments f = empirical_attempt_moments(r);
  const EmpiricalMoments x = empirical_intersuccess_moments(r);
  const EmpiricalMoments h = empirical_stale_head_moments(r);
  EXPECT_LT(std::abs(z_score(f.mean, geom_moments(pi).mean, f.mean_std_error)), 3.0);
  EXPECT_LT(std::abs(z_score(f.second, geom_moments(pi).second, f.second_std_error)), 3.0);
  EXPECT_LT(std::abs(z_score(x.mean, intersuccess_moments(beta, pi).mean, x.mean_std_error)), 3.0);
  EXPECT_LT(std::abs(z_score(h.mean, stale_head_mean_det(beta, pi, s.retry.k), h.mean_std_error)),
            3.0);
}

TEST(RunEpisode, AverageAoiMatchesAnalytic) {
  const double beta = 5.0, pi = 0.5;
  for (SchemeKind k : {SchemeKind::Deterministic, SchemeKind::Randomized, SchemeKind::ZeroError}) {
    const SchemePolicy s = make_scheme(k, pi, 0.1);
    const SimResult r = run_episode(direct_channel(beta, pi), s, {StopKind::MaxSuccesses, 60000}, 64);
    const double expected = analyze(beta, pi, s).avg_aoi;
    EXPECT_LT(std::abs(z_score(r.empirical_avg_aoi, expected, r.aoi_std_error)), 3.0)
        << to_string(k) << " " << r.empirical_avg_aoi << " vs " << expected;
  }
}

TEST(Replicate, SingleReplicationEqualsEpisodeWithDerivedSeed) {
  const ChannelParams c = direct_channel(8.0, 0.6);
  const SchemePolicy s = make_scheme(SchemeKind::Randomized, 0.6, 0.05);
  const StopRule stop{StopKind::MaxStatusesSensed, 4000};
  const ReplicationSummary sum = replicate(c, s, stop, 1, 99);
  ASSERT_EQ(sum.runs.size(), 1u);
  const SimResult direct = run_episode(c, s, stop, replication_seed(99, 0));
  EXPECT_EQ(sum.runs[0], direct);
  EXPECT_EQ(sum.avg_aoi.mean, direct.empirical_avg_aoi);
  EXPECT_EQ(sum.avg_aoi.std_error, direct.aoi_std_error);
  EXPECT_EQ(sum.reliability.mean, direct.empirical_reliability);
}

TEST(Replicate, IndependentOfThreadCount) {
  const ChannelParams c = direct_channel(8.0, 0.6);
  const SchemePolicy s = make_scheme(SchemeKind::Deterministic, 0.6, 0.05);
  const StopRule stop{StopKind::MaxStatusesSensed, 2000};
  const ReplicationSummary a = replicate(c, s, stop, 6, 5, SuccessMode::Bernoulli, 1);
  const ReplicationSummary b = replicate(c, s, stop, 6, 5, SuccessMode::Bernoulli, 4);
  ASSERT_EQ(a.runs.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(a.runs[i], b.runs[i]);
  EXPECT_EQ(a.avg_aoi.mean, b.avg_aoi.mean);
  EXPECT_GT(a.avg_aoi.std_error, 0.0);
  EXPECT_LE(a.avg_aoi.ci_low, a.avg_aoi.mean);
  EXPECT_GE(a.avg_aoi.ci_high, a.avg_aoi.mean);
}

TEST(Replicate, RejectsZeroReplications) {
  EXPECT_THROW(replicate(direct_channel(1, 0.5), make_scheme(SchemeKind::SingleShot, 0.5),
                         {StopKind::MaxSlots, 100}, 0, 1),
               InvalidParameter);
}

TEST(Rng, SeedMixingIsStable) {
  EXPECT_EQ(replication_seed(0, 0), 0xE220A8397B1DCDAFull);
  EXPECT_NE(replication_seed(1, 0), replication_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  RandomStream a(3), b(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.uniform(), b.uniform());
}
