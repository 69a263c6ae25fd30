#pragma once

// Slot-level Monte Carlo of the harvest / sense / transmit / feedback loop.
//
// Slot t runs in this order:
//   1. harvest: battery += eta*P*n_t, n_t ~ Exp(lambda), capped at B;
//   2. if the battery is full: sense a fresh status (birth = t) when the last
//      transmission succeeded or the current status exhausted its limit;
//   3. transmit, draining the battery to zero;
//   4. resolve success at the end of the slot; a delivered status reaches the
//      receiver at slot t + 1.
// Receiver AoI at slot t is t - birth(freshest delivered status). Averages
// cover complete renewal cycles only: from the first delivery up to the last.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "aoi_lab/analytic.hpp"
#include "aoi_lab/core_model.hpp"
#include "aoi_lab/parallel.hpp"
#include "aoi_lab/rng.hpp"
#include "aoi_lab/stats.hpp"

namespace aoi {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SuccessMode { Bernoulli, FadingLevel };

inline std::string_view to_string(SuccessMode m) {
  return m == SuccessMode::Bernoulli ? "bernoulli" : "fading";
}

enum class StopKind { MaxSlots, MaxStatusesSensed, MaxSuccesses };

inline std::string_view to_string(StopKind k) {
  switch (k) {
    case StopKind::MaxSlots: return "slots";
    case StopKind::MaxStatusesSensed: return "statuses";
    case StopKind::MaxSuccesses: return "successes";
  }
  return "?";
}

struct StopRule {
  StopKind kind = StopKind::MaxStatusesSensed;
  std::uint64_t limit = 50'000;

  friend bool operator==(const StopRule&, const StopRule&) = default;
};

struct SimState {
  std::uint64_t slot = 0;
  double battery_j = 0.0;
  bool status_pending = false;  // a sensed status still has attempts left
  std::uint64_t current_status_birth = 0;
  int attempts_used = 0;
  int attempt_limit = 0;
  std::uint64_t receiver_aoi = 0;  // valid once a status has been delivered
  std::optional<std::uint64_t> last_delivered_birth;
};

/// One renewal cycle between consecutive deliveries.
struct CycleRecord {
  std::uint64_t length = 0;       // X_i
  std::uint64_t stale_head = 0;   // H_i
  std::uint64_t attempts = 0;     // F_i, transmissions in the cycle

  [[nodiscard]] std::uint64_t area() const {
    return stale_head * length + length * (length + 1) / 2;
  }
};

struct SimResult {
  std::uint64_t seed = 0;
  std::uint64_t slots_run = 0;
  std::uint64_t statuses_sensed = 0;  // resolved statuses: delivered or given up
  std::uint64_t statuses_delivered = 0;
  std::uint64_t transmissions = 0;
  double empirical_reliability = 0.0;
  double empirical_avg_aoi = 0.0;
  double aoi_std_error = 0.0;          // batch means over cycles
  double reliability_std_error = 0.0;  // binomial
  std::uint64_t measured_slots = 0;     // sum of X_i
  std::uint64_t measured_aoi_area = 0;  // per-slot receiver AoI summed over measured slots
  std::vector<CycleRecord> cycles;
  std::uint64_t charge_count = 0;
  std::uint64_t charge_sum = 0;
  std::uint64_t charge_sum_sq = 0;
  double charge_sum_4 = 0.0;
  std::uint64_t limit_high_count = 0;  // statuses whose drawn limit was k
  std::uint64_t limit_low_count = 0;   // statuses whose drawn limit was k-1
  int max_attempts_per_status = 0;

  friend bool operator==(const SimResult& a, const SimResult& b) {
    auto key = [](const SimResult& r) {
      return std::tie(r.seed, r.slots_run, r.statuses_sensed, r.statuses_delivered, r.transmissions,
                      r.measured_slots, r.measured_aoi_area, r.charge_count, r.charge_sum,
                      r.charge_sum_sq, r.limit_high_count, r.limit_low_count,
                      r.max_attempts_per_status);
    };
    auto same_cycles = std::equal(a.cycles.begin(), a.cycles.end(), b.cycles.begin(),
                                  b.cycles.end(), [](const CycleRecord& x, const CycleRecord& y) {
                                    return x.length == y.length && x.stale_head == y.stale_head &&
                                           x.attempts == y.attempts;
                                  });
    return key(a) == key(b) && same_cycles &&
           a.empirical_avg_aoi == b.empirical_avg_aoi &&
           a.empirical_reliability == b.empirical_reliability;
  }
};

inline void validate_for_simulation(const ChannelParams& c) {
  using detail::require;
  require(std::isfinite(c.lambda) && c.lambda > 0.0, "lambda must be positive");
  require(std::isfinite(c.beta) && c.beta > 0.0, "beta must be positive");
  require(std::isfinite(c.pi) && c.pi > 0.0 && c.pi <= 1.0, "pi must lie in (0, 1]");
  require(std::isfinite(c.battery_capacity_j) && c.battery_capacity_j > 0.0,
          "battery capacity must be positive");
  require(std::isfinite(c.noise_w) && c.noise_w >= 0.0, "noise power must be non-negative");
  require(std::isfinite(c.spectral_eff_bpcu) && c.spectral_eff_bpcu > 0.0,
          "spectral efficiency must be positive");
}

/// A single episode, advanced one slot at a time.
class Episode {
 public:
  Episode(const ChannelParams& chan, const SchemePolicy& scheme, std::uint64_t seed,
          SuccessMode mode = SuccessMode::Bernoulli)
      : chan_(chan), scheme_(scheme), mode_(mode), rng_(seed), harvest_scale_(chan.harvest_scale_w()) {
    validate_for_simulation(chan);
    result_.seed = seed;
  }

  [[nodiscard]] const SimState& state() const { return state_; }
  [[nodiscard]] std::uint64_t resolved_statuses() const { return result_.statuses_sensed; }
  [[nodiscard]] std::uint64_t delivered_statuses() const { return result_.statuses_delivered; }

  [[nodiscard]] bool reached(const StopRule& stop) const {
    switch (stop.kind) {
      case StopKind::MaxSlots: return state_.slot >= stop.limit;
      case StopKind::MaxStatusesSensed: return result_.statuses_sensed >= stop.limit;
      case StopKind::MaxSuccesses: return result_.statuses_delivered >= stop.limit;
    }
    return true;
  }

  void step() {
    SimState& s = state_;
    ++s.slot;
    if (pending_delivery_) deliver(s.slot);

    ++charge_slots_;
    const double harvest = harvest_scale_ * rng_.exponential(chan_.lambda);
    if (!std::isfinite(harvest)) throw SimulationError("non-finite harvest draw");
    s.battery_j += harvest;
    if (s.battery_j >= chan_.battery_capacity_j) {
      s.battery_j = chan_.battery_capacity_j;
      on_full_battery();
    }

    if (s.last_delivered_birth) {
      s.receiver_aoi = s.slot - *s.last_delivered_birth;
      cycle_area_ += s.receiver_aoi;
    }
  }

  /// Closes the pending delivery (its cycle area is already complete) and
  /// returns the summary. The episode must not be stepped afterwards.
  SimResult finish() {
    if (pending_delivery_) deliver(state_.slot + 1);
    SimResult r = std::move(result_);
    r.slots_run = state_.slot;
    if (r.cycles.empty()) throw SimulationError("horizon too short: no complete renewal cycle");
    r.empirical_avg_aoi =
        static_cast<double>(r.measured_aoi_area) / static_cast<double>(r.measured_slots);
    r.empirical_reliability = r.statuses_sensed == 0
                                  ? 0.0
                                  : static_cast<double>(r.statuses_delivered) /
                                        static_cast<double>(r.statuses_sensed);
    if (r.statuses_sensed > 0) {
      const double p = r.empirical_reliability;
      r.reliability_std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(r.statuses_sensed));
    }
    std::vector<double> area, length;
    area.reserve(r.cycles.size());
    length.reserve(r.cycles.size());
    for (const auto& c : r.cycles) {
      area.push_back(static_cast<double>(c.area()));
      length.push_back(static_cast<double>(c.length));
    }
    r.aoi_std_error = batch_ratio_std_error(area, length);
    return r;
  }

 private:
  void on_full_battery() {
    SimState& s = state_;
    ++result_.charge_count;
    result_.charge_sum += charge_slots_;
    result_.charge_sum_sq += charge_slots_ * charge_slots_;
    const auto t = static_cast<double>(charge_slots_);
    result_.charge_sum_4 += t * t * t * t;

    if (!s.status_pending) sense();

    s.battery_j = 0.0;
    charge_slots_ = 0;
    ++s.attempts_used;
    ++result_.transmissions;
    ++attempts_since_success_;
    result_.max_attempts_per_status = std::max(result_.max_attempts_per_status, s.attempts_used);

    if (transmission_succeeds()) {
      pending_delivery_ = true;
      pending_birth_ = s.current_status_birth;
      pending_attempts_ = attempts_since_success_;
      attempts_since_success_ = 0;
      ++result_.statuses_delivered;
      ++result_.statuses_sensed;
      s.status_pending = false;
    } else if (s.attempts_used >= s.attempt_limit) {
      ++result_.statuses_sensed;
      s.status_pending = false;
    }
  }

  void sense() {
    SimState& s = state_;
    s.status_pending = true;
    s.current_status_birth = s.slot;
    s.attempts_used = 0;
    switch (scheme_.kind) {
      case SchemeKind::SingleShot: s.attempt_limit = 1; break;
      case SchemeKind::Deterministic: s.attempt_limit = scheme_.retry.k; break;
      case SchemeKind::ZeroError: s.attempt_limit = std::numeric_limits<int>::max(); break;
      case SchemeKind::Randomized:
        if (scheme_.retry.k > 1) {
          const bool high = rng_.bernoulli(scheme_.retry.alpha);
          s.attempt_limit = high ? scheme_.retry.k : scheme_.retry.k - 1;
          ++(high ? result_.limit_high_count : result_.limit_low_count);
        } else {
          s.attempt_limit = 1;
        }
        break;
    }
  }

  bool transmission_succeeds() {
    if (mode_ == SuccessMode::Bernoulli) return rng_.bernoulli(chan_.pi);
    const double gain = rng_.exponential(chan_.lambda);
    if (!std::isfinite(gain)) throw SimulationError("non-finite fading draw");
    if (chan_.noise_w == 0.0) return gain > 0.0;
    const double snr = chan_.battery_capacity_j * gain / chan_.noise_w;
    return std::log2(1.0 + snr) > chan_.spectral_eff_bpcu;
  }

  void deliver(std::uint64_t arrival) {
    SimState& s = state_;
    if (last_arrival_) {
      CycleRecord c;
      c.length = arrival - *last_arrival_;
      c.stale_head = *last_arrival_ - *s.last_delivered_birth - 1;
      c.attempts = pending_attempts_;
      result_.cycles.push_back(c);
      result_.measured_slots += c.length;
      result_.measured_aoi_area += cycle_area_;
    }
    cycle_area_ = 0;
    last_arrival_ = arrival;
    s.last_delivered_birth = pending_birth_;
    pending_delivery_ = false;
  }

  ChannelParams chan_;
  SchemePolicy scheme_;
  SuccessMode mode_;
  RandomStream rng_;
  double harvest_scale_;
  SimState state_;
  SimResult result_;
  std::uint64_t charge_slots_ = 0;
  std::uint64_t attempts_since_success_ = 0;
  std::uint64_t cycle_area_ = 0;
  bool pending_delivery_ = false;
  std::uint64_t pending_birth_ = 0;
  std::uint64_t pending_attempts_ = 0;
  std::optional<std::uint64_t> last_arrival_;
};

inline SimResult run_episode(const ChannelParams& chan, const SchemePolicy& scheme,
                             const StopRule& stop, std::uint64_t seed,
                             SuccessMode mode = SuccessMode::Bernoulli) {
  if (stop.limit == 0) throw InvalidParameter("stop rule limit must be at least 1");
  Episode ep(chan, scheme, seed, mode);
  while (!ep.reached(stop)) ep.step();
  return ep.finish();
}

/// Aggregate of independent replications.
struct ReplicationSummary {
  std::uint64_t base_seed = 0;
  std::vector<SimResult> runs;  // in replication-index order
  Estimate avg_aoi;
  Estimate reliability;
};

/// Runs `n_reps` episodes with seeds replication_seed(base_seed, i). With a
/// single replication the interval comes from within-episode batch means and
/// the binomial error; otherwise from the spread across replications.
inline ReplicationSummary replicate(const ChannelParams& chan, const SchemePolicy& scheme,
                                    const StopRule& stop, std::size_t n_reps,
                                    std::uint64_t base_seed,
                                    SuccessMode mode = SuccessMode::Bernoulli,
                                    unsigned threads = 0) {
  if (n_reps == 0) throw InvalidParameter("replication count must be at least 1");
  if (stop.limit == 0) throw InvalidParameter("stop rule limit must be at least 1");
  validate_for_simulation(chan);

  ReplicationSummary out;
  out.base_seed = base_seed;
  out.runs.resize(n_reps);
  parallel_for_index(n_reps, threads, [&](std::size_t i) {
    out.runs[i] = run_episode(chan, scheme, stop, replication_seed(base_seed, i), mode);
  });

  if (n_reps == 1) {
    const SimResult& r = out.runs.front();
    out.avg_aoi = Estimate::from(r.empirical_avg_aoi, r.aoi_std_error);
    out.reliability = Estimate::from(r.empirical_reliability, r.reliability_std_error);
  } else {
    std::vector<double> aoi, rel;
    for (const auto& r : out.runs) {
      aoi.push_back(r.empirical_avg_aoi);
      rel.push_back(r.empirical_reliability);
    }
    out.avg_aoi = replicate_estimate(aoi);
    out.reliability = replicate_estimate(rel);
  }
  return out;
}

/// Sample moments of the full-charge durations T.
inline EmpiricalMoments empirical_charge_moments(const SimResult& r,
                                                 std::uint64_t min_samples = 1000) {
  if (r.charge_count < min_samples)
    throw SimulationError("only " + std::to_string(r.charge_count) +
                          " charge intervals observed; need " + std::to_string(min_samples));
  return moments_from_sums(r.charge_count, static_cast<double>(r.charge_sum),
                           static_cast<double>(r.charge_sum_sq), r.charge_sum_4);
}

/// Sample moments of the transmissions-per-delivery counts F_i.
inline EmpiricalMoments empirical_attempt_moments(const SimResult& r) {
  return sample_moments(r.cycles, [](const CycleRecord& c) { return c.attempts; });
}

inline EmpiricalMoments empirical_intersuccess_moments(const SimResult& r) {
  return sample_moments(r.cycles, [](const CycleRecord& c) { return c.length; });
}

inline EmpiricalMoments empirical_stale_head_moments(const SimResult& r) {
  return sample_moments(r.cycles, [](const CycleRecord& c) { return c.stale_head; });
}

}  // namespace aoi
