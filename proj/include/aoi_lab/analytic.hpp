#pragma once

// Closed-form renewal-reward analysis of the average age of information.
//
// One renewal cycle runs between consecutive successful deliveries. Its AoI
// area splits into a rectangle U = H * X (H: age the previous delivered status
// had already accumulated, X: cycle length) and a discrete triangle
// V = X (X + 1) / 2, so the average AoI is (E[U] + E[V]) / E[X].

#include <optional>

#include "aoi_lab/core_model.hpp"

namespace aoi {

struct GeomMoments {
  double mean = 1.0;
  double second = 1.0;
};

struct ChargeMoments {
  double mean = 1.0;
  double second = 1.0;
};

struct IntersuccessMoments {
  double mean = 1.0;
  double second = 1.0;
};

/// Intermediates of the randomized-limit staleness mixture.
struct StaleHeadMixture {
  double p = 1.0;   // Pr[the delivered status had limit k]
  double h1 = 0.0;  // E[H | limit k]
  double h2 = 0.0;  // E[H | limit k-1]
  double mean = 0.0;
};

struct AnalyticReport {
  SchemeKind scheme = SchemeKind::SingleShot;
  int k = 1;  // retry limit; 0 encodes "unbounded"
  double alpha = 1.0;
  ChargeMoments charge;
  GeomMoments geom;
  IntersuccessMoments intersuccess;
  double stale_head_mean = 0.0;  // E[H]
  std::optional<StaleHeadMixture> mixture;
  double triangle_mean = 0.0;    // E[V]
  double rectangle_mean = 0.0;   // E[U]
  double cycle_area_mean = 0.0;  // E[A]
  double avg_aoi = 0.0;
  double reliability = 0.0;
};

inline GeomMoments geom_moments(double pi) {
  detail::require(detail::is_probability_open(pi), "pi must lie in (0, 1)");
  return {1.0 / pi, (2.0 - pi) / (pi * pi)};
}

inline ChargeMoments charge_time_moments(double beta) {
  detail::require(std::isfinite(beta) && beta > 0.0, "beta must be positive");
  return {1.0 + beta, 1.0 + 3.0 * beta + beta * beta};
}

inline IntersuccessMoments intersuccess_moments(const ChargeMoments& t, const GeomMoments& f) {
  const double t1sq = t.mean * t.mean;
  return {t.mean * f.mean, t.second * f.mean + t1sq * f.second - t1sq * f.mean};
}

inline IntersuccessMoments intersuccess_moments(double beta, double pi) {
  return intersuccess_moments(charge_time_moments(beta), geom_moments(pi));
}

/// E[F - 1 | F <= k] for F ~ Geom(pi), in closed form.
inline double truncated_geom_mean_shift(double pi, long long k) {
  detail::require(detail::is_probability_open(pi), "pi must lie in (0, 1)");
  detail::require(k >= 1, "retry limit must be at least 1");
  if (k == 1) return 0.0;
  const double q = failure_power(pi, static_cast<double>(k));
  return 1.0 / pi - static_cast<double>(k) * q / (1.0 - q) - 1.0;
}

/// E[H] when every status is allowed k transmissions.
inline double stale_head_mean_det(double beta, double pi, long long k) {
  return charge_time_moments(beta).mean * truncated_geom_mean_shift(pi, k);
}

/// E[H] for the untruncated (zero-error) scheme.
inline double stale_head_mean_unbounded(double beta, double pi) {
  return charge_time_moments(beta).mean * (1.0 / pi - 1.0);
}

inline StaleHeadMixture stale_head_mean_rand(double beta, double pi, const RetryParams& retry) {
  detail::require(retry.k >= 1, "retry limit must be at least 1");
  detail::require(retry.alpha >= 0.0 && retry.alpha <= 1.0, "alpha must lie in [0, 1]");
  StaleHeadMixture m;
  detail::require(std::isfinite(beta) && beta > 0.0, "beta must be positive");
  detail::require(detail::is_probability_open(pi), "pi must lie in (0, 1)");
  if (retry.k == 1) return m;
  const double a = retry.alpha;
  const double qk = failure_power(pi, retry.k);
  const double qk1 = failure_power(pi, retry.k - 1);
  m.p = a * (1.0 - qk) / (1.0 - a * qk - (1.0 - a) * qk1);
  m.h1 = stale_head_mean_det(beta, pi, retry.k);
  m.h2 = stale_head_mean_det(beta, pi, retry.k - 1);
  m.mean = m.p * m.h1 + (1.0 - m.p) * m.h2;
  return m;
}

namespace detail {

/// Fills the cycle decomposition from E[H] and returns the finished report.
inline AnalyticReport assemble(double beta, double pi, double stale_head) {
  AnalyticReport r;
  r.charge = charge_time_moments(beta);
  r.geom = geom_moments(pi);
  r.intersuccess = intersuccess_moments(r.charge, r.geom);
  r.stale_head_mean = stale_head;
  r.triangle_mean = 0.5 * (r.intersuccess.second + r.intersuccess.mean);
  r.rectangle_mean = stale_head * r.intersuccess.mean;
  r.cycle_area_mean = r.rectangle_mean + r.triangle_mean;
  r.avg_aoi = 0.5 * (r.intersuccess.second / r.intersuccess.mean + 1.0) + stale_head;
  return r;
}

}  // namespace detail

/// Closed-form deterministic-limit AoI for a given retry limit k.
inline double aoi_det_closed_form(double beta, double pi, long long k) {
  detail::require(std::isfinite(beta) && beta > 0.0, "beta must be positive");
  detail::require(detail::is_probability_open(pi), "pi must lie in (0, 1)");
  detail::require(k >= 1, "retry limit must be at least 1");
  const double q = failure_power(pi, static_cast<double>(k));
  const double tail = static_cast<double>(k) * q / (1.0 - q);
  return (1.0 + beta) * (2.0 / pi - tail - 1.5) + (2.0 * beta + 1.0) / (2.0 * (1.0 + beta));
}

inline double aoi_zero_error_closed_form(double beta, double pi) {
  detail::require(std::isfinite(beta) && beta > 0.0, "beta must be positive");
  detail::require(detail::is_probability_open(pi), "pi must lie in (0, 1)");
  return (1.0 + beta) * (4.0 - 3.0 * pi) / (2.0 * pi) + (2.0 * beta + 1.0) / (2.0 * (1.0 + beta));
}

/// Deterministic scheme with an explicit retry limit.
inline AnalyticReport aoi_det_with_limit(double beta, double pi, long long k) {
  AnalyticReport r = detail::assemble(beta, pi, stale_head_mean_det(beta, pi, k));
  r.scheme = k == 1 ? SchemeKind::SingleShot : SchemeKind::Deterministic;
  r.k = static_cast<int>(k);
  r.reliability = 1.0 - failure_power(pi, static_cast<double>(k));
  return r;
}

inline AnalyticReport aoi_det(double beta, double pi, double delta) {
  AnalyticReport r = aoi_det_with_limit(beta, pi, retry_limit(pi, delta));
  r.scheme = SchemeKind::Deterministic;
  return r;
}

inline AnalyticReport aoi_single_shot(double beta, double pi) {
  return aoi_det_with_limit(beta, pi, 1);
}

inline AnalyticReport aoi_rand(double beta, double pi, double delta) {
  const RetryParams retry = randomized_retry_params(pi, delta);
  const StaleHeadMixture m = stale_head_mean_rand(beta, pi, retry);
  AnalyticReport r = detail::assemble(beta, pi, m.mean);
  r.scheme = SchemeKind::Randomized;
  r.k = retry.k;
  r.alpha = retry.alpha;
  if (retry.k > 1) {
    r.mixture = m;
    r.reliability = 1.0 - delta;
  } else {
    r.reliability = pi;
  }
  return r;
}

inline AnalyticReport aoi_zero_error(double beta, double pi) {
  AnalyticReport r = detail::assemble(beta, pi, stale_head_mean_unbounded(beta, pi));
  r.scheme = SchemeKind::ZeroError;
  r.k = 0;
  r.reliability = 1.0;
  return r;
}

inline AnalyticReport analyze(double beta, double pi, const SchemePolicy& scheme) {
  switch (scheme.kind) {
    case SchemeKind::SingleShot: return aoi_single_shot(beta, pi);
    case SchemeKind::Deterministic: return aoi_det(beta, pi, scheme.delta);
    case SchemeKind::Randomized: return aoi_rand(beta, pi, scheme.delta);
    case SchemeKind::ZeroError: return aoi_zero_error(beta, pi);
  }
  throw InvalidParameter("unknown scheme");
}

}  // namespace aoi
