#pragma once

// Self-check suite behind `aoi_lab validate`: the analytic identities on
// parameter grids plus short seeded simulations.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "aoi_lab/analytic.hpp"
#include "aoi_lab/simulator.hpp"

namespace aoi {

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Sum over j of (j-1) Pr[F = j | F <= k], term by term.
inline double truncated_shift_by_summation(double pi, int k) {
  double num = 0.0, mass = 0.0, q = 1.0;
  for (int j = 1; j <= k; ++j) {
    num += (j - 1) * q * pi;
    mass += q * pi;
    q *= 1.0 - pi;
  }
  return num / mass;
}

struct Tracker {
  double worst = 0.0;
  void see(double e) { worst = std::max(worst, e); }
  [[nodiscard]] CheckOutcome done(std::string name, double tol) const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "worst error %.3g (tolerance %.3g)", worst, tol);
    return {std::move(name), worst <= tol, buf};
  }
};

inline const std::vector<double>& beta_grid() {
  static const std::vector<double> g{0.5, 1.0, 5.0, 87.0, 1456.0};
  return g;
}

inline std::vector<double> pi_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 19; ++i) g.push_back(0.05 * i);
  return g;
}

}  // namespace detail

inline std::vector<CheckOutcome> run_invariant_suite(bool include_simulation = true) {
  using detail::rel_err;
  std::vector<CheckOutcome> out;
  const auto pis = detail::pi_grid();

  {
    detail::Tracker t;
    for (double pi : pis)
      for (int k = 1; k <= 50; ++k)
        t.see(std::abs(truncated_geom_mean_shift(pi, k) - detail::truncated_shift_by_summation(pi, k)));
    out.push_back(t.done("truncated geometric shift: closed form vs summation", 1e-10));
  }
  {
    detail::Tracker t;
    for (double pi : pis)
      for (int k = 2; k <= 8; ++k) {
        const double lo = failure_power(pi, k), hi = failure_power(pi, k - 1);
        for (double w : {0.1, 0.5, 0.9}) {
          const double delta = lo + w * (hi - lo);
          const RetryParams r = randomized_retry_params(pi, delta);
          t.see(rel_err(r.alpha * r.p1 + (1.0 - r.alpha) * r.p2, delta));
        }
      }
    out.push_back(t.done("randomized limit mixing reproduces delta", 1e-12));
  }
  {
    detail::Tracker t;
    for (double pi : pis)
      for (int k = 2; k <= 8; ++k)
        for (double a : {0.0, 0.3, 0.7, 1.0}) {
          RetryParams r{k, failure_power(pi, k), failure_power(pi, k - 1), a};
          const double p = stale_head_mean_rand(1.0, pi, r).p;
          const double rhs = a * (1.0 - r.p1) + p * (a * r.p1 + (1.0 - a) * r.p2);
          t.see(rel_err(p, rhs));
        }
    out.push_back(t.done("limit-k posterior solves its memoryless recursion", 1e-12));
  }
  {
    detail::Tracker t;
    for (double beta : detail::beta_grid())
      for (double pi : pis)
        for (int j = 1; j <= 6; ++j) {
          const double delta = failure_power(pi, j);
          if (delta > 1.0 - pi) continue;
          t.see(rel_err(aoi_rand(beta, pi, delta).avg_aoi, aoi_det(beta, pi, delta).avg_aoi));
        }
    out.push_back(t.done("randomized equals deterministic at threshold targets", 1e-9));
  }
  {
    int violations = 0, checked = 0;
    for (double beta : detail::beta_grid())
      for (double pi : pis)
        for (int k = 2; k <= 6; ++k) {
          const double lo = failure_power(pi, k), hi = failure_power(pi, k - 1);
          for (double w : {0.05, 0.5, 0.95}) {
            const double delta = lo + w * (hi - lo);
            ++checked;
            if (aoi_rand(beta, pi, delta).avg_aoi > aoi_det(beta, pi, delta).avg_aoi * (1 + 1e-12))
              ++violations;
          }
        }
    out.push_back({"randomized AoI never exceeds deterministic", violations == 0,
                   std::to_string(violations) + " violations in " + std::to_string(checked)});
  }
  {
    int violations = 0;
    for (double beta : detail::beta_grid())
      for (double pi : pis) {
        const double ze = aoi_zero_error(beta, pi).avg_aoi;
        double prev = 0.0;
        for (int k = 1; k <= 40; ++k) {
          const double v = aoi_det_with_limit(beta, pi, k).avg_aoi;
          if (v < prev * (1 - 1e-12) || v > ze * (1 + 1e-12)) ++violations;
          prev = v;
        }
      }
    out.push_back({"deterministic AoI nondecreasing in k and bounded by zero-error",
                   violations == 0, std::to_string(violations) + " violations"});
  }
  {
    detail::Tracker area, closed;
    for (double beta : detail::beta_grid())
      for (double pi : pis)
        for (int k : {1, 2, 3, 7}) {
          const AnalyticReport r = aoi_det_with_limit(beta, pi, k);
          area.see(rel_err(r.avg_aoi * r.intersuccess.mean, r.cycle_area_mean));
          area.see(rel_err(r.rectangle_mean, r.stale_head_mean * r.intersuccess.mean));
          closed.see(rel_err(r.avg_aoi, aoi_det_closed_form(beta, pi, k)));
        }
    out.push_back(area.done("cycle-area reconstruction", 1e-12));
    out.push_back(closed.done("assembled deterministic AoI equals closed form", 1e-9));
  }
  {
    detail::Tracker t;
    for (double beta : detail::beta_grid())
      for (double pi : pis)
        t.see(rel_err(aoi_det_with_limit(beta, pi, 10'000).avg_aoi,
                      aoi_zero_error_closed_form(beta, pi)));
    out.push_back(t.done("zero-error limit of the deterministic scheme", 1e-6));
  }

  if (include_simulation) {
    const ChannelParams chan = direct_channel(4.0, 0.6);
    const SchemePolicy scheme = make_scheme(SchemeKind::Randomized, 0.6, 0.05);
    const StopRule stop{StopKind::MaxSuccesses, 40'000};
    const SimResult a = run_episode(chan, scheme, stop, 2024);
    const SimResult b = run_episode(chan, scheme, stop, 2024);
    out.push_back({"simulation is reproducible from its seed", a == b, ""});

    std::uint64_t area = 0;
    for (const auto& c : a.cycles) area += c.area();
    out.push_back({"per-slot AoI area equals rectangle-plus-triangle sum",
                   area == a.measured_aoi_area,
                   std::to_string(area) + " vs " + std::to_string(a.measured_aoi_area)});
    out.push_back({"no status exceeds its retry limit", a.max_attempts_per_status <= scheme.retry.k,
                   "max " + std::to_string(a.max_attempts_per_status)});

    const AnalyticReport an = aoi_rand(chan.beta, chan.pi, 0.05);
    const double z = (a.empirical_avg_aoi - an.avg_aoi) / a.aoi_std_error;
    char buf[128];
    std::snprintf(buf, sizeof buf, "simulated %.4f analytic %.4f (z = %.2f)", a.empirical_avg_aoi,
                  an.avg_aoi, z);
    out.push_back({"simulated AoI within 3 standard errors of analytic", std::abs(z) <= 3.0, buf});
    const double zr = (a.empirical_reliability - an.reliability) / a.reliability_std_error;
    std::snprintf(buf, sizeof buf, "simulated %.4f analytic %.4f (z = %.2f)",
                  a.empirical_reliability, an.reliability, zr);
    out.push_back({"simulated reliability within 3 standard errors of analytic",
                   std::abs(zr) <= 3.0, buf});
  }
  return out;
}

}  // namespace aoi
