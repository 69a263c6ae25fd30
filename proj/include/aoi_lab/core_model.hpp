#pragma once

// Physical and scheme parameters for a sensor that harvests RF energy, fires
// a status update every time its battery fills, and retransmits failed
// updates up to a retry limit.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aoi {

/// Raised for out-of-domain model inputs.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

inline bool is_probability_open(double p) { return std::isfinite(p) && p > 0.0 && p < 1.0; }

}  // namespace detail

/// Raw physical inputs. Defaults are the reference simulation setting
/// (noise -50 dBm, eta 0.5, r 0.05 BPCU, lambda = 1e3 * d^2.2).
struct PhysicalParams {
  double distance_m = 20.0;
  double tx_power_w = 1.0;
  double conversion_eff = 0.5;
  double battery_capacity_j = 1e-3;
  double noise_dbm = -50.0;
  double spectral_eff_bpcu = 0.05;
  double pathloss_coeff = 1e3;
  double pathloss_exp = 2.2;

  friend bool operator==(const PhysicalParams&, const PhysicalParams&) = default;
};

/// The canonical pair (beta, pi) plus the physical quantities the fading-level
/// simulator needs to evaluate the SNR test literally.
struct ChannelParams {
  double lambda = 1.0;              // exponential rate of both fading powers
  double beta = 1.0;                // lambda * B / (eta * P)
  double pi = 0.5;                  // per-transmission success probability
  double noise_w = 0.0;             // sigma^2
  double battery_capacity_j = 1.0;  // B
  double spectral_eff_bpcu = 1.0;   // r

  /// Energy harvested per slot is eta*P*n with n ~ Exp(lambda); eta*P is implied.
  [[nodiscard]] double harvest_scale_w() const { return lambda * battery_capacity_j / beta; }

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline void validate(const PhysicalParams& p) {
  using detail::require;
  require(std::isfinite(p.distance_m) && p.distance_m > 0.0, "distance must be positive");
  require(std::isfinite(p.tx_power_w) && p.tx_power_w > 0.0, "transmit power must be positive");
  require(std::isfinite(p.conversion_eff) && p.conversion_eff > 0.0 && p.conversion_eff <= 1.0,
          "conversion efficiency must lie in (0, 1]");
  require(std::isfinite(p.battery_capacity_j) && p.battery_capacity_j > 0.0,
          "battery capacity must be positive");
  require(std::isfinite(p.noise_dbm), "noise power must be finite");
  require(std::isfinite(p.spectral_eff_bpcu) && p.spectral_eff_bpcu > 0.0,
          "spectral efficiency must be positive");
  require(std::isfinite(p.pathloss_coeff) && p.pathloss_coeff > 0.0,
          "path-loss coefficient must be positive");
  require(std::isfinite(p.pathloss_exp), "path-loss exponent must be finite");
}

inline ChannelParams derive_channel(const PhysicalParams& p) {
  validate(p);
  ChannelParams c;
  c.lambda = p.pathloss_coeff * std::pow(p.distance_m, p.pathloss_exp);
  c.noise_w = dbm_to_watts(p.noise_dbm);
  c.battery_capacity_j = p.battery_capacity_j;
  c.spectral_eff_bpcu = p.spectral_eff_bpcu;
  c.beta = c.lambda * p.battery_capacity_j / (p.conversion_eff * p.tx_power_w);
  c.pi = std::exp(-c.lambda * std::expm1(p.spectral_eff_bpcu * std::log(2.0)) * c.noise_w /
                  p.battery_capacity_j);
  detail::require(std::isfinite(c.beta) && c.beta > 0.0, "derived beta is not positive");
  detail::require(detail::is_probability_open(c.pi),
                  "derived success probability " + std::to_string(c.pi) + " is outside (0, 1)");
  return c;
}

/// Channel given directly by (beta, pi). The physical fields are set to the
/// normalisation lambda = B = r = 1, sigma^2 = -ln(pi), which reproduces pi
/// through the SNR test exactly.
inline ChannelParams direct_channel(double beta, double pi) {
  detail::require(std::isfinite(beta) && beta > 0.0, "beta must be positive");
  detail::require(detail::is_probability_open(pi), "pi must lie in (0, 1)");
  ChannelParams c;
  c.lambda = 1.0;
  c.beta = beta;
  c.pi = pi;
  c.noise_w = -std::log(pi);
  c.battery_capacity_j = 1.0;
  c.spectral_eff_bpcu = 1.0;
  return c;
}

/// (1 - pi)^k evaluated as exp(k * log1p(-pi)).
inline double failure_power(double pi, double k) { return std::exp(k * std::log1p(-pi)); }

/// Smallest k >= 1 with (1 - pi)^k <= delta. delta = 1 is accepted and gives k = 1.
inline int retry_limit(double pi, double delta) {
  detail::require(detail::is_probability_open(pi), "pi must lie in (0, 1)");
  detail::require(std::isfinite(delta) && delta > 0.0 && delta <= 1.0,
                  "delta must lie in (0, 1]; use the zero-error scheme for delta = 0");
  const double exact = std::log(delta) / std::log1p(-pi);
  if (!(exact > 1.0)) return 1;
  detail::require(exact < 1e9, "retry limit overflows");
  auto k = static_cast<int>(std::ceil(exact));
  // delta sitting on (1-pi)^(k-1) up to rounding belongs to k-1.
  constexpr double kSnap = 1e-12;
  if (k > 1 && failure_power(pi, k - 1) <= delta * (1.0 + kSnap)) --k;
  return k;
}

struct RetryParams {
  int k = 1;
  double p1 = 0.0;     // (1-pi)^k
  double p2 = 1.0;     // (1-pi)^(k-1)
  double alpha = 1.0;  // Pr[limit == k]; otherwise the limit is k-1

  friend bool operator==(const RetryParams&, const RetryParams&) = default;
};

inline RetryParams deterministic_retry_params(double pi, double delta) {
  RetryParams r;
  r.k = retry_limit(pi, delta);
  r.p1 = failure_power(pi, r.k);
  r.p2 = failure_power(pi, r.k - 1);
  r.alpha = 1.0;
  return r;
}

inline RetryParams randomized_retry_params(double pi, double delta) {
  RetryParams r = deterministic_retry_params(pi, delta);
  if (r.k > 1) {
    const double a = (delta - r.p2) / (r.p1 - r.p2);
    r.alpha = a < 0.0 ? 0.0 : (a > 1.0 ? 1.0 : a);
  }
  return r;
}

enum class SchemeKind { SingleShot, Deterministic, Randomized, ZeroError };

inline std::string_view to_string(SchemeKind s) {
  switch (s) {
    case SchemeKind::SingleShot: return "single-shot";
    case SchemeKind::Deterministic: return "det";
    case SchemeKind::Randomized: return "rand";
    case SchemeKind::ZeroError: return "zero-error";
  }
  return "?";
}

inline SchemeKind parse_scheme(std::string_view s) {
  if (s == "single-shot") return SchemeKind::SingleShot;
  if (s == "det" || s == "deterministic") return SchemeKind::Deterministic;
  if (s == "rand" || s == "randomized") return SchemeKind::Randomized;
  if (s == "zero-error") return SchemeKind::ZeroError;
  throw InvalidParameter("unknown scheme '" + std::string(s) + "'");
}

struct SchemePolicy {
  SchemeKind kind = SchemeKind::SingleShot;
  double delta = 1.0;
  RetryParams retry;  // meaningful for Deterministic and Randomized only

  [[nodiscard]] bool has_retry_params() const {
    return kind == SchemeKind::Deterministic || kind == SchemeKind::Randomized;
  }

  /// Largest number of transmissions any single status may receive.
  [[nodiscard]] int max_attempts() const {
    switch (kind) {
      case SchemeKind::SingleShot: return 1;
      case SchemeKind::ZeroError: return std::numeric_limits<int>::max();
      default: return retry.k;
    }
  }

  friend bool operator==(const SchemePolicy&, const SchemePolicy&) = default;
};

/// Builds a validated policy. Deterministic and randomized schemes take
/// delta in (0, 1]; values above 1 - pi clamp the retry limit to 1.
inline SchemePolicy make_scheme(SchemeKind kind, double pi, double delta = 1.0) {
  SchemePolicy s;
  s.kind = kind;
  switch (kind) {
    case SchemeKind::SingleShot:
      s.delta = 1.0 - pi;
      s.retry = RetryParams{1, 1.0 - pi, 1.0, 1.0};
      break;
    case SchemeKind::ZeroError:
      s.delta = 0.0;
      s.retry = RetryParams{std::numeric_limits<int>::max(), 0.0, 0.0, 1.0};
      break;
    case SchemeKind::Deterministic:
      s.delta = delta;
      s.retry = deterministic_retry_params(pi, delta);
      break;
    case SchemeKind::Randomized:
      s.delta = delta;
      s.retry = randomized_retry_params(pi, delta);
      break;
  }
  return s;
}

}  // namespace aoi
