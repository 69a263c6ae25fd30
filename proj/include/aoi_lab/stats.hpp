#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace aoi {

inline constexpr double kZ95 = 1.959963984540054;

/// Point estimate with a normal-approximation 95% interval.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;

  static Estimate from(double mean, double std_error) {
    return {mean, std_error, mean - kZ95 * std_error, mean + kZ95 * std_error};
  }
  [[nodiscard]] double ci_half_width() const { return kZ95 * std_error; }
  /// |value - mean| <= n_se standard errors.
  [[nodiscard]] bool covers(double value, double n_se = 3.0) const {
    return std::abs(value - mean) <= n_se * std_error;
  }
};

/// Sample first and second moments with the standard errors of both.
struct EmpiricalMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double second = 0.0;
  double mean_std_error = 0.0;
  double second_std_error = 0.0;
};

/// Moments from power sums s1 = sum x, s2 = sum x^2, s4 = sum x^4.
inline EmpiricalMoments moments_from_sums(std::size_t n, double s1, double s2, double s4) {
  EmpiricalMoments m;
  m.count = n;
  if (n == 0) return m;
  const auto dn = static_cast<double>(n);
  m.mean = s1 / dn;
  m.second = s2 / dn;
  if (n > 1) {
    const double var1 = (s2 - dn * m.mean * m.mean) / (dn - 1.0);
    const double var2 = (s4 - dn * m.second * m.second) / (dn - 1.0);
    m.mean_std_error = std::sqrt(std::max(var1, 0.0) / dn);
    m.second_std_error = std::sqrt(std::max(var2, 0.0) / dn);
  } else {
    m.mean_std_error = m.second_std_error = std::numeric_limits<double>::infinity();
  }
  return m;
}

template <class Range, class Proj>
EmpiricalMoments sample_moments(const Range& values, Proj proj) {
  std::size_t n = 0;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (const auto& v : values) {
    const double x = static_cast<double>(proj(v));
    s1 += x;
    s2 += x * x;
    s4 += x * x * x * x;
    ++n;
  }
  return moments_from_sums(n, s1, s2, s4);
}

/// Mean and standard error of independent replicate values.
inline Estimate replicate_estimate(std::span<const double> values) {
  const auto n = values.size();
  if (n == 0) return Estimate::from(std::numeric_limits<double>::quiet_NaN(), 0.0);
  double s = 0.0;
  for (double v : values) s += v;
  const double mean = s / static_cast<double>(n);
  if (n == 1) return Estimate::from(mean, std::numeric_limits<double>::infinity());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return Estimate::from(mean, std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)));
}

/// Standard error of sum(num)/sum(den) by non-overlapping batch means over
/// consecutive observations.
inline double batch_ratio_std_error(std::span<const double> num, std::span<const double> den,
                                    std::size_t max_batches = 32) {
  const std::size_t n = num.size();
  const std::size_t batches = std::min(max_batches, n / 2);
  if (batches < 2) return std::numeric_limits<double>::infinity();
  std::vector<double> ratios;
  ratios.reserve(batches);
  const std::size_t per = n / batches;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = b * per;
    const std::size_t hi = b + 1 == batches ? n : lo + per;
    double a = 0.0, x = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      a += num[i];
      x += den[i];
    }
    ratios.push_back(a / x);
  }
  return replicate_estimate(ratios).std_error;
}

}  // namespace aoi
