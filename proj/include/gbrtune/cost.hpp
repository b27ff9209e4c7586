#pragma once

#include "gbrtune/compensated_sum.hpp"

#include <cstddef>
#include <span>

namespace gbrtune {

/// Penalties per (bit/s x sample) of under- and oversubscription.
struct CostParams {
  double p_u = 0.1;
  double p_o = 30.0;

  void validate() const;
};

struct SubscriptionFlags {
  int under = 0;  // reservation exceeds usage
  int over = 0;   // usage exceeds reservation

  friend bool operator==(const SubscriptionFlags&, const SubscriptionFlags&) = default;
};

/// Magnitudes are totals over samples; divide by the count for a mean.
struct SubscriptionMetrics {
  double over_magnitude = 0.0;
  std::size_t over_count = 0;
  double over_fraction = 0.0;
  double under_magnitude = 0.0;
  std::size_t under_count = 0;
  double under_fraction = 0.0;
  double total_cost = 0.0;
  double reserved_total = 0.0;
  double actual_total = 0.0;
  std::size_t sample_count = 0;
};

struct ClassicMetrics {
  double mae = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  double mape = 0.0;
  double mda = 0.0;
};

/// Strict comparisons: equal usage and reservation raise neither flag.
/// Throws ValidationError on non-finite or negative input.
SubscriptionFlags subscription_flags(double actual, double gbr);

/// Single-pass accumulator behind subscription_metrics(). Feeding the same
/// samples in the same order always gives bit-identical results.
class SubscriptionAccumulator {
public:
  void add(double actual, double gbr);
  SubscriptionMetrics finish(const CostParams& params) const;
  std::size_t count() const noexcept { return count_; }

private:
  CompensatedSum over_;
  CompensatedSum under_;
  CompensatedSum reserved_;
  CompensatedSum actual_;
  std::size_t over_count_ = 0;
  std::size_t under_count_ = 0;
  std::size_t count_ = 0;
};

/// Single-pass accumulator behind classic_metrics().
class ClassicAccumulator {
public:
  void add(double actual, double forecast);
  ClassicMetrics finish() const;
  std::size_t count() const noexcept { return count_; }

private:
  CompensatedSum abs_err_;
  CompensatedSum sq_err_;
  CompensatedSum pct_err_;
  std::size_t pct_terms_ = 0;
  std::size_t direction_hits_ = 0;
  std::size_t direction_steps_ = 0;
  double prev_actual_ = 0.0;
  std::size_t count_ = 0;
};

/// sum_t [gbr_t > a_t](gbr_t - a_t) p_u + [a_t > gbr_t](a_t - gbr_t) p_o.
/// Throws ValidationError on empty or mismatched series.
double total_cost(std::span<const double> actual, std::span<const double> gbr,
                  const CostParams& params);

SubscriptionMetrics subscription_metrics(std::span<const double> actual,
                                         std::span<const double> gbr,
                                         const CostParams& params);

/// MAPE skips zero actuals. MDA counts steps t >= 1 where
/// sign(f_t - a_{t-1}) == sign(a_t - a_{t-1}). Needs at least two points.
ClassicMetrics classic_metrics(std::span<const double> actual, std::span<const double> forecast);

/// 1 - sum(gbr) / (N * static_gbr). Negative when the adaptive series
/// reserves more than the static one.
double bandwidth_savings(std::span<const double> gbr, double static_gbr);

} // namespace gbrtune
