#pragma once

#include "gbrtune/cost.hpp"
#include "gbrtune/predictors.hpp"
#include "gbrtune/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gbrtune {

struct SimConfig {
  /// Re-prediction period in seconds; a whole multiple of the trace period.
  double interval_s = 300.0;
  /// Leading intervals left out of every reported metric.
  std::size_t warmup_intervals = 1;
  std::optional<double> slice_capacity;
  CostParams cost;
  PredictorConfig predictor;

  void validate() const;
};

/// One call to the slice controller. `per_stream` is in stream_id order.
struct SliceRequest {
  std::uint64_t interval_index = 0;
  double requested_gbr = 0.0;
  double granted_gbr = 0.0;
  std::vector<double> per_stream;
};

struct StreamResult {
  std::string stream_id;
  double whole_trace_max = 0.0;
  /// Requested GBR per interval, warmup included.
  std::vector<double> predictions;
  std::size_t bootstrap_intervals = 0;
  SubscriptionMetrics subscription;
  ClassicMetrics classic;
};

struct AggregateResult {
  std::vector<SliceRequest> requests;
  SubscriptionMetrics subscription;
  ClassicMetrics classic;
  double data_loss_bits = 0.0;
  /// Granted one-time worst-case reservation: the sum of per-stream maxima.
  double static_gbr = 0.0;
  double savings_vs_static = 0.0;
};

struct SimulationResult {
  Technique technique = Technique::Max;
  SimConfig config;
  double sampling_period_s = 1.0;
  std::size_t sample_count = 0;
  std::size_t samples_per_interval = 0;
  std::size_t interval_count = 0;
  /// Sorted by stream_id.
  std::vector<StreamResult> per_stream;
  AggregateResult aggregate;
};

/// Sum of per-stream requests, accumulated in the given order.
double aggregate_requests(std::span<const double> per_stream_gbrs);

/// Mock slice controller grant: the request, capped at `capacity` when set.
double slice_modify(double request, std::optional<double> capacity);

/// Wraps slice_modify and keeps the QoS request log.
class MockSliceController {
public:
  explicit MockSliceController(std::optional<double> capacity) : capacity_(capacity) {}

  /// Aggregates `per_stream`, grants, and appends the call to the log.
  double modify(std::uint64_t interval_index, std::span<const double> per_stream);

  const std::vector<SliceRequest>& log() const noexcept { return log_; }
  std::vector<SliceRequest> take_log() noexcept { return std::move(log_); }

private:
  std::optional<double> capacity_;
  std::vector<SliceRequest> log_;
};

/// Bits not carried: sum_t max(0, a_t - granted_t) * sampling_period.
double account_data_loss(std::span<const double> actual, std::span<const double> granted,
                         double sampling_period_s);

/// Throws ValidationError("traces not aligned") unless all traces share the
/// sampling period, first timestamp and length and are uniform.
void check_alignment(std::span<const BandwidthTrace> traces);

/// Replays the traces through the adaptive request loop. Streams are
/// predicted in parallel (OpenMP); the result does not depend on the
/// thread count and is bit-identical to run_simulation_serial.
SimulationResult run_simulation(std::span<const BandwidthTrace> traces, const SimConfig& config);

/// Reference implementation: the interval-by-interval loop with no
/// parallelism. Kept for equivalence tests and benchmarks.
SimulationResult run_simulation_serial(std::span<const BandwidthTrace> traces,
                                       const SimConfig& config);

namespace detail {

/// Validated geometry shared by both simulation paths.
struct SimLayout {
  std::vector<std::size_t> order;  // trace indices sorted by stream_id
  std::size_t sample_count = 0;
  std::size_t samples_per_interval = 0;
  std::size_t interval_count = 0;
  std::size_t scored_begin = 0;  // first sample counted in metrics
};

SimLayout plan_simulation(std::span<const BandwidthTrace> traces, const SimConfig& config);

} // namespace detail

} // namespace gbrtune
