#include "gbrtune/simulator.hpp"

#include "gbrtune/compensated_sum.hpp"
#include "gbrtune/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

namespace gbrtune {

void SimConfig::validate() const {
  if (!std::isfinite(interval_s) || interval_s <= 0.0)
    throw ValidationError("interval must be > 0");
  if (slice_capacity && (!std::isfinite(*slice_capacity) || *slice_capacity < 0.0))
    throw ValidationError("slice_capacity must be finite and >= 0");
  cost.validate();
  predictor.validate();
}

double aggregate_requests(std::span<const double> per_stream_gbrs) {
  if (per_stream_gbrs.empty())
    throw ValidationError("aggregate_requests: no per-stream requests");
  CompensatedSum total;
  for (double g : per_stream_gbrs) {
    if (!std::isfinite(g) || g < 0.0)
      throw ValidationError("aggregate_requests: requests must be finite and >= 0");
    total += g;
  }
  return total.value();
}

double slice_modify(double request, std::optional<double> capacity) {
  if (!(request >= 0.0))
    throw ValidationError("slice_modify: negative request");
  return capacity ? std::min(request, *capacity) : request;
}

double MockSliceController::modify(std::uint64_t interval_index,
                                   std::span<const double> per_stream) {
  SliceRequest req;
  req.interval_index = interval_index;
  req.requested_gbr = aggregate_requests(per_stream);
  req.granted_gbr = slice_modify(req.requested_gbr, capacity_);
  req.per_stream.assign(per_stream.begin(), per_stream.end());
  log_.push_back(std::move(req));
  return log_.back().granted_gbr;
}

double account_data_loss(std::span<const double> actual, std::span<const double> granted,
                         double sampling_period_s) {
  if (actual.size() != granted.size())
    throw ValidationError("account_data_loss: series length mismatch");
  CompensatedSum lost;
  for (std::size_t i = 0; i < actual.size(); ++i)
    if (actual[i] > granted[i])
      lost += actual[i] - granted[i];
  return lost.value() * sampling_period_s;
}

void check_alignment(std::span<const BandwidthTrace> traces) {
  if (traces.empty())
    throw ValidationError("no traces given");
  const BandwidthTrace& ref = traces.front();
  for (const auto& t : traces) {
    if (t.samples.empty())
      throw ValidationError("trace '" + t.stream_id + "' is empty");
    if (!t.is_uniform())
      throw ValidationError("trace '" + t.stream_id + "' is not uniformly sampled");
    if (t.period_ms() != ref.period_ms() || t.size() != ref.size() ||
        t.samples.front().timestamp_ms != ref.samples.front().timestamp_ms)
      throw ValidationError("traces not aligned");
  }
}

namespace detail {

SimLayout plan_simulation(std::span<const BandwidthTrace> traces, const SimConfig& config) {
  config.validate();
  check_alignment(traces);

  const std::int64_t period_ms = traces.front().period_ms();
  const std::int64_t interval_ms = period_to_ms(config.interval_s);
  if (interval_ms % period_ms != 0)
    throw ValidationError("interval must be a whole multiple of the sampling period");

  SimLayout layout;
  layout.sample_count = traces.front().size();
  layout.samples_per_interval = static_cast<std::size_t>(interval_ms / period_ms);
  layout.interval_count =
      (layout.sample_count + layout.samples_per_interval - 1) / layout.samples_per_interval;
  layout.scored_begin =
      std::min(layout.sample_count, config.warmup_intervals * layout.samples_per_interval);
  if (layout.sample_count - layout.scored_begin < 2)
    throw ValidationError("warmup leaves fewer than two samples to score");

  layout.order.resize(traces.size());
  std::iota(layout.order.begin(), layout.order.end(), std::size_t{0});
  std::sort(layout.order.begin(), layout.order.end(),
            [&](std::size_t a, std::size_t b) { return traces[a].stream_id < traces[b].stream_id; });
  for (std::size_t i = 1; i < layout.order.size(); ++i)
    if (traces[layout.order[i]].stream_id == traces[layout.order[i - 1]].stream_id)
      throw ValidationError("duplicate stream id '" + traces[layout.order[i]].stream_id + "'");
  return layout;
}

} // namespace detail

namespace {

// Whole replay of one stream. Streams never interact before aggregation, so
// every stream can run on its own thread.
StreamResult simulate_stream(const BandwidthTrace& trace, std::span<const double> rates,
                             const SimConfig& config, const detail::SimLayout& layout) {
  StreamResult out;
  out.stream_id = trace.stream_id;
  out.whole_trace_max = *std::max_element(rates.begin(), rates.end());

  Predictor predictor(config.predictor, {out.whole_trace_max, rates.front()});
  SubscriptionAccumulator subscription;
  ClassicAccumulator classic;
  out.predictions.reserve(layout.interval_count);

  for (std::size_t k = 0; k < layout.interval_count; ++k) {
    const std::size_t begin = k * layout.samples_per_interval;
    const std::size_t end = std::min(layout.sample_count, begin + layout.samples_per_interval);
    const double gbr = predictor.predict();
    if (predictor.bootstrapping())
      ++out.bootstrap_intervals;
    out.predictions.push_back(gbr);
    if (k >= config.warmup_intervals)
      for (std::size_t i = begin; i < end; ++i) {
        subscription.add(rates[i], gbr);
        classic.add(rates[i], gbr);
      }
    predictor.observe_interval(rates.subspan(begin, end - begin), gbr);
  }
  out.subscription = subscription.finish(config.cost);
  out.classic = classic.finish();
  return out;
}

} // namespace

SimulationResult run_simulation(std::span<const BandwidthTrace> traces, const SimConfig& config) {
  const detail::SimLayout layout = detail::plan_simulation(traces, config);
  const std::size_t streams = layout.order.size();
  const std::size_t n = layout.sample_count;

  SimulationResult result;
  result.technique = config.predictor.technique;
  result.config = config;
  result.sampling_period_s = traces.front().sampling_period_s;
  result.sample_count = n;
  result.samples_per_interval = layout.samples_per_interval;
  result.interval_count = layout.interval_count;
  result.per_stream.resize(streams);

  std::vector<std::vector<double>> rates(streams);
  std::vector<std::exception_ptr> errors(streams);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(streams); ++s) {
    try {
      const BandwidthTrace& trace = traces[layout.order[s]];
      rates[s] = trace.bitrates();
      result.per_stream[s] = simulate_stream(trace, rates[s], config, layout);
    } catch (...) {
      errors[s] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e)
      std::rethrow_exception(e);

  MockSliceController controller(config.slice_capacity);
  std::vector<double> per_stream(streams);
  std::vector<double> granted(layout.interval_count);
  for (std::size_t k = 0; k < layout.interval_count; ++k) {
    for (std::size_t s = 0; s < streams; ++s)
      per_stream[s] = result.per_stream[s].predictions[k];
    granted[k] = controller.modify(k, per_stream);
  }

  const std::size_t scored = n - layout.scored_begin;
  std::vector<double> actual(scored);
  std::vector<double> reserved(scored);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(scored); ++j) {
    const std::size_t i = layout.scored_begin + static_cast<std::size_t>(j);
    CompensatedSum total;
    for (std::size_t s = 0; s < streams; ++s)
      total += rates[s][i];
    actual[j] = total.value();
    reserved[j] = granted[i / layout.samples_per_interval];
  }

  SubscriptionAccumulator subscription;
  ClassicAccumulator classic;
  for (std::size_t j = 0; j < scored; ++j) {
    subscription.add(actual[j], reserved[j]);
    classic.add(actual[j], reserved[j]);
  }

  AggregateResult& agg = result.aggregate;
  agg.subscription = subscription.finish(config.cost);
  agg.classic = classic.finish();
  agg.data_loss_bits = account_data_loss(actual, reserved, result.sampling_period_s);

  std::vector<double> maxima(streams);
  for (std::size_t s = 0; s < streams; ++s)
    maxima[s] = result.per_stream[s].whole_trace_max;
  agg.static_gbr = slice_modify(aggregate_requests(maxima), config.slice_capacity);
  agg.savings_vs_static = agg.static_gbr > 0.0 ? bandwidth_savings(reserved, agg.static_gbr) : 0.0;
  agg.requests = controller.take_log();
  return result;
}

} // namespace gbrtune
