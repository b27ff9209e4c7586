#include "gbrtune/simulator.hpp"

#include <algorithm>

namespace gbrtune {

// The loop as the application runs it live: at the start of each interval
// every stream predicts, the slice is asked for the sum, and the interval's
// samples are charged against what was granted.
SimulationResult run_simulation_serial(std::span<const BandwidthTrace> traces,
                                       const SimConfig& config) {
  const detail::SimLayout layout = detail::plan_simulation(traces, config);
  const std::size_t streams = layout.order.size();
  const std::size_t n = layout.sample_count;
  const std::size_t spi = layout.samples_per_interval;

  SimulationResult result;
  result.technique = config.predictor.technique;
  result.config = config;
  result.sampling_period_s = traces.front().sampling_period_s;
  result.sample_count = n;
  result.samples_per_interval = spi;
  result.interval_count = layout.interval_count;

  std::vector<std::vector<double>> rates;
  std::vector<Predictor> predictors;
  std::vector<SubscriptionAccumulator> stream_subscription(streams);
  std::vector<ClassicAccumulator> stream_classic(streams);
  for (std::size_t s = 0; s < streams; ++s) {
    const BandwidthTrace& trace = traces[layout.order[s]];
    rates.push_back(trace.bitrates());
    StreamResult sr;
    sr.stream_id = trace.stream_id;
    sr.whole_trace_max = *std::max_element(rates[s].begin(), rates[s].end());
    predictors.emplace_back(config.predictor, PredictorContext{sr.whole_trace_max, rates[s].front()});
    result.per_stream.push_back(std::move(sr));
  }

  MockSliceController controller(config.slice_capacity);
  SubscriptionAccumulator subscription;
  ClassicAccumulator classic;
  std::vector<double> actual_scored;
  std::vector<double> granted_scored;
  std::vector<double> requests(streams);

  for (std::size_t k = 0; k < layout.interval_count; ++k) {
    for (std::size_t s = 0; s < streams; ++s) {
      requests[s] = predictors[s].predict();
      if (predictors[s].bootstrapping())
        ++result.per_stream[s].bootstrap_intervals;
      result.per_stream[s].predictions.push_back(requests[s]);
    }
    const double granted = controller.modify(k, requests);

    const std::size_t begin = k * spi;
    const std::size_t end = std::min(n, begin + spi);
    if (k >= config.warmup_intervals) {
      std::vector<double> column(streams);
      for (std::size_t i = begin; i < end; ++i) {
        for (std::size_t s = 0; s < streams; ++s) {
          stream_subscription[s].add(rates[s][i], requests[s]);
          stream_classic[s].add(rates[s][i], requests[s]);
          column[s] = rates[s][i];
        }
        const double actual = aggregate_requests(column);
        subscription.add(actual, granted);
        classic.add(actual, granted);
        actual_scored.push_back(actual);
        granted_scored.push_back(granted);
      }
    }
    for (std::size_t s = 0; s < streams; ++s)
      predictors[s].observe_interval(std::span<const double>(rates[s]).subspan(begin, end - begin),
                                     requests[s]);
  }

  std::vector<double> maxima;
  for (std::size_t s = 0; s < streams; ++s) {
    result.per_stream[s].subscription = stream_subscription[s].finish(config.cost);
    result.per_stream[s].classic = stream_classic[s].finish();
    maxima.push_back(result.per_stream[s].whole_trace_max);
  }

  AggregateResult& agg = result.aggregate;
  agg.subscription = subscription.finish(config.cost);
  agg.classic = classic.finish();
  agg.data_loss_bits = account_data_loss(actual_scored, granted_scored, result.sampling_period_s);
  agg.static_gbr = slice_modify(aggregate_requests(maxima), config.slice_capacity);
  agg.savings_vs_static =
      agg.static_gbr > 0.0 ? bandwidth_savings(granted_scored, agg.static_gbr) : 0.0;
  agg.requests = controller.take_log();
  return result;
}

} // namespace gbrtune
