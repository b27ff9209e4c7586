#include "gbrtune/predictors.hpp"

#include "gbrtune/compensated_sum.hpp"
#include "gbrtune/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gbrtune {

std::string_view technique_name(Technique t) {
  switch (t) {
  case Technique::StaticWorstCase: return "static_worst_case";
  case Technique::Max: return "max";
  case Technique::ModifiedMax: return "modified_max";
  case Technique::MovingAverage: return "moving_average";
  case Technique::Ewma: return "ewma";
  case Technique::LinReg: return "linreg";
  }
  return "unknown";
}

Technique parse_technique(std::string_view name) {
  for (Technique t : kAllTechniques)
    if (technique_name(t) == name)
      return t;
  throw ValidationError("unknown technique '" + std::string(name) + "'");
}

void PredictorConfig::validate() const {
  auto non_negative = [](const std::optional<double>& v) {
    return !v || (std::isfinite(*v) && *v >= 0.0);
  };
  if (window_t < 1)
    throw ValidationError("window_t must be >= 1");
  if (ma_window < 1)
    throw ValidationError("ma_window must be >= 1");
  if (!(ewma_alpha > 0.0 && ewma_alpha <= 1.0))
    throw ValidationError("ewma_alpha must be in (0, 1]");
  if (!non_negative(initial_gbr))
    throw ValidationError("initial_gbr must be finite and >= 0");
  if (!non_negative(capacity_cap))
    throw ValidationError("capacity_cap must be finite and >= 0");
}

Predictor::Predictor(PredictorConfig config, PredictorContext context)
    : config_(std::move(config)), whole_trace_max_(context.whole_trace_max) {
  config_.validate();
  if (config_.technique == Technique::StaticWorstCase && !whole_trace_max_)
    throw ValidationError("static_worst_case needs the whole-trace maximum");
  if (config_.initial_gbr)
    initial_gbr_ = *config_.initial_gbr;
  else if (context.priming_sample)
    initial_gbr_ = 2.0 * *context.priming_sample;
  else
    throw ValidationError("initial_gbr is unset and no priming sample is available");
}

double Predictor::clamp(double value) const {
  const double upper = config_.capacity_cap.value_or(std::numeric_limits<double>::infinity());
  return std::clamp(value, 0.0, upper);
}

bool Predictor::bootstrapping() const noexcept {
  return config_.technique != Technique::StaticWorstCase && history_.empty();
}

double Predictor::predict() const {
  switch (config_.technique) {
  case Technique::Max: return predict_max();
  case Technique::ModifiedMax: return predict_modified_max();
  default: return predict_baseline();
  }
}

double Predictor::predict_max() const {
  if (history_.empty())
    return clamp(initial_gbr_);
  const auto& last = history_.back().samples;
  return clamp(*std::max_element(last.begin(), last.end()));
}

double Predictor::predict_modified_max() const {
  if (history_.empty())
    return clamp(initial_gbr_);

  const auto& last = history_.back().samples;
  const double baseline = *std::max_element(last.begin(), last.end());

  // Any oversubscribed sample in the window marks an upward trend.
  CompensatedSum excess;
  std::size_t over = 0;
  for (const auto& obs : history_)
    for (double s : obs.samples)
      if (s > obs.predicted_gbr) {
        excess += s - obs.predicted_gbr;
        ++over;
      }
  if (over > 0)
    return clamp(baseline + excess.value() / static_cast<double>(over));

  CompensatedSum shortfall;
  std::size_t under = 0;
  for (const auto& obs : history_)
    for (double s : obs.samples)
      if (s < obs.predicted_gbr) {
        shortfall += obs.predicted_gbr - s;
        ++under;
      }
  const double mean_under = under == 0 ? 0.0 : shortfall.value() / static_cast<double>(under);
  return clamp(baseline - mean_under);
}

double Predictor::predict_baseline() const {
  switch (config_.technique) {
  case Technique::StaticWorstCase:
    return clamp(*whole_trace_max_);
  case Technique::Max:
  case Technique::ModifiedMax:
    throw ValidationError("predict_baseline called for " +
                          std::string(technique_name(config_.technique)));
  default:
    break;
  }
  if (maxima_.empty())
    return clamp(initial_gbr_);

  switch (config_.technique) {
  case Technique::MovingAverage: {
    CompensatedSum total;
    for (const auto& m : maxima_)
      total += m.second;
    return clamp(total.value() / static_cast<double>(maxima_.size()));
  }
  case Technique::Ewma:
    return clamp(*ewma_);
  case Technique::LinReg: {
    const auto n = static_cast<double>(maxima_.size());
    if (maxima_.size() == 1)
      return clamp(maxima_.front().second);
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& [x, y] : maxima_) {
      mean_x += static_cast<double>(x);
      mean_y += y;
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [x, y] : maxima_) {
      const double dx = static_cast<double>(x) - mean_x;
      sxx += dx * dx;
      sxy += dx * (y - mean_y);
    }
    const double slope = sxy / sxx;
    const double next_x = static_cast<double>(maxima_.back().first + 1);
    return clamp(mean_y + slope * (next_x - mean_x));
  }
  default:
    return clamp(initial_gbr_);
  }
}

void Predictor::observe_interval(std::span<const double> samples) {
  observe_interval(samples, predict());
}

void Predictor::observe_interval(std::span<const double> samples, double in_force_gbr) {
  if (samples.empty())
    throw ValidationError("EmptyInterval: interval has no samples");

  IntervalObservation obs;
  obs.interval_index = next_index_++;
  obs.predicted_gbr = in_force_gbr;
  obs.samples.assign(samples.begin(), samples.end());
  const double peak = *std::max_element(samples.begin(), samples.end());

  history_.push_back(std::move(obs));
  while (history_.size() > config_.window_t)
    history_.pop_front();

  maxima_.emplace_back(history_.back().interval_index, peak);
  while (maxima_.size() > config_.ma_window)
    maxima_.pop_front();

  ewma_ = ewma_ ? config_.ewma_alpha * peak + (1.0 - config_.ewma_alpha) * *ewma_ : peak;
}

} // namespace gbrtune
