#include "gbrtune/cost.hpp"

#include "gbrtune/errors.hpp"

#include <cmath>
#include <string>

namespace gbrtune {

namespace {

void require_rate(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0)
    throw ValidationError(std::string(what) + " must be finite and >= 0");
}

void require_series(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ValidationError("series length mismatch: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  if (a.empty())
    throw ValidationError("empty series");
}

int sign(double x) { return (x > 0.0) - (x < 0.0); }

} // namespace

void CostParams::validate() const {
  require_rate(p_u, "p_u");
  require_rate(p_o, "p_o");
}

SubscriptionFlags subscription_flags(double actual, double gbr) {
  require_rate(actual, "actual bitrate");
  require_rate(gbr, "gbr");
  return {gbr > actual ? 1 : 0, actual > gbr ? 1 : 0};
}

void SubscriptionAccumulator::add(double actual, double gbr) {
  const auto flags = subscription_flags(actual, gbr);
  if (flags.over) {
    over_ += actual - gbr;
    ++over_count_;
  } else if (flags.under) {
    under_ += gbr - actual;
    ++under_count_;
  }
  reserved_ += gbr;
  actual_ += actual;
  ++count_;
}

SubscriptionMetrics SubscriptionAccumulator::finish(const CostParams& params) const {
  SubscriptionMetrics m;
  m.over_magnitude = over_.value();
  m.over_count = over_count_;
  m.under_magnitude = under_.value();
  m.under_count = under_count_;
  m.sample_count = count_;
  if (count_ > 0) {
    m.over_fraction = static_cast<double>(over_count_) / static_cast<double>(count_);
    m.under_fraction = static_cast<double>(under_count_) / static_cast<double>(count_);
  }
  m.total_cost = params.p_u * m.under_magnitude + params.p_o * m.over_magnitude;
  m.reserved_total = reserved_.value();
  m.actual_total = actual_.value();
  return m;
}

void ClassicAccumulator::add(double actual, double forecast) {
  const double err = forecast - actual;
  abs_err_ += std::fabs(err);
  sq_err_ += err * err;
  if (actual != 0.0) {
    pct_err_ += std::fabs(err) / std::fabs(actual);
    ++pct_terms_;
  }
  if (count_ > 0) {
    if (sign(actual - prev_actual_) == sign(forecast - prev_actual_))
      ++direction_hits_;
    ++direction_steps_;
  }
  prev_actual_ = actual;
  ++count_;
}

ClassicMetrics ClassicAccumulator::finish() const {
  if (count_ < 2)
    throw ValidationError("classic metrics need at least two points");
  const auto n = static_cast<double>(count_);
  ClassicMetrics m;
  m.mae = abs_err_.value() / n;
  m.mse = sq_err_.value() / n;
  m.rmse = std::sqrt(m.mse);
  m.mape = pct_terms_ == 0 ? 0.0 : pct_err_.value() / static_cast<double>(pct_terms_);
  m.mda = static_cast<double>(direction_hits_) / static_cast<double>(direction_steps_);
  return m;
}

SubscriptionMetrics subscription_metrics(std::span<const double> actual,
                                         std::span<const double> gbr,
                                         const CostParams& params) {
  params.validate();
  require_series(actual, gbr);
  SubscriptionAccumulator acc;
  for (std::size_t i = 0; i < actual.size(); ++i)
    acc.add(actual[i], gbr[i]);
  return acc.finish(params);
}

double total_cost(std::span<const double> actual, std::span<const double> gbr,
                  const CostParams& params) {
  return subscription_metrics(actual, gbr, params).total_cost;
}

ClassicMetrics classic_metrics(std::span<const double> actual, std::span<const double> forecast) {
  require_series(actual, forecast);
  ClassicAccumulator acc;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (!std::isfinite(actual[i]) || !std::isfinite(forecast[i]))
      throw ValidationError("classic metrics need finite inputs");
    acc.add(actual[i], forecast[i]);
  }
  return acc.finish();
}

double bandwidth_savings(std::span<const double> gbr, double static_gbr) {
  if (!std::isfinite(static_gbr) || static_gbr <= 0.0)
    throw ValidationError("static_gbr must be > 0");
  if (gbr.empty())
    throw ValidationError("empty series");
  CompensatedSum reserved;
  for (double g : gbr)
    reserved += g;
  return 1.0 - reserved.value() / (static_cast<double>(gbr.size()) * static_gbr);
}

} // namespace gbrtune
