#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gbrtune {

enum class Technique {
  StaticWorstCase,
  Max,
  ModifiedMax,
  MovingAverage,
  Ewma,
  LinReg,
};

inline constexpr std::array<Technique, 6> kAllTechniques = {
    Technique::StaticWorstCase, Technique::Max,  Technique::ModifiedMax,
    Technique::MovingAverage,   Technique::Ewma, Technique::LinReg,
};

/// Wire names: static_worst_case, max, modified_max, moving_average, ewma, linreg.
std::string_view technique_name(Technique t);
/// Throws ValidationError on an unknown name.
Technique parse_technique(std::string_view name);

struct PredictorConfig {
  Technique technique = Technique::ModifiedMax;
  /// Modified-Max lookback, in intervals.
  std::size_t window_t = 3;
  /// Lookback for moving_average and linreg, in intervals.
  std::size_t ma_window = 3;
  /// Weight of the newest interval maximum in ewma.
  double ewma_alpha = 0.3;
  /// Request issued before any interval has been observed. When unset the
  /// predictor needs a priming sample and uses twice its value.
  std::optional<double> initial_gbr;
  std::optional<double> capacity_cap;

  void validate() const;
};

/// One elapsed interval: the GBR that was in force and what the stream used.
struct IntervalObservation {
  std::uint64_t interval_index = 0;
  double predicted_gbr = 0.0;
  std::vector<double> samples;
};

struct PredictionRecord {
  std::string stream_id;
  std::uint64_t interval_index = 0;
  double requested_gbr = 0.0;
  Technique technique = Technique::Max;
  /// Served from initial_gbr because no history existed yet.
  bool bootstrap = false;
};

/// Facts about the stream the predictor may need at construction.
struct PredictorContext {
  /// Whole-trace maximum; required by static_worst_case.
  std::optional<double> whole_trace_max;
  /// First observed sample, used to derive a default initial_gbr.
  std::optional<double> priming_sample;
};

/// Single-stream GBR predictor. Call predict() to get the request for the
/// next interval, then observe_interval() once that interval has elapsed.
/// Not thread-safe; use one instance per stream.
class Predictor {
public:
  explicit Predictor(PredictorConfig config, PredictorContext context = {});

  /// Request for the next interval under the configured technique.
  double predict() const;

  double predict_max() const;
  double predict_modified_max() const;
  /// static_worst_case, moving_average, ewma or linreg. Throws for max and
  /// modified_max.
  double predict_baseline() const;

  /// True while no interval has been observed; predictions then come from
  /// initial_gbr (static_worst_case is never bootstrapping).
  bool bootstrapping() const noexcept;

  /// Records an elapsed interval. The GBR in force is taken to be predict()
  /// as of before the call. Throws ValidationError on an empty sample list.
  void observe_interval(std::span<const double> samples);
  /// As above with an explicit GBR in force.
  void observe_interval(std::span<const double> samples, double in_force_gbr);

  const std::deque<IntervalObservation>& history() const noexcept { return history_; }
  std::uint64_t intervals_observed() const noexcept { return next_index_; }
  double initial_gbr() const noexcept { return initial_gbr_; }
  const PredictorConfig& config() const noexcept { return config_; }

private:
  double clamp(double value) const;

  PredictorConfig config_;
  std::optional<double> whole_trace_max_;
  double initial_gbr_ = 0.0;

  std::deque<IntervalObservation> history_;
  // (interval index, interval maximum), newest last, at most ma_window long.
  std::deque<std::pair<std::uint64_t, double>> maxima_;
  std::optional<double> ewma_;
  std::uint64_t next_index_ = 0;
};

} // namespace gbrtune
