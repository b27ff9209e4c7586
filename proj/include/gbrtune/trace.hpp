#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gbrtune {

struct BandwidthSample {
  std::int64_t timestamp_ms = 0;
  double bitrate_bps = 0.0;

  friend bool operator==(const BandwidthSample&, const BandwidthSample&) = default;
};

/// Per-stream bitrate time series. Values are immutable once built; the
/// simulator and predictors only read them.
struct BandwidthTrace {
  std::string stream_id;
  double sampling_period_s = 1.0;
  std::vector<BandwidthSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  std::int64_t period_ms() const;
  bool is_uniform() const;
  std::vector<double> bitrates() const;

  friend bool operator==(const BandwidthTrace&, const BandwidthTrace&) = default;
};

struct TraceStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::size_t sample_count = 0;
};

/// Traces whose largest gap exceeds this many sampling periods are rejected
/// at parse time instead of being filled.
inline constexpr std::int64_t kMaxGapPeriods = 100;

/// Converts a period in seconds to whole milliseconds. Throws TraceError when
/// the period is not positive or not a whole number of milliseconds.
std::int64_t period_to_ms(double period_s);

/// Reads `timestamp_ms,bitrate_bps` CSV. Rows may be out of order; they are
/// sorted. The sampling period is inferred as the smallest timestamp step
/// (1 s for a single-sample file). Samples are not resampled here.
BandwidthTrace parse_trace_csv(std::istream& in, std::string stream_id = {});

/// parse_trace_csv followed by resample_trace at the inferred period.
BandwidthTrace load_trace_csv(const std::string& path);

/// Writes the CSV form. Bitrates use shortest round-trip formatting, so
/// parse_trace_csv(write_trace_csv(t)) reproduces `t` exactly.
void write_trace_csv(std::ostream& out, const BandwidthTrace& trace);

/// Last-observation-carried-forward onto a uniform grid anchored at the first
/// timestamp. The grid extends to the first point at or past the last sample.
BandwidthTrace resample_trace(const BandwidthTrace& trace, double period_s);

TraceStats trace_stats(const BandwidthTrace& trace);
TraceStats trace_stats(std::span<const double> bitrates);

struct SyntheticTraceConfig {
  double duration = 86400.0;
  double sampling_period = 1.0;
  double base_rate = 4.0e6;
  double diurnal_amplitude = 2.0e6;
  double diurnal_period = 86400.0;
  double burst_rate = 8.0;         // expected bursts per hour
  double burst_magnitude = 6.0e6;
  double burst_duration = 1200.0;
  double noise_stddev = 3.0e4;
  std::uint64_t seed = 42;

  void validate() const;
};

/// bitrate(t) = max(0, base + amplitude*sin(2*pi*t/period) + bursts(t) + noise(t)),
/// rounded to whole bits per second. Bursts are rectangular pulses with
/// Poisson arrivals and overlapping pulses add. A pure function of `config`.
BandwidthTrace generate_synthetic_trace(const SyntheticTraceConfig& config,
                                        std::string stream_id = "synthetic");

} // namespace gbrtune
