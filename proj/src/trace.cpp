#include "gbrtune/trace.hpp"

#include "gbrtune/compensated_sum.hpp"
#include "gbrtune/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <string_view>

namespace gbrtune {

namespace {

constexpr std::string_view kCsvHeader = "timestamp_ms,bitrate_bps";

std::string line_prefix(std::size_t line) {
  return line == 0 ? std::string{} : "line " + std::to_string(line) + ": ";
}

template <typename T>
bool parse_whole(std::string_view field, T& out) {
  if (field.empty())
    return false;
  const char* first = field.data();
  const char* last = first + field.size();
  if (*first == '+')
    ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

// Uniform double in the open interval (0, 1) from the top 53 bits.
double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double exponential(std::mt19937_64& rng, double rate) {
  return -std::log(open_uniform(rng)) / rate;
}

// Box-Muller. std::normal_distribution is implementation defined, which
// would make generated traces differ between standard libraries.
class GaussianSource {
public:
  double next(std::mt19937_64& rng) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(open_uniform(rng)));
    const double theta = 2.0 * std::numbers::pi * open_uniform(rng);
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace

const char* to_string(TraceErrorKind kind) {
  switch (kind) {
  case TraceErrorKind::EmptyFile: return "EmptyFile";
  case TraceErrorKind::BadHeader: return "BadHeader";
  case TraceErrorKind::MalformedRow: return "MalformedRow";
  case TraceErrorKind::NegativeBitrate: return "NegativeBitrate";
  case TraceErrorKind::DuplicateTimestamp: return "DuplicateTimestamp";
  case TraceErrorKind::GapTooLarge: return "GapTooLarge";
  case TraceErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

TraceError::TraceError(TraceErrorKind kind, std::size_t line, const std::string& detail)
    : ValidationError(line_prefix(line) + detail), kind_(kind), line_(line) {}

std::int64_t period_to_ms(double period_s) {
  if (!std::isfinite(period_s) || period_s <= 0.0)
    throw TraceError(TraceErrorKind::InvalidArgument, 0,
                     "sampling period must be positive, got " + std::to_string(period_s));
  const double ms = period_s * 1000.0;
  const double rounded = std::round(ms);
  if (rounded < 1.0 || std::fabs(ms - rounded) > 1e-6)
    throw TraceError(TraceErrorKind::InvalidArgument, 0,
                     "sampling period must be a whole number of milliseconds");
  return static_cast<std::int64_t>(rounded);
}

std::int64_t BandwidthTrace::period_ms() const { return period_to_ms(sampling_period_s); }

bool BandwidthTrace::is_uniform() const {
  const std::int64_t step = period_ms();
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (samples[i].timestamp_ms - samples[i - 1].timestamp_ms != step)
      return false;
  return true;
}

std::vector<double> BandwidthTrace::bitrates() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples)
    out.push_back(s.bitrate_bps);
  return out;
}

BandwidthTrace parse_trace_csv(std::istream& in, std::string stream_id) {
  struct Row {
    BandwidthSample sample;
    std::size_t line;
  };

  std::string text;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::vector<Row> rows;

  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r')
      text.pop_back();
    if (!saw_header) {
      if (text != kCsvHeader)
        throw TraceError(TraceErrorKind::BadHeader, line_no,
                         "expected header '" + std::string(kCsvHeader) + "'");
      saw_header = true;
      continue;
    }
    if (text.empty())
      continue;

    const std::string_view view(text);
    const auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos)
      throw TraceError(TraceErrorKind::MalformedRow, line_no, "expected two fields");

    Row row{{}, line_no};
    if (!parse_whole(view.substr(0, comma), row.sample.timestamp_ms))
      throw TraceError(TraceErrorKind::MalformedRow, line_no, "bad timestamp");
    if (!parse_whole(view.substr(comma + 1), row.sample.bitrate_bps) ||
        !std::isfinite(row.sample.bitrate_bps))
      throw TraceError(TraceErrorKind::MalformedRow, line_no, "bad bitrate");
    if (row.sample.bitrate_bps < 0.0)
      throw TraceError(TraceErrorKind::NegativeBitrate, line_no,
                       "negative bitrate " + std::string(view.substr(comma + 1)));
    rows.push_back(row);
  }

  if (rows.empty())
    throw TraceError(TraceErrorKind::EmptyFile, line_no, "no samples");

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.sample.timestamp_ms < b.sample.timestamp_ms;
  });

  BandwidthTrace trace;
  trace.stream_id = std::move(stream_id);
  trace.samples.reserve(rows.size());
  std::int64_t min_step = 0;
  std::int64_t max_step = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) {
      const std::int64_t step = rows[i].sample.timestamp_ms - rows[i - 1].sample.timestamp_ms;
      if (step == 0)
        throw TraceError(TraceErrorKind::DuplicateTimestamp,
                         std::max(rows[i].line, rows[i - 1].line),
                         "duplicate timestamp " + std::to_string(rows[i].sample.timestamp_ms));
      min_step = (min_step == 0) ? step : std::min(min_step, step);
      max_step = std::max(max_step, step);
    }
    trace.samples.push_back(rows[i].sample);
  }

  trace.sampling_period_s = min_step == 0 ? 1.0 : static_cast<double>(min_step) / 1000.0;
  if (min_step > 0 && max_step > kMaxGapPeriods * min_step)
    throw TraceError(TraceErrorKind::GapTooLarge, 0,
                     "gap of " + std::to_string(max_step) + " ms exceeds " +
                         std::to_string(kMaxGapPeriods) + " sampling periods");
  return trace;
}

BandwidthTrace load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open trace file " + path);
  std::string id = path;
  if (const auto slash = id.find_last_of('/'); slash != std::string::npos)
    id.erase(0, slash + 1);
  if (const auto dot = id.rfind('.'); dot != std::string::npos && dot > 0)
    id.erase(dot);
  try {
    BandwidthTrace parsed = parse_trace_csv(in, id);
    return parsed.is_uniform() ? parsed : resample_trace(parsed, parsed.sampling_period_s);
  } catch (const TraceError& e) {
    throw TraceError(e.kind(), 0, path + ": " + e.what());
  }
}

void write_trace_csv(std::ostream& out, const BandwidthTrace& trace) {
  out << kCsvHeader << '\n';
  // Fixed notation of DBL_MAX needs 309 digits.
  char buf[400];
  char* const end = buf + sizeof buf - 1;
  for (const auto& s : trace.samples) {
    auto r = std::to_chars(buf, end, s.timestamp_ms);
    *r.ptr++ = ',';
    r = std::to_chars(r.ptr, end, s.bitrate_bps, std::chars_format::fixed);
    *r.ptr++ = '\n';
    out.write(buf, r.ptr - buf);
  }
}

BandwidthTrace resample_trace(const BandwidthTrace& trace, double period_s) {
  const std::int64_t step = period_to_ms(period_s);
  if (trace.samples.empty())
    throw TraceError(TraceErrorKind::EmptyFile, 0, "cannot resample an empty trace");

  const std::int64_t first = trace.samples.front().timestamp_ms;
  const std::int64_t span = trace.samples.back().timestamp_ms - first;
  const std::int64_t points = (span + step - 1) / step + 1;

  BandwidthTrace out;
  out.stream_id = trace.stream_id;
  out.sampling_period_s = period_s;
  out.samples.reserve(static_cast<std::size_t>(points));

  std::size_t src = 0;
  for (std::int64_t k = 0; k < points; ++k) {
    const std::int64_t t = first + k * step;
    while (src + 1 < trace.samples.size() && trace.samples[src + 1].timestamp_ms <= t)
      ++src;
    out.samples.push_back({t, trace.samples[src].bitrate_bps});
  }
  return out;
}

TraceStats trace_stats(std::span<const double> bitrates) {
  if (bitrates.empty())
    throw TraceError(TraceErrorKind::EmptyFile, 0, "statistics of an empty trace");
  TraceStats stats;
  stats.min = bitrates.front();
  stats.max = bitrates.front();
  CompensatedSum total;
  for (double b : bitrates) {
    stats.min = std::min(stats.min, b);
    stats.max = std::max(stats.max, b);
    total += b;
  }
  stats.sample_count = bitrates.size();
  // Rounding can push the mean a hair outside [min, max] on constant input.
  stats.mean = std::clamp(total.value() / static_cast<double>(bitrates.size()), stats.min,
                          stats.max);
  return stats;
}

TraceStats trace_stats(const BandwidthTrace& trace) {
  const auto rates = trace.bitrates();
  return trace_stats(std::span<const double>(rates));
}

void SyntheticTraceConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok)
      throw ValidationError(std::string("synthetic config: ") + what);
  };
  const double fields[] = {duration,      sampling_period, base_rate,       diurnal_amplitude,
                           diurnal_period, burst_rate,     burst_magnitude, burst_duration,
                           noise_stddev};
  for (double f : fields)
    require(std::isfinite(f) && f >= 0.0, "rates and durations must be finite and >= 0");
  require(sampling_period > 0.0, "sampling_period must be > 0");
  require(diurnal_period > 0.0, "diurnal_period must be > 0");
  require(duration >= sampling_period, "duration must be >= sampling_period");
  (void)period_to_ms(sampling_period);
}

BandwidthTrace generate_synthetic_trace(const SyntheticTraceConfig& config, std::string stream_id) {
  config.validate();
  const std::int64_t step_ms = period_to_ms(config.sampling_period);
  const auto n = static_cast<std::size_t>(std::floor(config.duration / config.sampling_period + 1e-9));

  std::mt19937_64 rng(config.seed);

  // Burst level per sample via a difference array over [start, start + duration).
  std::vector<double> burst_delta(n + 1, 0.0);
  if (config.burst_rate > 0.0 && config.burst_magnitude > 0.0 && config.burst_duration > 0.0) {
    const double per_second = config.burst_rate / 3600.0;
    for (double t = exponential(rng, per_second); t < config.duration;
         t += exponential(rng, per_second)) {
      const auto begin = static_cast<std::size_t>(std::ceil(t / config.sampling_period));
      const auto end = std::min(
          n, static_cast<std::size_t>(std::ceil((t + config.burst_duration) / config.sampling_period)));
      if (begin < end) {
        burst_delta[begin] += config.burst_magnitude;
        burst_delta[end] -= config.burst_magnitude;
      }
    }
  }

  BandwidthTrace trace;
  trace.stream_id = std::move(stream_id);
  trace.sampling_period_s = config.sampling_period;
  trace.samples.reserve(n);

  GaussianSource gauss;
  double burst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    burst += burst_delta[i];
    const double t = static_cast<double>(i) * config.sampling_period;
    double value = config.base_rate +
                   config.diurnal_amplitude * std::sin(2.0 * std::numbers::pi * t / config.diurnal_period) +
                   burst;
    if (config.noise_stddev > 0.0)
      value += config.noise_stddev * gauss.next(rng);
    trace.samples.push_back({static_cast<std::int64_t>(i) * step_ms, std::max(0.0, std::round(value))});
  }
  return trace;
}

} // namespace gbrtune
