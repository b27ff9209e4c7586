#include "gbrtune/report.hpp"

#include "gbrtune/errors.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <string_view>

namespace gbrtune {

namespace {

void write_number(std::ostream& out, const Json& j) {
  char buf[64];
  std::to_chars_result r{};
  if (j.is_number_unsigned()) {
    r = std::to_chars(buf, buf + sizeof buf, j.get<std::uint64_t>());
  } else if (j.is_number_integer()) {
    r = std::to_chars(buf, buf + sizeof buf, j.get<std::int64_t>());
  } else {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      out << "null";
      return;
    }
    r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  }
  out.write(buf, r.ptr - buf);
}

void write_value(std::ostream& out, const Json& j, int indent, int depth) {
  const bool pretty = indent >= 0;
  auto newline = [&](int level) {
    if (pretty) {
      out << '\n';
      for (int i = 0; i < level * indent; ++i)
        out << ' ';
    }
  };

  if (j.is_object()) {
    if (j.empty()) {
      out << "{}";
      return;
    }
    out << '{';
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first)
        out << ',';
      first = false;
      newline(depth + 1);
      out << Json(it.key()).dump() << (pretty ? ": " : ":");
      write_value(out, it.value(), indent, depth + 1);
    }
    newline(depth);
    out << '}';
  } else if (j.is_array()) {
    if (j.empty()) {
      out << "[]";
      return;
    }
    out << '[';
    bool first = true;
    for (const auto& v : j) {
      if (!first)
        out << ',';
      first = false;
      newline(depth + 1);
      write_value(out, v, indent, depth + 1);
    }
    newline(depth);
    out << ']';
  } else if (j.is_number()) {
    write_number(out, j);
  } else {
    out << j.dump();
  }
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// Guards against typos in hand-written config files.
void reject_unknown_keys(const Json& j, std::string_view what,
                         std::initializer_list<std::string_view> known) {
  if (!j.is_object())
    throw ValidationError(std::string(what) + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool found = false;
    for (auto k : known)
      found = found || k == it.key();
    if (!found)
      throw ValidationError(std::string(what) + ": unknown key '" + it.key() + "'");
  }
}

double number_field(const Json& j, const char* key, double fallback) {
  if (!j.contains(key))
    return fallback;
  const Json& v = j.at(key);
  if (!v.is_number())
    throw ValidationError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::optional<double> optional_field(const Json& j, const char* key,
                                     std::optional<double> fallback) {
  if (!j.contains(key))
    return fallback;
  if (j.at(key).is_null())
    return std::nullopt;
  return number_field(j, key, 0.0);
}

std::uint64_t count_field(const Json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key))
    return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    throw ValidationError(std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

void put_subscription(Json& j, const SubscriptionMetrics& m) {
  j["over_magnitude"] = m.over_magnitude;
  j["over_count"] = m.over_count;
  j["over_fraction"] = m.over_fraction;
  j["under_magnitude"] = m.under_magnitude;
  j["under_count"] = m.under_count;
  j["under_fraction"] = m.under_fraction;
  j["total_cost"] = m.total_cost;
  j["reserved_total"] = m.reserved_total;
  j["actual_total"] = m.actual_total;
  j["sample_count"] = m.sample_count;
}

} // namespace

void write_json(std::ostream& out, const Json& doc, int indent) {
  write_value(out, doc, indent, 0);
  if (indent >= 0)
    out << '\n';
}

std::string dump_json(const Json& doc, int indent) {
  std::ostringstream out;
  write_json(out, doc, indent);
  return out.str();
}

Json to_json(const SubscriptionMetrics& m) {
  Json j = Json::object();
  put_subscription(j, m);
  return j;
}

Json to_json(const ClassicMetrics& m) {
  return Json{{"mae", m.mae}, {"mse", m.mse}, {"rmse", m.rmse}, {"mape", m.mape}, {"mda", m.mda}};
}

Json to_json(const PredictorConfig& c) {
  Json j = Json::object();
  j["technique"] = std::string(technique_name(c.technique));
  j["window_t"] = c.window_t;
  j["ma_window"] = c.ma_window;
  j["ewma_alpha"] = c.ewma_alpha;
  j["initial_gbr"] = optional_number(c.initial_gbr);
  j["capacity_cap"] = optional_number(c.capacity_cap);
  return j;
}

Json to_json(const SimConfig& c) {
  Json j = Json::object();
  j["interval"] = c.interval_s;
  j["warmup_intervals"] = c.warmup_intervals;
  j["slice_capacity"] = optional_number(c.slice_capacity);
  j["cost"] = Json{{"p_u", c.cost.p_u}, {"p_o", c.cost.p_o}};
  j["predictor"] = to_json(c.predictor);
  return j;
}

Json to_json(const SyntheticTraceConfig& c) {
  Json j = Json::object();
  j["duration"] = c.duration;
  j["sampling_period"] = c.sampling_period;
  j["base_rate"] = c.base_rate;
  j["diurnal_amplitude"] = c.diurnal_amplitude;
  j["diurnal_period"] = c.diurnal_period;
  j["burst_rate"] = c.burst_rate;
  j["burst_magnitude"] = c.burst_magnitude;
  j["burst_duration"] = c.burst_duration;
  j["noise_stddev"] = c.noise_stddev;
  j["seed"] = c.seed;
  return j;
}

Json to_json(const SimulationResult& r) {
  Json doc = Json::object();
  doc["schema"] = kSchemaVersion;
  doc["technique"] = std::string(technique_name(r.technique));
  doc["config"] = to_json(r.config);
  doc["sampling_period"] = r.sampling_period_s;
  doc["sample_count"] = r.sample_count;
  doc["samples_per_interval"] = r.samples_per_interval;
  doc["interval_count"] = r.interval_count;

  Json streams = Json::object();
  for (const auto& s : r.per_stream) {
    Json js = Json::object();
    js["whole_trace_max"] = s.whole_trace_max;
    js["bootstrap_intervals"] = s.bootstrap_intervals;
    put_subscription(js, s.subscription);
    js["classic"] = to_json(s.classic);
    js["predictions"] = s.predictions;
    streams[s.stream_id] = std::move(js);
  }
  doc["per_stream"] = std::move(streams);

  const AggregateResult& a = r.aggregate;
  Json agg = Json::object();
  put_subscription(agg, a.subscription);
  agg["data_loss_bits"] = a.data_loss_bits;
  agg["static_gbr"] = a.static_gbr;
  agg["savings_vs_static"] = a.savings_vs_static;
  agg["classic"] = to_json(a.classic);
  Json requests = Json::array();
  for (const auto& req : a.requests)
    requests.push_back(Json{{"interval_index", req.interval_index},
                            {"requested_gbr", req.requested_gbr},
                            {"granted_gbr", req.granted_gbr}});
  agg["requests"] = std::move(requests);
  doc["aggregate"] = std::move(agg);
  return doc;
}

PredictorConfig predictor_config_from_json(const Json& j) {
  reject_unknown_keys(j, "predictor config",
                      {"technique", "window_t", "ma_window", "ewma_alpha", "initial_gbr",
                       "capacity_cap"});
  PredictorConfig c;
  if (j.contains("technique")) {
    if (!j.at("technique").is_string())
      throw ValidationError("'technique' must be a string");
    c.technique = parse_technique(j.at("technique").get<std::string>());
  }
  c.window_t = count_field(j, "window_t", c.window_t);
  c.ma_window = count_field(j, "ma_window", c.ma_window);
  c.ewma_alpha = number_field(j, "ewma_alpha", c.ewma_alpha);
  c.initial_gbr = optional_field(j, "initial_gbr", c.initial_gbr);
  c.capacity_cap = optional_field(j, "capacity_cap", c.capacity_cap);
  c.validate();
  return c;
}

SimConfig sim_config_from_json(const Json& j) {
  reject_unknown_keys(j, "simulation config",
                      {"interval", "warmup_intervals", "slice_capacity", "cost", "predictor"});
  SimConfig c;
  c.interval_s = number_field(j, "interval", c.interval_s);
  c.warmup_intervals = count_field(j, "warmup_intervals", c.warmup_intervals);
  c.slice_capacity = optional_field(j, "slice_capacity", c.slice_capacity);
  if (j.contains("cost")) {
    const Json& cost = j.at("cost");
    reject_unknown_keys(cost, "cost", {"p_u", "p_o"});
    c.cost.p_u = number_field(cost, "p_u", c.cost.p_u);
    c.cost.p_o = number_field(cost, "p_o", c.cost.p_o);
  }
  if (j.contains("predictor"))
    c.predictor = predictor_config_from_json(j.at("predictor"));
  c.validate();
  return c;
}

SyntheticTraceConfig synthetic_config_from_json(const Json& j) {
  reject_unknown_keys(j, "synthetic config",
                      {"duration", "sampling_period", "base_rate", "diurnal_amplitude",
                       "diurnal_period", "burst_rate", "burst_magnitude", "burst_duration",
                       "noise_stddev", "seed"});
  SyntheticTraceConfig c;
  c.duration = number_field(j, "duration", c.duration);
  c.sampling_period = number_field(j, "sampling_period", c.sampling_period);
  c.base_rate = number_field(j, "base_rate", c.base_rate);
  c.diurnal_amplitude = number_field(j, "diurnal_amplitude", c.diurnal_amplitude);
  c.diurnal_period = number_field(j, "diurnal_period", c.diurnal_period);
  c.burst_rate = number_field(j, "burst_rate", c.burst_rate);
  c.burst_magnitude = number_field(j, "burst_magnitude", c.burst_magnitude);
  c.burst_duration = number_field(j, "burst_duration", c.burst_duration);
  c.noise_stddev = number_field(j, "noise_stddev", c.noise_stddev);
  c.seed = count_field(j, "seed", c.seed);
  c.validate();
  return c;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": invalid JSON: " + e.what());
  }
}

void write_qos_log(std::ostream& out, const SimulationResult& result) {
  for (const auto& req : result.aggregate.requests) {
    Json per_stream = Json::object();
    for (std::size_t s = 0; s < req.per_stream.size(); ++s)
      per_stream[result.per_stream[s].stream_id] = req.per_stream[s];
    Json line = Json::object();
    line["interval_index"] = req.interval_index;
    line["requested_gbr"] = req.requested_gbr;
    line["granted_gbr"] = req.granted_gbr;
    line["per_stream"] = std::move(per_stream);
    write_json(out, line, -1);
    out << '\n';
  }
}

void write_file_atomically(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out)
      throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path);
  }
}

} // namespace gbrtune
