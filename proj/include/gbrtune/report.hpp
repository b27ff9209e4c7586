#pragma once

#include "gbrtune/simulator.hpp"
#include "gbrtune/trace.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace gbrtune {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "v1";

/// Serializes `doc` with every floating-point number printed to 17
/// significant digits, so equal values always produce equal bytes.
void write_json(std::ostream& out, const Json& doc, int indent = 2);
std::string dump_json(const Json& doc, int indent = 2);

Json to_json(const SubscriptionMetrics& m);
Json to_json(const ClassicMetrics& m);
Json to_json(const PredictorConfig& c);
Json to_json(const SimConfig& c);
Json to_json(const SyntheticTraceConfig& c);
Json to_json(const SimulationResult& r);

/// Strict readers: unknown keys and out-of-range values raise
/// ValidationError; missing keys keep their defaults.
PredictorConfig predictor_config_from_json(const Json& j);
SimConfig sim_config_from_json(const Json& j);
SyntheticTraceConfig synthetic_config_from_json(const Json& j);

/// Reads a JSON file. Throws IoError when unreadable, ValidationError when
/// not valid JSON.
Json read_json_file(const std::string& path);

/// One JSON object per slice_modify call:
/// {interval_index, requested_gbr, granted_gbr, per_stream: {id: gbr}}.
void write_qos_log(std::ostream& out, const SimulationResult& result);

/// Writes via a temporary file in the same directory and renames it into
/// place. Throws IoError on failure.
void write_file_atomically(const std::string& path, const std::string& contents);

} // namespace gbrtune
