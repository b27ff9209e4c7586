#pragma once

// Small JSON Schema checker covering the keywords used by docs/schema:
// type, const, enum, required, properties, additionalProperties,
// propertyNames, items, minItems, minimum, maximum, exclusiveMinimum and
// local "#/$defs/..." references.

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace schema_check {

using nlohmann::json;

inline json load(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

class Checker {
public:
  explicit Checker(json root) : root_(std::move(root)) {}

  std::vector<std::string> errors(const json& doc) const {
    std::vector<std::string> out;
    check(root_, doc, "$", out);
    return out;
  }

private:
  static bool has_type(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    return false;
  }

  const json& resolve(const json& schema) const {
    const std::string ref = schema.at("$ref");
    const std::string prefix = "#/$defs/";
    if (ref.rfind(prefix, 0) != 0)
      throw std::runtime_error("unsupported $ref " + ref);
    return root_.at("$defs").at(ref.substr(prefix.size()));
  }

  void check(const json& s, const json& v, const std::string& at,
             std::vector<std::string>& out) const {
    if (s.contains("$ref"))
      return check(resolve(s), v, at, out);

    if (s.contains("type")) {
      bool ok = false;
      if (s["type"].is_array()) {
        for (const auto& t : s["type"])
          ok = ok || has_type(v, t);
      } else {
        ok = has_type(v, s["type"]);
      }
      if (!ok) {
        out.push_back(at + ": wrong type");
        return;
      }
    }
    if (s.contains("const") && v != s["const"])
      out.push_back(at + ": const mismatch");
    if (s.contains("enum") && std::find(s["enum"].begin(), s["enum"].end(), v) == s["enum"].end())
      out.push_back(at + ": not in enum");

    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>())
        out.push_back(at + ": below minimum");
      if (s.contains("maximum") && x > s["maximum"].get<double>())
        out.push_back(at + ": above maximum");
      if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
        out.push_back(at + ": not above exclusiveMinimum");
    }

    if (v.is_object()) {
      if (s.contains("required"))
        for (const auto& k : s["required"])
          if (!v.contains(k.get<std::string>()))
            out.push_back(at + ": missing " + k.get<std::string>());
      for (const auto& [k, child] : v.items()) {
        if (s.contains("propertyNames"))
          check(s["propertyNames"], json(k), at + "." + k + "(name)", out);
        if (s.contains("properties") && s["properties"].contains(k)) {
          check(s["properties"][k], child, at + "." + k, out);
        } else if (s.contains("additionalProperties")) {
          const auto& extra = s["additionalProperties"];
          if (extra.is_boolean()) {
            if (!extra.get<bool>())
              out.push_back(at + ": unexpected key " + k);
          } else {
            check(extra, child, at + "." + k, out);
          }
        }
      }
    }

    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
        out.push_back(at + ": too few items");
      if (s.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i)
          check(s["items"], v[i], at + "[" + std::to_string(i) + "]", out);
    }
  }

  json root_;
};

} // namespace schema_check
