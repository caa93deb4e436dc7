#pragma once

// Minimal JSON Schema checker covering the keywords used in docs/schemas.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

namespace forge3d::testing {

class SchemaSet {
public:
  explicit SchemaSet(const std::filesystem::path& dir) {
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
      if (e.path().extension() != ".json") continue;
      std::ifstream in(e.path());
      docs_[e.path().filename().string()] = nlohmann::json::parse(in);
    }
  }

  /// Returns one message per violation; empty when `value` conforms.
  std::vector<std::string> validate(const std::string& file, const nlohmann::json& value) const {
    std::vector<std::string> errors;
    check(file, docs_.at(file), value, "$", errors);
    return errors;
  }

  std::size_t size() const { return docs_.size(); }

private:
  using json = nlohmann::json;

  const json& resolve(const std::string& base, const std::string& ref, std::string& file) const {
    const auto hash = ref.find('#');
    file = hash == 0 ? base : ref.substr(0, hash);
    const json* node = &docs_.at(file);
    if (hash != std::string::npos && hash + 1 < ref.size()) {
      node = &node->at(json::json_pointer(ref.substr(hash + 1)));
    }
    return *node;
  }

  static bool has_type(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "number") return v.is_number();
    if (t == "integer") {
      return v.is_number_integer() || (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
    }
    return false;
  }

  void check(const std::string& file, const json& s, const json& v, const std::string& at,
             std::vector<std::string>& errors) const {
    if (s.is_boolean()) {
      if (!s.get<bool>()) errors.push_back(at + ": not allowed");
      return;
    }
    if (s.contains("$ref")) {
      std::string target;
      const auto& sub = resolve(file, s.at("$ref").get<std::string>(), target);
      check(target, sub, v, at, errors);
    }
    if (s.contains("type")) {
      const auto& t = s.at("type");
      bool ok = false;
      if (t.is_string()) ok = has_type(v, t.get<std::string>());
      else for (const auto& x : t) ok = ok || has_type(v, x.get<std::string>());
      if (!ok) {
        errors.push_back(at + ": expected type " + t.dump() + ", got " + v.type_name());
        return;
      }
    }
    if (s.contains("const") && v != s.at("const")) errors.push_back(at + ": expected " + s.at("const").dump());
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s.at("enum")) found = found || e == v;
      if (!found) errors.push_back(at + ": " + v.dump() + " not in enum");
    }
    if (s.contains("anyOf")) {
      bool any = false;
      for (const auto& alt : s.at("anyOf")) {
        std::vector<std::string> sub;
        check(file, alt, v, at, sub);
        any = any || sub.empty();
      }
      if (!any) errors.push_back(at + ": matches no anyOf branch");
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s.at("minimum").get<double>()) errors.push_back(at + ": below minimum");
      if (s.contains("maximum") && x > s.at("maximum").get<double>()) errors.push_back(at + ": above maximum");
      if (s.contains("exclusiveMinimum") && x <= s.at("exclusiveMinimum").get<double>()) {
        errors.push_back(at + ": not above exclusiveMinimum");
      }
    }
    if (v.is_string()) {
      const auto& str = v.get_ref<const std::string&>();
      if (s.contains("minLength") && str.size() < s.at("minLength").get<std::size_t>()) {
        errors.push_back(at + ": too short");
      }
      if (s.contains("pattern") && !std::regex_search(str, std::regex(s.at("pattern").get<std::string>()))) {
        errors.push_back(at + ": " + str + " does not match pattern");
      }
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s.at("minItems").get<std::size_t>()) {
        errors.push_back(at + ": too few items");
      }
      if (s.contains("maxItems") && v.size() > s.at("maxItems").get<std::size_t>()) {
        errors.push_back(at + ": too many items");
      }
      if (s.contains("items")) {
        for (std::size_t i = 0; i < v.size(); ++i) check(file, s.at("items"), v[i], at + "[" + std::to_string(i) + "]", errors);
      }
    }
    if (v.is_object()) {
      if (s.contains("required")) {
        for (const auto& r : s.at("required")) {
          if (!v.contains(r.get<std::string>())) errors.push_back(at + ": missing " + r.get<std::string>());
        }
      }
      if (s.contains("minProperties") && v.size() < s.at("minProperties").get<std::size_t>()) {
        errors.push_back(at + ": too few properties");
      }
      if (s.contains("maxProperties") && v.size() > s.at("maxProperties").get<std::size_t>()) {
        errors.push_back(at + ": too many properties");
      }
      const json* props = s.contains("properties") ? &s.at("properties") : nullptr;
      for (const auto& [k, x] : v.items()) {
        const auto path = at + "." + k;
        if (props != nullptr && props->contains(k)) check(file, props->at(k), x, path, errors);
        else if (s.contains("additionalProperties")) check(file, s.at("additionalProperties"), x, path, errors);
      }
    }
  }

  std::map<std::string, json> docs_;
};

} // namespace forge3d::testing
