// Copyright 2026 The FTQL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ftql/schema.hpp"

#include <sstream>

namespace ftql {
namespace {

bool type_matches(const nlohmann::json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "number") return value.is_number();
  if (type == "integer") return value.is_number_integer();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

bool validate(const nlohmann::json& value, const nlohmann::json& schema,
              const std::string& path, std::string* error) {
  if (schema.contains("type")) {
    const auto& type = schema.at("type");
    bool ok = false;
    if (type.is_array()) {
      for (const auto& t : type) {
        if (type_matches(value, t.get<std::string>())) {
          ok = true;
          break;
        }
      }
    } else {
      ok = type_matches(value, type.get<std::string>());
    }
    if (!ok) {
      if (error) *error = path + ": type mismatch";
      return false;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& candidate : schema.at("enum")) {
      if (value == candidate) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      if (error) *error = path + ": value not in enum";
      return false;
    }
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema.at("required")) {
        if (!value.contains(key.get<std::string>())) {
          if (error) {
            *error = path + ": missing required key \"" +
                     key.get<std::string>() + "\"";
          }
          return false;
        }
      }
    }
    const nlohmann::json* props =
        schema.contains("properties") ? &schema.at("properties") : nullptr;
    bool closed = schema.contains("additionalProperties") &&
                  schema.at("additionalProperties").is_boolean() &&
                  !schema.at("additionalProperties").get<bool>();
    for (const auto& [key, child] : value.items()) {
      if (props != nullptr && props->contains(key)) {
        if (!validate(child, props->at(key), path + "." + key, error)) {
          return false;
        }
      } else if (closed) {
        if (error) *error = path + ": unexpected key \"" + key + "\"";
        return false;
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    const auto& item_schema = schema.at("items");
    for (std::size_t k = 0; k < value.size(); ++k) {
      if (!validate(value[k], item_schema,
                    path + "[" + std::to_string(k) + "]", error)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

bool matches_schema(const nlohmann::json& value, const nlohmann::json& schema,
                    std::string* error) {
  return validate(value, schema, "$", error);
}

bool matches_csv_schema(const std::string& csv_text,
                        const nlohmann::json& schema, std::string* error) {
  if (!schema.contains("columns")) {
    if (error) *error = "csv schema: missing \"columns\"";
    return false;
  }
  std::string expected_header;
  for (const auto& col : schema.at("columns")) {
    if (!expected_header.empty()) expected_header += ",";
    expected_header += col.get<std::string>();
  }
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) {
    if (error) *error = "csv: empty document";
    return false;
  }
  if (line != expected_header) {
    if (error) *error = "csv: header mismatch, got \"" + line + "\"";
    return false;
  }
  std::size_t fields = schema.at("columns").size();
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::size_t count = 1;
    for (char c : line) {
      if (c == ',') ++count;
    }
    if (count != fields) {
      if (error) {
        *error = "csv: row " + std::to_string(row) + " has " +
                 std::to_string(count) + " fields, expected " +
                 std::to_string(fields);
      }
      return false;
    }
  }
  return true;
}

}  // namespace ftql
