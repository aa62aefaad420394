#pragma once

#include <string>

#include "strata/core/error.hpp"

#include <json.hpp>

namespace strata {

// Insertion-ordered JSON keeps every serialized artifact byte-stable.
using Json = nlohmann::ordered_json;

inline const Json& require_field(const Json& obj, const std::string& key,
                                 const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::SchemaError, where + ": missing required field '" + key + "'");
  }
  return obj.at(key);
}

inline std::string require_string(const Json& obj, const std::string& key,
                                  const std::string& where) {
  const Json& v = require_field(obj, key, where);
  if (!v.is_string()) {
    throw Error(ErrorCode::SchemaError, where + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

inline Json parse_json(const std::string& text, const std::string& where) {
  Json parsed = Json::parse(text, nullptr, false);
  if (parsed.is_discarded()) {
    throw Error(ErrorCode::SchemaError, where + ": invalid JSON");
  }
  return parsed;
}

}  // namespace strata
