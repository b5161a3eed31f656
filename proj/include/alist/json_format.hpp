// Copyright 2026 The Alist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON wire format for alists.
//
//   * reserved keys (h v s p o t l x c u d) are the attribute symbols;
//   * keys and string values starting with '?' or '$' are variables;
//   * objects are nested alists, arrays are flat value lists;
//   * bindings travel under the top-level key "__bindings__".
//
// emit_json is byte-deterministic: keys follow the attribute order
// h v s p o t l, meta attributes alphabetically, then variable keys.

#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include <json.hpp>

#include "alist/core.hpp"

namespace alist {

namespace detail {

using json = nlohmann::json;

inline AlistValue value_from_json(const json& j, const std::string& path);

inline Alist alist_from_json(const json& j, const std::string& path) {
  Alist out;
  for (const auto& [key, value] : j.items()) {
    const auto p = path + "." + key;
    if (key == kBindingsKey) {
      if (!value.is_object()) throw InvariantError("bindings must be an object", p);
      for (const auto& [bk, bv] : value.items()) {
        auto v = VariableRef::parse(bk);
        if (!v) throw InvariantError("binding key '" + bk + "' is not a variable", p + "." + bk);
        out.bind(*v, value_from_json(bv, p + "." + bk));
      }
      continue;
    }
    if (key.empty()) throw InvariantError("empty attribute name", p);
    std::optional<Key> k;
    if (VariableRef::has_sigil(key)) {
      auto v = VariableRef::parse(key);
      if (!v) throw InvariantError("invalid variable key '" + key + "'", p);
      k.emplace(*v);
    } else {
      try {
        k.emplace(AttributeName::parse(key));
      } catch (const InvariantError& e) {
        throw InvariantError(e.what(), p);
      }
    }
    out.set(*k, value_from_json(value, p));
  }
  return out;
}

inline AlistValue value_from_json(const json& j, const std::string& path) {
  switch (j.type()) {
    case json::value_t::string: {
      const auto& s = j.get_ref<const std::string&>();
      if (VariableRef::has_sigil(s)) {
        auto v = VariableRef::parse(s);
        if (!v) throw InvariantError("invalid variable '" + s + "'", path);
        return *v;
      }
      return s;
    }
    case json::value_t::number_integer:
      return j.get<std::int64_t>();
    case json::value_t::number_unsigned: {
      const auto u = j.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        throw InvariantError("integer out of 64-bit signed range", path);
      }
      return static_cast<std::int64_t>(u);
    }
    case json::value_t::number_float:
      return j.get<double>();
    case json::value_t::boolean:
      return j.get<bool>();
    case json::value_t::object:
      return AlistValue(alist_from_json(j, path));
    case json::value_t::array: {
      AlistValue::List items;
      items.reserve(j.size());
      for (std::size_t i = 0; i < j.size(); ++i) {
        const auto p = path + "[" + std::to_string(i) + "]";
        if (j[i].is_array()) throw InvariantError("value lists must be flat", p);
        items.push_back(value_from_json(j[i], p));
      }
      return AlistValue(std::move(items));
    }
    default:
      throw InvariantError("null and binary values have no alist counterpart", path);
  }
}

inline void emit_string(std::string& out, std::string_view s) {
  out += json(std::string(s)).dump();
}

inline void emit_value(std::string& out, const AlistValue& v);

inline void emit_alist(std::string& out, const Alist& a) {
  out += '{';
  bool first = true;
  for (const auto& [k, v] : a.entries()) {
    if (!first) out += ',';
    first = false;
    emit_string(out, k.render());
    out += ':';
    emit_value(out, v);
  }
  if (!a.bindings().empty()) {
    if (!first) out += ',';
    emit_string(out, kBindingsKey);
    out += ":{";
    bool first_binding = true;
    for (const auto& [k, v] : a.bindings()) {
      if (!first_binding) out += ',';
      first_binding = false;
      emit_string(out, k.render());
      out += ':';
      emit_value(out, v);
    }
    out += '}';
  }
  out += '}';
}

inline void emit_value(std::string& out, const AlistValue& v) {
  if (v.is_var()) {
    emit_string(out, v.variable().render());
  } else if (v.is_nested()) {
    emit_alist(out, v.nested());
  } else if (v.is_list()) {
    out += '[';
    for (std::size_t i = 0; i < v.list().size(); ++i) {
      if (i) out += ',';
      emit_value(out, v.list()[i]);
    }
    out += ']';
  } else if (v.is_string()) {
    emit_string(out, v.as_string());
  } else if (v.is_int()) {
    out += std::to_string(v.as_int());
  } else if (v.is_bool()) {
    out += v.as_bool() ? "true" : "false";
  } else {
    const double d = v.as_number();
    if (!std::isfinite(d)) throw InvariantError("non-finite numbers have no JSON form");
    out += json(d).dump();
  }
}

}  // namespace detail

/// Parses one alist document. The result is returned as written (no
/// defaults filled in) but is checked to canonicalize cleanly.
inline Alist parse_json(std::string_view text) {
  detail::json j;
  try {
    j = detail::json::parse(text.begin(), text.end());
  } catch (const detail::json::parse_error& e) {
    throw SyntaxError(e.what(), e.byte);
  }
  if (!j.is_object()) throw SyntaxError("an alist document must be a JSON object", 0);
  auto a = detail::alist_from_json(j, "$");
  (void)canonicalize(a);
  return a;
}

inline std::string emit_json(const Alist& a) {
  std::string out;
  detail::emit_alist(out, a);
  return out;
}

/// JSON text for a single value, e.g. an inference answer.
inline std::string emit_value_json(const AlistValue& v) {
  std::string out;
  detail::emit_value(out, v);
  return out;
}

}  // namespace alist
