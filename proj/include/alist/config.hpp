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

// Loading sources and run settings from JSON files.
//
// Sources file: an array of
//   {"name": "wb", "kind": "local" | "sparql" | "json_api",
//    "endpoint": "...", "closed_world": false, "confidence": 1.0,
//    "timeout_ms": 10000, "files": ["facts.jsonl", "more.nt"],
//    "mapping": {"population": {"template": "/country/{s}/...",
//                               "value_path": "[1][0].value", "scale": 1.0}}}
//
// Config file: {"sources_path", "fixtures_path", "offline", "max_depth",
//   "not_strategy", "output", "sequence_ranges", "functional_properties",
//   "parallel"}. Relative paths resolve against the file's directory.

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "alist/inference.hpp"
#include "alist/kb.hpp"

namespace alist {

enum class OutputFormat { Json, Pretty };

struct CliConfig {
  std::filesystem::path sources_path;
  std::optional<std::filesystem::path> fixtures_path;
  bool offline = true;
  OutputFormat output = OutputFormat::Json;
  Environment env;
};

namespace detail {

inline nlohmann::json parse_config_json(const std::string& text, const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

inline std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path out(p);
  return out.is_absolute() ? out : base / out;
}

template <typename T>
T field(const nlohmann::json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace detail

inline KbSource::Kind parse_source_kind(const std::string& s) {
  if (s == "local") return KbSource::Kind::Local;
  if (s == "sparql") return KbSource::Kind::Sparql;
  if (s == "json_api") return KbSource::Kind::JsonApi;
  throw ConfigError("unknown source kind '" + s + "' (local, sparql, json_api)");
}

/// Sources described by a JSON array; `base` anchors relative fact files.
inline std::vector<KbSource> parse_sources(const nlohmann::json& doc, const std::filesystem::path& base) {
  if (!doc.is_array()) throw ConfigError("sources must be a JSON array");
  std::vector<KbSource> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& j = doc[i];
    const auto where = "source[" + std::to_string(i) + "]";
    if (!j.is_object()) throw ConfigError(where + " is not an object");
    KbSource s;
    s.name = detail::field<std::string>(j, "name", "", where);
    if (s.name.empty()) throw ConfigError(where + " has no name");
    s.kind = parse_source_kind(detail::field<std::string>(j, "kind", "local", where));
    s.endpoint = detail::field<std::string>(j, "endpoint", "", where);
    s.closed_world = detail::field<bool>(j, "closed_world", false, where);
    s.confidence = detail::field<double>(j, "confidence", 1.0, where);
    if (s.confidence < 0.0 || s.confidence > 1.0) throw ConfigError(where + ": confidence outside [0, 1]");
    s.timeout = std::chrono::milliseconds(detail::field<std::int64_t>(j, "timeout_ms", 10000, where));
    if (j.contains("mapping")) {
      if (!j["mapping"].is_object()) throw ConfigError(where + ": mapping must be an object");
      for (const auto& [prop, m] : j["mapping"].items()) {
        PropertyMapping pm;
        pm.path_template = detail::field<std::string>(m, "template", "", where + ".mapping." + prop);
        pm.value_path = detail::field<std::string>(m, "value_path", "", where + ".mapping." + prop);
        if (m.contains("scale")) pm.scale = detail::field<double>(m, "scale", 1.0, where);
        if (pm.path_template.empty()) throw ConfigError(where + ".mapping." + prop + " has no template");
        s.mapping.emplace(prop, std::move(pm));
      }
    }
    if (s.kind == KbSource::Kind::JsonApi && s.mapping.empty()) {
      throw ConfigError(where + ": json_api sources need a mapping");
    }
    if (s.kind != KbSource::Kind::Local && s.endpoint.empty()) {
      throw ConfigError(where + ": remote sources need an endpoint");
    }
    if (s.kind == KbSource::Kind::Local) {
      auto store = std::make_shared<LocalStore>();
      for (const auto& f : detail::field<std::vector<std::string>>(j, "files", {}, where)) {
        for (auto& fact : load_facts_file(detail::resolve_path(base, f))) store->add(std::move(fact));
      }
      s.store = std::move(store);
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<KbSource> load_sources(const std::filesystem::path& path) {
  const auto doc = detail::parse_config_json(read_file(path), path);
  return parse_sources(doc, path.parent_path());
}

inline CliConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const std::string where = "config";
  CliConfig c;
  if (j.contains("sources_path")) {
    c.sources_path = detail::resolve_path(base, detail::field<std::string>(j, "sources_path", "", where));
  }
  if (j.contains("fixtures_path")) {
    c.fixtures_path = detail::resolve_path(base, detail::field<std::string>(j, "fixtures_path", "", where));
  }
  c.offline = detail::field<bool>(j, "offline", true, where);
  const auto output = detail::field<std::string>(j, "output", "json", where);
  if (output == "json") {
    c.output = OutputFormat::Json;
  } else if (output == "pretty") {
    c.output = OutputFormat::Pretty;
  } else {
    throw ConfigError("output must be json or pretty");
  }
  c.env.max_depth = detail::field<int>(j, "max_depth", 3, where);
  if (c.env.max_depth < 1) throw ConfigError("max_depth must be at least 1");
  c.env.not_strategy = parse_not_strategy(detail::field<std::string>(j, "not_strategy", "closed_world", where));
  c.env.parallel = detail::field<bool>(j, "parallel", true, where);
  for (const auto& p : detail::field<std::vector<std::string>>(j, "functional_properties", {}, where)) {
    c.env.functional_properties.insert(p);
  }
  if (j.contains("sequence_ranges")) {
    const auto& ranges = j["sequence_ranges"];
    if (!ranges.is_object()) throw ConfigError("sequence_ranges must be an object");
    for (const auto& [attr, values] : ranges.items()) {
      const auto name = AttributeName::from_symbol(attr);
      if (!name || name->classification() != AttributeClass::ObjectLevel) {
        throw ConfigError("sequence range on '" + attr + "', which is not an object-level attribute");
      }
      if (!values.is_array() || values.empty()) throw ConfigError("sequence range '" + attr + "' must be a non-empty array");
      const auto parsed = parse_json("{\"o\":" + values.dump() + "}");
      c.env.sequence_ranges.emplace(attr, parsed.get(Attr::Object)->list());
    }
  }
  return c;
}

inline CliConfig load_config(const std::filesystem::path& path) {
  const auto doc = detail::parse_config_json(read_file(path), path);
  return parse_config(doc, path.parent_path());
}

}  // namespace alist
