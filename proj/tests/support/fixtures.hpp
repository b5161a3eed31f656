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

// Shared alists and knowledge-base builders for the test suites.

#include <algorithm>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "alist/alist.hpp"

#ifndef ALIST_TEST_DATA
#error "ALIST_TEST_DATA must point at tests/data"
#endif

namespace alist::testing {

inline std::filesystem::path data_path(const std::string& rel) { return std::filesystem::path(ALIST_TEST_DATA) / rel; }

/// {s:Japan, p:capital, o:Tokyo, t:1960}
inline Alist japan_fact() { return Alist{{"s", "Japan"}, {"p", "capital"}, {"o", "Tokyo"}, {"t", 1960}}; }

/// {s:Japan, p:capital, o:?x, t:1960}
inline Alist japan_query() { return Alist{{"s", "Japan"}, {"p", "capital"}, {"o", var("?x")}, {"t", 1960}}; }

/// {h:max, v:$y, s:?x, p:gdp, o:$y, $y:{s:?z, p:type, o:country}}
inline Alist max_gdp_query() {
  return Alist{{"h", "max"},
               {"v", var("$y")},
               {"s", var("?x")},
               {"p", "gdp"},
               {"o", var("$y")},
               {"$y", Alist{{"s", var("?z")}, {"p", "type"}, {"o", "country"}}}};
}

inline std::shared_ptr<LocalStore> store_from(const std::vector<Alist>& facts) {
  return std::make_shared<LocalStore>(facts);
}

inline std::shared_ptr<LocalStore> store_from_file(const std::string& rel) {
  return store_from(load_facts_file(data_path(rel)));
}

inline KbSource local_source(std::shared_ptr<const LocalStore> store, std::string name = "local",
                             bool closed_world = true, double confidence = 1.0) {
  KbSource s;
  s.name = std::move(name);
  s.kind = KbSource::Kind::Local;
  s.closed_world = closed_world;
  s.confidence = confidence;
  s.store = std::move(store);
  return s;
}

inline KbSet local_kbs(std::shared_ptr<const LocalStore> store, bool closed_world = true) {
  KbSet kbs;
  kbs.sources.push_back(local_source(std::move(store), "local", closed_world));
  return kbs;
}

inline KbSet local_kbs_from_file(const std::string& rel, bool closed_world = true) {
  return local_kbs(store_from_file(rel), closed_world);
}

/// Attribute keys of `a`, with variable keys reduced to a marker so that
/// two alists compare by shape rather than by variable names.
inline std::vector<std::string> attribute_shape(const Alist& a) {
  std::vector<std::string> out;
  for (const auto& [k, v] : a.entries()) {
    std::string key = k.is_var() ? std::string(k.variable().is_projection() ? "?*" : "$*") : k.render();
    out.push_back(key + (v.is_nested() ? "{}" : ""));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Attribute-set and nesting equality: same attribute names at every
/// level and a one-to-one pairing of nested children with equal shapes.
inline bool same_shape(const Alist& a, const Alist& b) {
  if (attribute_shape(a) != attribute_shape(b)) return false;
  std::vector<const Alist*> ca;
  std::vector<const Alist*> cb;
  for (const auto& [k, v] : a.entries()) {
    if (v.is_nested()) ca.push_back(&v.nested());
  }
  for (const auto& [k, v] : b.entries()) {
    if (v.is_nested()) cb.push_back(&v.nested());
  }
  if (ca.size() != cb.size()) return false;
  std::vector<bool> used(cb.size(), false);
  std::function<bool(std::size_t)> pair_from = [&](std::size_t i) {
    if (i == ca.size()) return true;
    for (std::size_t j = 0; j < cb.size(); ++j) {
      if (used[j] || !same_shape(*ca[i], *cb[j])) continue;
      used[j] = true;
      if (pair_from(i + 1)) return true;
      used[j] = false;
    }
    return false;
  };
  return pair_from(0);
}

}  // namespace alist::testing
