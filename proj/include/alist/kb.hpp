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

// Knowledge sources: an in-memory store of ground alists, SPARQL
// endpoints and JSON APIs. Simple alists compile to each source's native
// query and results come back as variable bindings.

#include <chrono>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "alist/core.hpp"
#include "alist/json_format.hpp"
#include "alist/rdf.hpp"
#include "alist/transport.hpp"

namespace alist {

// ---------------------------------------------------------------------------
// Local store

class LocalStore {
 public:
  LocalStore() = default;
  explicit LocalStore(std::vector<Alist> facts) {
    for (auto& f : facts) add(std::move(f));
  }

  void add(Alist fact) {
    if (!is_simple(fact) || !local_scope(fact).empty()) {
      throw InvariantError("stored facts must be simple and ground: " + render(fact));
    }
    facts_.push_back(std::move(fact));
  }

  const std::vector<Alist>& facts() const noexcept { return facts_; }
  std::size_t size() const noexcept { return facts_.size(); }

 private:
  std::vector<Alist> facts_;
};

struct RetrievalResult {
  Alist::Bindings bindings;
  std::string source;
  double confidence = 1.0;

  friend bool operator==(const RetrievalResult&, const RetrievalResult&) = default;
};

namespace detail {

inline bool constants_match(Attr attr, const AlistValue& query, const AlistValue& fact) {
  if (query == fact) return true;
  if (query.is_number() && fact.is_number()) return query.as_number() == fact.as_number();
  if (attr == Attr::Time) {
    const auto a = time_as_number(query);
    const auto b = time_as_number(fact);
    return a && b && *a == *b && (query.is_number() || fact.is_number());
  }
  return false;
}

/// Object-level attributes and custom argument attributes take part in
/// matching; h, v and the reserved meta attributes do not.
inline bool is_matched_attribute(const AttributeName& a) {
  return a.classification() == AttributeClass::ObjectLevel || a.is_custom();
}

}  // namespace detail

/// Unifies the object-level (and custom) attributes of `a` with every
/// stored fact. t and l only constrain facts that carry them; every other
/// queried attribute must be present on the fact. Bound variables of `a`
/// act as constants.
inline std::vector<RetrievalResult> query_local(const Alist& a, const LocalStore& store,
                                                const std::string& source = "local", double confidence = 1.0) {
  if (!is_simple(a)) throw NotSimpleError("query_local takes simple alists");
  const Alist q = apply_bindings(a);
  std::vector<RetrievalResult> out;
  for (const auto& fact : store.facts()) {
    Alist::Bindings b;
    bool ok = true;
    for (const auto& [key, qv_ref] : q.entries()) {
      if (!key.is_attribute() || !detail::is_matched_attribute(key.attribute())) continue;
      const Attr attr = key.attribute().kind();
      const auto* qv = &qv_ref;
      const auto* fv = fact.get(key);
      if (!fv) {
        if (attr == Attr::Time || attr == Attr::Location) continue;
        ok = false;
        break;
      }
      if (qv->is_var()) {
        auto [it, inserted] = b.try_emplace(qv->variable(), *fv);
        if (!inserted && !(it->second == *fv)) {
          ok = false;
          break;
        }
      } else if (qv->is_list()) {
        ok = std::any_of(qv->list().begin(), qv->list().end(),
                         [&](const AlistValue& e) { return e.is_constant() && detail::constants_match(attr, e, *fv); });
        if (!ok) break;
      } else if (!detail::constants_match(attr, *qv, *fv)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back({std::move(b), source, confidence});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sources

struct PropertyMapping {
  std::string path_template;  // e.g. "/country/{s}/indicator/SP.POP.TOTL?date={t}&format=json"
  std::string value_path;     // e.g. "[1][0].value"
  std::optional<double> scale;
};

using PropertyMap = std::map<std::string, PropertyMapping>;

struct KbSource {
  enum class Kind { Local, Sparql, JsonApi };

  std::string name;
  Kind kind = Kind::Local;
  std::string endpoint;
  PropertyMap mapping;
  bool closed_world = false;
  double confidence = 1.0;
  std::chrono::milliseconds timeout{10000};
  std::shared_ptr<const LocalStore> store;
};

inline std::string_view to_string(KbSource::Kind k) {
  switch (k) {
    case KbSource::Kind::Local:
      return "local";
    case KbSource::Kind::Sparql:
      return "sparql";
    case KbSource::Kind::JsonApi:
      return "json_api";
  }
  return "";
}

struct KbSet {
  std::vector<KbSource> sources;
  std::shared_ptr<const Transport> transport = std::make_shared<NullTransport>();

  bool all_closed_world() const {
    return !sources.empty() && std::all_of(sources.begin(), sources.end(),
                                           [](const KbSource& s) { return s.closed_world; });
  }
};

// ---------------------------------------------------------------------------
// SPARQL

inline const std::set<std::string>& sparql_aggregates() {
  static const std::set<std::string> kOps{"count", "max", "min", "avg", "sum"};
  return kOps;
}

namespace detail {

inline bool is_sparql_varname(std::string_view n) {
  return !n.empty() && std::all_of(n.begin(), n.end(), [](unsigned char ch) {
           return std::isalnum(ch) != 0 || ch == '_';
         });
}

inline std::string sparql_var(const VariableRef& v) {
  if (!is_sparql_varname(v.name)) {
    throw UnsupportedOperationError("variable " + v.render() + " has no SPARQL spelling");
  }
  return (v.is_projection() ? "?" : "?_") + v.name;
}

inline std::string sparql_string(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += ch;
    }
  }
  return out + "\"";
}

inline bool is_http_iri(std::string_view s) {
  return (s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0) &&
         s.find_first_of(" <>\"{}|^`\\") == std::string_view::npos;
}

struct SparqlBuilder {
  std::vector<std::string> labels;

  /// Term for an s/p/o/l position: variables and bare IRIs or numbers as
  /// they are, any other constant through a label-matched helper.
  std::string term(const AlistValue& v, const std::string& helper) {
    if (v.is_var()) return sparql_var(v.variable());
    if (v.is_int()) return std::to_string(v.as_int());
    if (v.is_real()) return format_real(v.as_number());
    if (v.is_bool()) return v.as_bool() ? "true" : "false";
    if (v.is_string()) {
      if (is_http_iri(v.as_string())) return "<" + v.as_string() + ">";
      labels.push_back("  " + helper + " rdfs:label " + sparql_string(v.as_string()) + "@en .");
      return helper;
    }
    throw UnsupportedOperationError("value lists have no SPARQL term: " + render_value(v));
  }
};

}  // namespace detail

/// SELECT query for a simple alist. Constants other than http(s) IRIs and
/// numbers are matched by English rdfs:label; t becomes a year filter on
/// the subject's <alist:t>.
inline std::string to_sparql(const Alist& input) {
  if (!is_simple(input)) throw NotSimpleError("to_sparql takes simple alists");
  const Alist a = apply_bindings(canonicalize(input));
  const auto op = operation(a);
  if (op != "value" && sparql_aggregates().count(op) == 0) {
    throw UnsupportedOperationError("operation '" + op + "' has no SPARQL counterpart");
  }

  detail::SparqlBuilder b;
  auto slot = [&](Attr attr, const std::string& helper) -> std::string {
    const auto* v = a.get(attr);
    if (!v) return helper;
    return b.term(*v, helper);
  };
  const auto s = slot(Attr::Subject, "?__s");
  const auto p = slot(Attr::Property, "?__p");
  const auto o = slot(Attr::Object, "?__o");

  std::vector<std::string> qualifiers;
  if (const auto* t = a.get(Attr::Time)) {
    qualifiers.push_back("  # time qualifier");
    if (t->is_var()) {
      qualifiers.push_back("  " + s + " <alist:t> " + detail::sparql_var(t->variable()) + " .");
    } else if (const auto year = time_as_number(*t); year && std::floor(*year) == *year) {
      qualifiers.push_back("  " + s + " <alist:t> ?__t . FILTER(YEAR(?__t) = " +
                           std::to_string(static_cast<std::int64_t>(*year)) + ")");
    } else if (t->is_string()) {
      qualifiers.push_back("  " + s + " <alist:t> ?__t . FILTER(STR(?__t) = " + detail::sparql_string(t->as_string()) +
                           ")");
    } else {
      throw UnsupportedOperationError("time value " + render_value(*t) + " has no SPARQL filter");
    }
  }
  if (const auto* l = a.get(Attr::Location)) {
    qualifiers.push_back("  # location qualifier");
    qualifiers.push_back("  " + s + " <alist:l> " + b.term(*l, "?__l") + " .");
  }

  std::vector<std::string> projected;
  for (const auto& v : projected_variables(a)) projected.push_back(detail::sparql_var(v));

  std::string select;
  if (op == "value") {
    if (projected.empty()) {
      select = "*";
    } else {
      for (std::size_t i = 0; i < projected.size(); ++i) select += (i ? " " : "") + projected[i];
    }
  } else {
    if (projected.size() != 1) {
      throw UnsupportedOperationError("aggregate '" + op + "' needs exactly one variable");
    }
    std::string upper = op;
    for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    const std::string alias = op == "count" ? "?c" : "?" + op;
    select = "(" + upper + "(" + projected.front() + ") AS " + alias + ")";
  }

  std::string out = "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n";
  out += "SELECT " + select + "\nWHERE {\n";
  out += "  " + s + " " + p + " " + o + " .\n";
  for (const auto& line : b.labels) out += line + "\n";
  for (const auto& line : qualifiers) out += line + "\n";
  out += "}\n";
  return out;
}

// ---------------------------------------------------------------------------
// REST

struct NativeQuery {
  std::string url;
  std::string method = "GET";
  std::string value_path;
  std::optional<double> scale;
};

inline std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char ch : s) {
    if (std::isalnum(ch) != 0 || ch == '-' || ch == '.' || ch == '_' || ch == '~') {
      out += static_cast<char>(ch);
    } else {
      out += '%';
      out += kHex[ch >> 4];
      out += kHex[ch & 0xF];
    }
  }
  return out;
}

/// Fills the {s} {o} {t} {l} slots of the property's template from the
/// alist's constants. The resulting URL is relative to the source endpoint.
inline NativeQuery to_rest_request(const Alist& input, const PropertyMap& map) {
  if (!is_simple(input)) throw NotSimpleError("to_rest_request takes simple alists");
  const Alist a = apply_bindings(input);
  const auto* p = a.get(Attr::Property);
  if (!p || !p->is_string()) throw UnmappedPropertyError("alist has no constant property");
  auto it = map.find(p->as_string());
  if (it == map.end()) throw UnmappedPropertyError("no mapping for property '" + p->as_string() + "'");
  const auto& tpl = it->second.path_template;

  NativeQuery q;
  q.value_path = it->second.value_path;
  q.scale = it->second.scale;
  for (std::size_t i = 0; i < tpl.size();) {
    if (tpl[i] != '{') {
      q.url += tpl[i++];
      continue;
    }
    const auto close = tpl.find('}', i);
    if (close == std::string::npos) throw ConfigError("unterminated slot in template '" + tpl + "'");
    const auto name = tpl.substr(i + 1, close - i - 1);
    const auto attr = AttributeName::from_symbol(name);
    if (!attr || attr->classification() != AttributeClass::ObjectLevel) {
      throw ConfigError("template slot {" + name + "} is not an object-level attribute");
    }
    const auto* v = a.get(*attr);
    if (!v || !v->is_constant()) {
      throw MissingSlotError("slot {" + name + "} needs a constant " + name + " for property '" +
                             p->as_string() + "'");
    }
    q.url += percent_encode(v->is_string() ? v->as_string() : render_constant(v->constant()));
    i = close + 1;
  }
  return q;
}

/// Follows a path such as "[1][0].value" or "data.items[2]" into `doc`.
inline const nlohmann::json* navigate(const nlohmann::json& doc, std::string_view path) {
  const nlohmann::json* cur = &doc;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '.') {
      ++i;
      continue;
    }
    if (path[i] == '[') {
      const auto close = path.find(']', i);
      if (close == std::string_view::npos) throw ParseError("bad value path '" + std::string(path) + "'");
      const auto idx_text = std::string(path.substr(i + 1, close - i - 1));
      if (idx_text.empty() || !std::all_of(idx_text.begin(), idx_text.end(), ::isdigit)) {
        throw ParseError("bad index in value path '" + std::string(path) + "'");
      }
      const auto idx = std::stoull(idx_text);
      if (!cur->is_array() || idx >= cur->size()) return nullptr;
      cur = &(*cur)[idx];
      i = close + 1;
      continue;
    }
    const auto end = path.find_first_of(".[", i);
    const auto key = std::string(path.substr(i, end == std::string_view::npos ? path.size() - i : end - i));
    if (!cur->is_object()) return nullptr;
    auto it = cur->find(key);
    if (it == cur->end()) return nullptr;
    cur = &*it;
    i = end == std::string_view::npos ? path.size() : end;
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Result parsing

namespace detail {

inline AlistValue json_scalar(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer() || j.is_number_unsigned()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_boolean()) return j.get<bool>();
  throw ParseError("expected a scalar, got " + j.dump());
}

inline AlistValue sparql_term_value(const nlohmann::json& cell) {
  if (!cell.is_object() || !cell.contains("value") || !cell["value"].is_string()) {
    throw ParseError("malformed SPARQL result cell " + cell.dump());
  }
  const auto type = cell.value("type", std::string("literal"));
  const auto value = cell["value"].get<std::string>();
  if (type == "uri") return value;
  if (type == "bnode") return "_:" + value;
  const auto datatype = cell.value("datatype", std::string());
  static const std::set<std::string> kInts{
      rdf::kXsdInteger, std::string(rdf::kXsdNs) + "int", std::string(rdf::kXsdNs) + "long",
      std::string(rdf::kXsdNs) + "nonNegativeInteger", std::string(rdf::kXsdNs) + "short"};
  static const std::set<std::string> kReals{rdf::kXsdDouble, std::string(rdf::kXsdNs) + "decimal",
                                            std::string(rdf::kXsdNs) + "float"};
  try {
    std::size_t used = 0;
    if (kInts.count(datatype) != 0) {
      const auto n = std::stoll(value, &used);
      if (used == value.size()) return static_cast<std::int64_t>(n);
      throw ParseError("bad integer '" + value + "'");
    }
    if (kReals.count(datatype) != 0) {
      const auto d = std::stod(value, &used);
      if (used == value.size()) return d;
      throw ParseError("bad number '" + value + "'");
    }
  } catch (const std::logic_error&) {
    throw ParseError("bad numeric literal '" + value + "'");
  }
  if (datatype == rdf::kXsdBoolean) return value == "true" || value == "1";
  return value;
}

inline nlohmann::json parse_body(const std::string& body, const std::string& source) {
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": response is not JSON: " + e.what());
  }
}

}  // namespace detail

/// Rows of a SPARQL JSON results document. SPARQL ?name maps back to
/// ?name, ?_name to $name; helper variables and variables outside the
/// query's scope are dropped.
inline std::vector<RetrievalResult> parse_sparql_results(const std::string& body, const Alist& query,
                                                         const std::string& source, double confidence) {
  const auto doc = detail::parse_body(body, source);
  const auto* rows = navigate(doc, "results.bindings");
  if (!rows || !rows->is_array()) throw ParseError(source + ": missing results.bindings");
  std::map<std::string, VariableRef> names;
  for (const auto& v : local_scope(query)) {
    names.emplace(v.is_projection() ? v.name : "_" + v.name, v);
  }
  std::vector<RetrievalResult> out;
  for (const auto& row : *rows) {
    if (!row.is_object()) throw ParseError(source + ": result row is not an object");
    RetrievalResult r{{}, source, confidence};
    for (const auto& [name, cell] : row.items()) {
      auto it = names.find(name);
      if (it == names.end()) continue;
      r.bindings.insert_or_assign(it->second, detail::sparql_term_value(cell));
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string join_url(const std::string& base, const std::string& path) {
  if (base.empty()) return path;
  if (!path.empty() && path.front() == '/' && base.back() == '/') return base + path.substr(1);
  return base + path;
}

/// GET URL carrying the SPARQL text of `a` with its operation dropped.
inline std::string sparql_request_url(const Alist& a, const KbSource& source) {
  const auto query = to_sparql(a.without(Attr::Operation).without(Attr::OperationVariable));
  const char sep = source.endpoint.find('?') == std::string::npos ? '?' : '&';
  return source.endpoint + sep + "query=" + percent_encode(query) + "&format=json";
}

/// Runs a simple alist against one source. Remote sources go through
/// `transport`; failures surface as TransportError or ParseError.
inline std::vector<RetrievalResult> execute(const Alist& input, const KbSource& source, const Transport& transport) {
  if (!is_simple(input)) throw NotSimpleError("execute takes simple alists");
  const Alist a = apply_bindings(input);
  switch (source.kind) {
    case KbSource::Kind::Local: {
      if (!source.store) return {};
      return query_local(a, *source.store, source.name, source.confidence);
    }
    case KbSource::Kind::Sparql: {
      const auto url = sparql_request_url(a, source);
      const auto body = transport.get(source.name, url, source.timeout);
      return parse_sparql_results(body, a, source.name, source.confidence);
    }
    case KbSource::Kind::JsonApi: {
      const auto* o = a.get(Attr::Object);
      if (!o || !o->is_var()) throw UnsupportedOperationError("JSON API sources answer a variable object only");
      const auto req = to_rest_request(a, source.mapping);
      const auto url = join_url(source.endpoint, req.url);
      const auto body = transport.get(source.name, url, source.timeout);
      const auto doc = detail::parse_body(body, source.name);
      const auto* cell = navigate(doc, req.value_path);
      if (!cell || cell->is_null()) return {};
      AlistValue value = detail::json_scalar(*cell);
      if (req.scale) {
        if (!value.is_number()) throw ParseError(source.name + ": cannot scale " + render_value(value));
        value = value.as_number() * *req.scale;
      }
      RetrievalResult r{{}, source.name, source.confidence};
      r.bindings.emplace(o->variable(), std::move(value));
      return {std::move(r)};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Ingestion

/// One alist per line; blank lines and lines starting with '#' are skipped.
inline std::vector<Alist> load_alist_lines(std::string_view text) {
  std::vector<Alist> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    try {
      out.push_back(parse_json(line));
    } catch (const Error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.describe());
    }
  }
  return out;
}

/// Reified statements become one alist each; any other triple becomes
/// {s, p, o} with IRIs as strings.
inline std::vector<Alist> load_ntriples(std::string_view text) {
  const auto triples = rdf::parse_ntriples(text);
  std::set<std::string> statements;
  for (const auto& t : triples) {
    if (t.predicate.value == rdf::kRdfType && t.object.kind == rdf::Term::Kind::Iri &&
        t.object.value == rdf::kRdfStatement) {
      statements.insert(t.subject.to_ntriples());
    }
  }
  std::vector<rdf::Triple> reified;
  std::vector<Alist> out;
  for (const auto& t : triples) {
    if (statements.count(t.subject.to_ntriples()) != 0) {
      reified.push_back(t);
      continue;
    }
    Alist fact;
    fact.set(Attr::Subject, rdf::term_value(t.subject));
    fact.set(Attr::Property, rdf::term_value(t.predicate));
    fact.set(Attr::Object, rdf::term_value(t.object));
    out.push_back(std::move(fact));
  }
  for (auto& a : rdf::from_rdf_reified(reified)) out.push_back(std::move(a));
  return out;
}

inline std::vector<Alist> load_facts_file(const std::filesystem::path& path) {
  const auto text = read_file(path);
  const auto ext = path.extension().string();
  if (ext == ".nt") return load_ntriples(text);
  if (ext == ".jsonl" || ext == ".json") return load_alist_lines(text);
  throw ConfigError("unknown fact file type '" + ext + "' (expected .jsonl or .nt)");
}

}  // namespace alist
