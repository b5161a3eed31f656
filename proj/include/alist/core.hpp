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

// The alist data model: attribute names, variables, values, and the
// structural operations (scope, canonical form, substitution, resolution
// state) everything else is built on.

#include <algorithm>
#include <charconv>
#include <array>
#include <atomic>
#include <cctype>
#include <compare>
#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "alist/errors.hpp"

namespace alist {

// ---------------------------------------------------------------------------
// Attribute names

enum class Attr : std::uint8_t {
  Operation,          // h
  OperationVariable,  // v
  Subject,            // s
  Property,           // p
  Object,             // o
  Time,               // t
  Location,           // l
  Explanation,        // x
  Context,            // c
  Uncertainty,        // u
  DataSource,         // d
  Custom,
};

enum class AttributeClass { Functional, ObjectLevel, MetaLevel };

inline constexpr std::string_view kBindingsKey = "__bindings__";

namespace detail {

struct ReservedSymbol {
  Attr attr;
  std::string_view symbol;
};

inline constexpr std::array<ReservedSymbol, 11> kReserved{{
    {Attr::Operation, "h"},
    {Attr::OperationVariable, "v"},
    {Attr::Subject, "s"},
    {Attr::Property, "p"},
    {Attr::Object, "o"},
    {Attr::Time, "t"},
    {Attr::Location, "l"},
    {Attr::Explanation, "x"},
    {Attr::Context, "c"},
    {Attr::Uncertainty, "u"},
    {Attr::DataSource, "d"},
}};

inline bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char ch) { return std::isspace(ch) != 0; });
}

}  // namespace detail

class AttributeName {
 public:
  // Implicit on purpose: `Attr::Subject` reads naturally wherever a name is
  // expected.
  AttributeName(Attr attr) : attr_(attr) {  // NOLINT
    if (attr == Attr::Custom) {
      throw InvariantError("custom attributes need a name; use AttributeName::custom");
    }
  }

  static AttributeName custom(std::string name) {
    if (name.empty()) throw InvariantError("custom attribute name must not be empty");
    if (reserved(name)) {
      throw InvariantError("custom attribute '" + name + "' collides with a reserved symbol");
    }
    if (name.front() == '?' || name.front() == '$') {
      throw InvariantError("custom attribute '" + name + "' must not start with a variable sigil");
    }
    if (name == kBindingsKey) {
      throw InvariantError("'" + name + "' is reserved for serialized bindings");
    }
    AttributeName out(Attr::Subject);
    out.attr_ = Attr::Custom;
    out.custom_ = std::move(name);
    return out;
  }

  static std::optional<AttributeName> from_symbol(std::string_view symbol) {
    for (const auto& r : detail::kReserved) {
      if (r.symbol == symbol) return AttributeName(r.attr);
    }
    return std::nullopt;
  }

  /// Reserved symbol if `key` is one, otherwise a custom (meta-level) name.
  static AttributeName parse(std::string_view key) {
    if (auto reserved_name = from_symbol(key)) return *reserved_name;
    return custom(std::string(key));
  }

  static bool reserved(std::string_view symbol) { return from_symbol(symbol).has_value(); }

  Attr kind() const noexcept { return attr_; }
  bool is_custom() const noexcept { return attr_ == Attr::Custom; }

  std::string symbol() const {
    if (attr_ == Attr::Custom) return custom_;
    for (const auto& r : detail::kReserved) {
      if (r.attr == attr_) return std::string(r.symbol);
    }
    return {};
  }

  AttributeClass classification() const noexcept {
    switch (attr_) {
      case Attr::Operation:
      case Attr::OperationVariable:
        return AttributeClass::Functional;
      case Attr::Subject:
      case Attr::Property:
      case Attr::Object:
      case Attr::Time:
      case Attr::Location:
        return AttributeClass::ObjectLevel;
      default:
        return AttributeClass::MetaLevel;
    }
  }

  friend bool operator==(const AttributeName& a, const AttributeName& b) {
    return a.attr_ == b.attr_ && a.custom_ == b.custom_;
  }

  // Serialization order: h v s p o t l, then every meta-level name sorted by
  // its symbol.
  friend std::strong_ordering operator<=>(const AttributeName& a, const AttributeName& b) {
    const int ra = a.rank();
    const int rb = b.rank();
    if (ra != rb) return ra <=> rb;
    if (ra < kMetaRank) return std::strong_ordering::equal;
    return a.symbol() <=> b.symbol();
  }

 private:
  static constexpr int kMetaRank = 7;

  int rank() const noexcept {
    const auto idx = static_cast<int>(attr_);
    return idx < kMetaRank ? idx : kMetaRank;
  }

  Attr attr_;
  std::string custom_;
};

inline AttributeClass classify_attribute(const AttributeName& a) { return a.classification(); }

inline std::string_view to_string(AttributeClass c) {
  switch (c) {
    case AttributeClass::Functional:
      return "functional";
    case AttributeClass::ObjectLevel:
      return "object-level";
    case AttributeClass::MetaLevel:
      return "meta-level";
  }
  return "";
}

inline constexpr std::array<Attr, 5> kObjectLevelAttrs{Attr::Subject, Attr::Property, Attr::Object,
                                                       Attr::Time, Attr::Location};

// ---------------------------------------------------------------------------
// Variables

enum class VarKind : std::uint8_t { Projection, Auxiliary };

struct VariableRef {
  VarKind kind = VarKind::Projection;
  std::string name;

  VariableRef() = default;
  VariableRef(VarKind k, std::string n) : kind(k), name(std::move(n)) {
    if (!valid_name(name)) throw InvariantError("invalid variable name '" + name + "'");
  }

  static bool valid_name(std::string_view n) { return !n.empty() && !detail::has_whitespace(n); }

  /// Parses "?x" / "$x"; nullopt for anything without a sigil or with an
  /// invalid name.
  static std::optional<VariableRef> parse(std::string_view rendered) {
    if (rendered.size() < 2) return std::nullopt;
    const char sigil = rendered.front();
    if (sigil != '?' && sigil != '$') return std::nullopt;
    const auto n = rendered.substr(1);
    if (!valid_name(n)) return std::nullopt;
    return VariableRef(sigil == '?' ? VarKind::Projection : VarKind::Auxiliary, std::string(n));
  }

  static bool has_sigil(std::string_view s) {
    return !s.empty() && (s.front() == '?' || s.front() == '$');
  }

  bool is_projection() const noexcept { return kind == VarKind::Projection; }

  std::string render() const { return (kind == VarKind::Projection ? "?" : "$") + name; }

  friend bool operator==(const VariableRef&, const VariableRef&) = default;
  friend std::strong_ordering operator<=>(const VariableRef& a, const VariableRef& b) {
    return a.render() <=> b.render();
  }
};

/// "?x" or "$x" to a VariableRef; throws InvariantError otherwise.
inline VariableRef var(std::string_view rendered) {
  auto v = VariableRef::parse(rendered);
  if (!v) throw InvariantError("'" + std::string(rendered) + "' is not a variable");
  return *v;
}

// ---------------------------------------------------------------------------
// Values

using Constant = std::variant<std::string, std::int64_t, double, bool>;

class Alist;

class AlistValue {
 public:
  using List = std::vector<AlistValue>;
  using Nested = std::shared_ptr<const Alist>;

  AlistValue() : data_(Constant{std::string{}}) {}
  AlistValue(Constant c) : data_(std::move(c)) {}                        // NOLINT
  AlistValue(std::string s) : data_(Constant{std::move(s)}) {}          // NOLINT
  AlistValue(const char* s) : data_(Constant{std::string(s)}) {}        // NOLINT
  AlistValue(double d) : data_(Constant{d}) {}                          // NOLINT
  AlistValue(bool b) : data_(Constant{b}) {}                            // NOLINT
  AlistValue(VariableRef v) : data_(std::move(v)) {}                    // NOLINT
  AlistValue(Nested n) : data_(std::move(n)) {}                         // NOLINT
  AlistValue(const Alist& a);                                           // NOLINT
  AlistValue(List l) : data_(std::move(l)) {}                           // NOLINT
  template <std::integral I>
    requires(!std::same_as<I, bool>)
  AlistValue(I i) : data_(Constant{static_cast<std::int64_t>(i)}) {}    // NOLINT

  bool is_constant() const noexcept { return std::holds_alternative<Constant>(data_); }
  bool is_var() const noexcept { return std::holds_alternative<VariableRef>(data_); }
  bool is_nested() const noexcept { return std::holds_alternative<Nested>(data_); }
  bool is_list() const noexcept { return std::holds_alternative<List>(data_); }

  const Constant& constant() const { return std::get<Constant>(data_); }
  const VariableRef& variable() const { return std::get<VariableRef>(data_); }
  const Alist& nested() const { return *std::get<Nested>(data_); }
  const Nested& nested_ptr() const { return std::get<Nested>(data_); }
  const List& list() const { return std::get<List>(data_); }

  bool is_string() const { return is_constant() && std::holds_alternative<std::string>(constant()); }
  bool is_int() const { return is_constant() && std::holds_alternative<std::int64_t>(constant()); }
  bool is_real() const { return is_constant() && std::holds_alternative<double>(constant()); }
  bool is_bool() const { return is_constant() && std::holds_alternative<bool>(constant()); }
  bool is_number() const { return is_int() || is_real(); }

  const std::string& as_string() const { return std::get<std::string>(constant()); }
  std::int64_t as_int() const { return std::get<std::int64_t>(constant()); }
  bool as_bool() const { return std::get<bool>(constant()); }
  double as_number() const {
    return is_int() ? static_cast<double>(as_int()) : std::get<double>(constant());
  }

  friend bool operator==(const AlistValue& a, const AlistValue& b);

 private:
  std::variant<Constant, VariableRef, Nested, List> data_;
};

/// Attribute keys are names or, for attaching instantiations and nested
/// alists to a variable, variable references.
class Key {
 public:
  Key(AttributeName a) : data_(std::move(a)) {}   // NOLINT
  Key(Attr a) : data_(AttributeName(a)) {}        // NOLINT
  Key(VariableRef v) : data_(std::move(v)) {}     // NOLINT

  /// "?x"/"$x" become variable keys, everything else an attribute name.
  static Key parse(std::string_view text) {
    if (VariableRef::has_sigil(text)) return Key(var(text));
    return Key(AttributeName::parse(text));
  }

  bool is_var() const noexcept { return std::holds_alternative<VariableRef>(data_); }
  bool is_attribute() const noexcept { return !is_var(); }
  const VariableRef& variable() const { return std::get<VariableRef>(data_); }
  const AttributeName& attribute() const { return std::get<AttributeName>(data_); }

  std::string render() const { return is_var() ? variable().render() : attribute().symbol(); }

  friend bool operator==(const Key&, const Key&) = default;
  friend std::strong_ordering operator<=>(const Key& a, const Key& b) {
    if (a.is_var() != b.is_var()) return a.is_var() ? std::strong_ordering::greater : std::strong_ordering::less;
    if (a.is_var()) return a.variable() <=> b.variable();
    return a.attribute() <=> b.attribute();
  }

 private:
  std::variant<AttributeName, VariableRef> data_;
};

// ---------------------------------------------------------------------------
// Alist

class Alist {
 public:
  using Entries = std::map<Key, AlistValue>;
  using Bindings = std::map<VariableRef, AlistValue>;

  Alist() = default;

  /// Keys are parsed with Key::parse; values are taken as given, so write
  /// `var("?x")` for a variable.
  Alist(std::initializer_list<std::pair<std::string_view, AlistValue>> init) {
    for (const auto& [k, v] : init) entries_.insert_or_assign(Key::parse(k), v);
  }

  const Entries& entries() const noexcept { return entries_; }
  const Bindings& bindings() const noexcept { return bindings_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

  bool has(const Key& k) const { return entries_.count(k) != 0; }
  const AlistValue* get(const Key& k) const {
    auto it = entries_.find(k);
    return it == entries_.end() ? nullptr : &it->second;
  }
  const AlistValue* binding(const VariableRef& v) const {
    auto it = bindings_.find(v);
    return it == bindings_.end() ? nullptr : &it->second;
  }

  Alist& set(Key k, AlistValue v) {
    entries_.insert_or_assign(std::move(k), std::move(v));
    return *this;
  }
  Alist& erase(const Key& k) {
    entries_.erase(k);
    return *this;
  }
  Alist& bind(VariableRef v, AlistValue value) {
    bindings_.insert_or_assign(std::move(v), std::move(value));
    return *this;
  }
  Alist& clear_bindings() {
    bindings_.clear();
    return *this;
  }

  Alist with(Key k, AlistValue v) const {
    Alist out = *this;
    out.set(std::move(k), std::move(v));
    return out;
  }
  Alist without(const Key& k) const {
    Alist out = *this;
    out.erase(k);
    return out;
  }

  friend bool operator==(const Alist&, const Alist&) = default;

 private:
  Entries entries_;
  Bindings bindings_;
};

inline AlistValue::AlistValue(const Alist& a) : data_(std::make_shared<const Alist>(a)) {}

inline bool operator==(const AlistValue& a, const AlistValue& b) {
  if (a.data_.index() != b.data_.index()) return false;
  if (a.is_nested()) {
    const auto& pa = a.nested_ptr();
    const auto& pb = b.nested_ptr();
    if (pa == pb) return true;
    if (!pa || !pb) return false;
    return *pa == *pb;
  }
  return a.data_ == b.data_;
}

// ---------------------------------------------------------------------------
// Rendering in the inline notation used for diagnostics and explanations:
// {s:Japan, p:capital, o:?x}. Not a wire format; see json_format.hpp.

inline std::string format_real(double d) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
  std::string out(buf.data(), end);
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

inline std::string render_constant(const Constant& c) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) {
          const bool quote = x.empty() || std::any_of(x.begin(), x.end(), [](unsigned char ch) {
                               return std::isspace(ch) || ch == ',' || ch == ':' || ch == '{' ||
                                      ch == '}' || ch == '[' || ch == ']';
                             });
          return quote ? "\"" + x + "\"" : x;
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_real(x);
        } else {
          return std::to_string(x);
        }
      },
      c);
}

inline std::string render(const Alist& a);

inline std::string render_value(const AlistValue& v) {
  if (v.is_constant()) return render_constant(v.constant());
  if (v.is_var()) return v.variable().render();
  if (v.is_nested()) return render(v.nested());
  std::string out = "[";
  for (std::size_t i = 0; i < v.list().size(); ++i) {
    if (i) out += ", ";
    out += render_value(v.list()[i]);
  }
  return out + "]";
}

inline std::string render(const Alist& a) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : a.entries()) {
    if (!first) out += ", ";
    first = false;
    out += k.render() + ":" + render_value(v);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Scope

namespace detail {

inline void collect_value_vars(const AlistValue& v, std::set<VariableRef>& out) {
  if (v.is_var()) {
    out.insert(v.variable());
  } else if (v.is_list()) {
    for (const auto& e : v.list()) collect_value_vars(e, out);
  }
}

template <typename F>
void for_each_nested(const Alist& a, F&& f) {
  for (const auto& [k, v] : a.entries()) {
    if (v.is_nested()) {
      f(k, v.nested());
    } else if (v.is_list()) {
      for (const auto& e : v.list()) {
        if (e.is_nested()) f(k, e.nested());
      }
    }
  }
}

}  // namespace detail

/// Variables appearing as keys or values of `a` itself; nested children
/// have their own scopes.
inline std::set<VariableRef> local_scope(const Alist& a) {
  std::set<VariableRef> out;
  for (const auto& [k, v] : a.entries()) {
    if (k.is_var()) out.insert(k.variable());
    detail::collect_value_vars(v, out);
  }
  return out;
}

inline std::set<VariableRef> global_scope(const Alist& a) {
  auto out = local_scope(a);
  detail::for_each_nested(a, [&](const Key&, const Alist& child) {
    auto inner = global_scope(child);
    out.insert(inner.begin(), inner.end());
  });
  return out;
}

inline bool is_simple(const Alist& a) {
  for (const auto& [k, v] : a.entries()) {
    if (v.is_nested()) return false;
    if (v.is_list()) {
      for (const auto& e : v.list()) {
        if (e.is_nested()) return false;
      }
    }
  }
  return true;
}

inline std::optional<VariableRef> projection_variable(const Alist& a) {
  for (const auto& v : local_scope(a)) {
    if (v.is_projection()) return v;
  }
  return std::nullopt;
}

/// The value of h, defaulting to the identity operation.
inline std::string operation(const Alist& a) {
  const auto* h = a.get(Attr::Operation);
  if (h && h->is_string()) return h->as_string();
  return "value";
}

/// The elements of v (a single element when v holds one value).
inline std::vector<AlistValue> operation_variables(const Alist& a) {
  const auto* v = a.get(Attr::OperationVariable);
  if (!v) return {};
  if (v->is_list()) return v->list();
  return {*v};
}

/// Variables whose values an alist hands back: its projection variable, or
/// the variables of v when there is none.
inline std::vector<VariableRef> projected_variables(const Alist& a) {
  if (auto p = projection_variable(a)) return {*p};
  std::vector<VariableRef> out;
  for (const auto& e : operation_variables(a)) {
    if (e.is_var()) out.push_back(e.variable());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical form

namespace detail {

inline std::string child_path(const std::string& path, const Key& k) {
  return path + "." + k.render();
}

inline Alist canonicalize_at(const Alist& a, const std::string& path);

inline AlistValue canonicalize_value(const AlistValue& v, const std::string& path) {
  if (v.is_nested()) return AlistValue(canonicalize_at(v.nested(), path));
  if (v.is_list()) {
    AlistValue::List out;
    out.reserve(v.list().size());
    for (std::size_t i = 0; i < v.list().size(); ++i) {
      const auto& e = v.list()[i];
      const auto p = path + "[" + std::to_string(i) + "]";
      if (e.is_list()) throw InvariantError("value lists must be flat", p);
      out.push_back(canonicalize_value(e, p));
    }
    return AlistValue(std::move(out));
  }
  return v;
}

inline Alist canonicalize_at(const Alist& a, const std::string& path) {
  const auto scope = local_scope(a);
  std::vector<VariableRef> projections;
  for (const auto& v : scope) {
    if (v.is_projection()) projections.push_back(v);
  }
  if (projections.size() > 1) {
    throw MultipleProjectionError("projection variables " + projections[0].render() + " and " +
                                      projections[1].render() + " share one local scope",
                                  path);
  }

  Alist out;
  for (const auto& [k, v] : a.entries()) {
    const auto p = child_path(path, k);
    if (k.is_var() && !(v.is_nested() || v.is_constant())) {
      throw InvariantError("a variable key must map to a nested alist or a constant", p);
    }
    out.set(k, canonicalize_value(v, p));
  }
  for (const auto& [k, v] : a.bindings()) out.bind(k, v);

  if (const auto* h = out.get(Attr::Operation); h && !h->is_string()) {
    throw InvariantError("operation must be a string label", child_path(path, Attr::Operation));
  }
  if (const auto* v = out.get(Attr::OperationVariable)) {
    const auto vp = child_path(path, Attr::OperationVariable);
    if (v->is_list()) {
      if (v->list().empty()) throw InvariantError("operation variable list is empty", vp);
      for (const auto& e : v->list()) {
        if (!(e.is_var() || e.is_constant())) {
          throw InvariantError("operation variable list holds variables or constants", vp);
        }
      }
      if (v->list().size() == 1) {
        AlistValue single = v->list().front();
        out.set(Attr::OperationVariable, std::move(single));
      }
    } else if (!(v->is_var() || v->is_constant())) {
      throw InvariantError("operation variable must be a variable or a list of variables", vp);
    }
  }

  const bool has_h = out.has(Attr::Operation);
  const bool has_v = out.has(Attr::OperationVariable);
  if (!has_h && !has_v && scope.empty()) return out;  // ground fact
  if (!has_h) out.set(Attr::Operation, "value");
  if (has_v) return out;

  const auto op = operation(out);
  if (!projections.empty()) {
    out.set(Attr::OperationVariable, projections.front());
    return out;
  }
  if (scope.empty()) return out;
  if (op == "value") {
    // Identity over auxiliary variables only: the variables themselves are
    // the operand.
    if (scope.size() == 1) {
      out.set(Attr::OperationVariable, *scope.begin());
    } else {
      AlistValue::List vars(scope.begin(), scope.end());
      out.set(Attr::OperationVariable, std::move(vars));
    }
    return out;
  }
  if (op == "NOT") return out;
  throw NoVariableError("operation '" + op + "' has neither an operation variable nor a projection variable",
                        path);
}

}  // namespace detail

/// Fills in the defaults for h and v, normalizes singleton operation
/// variable lists, and checks the scope invariants. Recurses into nested
/// alists; idempotent.
inline Alist canonicalize(const Alist& a) { return detail::canonicalize_at(a, "$"); }

// ---------------------------------------------------------------------------
// Resolution

/// Records `val` as the binding of `v`. Local scope only.
inline Alist substitute(const Alist& a, const VariableRef& v, const AlistValue& val) {
  if (val.is_var() && val.variable() == v) {
    throw InvariantError("cannot bind " + v.render() + " to itself");
  }
  if (local_scope(a).count(v) == 0) {
    throw UnknownVariableError(v.render() + " is not in the local scope");
  }
  Alist out = a;
  out.bind(v, val);
  return out;
}

enum class ResolutionState { Ground, PartiallyResolved, FullyResolved };

inline std::string_view to_string(ResolutionState s) {
  switch (s) {
    case ResolutionState::Ground:
      return "ground";
    case ResolutionState::PartiallyResolved:
      return "partially-resolved";
    case ResolutionState::FullyResolved:
      return "fully-resolved";
  }
  return "";
}

namespace detail {

inline void collect_bindings(const Alist& a, std::set<VariableRef>& out) {
  for (const auto& [k, v] : a.bindings()) out.insert(k);
  for_each_nested(a, [&](const Key&, const Alist& child) { collect_bindings(child, out); });
}

}  // namespace detail

inline ResolutionState resolution_state(const Alist& a) {
  const auto scope = global_scope(a);
  if (scope.empty()) return ResolutionState::Ground;
  std::set<VariableRef> bound;
  detail::collect_bindings(a, bound);
  for (const auto& v : scope) {
    if (bound.count(v) == 0) return ResolutionState::PartiallyResolved;
  }
  return ResolutionState::FullyResolved;
}

/// Replaces bound variables in the entries with their bindings (local
/// scope, keys untouched).
inline Alist apply_bindings(const Alist& a) {
  if (a.bindings().empty()) return a;
  auto replace = [&](const AlistValue& v) -> AlistValue {
    if (v.is_var()) {
      if (const auto* b = a.binding(v.variable())) return *b;
    }
    return v;
  };
  Alist out;
  for (const auto& [k, v] : a.entries()) {
    if (v.is_list()) {
      AlistValue::List items;
      items.reserve(v.list().size());
      for (const auto& e : v.list()) items.push_back(replace(e));
      out.set(k, AlistValue(std::move(items)));
    } else {
      out.set(k, replace(v));
    }
  }
  for (const auto& [k, v] : a.bindings()) out.bind(k, v);
  return out;
}

// ---------------------------------------------------------------------------
// Fresh variable names

/// Hands out v1, v2, ... skipping names already in use. Thread-safe.
class FreshVariables {
 public:
  explicit FreshVariables(std::string prefix = "v") : prefix_(std::move(prefix)) {}

  void reserve(const std::set<VariableRef>& vars) {
    for (const auto& v : vars) taken_.insert(v.name);
  }
  void reserve(std::string name) { taken_.insert(std::move(name)); }

  VariableRef next(VarKind kind) {
    for (;;) {
      auto name = prefix_ + std::to_string(++counter_);
      if (taken_.count(name) == 0) return VariableRef(kind, std::move(name));
    }
  }

 private:
  std::string prefix_;
  std::atomic<std::uint64_t> counter_{0};
  std::set<std::string> taken_;
};

// ---------------------------------------------------------------------------
// Time values: integers are years; strings are ISO-8601 dates.

inline std::optional<double> time_as_number(const AlistValue& v) {
  if (v.is_number()) return v.as_number();
  if (!v.is_string()) return std::nullopt;
  const auto& s = v.as_string();
  // YYYY, YYYY-MM, YYYY-MM-DD (optionally followed by a time part).
  if (s.size() < 4) return std::nullopt;
  std::size_t i = 0;
  bool negative = false;
  if (s[0] == '-' || s[0] == '+') {
    negative = s[0] == '-';
    ++i;
  }
  std::size_t start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i - start < 4) return std::nullopt;
  if (i != s.size() && s[i] != '-') return std::nullopt;
  const double year = std::stod(s.substr(start, i - start));
  return negative ? -year : year;
}

}  // namespace alist
