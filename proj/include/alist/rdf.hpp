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

// Reified RDF statements and N-Triples.
//
// A simple ground alist {s, p, o, P1:a1, ..., Pn:an} becomes
//
//   <q> rdf:type rdf:Statement .
//   <q> rdf:subject s .   <q> rdf:predicate p .   <q> rdf:object o .
//   <q> <alist:P1> a1 .  ...
//
// Strings are plain literals. Integers, reals and booleans are xsd-typed
// literals in their canonical lexical form. Value lists are literals of
// type <alist:list> holding the JSON array text.

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "alist/core.hpp"
#include "alist/json_format.hpp"

namespace alist::rdf {

inline constexpr std::string_view kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kXsdNs = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kAttributeNs = "alist:";
inline const std::string kRdfType = std::string(kRdfNs) + "type";
inline const std::string kRdfStatement = std::string(kRdfNs) + "Statement";
inline const std::string kRdfSubject = std::string(kRdfNs) + "subject";
inline const std::string kRdfPredicate = std::string(kRdfNs) + "predicate";
inline const std::string kRdfObject = std::string(kRdfNs) + "object";
inline const std::string kXsdInteger = std::string(kXsdNs) + "integer";
inline const std::string kXsdDouble = std::string(kXsdNs) + "double";
inline const std::string kXsdBoolean = std::string(kXsdNs) + "boolean";
inline const std::string kXsdString = std::string(kXsdNs) + "string";
inline const std::string kListType = std::string(kAttributeNs) + "list";

struct Term {
  enum class Kind { Iri, Blank, Literal };

  Kind kind = Kind::Iri;
  std::string value;     // IRI text, blank label, or literal lexical form
  std::string datatype;  // literals only; empty for plain
  std::string language;  // literals only

  static Term iri(std::string v) { return {Kind::Iri, std::move(v), {}, {}}; }
  static Term blank(std::string label) { return {Kind::Blank, std::move(label), {}, {}}; }
  static Term literal(std::string lexical, std::string datatype = {}) {
    return {Kind::Literal, std::move(lexical), std::move(datatype), {}};
  }

  /// "_:x" for a blank node, anything else as an IRI.
  static Term resource(std::string_view text) {
    if (text.substr(0, 2) == "_:") return blank(std::string(text.substr(2)));
    return iri(std::string(text));
  }

  std::string to_ntriples() const;

  friend bool operator==(const Term&, const Term&) = default;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  /// One N-Triples line without the trailing newline.
  std::string to_ntriples() const {
    return subject.to_ntriples() + " " + predicate.to_ntriples() + " " + object.to_ntriples() + " .";
  }

  friend bool operator==(const Triple&, const Triple&) = default;
};

namespace detail {

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

inline std::string escape_literal(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
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
  return out;
}

inline bool iri_char_needs_escape(unsigned char ch) {
  return ch <= 0x20 || ch == '<' || ch == '>' || ch == '"' || ch == '{' || ch == '}' || ch == '|' ||
         ch == '^' || ch == '`' || ch == '\\' || ch == '%';
}

inline std::string percent_encode_iri_part(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char ch : s) {
    if (iri_char_needs_escape(ch)) {
      out += '%';
      out += kHex[ch >> 4];
      out += kHex[ch & 0xF];
    } else {
      out += static_cast<char>(ch);
    }
  }
  return out;
}

inline std::string percent_decode(std::string_view s) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && hex(s[i + 1]) >= 0 && hex(s[i + 2]) >= 0) {
      out += static_cast<char>(hex(s[i + 1]) * 16 + hex(s[i + 2]));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace detail

inline std::string Term::to_ntriples() const {
  switch (kind) {
    case Kind::Iri:
      return "<" + value + ">";
    case Kind::Blank:
      return "_:" + value;
    case Kind::Literal: {
      std::string out = "\"" + detail::escape_literal(value) + "\"";
      if (!language.empty()) {
        out += "@" + language;
      } else if (!datatype.empty()) {
        out += "^^<" + datatype + ">";
      }
      return out;
    }
  }
  return {};
}

inline std::string to_ntriples(const std::vector<Triple>& triples) {
  std::string out;
  for (const auto& t : triples) {
    out += t.to_ntriples();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// N-Triples reader

namespace detail {

class NTriplesReader {
 public:
  explicit NTriplesReader(std::string_view text) : text_(text) {}

  std::vector<Triple> read() {
    std::vector<Triple> out;
    while (pos_ < text_.size()) {
      skip_blanks();
      if (pos_ >= text_.size()) break;
      const char ch = text_[pos_];
      if (ch == '\n' || ch == '\r') {
        ++pos_;
        continue;
      }
      if (ch == '#') {
        skip_line();
        continue;
      }
      Triple t;
      t.subject = read_term();
      if (t.subject.kind == Term::Kind::Literal) fail("literal in subject position");
      skip_blanks();
      t.predicate = read_term();
      if (t.predicate.kind != Term::Kind::Iri) fail("predicate must be an IRI");
      skip_blanks();
      t.object = read_term();
      skip_blanks();
      expect('.');
      skip_blanks();
      if (pos_ < text_.size() && text_[pos_] == '#') skip_line();
      if (pos_ < text_.size() && text_[pos_] != '\n' && text_[pos_] != '\r') fail("trailing content");
      out.push_back(std::move(t));
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError("N-Triples: " + what, pos_); }

  void skip_blanks() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  void skip_line() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }
  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::uint32_t read_hex(int digits) {
    if (pos_ + digits > text_.size()) fail("truncated escape");
    std::uint32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      const char c = text_[pos_++];
      cp <<= 4;
      if (c >= '0' && c <= '9') cp |= c - '0';
      else if (c >= 'a' && c <= 'f') cp |= c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') cp |= c - 'A' + 10;
      else fail("bad hex digit");
    }
    return cp;
  }

  std::string read_iri_body() {
    expect('<');
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '>') {
      if (text_[pos_] == '\\') {
        ++pos_;
        if (pos_ >= text_.size()) fail("truncated escape");
        const char e = text_[pos_++];
        if (e == 'u') append_utf8(out, read_hex(4));
        else if (e == 'U') append_utf8(out, read_hex(8));
        else fail("bad IRI escape");
        continue;
      }
      if (text_[pos_] == '\n' || text_[pos_] == ' ') fail("unterminated IRI");
      out += text_[pos_++];
    }
    expect('>');
    return out;
  }

  Term read_term() {
    if (pos_ >= text_.size()) fail("expected a term");
    const char ch = text_[pos_];
    if (ch == '<') return Term::iri(read_iri_body());
    if (ch == '_') {
      ++pos_;
      expect(':');
      const auto start = pos_;
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
             text_[pos_] != '.') {
        ++pos_;
      }
      if (pos_ == start) fail("empty blank node label");
      return Term::blank(std::string(text_.substr(start, pos_ - start)));
    }
    if (ch == '"') {
      ++pos_;
      std::string lexical;
      for (;;) {
        if (pos_ >= text_.size() || text_[pos_] == '\n') fail("unterminated literal");
        const char c = text_[pos_++];
        if (c == '"') break;
        if (c != '\\') {
          lexical += c;
          continue;
        }
        if (pos_ >= text_.size()) fail("truncated escape");
        const char e = text_[pos_++];
        switch (e) {
          case 't': lexical += '\t'; break;
          case 'b': lexical += '\b'; break;
          case 'n': lexical += '\n'; break;
          case 'r': lexical += '\r'; break;
          case 'f': lexical += '\f'; break;
          case '"': lexical += '"'; break;
          case '\'': lexical += '\''; break;
          case '\\': lexical += '\\'; break;
          case 'u': append_utf8(lexical, read_hex(4)); break;
          case 'U': append_utf8(lexical, read_hex(8)); break;
          default: fail("bad literal escape");
        }
      }
      Term t = Term::literal(std::move(lexical));
      if (pos_ < text_.size() && text_[pos_] == '@') {
        ++pos_;
        const auto start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-')) {
          ++pos_;
        }
        if (pos_ == start) fail("empty language tag");
        t.language = std::string(text_.substr(start, pos_ - start));
      } else if (pos_ + 1 < text_.size() && text_[pos_] == '^' && text_[pos_ + 1] == '^') {
        pos_ += 2;
        t.datatype = read_iri_body();
        if (t.datatype == kXsdString) t.datatype.clear();
      }
      return t;
    }
    fail("expected a term");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Reads N-Triples; '#' comments and blank lines are skipped. SyntaxError
/// reports the byte offset.
inline std::vector<Triple> parse_ntriples(std::string_view text) {
  return detail::NTriplesReader(text).read();
}

// ---------------------------------------------------------------------------
// Constants <-> terms

inline Term constant_term(const AlistValue& v) {
  if (v.is_string()) return Term::literal(v.as_string());
  if (v.is_int()) return Term::literal(std::to_string(v.as_int()), kXsdInteger);
  if (v.is_bool()) return Term::literal(v.as_bool() ? "true" : "false", kXsdBoolean);
  if (v.is_real()) return Term::literal(emit_value_json(v), kXsdDouble);
  if (v.is_list()) return Term::literal(emit_value_json(v), kListType);
  throw NotGroundError("only constants and value lists can be reified");
}

/// Literals decode by datatype; IRIs and blank nodes become their text
/// ("_:b0" for blanks).
inline AlistValue term_value(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Iri:
      return t.value;
    case Term::Kind::Blank:
      return "_:" + t.value;
    case Term::Kind::Literal:
      break;
  }
  try {
    if (t.datatype == kXsdInteger) {
      std::size_t used = 0;
      const auto n = std::stoll(t.value, &used);
      if (used != t.value.size()) throw ParseError("bad integer literal '" + t.value + "'");
      return static_cast<std::int64_t>(n);
    }
    if (t.datatype == kXsdDouble || t.datatype == std::string(kXsdNs) + "decimal") {
      std::size_t used = 0;
      const double d = std::stod(t.value, &used);
      if (used != t.value.size()) throw ParseError("bad real literal '" + t.value + "'");
      return d;
    }
  } catch (const std::logic_error&) {
    throw ParseError("bad numeric literal '" + t.value + "'");
  }
  if (t.datatype == kXsdBoolean) {
    if (t.value == "true" || t.value == "1") return true;
    if (t.value == "false" || t.value == "0") return false;
    throw ParseError("bad boolean literal '" + t.value + "'");
  }
  if (t.datatype == kListType) {
    const auto wrapped = parse_json("{\"o\":" + t.value + "}");
    return *wrapped.get(Attr::Object);
  }
  return t.value;
}

inline Term attribute_predicate(const AttributeName& a) {
  return Term::iri(std::string(kAttributeNs) + detail::percent_encode_iri_part(a.symbol()));
}

// ---------------------------------------------------------------------------
// Reification

/// Triples for a simple ground alist carrying s, p and o: the four
/// statement triples, then one per remaining attribute in serialization
/// order. `statement` is an IRI, or a blank node written "_:label".
inline std::vector<Triple> to_rdf_reified(const Alist& a, std::string_view statement) {
  if (!is_simple(a)) throw NotSimpleError("only simple alists can be reified");
  if (!local_scope(a).empty()) throw NotGroundError("alist has unresolved variables");
  for (Attr core : {Attr::Subject, Attr::Property, Attr::Object}) {
    if (!a.has(core)) {
      throw MissingCoreAttributeError("missing attribute '" + AttributeName(core).symbol() + "'");
    }
  }
  const Term q = Term::resource(statement);
  std::vector<Triple> out;
  out.reserve(a.size() + 1);
  out.push_back({q, Term::iri(kRdfType), Term::iri(kRdfStatement)});
  out.push_back({q, Term::iri(kRdfSubject), constant_term(*a.get(Attr::Subject))});
  out.push_back({q, Term::iri(kRdfPredicate), constant_term(*a.get(Attr::Property))});
  out.push_back({q, Term::iri(kRdfObject), constant_term(*a.get(Attr::Object))});
  for (const auto& [k, v] : a.entries()) {
    const auto kind = k.attribute().kind();
    if (kind == Attr::Subject || kind == Attr::Property || kind == Attr::Object) continue;
    out.push_back({q, attribute_predicate(k.attribute()), constant_term(v)});
  }
  return out;
}

struct ReifiedStatement {
  Term statement;
  Alist alist;
};

/// Groups triples by statement node (in order of first appearance) and
/// rebuilds one alist per rdf:Statement. Every subject in the input must be
/// a well-formed reified statement.
inline std::vector<ReifiedStatement> from_rdf_reified_statements(const std::vector<Triple>& triples) {
  std::vector<Term> order;
  std::map<std::string, std::vector<const Triple*>> groups;
  for (const auto& t : triples) {
    const auto id = t.subject.to_ntriples();
    auto [it, inserted] = groups.try_emplace(id);
    if (inserted) order.push_back(t.subject);
    it->second.push_back(&t);
  }

  std::vector<ReifiedStatement> out;
  out.reserve(order.size());
  for (const auto& subject : order) {
    const auto id = subject.to_ntriples();
    const auto& group = groups.at(id);
    int typed = 0;
    const Term* core[3] = {nullptr, nullptr, nullptr};
    Alist a;
    for (const Triple* t : group) {
      const auto& pred = t->predicate.value;
      if (pred == kRdfType) {
        if (t->object.kind != Term::Kind::Iri || t->object.value != kRdfStatement) {
          throw MalformedReificationError(id + " has an rdf:type other than rdf:Statement");
        }
        ++typed;
        continue;
      }
      int slot = pred == kRdfSubject ? 0 : pred == kRdfPredicate ? 1 : pred == kRdfObject ? 2 : -1;
      if (slot >= 0) {
        if (core[slot]) throw MalformedReificationError(id + " repeats <" + pred + ">");
        core[slot] = &t->object;
        continue;
      }
      if (pred.rfind(kAttributeNs, 0) != 0) {
        throw MalformedReificationError(id + " uses predicate <" + pred + "> outside the alist namespace");
      }
      const auto symbol = detail::percent_decode(std::string_view(pred).substr(kAttributeNs.size()));
      std::optional<AttributeName> name;
      try {
        name = AttributeName::parse(symbol);
      } catch (const InvariantError& e) {
        throw MalformedReificationError(id + ": " + e.what());
      }
      const auto k = name->kind();
      if (k == Attr::Subject || k == Attr::Property || k == Attr::Object) {
        throw MalformedReificationError(id + " carries '" + symbol + "' outside rdf:subject/predicate/object");
      }
      if (a.has(*name)) throw MalformedReificationError(id + " repeats attribute '" + symbol + "'");
      a.set(*name, term_value(t->object));
    }
    if (typed != 1) {
      throw MalformedReificationError(id + (typed == 0 ? " is not typed rdf:Statement" : " is typed more than once"));
    }
    static constexpr const char* kCoreNames[3] = {"rdf:subject", "rdf:predicate", "rdf:object"};
    static constexpr Attr kCoreAttrs[3] = {Attr::Subject, Attr::Property, Attr::Object};
    for (int i = 0; i < 3; ++i) {
      if (!core[i]) throw MalformedReificationError(id + " has no " + kCoreNames[i]);
      a.set(kCoreAttrs[i], term_value(*core[i]));
    }
    out.push_back({subject, std::move(a)});
  }
  return out;
}

inline std::vector<Alist> from_rdf_reified(const std::vector<Triple>& triples) {
  std::vector<Alist> out;
  for (auto& st : from_rdf_reified_statements(triples)) out.push_back(std::move(st.alist));
  return out;
}

}  // namespace alist::rdf
