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

// Text syntax for formulas:
//
//   formula  := quant | impl
//   quant    := ("forall" | "exists") var ["in" range] "." formula
//   impl     := or ["->" impl]
//   or       := and ("|" and)*
//   and      := unary ("&" unary)*
//   unary    := "~" unary | "(" formula ")" | quant | atom
//   atom     := name ["(" [term ("," term)*] ")"]
//   term     := var | constant | name "(" term ("," term)* ")"
//   range    := "[" int ".." int "]" | "[" constant ("," constant)* "]"
//
// Lowercase identifiers are variables, capitalized identifiers and quoted
// strings are constants, numbers are integer or real constants.

#include <cctype>
#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "alist/fol.hpp"

namespace alist::fol {

namespace detail {

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  Formula parse() {
    auto f = formula();
    skip_space();
    if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void error(const std::string& message) const { throw SyntaxError(message, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!accept(token)) error("expected '" + std::string(token) + "'");
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

  std::optional<std::string> peek_ident() {
    skip_space();
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) return std::nullopt;
    std::size_t end = pos_;
    while (end < text_.size() && ident_char(text_[end])) ++end;
    return std::string(text_.substr(pos_, end - pos_));
  }

  std::string ident() {
    auto id = peek_ident();
    if (!id) error("expected an identifier");
    pos_ += id->size();
    return *id;
  }

  bool accept_keyword(std::string_view kw) {
    auto id = peek_ident();
    if (id && *id == kw) {
      pos_ += kw.size();
      return true;
    }
    return false;
  }

  static bool is_variable_name(const std::string& name) {
    return std::islower(static_cast<unsigned char>(name.front())) != 0;
  }

  Formula formula() {
    if (auto q = quantifier()) return std::move(*q);
    return implication();
  }

  std::optional<Formula> quantifier() {
    const auto save = pos_;
    Formula::Kind kind;
    if (accept_keyword("forall")) {
      kind = Formula::Kind::Forall;
    } else if (accept_keyword("exists")) {
      kind = Formula::Kind::Exists;
    } else {
      return std::nullopt;
    }
    if (!peek_ident()) {
      pos_ = save;
      return std::nullopt;
    }
    const auto var = ident();
    if (!is_variable_name(var)) error("quantified variable '" + var + "' must start with a lowercase letter");
    std::optional<Range> range;
    if (accept_keyword("in")) range = parse_range();
    expect(".");
    return quantified(kind, var, formula(), std::move(range));
  }

  Range parse_range() {
    expect("[");
    Range out;
    auto first = constant();
    if (accept("..")) {
      auto last = constant();
      if (!std::holds_alternative<std::int64_t>(first) || !std::holds_alternative<std::int64_t>(last)) {
        error("a '..' range needs integer bounds");
      }
      const auto lo = std::get<std::int64_t>(first);
      const auto hi = std::get<std::int64_t>(last);
      if (hi < lo) error("empty range");
      for (auto i = lo; i <= hi; ++i) out.push_back(i);
    } else {
      out.push_back(std::move(first));
      while (accept(",")) out.push_back(constant());
    }
    expect("]");
    return out;
  }

  Formula implication() {
    auto left = disjunction();
    if (accept("->")) return implies(std::move(left), implication());
    return left;
  }

  Formula disjunction() {
    auto left = conjunction();
    while (accept("|")) left = disj(std::move(left), conjunction());
    return left;
  }

  Formula conjunction() {
    auto left = unary();
    while (accept("&")) left = conj(std::move(left), unary());
    return left;
  }

  Formula unary() {
    if (accept("~")) return neg(unary());
    if (accept("(")) {
      auto f = formula();
      expect(")");
      return f;
    }
    if (auto q = quantifier()) return std::move(*q);
    return atom();
  }

  Formula atom() {
    const auto name = ident();
    std::vector<Term> args;
    if (accept("(")) {
      if (!accept(")")) {
        do {
          args.push_back(term());
        } while (accept(","));
        expect(")");
      }
    }
    return pred(name, std::move(args));
  }

  Term term() {
    skip_space();
    if (pos_ < text_.size() && (text_[pos_] == '"' || text_[pos_] == '-' ||
                                std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0)) {
      return Term::constant(constant());
    }
    const auto name = ident();
    if (accept("(")) {
      std::vector<Term> args;
      if (accept(")")) error("function '" + name + "' needs arguments");
      do {
        args.push_back(term());
      } while (accept(","));
      expect(")");
      return Term::function(name, std::move(args));
    }
    if (is_variable_name(name)) return Term::variable(name);
    return Term::constant(name);
  }

  Constant constant() {
    skip_space();
    if (pos_ >= text_.size()) error("expected a constant");
    const char c = text_[pos_];
    if (c == '"') return quoted();
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c)) != 0) return number();
    const auto name = ident();
    if (is_variable_name(name)) error("expected a constant, got variable '" + name + "'");
    return name;
  }

  std::string quoted() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += text_[pos_++];
    }
    if (pos_ >= text_.size()) error("unterminated string");
    ++pos_;
    return out;
  }

  Constant number() {
    std::size_t end = pos_;
    if (text_[end] == '-') ++end;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end])) != 0) ++end;
    bool real = false;
    if (end + 1 < text_.size() && text_[end] == '.' && std::isdigit(static_cast<unsigned char>(text_[end + 1])) != 0) {
      real = true;
      ++end;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end])) != 0) ++end;
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      real = true;
      ++end;
      if (end < text_.size() && (text_[end] == '+' || text_[end] == '-')) ++end;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end])) != 0) ++end;
    }
    const auto token = text_.substr(pos_, end - pos_);
    if (token == "-") error("expected a number");
    if (real) {
      const double d = std::stod(std::string(token));
      pos_ = end;
      return d;
    }
    std::int64_t n = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), n);
    if (ec != std::errc() || ptr != token.data() + token.size()) error("integer out of range");
    pos_ = end;
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline bool attach_range_at(Formula& f, const std::string& var, const Range& range) {
  if (f.is_quantifier() && f.name == var) {
    f.range = range;
    return true;
  }
  for (auto& g : f.operands) {
    if (attach_range_at(g, var, range)) return true;
  }
  return false;
}

}  // namespace detail

inline Formula parse_formula(std::string_view text) { return detail::FormulaParser(text).parse(); }

/// Bounds the (outermost) quantifier over `var` by `range`.
inline Formula attach_range(Formula f, const std::string& var, const Range& range) {
  if (!detail::attach_range_at(f, var, range)) {
    throw UnsupportedFormulaError("no quantifier binds '" + var + "'");
  }
  return f;
}

/// "2022..2031" or "A,B,C" to a range.
inline Range parse_range_text(std::string_view text) {
  return detail::FormulaParser("forall x in [" + std::string(text) + "]. P()").parse().range.value();
}

}  // namespace alist::fol
