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

// First-order formulas and their translation into alists.
//
// The pipeline is: to_prenex -> dual_skolemise -> translate. Universal
// variables become Skolem constants (they must not be instantiated);
// existential and free variables become alist variables. A universal
// quantifier may carry an explicit finite range, which survives as a
// `range` child of the Skolem constant and can later be expanded into one
// query per value.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "alist/core.hpp"

namespace alist::fol {

struct Term {
  enum class Kind { Constant, Variable, Function };

  Kind kind = Kind::Constant;
  std::string name;        // variable or function name
  alist::Constant value;   // constants only
  std::vector<Term> args;  // functions only

  static Term constant(alist::Constant c) {
    Term t;
    t.kind = Kind::Constant;
    t.value = std::move(c);
    return t;
  }
  static Term variable(std::string n) {
    Term t;
    t.kind = Kind::Variable;
    t.name = std::move(n);
    return t;
  }
  static Term function(std::string n, std::vector<Term> a) {
    if (a.empty()) throw UnsupportedFormulaError("function '" + n + "' needs arguments; nullary functions are constants");
    Term t;
    t.kind = Kind::Function;
    t.name = std::move(n);
    t.args = std::move(a);
    return t;
  }

  bool is_constant() const noexcept { return kind == Kind::Constant; }
  bool is_variable() const noexcept { return kind == Kind::Variable; }
  bool is_function() const noexcept { return kind == Kind::Function; }

  friend bool operator==(const Term&, const Term&) = default;
};

using Range = std::vector<alist::Constant>;

struct Formula {
  enum class Kind { Predicate, And, Or, Not, Implies, Forall, Exists };

  Kind kind = Kind::Predicate;
  std::string name;               // predicate name, or the bound variable
  std::vector<Term> args;         // predicates
  std::vector<Formula> operands;  // connectives and quantifier bodies
  std::optional<Range> range;     // bounded quantifiers

  bool is_quantifier() const noexcept { return kind == Kind::Forall || kind == Kind::Exists; }
  bool is_literal() const noexcept {
    return kind == Kind::Predicate || (kind == Kind::Not && operands[0].kind == Kind::Predicate);
  }
  const Formula& body() const { return operands.at(0); }
  const Formula& left() const { return operands.at(0); }
  const Formula& right() const { return operands.at(1); }

  friend bool operator==(const Formula&, const Formula&) = default;
};

inline Formula pred(std::string name, std::vector<Term> args = {}) {
  Formula f;
  f.kind = Formula::Kind::Predicate;
  f.name = std::move(name);
  f.args = std::move(args);
  return f;
}

inline Formula binary(Formula::Kind kind, Formula l, Formula r) {
  Formula f;
  f.kind = kind;
  f.operands.push_back(std::move(l));
  f.operands.push_back(std::move(r));
  return f;
}

inline Formula conj(Formula l, Formula r) { return binary(Formula::Kind::And, std::move(l), std::move(r)); }
inline Formula disj(Formula l, Formula r) { return binary(Formula::Kind::Or, std::move(l), std::move(r)); }
inline Formula implies(Formula l, Formula r) {
  return binary(Formula::Kind::Implies, std::move(l), std::move(r));
}

inline Formula neg(Formula g) {
  Formula f;
  f.kind = Formula::Kind::Not;
  f.operands.push_back(std::move(g));
  return f;
}

inline Formula quantified(Formula::Kind kind, std::string var, Formula body,
                          std::optional<Range> range = std::nullopt) {
  Formula f;
  f.kind = kind;
  f.name = std::move(var);
  f.operands.push_back(std::move(body));
  f.range = std::move(range);
  return f;
}

inline Formula forall(std::string var, Formula body, std::optional<Range> range = std::nullopt) {
  return quantified(Formula::Kind::Forall, std::move(var), std::move(body), std::move(range));
}
inline Formula exists(std::string var, Formula body, std::optional<Range> range = std::nullopt) {
  return quantified(Formula::Kind::Exists, std::move(var), std::move(body), std::move(range));
}

// ---------------------------------------------------------------------------
// Printing

inline std::string to_string(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Variable:
      return t.name;
    case Term::Kind::Constant:
      if (std::holds_alternative<std::string>(t.value)) return "\"" + std::get<std::string>(t.value) + "\"";
      return render_constant(t.value);
    case Term::Kind::Function: {
      std::string out = t.name + "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += ", ";
        out += to_string(t.args[i]);
      }
      return out + ")";
    }
  }
  return {};
}

namespace detail {
inline bool extends_right(const Formula& f) {
  if (f.is_quantifier()) return true;
  return f.kind == Formula::Kind::Not && extends_right(f.body());
}
}  // namespace detail

inline std::string to_string(const Formula& f) {
  const auto lhs = [](const Formula& g) {
    return detail::extends_right(g) ? "(" + to_string(g) + ")" : to_string(g);
  };
  switch (f.kind) {
    case Formula::Kind::Predicate: {
      std::string out = f.name + "(";
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (i) out += ", ";
        out += to_string(f.args[i]);
      }
      return out + ")";
    }
    case Formula::Kind::And:
      return "(" + lhs(f.left()) + " & " + to_string(f.right()) + ")";
    case Formula::Kind::Or:
      return "(" + lhs(f.left()) + " | " + to_string(f.right()) + ")";
    case Formula::Kind::Implies:
      return "(" + lhs(f.left()) + " -> " + to_string(f.right()) + ")";
    case Formula::Kind::Not:
      return "~" + to_string(f.body());
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      std::string out = f.kind == Formula::Kind::Forall ? "forall " : "exists ";
      out += f.name;
      if (f.range) {
        out += " in [";
        for (std::size_t i = 0; i < f.range->size(); ++i) {
          if (i) out += ", ";
          out += render_constant((*f.range)[i]);
        }
        out += "]";
      }
      return out + ". " + to_string(f.body());
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Variables

namespace detail {

inline void term_vars(const Term& t, std::vector<std::string>& out) {
  if (t.is_variable()) {
    if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
  } else if (t.is_function()) {
    for (const auto& a : t.args) term_vars(a, out);
  }
}

inline void free_vars(const Formula& f, std::vector<std::string>& bound, std::vector<std::string>& out) {
  if (f.kind == Formula::Kind::Predicate) {
    std::vector<std::string> vs;
    for (const auto& a : f.args) term_vars(a, vs);
    for (const auto& v : vs) {
      if (std::find(bound.begin(), bound.end(), v) == bound.end() &&
          std::find(out.begin(), out.end(), v) == out.end()) {
        out.push_back(v);
      }
    }
    return;
  }
  if (f.is_quantifier()) {
    bound.push_back(f.name);
    free_vars(f.body(), bound, out);
    bound.pop_back();
    return;
  }
  for (const auto& g : f.operands) free_vars(g, bound, out);
}

inline void all_names(const Term& t, std::set<std::string>& out) {
  if (t.is_variable()) out.insert(t.name);
  if (t.is_function()) {
    out.insert(t.name);
    for (const auto& a : t.args) all_names(a, out);
  }
  if (t.is_constant() && std::holds_alternative<std::string>(t.value)) out.insert(std::get<std::string>(t.value));
}

inline void all_names(const Formula& f, std::set<std::string>& out) {
  if (f.is_quantifier()) out.insert(f.name);
  for (const auto& a : f.args) all_names(a, out);
  for (const auto& g : f.operands) all_names(g, out);
}

}  // namespace detail

/// Free variables in order of first appearance.
inline std::vector<std::string> free_variables(const Formula& f) {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  detail::free_vars(f, bound, out);
  return out;
}

inline std::vector<std::string> term_variables(const Term& t) {
  std::vector<std::string> out;
  detail::term_vars(t, out);
  return out;
}

/// Replaces free occurrences of variable `from` with `to`.
inline Term substitute(const Term& t, const std::string& from, const Term& to) {
  if (t.is_variable()) return t.name == from ? to : t;
  if (t.is_function()) {
    Term out = t;
    for (auto& a : out.args) a = substitute(a, from, to);
    return out;
  }
  return t;
}

inline Formula substitute(const Formula& f, const std::string& from, const Term& to) {
  if (f.is_quantifier() && f.name == from) return f;  // shadowed
  Formula out = f;
  for (auto& a : out.args) a = substitute(a, from, to);
  for (auto& g : out.operands) g = substitute(g, from, to);
  return out;
}

// ---------------------------------------------------------------------------
// Prenex form

namespace detail {

inline Formula negation_normal_form(const Formula& f, bool negate) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::Predicate:
      return negate ? neg(f) : f;
    case K::Not:
      return negation_normal_form(f.body(), !negate);
    case K::And:
    case K::Or: {
      const bool to_and = (f.kind == K::And) != negate;
      return binary(to_and ? K::And : K::Or, negation_normal_form(f.left(), negate),
                    negation_normal_form(f.right(), negate));
    }
    case K::Forall:
    case K::Exists: {
      const bool universal = (f.kind == K::Forall) != negate;
      return quantified(universal ? K::Forall : K::Exists, f.name, negation_normal_form(f.body(), negate),
                        f.range);
    }
    case K::Implies:
      break;
  }
  throw UnsupportedFormulaError("implication is not part of the input language; rewrite a -> b as ~a | b");
}

class RenameApart {
 public:
  explicit RenameApart(const Formula& f) {
    for (const auto& v : free_variables(f)) used_.insert(v);
    all_names(f, reserved_);
  }

  Formula run(const Formula& f) {
    if (f.is_quantifier()) {
      std::string name = f.name;
      Formula body = f.body();
      if (used_.count(name) != 0) {
        name = fresh(f.name);
        body = substitute(body, f.name, Term::variable(name));
      }
      used_.insert(name);
      return quantified(f.kind, name, run(body), f.range);
    }
    Formula out = f;
    for (auto& g : out.operands) g = run(g);
    return out;
  }

 private:
  std::string fresh(const std::string& base) {
    for (int i = 1;; ++i) {
      auto candidate = base + "_" + std::to_string(i);
      if (used_.count(candidate) == 0 && reserved_.count(candidate) == 0) return candidate;
    }
  }

  std::set<std::string> used_;
  std::set<std::string> reserved_;
};

struct Quantifier {
  Formula::Kind kind;
  std::string var;
  std::optional<Range> range;
};

inline void pull_quantifiers(const Formula& f, std::vector<Quantifier>& prefix, Formula& matrix) {
  using K = Formula::Kind;
  if (f.is_quantifier()) {
    prefix.push_back({f.kind, f.name, f.range});
    pull_quantifiers(f.body(), prefix, matrix);
    return;
  }
  if (f.kind == K::And || f.kind == K::Or) {
    Formula l, r;
    pull_quantifiers(f.left(), prefix, l);
    pull_quantifiers(f.right(), prefix, r);
    matrix = binary(f.kind, std::move(l), std::move(r));
    return;
  }
  matrix = f;
}

}  // namespace detail

/// Prenex form with negations pushed onto literals. Bound variables are
/// renamed apart first (x -> x_1) only where they clash; quantifiers keep
/// their left-to-right order, so no universal moves past an existential.
inline Formula to_prenex(const Formula& f) {
  const auto nnf = detail::negation_normal_form(f, false);
  const auto renamed = detail::RenameApart(nnf).run(nnf);
  std::vector<detail::Quantifier> prefix;
  Formula matrix;
  detail::pull_quantifiers(renamed, prefix, matrix);
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) {
    matrix = quantified(it->kind, it->var, std::move(matrix), it->range);
  }
  return matrix;
}

inline bool is_prenex(const Formula& f) {
  const Formula* cur = &f;
  while (cur->is_quantifier()) cur = &cur->body();
  struct Check {
    static bool quantifier_free(const Formula& g) {
      if (g.is_quantifier()) return false;
      return std::all_of(g.operands.begin(), g.operands.end(), quantifier_free);
    }
  };
  return Check::quantifier_free(*cur);
}

// ---------------------------------------------------------------------------
// Dual Skolemisation

struct SkolemTerm {
  std::string name;                    // sk1, sk2, ...
  std::vector<std::string> free_args;  // existential variables in scope
  std::optional<Range> range;          // carried over from a bounded forall

  Term as_term() const {
    if (free_args.empty()) return Term::constant(name);
    std::vector<Term> args;
    for (const auto& a : free_args) args.push_back(Term::variable(a));
    return Term::function(name, std::move(args));
  }

  /// The constant that stands for this term inside an alist.
  std::string rendered() const {
    if (free_args.empty()) return name;
    std::string out = name + "(";
    for (std::size_t i = 0; i < free_args.size(); ++i) {
      if (i) out += ",";
      out += free_args[i];
    }
    return out + ")";
  }

  friend bool operator==(const SkolemTerm&, const SkolemTerm&) = default;
};

struct Skolemised {
  Formula matrix;                         // quantifier-free
  std::vector<SkolemTerm> skolems;        // one per universal, in prefix order
  std::vector<std::string> existentials;  // in prefix order
  std::map<std::string, Range> existential_ranges;

  const SkolemTerm* find(std::string_view name) const {
    for (const auto& s : skolems) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }
};

/// Walks the prefix of a prenex formula: a universal becomes a fresh
/// Skolem term over the existentials seen so far, an existential stays a
/// free variable.
inline Skolemised dual_skolemise(const Formula& prenex) {
  if (!is_prenex(prenex)) throw UnsupportedFormulaError("dual_skolemise expects a prenex formula");
  std::set<std::string> names;
  detail::all_names(prenex, names);

  Skolemised out;
  std::vector<std::string> scope;  // V, in order of appearance
  int counter = 0;
  const Formula* cur = &prenex;
  std::vector<std::pair<std::string, Term>> replacements;
  while (cur->is_quantifier()) {
    if (cur->kind == Formula::Kind::Forall) {
      std::string name;
      do {
        name = "sk" + std::to_string(++counter);
      } while (names.count(name) != 0);
      SkolemTerm sk{name, scope, cur->range};
      replacements.emplace_back(cur->name, sk.as_term());
      out.skolems.push_back(std::move(sk));
    } else {
      scope.push_back(cur->name);
      out.existentials.push_back(cur->name);
      if (cur->range) out.existential_ranges.emplace(cur->name, *cur->range);
    }
    cur = &cur->body();
  }
  out.matrix = *cur;
  for (const auto& [from, to] : replacements) out.matrix = substitute(out.matrix, from, to);
  return out;
}

// ---------------------------------------------------------------------------
// Translation to alists

struct TranslateOptions {
  /// FOL variable that becomes the projection variable. When unset, an
  /// atomic query projects its first free variable and a compound query
  /// projects nothing.
  std::optional<std::string> query_var;
  /// Binary relations use s/o (ternary adds t, quaternary l) instead of
  /// arg1..argN. Comparison predicates always use argN.
  bool relational = true;
  /// Underscores in predicate and function names become spaces.
  bool humanize_names = true;
  /// A conjunction of two atoms sharing exactly one variable nests the
  /// second under that variable instead of building an h:AND alist.
  bool nest_joins = true;
};

/// Atoms headed by these names become operation alists {h:op, v:[...]}.
/// For rank only the first argument is an operand; the rest are parameters.
inline bool is_operation_predicate(std::string_view name) { return name == "equal" || name == "rank"; }

/// Function terms headed by these names, applied to one function term,
/// become aggregating alists {h:op, v:?o, ..., o:?o}.
inline bool is_aggregate_function(std::string_view name) {
  return name == "count" || name == "max" || name == "min" || name == "sum" || name == "avg";
}

inline bool is_comparison_predicate(std::string_view name) {
  static const std::set<std::string_view> kComparisons{"gt", "lt", "ge", "le", "geq", "leq",
                                                       "eq", "ne", "neq", "equal"};
  return kComparisons.count(name) != 0;
}

namespace detail {

class Translator {
 public:
  Translator(const Skolemised& sk, const TranslateOptions& opts) : sk_(sk), opts_(opts) {
    std::set<std::string> names;
    all_names(sk.matrix, names);
    for (const auto& n : names) fresh_.reserve(n);
    for (const auto& s : sk.skolems) fresh_.reserve(s.name);

    const auto vars = free_variables(sk.matrix);
    if (opts.query_var) {
      if (std::find(vars.begin(), vars.end(), *opts.query_var) == vars.end()) {
        throw UnsupportedFormulaError("query variable '" + *opts.query_var +
                                      "' is not free after Skolemisation");
      }
      projection_ = *opts.query_var;
    } else if ((sk.matrix.is_literal() || join_variable(sk.matrix)) && !vars.empty()) {
      projection_ = vars.front();
    }
  }

  /// The single variable shared by the two atoms of a nestable conjunction.
  std::optional<std::string> join_variable(const Formula& f) const {
    if (!opts_.nest_joins || f.kind != Formula::Kind::And) return std::nullopt;
    if (f.left().kind != Formula::Kind::Predicate || f.right().kind != Formula::Kind::Predicate) return std::nullopt;
    const auto lv = free_variables(f.left());
    std::vector<std::string> shared;
    for (const auto& v : free_variables(f.right())) {
      if (std::find(lv.begin(), lv.end(), v) != lv.end()) shared.push_back(v);
    }
    if (shared.size() != 1) return std::nullopt;
    return shared.front();
  }

  Alist formula(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind) {
      case K::Predicate:
        return is_operation_predicate(f.name) ? operation(f) : proposition(f);
      case K::Not: {
        if (f.body().kind == K::Predicate) {
          Alist inner = proposition(f.body());
          inner.set(Attr::Operation, "NOT");
          return inner;
        }
        const auto key = key_for(f.body());
        Alist out;
        out.set(Attr::Operation, "NOT");
        out.set(Attr::OperationVariable, key);
        out.set(key, AlistValue(formula(f.body())));
        return out;
      }
      case K::And:
      case K::Or: {
        if (auto z = join_variable(f)) return join(f, *z);
        const auto lk = key_for(f.left());
        auto rk = key_for(f.right());
        if (rk == lk) rk = fresh_.next(VarKind::Auxiliary);
        Alist out;
        out.set(Attr::Operation, f.kind == K::And ? "AND" : "OR");
        out.set(Attr::OperationVariable, AlistValue::List{lk, rk});
        out.set(lk, AlistValue(formula(f.left())));
        out.set(rk, AlistValue(formula(f.right())));
        return out;
      }
      default:
        throw UnsupportedFormulaError("unexpected " + to_string(f) + " in a Skolemised matrix");
    }
  }

  /// {p:P, arg1:T1, ..., argN:TN}, or the relational s/o/t/l layout.
  Alist proposition(const Formula& f) {
    Alist out;
    out.set(Attr::Property, display_name(f.name));
    const auto keys = argument_keys(f.name, f.args.size());
    for (std::size_t i = 0; i < f.args.size(); ++i) out.set(keys[i], term(f.args[i], out));
    attach_ranges(out);
    return out;
  }

  /// Fresh auxiliary variable plus {p:G, arg1:T1', ..., o:$v}. The
  /// relational layout puts T1' under s and further arguments under t, l.
  std::pair<VariableRef, Alist> function(const Term& g) {
    if (is_aggregate_function(g.name) && g.args.size() == 1 && g.args[0].is_function() &&
        !sk_.find(g.args[0].name)) {
      return aggregate(g);
    }
    const auto v = fresh_.next(VarKind::Auxiliary);
    Alist out;
    out.set(Attr::Property, display_name(g.name));
    const bool relational = opts_.relational && g.args.size() <= 3;
    static const Attr kRelational[] = {Attr::Subject, Attr::Time, Attr::Location};
    for (std::size_t i = 0; i < g.args.size(); ++i) {
      const Key key = relational ? Key(kRelational[i]) : Key(AttributeName::custom("arg" + std::to_string(i + 1)));
      out.set(key, term(g.args[i], out));
    }
    out.set(Attr::Object, v);
    attach_ranges(out);
    return {v, std::move(out)};
  }

  /// op(G(...)) as {h:op, v:?o, <G's alist with o:?o>} under a fresh key.
  std::pair<VariableRef, Alist> aggregate(const Term& g) {
    const auto key = fresh_.next(VarKind::Auxiliary);
    auto [inner_var, out] = function(g.args[0]);
    const VariableRef projected(VarKind::Projection, inner_var.name);
    out.set(Attr::Object, projected);
    out.set(Attr::Operation, g.name);
    out.set(Attr::OperationVariable, projected);
    return {key, std::move(out)};
  }

  /// op(T1, ..., Tn) as {h:op, v:[k1, ..., kn]}: variables are operands as
  /// they stand, constants and function terms are attached under fresh
  /// keys. A lone function operand is merged into the alist itself.
  Alist operation(const Formula& f) {
    Alist out;
    out.set(Attr::Operation, f.name);
    const std::size_t operands = f.name == "rank" ? std::min<std::size_t>(1, f.args.size()) : f.args.size();
    const bool merge = operands == 1 && f.args[0].is_function() && !sk_.find(f.args[0].name);
    AlistValue::List v;
    for (std::size_t i = 0; i < f.args.size(); ++i) {
      const auto& t = f.args[i];
      if (i >= operands) {
        if (!t.is_constant()) throw UnsupportedFormulaError(f.name + " parameters must be constants: " + to_string(f));
        v.emplace_back(t.value);
      } else if (t.is_variable()) {
        v.emplace_back(variable(t.name));
      } else if (merge) {
        auto [o, body] = function(t);
        for (const auto& [k, value] : body.entries()) out.set(k, value);
        v.emplace_back(o);
      } else if (t.is_function() && !sk_.find(t.name)) {
        auto [key, child] = function(t);
        out.set(key, AlistValue(child));
        v.emplace_back(key);
      } else {
        const auto key = fresh_.next(VarKind::Auxiliary);
        out.set(key, term(t, out));
        v.emplace_back(key);
      }
    }
    if (v.size() == 1) {
      out.set(Attr::OperationVariable, v.front());
    } else {
      out.set(Attr::OperationVariable, std::move(v));
    }
    attach_ranges(out);
    return out;
  }

  /// L & R sharing only z: L's alist with R nested under z. R's copy of z
  /// is renamed to a fresh projection variable of the child's own scope.
  /// The atom holding the projection variable, if only one does, is the
  /// root.
  Alist join(const Formula& f, const std::string& z) {
    const Formula* root = &f.left();
    const Formula* nested = &f.right();
    if (projection_ && *projection_ != z) {
      const auto rv = free_variables(*nested);
      if (std::find(rv.begin(), rv.end(), *projection_) != rv.end()) std::swap(root, nested);
    }
    Alist out = formula(*root);
    const auto child_var = fresh_.next(VarKind::Projection);
    const auto child_formula = substitute(*nested, z, Term::variable(child_var.name));
    const auto saved = projection_;
    projection_ = child_var.name;
    Alist child = formula(child_formula);
    projection_ = saved;
    out.set(variable(z), AlistValue(child));
    return out;
  }

  VariableRef variable(const std::string& name) const {
    return VariableRef(projection_ && *projection_ == name ? VarKind::Projection : VarKind::Auxiliary, name);
  }

 private:
  std::vector<AttributeName> argument_keys(const std::string& pred_name, std::size_t n) const {
    std::vector<AttributeName> keys;
    const bool relational = opts_.relational && !is_comparison_predicate(pred_name) && n >= 2 && n <= 4;
    static const Attr kRelational[] = {Attr::Subject, Attr::Object, Attr::Time, Attr::Location};
    for (std::size_t i = 0; i < n; ++i) {
      keys.push_back(relational ? AttributeName(kRelational[i])
                                : AttributeName::custom("arg" + std::to_string(i + 1)));
    }
    return keys;
  }

  std::string display_name(const std::string& name) const {
    if (!opts_.humanize_names) return name;
    std::string out = name;
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
  }

  AlistValue term(const Term& t, Alist& host) {
    switch (t.kind) {
      case Term::Kind::Constant:
        if (std::holds_alternative<std::string>(t.value)) {
          if (const auto* s = sk_.find(std::get<std::string>(t.value))) {
            used_skolems_.insert(s->name);
          }
        }
        return AlistValue(t.value);
      case Term::Kind::Variable:
        return variable(t.name);
      case Term::Kind::Function: {
        if (const auto* s = sk_.find(t.name)) {
          used_skolems_.insert(s->name);
          return s->rendered();
        }
        auto [v, child] = function(t);
        host.set(v, AlistValue(child));
        return v;
      }
    }
    return {};
  }

  void attach_ranges(Alist& host) {
    for (const auto& name : used_skolems_) {
      const auto* s = sk_.find(name);
      if (!s || !s->range) continue;
      AlistValue::List values(s->range->begin(), s->range->end());
      Alist child;
      child.set(Attr::Subject, s->rendered());
      child.set(Attr::Property, "range");
      child.set(Attr::Object, AlistValue(std::move(values)));
      host.set(AttributeName::custom(s->rendered()), AlistValue(child));
    }
    used_skolems_.clear();
  }

  VariableRef key_for(const Formula& f) {
    if (f.is_literal()) {
      const auto vars = free_variables(f);
      if (projection_ && std::find(vars.begin(), vars.end(), *projection_) != vars.end()) {
        return variable(*projection_);
      }
      if (!vars.empty()) return variable(vars.front());
    }
    return fresh_.next(VarKind::Auxiliary);
  }

  const Skolemised& sk_;
  const TranslateOptions& opts_;
  std::optional<std::string> projection_;
  FreshVariables fresh_;
  std::set<std::string> used_skolems_;
};

}  // namespace detail

/// Proposition P(T1..Tn) as {p:P, arg1:T1, ...}. The query variable
/// (default: first free variable) is projected, other free variables are
/// auxiliary.
inline Alist translate_proposition(const Formula& p, const TranslateOptions& opts = {std::nullopt, false}) {
  if (p.kind != Formula::Kind::Predicate) throw UnsupportedFormulaError("not a predicate: " + to_string(p));
  Skolemised sk;
  sk.matrix = p;
  TranslateOptions o = opts;
  if (!o.query_var) {
    const auto vars = free_variables(p);
    if (!vars.empty()) o.query_var = vars.front();
  }
  return detail::Translator(sk, o).proposition(p);
}

/// Function term G(T1'..Tn') as a fresh auxiliary variable and the alist
/// whose object instantiates it.
inline std::pair<VariableRef, Alist> translate_function(const Term& g,
                                                      const TranslateOptions& opts = {std::nullopt, false}) {
  if (!g.is_function()) throw UnsupportedFormulaError("not a function term: " + to_string(g));
  Skolemised sk;
  sk.matrix = pred("_", {g});
  return detail::Translator(sk, opts).function(g);
}

/// Full pipeline: prenex, dual Skolemisation, then case-based translation.
/// Conjunctions and disjunctions become {h:AND|OR, v:[k1,k2], k1:A1, k2:A2};
/// negation becomes an h:NOT alist evaluated with the configured strategy.
inline Alist translate_formula(const Formula& f, const TranslateOptions& opts = {}) {
  const auto sk = dual_skolemise(to_prenex(f));
  if (!sk.existential_ranges.empty()) {
    throw UnsupportedFormulaError("bounded existential quantifiers are not supported");
  }
  detail::Translator translator(sk, opts);
  return translator.formula(sk.matrix);
}

// ---------------------------------------------------------------------------
// Range expansion

inline constexpr std::size_t kMaxRangeExpansion = 1000;

struct RangedConstant {
  AttributeName key;  // the custom attribute holding the range child
  std::string constant;
  AlistValue::List values;
};

/// Constants c in `a` that name a custom attribute whose child is
/// {s:c, p:range, o:[...]}.
inline std::vector<RangedConstant> ranged_constants(const Alist& a) {
  std::vector<RangedConstant> out;
  for (const auto& [k, v] : a.entries()) {
    if (!k.is_attribute() || !k.attribute().is_custom() || !v.is_nested()) continue;
    const Alist& child = v.nested();
    const auto* s = child.get(Attr::Subject);
    const auto* p = child.get(Attr::Property);
    const auto* o = child.get(Attr::Object);
    if (!s || !p || !o || !s->is_string() || !p->is_string() || !o->is_list()) continue;
    if (p->as_string() != "range" || s->as_string() != k.attribute().symbol()) continue;
    out.push_back({k.attribute(), s->as_string(), o->list()});
  }
  return out;
}

struct RangeExpansion {
  std::vector<Alist> queries;
  /// Set when the product of the ranges exceeds kMaxRangeExpansion; the
  /// Skolemised form is then left as is.
  bool unexpanded = false;
};

/// One query per combination of range values, in range order, with the
/// range children removed.
inline RangeExpansion expand_ranges(const Alist& a, std::size_t limit = kMaxRangeExpansion) {
  const auto ranges = ranged_constants(a);
  RangeExpansion out;
  if (ranges.empty()) return out;
  std::size_t total = 1;
  for (const auto& r : ranges) {
    if (r.values.empty()) return out;
    total *= r.values.size();
    if (total > limit) {
      out.unexpanded = true;
      return out;
    }
  }
  Alist base = a;
  for (const auto& r : ranges) base.erase(r.key);

  std::vector<std::size_t> idx(ranges.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    Alist q;
    for (const auto& [k, v] : base.entries()) {
      AlistValue value = v;
      if (v.is_string()) {
        for (std::size_t i = 0; i < ranges.size(); ++i) {
          if (v.as_string() == ranges[i].constant) value = ranges[i].values[idx[i]];
        }
      }
      q.set(k, std::move(value));
    }
    for (const auto& [k, v] : base.bindings()) q.bind(k, v);
    out.queries.push_back(std::move(q));
    for (std::size_t i = ranges.size(); i-- > 0;) {
      if (++idx[i] < ranges[i].values.size()) break;
      idx[i] = 0;
    }
  }
  return out;
}

}  // namespace alist::fol
