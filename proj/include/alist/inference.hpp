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

// Query answering by decomposition and aggregation.
//
// A query is resolved top-down. Nested alists are normalized into simple
// ones linked by variables; a simple alist is first retrieved from the
// knowledge sources, and when that fails it is decomposed (partition on
// s, o or l via partOf, then sequence over a configured range) and the
// children's values are reduced back into it with its operation h. Every
// step becomes a node of the inference graph.

#include <algorithm>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "alist/core.hpp"
#include "alist/fol.hpp"
#include "alist/json_format.hpp"
#include "alist/kb.hpp"
#include "alist/registry.hpp"

namespace alist {

inline constexpr std::string_view kPartOf = "partOf";
inline constexpr std::size_t kMaxInstantiations = 1000;

enum class NotStrategy { ClosedWorld, FailureAsNegation, FunctionalDifference };

inline std::string_view to_string(NotStrategy s) {
  switch (s) {
    case NotStrategy::ClosedWorld:
      return "closed_world";
    case NotStrategy::FailureAsNegation:
      return "failure_as_negation";
    case NotStrategy::FunctionalDifference:
      return "functional_difference";
  }
  return "";
}

inline NotStrategy parse_not_strategy(std::string_view s) {
  if (s == "closed_world") return NotStrategy::ClosedWorld;
  if (s == "failure_as_negation") return NotStrategy::FailureAsNegation;
  if (s == "functional_difference") return NotStrategy::FunctionalDifference;
  throw ConfigError("unknown negation strategy '" + std::string(s) +
                    "' (closed_world, failure_as_negation, functional_difference)");
}

struct Environment {
  int max_depth = 3;  // partition/sequence levels below a retrieval failure
  NotStrategy not_strategy = NotStrategy::ClosedWorld;
  /// Values to sequence an attribute over when retrieval fails, keyed by
  /// attribute symbol (normally "t").
  std::map<std::string, AlistValue::List> sequence_ranges;
  /// Properties known to be unique-valued, for functional difference.
  std::set<std::string> functional_properties;
  bool parallel = true;
  std::shared_ptr<const OperationRegistry> registry;

  const OperationRegistry& operations() const { return registry ? *registry : OperationRegistry::defaults(); }
};

// ---------------------------------------------------------------------------
// Graph

struct DecompositionRule {
  enum class Kind { Normalization, Partition, Sequence, Instantiation };

  Kind kind = Kind::Normalization;
  std::optional<AttributeName> attr;  // partition and sequence
  std::string relation;               // partition
  AlistValue::List values;            // sequence: the whole range; instantiation: the value
  std::optional<Key> key;             // normalization: the linking variable or attribute

  static DecompositionRule normalization(Key k) { return {Kind::Normalization, std::nullopt, {}, {}, std::move(k)}; }
  static DecompositionRule partition(AttributeName a, std::string relation) {
    return {Kind::Partition, std::move(a), std::move(relation), {}, std::nullopt};
  }
  static DecompositionRule sequence(AttributeName a, AlistValue::List values) {
    return {Kind::Sequence, std::move(a), {}, std::move(values), std::nullopt};
  }
  static DecompositionRule instantiation(VariableRef v, AlistValue value) {
    return {Kind::Instantiation, std::nullopt, {}, {std::move(value)}, Key(std::move(v))};
  }

  std::string describe() const {
    switch (kind) {
      case Kind::Normalization:
        return "normalization" + (key ? " " + key->render() : std::string());
      case Kind::Partition:
        return "partition " + attr->symbol() + " by " + relation;
      case Kind::Sequence:
        return "sequence " + attr->symbol();
      case Kind::Instantiation:
        return "instantiation " + key->render() + "=" + render_value(values.front());
    }
    return "";
  }
};

enum class NodeState { Unexplored, Retrieved, Reduced, Failed };

inline std::string_view to_string(NodeState s) {
  switch (s) {
    case NodeState::Unexplored:
      return "unexplored";
    case NodeState::Retrieved:
      return "retrieved";
    case NodeState::Reduced:
      return "reduced";
    case NodeState::Failed:
      return "failed";
  }
  return "";
}

struct InferenceNode {
  std::size_t id = 0;
  std::optional<std::size_t> parent;
  Alist alist;  // the node's query, with bindings once resolved
  std::optional<DecompositionRule> rule;  // how this node was derived from its parent
  std::vector<std::size_t> children;
  NodeState state = NodeState::Unexplored;
  std::optional<AlistValue> value;
  double uncertainty = 1.0;  // confidence in [0, 1], as stored under u
  std::set<std::string> sources;
  std::string explanation;
  bool transport_failed = false;
  bool depth_exceeded = false;
};

struct InferenceGraph {
  std::vector<InferenceNode> nodes;
  std::size_t root = 0;

  const InferenceNode& node(std::size_t id) const { return nodes.at(id); }
  const InferenceNode& root_node() const { return nodes.at(root); }
  bool empty() const noexcept { return nodes.empty(); }

  bool any_transport_failure() const {
    return std::any_of(nodes.begin(), nodes.end(), [](const InferenceNode& n) { return n.transport_failed; });
  }
};

class NoAnswerError : public Error {
 public:
  NoAnswerError(const std::string& message, InferenceGraph graph)
      : Error("NoAnswerError", message), graph_(std::move(graph)) {}

  const InferenceGraph& graph() const noexcept { return graph_; }

 protected:
  NoAnswerError(std::string kind, const std::string& message, InferenceGraph graph)
      : Error(std::move(kind), message), graph_(std::move(graph)) {}

 private:
  InferenceGraph graph_;
};

class DepthExceededError : public NoAnswerError {
 public:
  DepthExceededError(const std::string& message, InferenceGraph graph)
      : NoAnswerError("DepthExceededError", message, std::move(graph)) {}
};

struct InferenceResult {
  AlistValue answer;
  double uncertainty = 1.0;
  std::set<std::string> sources;
  InferenceGraph graph;
};

// ---------------------------------------------------------------------------
// Decomposition rules

struct LinkedChild {
  Key key;      // the variable the child instantiates in the root
  Alist child;  // canonical
};

struct Normalized {
  Alist root;
  std::vector<LinkedChild> children;
};

/// Splits off every nested alist. A nested value under a variable key is
/// linked through that variable; one under an attribute is replaced by a
/// fresh auxiliary variable first. Constants under variable keys become
/// bindings of the root.
inline Normalized normalize(const Alist& a) {
  Normalized out;
  FreshVariables fresh;
  fresh.reserve(global_scope(a));
  for (const auto& [k, v] : a.bindings()) out.root.bind(k, v);
  for (const auto& [k, v] : a.entries()) {
    if (k.is_var()) {
      if (v.is_nested()) {
        out.children.push_back({k, canonicalize(v.nested())});
      } else if (!out.root.binding(k.variable())) {
        out.root.bind(k.variable(), v);
      }
      continue;
    }
    if (v.is_nested()) {
      const auto link = fresh.next(VarKind::Auxiliary);
      out.root.set(k, link);
      out.children.push_back({link, canonicalize(v.nested())});
    } else if (v.is_list()) {
      AlistValue::List items;
      for (const auto& e : v.list()) {
        if (e.is_nested()) {
          const auto link = fresh.next(VarKind::Auxiliary);
          items.push_back(link);
          out.children.push_back({link, canonicalize(e.nested())});
        } else {
          items.push_back(e);
        }
      }
      out.root.set(k, AlistValue(std::move(items)));
    } else {
      out.root.set(k, v);
    }
  }
  return out;
}

/// Copies of `a` with its h and v replaced for a decomposition child: sum,
/// max and min distribute over parts and are kept; everything else asks
/// the child for the plain value of the aggregated variable.
inline Alist decomposition_child(const Alist& a, const std::optional<VariableRef>& aggregated);

inline std::optional<VariableRef> aggregated_variable(const Alist& a) {
  for (const auto& e : operation_variables(a)) {
    if (e.is_var()) return e.variable();
  }
  return projection_variable(a);
}

inline Alist decomposition_child(const Alist& a, const std::optional<VariableRef>& aggregated) {
  static const std::set<std::string> kDistributive{"sum", "max", "min"};
  Alist child = a;
  if (kDistributive.count(operation(a)) != 0) return child;
  child.set(Attr::Operation, "value");
  if (aggregated) {
    child.set(Attr::OperationVariable, *aggregated);
  } else {
    child.erase(Attr::OperationVariable);
  }
  return child;
}

namespace detail {

struct Retrieval {
  std::vector<RetrievalResult> rows;
  std::vector<std::string> notes;
  bool transport_failed = false;
};

inline Retrieval retrieve(const Alist& a, const KbSet& kbs) {
  Retrieval out;
  for (const auto& source : kbs.sources) {
    try {
      auto rows = execute(a, source, *kbs.transport);
      for (auto& r : rows) out.rows.push_back(std::move(r));
    } catch (const TransportError& e) {
      out.transport_failed = true;
      out.notes.push_back(source.name + ": " + e.what());
    } catch (const ParseError& e) {
      out.notes.push_back(source.name + ": " + e.what());
    } catch (const UnsupportedOperationError&) {
    } catch (const UnmappedPropertyError&) {
    } catch (const MissingSlotError&) {
    }
  }
  return out;
}

inline bool has_object_level(const Alist& a) {
  return std::any_of(kObjectLevelAttrs.begin(), kObjectLevelAttrs.end(), [&](Attr x) { return a.has(x); });
}

inline std::vector<AlistValue> params_of(const Alist& a) {
  auto elems = operation_variables(a);
  std::vector<AlistValue> out;
  bool first = true;
  for (auto& e : elems) {
    if (first) {
      first = false;
      if (e.is_var()) continue;
    }
    if (e.is_constant()) out.push_back(e);
  }
  return out;
}

inline bool value_less(const AlistValue& a, const AlistValue& b) {
  if (a.is_number() && b.is_number()) return a.as_number() < b.as_number();
  return emit_value_json(a) < emit_value_json(b);
}

}  // namespace detail

/// One child per entity e with <e, partOf, value(attr)> in the sources,
/// sorted by name; the child is `a` with attr replaced by e.
inline std::vector<Alist> partition(const Alist& a, const AttributeName& attr, const KbSet& kbs) {
  const auto kind = attr.kind();
  if (kind != Attr::Subject && kind != Attr::Object && kind != Attr::Location) {
    throw InvariantError("partition applies to s, o or l, not " + attr.symbol());
  }
  const auto* whole = a.get(attr);
  if (!whole) return {};
  const AlistValue resolved = whole->is_var() && a.binding(whole->variable()) ? *a.binding(whole->variable()) : *whole;
  if (!resolved.is_string()) return {};

  const VariableRef part(VarKind::Auxiliary, "part");
  Alist q;
  q.set(Attr::Operation, "value");
  q.set(Attr::OperationVariable, part);
  q.set(Attr::Subject, part);
  q.set(Attr::Property, std::string(kPartOf));
  q.set(Attr::Object, resolved);
  std::vector<AlistValue> parts;
  for (const auto& row : detail::retrieve(q, kbs).rows) {
    auto it = row.bindings.find(part);
    if (it != row.bindings.end() && it->second.is_constant()) parts.push_back(it->second);
  }
  std::sort(parts.begin(), parts.end(), detail::value_less);
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());

  std::vector<Alist> out;
  for (const auto& e : parts) {
    Alist child = a;
    if (whole->is_var()) {
      child.bind(whole->variable(), e);
    } else {
      child.set(attr, e);
    }
    out.push_back(std::move(child));
  }
  return out;
}

/// The i-th child is `a` with attr set to values[i].
inline std::vector<Alist> sequence(const Alist& a, const AttributeName& attr, const AlistValue::List& values) {
  if (values.empty()) throw InvariantError("sequence needs at least one value");
  if (attr.classification() != AttributeClass::ObjectLevel) {
    throw InvariantError("sequence applies to object-level attributes, not " + attr.symbol());
  }
  std::vector<Alist> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(a.with(attr, v));
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

struct AggregateOutcome {
  Alist parent;
  ReduceOutput output;
};

namespace detail {

inline void copy_sibling_bindings(Alist& parent, const Alist& from, const std::optional<VariableRef>& skip) {
  const auto scope = local_scope(parent);
  for (const auto& [k, v] : from.bindings()) {
    if (skip && k == *skip) continue;
    if (scope.count(k) != 0 && !parent.binding(k)) parent.bind(k, v);
  }
}

inline AggregateOutcome reduce_into(const std::string& op, const Alist& parent, std::vector<Operand> operands,
                                    const OperationRegistry& registry) {
  const auto aggregated = aggregated_variable(parent);
  ReduceInput in{parent, params_of(parent), std::move(operands)};
  auto out = registry.reduce(op, in);
  AggregateOutcome result{parent, out};
  if (out.failed) return result;
  if (aggregated) result.parent.bind(*aggregated, out.value);
  if (out.selected.size() == 1 && in.operands[out.selected.front()].alist) {
    copy_sibling_bindings(result.parent, *in.operands[out.selected.front()].alist, aggregated);
  }
  result.parent.set(Attr::Uncertainty, out.confidence);
  return result;
}

}  // namespace detail

/// Reduces the children's values of the parent's aggregated variable (the
/// first variable of v) with `op_name`. A child without that binding
/// counts as failed. The selected child's other bindings carry over when
/// the operation picks a single child.
inline Alist aggregate(const std::string& op_name, const Alist& parent, const std::vector<Alist>& children,
                       const OperationRegistry& registry = OperationRegistry::defaults()) {
  const auto aggregated = aggregated_variable(parent);
  std::vector<Operand> operands;
  for (const auto& child : children) {
    Operand o;
    o.alist = &child;
    const AlistValue* v = aggregated ? child.binding(*aggregated) : nullptr;
    if (v) {
      o.value = *v;
    } else {
      o.failed = true;
    }
    if (const auto* u = child.get(Attr::Uncertainty); u && u->is_number()) o.confidence = u->as_number();
    if (child.has(Attr::Time)) {
      const auto resolved = apply_bindings(child);
      o.time = time_as_number(*resolved.get(Attr::Time));
    }
    operands.push_back(std::move(o));
  }
  return detail::reduce_into(op_name, parent, std::move(operands), registry).parent;
}

// ---------------------------------------------------------------------------
// Negation

struct NotOutcome {
  Alist alist;  // the NOT alist with its variable bound, if it has one
  AlistValue value;
  double uncertainty = 1.0;
  std::set<std::string> sources;
  bool failed = false;
  bool transport_failed = false;
  std::string explanation;
};

/// Evaluates a simple h:NOT alist. closed_world binds the operation
/// variable to the complement of the positive answers within the values the
/// closed sources hold at the same attribute for the same property;
/// failure_as_negation is true iff the positive query finds nothing;
/// functional_difference retrieves the actual value of a unique-valued
/// property and is true iff it differs from the asserted one.
inline NotOutcome evaluate_not(const Alist& input, NotStrategy strategy, const KbSet& kbs, const Environment& env) {
  if (!is_simple(input)) throw NotSimpleError("evaluate_not takes a simple alist");
  const Alist a = apply_bindings(input);
  NotOutcome out;
  out.alist = input;
  auto positive = a.with(Attr::Operation, "value").without(Attr::OperationVariable);
  std::optional<VariableRef> target;
  for (const auto& e : operation_variables(a)) {
    if (e.is_var()) {
      target = e.variable();
      break;
    }
  }
  double confidence = 1.0;
  auto note_rows = [&](const detail::Retrieval& r) {
    for (const auto& row : r.rows) {
      out.sources.insert(row.source);
      confidence = std::min(confidence, row.confidence);
    }
    out.transport_failed = r.transport_failed;
  };

  switch (strategy) {
    case NotStrategy::ClosedWorld:
    case NotStrategy::FailureAsNegation: {
      if (!kbs.all_closed_world()) {
        throw OpenWorldError(std::string(to_string(strategy)) + " negation needs every source to be closed-world");
      }
      for (const auto& s : kbs.sources) confidence = std::min(confidence, s.confidence);
      const auto r = detail::retrieve(positive, kbs);
      note_rows(r);
      if (r.transport_failed) {
        out.failed = true;
        out.explanation = "retrieval incomplete; negation cannot be concluded";
        break;
      }
      if (strategy == NotStrategy::ClosedWorld && target) {
        std::optional<Key> role;
        for (const auto& [k, v] : a.entries()) {
          if (k.is_attribute() && k.attribute().classification() == AttributeClass::ObjectLevel && v.is_var() &&
              v.variable() == *target) {
            role = k;
            break;
          }
        }
        if (!role) throw InvariantError("NOT variable " + target->render() + " does not fill an object-level attribute");
        std::vector<AlistValue> known;
        for (const auto& row : r.rows) {
          if (auto it = row.bindings.find(*target); it != row.bindings.end()) known.push_back(it->second);
        }
        const auto* p = a.get(Attr::Property);
        std::vector<AlistValue> domain;
        for (const auto& s : kbs.sources) {
          if (!s.store) continue;
          for (const auto& fact : s.store->facts()) {
            if (p && p->is_constant() && !(fact.get(Attr::Property) && *fact.get(Attr::Property) == *p)) continue;
            const auto* v = fact.get(*role);
            if (v) domain.push_back(*v);
          }
        }
        std::sort(domain.begin(), domain.end(), detail::value_less);
        domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
        AlistValue::List complement;
        for (const auto& d : domain) {
          if (std::find(known.begin(), known.end(), d) == known.end()) complement.push_back(d);
        }
        out.value = AlistValue(std::move(complement));
        out.alist.bind(*target, out.value);
        out.explanation = "complement of " + std::to_string(known.size()) + " of " +
                          std::to_string(domain.size()) + " known values";
      } else {
        out.value = r.rows.empty();
        if (target) out.alist.bind(*target, out.value);
        out.explanation = r.rows.empty() ? "no instantiation found" : "positive goal holds";
      }
      break;
    }
    case NotStrategy::FunctionalDifference: {
      const auto* p = a.get(Attr::Property);
      if (!p || !p->is_string() || env.functional_properties.count(p->as_string()) == 0) {
        throw NotFunctionalError("property " + (p ? render_value(*p) : std::string("(none)")) +
                                 " is not declared functional");
      }
      const auto* asserted = a.get(Attr::Object);
      if (!asserted || !asserted->is_constant()) {
        throw NotFunctionalError("functional difference needs a constant asserted object");
      }
      FreshVariables fresh("actual");
      fresh.reserve(local_scope(a));
      const auto actual = fresh.next(VarKind::Projection);
      positive.set(Attr::Object, actual);
      positive.set(Attr::OperationVariable, actual);
      const auto r = detail::retrieve(positive, kbs);
      note_rows(r);
      std::vector<AlistValue> values;
      for (const auto& row : r.rows) {
        if (auto it = row.bindings.find(actual); it != row.bindings.end()) values.push_back(it->second);
      }
      if (values.empty()) {
        out.failed = true;
        out.explanation = "actual value not found";
        break;
      }
      const bool differs = std::none_of(values.begin(), values.end(),
                                        [&](const AlistValue& v) { return ops::values_equal(v, *asserted); });
      out.value = differs;
      if (target) out.alist.bind(*target, out.value);
      out.explanation = "actual " + render_value(values.front()) + (differs ? " differs from " : " equals ") +
                        render_value(*asserted);
      break;
    }
  }
  out.uncertainty = out.failed ? 0.0 : confidence;
  if (!out.failed) out.alist.set(Attr::Uncertainty, out.uncertainty);
  return out;
}

// ---------------------------------------------------------------------------
// Inference

namespace detail {

struct Subtree {
  InferenceNode node;
  std::vector<Subtree> children;
};

class Engine {
 public:
  Engine(const KbSet& kbs, const Environment& env) : kbs_(kbs), env_(env), ops_(env.operations()) {}

  Subtree resolve(const Alist& input, std::optional<DecompositionRule> rule, int depth) const {
    Subtree t;
    t.node.rule = std::move(rule);
    t.node.alist = canonicalize(input);
    try {
      if (!fol::ranged_constants(t.node.alist).empty()) {
        resolve_ranged(t, depth);
      } else if (!is_simple(t.node.alist)) {
        resolve_nested(t, depth);
      } else {
        resolve_simple(t, depth, {});
      }
    } catch (const UnknownOperationError&) {
      throw;
    } catch (const ArityError&) {
      throw;
    } catch (const AggregationError& e) {
      fail(t, e.describe());
    }
    return t;
  }

 private:
  struct Task {
    Alist alist;
    DecompositionRule rule;
    int depth;
  };

  std::vector<Subtree> resolve_all(std::vector<Task> tasks) const {
    std::vector<Subtree> out;
    out.reserve(tasks.size());
    if (!env_.parallel || tasks.size() < 2) {
      for (auto& task : tasks) out.push_back(resolve(task.alist, std::move(task.rule), task.depth));
      return out;
    }
    std::vector<std::future<Subtree>> futures;
    futures.reserve(tasks.size());
    for (auto& task : tasks) {
      futures.push_back(std::async(std::launch::async, [this, task = std::move(task)]() mutable {
        return resolve(task.alist, std::move(task.rule), task.depth);
      }));
    }
    for (auto& f : futures) f.wait();
    for (auto& f : futures) out.push_back(f.get());
    return out;
  }

  static void fail(Subtree& t, std::string why) {
    t.node.state = NodeState::Failed;
    t.node.value.reset();
    t.node.uncertainty = 0.0;
    if (!t.node.explanation.empty()) t.node.explanation += "; ";
    t.node.explanation += why;
  }

  static Operand operand_of(const Subtree& child) {
    Operand o;
    o.alist = &child.node.alist;
    o.confidence = child.node.uncertainty;
    if (child.node.state == NodeState::Failed || !child.node.value) {
      o.failed = true;
    } else {
      o.value = *child.node.value;
    }
    if (child.node.alist.has(Attr::Time)) {
      const auto resolved = apply_bindings(child.node.alist);
      o.time = time_as_number(*resolved.get(Attr::Time));
    }
    return o;
  }

  /// Reduces `kids` into t's alist with its own operation. True on success.
  bool reduce_children(Subtree& t, const std::vector<Subtree>& kids, const std::string& what) const {
    std::vector<Operand> operands;
    for (const auto& k : kids) operands.push_back(operand_of(k));
    const auto op = operation(t.node.alist);
    AggregateOutcome r;
    try {
      r = reduce_into(op, t.node.alist, std::move(operands), ops_);
    } catch (const UnknownOperationError&) {
      throw;
    } catch (const ArityError&) {
      throw;
    } catch (const AggregationError& e) {
      t.node.explanation = what + ": " + e.describe();
      return false;
    }
    if (r.output.failed) {
      t.node.explanation = what + ": " + op + " failed";
      return false;
    }
    t.node.alist = std::move(r.parent);
    t.node.value = r.output.value;
    t.node.uncertainty = r.output.confidence;
    for (const auto& k : kids) {
      if (k.node.state != NodeState::Failed) t.node.sources.insert(k.node.sources.begin(), k.node.sources.end());
    }
    t.node.state = NodeState::Reduced;
    t.node.explanation = op + " over " + std::to_string(kids.size()) + " " + what + " children";
    return true;
  }

  void resolve_ranged(Subtree& t, int depth) const {
    const auto& a = t.node.alist;
    const auto ranges = fol::ranged_constants(a);
    const auto expansion = fol::expand_ranges(a);
    if (expansion.unexpanded) {
      fail(t, "range expansion exceeds " + std::to_string(fol::kMaxRangeExpansion) + " queries");
      return;
    }
    std::optional<AttributeName> attr;
    for (const auto& [k, v] : a.entries()) {
      if (k.is_attribute() && v.is_string() && v.as_string() == ranges.front().constant) {
        attr = k.attribute();
        break;
      }
    }
    const auto rule = DecompositionRule::sequence(attr.value_or(AttributeName(Attr::Time)), ranges.front().values);
    if (depth >= env_.max_depth) {
      t.node.depth_exceeded = true;
      fail(t, "depth limit reached");
      return;
    }
    std::vector<Task> tasks;
    for (const auto& q : expansion.queries) tasks.push_back({q, rule, depth + 1});
    t.children = resolve_all(std::move(tasks));
    if (!reduce_children(t, t.children, "sequence")) fail(t, "no sequence child resolved");
  }

  void resolve_nested(Subtree& t, int depth) const {
    auto normalized = normalize(t.node.alist);
    std::vector<Task> tasks;
    for (const auto& link : normalized.children) {
      tasks.push_back({link.child, DecompositionRule::normalization(link.key), depth});
    }
    t.children = resolve_all(std::move(tasks));
    Alist root = std::move(normalized.root);

    const bool retrievable = has_object_level(root);
    std::vector<std::pair<VariableRef, AlistValue::List>> fanout;
    std::map<VariableRef, double> link_confidence;
    for (std::size_t i = 0; i < normalized.children.size(); ++i) {
      const auto& kid = t.children[i];
      const auto& key = normalized.children[i].key;
      if (kid.node.state == NodeState::Failed || !kid.node.value) {
        if (retrievable && key.is_var()) {
          t.node.alist = root;
          fail(t, "link " + key.render() + " has no answer");
          return;
        }
        continue;
      }
      if (!key.is_var()) continue;
      const auto target = link_target(root, key.variable(), kid.node.alist);
      link_confidence[target] = kid.node.uncertainty;
      const auto& value = *kid.node.value;
      if (retrievable && value.is_list()) {
        AlistValue::List distinct;
        for (const auto& e : value.list()) {
          if (std::find(distinct.begin(), distinct.end(), e) == distinct.end()) distinct.push_back(e);
        }
        if (distinct.size() == 1) {
          root.bind(target, distinct.front());
        } else {
          fanout.emplace_back(target, std::move(distinct));
        }
      } else {
        root.bind(target, value);
      }
    }
    t.node.alist = root;
    for (const auto& kid : t.children) {
      if (kid.node.state == NodeState::Failed) continue;
      t.node.sources.insert(kid.node.sources.begin(), kid.node.sources.end());
    }

    if (fanout.empty()) {
      resolve_simple(t, depth, link_confidence);
      if (retrievable && t.node.state != NodeState::Failed) {
        for (const auto& [v, c] : link_confidence) t.node.uncertainty *= c;
        t.node.alist.set(Attr::Uncertainty, t.node.uncertainty);
      }
      return;
    }

    std::size_t total = 1;
    for (const auto& [v, values] : fanout) {
      total *= values.size();
      if (values.empty() || total > kMaxInstantiations) {
        fail(t, "too many instantiations");
        return;
      }
    }
    const auto aggregated = aggregated_variable(root);
    const Alist base = decomposition_child(root, aggregated).without(Attr::Uncertainty);
    std::vector<Task> instance_tasks;
    std::vector<std::size_t> idx(fanout.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
      Alist instance = base;
      for (std::size_t i = 0; i < fanout.size(); ++i) instance.bind(fanout[i].first, fanout[i].second[idx[i]]);
      const auto& last = fanout.back();
      instance_tasks.push_back({instance, DecompositionRule::instantiation(last.first, last.second[idx.back()]), depth});
      for (std::size_t i = fanout.size(); i-- > 0;) {
        if (++idx[i] < fanout[i].second.size()) break;
        idx[i] = 0;
      }
    }
    auto instances = resolve_all(std::move(instance_tasks));
    const std::size_t first_instance = t.children.size();
    for (auto& s : instances) t.children.push_back(std::move(s));
    std::vector<Subtree> view(t.children.begin() + static_cast<std::ptrdiff_t>(first_instance), t.children.end());
    if (!reduce_children(t, view, "instantiation")) fail(t, "no instantiation resolved");
    if (t.node.state != NodeState::Failed) {
      for (const auto& [v, c] : link_confidence) t.node.uncertainty *= c;
      t.node.alist.set(Attr::Uncertainty, t.node.uncertainty);
    }
  }

  /// The root variable a linked child's value instantiates. Normally the
  /// key itself; when the key is the aggregated operand of an aggregating
  /// root, the child instead supplies the domain of the root variable that
  /// fills the same attribute as the child's projected variable.
  static VariableRef link_target(const Alist& root, const VariableRef& key, const Alist& child) {
    const auto op = operation(root);
    if (op == "value" || !has_object_level(root)) return key;
    const auto elems = operation_variables(root);
    const bool key_in_v = std::any_of(elems.begin(), elems.end(),
                                      [&](const AlistValue& e) { return e.is_var() && e.variable() == key; });
    if (!key_in_v) return key;
    const auto projected = projected_variables(child);
    if (projected.empty()) return key;
    for (Attr attr : kObjectLevelAttrs) {
      const auto* cv = child.get(attr);
      if (!cv || !cv->is_var() || cv->variable() != projected.front()) continue;
      const auto* rv = root.get(attr);
      if (rv && rv->is_var() && rv->variable() != key) return rv->variable();
    }
    return key;
  }

  void resolve_simple(Subtree& t, int depth, const std::map<VariableRef, double>& link_confidence) const {
    const auto op = operation(t.node.alist);
    if (!has_object_level(t.node.alist)) {
      direct(t, op, link_confidence);
      return;
    }
    if (op == "NOT") {
      auto r = evaluate_not(t.node.alist, env_.not_strategy, kbs_, env_);
      t.node.alist = std::move(r.alist);
      t.node.sources.insert(r.sources.begin(), r.sources.end());
      t.node.transport_failed = r.transport_failed;
      t.node.explanation = std::string(to_string(env_.not_strategy)) + ": " + r.explanation;
      if (r.failed) {
        fail(t, "negation not established");
      } else {
        t.node.value = r.value;
        t.node.uncertainty = r.uncertainty;
        t.node.state = NodeState::Retrieved;
      }
      return;
    }

    if (op != "regress") {
      auto r = retrieve(t.node.alist, kbs_);
      t.node.transport_failed = r.transport_failed;
      if (!r.rows.empty()) {
        reduce_rows(t, r.rows);
        return;
      }
      std::string why = "no data";
      for (const auto& n : r.notes) why += "; " + n;
      t.node.explanation = why;
    }
    decompose(t, depth);
  }

  void direct(Subtree& t, const std::string& op, const std::map<VariableRef, double>& link_confidence) const {
    if (op == "NOT") {
      if (env_.not_strategy == NotStrategy::FunctionalDifference) {
        throw NotFunctionalError("functional difference needs a simple property alist under NOT");
      }
      if (!kbs_.all_closed_world()) {
        throw OpenWorldError("negation as failure needs every source to be closed-world");
      }
    }
    std::vector<Operand> operands;
    for (const auto& e : operation_variables(t.node.alist)) {
      Operand o;
      if (e.is_var()) {
        if (const auto* b = t.node.alist.binding(e.variable())) {
          o.value = *b;
          if (auto it = link_confidence.find(e.variable()); it != link_confidence.end()) o.confidence = it->second;
        } else {
          o.failed = true;
          o.confidence = 0.0;
        }
      } else {
        o.value = e;
      }
      operands.push_back(std::move(o));
    }
    ReduceInput in{t.node.alist, {}, std::move(operands)};
    const auto out = ops_.reduce(op, in);
    if (out.failed) {
      fail(t, op + " failed");
      return;
    }
    t.node.value = out.value;
    t.node.uncertainty = out.confidence;
    t.node.alist.set(Attr::Uncertainty, out.confidence);
    t.node.state = NodeState::Reduced;
    t.node.explanation = op + " over " + std::to_string(in.operands.size()) + " operands";
  }

  void reduce_rows(Subtree& t, const std::vector<RetrievalResult>& rows) const {
    // Operations over structured operands; anything else registered reduces rows.
    static const std::set<std::string> kStructuralOps{"equal", "AND", "OR", "NOT", "regress"};
    const auto op = operation(t.node.alist);
    const auto row_op = kStructuralOps.count(op) == 0 && ops_.contains(op) ? op : std::string("value");
    const auto aggregated = aggregated_variable(t.node.alist);
    std::vector<Alist> row_alists;
    row_alists.reserve(rows.size());
    double confidence = 1.0;
    for (const auto& row : rows) {
      Alist r;
      for (const auto& [k, v] : row.bindings) r.bind(k, v);
      row_alists.push_back(std::move(r));
      confidence = std::min(confidence, row.confidence);
      t.node.sources.insert(row.source);
    }
    std::vector<Operand> operands;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Operand o;
      o.alist = &row_alists[i];
      o.confidence = rows[i].confidence;
      const AlistValue* v = nullptr;
      if (aggregated) {
        v = row_alists[i].binding(*aggregated);
        if (!v) v = t.node.alist.binding(*aggregated);
      }
      o.value = v ? *v : AlistValue(true);
      operands.push_back(std::move(o));
    }
    const auto r = reduce_into(row_op, t.node.alist, std::move(operands), ops_);
    t.node.alist = r.parent;
    t.node.value = r.output.value;
    t.node.uncertainty = confidence;
    t.node.alist.set(Attr::Uncertainty, confidence);
    t.node.state = NodeState::Retrieved;
    t.node.explanation = row_op + " over " + std::to_string(rows.size()) + (rows.size() == 1 ? " row" : " rows");
  }

  void decompose(Subtree& t, int depth) const {
    if (depth >= env_.max_depth) {
      t.node.depth_exceeded = true;
      fail(t, "depth limit reached");
      return;
    }
    const Alist a = t.node.alist;
    const auto aggregated = aggregated_variable(a);
    const Alist base = decomposition_child(a, aggregated);
    std::vector<Subtree> attempted;

    for (Attr attr : {Attr::Subject, Attr::Object, Attr::Location}) {
      const auto parts = partition(base, attr, kbs_);
      if (parts.empty()) continue;
      const auto rule = DecompositionRule::partition(attr, std::string(kPartOf));
      std::vector<Task> tasks;
      for (const auto& p : parts) tasks.push_back({p, rule, depth + 1});
      auto kids = resolve_all(std::move(tasks));
      if (reduce_children(t, kids, "partition")) {
        t.children.insert(t.children.end(), std::make_move_iterator(kids.begin()), std::make_move_iterator(kids.end()));
        return;
      }
      attempted.insert(attempted.end(), std::make_move_iterator(kids.begin()), std::make_move_iterator(kids.end()));
    }

    if (operation(a) != "value") {
      for (const auto& [symbol, values] : env_.sequence_ranges) {
        const auto attr = AttributeName::from_symbol(symbol);
        if (!attr || attr->classification() != AttributeClass::ObjectLevel || values.empty()) continue;
        const auto rule = DecompositionRule::sequence(*attr, values);
        std::vector<Task> tasks;
        for (const auto& s : sequence(base, *attr, values)) tasks.push_back({s, rule, depth + 1});
        auto kids = resolve_all(std::move(tasks));
        if (reduce_children(t, kids, "sequence")) {
          t.children.insert(t.children.end(), std::make_move_iterator(kids.begin()),
                            std::make_move_iterator(kids.end()));
          return;
        }
        attempted.insert(attempted.end(), std::make_move_iterator(kids.begin()), std::make_move_iterator(kids.end()));
      }
    }

    t.children.insert(t.children.end(), std::make_move_iterator(attempted.begin()),
                      std::make_move_iterator(attempted.end()));
    fail(t, attempted.empty() ? "no decomposition applies" : "decomposition failed");
  }

  const KbSet& kbs_;
  const Environment& env_;
  const OperationRegistry& ops_;
};

inline void flatten(Subtree& t, std::optional<std::size_t> parent, InferenceGraph& g) {
  const auto id = g.nodes.size();
  t.node.id = id;
  t.node.parent = parent;
  t.node.children.clear();
  g.nodes.push_back(std::move(t.node));
  for (auto& c : t.children) {
    g.nodes[id].children.push_back(g.nodes.size());
    flatten(c, id, g);
  }
}

inline bool any_depth_exceeded(const InferenceGraph& g) {
  return std::any_of(g.nodes.begin(), g.nodes.end(), [](const InferenceNode& n) { return n.depth_exceeded; });
}

}  // namespace detail

/// Resolves `query` against `kbs`. The answer is the binding of the root's
/// projection variable, or the root's value when it has none. Throws
/// NoAnswerError (DepthExceededError when the depth limit cut a branch)
/// with the partial graph when the root cannot be resolved.
inline InferenceResult infer(const Alist& query, const KbSet& kbs, const Environment& env = {}) {
  if (env.max_depth < 0) throw ConfigError("max_depth must not be negative");
  detail::Engine engine(kbs, env);
  auto tree = engine.resolve(canonicalize(query), std::nullopt, 0);
  InferenceGraph graph;
  detail::flatten(tree, std::nullopt, graph);
  const auto& root = graph.root_node();
  if (root.state == NodeState::Failed) {
    const auto msg = "no answer for " + render(query);
    if (detail::any_depth_exceeded(graph)) throw DepthExceededError(msg, std::move(graph));
    throw NoAnswerError(msg, std::move(graph));
  }
  InferenceResult out;
  const auto projection = projection_variable(root.alist);
  const AlistValue* bound = projection ? root.alist.binding(*projection) : nullptr;
  if (bound) {
    out.answer = *bound;
  } else if (root.value) {
    out.answer = *root.value;
  } else {
    const auto msg = "no answer for " + render(query);
    throw NoAnswerError(msg, std::move(graph));
  }
  out.uncertainty = root.uncertainty;
  out.sources = root.sources;
  out.graph = std::move(graph);
  return out;
}

// ---------------------------------------------------------------------------
// Explanation

namespace detail {

inline std::string format_confidence(double c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", c);
  return buf;
}

inline void explain_node(const InferenceGraph& g, std::size_t id, int indent, std::string& out) {
  const auto& n = g.node(id);
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  out += n.rule ? n.rule->describe() : std::string("query");
  out += ": " + render(n.alist.without(Attr::Uncertainty));
  out += " [" + operation(n.alist) + "]";
  if (n.value) out += " = " + render_value(*n.value);
  if (!n.sources.empty()) {
    out += " from ";
    bool first = true;
    for (const auto& s : n.sources) {
      if (!first) out += ",";
      first = false;
      out += s;
    }
  }
  out += " u=" + format_confidence(n.uncertainty);
  if (!n.explanation.empty()) out += " (" + n.explanation + ")";
  if (n.state == NodeState::Failed) out += " FAILED";
  out += "\n";
  for (auto c : n.children) explain_node(g, c, indent + 1, out);
}

}  // namespace detail

/// One line per node, children indented under their parent.
inline std::string explain(const InferenceGraph& graph) {
  std::string out;
  if (!graph.empty()) detail::explain_node(graph, graph.root, 0, out);
  return out;
}

/// {"root": id, "nodes": [...], "edges": [[parent, child], ...]}.
inline nlohmann::ordered_json graph_to_json(const InferenceGraph& graph) {
  using ojson = nlohmann::ordered_json;
  ojson nodes = ojson::array();
  ojson edges = ojson::array();
  for (const auto& n : graph.nodes) {
    ojson j;
    j["id"] = n.id;
    j["rule"] = n.rule ? n.rule->describe() : "query";
    j["state"] = std::string(to_string(n.state));
    j["alist"] = ojson::parse(emit_json(n.alist));
    j["value"] = n.value ? ojson::parse(emit_value_json(*n.value)) : ojson();
    j["uncertainty"] = n.uncertainty;
    j["sources"] = std::vector<std::string>(n.sources.begin(), n.sources.end());
    j["explanation"] = n.explanation;
    nodes.push_back(std::move(j));
    for (auto c : n.children) edges.push_back({n.id, c});
  }
  ojson out;
  out["root"] = graph.root;
  out["nodes"] = std::move(nodes);
  out["edges"] = std::move(edges);
  return out;
}

}  // namespace alist
