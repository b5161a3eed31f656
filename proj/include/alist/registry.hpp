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

// Named reduce operations used to aggregate child values into a parent.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "alist/core.hpp"

namespace alist {

struct Operand {
  AlistValue value;
  const Alist* alist = nullptr;  // the child the value came from, if any
  std::optional<double> time;    // the child's t, for regress
  double confidence = 1.0;
  bool failed = false;
};

struct ReduceInput {
  const Alist& parent;
  std::vector<AlistValue> params;  // constants following the first element of v
  std::vector<Operand> operands;
};

struct ReduceOutput {
  AlistValue value;
  std::vector<std::size_t> selected;  // operands the value was taken from
  double confidence = 1.0;
  bool failed = false;
};

using Reducer = std::function<ReduceOutput(const ReduceInput&)>;

inline constexpr double kEqualTolerance = 1e-9;

// ---------------------------------------------------------------------------
// Regression

struct Regression {
  double value = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double rmse = 0.0;
  double confidence = 1.0;  // 1 / (1 + rmse)
};

/// Ordinary least-squares line through `points` (t, y), evaluated at `t_query`.
inline Regression regress_predict(const std::vector<std::pair<double, double>>& points, double t_query) {
  if (points.size() < 2) throw DegenerateDataError("regression needs at least two points");
  const double n = static_cast<double>(points.size());
  double mt = 0.0;
  double my = 0.0;
  for (const auto& [t, y] : points) {
    mt += t;
    my += y;
  }
  mt /= n;
  my /= n;
  double stt = 0.0;
  double sty = 0.0;
  for (const auto& [t, y] : points) {
    stt += (t - mt) * (t - mt);
    sty += (t - mt) * (y - my);
  }
  if (stt == 0.0) throw DegenerateDataError("all regression points share the same t");
  Regression r;
  r.slope = sty / stt;
  r.intercept = my - r.slope * mt;
  r.value = my + r.slope * (t_query - mt);
  double sse = 0.0;
  for (const auto& [t, y] : points) {
    const double e = y - (my + r.slope * (t - mt));
    sse += e * e;
  }
  r.rmse = std::sqrt(sse / n);
  r.confidence = 1.0 / (1.0 + r.rmse);
  return r;
}

// ---------------------------------------------------------------------------
// Registry

class OperationRegistry {
 public:
  OperationRegistry& add(std::string name, Reducer reducer) {
    reducers_.insert_or_assign(std::move(name), std::move(reducer));
    return *this;
  }

  bool contains(const std::string& name) const { return reducers_.count(name) != 0; }

  const Reducer& get(const std::string& name) const {
    auto it = reducers_.find(name);
    if (it == reducers_.end()) throw UnknownOperationError("unknown operation '" + name + "'");
    return it->second;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : reducers_) out.push_back(k);
    return out;
  }

  ReduceOutput reduce(const std::string& name, const ReduceInput& in) const { return get(name)(in); }

  static OperationRegistry with_defaults();

  static const OperationRegistry& defaults() {
    static const OperationRegistry instance = with_defaults();
    return instance;
  }

 private:
  std::map<std::string, Reducer> reducers_;
};

namespace ops {

inline std::vector<std::size_t> live(const ReduceInput& in) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < in.operands.size(); ++i) {
    if (!in.operands[i].failed) out.push_back(i);
  }
  return out;
}

inline double confidence_of(const ReduceInput& in, const std::vector<std::size_t>& idx) {
  double c = 1.0;
  for (auto i : idx) c *= in.operands[i].confidence;
  return c;
}

inline std::vector<std::size_t> live_or_throw(const ReduceInput& in, const std::string& op) {
  auto idx = live(in);
  if (idx.empty()) throw EmptyAggregationError(op + " over zero values");
  return idx;
}

inline double number(const Operand& o, const std::string& op) {
  if (!o.value.is_number()) {
    throw AggregationError(op + " needs numeric operands, got " + render_value(o.value));
  }
  return o.value.as_number();
}

inline ReduceOutput extreme(const ReduceInput& in, const std::string& op, bool want_max) {
  const auto idx = live_or_throw(in, op);
  std::size_t best = idx.front();
  double best_value = number(in.operands[best], op);
  for (auto i : idx) {
    const double x = number(in.operands[i], op);
    if (want_max ? x > best_value : x < best_value) {
      best = i;
      best_value = x;
    }
  }
  return {in.operands[best].value, {best}, confidence_of(in, idx), false};
}

inline bool values_equal(const AlistValue& a, const AlistValue& b) {
  if (a.is_number() && b.is_number()) return std::fabs(a.as_number() - b.as_number()) <= kEqualTolerance;
  return a == b;
}

inline ReduceOutput value(const ReduceInput& in) {
  const auto idx = live_or_throw(in, "value");
  const double c = confidence_of(in, idx);
  const auto& first = in.operands[idx.front()].value;
  if (std::all_of(idx.begin(), idx.end(), [&](std::size_t i) { return in.operands[i].value == first; })) {
    return {first, {idx.front()}, c, false};
  }
  AlistValue::List values;
  for (auto i : idx) values.push_back(in.operands[i].value);
  return {AlistValue(std::move(values)), {}, c, false};
}

inline ReduceOutput sum(const ReduceInput& in) {
  const auto idx = live_or_throw(in, "sum");
  bool all_int = true;
  std::int64_t isum = 0;
  double dsum = 0.0;
  for (auto i : idx) {
    const auto& v = in.operands[i].value;
    dsum += number(in.operands[i], "sum");
    if (v.is_int()) {
      isum += v.as_int();
    } else {
      all_int = false;
    }
  }
  return {all_int ? AlistValue(isum) : AlistValue(dsum), {}, confidence_of(in, idx), false};
}

inline ReduceOutput avg(const ReduceInput& in) {
  const auto idx = live_or_throw(in, "avg");
  double total = 0.0;
  for (auto i : idx) total += number(in.operands[i], "avg");
  return {AlistValue(total / static_cast<double>(idx.size())), {}, confidence_of(in, idx), false};
}

inline ReduceOutput count(const ReduceInput& in) {
  const auto idx = live(in);
  return {AlistValue(static_cast<std::int64_t>(idx.size())), {}, confidence_of(in, idx), false};
}

inline ReduceOutput equal(const ReduceInput& in) {
  if (in.operands.size() != 2) {
    throw ArityError("equal takes exactly two operands, got " + std::to_string(in.operands.size()));
  }
  const auto idx = live(in);
  if (idx.size() != 2) return {AlistValue(false), {}, 0.0, true};
  return {AlistValue(values_equal(in.operands[0].value, in.operands[1].value)), {},
          confidence_of(in, idx), false};
}

inline ReduceOutput rank(const ReduceInput& in) {
  auto idx = live_or_throw(in, "rank");
  std::int64_t n = 1;
  if (!in.params.empty()) {
    if (!in.params.front().is_int() || in.params.front().as_int() < 1) {
      throw AggregationError("rank position must be a positive integer");
    }
    n = in.params.front().as_int();
  }
  for (auto i : idx) (void)number(in.operands[i], "rank");
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return in.operands[a].value.as_number() > in.operands[b].value.as_number();
  });
  if (static_cast<std::size_t>(n) > idx.size()) {
    throw EmptyAggregationError("rank " + std::to_string(n) + " of " + std::to_string(idx.size()) + " values");
  }
  const auto pick = idx[static_cast<std::size_t>(n - 1)];
  return {in.operands[pick].value, {pick}, confidence_of(in, idx), false};
}

inline ReduceOutput logical_and(const ReduceInput& in) {
  if (in.operands.empty()) throw EmptyAggregationError("AND over zero operands");
  AlistValue::List values;
  for (const auto& o : in.operands) {
    if (o.failed) return {AlistValue(false), {}, 0.0, true};
    values.push_back(o.value);
  }
  std::vector<std::size_t> all(in.operands.size());
  std::iota(all.begin(), all.end(), 0);
  return {AlistValue(std::move(values)), {}, confidence_of(in, all), false};
}

inline ReduceOutput logical_or(const ReduceInput& in) {
  const auto idx = live(in);
  if (idx.empty()) return {AlistValue(false), {}, 0.0, true};
  return {in.operands[idx.front()].value, {idx.front()}, confidence_of(in, idx), false};
}

inline ReduceOutput logical_not(const ReduceInput& in) {
  const auto idx = live(in);
  return {AlistValue(idx.empty()), {}, confidence_of(in, idx), false};
}

inline ReduceOutput regress(const ReduceInput& in) {
  const auto idx = live_or_throw(in, "regress");
  std::optional<double> tq;
  if (const auto* t = in.parent.get(Attr::Time)) tq = time_as_number(*t);
  if (!tq && !in.params.empty()) tq = time_as_number(in.params.front());
  if (!tq) throw AggregationError("regress needs a numeric t on the parent");
  std::vector<std::pair<double, double>> points;
  for (auto i : idx) {
    const auto& o = in.operands[i];
    if (!o.time) throw AggregationError("regress operand without a time value");
    points.emplace_back(*o.time, number(o, "regress"));
  }
  const auto r = regress_predict(points, *tq);
  return {AlistValue(r.value), {}, confidence_of(in, idx) * r.confidence, false};
}

}  // namespace ops

inline OperationRegistry OperationRegistry::with_defaults() {
  OperationRegistry r;
  r.add("value", ops::value);
  r.add("max", [](const ReduceInput& in) { return ops::extreme(in, "max", true); });
  r.add("min", [](const ReduceInput& in) { return ops::extreme(in, "min", false); });
  r.add("sum", ops::sum);
  r.add("avg", ops::avg);
  r.add("count", ops::count);
  r.add("equal", ops::equal);
  r.add("rank", ops::rank);
  r.add("AND", ops::logical_and);
  r.add("OR", ops::logical_or);
  r.add("NOT", ops::logical_not);
  r.add("regress", ops::regress);
  return r;
}

}  // namespace alist
