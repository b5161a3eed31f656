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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "alist/fol.hpp"
#include "alist/fol_parser.hpp"
#include "alist/inference.hpp"
#include "support/fixtures.hpp"
#include "support/ols_oracle.hpp"

namespace alist {
namespace {

using testing::data_path;
using testing::japan_fact;
using testing::japan_query;
using testing::local_kbs_from_file;

Alist json(const char* text) { return parse_json(text); }

Alist read_alist(const std::string& rel) { return parse_json(read_file(data_path(rel))); }

const AlistValue* child_value(const Alist& a, const char* name) { return a.binding(var(name)); }

AlistValue::List years(int from, int to) {
  AlistValue::List out;
  for (int y = from; y <= to; ++y) out.emplace_back(y);
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Structural checks that hold for every graph infer produces.
void check_graph(const InferenceGraph& g) {
  ASSERT_FALSE(g.empty());
  ASSERT_LT(g.root, g.nodes.size());
  EXPECT_FALSE(g.root_node().parent.has_value());
  std::vector<int> parents(g.nodes.size(), 0);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    EXPECT_EQ(n.id, i);
    EXPECT_GE(n.uncertainty, 0.0);
    EXPECT_LE(n.uncertainty, 1.0);
    for (auto c : n.children) {
      ASSERT_LT(c, g.nodes.size());
      EXPECT_GT(c, i) << "children follow their parent";
      EXPECT_EQ(g.node(c).parent, std::optional<std::size_t>(i));
      ++parents[c];
    }
    if (n.state == NodeState::Reduced) {
      EXPECT_FALSE(n.children.empty()) << render(n.alist);
      double weakest = 1.0;
      for (auto c : n.children) {
        const auto& child = g.node(c);
        if (child.state == NodeState::Failed) continue;
        EXPECT_TRUE(child.state == NodeState::Reduced || child.state == NodeState::Retrieved);
        weakest = std::min(weakest, child.uncertainty);
      }
      EXPECT_LE(n.uncertainty, weakest + 1e-12) << render(n.alist);
    }
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i) EXPECT_EQ(parents[i], i == g.root ? 0 : 1) << i;
}

// ---------------------------------------------------------------------------
// Normalization

TEST(Normalize, StartswithSplitsIntoTwo) {
  const auto n = normalize(canonicalize(
      json(R"({"p":"startswith","s":"?x","o":"M","?x":{"p":"type","s":"?y","o":"military rank"}})")));
  EXPECT_EQ(n.root, canonicalize(json(R"({"p":"startswith","s":"?x","o":"M"})")));
  ASSERT_EQ(n.children.size(), 1u);
  EXPECT_EQ(n.children[0].key, Key(var("?x")));
  EXPECT_EQ(n.children[0].child, canonicalize(json(R"({"p":"type","s":"?y","o":"military rank"})")));
}

TEST(Normalize, MaxGdpRootAndChild) {
  const auto n = normalize(canonicalize(testing::max_gdp_query()));
  EXPECT_EQ(n.root, json(R"({"h":"max","v":"$y","s":"?x","p":"gdp","o":"$y"})"));
  ASSERT_EQ(n.children.size(), 1u);
  EXPECT_EQ(n.children[0].child, canonicalize(json(R"({"s":"?z","p":"type","o":"country"})")));
  for (const auto& c : n.children) EXPECT_TRUE(is_simple(c.child));
}

TEST(Normalize, SimpleAlistIsItself) {
  const auto n = normalize(canonicalize(japan_query()));
  EXPECT_EQ(n.root, canonicalize(japan_query()));
  EXPECT_TRUE(n.children.empty());
}

TEST(Normalize, NestedAttributeValueGetsFreshLink) {
  const auto n = normalize(json(R"({"s":"UK","p":"capital","o":{"s":"?c","p":"type","o":"city"}})"));
  ASSERT_EQ(n.children.size(), 1u);
  EXPECT_TRUE(is_simple(n.root));
  EXPECT_EQ(*n.root.get(Attr::Object), AlistValue(n.children[0].key.variable()));
}

// ---------------------------------------------------------------------------
// Partition and sequence

TEST(Partition, ContinentIntoCountries) {
  const auto kbs = local_kbs_from_file("europe.jsonl");
  const auto kids = partition(json(R"({"s":"Europe","p":"population","o":"?x"})"), Attr::Subject, kbs);
  ASSERT_EQ(kids.size(), 3u);
  EXPECT_EQ(*kids[0].get(Attr::Subject), AlistValue("France"));
  EXPECT_EQ(*kids[1].get(Attr::Subject), AlistValue("Germany"));
  EXPECT_EQ(*kids[2].get(Attr::Subject), AlistValue("Spain"));
  for (const auto& k : kids) EXPECT_EQ(k.without(Attr::Subject), json(R"({"p":"population","o":"?x"})"));
}

TEST(Partition, NoPartsAndBadAttribute) {
  const auto kbs = local_kbs_from_file("europe.jsonl");
  EXPECT_TRUE(partition(json(R"({"s":"France","p":"population","o":"?x"})"), Attr::Subject, kbs).empty());
  EXPECT_THROW(partition(json(R"({"s":"Europe","p":"population","o":"?x"})"), Attr::Property, kbs), InvariantError);
}

TEST(Sequence, OneChildPerValueInOrder) {
  const auto a = json(R"({"s":"UK","p":"population","o":"?y","t":"sk1"})");
  const auto kids = sequence(a, Attr::Time, years(2022, 2031));
  ASSERT_EQ(kids.size(), 10u);
  for (std::size_t i = 0; i < kids.size(); ++i) {
    EXPECT_EQ(kids[i], a.with(Attr::Time, static_cast<int>(2022 + i)));
  }
  EXPECT_EQ(sequence(a, Attr::Time, {2000}).size(), 1u);
  EXPECT_THROW(sequence(a, Attr::Time, {}), InvariantError);
}

// ---------------------------------------------------------------------------
// Aggregation

TEST(Aggregate, MaxBindsValueAndSiblingFromArgmax) {
  const auto parent = json(R"({"h":"max","v":"$y","s":"?x","p":"gdp","o":"$y"})");
  std::vector<Alist> kids;
  for (const auto& [country, gdp] : std::vector<std::pair<const char*, double>>{{"A", 5.0}, {"B", 10.0}, {"C", 7.0}}) {
    Alist k = parent.with(Attr::Operation, "value");
    k.bind(var("?x"), country);
    k.bind(var("$y"), gdp);
    kids.push_back(std::move(k));
  }
  const auto out = aggregate("max", parent, kids);
  EXPECT_EQ(*child_value(out, "$y"), AlistValue(10.0));
  EXPECT_EQ(*child_value(out, "?x"), AlistValue("B"));
  EXPECT_EQ(resolution_state(out), ResolutionState::FullyResolved);
}

TEST(Aggregate, ValueOverSingleChildIsIdentity) {
  const auto parent = json(R"({"h":"value","v":"?x","s":"UK","p":"capital","o":"?x"})");
  Alist kid = parent;
  kid.bind(var("?x"), "London");
  kid.set(Attr::Uncertainty, 0.6);
  const auto out = aggregate("value", parent, {kid});
  EXPECT_EQ(*child_value(out, "?x"), AlistValue("London"));
  EXPECT_DOUBLE_EQ(out.get(Attr::Uncertainty)->as_number(), 0.6);
}

TEST(Aggregate, Errors) {
  const auto parent = json(R"({"h":"max","v":"?x","s":"UK","p":"gdp","o":"?x"})");
  EXPECT_THROW(aggregate("median", parent, {parent}), UnknownOperationError);
  EXPECT_THROW(aggregate("max", parent, {parent, parent}), EmptyAggregationError);
  Alist kid = parent;
  kid.bind(var("?x"), 1);
  EXPECT_THROW(aggregate("equal", parent, {kid, kid, kid}), ArityError);
}

// ---------------------------------------------------------------------------
// Negation

TEST(Negation, ClosedWorldComplement) {
  const auto out = evaluate_not(json(R"({"h":"NOT","v":"?x","p":"capital","s":"UK","o":"?x"})"),
                                NotStrategy::ClosedWorld, local_kbs_from_file("capitals_uk.jsonl"), {});
  EXPECT_FALSE(out.failed);
  EXPECT_EQ(out.value, AlistValue(AlistValue::List{"Cardiff", "Edinburgh"}));
  EXPECT_EQ(*out.alist.binding(var("?x")), out.value);
}

TEST(Negation, FailureAsNegationOnEmptyStore) {
  const auto kbs = testing::local_kbs(testing::store_from({}));
  const auto out = evaluate_not(json(R"({"h":"NOT","s":"UK","p":"capital","o":"Paris"})"),
                                NotStrategy::FailureAsNegation, kbs, {});
  EXPECT_EQ(out.value, AlistValue(true));
  const auto found = evaluate_not(json(R"({"h":"NOT","s":"UK","p":"capital","o":"London"})"),
                                  NotStrategy::FailureAsNegation, local_kbs_from_file("capitals_uk.jsonl"), {});
  EXPECT_EQ(found.value, AlistValue(false));
}

TEST(Negation, FunctionalDifferenceSantaCruz) {
  Environment env;
  env.functional_properties.insert("place of death");
  const auto kbs = local_kbs_from_file("denver.jsonl", false);
  const auto out = evaluate_not(json(R"({"h":"NOT","s":"John Denver","p":"place of death","o":"Santa Cruz"})"),
                                NotStrategy::FunctionalDifference, kbs, env);
  EXPECT_FALSE(out.failed);
  EXPECT_EQ(out.value, AlistValue(true));
  const auto same = evaluate_not(json(R"({"h":"NOT","s":"John Denver","p":"place of death","o":"Monterey Bay"})"),
                                 NotStrategy::FunctionalDifference, kbs, env);
  EXPECT_EQ(same.value, AlistValue(false));
}

TEST(Negation, StrategyPreconditions) {
  const auto q = json(R"({"h":"NOT","s":"John Denver","p":"place of death","o":"Santa Cruz"})");
  const auto open = local_kbs_from_file("denver.jsonl", false);
  EXPECT_THROW(evaluate_not(q, NotStrategy::ClosedWorld, open, {}), OpenWorldError);
  EXPECT_THROW(evaluate_not(q, NotStrategy::FailureAsNegation, open, {}), OpenWorldError);
  EXPECT_THROW(evaluate_not(q, NotStrategy::FunctionalDifference, open, {}), NotFunctionalError);
}

TEST(Negation, ThroughInfer) {
  Environment env;
  env.not_strategy = NotStrategy::FunctionalDifference;
  env.functional_properties.insert("place of death");
  const auto r = infer(json(R"({"h":"NOT","s":"John Denver","p":"place of death","o":"Santa Cruz"})"),
                       local_kbs_from_file("denver.jsonl", false), env);
  EXPECT_EQ(r.answer, AlistValue(true));
  check_graph(r.graph);
}

// ---------------------------------------------------------------------------
// Inference

TEST(Infer, CapitalOfJapanIn1960) {
  const auto r = infer(japan_query(), local_kbs_from_file("capitals.jsonl"));
  EXPECT_EQ(r.answer, AlistValue("Tokyo"));
  EXPECT_EQ(r.sources, std::set<std::string>{"local"});
  check_graph(r.graph);
}

TEST(Infer, StoredGroundFactIsSingleNode) {
  KbSet kbs;
  kbs.sources.push_back(testing::local_source(testing::store_from({japan_fact()}), "facts", true, 0.7));
  const auto r = infer(japan_fact(), kbs);
  EXPECT_EQ(r.answer, AlistValue(true));
  EXPECT_DOUBLE_EQ(r.uncertainty, 0.7);
  EXPECT_EQ(r.graph.nodes.size(), 1u);
  EXPECT_EQ(r.graph.root_node().state, NodeState::Retrieved);
  EXPECT_EQ(lines_of(explain(r.graph)).size(), 1u);
  EXPECT_NE(explain(r.graph).find("from facts"), std::string::npos) << explain(r.graph);
}

TEST(Infer, MaxGdpMatchesBruteForceArgmax) {
  const auto facts = load_facts_file(data_path("gdp.jsonl"));
  std::string best;
  double best_gdp = -1;
  for (const auto& f : facts) {
    if (*f.get(Attr::Property) != AlistValue("gdp")) continue;
    if (f.get(Attr::Object)->as_number() > best_gdp) {
      best_gdp = f.get(Attr::Object)->as_number();
      best = f.get(Attr::Subject)->as_string();
    }
  }
  const auto r = infer(testing::max_gdp_query(), testing::local_kbs(testing::store_from(facts)));
  EXPECT_EQ(r.answer, AlistValue(best));
  EXPECT_EQ(*r.graph.root_node().alist.binding(var("$y")), AlistValue(best_gdp));
  check_graph(r.graph);
}

TEST(Infer, PartitionSumEqualsFixtureTotal) {
  const auto facts = load_facts_file(data_path("europe.jsonl"));
  std::set<std::string> members;
  for (const auto& f : facts) {
    if (*f.get(Attr::Property) == AlistValue("partOf") && *f.get(Attr::Object) == AlistValue("Europe")) {
      members.insert(f.get(Attr::Subject)->as_string());
    }
  }
  std::int64_t total = 0;
  for (const auto& f : facts) {
    if (*f.get(Attr::Property) == AlistValue("population") && members.count(f.get(Attr::Subject)->as_string())) {
      total += f.get(Attr::Object)->as_int();
    }
  }
  ASSERT_EQ(total, 200000000);

  const auto query = json(R"({"h":"sum","v":"?x","s":"Europe","p":"population","o":"?x"})");
  const auto r = infer(query, testing::local_kbs(testing::store_from(facts)));
  EXPECT_EQ(r.answer, AlistValue(total));
  const auto& root = r.graph.root_node();
  EXPECT_EQ(root.state, NodeState::Reduced);
  EXPECT_EQ(root.children.size(), 3u);
  for (auto c : root.children) EXPECT_EQ(r.graph.node(c).rule->kind, DecompositionRule::Kind::Partition);
  check_graph(r.graph);

  // With a stored total as well, direct retrieval and decomposition agree.
  auto with_total = facts;
  with_total.push_back(Alist{{"s", "Europe"}, {"p", "population"}, {"o", total}});
  const auto direct = infer(query, testing::local_kbs(testing::store_from(with_total)));
  EXPECT_EQ(direct.answer, r.answer);
}

TEST(Infer, PartitionedPlainQueryListsParts) {
  const auto r = infer(json(R"({"s":"Europe","p":"population","o":"?x"})"), local_kbs_from_file("europe.jsonl"));
  EXPECT_EQ(r.answer, AlistValue(AlistValue::List{68000000, 84000000, 48000000}));
}

TEST(Infer, RegressionOverSequenceMatchesOracle) {
  const auto facts = load_facts_file(data_path("population_uk.jsonl"));
  std::vector<std::pair<double, double>> points;
  for (const auto& f : facts) points.emplace_back(f.get(Attr::Time)->as_number(), f.get(Attr::Object)->as_number());
  Environment env;
  env.sequence_ranges["t"] = years(2000, 2009);
  const auto r = infer(json(R"({"h":"regress","v":"?y","s":"UK","p":"population","o":"?y","t":2012})"),
                       testing::local_kbs(testing::store_from(facts)), env);
  const auto fit = testing::normal_equations(points);
  EXPECT_NEAR(r.answer.as_number(), static_cast<double>(fit.at(2012)), 1e-6);
  EXPECT_NEAR(r.uncertainty, 1.0 / (1.0 + static_cast<double>(testing::residual_rms(points, fit))), 1e-12);
  EXPECT_EQ(r.graph.root_node().children.size(), 10u);
  check_graph(r.graph);
}

TEST(Infer, ExactLineThroughSequence) {
  std::vector<Alist> facts;
  for (int t = 2000; t <= 2009; ++t) facts.push_back(Alist{{"s", "X"}, {"p", "y"}, {"o", 100 + 2 * (t - 2000)}, {"t", t}});
  Environment env;
  env.sequence_ranges["t"] = years(2000, 2009);
  const auto r = infer(json(R"({"h":"regress","v":"?y","s":"X","p":"y","o":"?y","t":2012})"),
                       testing::local_kbs(testing::store_from(facts)), env);
  EXPECT_NEAR(r.answer.as_number(), 124.0, 1e-9);
  EXPECT_NEAR(r.uncertainty, 1.0, 1e-9);
}

TEST(Infer, QueryCorpus) {
  const auto kbs = local_kbs_from_file("corpus.jsonl");
  EXPECT_EQ(infer(read_alist("corpus/breaking_bad.json"), kbs).answer, AlistValue(true));
  EXPECT_EQ(infer(read_alist("corpus/mr_bean.json"), kbs).answer,
            AlistValue(AlistValue::List{"Rowan Atkinson", "Richard Curtis"}));
  EXPECT_EQ(infer(read_alist("corpus/obama_venue.json"), kbs).answer, AlistValue("Trinity United Church"));
  EXPECT_EQ(infer(read_alist("corpus/ranking.json"), kbs).answer, AlistValue("Capella"));
  EXPECT_EQ(infer(read_alist("corpus/sister_city.json"), kbs).answer, AlistValue("Seville"));
}

TEST(Infer, TranslatedFormulas) {
  const auto kbs = local_kbs_from_file("corpus.jsonl");
  const auto ranks = infer(fol::translate_formula(fol::parse_formula(R"(startswith(x, M) & type(x, "military rank"))")), kbs);
  EXPECT_EQ(ranks.answer, AlistValue(AlistValue::List{"Major", "Marshal"}));
  const auto denver = infer(fol::translate_formula(fol::parse_formula(
                                R"(cause_of_death("John Denver", x) & place_of_death("John Denver", y))")),
                            local_kbs_from_file("denver.jsonl"));
  EXPECT_EQ(denver.answer, AlistValue(AlistValue::List{"plane crash", "Monterey Bay"}));
  check_graph(denver.graph);
}

TEST(Infer, JoinWithEmptyLinkHasNoAnswer) {
  const auto kbs = testing::local_kbs(testing::store_from(
      {json(R"({"s":"A","p":"Q","o":"B"})"), json(R"({"s":"A","p":"Q","o":"C"})"), json(R"({"p":"P","arg1":"C"})")}));
  const auto join = fol::translate_formula(fol::parse_formula("Q(A, x) & P(x)"));
  EXPECT_EQ(infer(join, kbs).answer, AlistValue("C"));
  const auto empty = fol::translate_formula(fol::parse_formula("Q(A, x) & R(x, A)"));
  try {
    infer(empty, kbs);
    ADD_FAILURE() << "expected NoAnswerError";
  } catch (const NoAnswerError& e) {
    EXPECT_EQ(e.graph().root_node().state, NodeState::Failed);
    check_graph(e.graph());
  }
}

TEST(Infer, UnansweredQueryCarriesPartialGraph) {
  try {
    infer(json(R"({"s":"Atlantis","p":"capital","o":"?x"})"), local_kbs_from_file("capitals.jsonl"));
    FAIL();
  } catch (const NoAnswerError& e) {
    EXPECT_FALSE(e.graph().empty());
    EXPECT_EQ(e.graph().root_node().state, NodeState::Failed);
    const auto text = explain(e.graph());
    EXPECT_EQ(text.substr(text.size() - 7), "FAILED\n") << text;
  }
}

TEST(Infer, DepthLimitStopsDecomposition) {
  Environment env;
  env.max_depth = 0;
  EXPECT_THROW(infer(json(R"({"h":"sum","v":"?x","s":"Europe","p":"population","o":"?x"})"),
                     local_kbs_from_file("europe.jsonl"), env),
               DepthExceededError);
}

TEST(Infer, SourceConfidencePropagatesAsProduct) {
  const auto store = testing::store_from_file("europe.jsonl");
  KbSet kbs;
  kbs.sources.push_back(testing::local_source(store, "local", true, 0.9));
  const auto r = infer(json(R"({"h":"sum","v":"?x","s":"Europe","p":"population","o":"?x"})"), kbs);
  EXPECT_NEAR(r.uncertainty, 0.9 * 0.9 * 0.9, 1e-12);
  check_graph(r.graph);
}

TEST(Infer, TransportFailureFailsOnlyThatSource) {
  auto kbs = local_kbs_from_file("capitals.jsonl");
  KbSource remote;
  remote.name = "wikidata";
  remote.kind = KbSource::Kind::Sparql;
  remote.endpoint = "https://query.wikidata.org/sparql";
  kbs.sources.insert(kbs.sources.begin(), remote);
  const auto r = infer(japan_query(), kbs);
  EXPECT_EQ(r.answer, AlistValue("Tokyo"));
  EXPECT_TRUE(r.graph.any_transport_failure());
}

TEST(Infer, CustomOperationFromEnvironment) {
  auto registry = std::make_shared<OperationRegistry>(OperationRegistry::with_defaults());
  registry->add("longest", [](const ReduceInput& in) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < in.operands.size(); ++i) {
      if (in.operands[i].value.as_string().size() > in.operands[best].value.as_string().size()) best = i;
    }
    return ReduceOutput{in.operands[best].value, {best}, 1.0, false};
  });
  Environment env;
  env.registry = registry;
  const auto r = infer(json(R"({"h":"longest","v":"?x","s":"Mr. Bean","p":"screenwriter","o":"?x"})"),
                       local_kbs_from_file("corpus.jsonl"), env);
  EXPECT_EQ(r.answer, AlistValue("Rowan Atkinson")) << emit_value_json(r.answer) << "\n" << explain(r.graph);
}

TEST(Explain, PartitionSumIndentsChildren) {
  const auto r = infer(json(R"({"h":"sum","v":"?x","s":"Europe","p":"population","o":"?x"})"),
                       local_kbs_from_file("europe.jsonl"));
  const auto lines = lines_of(explain(r.graph));
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_NE(lines[0].rfind("  ", 0), 0u);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    EXPECT_EQ(lines[i].rfind("  partition s", 0), 0u) << lines[i];
    EXPECT_NE(lines[i].find("from local"), std::string::npos);
  }
  EXPECT_NE(lines[0].find("= 200000000"), std::string::npos) << lines[0];
}

TEST(Infer, DeterministicUnderConcurrency) {
  const auto kbs = local_kbs_from_file("europe.jsonl");
  const auto query = json(R"({"h":"sum","v":"?x","s":"Europe","p":"population","o":"?x"})");
  const auto first = infer(query, kbs);
  const auto text = graph_to_json(first.graph).dump();
  for (int i = 0; i < 20; ++i) {
    const auto r = infer(query, kbs);
    EXPECT_EQ(r.answer, first.answer);
    EXPECT_EQ(graph_to_json(r.graph).dump(), text);
  }
  Environment serial;
  serial.parallel = false;
  EXPECT_EQ(graph_to_json(infer(query, kbs, serial).graph).dump(), text);
}

}  // namespace
}  // namespace alist
