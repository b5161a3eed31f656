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
#include <sstream>
#include <string>
#include <vector>

#include "alist/rdf.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

namespace alist {
namespace {

using rdf::Term;
using rdf::Triple;
using testing::japan_fact;

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

TEST(ToRdf, GroundFactGivesFiveTriples) {
  const auto triples = rdf::to_rdf_reified(japan_fact(), "urn:stmt:1");
  ASSERT_EQ(triples.size(), 5u);
  EXPECT_EQ(triples[4].predicate, Term::iri("alist:t"));
  EXPECT_EQ(rdf::term_value(triples[4].object), AlistValue(1960));
  EXPECT_EQ(rdf::to_ntriples(triples),
            "<urn:stmt:1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> "
            "<http://www.w3.org/1999/02/22-rdf-syntax-ns#Statement> .\n"
            "<urn:stmt:1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#subject> \"Japan\" .\n"
            "<urn:stmt:1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#predicate> \"capital\" .\n"
            "<urn:stmt:1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#object> \"Tokyo\" .\n"
            "<urn:stmt:1> <alist:t> \"1960\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n");
}

TEST(ToRdf, CoreOnlyGivesFourTriples) {
  EXPECT_EQ(rdf::to_rdf_reified(Alist{{"s", "a"}, {"p", "b"}, {"o", "c"}}, "urn:q").size(), 4u);
}

TEST(ToRdf, ExtraAttributesFollowSerializationOrder) {
  const Alist a{{"u", 0.9}, {"s", "a"}, {"p", "b"}, {"o", "c"}, {"t", 2001}};
  const auto triples = rdf::to_rdf_reified(a, "urn:q");
  ASSERT_EQ(triples.size(), 6u);
  std::vector<std::string> preds;
  for (const auto& t : triples) preds.push_back(t.predicate.value);
  EXPECT_EQ(preds, (std::vector<std::string>{rdf::kRdfType, rdf::kRdfSubject, rdf::kRdfPredicate, rdf::kRdfObject,
                                             "alist:t", "alist:u"}));
}

TEST(ToRdf, BlankStatementNode) {
  const auto triples = rdf::to_rdf_reified(japan_fact(), "_:st");
  EXPECT_EQ(triples[0].subject, Term::blank("st"));
  EXPECT_EQ(rdf::from_rdf_reified(triples), std::vector<Alist>{japan_fact()});
}

TEST(ToRdf, RejectsNonGroundNestedOrIncomplete) {
  EXPECT_THROW(rdf::to_rdf_reified(testing::japan_query(), "urn:q"), NotGroundError);
  EXPECT_THROW(rdf::to_rdf_reified(Alist{{"s", "a"}, {"p", "b"}}, "urn:q"), MissingCoreAttributeError);
  EXPECT_THROW(rdf::to_rdf_reified(Alist{{"s", "a"}, {"p", "b"}, {"o", Alist{{"s", "c"}}}}, "urn:q"),
               NotSimpleError);
}

TEST(FromRdf, RoundTripsExampleThroughText) {
  const auto text = rdf::to_ntriples(rdf::to_rdf_reified(japan_fact(), "urn:stmt:1"));
  EXPECT_EQ(rdf::from_rdf_reified(rdf::parse_ntriples(text)), std::vector<Alist>{japan_fact()});
}

TEST(FromRdf, MissingObjectIsMalformed) {
  auto triples = rdf::to_rdf_reified(japan_fact(), "urn:stmt:1");
  triples.erase(triples.begin() + 3);
  EXPECT_THROW(rdf::from_rdf_reified(triples), MalformedReificationError);
}

TEST(FromRdf, DuplicatesAndTypingAreChecked) {
  const auto base = rdf::to_rdf_reified(japan_fact(), "urn:stmt:1");
  auto dup = base;
  dup.push_back({Term::iri("urn:stmt:1"), Term::iri(rdf::kRdfSubject), Term::literal("Korea")});
  EXPECT_THROW(rdf::from_rdf_reified(dup), MalformedReificationError);

  auto untyped = base;
  untyped.erase(untyped.begin());
  EXPECT_THROW(rdf::from_rdf_reified(untyped), MalformedReificationError);

  auto twice = base;
  twice.push_back(base.front());
  EXPECT_THROW(rdf::from_rdf_reified(twice), MalformedReificationError);

  auto foreign = base;
  foreign.push_back({Term::iri("urn:stmt:1"), Term::iri("http://example.org/p"), Term::literal("x")});
  EXPECT_THROW(rdf::from_rdf_reified(foreign), MalformedReificationError);
}

TEST(FromRdf, InterleavedStatementsSeparate) {
  const Alist q2{{"s", "UK"}, {"p", "capital"}, {"o", "London"}, {"l", "Europe"}, {"u", 0.75}};
  const auto t1 = rdf::to_rdf_reified(japan_fact(), "urn:q1");
  const auto t2 = rdf::to_rdf_reified(q2, "urn:q2");
  auto lines = lines_of(rdf::to_ntriples(t1));
  const auto more = lines_of(rdf::to_ntriples(t2));
  lines.insert(lines.end(), more.begin(), more.end());

  testing::Rng rng(5);
  for (int round = 0; round < 20; ++round) {
    std::shuffle(lines.begin(), lines.end(), rng);
    const auto statements = rdf::from_rdf_reified_statements(rdf::parse_ntriples(join_lines(lines)));
    ASSERT_EQ(statements.size(), 2u);
    for (const auto& st : statements) {
      if (st.statement == Term::iri("urn:q1")) {
        EXPECT_EQ(st.alist, japan_fact());
      } else {
        EXPECT_EQ(st.statement, Term::iri("urn:q2"));
        EXPECT_EQ(st.alist, q2);
      }
    }
  }
}

TEST(RdfRoundTrip, GeneratedGroundFacts) {
  testing::Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    const std::size_t extra = testing::pick(rng, 5);
    const auto a = testing::random_ground_fact(rng, extra);
    const auto triples = rdf::to_rdf_reified(a, "urn:stmt:" + std::to_string(i));
    EXPECT_EQ(triples.size(), 4 + (a.size() - 3));
    EXPECT_EQ(a.size() - 3, extra);
    const auto back = rdf::from_rdf_reified(rdf::parse_ntriples(rdf::to_ntriples(triples)));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back.front(), a) << emit_json(a);
  }
}

TEST(NTriples, ParsesEscapesCommentsAndLanguageTags) {
  const auto triples = rdf::parse_ntriples(
      "# comment\n"
      "\n"
      "<urn:a> <urn:p> \"caf\\u00E9 \\\"q\\\"\\n\" .\n"
      "_:b1 <urn:p> \"Tokyo\"@en .   # trailing\n"
      "<urn:a> <urn:p> <urn:b> .\r\n");
  ASSERT_EQ(triples.size(), 3u);
  EXPECT_EQ(triples[0].object.value, "café \"q\"\n");
  EXPECT_EQ(triples[1].subject, Term::blank("b1"));
  EXPECT_EQ(triples[1].object.language, "en");
  EXPECT_EQ(triples[2].object, Term::iri("urn:b"));
}

TEST(NTriples, EmitsOneLinePerTripleAndReparses) {
  const std::vector<Triple> triples{
      {Term::iri("urn:a"), Term::iri("urn:p"), Term::literal("line\nbreak \\ \"quoted\" tab\t")},
      {Term::blank("x"), Term::iri("urn:p"), Term::literal("3.5", rdf::kXsdDouble)},
  };
  const auto text = rdf::to_ntriples(triples);
  EXPECT_EQ(lines_of(text).size(), 2u);
  for (const auto& l : lines_of(text)) EXPECT_EQ(l.substr(l.size() - 2), " .");
  EXPECT_EQ(rdf::parse_ntriples(text), triples);
}

TEST(NTriples, RejectsMalformedLines) {
  EXPECT_THROW(rdf::parse_ntriples("<urn:a> <urn:p> \"x\"\n"), SyntaxError);
  EXPECT_THROW(rdf::parse_ntriples("\"lit\" <urn:p> <urn:b> .\n"), SyntaxError);
  EXPECT_THROW(rdf::parse_ntriples("<urn:a> _:p <urn:b> .\n"), SyntaxError);
  EXPECT_THROW(rdf::parse_ntriples("<urn:a> <urn:p> <urn:b> . extra\n"), SyntaxError);
}

TEST(TermValue, DecodesTypedLiterals) {
  EXPECT_EQ(rdf::term_value(Term::literal("42", rdf::kXsdInteger)), AlistValue(42));
  EXPECT_EQ(rdf::term_value(Term::literal("0.5", rdf::kXsdDouble)), AlistValue(0.5));
  EXPECT_EQ(rdf::term_value(Term::literal("true", rdf::kXsdBoolean)), AlistValue(true));
  EXPECT_EQ(rdf::term_value(Term::literal("[1,\"a\"]", rdf::kListType)), AlistValue(AlistValue::List{1, "a"}));
  EXPECT_THROW(rdf::term_value(Term::literal("4x", rdf::kXsdInteger)), ParseError);
}

}  // namespace
}  // namespace alist
