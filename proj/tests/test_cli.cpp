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
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "alist/json_format.hpp"
#include "alist/rdf.hpp"
#include "alist/transport.hpp"

namespace alist {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out += ch;
    }
  }
  return out + "'";
}

Run run(const std::string& args, const std::string& stdin_text = "") {
  const auto dir = fs::temp_directory_path() / ("alist_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto err_path = dir / "stderr";
  const auto in_path = dir / "stdin";
  std::ofstream(in_path) << stdin_text;
  const std::string cmd = quote(ALIST_CLI) + " " + args + " <" + quote(in_path.string()) + " 2>" +
                          quote(err_path.string());
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_file(err_path);
  return r;
}

std::string sample(const std::string& rel) { return quote((fs::path(ALIST_SAMPLES) / rel).string()); }

std::string config() { return "--config " + sample("config.json"); }

TEST(CliValidate, PrintsCanonicalForm) {
  const auto r = run("validate " + quote(R"({"s":"Japan","p":"capital","o":"Tokyo","t":1960})"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "{\"s\":\"Japan\",\"p\":\"capital\",\"o\":\"Tokyo\",\"t\":1960}\n");
  const auto q = run("validate " + quote(R"({"s":"Japan","p":"capital","o":"?x"})"));
  EXPECT_EQ(q.out, "{\"h\":\"value\",\"v\":\"?x\",\"s\":\"Japan\",\"p\":\"capital\",\"o\":\"?x\"}\n");
}

TEST(CliValidate, ReadsStdinAndFiles) {
  EXPECT_EQ(run("validate -", R"({"s":"A","p":"b","o":"C"})").code, 0);
  EXPECT_EQ(run("validate " + sample("queries/max_gdp.json")).code, 0);
  EXPECT_EQ(run("validate /nonexistent/file.json").code, 1);
}

TEST(CliValidate, ReportsInvariantWithPath) {
  const auto r = run("validate " + quote(R"({"s":"A","$k":{"s":"?a","o":"?b"}})"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("MultipleProjectionError"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("$.$k"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(CliValidate, ReportsSyntaxErrorOffset) {
  const auto r = run("validate " + quote(R"({"s": "Japan", })"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("SyntaxError"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("byte 16"), std::string::npos) << r.err;
}

TEST(CliTranslate, ConjunctionExample) {
  const auto r = run("translate-fol " + quote(R"(cause_of_death("John Denver", x) & place_of_death("John Denver", y))"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_json(r.out), parse_json(R"({"h":"AND","v":["$x","$y"],)"
                                          R"("$x":{"s":"John Denver","p":"cause of death","o":"$x"},)"
                                          R"("$y":{"s":"John Denver","p":"place of death","o":"$y"}})"));
}

TEST(CliTranslate, RangeBindingAndExpansion) {
  const auto formula = quote("forall t. exists y. population(UK, y, t)");
  const auto sk = run("translate-fol " + formula + " --range t=2022..2031");
  EXPECT_EQ(sk.code, 0) << sk.err;
  const auto a = parse_json(sk.out);
  EXPECT_EQ(*a.get(Attr::Time), AlistValue("sk1"));
  EXPECT_TRUE(a.get(AttributeName::custom("sk1"))->is_nested());

  const auto ex = run("translate-fol " + formula + " --range t=2022..2031 --expand");
  EXPECT_EQ(ex.code, 0);
  std::size_t lines = 0;
  for (char ch : ex.out) lines += ch == '\n';
  EXPECT_EQ(lines, 10u);
}

TEST(CliTranslate, SingleAtomAndErrors) {
  EXPECT_EQ(parse_json(run("translate-fol " + quote("capital(Japan, x)")).out),
            parse_json(R"({"s":"Japan","p":"capital","o":"?x"})"));
  const auto bad = run("translate-fol " + quote("P(x) & & Q(x)"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("byte 7"), std::string::npos) << bad.err;
  EXPECT_EQ(run("translate-fol " + quote("P(x) -> Q(x)")).code, 1);
  EXPECT_EQ(run("translate-fol " + quote("P(t)") + " --range t").code, 1);
}

TEST(CliQuery, CapitalOfJapan) {
  const auto r = run("query " + config() + " " + sample("queries/japan_capital_1960.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["answer"], "Tokyo");
  EXPECT_EQ(j["uncertainty"], 1.0);
  EXPECT_EQ(j["sources"], nlohmann::json::array({"facts"}));
}

TEST(CliQuery, MaxGdpCountry) {
  const auto r = run("query " + config() + " " + sample("queries/max_gdp.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["answer"], "Kenya");
}

TEST(CliQuery, RecordedRemoteSources) {
  const auto wb = run("query " + config() + " " + sample("queries/ghana_population_2010.json"));
  EXPECT_EQ(wb.code, 0) << wb.err;
  EXPECT_EQ(nlohmann::json::parse(wb.out)["answer"], 24779619);
  const auto wd = run("query " + config() + " " + sample("queries/sister_city_kansas.json"));
  EXPECT_EQ(wd.code, 0) << wd.err;
  EXPECT_EQ(nlohmann::json::parse(wd.out)["answer"], nlohmann::json::array({"Seville", "Freeport"}));
}

TEST(CliQuery, UnrecordedEndpointOfflineIsNoAnswer) {
  const auto r = run("query " + config() + " --explain " + sample("queries/ghana_population_2011.json"));
  EXPECT_EQ(r.code, 2);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["answer"].is_null());
  EXPECT_NE(j["explanation"].get<std::string>().find("FAILED"), std::string::npos);
  EXPECT_EQ(j["graph"]["nodes"][0]["state"], "failed");
}

TEST(CliQuery, ExplainIncludesGraph) {
  const auto r = run("query " + config() + " --explain " + sample("queries/europe_population.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["answer"], 200000000);
  EXPECT_EQ(j["graph"]["nodes"].size(), 4u);
  EXPECT_EQ(j["graph"]["edges"].size(), 3u);
  const auto pretty = run("query " + config() + " --output pretty --explain " + sample("queries/europe_population.json"));
  EXPECT_EQ(pretty.out.rfind("answer: 200000000\n", 0), 0u) << pretty.out;
}

TEST(CliQuery, NegationStrategyFromFlag) {
  const auto r = run("query " + config() + " --not-strategy functional_difference " +
                     sample("queries/not_santa_cruz.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["answer"], true);
  // Closed-world negation is refused while open sources are configured.
  const auto open = run("query " + config() + " " + sample("queries/not_santa_cruz.json"));
  EXPECT_EQ(open.code, 1);
  EXPECT_NE(open.err.find("OpenWorldError"), std::string::npos) << open.err;
}

TEST(CliQuery, ConfigurationErrors) {
  EXPECT_EQ(run("query " + sample("queries/max_gdp.json")).code, 1);
  EXPECT_EQ(run("query " + config() + " --max-depth 0 " + sample("queries/max_gdp.json")).code, 1);
  EXPECT_NE(run("query " + config() + " --live --offline " + sample("queries/max_gdp.json")).code, 0);
}

TEST(CliNormalize, RootAndChildren) {
  const auto r = run("normalize " + sample("queries/max_gdp.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(parse_json(j["root"].dump()), parse_json(R"({"h":"max","v":"$y","s":"?x","p":"gdp","o":"$y"})"));
  ASSERT_EQ(j["children"].size(), 1u);
  EXPECT_EQ(j["children"][0]["key"], "$y");
}

TEST(CliRdf, RoundTripThroughCommands) {
  const auto fact = R"({"s":"Japan","p":"capital","o":"Tokyo","t":1960})";
  const auto nt = run("to-rdf " + quote(fact) + " --iri urn:stmt:1");
  EXPECT_EQ(nt.code, 0) << nt.err;
  EXPECT_EQ(rdf::parse_ntriples(nt.out).size(), 5u);
  const auto back = run("from-rdf -", nt.out);
  EXPECT_EQ(back.code, 0) << back.err;
  EXPECT_EQ(back.out, std::string(fact) + "\n");
  EXPECT_EQ(run("to-rdf " + quote(R"({"s":"Japan","p":"capital","o":"?x"})")).code, 1);
  EXPECT_EQ(run("from-rdf -", "<urn:a> <urn:b> .\n").code, 1);
}

TEST(CliSparql, CompilesSimpleAlists) {
  const auto r = run("to-sparql " + quote(R"({"s":"Japan","p":"capital","o":"?x"})"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("PREFIX rdfs:", 0), 0u);
  EXPECT_NE(r.out.find("SELECT ?x\n"), std::string::npos);
  const auto nested = run("to-sparql " + sample("queries/max_gdp.json"));
  EXPECT_EQ(nested.code, 1);
  EXPECT_NE(nested.err.find("NotSimpleError"), std::string::npos);
}

TEST(Cli, RequiresSubcommand) {
  EXPECT_NE(run("").code, 0);
  EXPECT_EQ(run("--help").code, 0);
}

}  // namespace
}  // namespace alist
