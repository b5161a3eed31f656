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

// alist: validate, normalize, translate and answer alist queries.
//
// Exit codes: 0 answered / ok, 1 invalid input, 2 no answer, 3 transport
// failure in live mode.

#include <cstdlib>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "alist/alist.hpp"
#include "alist/http_transport.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNoAnswer = 2;
constexpr int kExitTransport = 3;

constexpr const char* kFormulaHelp = R"(Formula syntax:
  P(t1, ..., tn)         predicate; lowercase identifiers are variables,
                         Capitalized identifiers and "quoted strings" constants
  f(t1, ..., tn)         function term inside a predicate argument
  A & B, A | B, ~A       conjunction, disjunction, negation
  A -> B                 implication (parsed, rejected by translation)
  forall x. A            universal quantifier
  exists x. A            existential quantifier
  forall x in [2022..2031]. A
  forall x in [A, B, C]. A
                         bounded quantifier over a finite range)";

/// A positional input: "-" or empty reads stdin, text starting with '{' is
/// taken literally, anything else is a file path.
std::string read_input(const std::string& arg) {
  if (arg.empty() || arg == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') return arg;
  return alist::read_file(arg);
}

alist::Alist read_alist(const std::string& arg) { return alist::parse_json(read_input(arg)); }

struct QueryOptions {
  std::string input;
  std::string config_path;
  std::string sources_path;
  std::string fixtures_path;
  bool offline = false;
  bool live = false;
  bool explain = false;
  std::optional<int> max_depth;
  std::string not_strategy;
  std::string output;
  bool sequential = false;
};

alist::CliConfig resolve_config(const QueryOptions& q) {
  alist::CliConfig config;
  std::string path = q.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("ALIST_CONFIG"); env && *env) path = env;
  }
  if (!path.empty()) config = alist::load_config(path);
  if (!q.sources_path.empty()) config.sources_path = q.sources_path;
  if (!q.fixtures_path.empty()) config.fixtures_path = q.fixtures_path;
  if (q.offline) config.offline = true;
  if (q.live) config.offline = false;
  if (q.max_depth) {
    if (*q.max_depth < 1) throw alist::ConfigError("--max-depth must be at least 1");
    config.env.max_depth = *q.max_depth;
  }
  if (!q.not_strategy.empty()) config.env.not_strategy = alist::parse_not_strategy(q.not_strategy);
  if (q.output == "pretty") {
    config.output = alist::OutputFormat::Pretty;
  } else if (q.output == "json") {
    config.output = alist::OutputFormat::Json;
  }
  if (q.sequential) config.env.parallel = false;
  if (config.sources_path.empty()) throw alist::ConfigError("no sources: pass --sources or a config file");
  return config;
}

alist::KbSet build_kbs(const alist::CliConfig& config) {
  alist::KbSet kbs;
  kbs.sources = alist::load_sources(config.sources_path);
  if (!config.offline) {
    kbs.transport = std::make_shared<alist::LiveTransport>();
  } else if (config.fixtures_path) {
    kbs.transport = std::make_shared<alist::FixtureTransport>(*config.fixtures_path);
  } else {
    kbs.transport = std::make_shared<alist::NullTransport>();
  }
  return kbs;
}

nlohmann::ordered_json value_json(const alist::AlistValue& v) {
  return nlohmann::ordered_json::parse(alist::emit_value_json(v));
}

int cmd_query(const QueryOptions& q) {
  const auto query = read_alist(q.input);
  const auto config = resolve_config(q);
  const auto kbs = build_kbs(config);
  const bool pretty = config.output == alist::OutputFormat::Pretty;
  try {
    const auto result = alist::infer(query, kbs, config.env);
    if (pretty) {
      std::cout << "answer: " << alist::render_value(result.answer) << "\n";
      std::cout << "uncertainty: " << result.uncertainty << "\n";
      std::cout << "sources:";
      for (const auto& s : result.sources) std::cout << " " << s;
      std::cout << "\n";
      if (q.explain) std::cout << "\n" << alist::explain(result.graph);
      return kExitOk;
    }
    nlohmann::ordered_json out;
    out["answer"] = value_json(result.answer);
    out["uncertainty"] = result.uncertainty;
    out["sources"] = std::vector<std::string>(result.sources.begin(), result.sources.end());
    if (q.explain) {
      out["explanation"] = alist::explain(result.graph);
      out["graph"] = alist::graph_to_json(result.graph);
    }
    std::cout << out.dump() << "\n";
    return kExitOk;
  } catch (const alist::NoAnswerError& e) {
    std::cerr << e.describe() << "\n" << alist::explain(e.graph());
    if (q.explain) {
      if (pretty) {
        std::cout << "no answer\n\n" << alist::explain(e.graph());
      } else {
        nlohmann::ordered_json out;
        out["answer"] = nullptr;
        out["error"] = e.describe();
        out["explanation"] = alist::explain(e.graph());
        out["graph"] = alist::graph_to_json(e.graph());
        std::cout << out.dump() << "\n";
      }
    }
    if (!config.offline && e.graph().any_transport_failure()) return kExitTransport;
    return kExitNoAnswer;
  }
}

int cmd_translate(const std::string& text, const std::string& query_var, const std::vector<std::string>& ranges,
                  bool no_relational, bool expand) {
  auto formula = alist::fol::parse_formula(text);
  for (const auto& r : ranges) {
    const auto eq = r.find('=');
    if (eq == std::string::npos || eq == 0) throw alist::ConfigError("--range expects var=values, got '" + r + "'");
    formula = alist::fol::attach_range(formula, r.substr(0, eq), alist::fol::parse_range_text(r.substr(eq + 1)));
  }
  alist::fol::TranslateOptions opts;
  if (!query_var.empty()) opts.query_var = query_var;
  opts.relational = !no_relational;
  const auto a = alist::fol::translate_formula(formula, opts);
  if (!expand) {
    std::cout << alist::emit_json(a) << "\n";
    return kExitOk;
  }
  const auto expansion = alist::fol::expand_ranges(a);
  if (expansion.unexpanded) {
    std::cerr << "range too large to expand; printing the Skolemised form\n";
    std::cout << alist::emit_json(a) << "\n";
    return kExitOk;
  }
  for (const auto& e : expansion.queries) std::cout << alist::emit_json(e) << "\n";
  return kExitOk;
}

int cmd_normalize(const std::string& input) {
  const auto n = alist::normalize(alist::canonicalize(read_alist(input)));
  nlohmann::ordered_json out;
  out["root"] = nlohmann::ordered_json::parse(alist::emit_json(n.root));
  auto children = nlohmann::ordered_json::array();
  for (const auto& c : n.children) {
    nlohmann::ordered_json j;
    j["key"] = c.key.render();
    j["alist"] = nlohmann::ordered_json::parse(alist::emit_json(c.child));
    children.push_back(std::move(j));
  }
  out["children"] = std::move(children);
  std::cout << out.dump() << "\n";
  return kExitOk;
}

int cmd_from_rdf(const std::string& input) {
  for (const auto& a : alist::rdf::from_rdf_reified(alist::rdf::parse_ntriples(read_input(input)))) {
    std::cout << alist::emit_json(a) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alist: validate, translate and answer alist queries"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string input;

  auto* validate = app.add_subcommand("validate", "Check an alist and print its canonical form");
  validate->add_option("input", input, "Alist JSON file, inline JSON, or - for stdin");

  auto* normalize = app.add_subcommand("normalize", "Split a nested alist into simple alists");
  normalize->add_option("input", input, "Alist JSON file, inline JSON, or - for stdin");

  std::string formula;
  std::string query_var;
  std::vector<std::string> ranges;
  bool no_relational = false;
  bool expand = false;
  auto* translate = app.add_subcommand("translate-fol", "Translate a first-order formula to an alist");
  translate->add_option("formula", formula, "Formula text")->required();
  translate->add_option("--query-var", query_var, "Variable that becomes the projection variable");
  translate->add_option("--range", ranges, "Bound a quantified variable: var=2022..2031 or var=A,B,C");
  translate->add_flag("--no-relational", no_relational, "Use arg1..argN for every predicate");
  translate->add_flag("--expand", expand, "Print one query per value of each bounded Skolem constant");
  translate->footer(kFormulaHelp);

  auto* sparql = app.add_subcommand("to-sparql", "Compile a simple alist to SPARQL");
  sparql->add_option("input", input, "Alist JSON file, inline JSON, or - for stdin");

  std::string iri = "urn:stmt:1";
  auto* to_rdf = app.add_subcommand("to-rdf", "Reify a simple ground alist as N-Triples");
  to_rdf->add_option("input", input, "Alist JSON file, inline JSON, or - for stdin");
  to_rdf->add_option("--iri", iri, "Statement IRI")->capture_default_str();

  auto* from_rdf = app.add_subcommand("from-rdf", "Recover alists from reified N-Triples");
  from_rdf->add_option("input", input, "N-Triples file or - for stdin");

  QueryOptions q;
  std::string output;
  auto* query = app.add_subcommand("query", "Answer an alist query against the configured sources");
  query->add_option("input", q.input, "Alist JSON file, inline JSON, or - for stdin");
  query->add_option("--config", q.config_path, "Config file (default: $ALIST_CONFIG)");
  query->add_option("--sources", q.sources_path, "Sources file");
  query->add_option("--fixtures", q.fixtures_path, "Directory of recorded responses");
  auto* offline = query->add_flag("--offline", q.offline, "Never contact live endpoints");
  query->add_flag("--live", q.live, "Contact live endpoints")->excludes(offline);
  query->add_flag("--explain", q.explain, "Include the inference graph");
  query->add_option("--max-depth", q.max_depth, "Decomposition depth limit");
  query->add_option("--not-strategy", q.not_strategy, "closed_world | failure_as_negation | functional_difference");
  query->add_option("--output", q.output, "json | pretty")->check(CLI::IsMember({"json", "pretty"}));
  query->add_flag("--sequential", q.sequential, "Resolve sibling nodes one at a time");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      std::cout << alist::emit_json(alist::canonicalize(read_alist(input))) << "\n";
      return kExitOk;
    }
    if (*normalize) return cmd_normalize(input);
    if (*translate) return cmd_translate(formula, query_var, ranges, no_relational, expand);
    if (*sparql) {
      std::cout << alist::to_sparql(read_alist(input));
      return kExitOk;
    }
    if (*to_rdf) {
      std::cout << alist::rdf::to_ntriples(alist::rdf::to_rdf_reified(read_alist(input), iri));
      return kExitOk;
    }
    if (*from_rdf) return cmd_from_rdf(input);
    if (*query) return cmd_query(q);
  } catch (const alist::Error& e) {
    std::cerr << e.describe() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
