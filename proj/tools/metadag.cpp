#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "metadag/dag_io.hpp"
#include "metadag/dfa.hpp"
#include "metadag/error.hpp"
#include "metadag/exploration.hpp"
#include "metadag/grammar.hpp"
#include "metadag/membership.hpp"
#include "metadag/rule_analysis.hpp"
#include "metadag/swap.hpp"

using namespace metadag;

namespace {

constexpr int kAccept = 0;
constexpr int kReject = 1;
constexpr int kError = 2;

Grammar load_grammar(const std::string& path) { return parse_grammar(read_text_file(path)); }

Dag load_dag(const std::string& path) {
  Dag g = parse_dag(read_text_file(path));
  if (auto problems = validate_dag(g); !problems.empty()) throw Error(path + ": " + problems.front());
  return g;
}

Dfa load_dfa(const std::string& path) { return parse_dfa(read_text_file(path)); }

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
}

EdgeId edge_by_name(const Dag& g, const std::string& name) {
  auto e = g.find_edge(name);
  if (!e) throw Error("unknown edge `" + name + "`");
  return *e;
}

int cmd_validate(const std::string& path) {
  Grammar g = load_grammar(path);
  PruneResult pruned = prune_useless(g);
  std::cout << "terminals: " << g.terminals().size() << ", nonterminals: " << g.nonterminals().size()
            << ", rules: " << g.size() << "\n";
  auto clashes = g.clashes();
  if (clashes.empty()) {
    std::cout << "deterministic; " << pruned.removed.size() << " useless rules\n";
  } else {
    std::cout << "nondeterministic; " << pruned.removed.size() << " useless rules\n";
    for (auto [i, j] : clashes) {
      std::cout << "clash: `" << g.rule(i).to_string() << "` and `" << g.rule(j).to_string() << "`\n";
    }
  }
  for (const auto& r : pruned.removed) std::cout << "useless: " << r.to_string() << "\n";
  return kAccept;
}

int cmd_classify(const std::string& path) {
  Grammar g = load_grammar(path);
  Grammar pruned = prune_useless(g).grammar;
  Classification c = classify(pruned);
  if (c.empty_language) {
    std::cout << "FINITE (empty)\n";
    return kAccept;
  }
  std::cout << to_string(c.cls) << "\n";
  if (c.id_witness)
    std::cout << format_id_witness(pruned, *c.id_witness);
  else if (c.cycle)
    std::cout << format_cycle(pruned, *c.cycle);
  return kAccept;
}

int cmd_dfa(const std::string& path, const std::string& qset, bool estimate, bool minimal, std::size_t bound,
            const std::string& out) {
  Grammar g = load_grammar(path);
  if (qset.empty() == !estimate) throw Error("dfa: give exactly one of --qset and --estimate");
  Dfa dfa;
  if (estimate) {
    QminEstimate est = estimate_qmin(g, bound);
    std::cerr << est.report;
    dfa = trim(build_dfa(g, est.states.states));
  } else {
    dfa = build_dfa(g, parse_qset(read_text_file(qset)));
  }
  if (minimal) dfa = minimize(dfa);
  emit(print_dfa(dfa), out);
  return kAccept;
}

int cmd_member(const std::string& source, const std::string& dag_path, bool trace, const std::string& fd_qset,
               bool unordered, bool components) {
  std::string text = read_text_file(source);
  Dag g = load_dag(dag_path);
  ReadOptions options{unordered};
  if (looks_like_dfa(text)) {
    if (!fd_qset.empty()) throw Error("member: --fd-qset needs a grammar, not an automaton");
    Dfa dfa = parse_dfa(text);
    ReadResult r = read_dag(dfa, g, options);
    if (trace) std::cout << format_trace(dfa, g, r);
    return r.accepted ? kAccept : kReject;
  }
  Grammar grammar = parse_grammar(text);
  if (!fd_qset.empty()) {
    Dfa dfa = build_dfa(grammar, parse_qset(read_text_file(fd_qset)));
    for (const auto& [id, v] : g.vertices()) {
      if (!grammar.is_terminal(v.label)) throw Error("vertex " + v.name + " has a label outside the terminals");
    }
    ReadResult r = read_dag(dfa, g, options);
    if (trace) std::cout << format_trace(dfa, g, r);
    return r.accepted ? kAccept : kReject;
  }
  bool ok = member_oracle(grammar, g, components ? OracleMode::components : OracleMode::connected);
  if (trace) std::cout << (ok ? "ACCEPT" : "REJECT") << "\n";
  return ok ? kAccept : kReject;
}

int cmd_enumerate(const std::string& path, std::size_t max_vertices, bool components, const std::string& out_dir) {
  Grammar g = load_grammar(path);
  auto members = enumerate_language(g, max_vertices, !components);
  std::cout << members.size() << "\n";
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    for (std::size_t i = 0; i < members.size(); ++i) {
      std::ostringstream name;
      name << "member_" << std::setw(4) << std::setfill('0') << i + 1 << ".dag";
      write_text_file(std::filesystem::path(out_dir) / name.str(), print_dag(members[i].dag));
    }
  }
  return kAccept;
}

int cmd_swap(const std::string& path, const std::string& e0, const std::string& e1, const std::string& out) {
  Dag g = load_dag(path);
  emit(print_dag(do_swap(g, edge_by_name(g, e0), edge_by_name(g, e1))), out);
  return kAccept;
}

int cmd_pump(const std::string& path, const std::string& e, const std::string& e_prime, std::size_t k,
             const std::string& out) {
  Dag g = load_dag(path);
  emit(print_dag(pump(g, edge_by_name(g, e), edge_by_name(g, e_prime), k)), out);
  return kAccept;
}

int cmd_product(const std::string& a, const std::string& b, bool unite, bool intersect, bool minimal,
                const std::string& out) {
  if (unite == intersect) throw Error("product: give exactly one of --union and --intersect");
  Dfa d = product(load_dfa(a), load_dfa(b), unite ? ProductMode::unite : ProductMode::intersect);
  if (minimal) d = minimize(d);
  emit(print_dfa(d), out);
  return kAccept;
}

int cmd_closure(const std::string& grammar_path, const std::string& dag_path, std::size_t trials,
                std::uint64_t seed) {
  Grammar g = load_grammar(grammar_path);
  Dag dag = load_dag(dag_path);
  auto labelings = derivation_labelings(g, dag, 1);
  if (labelings.empty()) throw Error("closure: the DAG has no derivation DAG under this grammar");
  SwapClosureReport r = check_swap_closure(g, labelings.front(), trials, seed);
  std::cout << "trials " << r.trials << ", defined " << r.defined << ", undefined " << r.undefined
            << ", violations " << r.violations.size() << "\n";
  for (const auto& v : r.violations) std::cout << v;
  return r.violations.empty() ? kAccept : kReject;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regular DAG grammars: meta-state analysis, automata and membership"};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version",
                       "metadag 1.0.0\n"
                       "grammar format 1\n"
                       "dag format 1\n"
                       "qset format 1\n"
                       "dfa format 1\n"
                       "witness format 1");
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Seed for randomized procedures");

  std::string grammar, dag, qset, out, fd_qset, e0, e1, dfa_a, dfa_b, out_dir;
  bool estimate = false, minimal = false, trace = false, unordered = false, components = false;
  bool unite = false, intersect = false;
  std::size_t bound = 8, max_vertices = 8, k = 1, trials = 200;

  auto* validate = app.add_subcommand("validate", "Parse a grammar and report determinism and useless rules");
  validate->add_option("grammar", grammar)->required();

  auto* classify_cmd = app.add_subcommand("classify", "Classify the language as FINITE, FID or ID");
  classify_cmd->add_option("grammar", grammar)->required();

  auto* dfa = app.add_subcommand("dfa", "Build the automaton over a meta-state set");
  dfa->add_option("grammar", grammar)->required();
  dfa->add_option("--qset", qset, "Meta-state set file");
  dfa->add_flag("--estimate", estimate, "Estimate a sufficient meta-state set");
  dfa->add_option("--oracle-bound", bound, "Vertex bound for validating the estimate");
  dfa->add_flag("--minimize", minimal, "Minimize the automaton");
  dfa->add_option("-o,--output", out, "Output file");

  auto* member = app.add_subcommand("member", "Decide membership of a DAG");
  member->add_option("source", grammar, "Grammar or automaton file")->required();
  member->add_option("dag", dag)->required();
  member->add_flag("--trace", trace, "Print the reading trace");
  member->add_option("--fd-qset", fd_qset, "Restrict derivations to this meta-state set");
  member->add_flag("--unordered-heads", unordered, "Non-standard: match heads as multisets");
  member->add_flag("--components", components, "Accept disjoint unions of members (oracle only)");

  auto* enumerate = app.add_subcommand("enumerate", "Enumerate the language up to a vertex bound");
  enumerate->add_option("grammar", grammar)->required();
  enumerate->add_option("--max-vertices", max_vertices)->required();
  enumerate->add_flag("--components", components, "Enumerate disjoint unions of members as well");
  enumerate->add_option("--out-dir", out_dir, "Write one DAG file per member");

  auto* swap = app.add_subcommand("swap", "Swap the targets of two independent edges");
  swap->add_option("dag", dag)->required();
  swap->add_option("e0", e0)->required();
  swap->add_option("e1", e1)->required();
  swap->add_option("-o,--output", out, "Output file");

  auto* pump_cmd = app.add_subcommand("pump", "Chain k extra copies of a DAG by iterated swaps");
  pump_cmd->add_option("dag", dag)->required();
  pump_cmd->add_option("e", e0)->required();
  pump_cmd->add_option("e_prime", e1)->required();
  pump_cmd->add_option("k", k)->required();
  pump_cmd->add_option("-o,--output", out, "Output file");

  auto* product_cmd = app.add_subcommand("product", "Union or intersection of two automata");
  product_cmd->add_option("a", dfa_a)->required();
  product_cmd->add_option("b", dfa_b)->required();
  product_cmd->add_flag("--union", unite);
  product_cmd->add_flag("--intersect", intersect);
  product_cmd->add_flag("--minimize", minimal, "Minimize the product");
  product_cmd->add_option("-o,--output", out, "Output file");

  auto* closure = app.add_subcommand("closure", "Check that random same-label swaps stay in the language");
  closure->add_option("grammar", grammar)->required();
  closure->add_option("dag", dag)->required();
  closure->add_option("--trials", trials);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  try {
    if (*validate) return cmd_validate(grammar);
    if (*classify_cmd) return cmd_classify(grammar);
    if (*dfa) return cmd_dfa(grammar, qset, estimate, minimal, bound, out);
    if (*member) return cmd_member(grammar, dag, trace, fd_qset, unordered, components);
    if (*enumerate) return cmd_enumerate(grammar, max_vertices, components, out_dir);
    if (*swap) return cmd_swap(dag, e0, e1, out);
    if (*pump_cmd) return cmd_pump(dag, e0, e1, k, out);
    if (*product_cmd) return cmd_product(dfa_a, dfa_b, unite, intersect, minimal, out);
    if (*closure) return cmd_closure(grammar, dag, trials, seed);
    std::cerr << app.help();
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}
