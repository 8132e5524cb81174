#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metadag/dag.hpp"
#include "metadag/meta_state.hpp"

namespace metadag {

struct Rule {
  std::vector<Symbol> head;
  Symbol sigma;
  std::vector<Symbol> tail;

  MetaState head_state() const { return MetaState(head); }
  MetaState tail_state() const { return MetaState(tail); }
  bool is_root() const { return head.empty(); }

  /// `p q -> C -> p`, with `_` for an empty side.
  std::string to_string() const;
  bool operator==(const Rule&) const = default;
  auto operator<=>(const Rule&) const = default;
};

/// Parses the `<head> -> <sigma> -> <tail>` text of one rule (no alphabet checks).
Rule parse_rule(std::string_view text);

class Grammar {
 public:
  Grammar() = default;
  /// Validates disjoint alphabets, rule symbols and duplicate rules; throws `Error`.
  Grammar(std::set<Symbol> terminals, std::set<Symbol> nonterminals, std::vector<Rule> rules);

  const std::set<Symbol>& terminals() const { return terminals_; }
  const std::set<Symbol>& nonterminals() const { return nonterminals_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const Rule& rule(std::size_t i) const { return rules_.at(i); }
  std::size_t size() const { return rules_.size(); }

  bool is_terminal(const Symbol& s) const { return terminals_.contains(s); }
  bool is_nonterminal(const Symbol& s) const { return nonterminals_.contains(s); }

  std::optional<std::size_t> index_of(const Rule& r) const;

  /// Pairs of rule indices sharing head and terminal but not tail.
  std::vector<std::pair<std::size_t, std::size_t>> clashes() const;
  bool deterministic() const { return clashes().empty(); }

  /// Largest head length (0 for an empty grammar).
  std::size_t max_head() const;

  /// Same alphabets, rules restricted to the given indices (kept in order).
  Grammar restricted(const std::set<std::size_t>& keep) const;

 private:
  std::set<Symbol> terminals_;
  std::set<Symbol> nonterminals_;
  std::vector<Rule> rules_;
};

/// Grammar file format: `terminals:`, `nonterminals:`, `rule:` lines, `#` comments.
Grammar parse_grammar(std::string_view text);
std::string print_grammar(const Grammar& g);

// ---------------------------------------------------------------------------
// Derivations

struct DerivationStep {
  std::size_t rule = 0;
  std::vector<VertexId> chosen;
};

struct Derivation {
  std::vector<DerivationStep> steps;
  /// Final prefix DAG. Every edge carries the nonterminal of the temporary
  /// vertex it was created for.
  Dag result;
  /// Meta-states before the first step and after every step.
  std::vector<MetaState> trace;
};

/// One derivation step. `chosen` are distinct temporary vertices whose label
/// string equals the head. The new vertex id is stored in `created` if given.
Dag apply_rule(const Dag& g, const Rule& r, const std::vector<VertexId>& chosen,
               const std::set<Symbol>& nonterminals, VertexId* created = nullptr);

/// Folds `apply_rule` from the empty DAG.
Derivation derive(const Grammar& grammar, const std::vector<DerivationStep>& script);

/// The labeled result of a complete derivation; throws if temporaries remain.
Dag derivation_dag(const Grammar& grammar, const Derivation& d);

/// Every edge labeling of a complete DAG that is locally rule-consistent: each
/// vertex v has a rule with head = labels of in(v), sigma = label(v) and
/// tail = labels of out(v). Stops after `limit` labelings. Throws on a vertex
/// label outside the terminal alphabet or an invalid DAG.
std::vector<Dag> derivation_labelings(const Grammar& grammar, const Dag& g, std::size_t limit = std::numeric_limits<std::size_t>::max());

/// Derivation script reproducing a locally consistent labeling, steps in
/// topological order; replays with `derive` to a copy of the labeled DAG.
std::vector<DerivationStep> script_for_labeling(const Grammar& grammar, const Dag& labeled);

/// True iff exactly one derivation DAG exists. Throws `Error` if g is not a
/// connected member of L(G).
bool has_unique_derivation_dag(const Grammar& grammar, const Dag& g);

// ---------------------------------------------------------------------------
// Language enumeration and pruning

constexpr std::size_t kEnumerationCap = 12;

struct LanguageMember {
  Dag dag;         // unlabeled, ids compacted
  Dag derivation;  // same graph with derivation edge labels
  std::string key; // canonical_form(dag)
};

/// All complete DAGs of L(G) (connected_only) or L_&(G) with at most
/// `max_vertices` vertices, one entry per isomorphism class, ordered by vertex
/// count then key. Throws above `kEnumerationCap`.
std::vector<LanguageMember> enumerate_language(const Grammar& grammar, std::size_t max_vertices,
                                               bool connected_only = true);

struct PruneResult {
  Grammar grammar;
  std::vector<Rule> removed;
};

constexpr std::size_t kPruneBound = 8;

/// Removes rules that appear in no derivation of L(G): producible/consumable
/// fixpoint, then a check that the rule labels some member of the enumerated
/// language up to `bound` vertices.
PruneResult prune_useless(const Grammar& grammar, std::size_t bound = kPruneBound);

bool is_pruned(const Grammar& grammar, std::size_t bound = kPruneBound);

}  // namespace metadag
