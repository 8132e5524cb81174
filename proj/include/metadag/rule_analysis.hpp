#pragma once

#include <compare>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metadag/grammar.hpp"

namespace metadag {

enum class Side { head, tail };

/// One nonterminal occurrence in a rule.
struct Port {
  std::size_t rule = 0;
  Side side = Side::head;
  std::size_t position = 0;
  Symbol nonterminal;

  /// `r<rule>.<H|T><position>(<nonterminal>)`, e.g. `r1.H0(q)`.
  std::string to_string() const;
  auto operator<=>(const Port&) const = default;
};

struct PortGraph {
  std::vector<Port> ports;  // ordered by rule, side, position
  /// Index pairs (tail port, head port) with equal nonterminal.
  std::vector<std::pair<std::size_t, std::size_t>> agreements;
};

PortGraph build_port_graph(const Grammar& grammar);

/// A rule with an entry mark, an exit mark, or both. Both marks name ports
/// of `rule`.
struct MarkedRule {
  std::size_t rule = 0;
  std::optional<Port> entry;
  std::optional<Port> exit;
  bool operator==(const MarkedRule&) const = default;
};

struct RuleCycleWitness {
  std::vector<MarkedRule> rules;
  bool directed = false;
  bool operator==(const RuleCycleWitness&) const = default;
};

/// First rule carries only an exit mark, last rule only an entry mark.
struct RulePathWitness {
  std::vector<MarkedRule> rules;
  bool operator==(const RulePathWitness&) const = default;
};

struct IdWitness {
  RuleCycleWitness cycle;
  std::size_t instance = 0;  // cycle position of the rule holding the unmarked port
  Port unmarked;             // unmarked occurrence of q in the cycle
  Port marked;               // marked occurrence of p in the cycle
  RulePathWitness path;      // from q to p
};

/// Simple rule cycles (no port used twice) with at most `max_length` marked
/// rules; 0 means twice the number of rules. Each cycle is reported once, in
/// the orientation whose smallest port is an entry mark, starting there.
std::vector<RuleCycleWitness> find_rule_cycles(const Grammar& grammar, std::size_t max_length = 0);

/// Directed iff all entries sit in heads and all exits in tails, or conversely.
bool is_directed(const std::vector<MarkedRule>& rules);

/// Checks the cycle conditions from the witness alone: well-formed marks,
/// distinct entry and exit per rule, cyclic agreement, directed flag.
bool verify_rule_cycle(const Grammar& grammar, const RuleCycleWitness& c, std::string* why = nullptr);

/// Checks a rule path: at least two rules, weak ends, agreement between neighbours.
bool verify_rule_path(const Grammar& grammar, const RulePathWitness& p, std::string* why = nullptr);

/// Checks all conditions of an infinite-meta-state witness, including the
/// head/tail orientation of q at the start of the path.
bool verify_id_witness(const Grammar& grammar, const IdWitness& w, std::string* why = nullptr);

std::optional<IdWitness> find_id_witness(const Grammar& grammar);

/// Requires a pruned grammar; true iff a rule cycle exists.
bool is_infinite(const Grammar& grammar);

struct UnboundedWitness {
  bool unbounded = false;
  char condition = 0;  // 'a' or 'b'
  std::optional<RuleCycleWitness> cycle;
  std::optional<Port> unmarked;
  std::optional<RulePathWitness> path;
};

/// Whether label u (terminal or nonterminal) can occur unboundedly often:
/// (a) u occurs in the rules of a rule cycle, or (b) a rule path leads from an
/// unmarked occurrence in a cycle to a rule carrying u. Throws on unknown u.
UnboundedWitness label_unbounded(const Grammar& grammar, const Symbol& u);

enum class LanguageClass { finite, fid, id };

struct Classification {
  LanguageClass cls = LanguageClass::finite;
  bool empty_language = false;
  std::optional<RuleCycleWitness> cycle;
  std::optional<IdWitness> id_witness;
};

/// Finite / FID / ID for a pruned deterministic grammar. A grammar whose
/// language is empty is reported as Finite (empty). Throws `Error` for other
/// nondeterministic or unpruned input.
Classification classify(const Grammar& grammar);

std::string to_string(LanguageClass c);

/// One line per marked rule with marks inline, e.g. `[en]q -> M -> [ex]q q`.
std::string format_marked_rule(const Grammar& grammar, const MarkedRule& m);
std::string format_cycle(const Grammar& grammar, const RuleCycleWitness& c);
std::string format_id_witness(const Grammar& grammar, const IdWitness& w);

}  // namespace metadag
