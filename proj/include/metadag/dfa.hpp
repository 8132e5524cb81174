#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metadag/grammar.hpp"
#include "metadag/meta_state.hpp"

namespace metadag {

/// Partial deterministic automaton whose alphabet is a list of grammar rules.
/// States built from meta-states remember their multiset; product and
/// minimized states may not.
class Dfa {
 public:
  struct State {
    std::string name;
    std::optional<MetaState> meta;
    bool operator==(const State&) const = default;
  };

  Dfa() = default;
  explicit Dfa(std::vector<Rule> alphabet);

  const std::vector<Rule>& alphabet() const { return alphabet_; }
  std::optional<std::size_t> symbol_of(const Rule& r) const;

  std::size_t add_state(std::string name, std::optional<MetaState> meta = std::nullopt);
  const std::vector<State>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  std::optional<std::size_t> find_state(std::string_view name) const;

  void set_start(std::size_t s);
  std::size_t start() const;
  void set_accepting(std::size_t s, bool accepting = true);
  bool is_accepting(std::size_t s) const { return accepting_.contains(s); }
  const std::set<std::size_t>& accepting() const { return accepting_; }

  void set_transition(std::size_t from, std::size_t symbol, std::size_t to);
  std::optional<std::size_t> next(std::size_t from, std::size_t symbol) const;
  /// (state, symbol) -> state, ordered by state then symbol.
  const std::map<std::pair<std::size_t, std::size_t>, std::size_t>& transitions() const { return delta_; }

  bool operator==(const Dfa&) const = default;

 private:
  std::vector<Rule> alphabet_;
  std::vector<State> states_;
  std::optional<std::size_t> start_;
  std::set<std::size_t> accepting_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> delta_;
};

/// Automaton over the given meta-states: δ(q, α σ β) = (q - α) + β whenever
/// α ⊑ q and the result is in `q_set`. Start and only accepting state is ∅.
Dfa build_dfa(const Grammar& grammar, const std::set<MetaState>& q_set);

/// Extended transition function on a word of alphabet indices.
bool accepts_rule_word(const Dfa& dfa, const std::vector<std::size_t>& word);

enum class ProductMode { intersect, unite };

/// Pair construction over the same alphabet. Union totalizes both factors
/// with a sink first.
Dfa product(const Dfa& a, const Dfa& b, ProductMode mode);

/// Keeps the start state and every state that is reachable and can reach an
/// accepting state.
Dfa trim(const Dfa& dfa);

/// Moore partition refinement on the totalized automaton, then trimmed.
Dfa minimize(const Dfa& dfa);

/// Terminals are the rule letters, nonterminals every head or tail symbol.
Grammar grammar_of(const Dfa& dfa);

/// Text form: `alphabet:` lines, `state <name> [| flags]` lines with flags
/// from `start accept meta`, `trans <from> | <rule> | <to>` lines.
std::string print_dfa(const Dfa& dfa);
Dfa parse_dfa(std::string_view text);

/// True when the text looks like a DFA file rather than a grammar file.
bool looks_like_dfa(std::string_view text);

}  // namespace metadag
