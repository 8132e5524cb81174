#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metadag/dfa.hpp"
#include "metadag/grammar.hpp"

namespace metadag {

struct ReadOptions {
  /// Match in-edge labels against the head as a multiset instead of a string.
  /// Non-standard; for comparison only.
  bool unordered_heads = false;
};

struct ReadStep {
  VertexId vertex;
  std::size_t rule = 0;     // alphabet index
  std::size_t state = 0;    // automaton state after reading
};

struct ReadResult {
  bool accepted = false;
  std::vector<ReadStep> trace;  // the accepting reading order, empty on reject
};

/// Top-down reading: vertices are read once all their in-edges are labeled,
/// each by an alphabet rule matching the vertex label, the in-edge labels and
/// the out-degree, with the automaton transition defined. Backtracking depth
/// first search, memoized on failure. The empty DAG is rejected. Throws on
/// invalid, disconnected or edge-labeled input and on vertex labels that are
/// not terminals of the alphabet.
ReadResult read_dag(const Dfa& dfa, const Dag& g, const ReadOptions& options = {});

/// `read <v> via <rule> ; meta = <state>` lines followed by `ACCEPT` or `REJECT`.
std::string format_trace(const Dfa& dfa, const Dag& g, const ReadResult& result);

/// Membership with every intermediate meta-state restricted to `q_set`.
bool member_fd(const Grammar& grammar, const std::set<MetaState>& q_set, const Dag& g,
               const ReadOptions& options = {});

enum class OracleMode { connected, components };

constexpr std::size_t kOracleVertexCap = 64;

/// Exhaustive derivation search for exactly g. In components mode every
/// connected component must be in L(G). The empty DAG is not a member.
bool member_oracle(const Grammar& grammar, const Dag& g, OracleMode mode = OracleMode::connected,
                   std::size_t vertex_cap = kOracleVertexCap);

/// A derivation of a connected member, replay-checked against g, or nothing.
std::optional<Derivation> oracle_derivation(const Grammar& grammar, const Dag& g);

}  // namespace metadag
