#pragma once

#include <optional>
#include <set>
#include <string>

#include "metadag/grammar.hpp"
#include "metadag/meta_state.hpp"
#include "metadag/rule_analysis.hpp"

namespace metadag {

enum class Policy {
  all_interleavings,
  /// Root rules only when no other rule's head fits the current meta-state.
  lazy_root,
};

/// Meta-states of derivation prefixes with at most `step_cap` steps and every
/// meta-state of size at most `size_cap`, keeping only prefixes that can still
/// be completed to a connected DAG within the size cap. The search tracks the
/// connected components of the prefix DAG. `saturated` reports that one more
/// step adds no meta-state. Throws `Error` when the abstract state space
/// exceeds `state_limit`.
MetaStateSet reachable(const Grammar& grammar, std::size_t size_cap, std::size_t step_cap, Policy policy,
                       std::size_t state_limit = 2'000'000);

struct QminEstimate {
  MetaStateSet states;
  std::size_t k = 0;  // size cap at which every oracle member was read
  std::string report;
};

/// Iterative deepening over K = 1..k_max: build the automaton over all
/// meta-states of size at most K, trim it, and stop once it reads every
/// member of L(G) up to `oracle_vertex_bound` vertices. Refuses ID grammars
/// (the error message carries the witness) and throws when no K suffices.
QminEstimate estimate_qmin(const Grammar& grammar, std::size_t oracle_vertex_bound = 8, std::size_t k_max = 6);

}  // namespace metadag
