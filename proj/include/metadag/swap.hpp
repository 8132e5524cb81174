#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metadag/dag.hpp"
#include "metadag/grammar.hpp"

namespace metadag {

/// No directed path from one edge to the other, in either direction. Throws
/// on unknown ids or e0 == e1.
bool independent(const Dag& g, EdgeId e0, EdgeId e1);

/// Exchanges the targets of two independent edges. Each edge takes the other's
/// slot in its new target's in-sequence; sources, labels and out-sequences are
/// unchanged. Throws if the edges are dependent or the result has a cycle.
Dag do_swap(const Dag& g, EdgeId e0, EdgeId e1);

/// G^0 = g, G^k = (G^(k-1) & g)[e'_(k-1) <-> e_k], where e'_(k-1) is the copy
/// of e' in the previous copy of g and e_k the copy of e in the new one.
Dag pump(const Dag& g, EdgeId e, EdgeId e_prime, std::size_t k);

struct SwapClosureReport {
  std::size_t trials = 0;
  std::size_t defined = 0;    // independent pairs that were swapped and checked
  std::size_t undefined = 0;  // sampled pairs joined by a directed path
  std::vector<std::string> violations;
};

/// Samples same-label edge pairs of a derivation DAG, swaps the independent
/// ones, strips the labels and checks membership in L_&(G) with the oracle.
SwapClosureReport check_swap_closure(const Grammar& grammar, const Dag& derivation, std::size_t trials,
                                     std::uint64_t seed);

}  // namespace metadag
