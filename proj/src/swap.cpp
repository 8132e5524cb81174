#include "metadag/swap.hpp"

#include <algorithm>
#include <random>

#include "metadag/dag_io.hpp"
#include "metadag/error.hpp"
#include "metadag/membership.hpp"

namespace metadag {

bool independent(const Dag& g, EdgeId e0, EdgeId e1) {
  if (!g.has_edge(e0) || !g.has_edge(e1)) throw Error("independent: unknown edge");
  if (e0 == e1) throw Error("independent: the two edges are the same");
  return !find_path(g, e0, e1, PathMode::directed) && !find_path(g, e1, e0, PathMode::directed);
}

Dag do_swap(const Dag& g, EdgeId e0, EdgeId e1) {
  if (!independent(g, e0, e1))
    throw Error("do_swap: edges " + g.edge(e0).name + " and " + g.edge(e1).name + " are joined by a directed path");
  VertexId t0 = g.edge(e0).tar, t1 = g.edge(e1).tar;
  Dag out = g;
  out.set_target(e0, t1);
  out.set_target(e1, t0);
  for (VertexId t : {t0, t1}) {
    std::vector<EdgeId> in = g.vertex(t).in;
    for (EdgeId& e : in) {
      if (e == e0)
        e = e1;
      else if (e == e1)
        e = e0;
    }
    out.set_in_order(t, std::move(in));
  }
  if (!topological_order(out)) throw Error("internal: swap of independent edges produced a directed cycle");
  return out;
}

Dag pump(const Dag& g, EdgeId e, EdgeId e_prime, std::size_t k) {
  if (!g.has_edge(e) || !g.has_edge(e_prime)) throw Error("pump: unknown edge");
  Dag current = g;
  EdgeId previous = e_prime;  // copy of e' in the newest copy of g
  for (std::size_t i = 1; i <= k; ++i) {
    UnionMaps maps;
    Dag joined = disjoint_union(current, g, &maps);
    EdgeId left = maps.left_edges.at(previous);
    EdgeId right = maps.right_edges.at(e);
    try {
      current = do_swap(joined, left, right);
    } catch (const Error& err) {
      throw Error("pump: swap " + std::to_string(i) + " is undefined: " + err.what());
    }
    previous = maps.right_edges.at(e_prime);
  }
  return current;
}

SwapClosureReport check_swap_closure(const Grammar& grammar, const Dag& derivation, std::size_t trials,
                                     std::uint64_t seed) {
  SwapClosureReport report;
  std::vector<std::pair<EdgeId, EdgeId>> pairs;
  for (const auto& [a, ea] : derivation.edges()) {
    for (const auto& [b, eb] : derivation.edges()) {
      if (a < b && ea.label && ea.label == eb.label) pairs.emplace_back(a, b);
    }
  }
  if (pairs.empty()) return report;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  for (std::size_t t = 0; t < trials; ++t) {
    auto [a, b] = pairs[pick(rng)];
    ++report.trials;
    if (!independent(derivation, a, b)) {
      ++report.undefined;
      continue;
    }
    ++report.defined;
    Dag swapped = strip_edge_labels(do_swap(derivation, a, b));
    if (!member_oracle(grammar, swapped, OracleMode::components)) {
      report.violations.push_back("swap " + derivation.edge(a).name + " " + derivation.edge(b).name + ":\n" +
                                  print_dag(swapped));
    }
  }
  return report;
}

}  // namespace metadag
