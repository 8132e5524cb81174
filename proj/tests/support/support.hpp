#pragma once

// Test-only oracles and builders. Nothing here calls the library routine it
// is used to check.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "metadag/dag.hpp"
#include "metadag/dfa.hpp"
#include "metadag/grammar.hpp"
#include "metadag/meta_state.hpp"

namespace support {

using namespace metadag;

std::string corpus_path(const std::string& relative);
Grammar corpus_grammar(const std::string& name);
Dag corpus_dag(const std::string& name);
std::set<MetaState> corpus_qset(const std::string& name);

// Explicit isomorphism search over vertex bijections, respecting labels,
// edge labels, direction and both edge orderings.
bool isomorphic_brute_force(const Dag& a, const Dag& b);

// Copy of g with vertex and edge ids permuted at random; names kept.
Dag permuted_copy(const Dag& g, std::mt19937_64& rng);

// Random valid DAG: n vertices labeled from `labels`, up to `max_edges`
// forward edges in random order, optionally random edge labels.
Dag random_dag(std::mt19937_64& rng, std::size_t n, const std::vector<Symbol>& labels, std::size_t max_edges,
               const std::vector<Symbol>& edge_labels = {});

// All locally consistent labelings by trying every assignment of
// nonterminals to edges.
std::size_t count_labelings_brute_force(const Grammar& grammar, const Dag& g);

// Membership with meta-states restricted to `q_set`, by search over the
// downward-closed vertex sets of every consistent labeling.
bool member_fd_direct(const Grammar& grammar, const std::set<MetaState>& q_set, const Dag& g);

// Meta-states of the prefixes (downward-closed vertex sets) of g that lie on
// some reading of the whole of g with every meta-state of size at most
// `size_cap`, mapped to the smallest prefix size at which they occur. With
// `lazy`, a root may only be read when no non-root rule head fits inside the
// current meta-state.
std::map<MetaState, std::size_t> prefix_meta_states(const Grammar& grammar, const Dag& g, std::size_t size_cap,
                                                    bool lazy);

// Every simple undirected cycle, as a set of edge ids.
std::vector<std::set<EdgeId>> all_simple_cycles(const Dag& g);

// Whether some simple undirected cycle has a chord path, by enumerating cycles
// and paths between their vertices.
bool has_cycle_with_chord_brute_force(const Dag& g);

// Smallest number of edges on a path as described by find_path, brute force.
std::optional<std::size_t> shortest_path_length_brute_force(const Dag& g, Endpoint s, Endpoint t, PathMode mode);

// A random complete DAG of L_&(G) with at most `max_vertices` vertices, grown
// by attaching rule instances to open edge slots. Nothing if the attempt got
// stuck or grew too large.
std::optional<Dag> random_member(const Grammar& grammar, std::mt19937_64& rng, std::size_t max_vertices);

// Builders for the bow grammar (rules: R, O, C, L) and the star grammar.
Dag bow_pair();
Dag garland(std::size_t bows);
// Bows crossed first-in-first-out: the q-edge of the i-th producer ends at the
// i-th consumer. Built vertex by vertex.
Dag crossed_rainbow(std::size_t bows);
// Nested bows, obtained from crossed_rainbow by swapping q-edges pairwise.
Dag rainbow(std::size_t bows);
Dag one_pointed_star();

// Same acceptance on every rule word up to `max_len`. A prefix undefined in
// both automata cannot be extended to an accepted word, so the search stops
// there; otherwise it is exhaustive. `visited` receives the number of prefixes.
bool same_rule_words(const Dfa& a, const Dfa& b, std::size_t max_len, std::size_t* visited = nullptr);

// Random single-edge retarget or relabel; may produce an invalid DAG, in
// which case the caller should skip it.
Dag perturb(const Dag& g, std::mt19937_64& rng, const std::vector<Symbol>& labels);

}  // namespace support
