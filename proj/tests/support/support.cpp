#include "support.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

#include "metadag/dag_io.hpp"
#include "metadag/swap.hpp"

namespace support {

std::string corpus_path(const std::string& relative) { return std::string(METADAG_CORPUS_DIR) + "/" + relative; }

Grammar corpus_grammar(const std::string& name) {
  return parse_grammar(read_text_file(corpus_path("grammars/" + name + ".grammar")));
}

Dag corpus_dag(const std::string& name) { return parse_dag(read_text_file(corpus_path("dags/" + name + ".dag"))); }

std::set<MetaState> corpus_qset(const std::string& name) {
  return parse_qset(read_text_file(corpus_path("qsets/" + name + ".qset")));
}

namespace {

std::size_t slot(const std::vector<EdgeId>& seq, EdgeId e) {
  return static_cast<std::size_t>(std::find(seq.begin(), seq.end(), e) - seq.begin());
}

std::vector<VertexId> vertex_list(const Dag& g) {
  std::vector<VertexId> out;
  for (const auto& [id, v] : g.vertices()) out.push_back(id);
  return out;
}

}  // namespace

bool isomorphic_brute_force(const Dag& a, const Dag& b) {
  if (a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count()) return false;
  auto va = vertex_list(a), vb = vertex_list(b);
  std::map<VertexId, VertexId> f;
  std::set<VertexId> used;

  // out(v)[i] must land on the image of its target, in the same in-slot
  auto consistent = [&](VertexId v, VertexId w) {
    const auto& x = a.vertex(v);
    const auto& y = b.vertex(w);
    for (std::size_t i = 0; i < x.out.size(); ++i) {
      const auto& ea = a.edge(x.out[i]);
      const auto& eb = b.edge(y.out[i]);
      if (ea.label != eb.label) return false;
      if (slot(a.vertex(ea.tar).in, x.out[i]) != slot(b.vertex(eb.tar).in, y.out[i])) return false;
      auto it = f.find(ea.tar);
      if (it != f.end() && it->second != eb.tar) return false;
    }
    for (std::size_t i = 0; i < x.in.size(); ++i) {
      const auto& ea = a.edge(x.in[i]);
      const auto& eb = b.edge(y.in[i]);
      auto it = f.find(ea.src);
      if (it != f.end() && it->second != eb.src) return false;
    }
    return true;
  };

  std::function<bool(std::size_t)> extend = [&](std::size_t i) {
    if (i == va.size()) return true;
    const auto& x = a.vertex(va[i]);
    for (VertexId w : vb) {
      if (used.contains(w)) continue;
      const auto& y = b.vertex(w);
      if (x.label != y.label || x.in.size() != y.in.size() || x.out.size() != y.out.size()) continue;
      f[va[i]] = w;
      used.insert(w);
      if (consistent(va[i], w) && extend(i + 1)) return true;
      f.erase(va[i]);
      used.erase(w);
    }
    return false;
  };
  return extend(0);
}

Dag permuted_copy(const Dag& g, std::mt19937_64& rng) {
  auto vs = vertex_list(g);
  std::shuffle(vs.begin(), vs.end(), rng);
  std::vector<EdgeId> es;
  for (const auto& [id, e] : g.edges()) es.push_back(id);
  std::shuffle(es.begin(), es.end(), rng);

  Dag out;
  std::map<VertexId, VertexId> vmap;
  std::map<EdgeId, EdgeId> emap;
  for (VertexId v : vs) vmap[v] = out.add_vertex(g.vertex(v).label, g.vertex(v).name);
  for (EdgeId e : es) {
    const auto& ed = g.edge(e);
    emap[e] = out.add_edge(vmap[ed.src], vmap[ed.tar], ed.label, ed.name);
  }
  for (const auto& [id, v] : g.vertices()) {
    std::vector<EdgeId> in, outs;
    for (EdgeId e : v.in) in.push_back(emap[e]);
    for (EdgeId e : v.out) outs.push_back(emap[e]);
    out.set_in_order(vmap[id], in);
    out.set_out_order(vmap[id], outs);
  }
  return out;
}

Dag random_dag(std::mt19937_64& rng, std::size_t n, const std::vector<Symbol>& labels, std::size_t max_edges,
               const std::vector<Symbol>& edge_labels) {
  Dag g;
  std::vector<VertexId> vs;
  std::uniform_int_distribution<std::size_t> pick_label(0, labels.size() - 1);
  for (std::size_t i = 0; i < n; ++i) vs.push_back(g.add_vertex(labels[pick_label(rng)]));
  std::shuffle(vs.begin(), vs.end(), rng);  // vs is a random topological order
  if (n >= 2) {
    std::uniform_int_distribution<std::size_t> count(0, max_edges);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t m = count(rng);
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t i = pick(rng), j = pick(rng);
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      std::optional<Symbol> label;
      if (!edge_labels.empty()) label = edge_labels[rng() % edge_labels.size()];
      g.add_edge(vs[i], vs[j], label);
    }
  }
  for (VertexId v : vertex_list(g)) {
    auto in = g.vertex(v).in;
    auto out = g.vertex(v).out;
    std::shuffle(in.begin(), in.end(), rng);
    std::shuffle(out.begin(), out.end(), rng);
    g.set_in_order(v, in);
    g.set_out_order(v, out);
  }
  return g;
}

namespace {

bool vertex_consistent(const Grammar& grammar, const Dag::Vertex& v, const std::map<EdgeId, Symbol>& lab) {
  Rule want;
  want.sigma = v.label;
  for (EdgeId e : v.in) want.head.push_back(lab.at(e));
  for (EdgeId e : v.out) want.tail.push_back(lab.at(e));
  return std::find(grammar.rules().begin(), grammar.rules().end(), want) != grammar.rules().end();
}

// Every assignment of nonterminals to edges, filtered by the rule set at each
// vertex. A vertex is checked as soon as its last incident edge gets a label,
// which only prunes dead branches, so the visited set is the same as a full
// enumeration of |N|^|E| labelings.
template <class F>
void for_each_labeling(const Grammar& grammar, const Dag& g, F&& visit) {
  std::vector<EdgeId> es;
  for (const auto& [id, e] : g.edges()) es.push_back(id);
  if (es.size() > 24) throw std::runtime_error("too many edges for labeling brute force");
  std::vector<Symbol> ns(grammar.nonterminals().begin(), grammar.nonterminals().end());
  std::map<EdgeId, std::size_t> position;
  for (std::size_t i = 0; i < es.size(); ++i) position[es[i]] = i;
  // vertices whose last incident edge is es[i]; isolated vertices go first
  std::vector<std::vector<VertexId>> ready(es.size() + 1);
  for (const auto& [id, v] : g.vertices()) {
    std::size_t last = 0;
    for (EdgeId e : v.in) last = std::max(last, position[e] + 1);
    for (EdgeId e : v.out) last = std::max(last, position[e] + 1);
    ready[last].push_back(id);
  }
  std::map<EdgeId, Symbol> lab;
  auto ok = [&](std::size_t level) {
    for (VertexId v : ready[level])
      if (!vertex_consistent(grammar, g.vertex(v), lab)) return false;
    return true;
  };
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == es.size()) {
      visit(std::as_const(lab));
      return;
    }
    for (const Symbol& n : ns) {
      lab[es[i]] = n;
      if (ok(i + 1)) go(i + 1);
    }
    lab.erase(es[i]);
  };
  if (ok(0)) go(0);
}

}  // namespace

std::size_t count_labelings_brute_force(const Grammar& grammar, const Dag& g) {
  std::size_t n = 0;
  for_each_labeling(grammar, g, [&](const std::map<EdgeId, Symbol>&) { ++n; });
  return n;
}

bool member_fd_direct(const Grammar& grammar, const std::set<MetaState>& q_set, const Dag& g) {
  if (g.empty() || !q_set.contains(MetaState{})) return false;
  auto vs = vertex_list(g);
  if (vs.size() > 24) throw std::runtime_error("too many vertices for the ideal search");
  std::map<VertexId, std::size_t> bit;
  for (std::size_t i = 0; i < vs.size(); ++i) bit[vs[i]] = i;
  const std::uint32_t full = (1u << vs.size()) - 1;

  bool found = false;
  for_each_labeling(grammar, g, [&](const std::map<EdgeId, Symbol>& lab) {
    if (found) return;
    auto meta_of = [&](std::uint32_t s) {
      MetaState m;
      for (const auto& [id, e] : g.edges()) {
        if ((s >> bit[e.src] & 1) && !(s >> bit[e.tar] & 1)) m.add(lab.at(id));
      }
      return m;
    };
    std::set<std::uint32_t> seen{0};
    std::deque<std::uint32_t> queue{0};
    while (!queue.empty() && !found) {
      std::uint32_t s = queue.front();
      queue.pop_front();
      if (s == full) {
        found = true;
        break;
      }
      for (std::size_t i = 0; i < vs.size(); ++i) {
        if (s >> i & 1) continue;
        bool ready = true;
        for (EdgeId e : g.vertex(vs[i]).in) ready = ready && (s >> bit[g.edge(e).src] & 1);
        if (!ready) continue;
        std::uint32_t t = s | (1u << i);
        if (seen.contains(t) || !q_set.contains(meta_of(t))) continue;
        seen.insert(t);
        queue.push_back(t);
      }
    }
  });
  return found;
}

std::map<MetaState, std::size_t> prefix_meta_states(const Grammar& grammar, const Dag& g, std::size_t size_cap,
                                                    bool lazy) {
  auto vs = vertex_list(g);
  if (vs.size() > 24) throw std::runtime_error("too many vertices for the ideal search");
  std::map<VertexId, std::size_t> bit;
  for (std::size_t i = 0; i < vs.size(); ++i) bit[vs[i]] = i;
  const std::uint32_t full = (1u << vs.size()) - 1;
  std::map<MetaState, std::size_t> out;

  for_each_labeling(grammar, g, [&](const std::map<EdgeId, Symbol>& lab) {
    auto meta_of = [&](std::uint32_t s) {
      MetaState m;
      for (const auto& [id, e] : g.edges())
        if ((s >> bit[e.src] & 1) && !(s >> bit[e.tar] & 1)) m.add(lab.at(id));
      return m;
    };
    auto root_blocked = [&](const MetaState& m) {
      if (!lazy) return false;
      for (const Rule& r : grammar.rules())
        if (!r.is_root() && mleq(r.head_state(), m)) return true;
      return false;
    };
    // forward search, then keep the prefixes that can still finish
    std::map<std::uint32_t, std::vector<std::uint32_t>> next;
    std::set<std::uint32_t> seen{0};
    std::deque<std::uint32_t> queue{0};
    while (!queue.empty()) {
      std::uint32_t s = queue.front();
      queue.pop_front();
      MetaState here = meta_of(s);
      for (std::size_t i = 0; i < vs.size(); ++i) {
        if (s >> i & 1) continue;
        const auto& v = g.vertex(vs[i]);
        bool ready = true;
        for (EdgeId e : v.in) ready = ready && (s >> bit[g.edge(e).src] & 1);
        if (!ready || (v.in.empty() && root_blocked(here))) continue;
        std::uint32_t t = s | (1u << i);
        if (meta_of(t).size() > size_cap) continue;
        next[s].push_back(t);
        if (seen.insert(t).second) queue.push_back(t);
      }
    }
    std::set<std::uint32_t> good;
    if (seen.contains(full)) good.insert(full);
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& [s, ts] : next)
        for (std::uint32_t t : ts)
          if (good.contains(t) && good.insert(s).second) grew = true;
    }
    for (std::uint32_t s : good) {
      std::size_t depth = static_cast<std::size_t>(__builtin_popcount(s));
      auto [it, fresh] = out.emplace(meta_of(s), depth);
      if (!fresh) it->second = std::min(it->second, depth);
    }
  });
  return out;
}

namespace {

// undirected adjacency: (edge, other endpoint)
std::map<VertexId, std::vector<std::pair<EdgeId, VertexId>>> adjacency(const Dag& g) {
  std::map<VertexId, std::vector<std::pair<EdgeId, VertexId>>> adj;
  for (const auto& [id, v] : g.vertices()) adj[id];
  for (const auto& [id, e] : g.edges()) {
    adj[e.src].push_back({id, e.tar});
    adj[e.tar].push_back({id, e.src});
  }
  return adj;
}

}  // namespace

std::vector<std::set<EdgeId>> all_simple_cycles(const Dag& g) {
  auto adj = adjacency(g);
  std::set<std::set<EdgeId>> found;
  for (const auto& [start, ignored] : adj) {
    std::set<VertexId> on_path{start};
    std::vector<EdgeId> edges;
    std::function<void(VertexId)> dfs = [&](VertexId v) {
      for (auto [e, w] : adj[v]) {
        if (std::find(edges.begin(), edges.end(), e) != edges.end()) continue;
        if (w == start && !edges.empty()) {
          std::set<EdgeId> c(edges.begin(), edges.end());
          c.insert(e);
          found.insert(c);
          continue;
        }
        if (w == start || w < start || on_path.contains(w)) continue;
        on_path.insert(w);
        edges.push_back(e);
        dfs(w);
        edges.pop_back();
        on_path.erase(w);
      }
    };
    dfs(start);
  }
  return {found.begin(), found.end()};
}

bool has_cycle_with_chord_brute_force(const Dag& g) {
  auto adj = adjacency(g);
  for (const auto& cycle : all_simple_cycles(g)) {
    std::set<VertexId> on_cycle;
    for (EdgeId e : cycle) {
      on_cycle.insert(g.edge(e).src);
      on_cycle.insert(g.edge(e).tar);
    }
    for (VertexId a : on_cycle) {
      // any path a .. b off the cycle, b another cycle vertex
      std::set<VertexId> visited{a};
      std::function<bool(VertexId)> dfs = [&](VertexId v) {
        for (auto [e, w] : adj[v]) {
          if (cycle.contains(e)) continue;
          if (on_cycle.contains(w)) {
            if (w != a) return true;
            continue;
          }
          if (visited.contains(w)) continue;
          visited.insert(w);
          if (dfs(w)) return true;
          visited.erase(w);
        }
        return false;
      };
      if (dfs(a)) return true;
    }
  }
  return false;
}

std::optional<std::size_t> shortest_path_length_brute_force(const Dag& g, Endpoint s, Endpoint t, PathMode mode) {
  std::optional<std::size_t> best;
  const bool directed = mode == PathMode::directed;
  auto step_list = [&](VertexId v) {
    std::vector<std::pair<EdgeId, VertexId>> out;
    for (EdgeId e : g.vertex(v).out) out.push_back({e, g.edge(e).tar});
    if (!directed)
      for (EdgeId e : g.vertex(v).in) out.push_back({e, g.edge(e).src});
    return out;
  };
  auto matches_end = [&](VertexId v, const std::vector<EdgeId>& edges) {
    if (edges.empty()) return false;
    if (auto* tv = std::get_if<VertexId>(&t)) return v == *tv;
    return edges.back() == std::get<EdgeId>(t);
  };

  std::vector<VertexId> starts;
  if (auto* sv = std::get_if<VertexId>(&s)) {
    starts.push_back(*sv);
  } else {
    const auto& e = g.edge(std::get<EdgeId>(s));
    starts.push_back(e.src);
    if (!directed) starts.push_back(e.tar);
  }
  for (VertexId start : starts) {
    std::set<VertexId> visited{start};
    std::vector<EdgeId> edges;
    std::function<void(VertexId)> dfs = [&](VertexId v) {
      if (matches_end(v, edges)) best = best ? std::min(*best, edges.size()) : edges.size();
      for (auto [e, w] : step_list(v)) {
        if (visited.contains(w)) continue;
        if (edges.empty() && std::holds_alternative<EdgeId>(s) && e != std::get<EdgeId>(s)) continue;
        visited.insert(w);
        edges.push_back(e);
        dfs(w);
        edges.pop_back();
        visited.erase(w);
      }
    };
    dfs(start);
  }
  return best;
}

std::optional<Dag> random_member(const Grammar& grammar, std::mt19937_64& rng, std::size_t max_vertices) {
  struct Open {
    VertexId src;
    std::size_t slot;
    Symbol label;
  };
  Dag g;
  std::vector<Open> open;
  std::map<VertexId, std::vector<std::pair<std::size_t, EdgeId>>> outs;
  const auto& rules = grammar.rules();
  if (rules.empty()) return std::nullopt;
  for (std::size_t step = 0; step < max_vertices; ++step) {
    if (step > 0 && open.empty()) break;
    // rules that can fire now, each with a random choice of open slots
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> options;
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const Rule& r = rules[i];
      if (r.is_root() && step > 0 && rng() % 3 != 0) continue;  // bias towards extending
      std::vector<std::size_t> pick;
      std::vector<bool> taken(open.size(), false);
      bool ok = true;
      for (const Symbol& s : r.head) {
        std::vector<std::size_t> cand;
        for (std::size_t j = 0; j < open.size(); ++j)
          if (!taken[j] && open[j].label == s) cand.push_back(j);
        if (cand.empty()) {
          ok = false;
          break;
        }
        std::size_t j = cand[rng() % cand.size()];
        taken[j] = true;
        pick.push_back(j);
      }
      if (ok) options.emplace_back(i, pick);
    }
    if (options.empty()) return std::nullopt;
    auto [ri, pick] = options[rng() % options.size()];
    const Rule& r = rules[ri];
    VertexId v = g.add_vertex(r.sigma);
    for (std::size_t j : pick) {
      EdgeId e = g.add_edge(open[j].src, v);
      outs[open[j].src].push_back({open[j].slot, e});
    }
    std::sort(pick.rbegin(), pick.rend());
    for (std::size_t j : pick) open.erase(open.begin() + static_cast<std::ptrdiff_t>(j));
    for (std::size_t k = 0; k < r.tail.size(); ++k) open.push_back({v, k, r.tail[k]});
  }
  if (!open.empty() || g.empty()) return std::nullopt;
  for (auto& [v, slots] : outs) {
    std::sort(slots.begin(), slots.end());
    std::vector<EdgeId> order;
    for (auto& [k, e] : slots) order.push_back(e);
    g.set_out_order(v, order);
  }
  return g;
}

// The bow grammar: R: _ -> p q, O: p -> p q, C: p q -> p, L: p q -> _.
// Every builder declares all p-edges before the q-edges, so each consumer sees
// its in-edges in the order p, q.

Dag bow_pair() { return garland(1); }

Dag garland(std::size_t bows) {
  Dag g;
  std::vector<VertexId> vs{g.add_vertex("R")};
  for (std::size_t i = 1; i < bows; ++i) {
    vs.push_back(g.add_vertex("C"));
    vs.push_back(g.add_vertex("O"));
  }
  vs.push_back(g.add_vertex("L"));
  for (std::size_t i = 0; i + 1 < vs.size(); ++i) g.add_edge(vs[i], vs[i + 1], {}, "p" + std::to_string(i));
  for (std::size_t i = 0; i + 1 < vs.size(); i += 2) g.add_edge(vs[i], vs[i + 1], {}, "q" + std::to_string(i));
  return g;
}

Dag crossed_rainbow(std::size_t bows) {
  Dag g;
  const std::size_t n = bows;
  std::vector<VertexId> vs{g.add_vertex("R")};
  for (std::size_t i = 1; i < n; ++i) vs.push_back(g.add_vertex("O"));
  for (std::size_t i = 1; i < n; ++i) vs.push_back(g.add_vertex("C"));
  vs.push_back(g.add_vertex("L"));
  for (std::size_t i = 0; i + 1 < vs.size(); ++i) g.add_edge(vs[i], vs[i + 1], {}, "p" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i) g.add_edge(vs[i], vs[n + i], {}, "q" + std::to_string(i));
  return g;
}

Dag rainbow(std::size_t bows) {
  Dag g = crossed_rainbow(bows);
  // q_i ends at consumer i; swapping q_i with q_(n-1-i) nests the bows
  for (std::size_t i = 0; i < bows / 2; ++i) {
    EdgeId a = *g.find_edge("q" + std::to_string(i));
    EdgeId b = *g.find_edge("q" + std::to_string(bows - 1 - i));
    g = do_swap(g, a, b);
  }
  return g;
}

Dag one_pointed_star() {
  Dag g;
  VertexId r = g.add_vertex("R"), c = g.add_vertex("C"), c2 = g.add_vertex("C2"), l = g.add_vertex("L");
  g.add_edge(r, c, {}, "r0");
  g.add_edge(r, c, {}, "r1");
  g.add_edge(c, c2, {}, "c");
  g.add_edge(c2, l, {}, "l");
  return g;
}

bool same_rule_words(const Dfa& a, const Dfa& b, std::size_t max_len, std::size_t* visited) {
  if (a.alphabet() != b.alphabet()) throw std::runtime_error("automata over different alphabets");
  std::size_t n = 0;
  auto step = [](const Dfa& d, std::optional<std::size_t> s, std::size_t sym) -> std::optional<std::size_t> {
    return s ? d.next(*s, sym) : std::nullopt;
  };
  std::function<bool(std::optional<std::size_t>, std::optional<std::size_t>, std::size_t)> walk =
      [&](std::optional<std::size_t> x, std::optional<std::size_t> y, std::size_t len) {
        ++n;
        bool ax = x && a.is_accepting(*x), by = y && b.is_accepting(*y);
        if (ax != by) return false;
        if (len == max_len || (!x && !y)) return true;
        for (std::size_t sym = 0; sym < a.alphabet().size(); ++sym)
          if (!walk(step(a, x, sym), step(b, y, sym), len + 1)) return false;
        return true;
      };
  bool ok = walk(a.start(), b.start(), 0);
  if (visited) *visited = n;
  return ok;
}

Dag perturb(const Dag& g, std::mt19937_64& rng, const std::vector<Symbol>& labels) {
  Dag out = g;
  auto vs = vertex_list(g);
  std::vector<EdgeId> es;
  for (const auto& [id, e] : g.edges()) es.push_back(id);
  switch (rng() % (es.empty() ? 1 : 3)) {
    case 0: {
      VertexId v = vs[rng() % vs.size()];
      out.set_vertex_label(v, labels[rng() % labels.size()]);
      break;
    }
    case 1: {
      EdgeId e = es[rng() % es.size()];
      VertexId w = vs[rng() % vs.size()];
      VertexId old = g.edge(e).tar;
      if (w == g.edge(e).src || w == old) break;
      auto old_in = g.vertex(old).in;
      old_in.erase(std::find(old_in.begin(), old_in.end(), e));
      auto new_in = g.vertex(w).in;
      new_in.insert(new_in.begin() + static_cast<std::ptrdiff_t>(rng() % (new_in.size() + 1)), e);
      out.set_target(e, w);
      out.set_in_order(old, old_in);
      out.set_in_order(w, new_in);
      break;
    }
    default: {
      VertexId v = vs[rng() % vs.size()];
      auto in = out.vertex(v).in;
      if (in.size() >= 2) {
        std::swap(in[0], in[1 + rng() % (in.size() - 1)]);
        out.set_in_order(v, in);
      } else {
        out.set_vertex_label(v, labels[rng() % labels.size()]);
      }
    }
  }
  return out;
}

}  // namespace support
