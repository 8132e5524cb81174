#include "metadag/dag.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "metadag/error.hpp"

namespace metadag {

// ---------------------------------------------------------------------------
// Dag

VertexId Dag::add_vertex(Symbol label, std::string name) {
  VertexId id{next_vertex_++};
  if (name.empty()) name = "v" + std::to_string(id.value);
  vertices_.emplace(id, Vertex{std::move(name), std::move(label), {}, {}});
  return id;
}

EdgeId Dag::add_edge(VertexId src, VertexId tar, std::optional<Symbol> label, std::string name) {
  if (!has_vertex(src) || !has_vertex(tar)) throw Error("add_edge: unknown endpoint");
  EdgeId id{next_edge_++};
  if (name.empty()) name = "e" + std::to_string(id.value);
  edges_.emplace(id, Edge{std::move(name), src, tar, std::move(label)});
  mutable_vertex(src).out.push_back(id);
  mutable_vertex(tar).in.push_back(id);
  return id;
}

void Dag::remove_vertex(VertexId v) {
  const Vertex& vx = vertex(v);
  for (const auto& [id, e] : edges_) {
    if (e.src == v || e.tar == v) throw Error("remove_vertex: vertex still has incident edges");
  }
  (void)vx;
  vertices_.erase(v);
}

void Dag::set_in_order(VertexId v, std::vector<EdgeId> order) { mutable_vertex(v).in = std::move(order); }

void Dag::set_out_order(VertexId v, std::vector<EdgeId> order) { mutable_vertex(v).out = std::move(order); }

void Dag::set_target(EdgeId e, VertexId tar) {
  if (!has_vertex(tar)) throw Error("set_target: unknown vertex");
  mutable_edge(e).tar = tar;
}

void Dag::set_edge_label(EdgeId e, std::optional<Symbol> label) { mutable_edge(e).label = std::move(label); }

void Dag::set_vertex_label(VertexId v, Symbol label) { mutable_vertex(v).label = std::move(label); }

const Dag::Vertex& Dag::vertex(VertexId v) const {
  auto it = vertices_.find(v);
  if (it == vertices_.end()) throw Error("unknown vertex id " + std::to_string(v.value));
  return it->second;
}

const Dag::Edge& Dag::edge(EdgeId e) const {
  auto it = edges_.find(e);
  if (it == edges_.end()) throw Error("unknown edge id " + std::to_string(e.value));
  return it->second;
}

Dag::Vertex& Dag::mutable_vertex(VertexId v) {
  auto it = vertices_.find(v);
  if (it == vertices_.end()) throw Error("unknown vertex id " + std::to_string(v.value));
  return it->second;
}

Dag::Edge& Dag::mutable_edge(EdgeId e) {
  auto it = edges_.find(e);
  if (it == edges_.end()) throw Error("unknown edge id " + std::to_string(e.value));
  return it->second;
}

std::optional<VertexId> Dag::find_vertex(std::string_view name) const {
  for (const auto& [id, v] : vertices_)
    if (v.name == name) return id;
  return std::nullopt;
}

std::optional<EdgeId> Dag::find_edge(std::string_view name) const {
  for (const auto& [id, e] : edges_)
    if (e.name == name) return id;
  return std::nullopt;
}

Dag Dag::compacted() const {
  std::map<VertexId, VertexId> vmap;
  std::map<EdgeId, EdgeId> emap;
  std::uint32_t next = 0;
  for (const auto& [id, v] : vertices_) vmap[id] = VertexId{next++};
  next = 0;
  for (const auto& [id, e] : edges_) emap[id] = EdgeId{next++};

  Dag out;
  for (const auto& [id, v] : vertices_) {
    Vertex nv{v.name, v.label, {}, {}};
    for (EdgeId e : v.in) nv.in.push_back(emap.at(e));
    for (EdgeId e : v.out) nv.out.push_back(emap.at(e));
    out.vertices_.emplace(vmap.at(id), std::move(nv));
  }
  for (const auto& [id, e] : edges_) {
    out.edges_.emplace(emap.at(id), Edge{e.name, vmap.at(e.src), vmap.at(e.tar), e.label});
  }
  out.next_vertex_ = static_cast<std::uint32_t>(vertices_.size());
  out.next_edge_ = static_cast<std::uint32_t>(edges_.size());
  return out;
}

// ---------------------------------------------------------------------------
// Validation

std::optional<std::vector<VertexId>> topological_order(const Dag& g) {
  std::map<VertexId, std::size_t> indegree;
  for (const auto& [id, v] : g.vertices()) indegree[id] = 0;
  for (const auto& [id, e] : g.edges()) {
    if (indegree.contains(e.tar)) ++indegree[e.tar];
  }
  std::set<VertexId> ready;
  for (const auto& [id, d] : indegree)
    if (d == 0) ready.insert(id);

  std::vector<VertexId> order;
  // out-edges per vertex from the edge map, so broken out_order lists do not matter here
  std::map<VertexId, std::vector<VertexId>> successors;
  for (const auto& [id, e] : g.edges()) successors[e.src].push_back(e.tar);
  while (!ready.empty()) {
    VertexId v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (VertexId w : successors[v]) {
      if (--indegree[w] == 0) ready.insert(w);
    }
  }
  if (order.size() != g.vertex_count()) return std::nullopt;
  return order;
}

std::vector<std::string> validate_dag(const Dag& g, const std::function<bool(const Symbol&)>& is_nonterminal) {
  std::vector<std::string> problems;
  std::map<EdgeId, int> out_seen, in_seen;

  for (const auto& [id, v] : g.vertices()) {
    for (EdgeId e : v.out) {
      if (!g.has_edge(e)) {
        problems.push_back("vertex " + v.name + " lists unknown out-edge " + std::to_string(e.value));
      } else if (g.edge(e).src != id) {
        problems.push_back("vertex " + v.name + " lists out-edge " + g.edge(e).name + " it is not the source of");
      } else {
        ++out_seen[e];
      }
    }
    for (EdgeId e : v.in) {
      if (!g.has_edge(e)) {
        problems.push_back("vertex " + v.name + " lists unknown in-edge " + std::to_string(e.value));
      } else if (g.edge(e).tar != id) {
        problems.push_back("vertex " + v.name + " lists in-edge " + g.edge(e).name + " it is not the target of");
      } else {
        ++in_seen[e];
      }
    }
  }

  bool endpoints_ok = true;
  for (const auto& [id, e] : g.edges()) {
    if (!g.has_vertex(e.src) || !g.has_vertex(e.tar)) {
      problems.push_back("edge " + e.name + " has an unknown endpoint");
      endpoints_ok = false;
      continue;
    }
    if (e.src == e.tar) problems.push_back("loop at edge " + e.name);
    if (out_seen[id] != 1) problems.push_back("edge " + e.name + " must appear exactly once in out(src)");
    if (in_seen[id] != 1) problems.push_back("edge " + e.name + " must appear exactly once in in(tar)");
  }

  if (endpoints_ok && !topological_order(g)) problems.push_back("directed cycle");

  if (is_nonterminal) {
    for (const auto& [id, v] : g.vertices()) {
      if (is_nonterminal(v.label) && (v.in.size() != 1 || !v.out.empty())) {
        problems.push_back("temporary vertex " + v.name + " must have one in-edge and no out-edges");
      }
    }
  }
  return problems;
}

namespace {

// Undirected neighbourhood: (edge, other end) pairs in out-then-in order.
std::vector<std::pair<EdgeId, VertexId>> incident(const Dag& g, VertexId v, PathMode mode) {
  std::vector<std::pair<EdgeId, VertexId>> result;
  const auto& vx = g.vertex(v);
  for (EdgeId e : vx.out) result.emplace_back(e, g.edge(e).tar);
  if (mode == PathMode::undirected) {
    for (EdgeId e : vx.in) result.emplace_back(e, g.edge(e).src);
  }
  return result;
}

}  // namespace

std::vector<std::vector<VertexId>> connected_components(const Dag& g) {
  std::vector<std::vector<VertexId>> components;
  std::set<VertexId> seen;
  for (const auto& [start, v] : g.vertices()) {
    if (seen.contains(start)) continue;
    std::vector<VertexId> component;
    std::deque<VertexId> queue{start};
    seen.insert(start);
    while (!queue.empty()) {
      VertexId u = queue.front();
      queue.pop_front();
      component.push_back(u);
      for (const auto& [e, w] : incident(g, u, PathMode::undirected)) {
        if (seen.insert(w).second) queue.push_back(w);
      }
    }
    std::sort(component.begin(), component.end());
    components.push_back(std::move(component));
  }
  return components;
}

bool is_connected(const Dag& g) { return connected_components(g).size() <= 1; }

bool is_string_dag(const Dag& g) {
  if (!is_connected(g)) throw Error("is_string_dag: input is not connected");
  return std::all_of(g.vertices().begin(), g.vertices().end(),
                     [](const auto& kv) { return kv.second.in.size() <= 1 && kv.second.out.size() <= 1; });
}

bool is_root(const Dag& g, VertexId v) { return g.vertex(v).in.empty(); }
bool is_leaf(const Dag& g, VertexId v) { return g.vertex(v).out.empty(); }

// ---------------------------------------------------------------------------
// Paths

std::optional<Path> make_path(const Dag& g, std::vector<VertexId> vertices, std::vector<EdgeId> edges) {
  if (edges.empty() || vertices.size() != edges.size() + 1) return std::nullopt;
  bool forward = true, backward = true;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!g.has_edge(edges[i])) return std::nullopt;
    const auto& e = g.edge(edges[i]);
    VertexId a = vertices[i], b = vertices[i + 1];
    bool fits = (e.src == a && e.tar == b) || (e.src == b && e.tar == a);
    if (!fits) return std::nullopt;
    forward = forward && e.tar == b;
    backward = backward && e.tar == a;
  }
  Path p;
  p.is_cycle = vertices.front() == vertices.back();
  p.directed = forward || backward;
  p.vertices = std::move(vertices);
  p.edges = std::move(edges);
  return p;
}

namespace {

struct Trail {
  std::vector<VertexId> vertices;
  std::vector<EdgeId> edges;
};

// Shortest path from `from` to `to` that never visits a vertex of `avoid` and
// never uses `forbidden_edge`. BFS, so the result is simple.
std::optional<Trail> shortest_trail(const Dag& g, VertexId from, VertexId to, PathMode mode,
                                    const std::set<VertexId>& avoid,
                                    std::optional<EdgeId> forbidden_edge = std::nullopt) {
  if (avoid.contains(from) || avoid.contains(to)) return std::nullopt;
  std::map<VertexId, std::pair<VertexId, EdgeId>> parent;
  std::set<VertexId> visited{from};
  std::deque<VertexId> queue{from};
  while (!queue.empty() && !visited.contains(to)) {
    VertexId u = queue.front();
    queue.pop_front();
    for (const auto& [e, w] : incident(g, u, mode)) {
      if (e == forbidden_edge || avoid.contains(w) || !visited.insert(w).second) continue;
      parent[w] = {u, e};
      queue.push_back(w);
    }
  }
  if (!visited.contains(to)) return std::nullopt;
  Trail t{{to}, {}};
  for (VertexId v = to; v != from;) {
    auto [p, e] = parent.at(v);
    t.edges.push_back(e);
    t.vertices.push_back(p);
    v = p;
  }
  std::reverse(t.vertices.begin(), t.vertices.end());
  std::reverse(t.edges.begin(), t.edges.end());
  return t;
}

// Shortest closed path that starts with edge e leaving `from`.
std::optional<Trail> cycle_through(const Dag& g, EdgeId e, VertexId from, PathMode mode) {
  const auto& ed = g.edge(e);
  VertexId other = ed.src == from ? ed.tar : ed.src;
  auto back = shortest_trail(g, other, from, mode, {}, e);
  if (!back) return std::nullopt;
  Trail t{{from}, {e}};
  t.vertices.insert(t.vertices.end(), back->vertices.begin(), back->vertices.end());
  t.edges.insert(t.edges.end(), back->edges.begin(), back->edges.end());
  return t;
}

// One way to attach an edge endpoint: `outer` is the end vertex of the whole
// path, `inner` the vertex shared with the rest of the path.
struct Attachment {
  VertexId outer;
  std::optional<EdgeId> edge;
  VertexId inner;
};

std::vector<Attachment> attachments(const Dag& g, const Endpoint& x, PathMode mode, bool at_start) {
  if (auto v = std::get_if<VertexId>(&x)) return {{*v, std::nullopt, *v}};
  EdgeId e = std::get<EdgeId>(x);
  const auto& ed = g.edge(e);
  // directed paths leave the start edge at its target and enter the end edge at its source
  std::vector<Attachment> out{at_start ? Attachment{ed.src, e, ed.tar} : Attachment{ed.tar, e, ed.src}};
  if (mode == PathMode::undirected) out.push_back(at_start ? Attachment{ed.tar, e, ed.src} : Attachment{ed.src, e, ed.tar});
  return out;
}

}  // namespace

std::optional<Path> find_path(const Dag& g, Endpoint s, Endpoint t, PathMode mode) {
  auto check = [&](const Endpoint& x) {
    if (auto v = std::get_if<VertexId>(&x); v && !g.has_vertex(*v)) throw Error("find_path: unknown vertex");
    if (auto e = std::get_if<EdgeId>(&x); e && !g.has_edge(*e)) throw Error("find_path: unknown edge");
  };
  check(s);
  check(t);

  std::optional<Trail> best;
  auto offer = [&](std::optional<Trail> found) {
    if (found && (!best || found->edges.size() < best->edges.size())) best = std::move(found);
  };

  if (auto v = std::get_if<VertexId>(&s); v && s == t) {
    // closed path through the vertex
    for (const auto& [e, w] : incident(g, *v, mode)) offer(cycle_through(g, e, *v, mode));
  } else if (s == t) {
    EdgeId e = std::get<EdgeId>(s);
    offer(Trail{{g.edge(e).src, g.edge(e).tar}, {e}});
  } else {
    for (const Attachment& a : attachments(g, s, mode, true)) {
      for (const Attachment& b : attachments(g, t, mode, false)) {
        if (a.outer == b.outer) continue;
        if (a.edge && b.edge && a.inner == b.outer && b.inner == a.outer) continue;
        std::set<VertexId> avoid;
        if (a.edge) avoid.insert(a.outer);
        if (b.edge) avoid.insert(b.outer);
        auto middle = shortest_trail(g, a.inner, b.inner, mode, avoid);
        if (!middle) continue;
        Trail full;
        if (a.edge) {
          full.vertices.push_back(a.outer);
          full.edges.push_back(*a.edge);
        }
        full.vertices.insert(full.vertices.end(), middle->vertices.begin(), middle->vertices.end());
        full.edges.insert(full.edges.end(), middle->edges.begin(), middle->edges.end());
        if (b.edge) {
          full.vertices.push_back(b.outer);
          full.edges.push_back(*b.edge);
        }
        if (full.edges.empty()) continue;
        offer(std::move(full));
      }
    }
  }
  if (!best) return std::nullopt;
  return make_path(g, std::move(best->vertices), std::move(best->edges));
}

bool reaches(const Dag& g, VertexId from, VertexId to) {
  if (from == to) return true;
  std::set<VertexId> seen{from};
  std::deque<VertexId> queue{from};
  while (!queue.empty()) {
    VertexId u = queue.front();
    queue.pop_front();
    for (EdgeId e : g.vertex(u).out) {
      VertexId w = g.edge(e).tar;
      if (w == to) return true;
      if (seen.insert(w).second) queue.push_back(w);
    }
  }
  return false;
}

bool is_chord_of(const Path& cycle, const Path& chord) {
  if (!cycle.is_cycle || chord.edges.empty()) return false;
  VertexId a = chord.vertices.front(), b = chord.vertices.back();
  if (a == b) return false;
  std::set<VertexId> on_cycle(cycle.vertices.begin(), cycle.vertices.end());
  std::set<VertexId> shared;
  for (VertexId v : chord.vertices)
    if (on_cycle.contains(v)) shared.insert(v);
  if (shared != std::set<VertexId>{a, b}) return false;
  std::set<EdgeId> cycle_edges(cycle.edges.begin(), cycle.edges.end());
  return std::none_of(chord.edges.begin(), chord.edges.end(), [&](EdgeId e) { return cycle_edges.contains(e); });
}

std::optional<ChordWitness> find_cycle_with_chord(const Dag& g) {
  for (const auto& [e, edge] : g.edges()) {
    // a cycle through e: e followed by a path back that avoids e
    auto trail = cycle_through(g, e, edge.src, PathMode::undirected);
    if (!trail) continue;
    auto cycle = make_path(g, trail->vertices, trail->edges);

    std::set<VertexId> on_cycle(cycle->vertices.begin(), cycle->vertices.end());
    std::set<EdgeId> cycle_edges(cycle->edges.begin(), cycle->edges.end());
    for (VertexId x : on_cycle) {
      for (const auto& [f, y] : incident(g, x, PathMode::undirected)) {
        if (cycle_edges.contains(f)) continue;
        if (on_cycle.contains(y)) {
          auto chord = make_path(g, {x, y}, {f});
          return ChordWitness{*cycle, *chord};
        }
        // leave the cycle through f and come back at another cycle vertex
        std::map<VertexId, std::pair<VertexId, EdgeId>> parent;
        std::set<VertexId> visited{x, y};
        std::deque<VertexId> queue{y};
        while (!queue.empty()) {
          VertexId u = queue.front();
          queue.pop_front();
          for (const auto& [h, w] : incident(g, u, PathMode::undirected)) {
            if (h == f || visited.contains(w)) continue;
            visited.insert(w);
            parent[w] = {u, h};
            if (on_cycle.contains(w)) {
              std::vector<VertexId> vs{w};
              std::vector<EdgeId> es;
              VertexId cur = w;
              while (cur != y) {
                auto [p, pe] = parent.at(cur);
                es.push_back(pe);
                vs.push_back(p);
                cur = p;
              }
              es.push_back(f);
              vs.push_back(x);
              std::reverse(vs.begin(), vs.end());
              std::reverse(es.begin(), es.end());
              auto chord = make_path(g, vs, es);
              return ChordWitness{*cycle, *chord};
            }
            queue.push_back(w);
          }
        }
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Constructions

Dag disjoint_union(const Dag& g1, const Dag& g2, UnionMaps* maps) {
  Dag out;
  UnionMaps local;
  UnionMaps& m = maps ? *maps : local;
  for (const auto& [id, v] : g1.vertices()) m.left_vertices[id] = out.add_vertex(v.label);
  for (const auto& [id, v] : g2.vertices()) m.right_vertices[id] = out.add_vertex(v.label);
  for (const auto& [id, e] : g1.edges())
    m.left_edges[id] = out.add_edge(m.left_vertices.at(e.src), m.left_vertices.at(e.tar), e.label);
  for (const auto& [id, e] : g2.edges())
    m.right_edges[id] = out.add_edge(m.right_vertices.at(e.src), m.right_vertices.at(e.tar), e.label);

  auto copy_orders = [&out](const Dag& g, const std::map<VertexId, VertexId>& vm, const std::map<EdgeId, EdgeId>& em) {
    for (const auto& [id, v] : g.vertices()) {
      std::vector<EdgeId> in, outs;
      for (EdgeId e : v.in) in.push_back(em.at(e));
      for (EdgeId e : v.out) outs.push_back(em.at(e));
      out.set_in_order(vm.at(id), std::move(in));
      out.set_out_order(vm.at(id), std::move(outs));
    }
  };
  copy_orders(g1, m.left_vertices, m.left_edges);
  copy_orders(g2, m.right_vertices, m.right_edges);
  return out;
}

Dag reverse(const Dag& g) {
  Dag out;
  std::map<VertexId, VertexId> vm;
  std::map<EdgeId, EdgeId> em;
  for (const auto& [id, v] : g.vertices()) vm[id] = out.add_vertex(v.label, v.name);
  for (const auto& [id, e] : g.edges()) em[id] = out.add_edge(vm.at(e.tar), vm.at(e.src), e.label, e.name);
  for (const auto& [id, v] : g.vertices()) {
    std::vector<EdgeId> in, outs;
    for (EdgeId e : v.out) in.push_back(em.at(e));
    for (EdgeId e : v.in) outs.push_back(em.at(e));
    out.set_in_order(vm.at(id), std::move(in));
    out.set_out_order(vm.at(id), std::move(outs));
  }
  return out;
}

Dag strip_edge_labels(const Dag& g) {
  Dag out = g;
  for (const auto& [id, e] : g.edges()) out.set_edge_label(id, std::nullopt);
  return out;
}

Dag induced_subdag(const Dag& g, const std::vector<VertexId>& vertices) {
  std::set<VertexId> keep(vertices.begin(), vertices.end());
  Dag out = g;
  std::vector<EdgeId> drop;
  for (const auto& [id, e] : g.edges())
    if (!keep.contains(e.src) || !keep.contains(e.tar)) drop.push_back(id);
  std::set<EdgeId> dropped(drop.begin(), drop.end());
  // rebuild without the dropped edges and vertices
  Dag result;
  std::map<VertexId, VertexId> vm;
  std::map<EdgeId, EdgeId> em;
  for (const auto& [id, v] : g.vertices())
    if (keep.contains(id)) vm[id] = result.add_vertex(v.label, v.name);
  for (const auto& [id, e] : g.edges())
    if (!dropped.contains(id)) em[id] = result.add_edge(vm.at(e.src), vm.at(e.tar), e.label, e.name);
  for (const auto& [id, v] : g.vertices()) {
    if (!keep.contains(id)) continue;
    std::vector<EdgeId> in, outs;
    for (EdgeId e : v.in)
      if (!dropped.contains(e)) in.push_back(em.at(e));
    for (EdgeId e : v.out)
      if (!dropped.contains(e)) outs.push_back(em.at(e));
    result.set_in_order(vm.at(id), std::move(in));
    result.set_out_order(vm.at(id), std::move(outs));
  }
  (void)out;
  return result;
}

}  // namespace metadag
