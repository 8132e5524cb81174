#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace metadag {

using Symbol = std::string;

struct VertexId {
  std::uint32_t value = 0;
  auto operator<=>(const VertexId&) const = default;
};

struct EdgeId {
  std::uint32_t value = 0;
  auto operator<=>(const EdgeId&) const = default;
};

/// Vertex-labeled directed multigraph with ordered in/out edge sequences and
/// optional nonterminal edge labels.
///
/// The container itself does not enforce the DAG invariants; `validate_dag`
/// reports violations. Every `Dag` produced by the library operations is valid.
class Dag {
 public:
  struct Vertex {
    std::string name;
    Symbol label;
    std::vector<EdgeId> in;
    std::vector<EdgeId> out;
    bool operator==(const Vertex&) const = default;
  };

  struct Edge {
    std::string name;
    VertexId src;
    VertexId tar;
    std::optional<Symbol> label;
    bool operator==(const Edge&) const = default;
  };

  /// Adds a vertex. An empty name defaults to `v<id>`.
  VertexId add_vertex(Symbol label, std::string name = {});

  /// Adds an edge and appends it to out(src) and in(tar). An empty name
  /// defaults to `e<id>`.
  EdgeId add_edge(VertexId src, VertexId tar, std::optional<Symbol> label = {},
                  std::string name = {});

  /// Removes a vertex that has no incident edges.
  void remove_vertex(VertexId v);

  void set_in_order(VertexId v, std::vector<EdgeId> order);
  void set_out_order(VertexId v, std::vector<EdgeId> order);
  void set_target(EdgeId e, VertexId tar);
  void set_edge_label(EdgeId e, std::optional<Symbol> label);
  void set_vertex_label(VertexId v, Symbol label);

  bool has_vertex(VertexId v) const { return vertices_.contains(v); }
  bool has_edge(EdgeId e) const { return edges_.contains(e); }
  const Vertex& vertex(VertexId v) const;
  const Edge& edge(EdgeId e) const;

  const std::map<VertexId, Vertex>& vertices() const { return vertices_; }
  const std::map<EdgeId, Edge>& edges() const { return edges_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return vertices_.empty(); }

  std::optional<VertexId> find_vertex(std::string_view name) const;
  std::optional<EdgeId> find_edge(std::string_view name) const;

  /// Copy with ids renumbered densely in the current id order.
  Dag compacted() const;

  /// Structural equality: ids, names, labels and orders. Id counters are ignored.
  bool operator==(const Dag& other) const {
    return vertices_ == other.vertices_ && edges_ == other.edges_;
  }

 private:
  Vertex& mutable_vertex(VertexId v);
  Edge& mutable_edge(EdgeId e);

  std::map<VertexId, Vertex> vertices_;
  std::map<EdgeId, Edge> edges_;
  std::uint32_t next_vertex_ = 0;
  std::uint32_t next_edge_ = 0;
};

// ---------------------------------------------------------------------------
// Validation and structural predicates

/// Lists every invariant violation; empty means valid. When `is_nonterminal`
/// is given, vertices with a nonterminal label must be temporary (one in-edge,
/// no out-edges) as in a prefix DAG.
std::vector<std::string> validate_dag(const Dag& g,
                                      const std::function<bool(const Symbol&)>& is_nonterminal = {});

/// Vertex ids in a topological order (ties broken by id), or nothing if a
/// directed cycle exists.
std::optional<std::vector<VertexId>> topological_order(const Dag& g);

bool is_connected(const Dag& g);

/// Connected components as vertex sets, ordered by smallest member id.
std::vector<std::vector<VertexId>> connected_components(const Dag& g);

/// In- and out-degree at most one everywhere. Throws `Error` on disconnected input.
bool is_string_dag(const Dag& g);

bool is_root(const Dag& g, VertexId v);
bool is_leaf(const Dag& g, VertexId v);

// ---------------------------------------------------------------------------
// Paths

using Endpoint = std::variant<VertexId, EdgeId>;

enum class PathMode { directed, undirected };

struct Path {
  std::vector<EdgeId> edges;
  std::vector<VertexId> vertices;  // v0 .. vn, one more than edges
  bool directed = false;
  bool is_cycle = false;

  std::size_t length() const { return edges.size(); }
  bool operator==(const Path&) const = default;
};

/// Builds a Path from an explicit alternating witness, filling the flags.
/// Returns nothing when consecutive edges do not join the witness vertices.
std::optional<Path> make_path(const Dag& g, std::vector<VertexId> vertices, std::vector<EdgeId> edges);

/// Shortest simple path between `s` and `t`. Endpoints may be edges: an edge
/// endpoint must be the first (resp. last) edge of the path. In directed mode
/// the path runs from `s` to `t`. Throws `Error` on unknown ids.
std::optional<Path> find_path(const Dag& g, Endpoint s, Endpoint t, PathMode mode);

/// Directed reachability, reflexive.
bool reaches(const Dag& g, VertexId from, VertexId to);

struct ChordWitness {
  Path cycle;
  Path chord;
};

/// Some undirected cycle together with a chord path of it, if any exists.
std::optional<ChordWitness> find_cycle_with_chord(const Dag& g);

/// Re-checks the chord path conditions: distinct end vertices shared with the
/// cycle, no other shared vertex, no shared edge.
bool is_chord_of(const Path& cycle, const Path& chord);

// ---------------------------------------------------------------------------
// Constructions

struct UnionMaps {
  std::map<VertexId, VertexId> left_vertices, right_vertices;
  std::map<EdgeId, EdgeId> left_edges, right_edges;
};

/// Disjoint union; ids of both operands are renumbered (left first) and names
/// reset to defaults.
Dag disjoint_union(const Dag& g1, const Dag& g2, UnionMaps* maps = nullptr);

/// Edge orientation reversed; in and out sequences exchanged per vertex.
Dag reverse(const Dag& g);

/// Copy without edge labels.
Dag strip_edge_labels(const Dag& g);

/// Sub-DAG induced by a vertex set (ids and names preserved).
Dag induced_subdag(const Dag& g, const std::vector<VertexId>& vertices);

/// Canonical key: equal iff the graphs are isomorphic respecting vertex
/// labels, edge labels, edge direction and both edge orderings.
std::string canonical_form(const Dag& g);

}  // namespace metadag
