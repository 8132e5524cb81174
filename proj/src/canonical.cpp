#include <algorithm>
#include <deque>
#include <map>
#include <string>
#include <tuple>

#include "metadag/dag.hpp"

// Exact canonical keys for ordered DAGs.
//
// Because every vertex orders its in- and out-edges, fixing one start vertex
// of a connected component determines a unique traversal (out-edges first, in
// their order, then in-edges). The traversal numbers every vertex of the
// component, and the serialization under that numbering is a complete
// description of the component. The key of a component is the minimum over
// all start vertices; the key of a DAG is the sorted list of component keys.

namespace metadag {
namespace {

void put_symbol(std::string& out, const std::string& s) {
  out += std::to_string(s.size());
  out += ':';
  out += s;
}

void put_label(std::string& out, const std::optional<Symbol>& label) {
  if (label) {
    out += '+';
    put_symbol(out, *label);
  } else {
    out += '-';
  }
}

std::size_t position_of(const std::vector<EdgeId>& seq, EdgeId e) {
  return static_cast<std::size_t>(std::find(seq.begin(), seq.end(), e) - seq.begin());
}

std::string encode_from(const Dag& g, VertexId start) {
  std::map<VertexId, std::size_t> index{{start, 0}};
  std::vector<VertexId> order{start};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& v = g.vertex(order[i]);
    for (EdgeId e : v.out) {
      VertexId w = g.edge(e).tar;
      if (index.emplace(w, order.size()).second) order.push_back(w);
    }
    for (EdgeId e : v.in) {
      VertexId w = g.edge(e).src;
      if (index.emplace(w, order.size()).second) order.push_back(w);
    }
  }

  std::string out;
  for (VertexId id : order) {
    const auto& v = g.vertex(id);
    out += '[';
    put_symbol(out, v.label);
    out += 'o';
    out += std::to_string(v.out.size());
    for (EdgeId e : v.out) {
      const auto& ed = g.edge(e);
      out += ',';
      out += std::to_string(index.at(ed.tar));
      out += '.';
      out += std::to_string(position_of(g.vertex(ed.tar).in, e));
      put_label(out, ed.label);
    }
    out += 'i';
    out += std::to_string(v.in.size());
    for (EdgeId e : v.in) {
      const auto& ed = g.edge(e);
      out += ',';
      out += std::to_string(index.at(ed.src));
      out += '.';
      out += std::to_string(position_of(g.vertex(ed.src).out, e));
      put_label(out, ed.label);
    }
    out += ']';
  }
  return out;
}

}  // namespace

std::string canonical_form(const Dag& g) {
  std::vector<std::string> keys;
  for (const auto& component : connected_components(g)) {
    // only vertices with the smallest (label, in-degree, out-degree) can start
    // the minimal encoding, since the first record is the start vertex
    auto signature = [&](VertexId v) {
      const auto& vx = g.vertex(v);
      std::string s;
      put_symbol(s, vx.label);
      return std::make_tuple(s, vx.out.size(), vx.in.size());
    };
    auto best_sig = signature(component.front());
    for (VertexId v : component) best_sig = std::min(best_sig, signature(v));

    std::string best;
    bool first = true;
    for (VertexId v : component) {
      if (signature(v) != best_sig) continue;
      std::string enc = encode_from(g, v);
      if (first || enc < best) {
        best = std::move(enc);
        first = false;
      }
    }
    keys.push_back(std::move(best));
  }
  std::sort(keys.begin(), keys.end());
  std::string out;
  for (const auto& k : keys) {
    out += std::to_string(k.size());
    out += '{';
    out += k;
    out += '}';
  }
  return out;
}

}  // namespace metadag
