#include "metadag/dag_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "metadag/error.hpp"

namespace metadag {

std::vector<std::string> split_tokens(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string> tokens;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

Dag parse_dag(std::string_view text) {
  Dag g;
  std::map<std::string, VertexId> vertices;
  std::map<std::string, EdgeId> edges;
  struct OrderLine {
    std::size_t line;
    bool in;
    std::string vertex;
    std::vector<std::string> edges;
  };
  std::vector<OrderLine> orders;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tok = split_tokens(line);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    if (kw == "vertex") {
      if (tok.size() != 3) throw ParseError(lineno, "expected `vertex <id> <label>`");
      if (vertices.contains(tok[1])) throw ParseError(lineno, "duplicate vertex id " + tok[1]);
      vertices[tok[1]] = g.add_vertex(tok[2], tok[1]);
    } else if (kw == "edge") {
      if (tok.size() != 4 && tok.size() != 5) throw ParseError(lineno, "expected `edge <id> <src> <tar> [<label>]`");
      if (edges.contains(tok[1])) throw ParseError(lineno, "duplicate edge id " + tok[1]);
      auto s = vertices.find(tok[2]);
      auto t = vertices.find(tok[3]);
      if (s == vertices.end()) throw ParseError(lineno, "unknown vertex " + tok[2]);
      if (t == vertices.end()) throw ParseError(lineno, "unknown vertex " + tok[3]);
      std::optional<Symbol> label;
      if (tok.size() == 5) label = tok[4];
      edges[tok[1]] = g.add_edge(s->second, t->second, label, tok[1]);
    } else if (kw == "inorder" || kw == "outorder") {
      if (tok.size() < 2) throw ParseError(lineno, "expected `" + kw + " <vertex> <edge>...`");
      orders.push_back({lineno, kw == "inorder", tok[1], {tok.begin() + 2, tok.end()}});
    } else {
      throw ParseError(lineno, "unknown record `" + kw + "`");
    }
  }

  std::set<std::pair<bool, std::string>> seen;
  for (const auto& o : orders) {
    auto v = vertices.find(o.vertex);
    if (v == vertices.end()) throw ParseError(o.line, "unknown vertex " + o.vertex);
    if (!seen.insert({o.in, o.vertex}).second) throw ParseError(o.line, "duplicate order line for " + o.vertex);
    std::vector<EdgeId> seq;
    for (const auto& name : o.edges) {
      auto e = edges.find(name);
      if (e == edges.end()) throw ParseError(o.line, "unknown edge " + name);
      seq.push_back(e->second);
    }
    const auto& current = o.in ? g.vertex(v->second).in : g.vertex(v->second).out;
    std::multiset<EdgeId> want(current.begin(), current.end()), got(seq.begin(), seq.end());
    if (want != got) {
      throw ParseError(o.line, std::string(o.in ? "inorder" : "outorder") + " for " + o.vertex +
                                   " must list exactly its incident edges");
    }
    if (o.in)
      g.set_in_order(v->second, std::move(seq));
    else
      g.set_out_order(v->second, std::move(seq));
  }
  return g;
}

std::string print_dag(const Dag& g) {
  std::ostringstream out;
  for (const auto& [id, v] : g.vertices()) out << "vertex " << v.name << ' ' << v.label << '\n';
  for (const auto& [id, e] : g.edges()) {
    out << "edge " << e.name << ' ' << g.vertex(e.src).name << ' ' << g.vertex(e.tar).name;
    if (e.label) out << ' ' << *e.label;
    out << '\n';
  }
  // declaration order is edge-id order, which is the order edges are printed in
  for (const auto& [id, v] : g.vertices()) {
    auto sorted_in = v.in, sorted_out = v.out;
    std::sort(sorted_in.begin(), sorted_in.end());
    std::sort(sorted_out.begin(), sorted_out.end());
    if (sorted_in != v.in) {
      out << "inorder " << v.name;
      for (EdgeId e : v.in) out << ' ' << g.edge(e).name;
      out << '\n';
    }
    if (sorted_out != v.out) {
      out << "outorder " << v.name;
      for (EdgeId e : v.out) out << ' ' << g.edge(e).name;
      out << '\n';
    }
  }
  return out.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace metadag
