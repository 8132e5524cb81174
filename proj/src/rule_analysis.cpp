#include "metadag/rule_analysis.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "metadag/error.hpp"

namespace metadag {

std::string Port::to_string() const {
  return "r" + std::to_string(rule) + "." + (side == Side::head ? "H" : "T") + std::to_string(position) + "(" +
         nonterminal + ")";
}

std::string to_string(LanguageClass c) {
  switch (c) {
    case LanguageClass::finite:
      return "FINITE";
    case LanguageClass::fid:
      return "FID";
    case LanguageClass::id:
      return "ID";
  }
  return "?";
}

PortGraph build_port_graph(const Grammar& grammar) {
  PortGraph pg;
  for (std::size_t i = 0; i < grammar.size(); ++i) {
    const Rule& r = grammar.rule(i);
    for (std::size_t k = 0; k < r.head.size(); ++k) pg.ports.push_back({i, Side::head, k, r.head[k]});
    for (std::size_t k = 0; k < r.tail.size(); ++k) pg.ports.push_back({i, Side::tail, k, r.tail[k]});
  }
  for (std::size_t t = 0; t < pg.ports.size(); ++t) {
    if (pg.ports[t].side != Side::tail) continue;
    for (std::size_t h = 0; h < pg.ports.size(); ++h) {
      if (pg.ports[h].side == Side::head && pg.ports[h].nonterminal == pg.ports[t].nonterminal)
        pg.agreements.emplace_back(t, h);
    }
  }
  return pg;
}

namespace {

// Adjacency helpers over a port graph.
struct PortIndex {
  const PortGraph& pg;
  std::vector<std::vector<std::size_t>> by_rule;
  std::vector<std::vector<std::size_t>> partners;  // opposite side, same nonterminal
  std::map<Port, std::size_t> index;

  PortIndex(const PortGraph& g, std::size_t rules) : pg(g), by_rule(rules), partners(g.ports.size()) {
    for (std::size_t i = 0; i < g.ports.size(); ++i) {
      by_rule[g.ports[i].rule].push_back(i);
      index[g.ports[i]] = i;
    }
    for (auto [t, h] : g.agreements) {
      partners[t].push_back(h);
      partners[h].push_back(t);
    }
    for (auto& p : partners) std::sort(p.begin(), p.end());
  }
};

bool agree(const Port& exit, const Port& entry) {
  return exit.nonterminal == entry.nonterminal && exit.side != entry.side;
}

bool port_matches(const Grammar& grammar, const Port& p) {
  if (p.rule >= grammar.size()) return false;
  const Rule& r = grammar.rule(p.rule);
  const auto& side = p.side == Side::head ? r.head : r.tail;
  return p.position < side.size() && side[p.position] == p.nonterminal;
}

bool fail(std::string* why, const std::string& msg) {
  if (why) *why = msg;
  return false;
}

// Breadth-first search for a rule path whose first rule is exit-marked at one
// of `starts` and whose last rule is entry-marked at a port accepted by `target`.
std::optional<RulePathWitness> search_rule_path(const PortIndex& ix, const std::vector<std::size_t>& starts,
                                                const std::function<bool(const Port&)>& target) {
  const auto& ports = ix.pg.ports;
  struct Back {
    std::optional<std::size_t> prev_entry;
    std::size_t exit;
  };
  std::map<std::size_t, Back> parent;
  std::deque<std::size_t> queue;

  auto finish = [&](std::size_t last) {
    std::vector<MarkedRule> rev;
    rev.push_back({ports[last].rule, ports[last], std::nullopt});
    std::size_t cur = last;
    while (true) {
      const Back& b = parent.at(cur);
      if (!b.prev_entry) {
        rev.push_back({ports[b.exit].rule, std::nullopt, ports[b.exit]});
        break;
      }
      rev.push_back({ports[*b.prev_entry].rule, ports[*b.prev_entry], ports[b.exit]});
      cur = *b.prev_entry;
    }
    std::reverse(rev.begin(), rev.end());
    return RulePathWitness{std::move(rev)};
  };

  for (std::size_t x0 : starts) {
    for (std::size_t y : ix.partners[x0]) {
      if (parent.contains(y)) continue;
      parent[y] = {std::nullopt, x0};
      if (target(ports[y])) return finish(y);
      queue.push_back(y);
    }
  }
  while (!queue.empty()) {
    std::size_t y = queue.front();
    queue.pop_front();
    for (std::size_t z : ix.by_rule[ports[y].rule]) {
      if (z == y) continue;
      for (std::size_t y2 : ix.partners[z]) {
        if (parent.contains(y2)) continue;
        parent[y2] = {y, z};
        if (target(ports[y2])) return finish(y2);
        queue.push_back(y2);
      }
    }
  }
  return std::nullopt;
}

// Ports of an instance's rule that carry neither of its marks.
std::vector<Port> unmarked_ports(const Grammar& grammar, const MarkedRule& m) {
  std::vector<Port> out;
  const Rule& r = grammar.rule(m.rule);
  auto add = [&](Side side, const std::vector<Symbol>& syms) {
    for (std::size_t k = 0; k < syms.size(); ++k) {
      Port p{m.rule, side, k, syms[k]};
      if (p != m.entry && p != m.exit) out.push_back(p);
    }
  };
  add(Side::head, r.head);
  add(Side::tail, r.tail);
  return out;
}

}  // namespace

bool is_directed(const std::vector<MarkedRule>& rules) {
  bool forward = true, backward = true;
  for (const auto& m : rules) {
    if (m.entry) {
      forward = forward && m.entry->side == Side::head;
      backward = backward && m.entry->side == Side::tail;
    }
    if (m.exit) {
      forward = forward && m.exit->side == Side::tail;
      backward = backward && m.exit->side == Side::head;
    }
  }
  return forward || backward;
}

std::vector<RuleCycleWitness> find_rule_cycles(const Grammar& grammar, std::size_t max_length) {
  if (max_length == 0) max_length = 2 * grammar.size();
  PortGraph pg = build_port_graph(grammar);
  PortIndex ix(pg, grammar.size());
  const auto& ports = pg.ports;

  std::vector<RuleCycleWitness> found;
  std::vector<MarkedRule> stack;
  std::vector<bool> used(ports.size(), false);

  for (std::size_t s = 0; s < ports.size(); ++s) {
    std::function<void(std::size_t)> extend = [&](std::size_t entry) {
      for (std::size_t x : ix.by_rule[ports[entry].rule]) {
        // every port of the cycle is at least s, so s is its smallest port
        if (x == entry || x <= s || used[x]) continue;
        used[x] = true;
        stack.push_back({ports[entry].rule, ports[entry], ports[x]});
        for (std::size_t y : ix.partners[x]) {
          if (y == s) {
            found.push_back({stack, is_directed(stack)});
          } else if (y > s && !used[y] && stack.size() < max_length) {
            used[y] = true;
            extend(y);
            used[y] = false;
          }
        }
        stack.pop_back();
        used[x] = false;
      }
    };
    used[s] = true;
    extend(s);
    used[s] = false;
  }
  return found;
}

bool verify_rule_cycle(const Grammar& grammar, const RuleCycleWitness& c, std::string* why) {
  if (c.rules.empty()) return fail(why, "empty rule sequence");
  for (std::size_t i = 0; i < c.rules.size(); ++i) {
    const auto& m = c.rules[i];
    if (!m.entry || !m.exit) return fail(why, "rule " + std::to_string(i) + " is not fully marked");
    if (m.entry->rule != m.rule || m.exit->rule != m.rule || !port_matches(grammar, *m.entry) ||
        !port_matches(grammar, *m.exit))
      return fail(why, "rule " + std::to_string(i) + " has a mark outside its rule text");
    if (*m.entry == *m.exit) return fail(why, "rule " + std::to_string(i) + " marks one position twice");
    const auto& next = c.rules[(i + 1) % c.rules.size()];
    if (!next.entry || !agree(*m.exit, *next.entry))
      return fail(why, "rules " + std::to_string(i) + " and " + std::to_string((i + 1) % c.rules.size()) +
                           " do not agree");
  }
  if (c.directed != is_directed(c.rules)) return fail(why, "directed flag is wrong");
  return true;
}

bool verify_rule_path(const Grammar& grammar, const RulePathWitness& p, std::string* why) {
  const auto& rs = p.rules;
  if (rs.size() < 2) return fail(why, "a rule path needs at least two rules");
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const auto& m = rs[i];
    bool first = i == 0, last = i + 1 == rs.size();
    if (first && (m.entry || !m.exit)) return fail(why, "first rule must carry only an exit mark");
    if (last && (!m.entry || m.exit)) return fail(why, "last rule must carry only an entry mark");
    if (!first && !last && (!m.entry || !m.exit)) return fail(why, "interior rule is not fully marked");
    for (const auto* mark : {&m.entry, &m.exit}) {
      if (*mark && ((*mark)->rule != m.rule || !port_matches(grammar, **mark)))
        return fail(why, "rule " + std::to_string(i) + " has a mark outside its rule text");
    }
    if (m.entry && m.exit && *m.entry == *m.exit)
      return fail(why, "rule " + std::to_string(i) + " marks one position twice");
    if (!last && !agree(*m.exit, *rs[i + 1].entry))
      return fail(why, "rules " + std::to_string(i) + " and " + std::to_string(i + 1) + " do not agree");
  }
  return true;
}

bool verify_id_witness(const Grammar& grammar, const IdWitness& w, std::string* why) {
  std::string inner;
  if (!verify_rule_cycle(grammar, w.cycle, &inner)) return fail(why, "cycle: " + inner);
  if (w.instance >= w.cycle.rules.size()) return fail(why, "instance out of range");
  const auto& holder = w.cycle.rules[w.instance];
  if (w.unmarked.rule != holder.rule || !port_matches(grammar, w.unmarked))
    return fail(why, "unmarked port is not in the named cycle rule");
  if (w.unmarked == holder.entry || w.unmarked == holder.exit) return fail(why, "the q occurrence is marked");
  bool p_marked = std::any_of(w.cycle.rules.begin(), w.cycle.rules.end(),
                              [&](const MarkedRule& m) { return m.entry == w.marked || m.exit == w.marked; });
  if (!p_marked) return fail(why, "p is not marked in the cycle");
  if (!verify_rule_path(grammar, w.path, &inner)) return fail(why, "path: " + inner);
  const Port& start = *w.path.rules.front().exit;
  const Port& end = *w.path.rules.back().entry;
  if (start.nonterminal != w.unmarked.nonterminal) return fail(why, "path does not start at q");
  if (start.side != w.unmarked.side) return fail(why, "q is in a head on one side only");
  if (!agree(w.marked, end)) return fail(why, "path does not end at p");
  return true;
}

std::optional<IdWitness> find_id_witness(const Grammar& grammar) {
  PortGraph pg = build_port_graph(grammar);
  PortIndex ix(pg, grammar.size());
  for (const auto& c : find_rule_cycles(grammar)) {
    for (std::size_t i = 0; i < c.rules.size(); ++i) {
      for (const Port& q : unmarked_ports(grammar, c.rules[i])) {
        // the occurrence itself first, then any other port of q on the same side
        std::vector<std::size_t> starts{ix.index.at(q)};
        for (std::size_t k = 0; k < pg.ports.size(); ++k) {
          if (k != starts.front() && pg.ports[k].nonterminal == q.nonterminal && pg.ports[k].side == q.side)
            starts.push_back(k);
        }
        for (const auto& m : c.rules) {
          for (const Port& p : {*m.entry, *m.exit}) {
            auto path = search_rule_path(ix, starts, [&](const Port& y) { return agree(p, y); });
            if (path) return IdWitness{c, i, q, p, std::move(*path)};
          }
        }
      }
    }
  }
  return std::nullopt;
}

bool is_infinite(const Grammar& grammar) {
  if (!is_pruned(grammar)) throw Error("is_infinite: grammar has useless rules; prune it first");
  return !find_rule_cycles(grammar).empty();
}

UnboundedWitness label_unbounded(const Grammar& grammar, const Symbol& u) {
  if (!grammar.is_terminal(u) && !grammar.is_nonterminal(u)) throw Error("label_unbounded: unknown label `" + u + "`");
  auto cycles = find_rule_cycles(grammar);

  for (const auto& c : cycles) {
    for (const auto& m : c.rules) {
      const Rule& r = grammar.rule(m.rule);
      bool occurs = r.sigma == u || std::find(r.head.begin(), r.head.end(), u) != r.head.end() ||
                    std::find(r.tail.begin(), r.tail.end(), u) != r.tail.end();
      if (occurs) return {true, 'a', c, std::nullopt, std::nullopt};
    }
  }

  PortGraph pg = build_port_graph(grammar);
  PortIndex ix(pg, grammar.size());
  for (const auto& c : cycles) {
    for (const auto& m : c.rules) {
      for (const Port& q : unmarked_ports(grammar, m)) {
        auto path = search_rule_path(ix, {ix.index.at(q)}, [&](const Port& y) {
          return y.nonterminal == u || grammar.rule(y.rule).sigma == u;
        });
        if (path) return {true, 'b', c, q, std::move(*path)};
      }
    }
  }
  return {};
}

Classification classify(const Grammar& grammar) {
  Classification out;
  PruneResult pruned = prune_useless(grammar);
  if (pruned.grammar.size() == 0) {
    out.empty_language = true;
    return out;
  }
  if (!grammar.deterministic()) throw Error("classify: grammar is not deterministic");
  if (!pruned.removed.empty())
    throw Error("classify: grammar has " + std::to_string(pruned.removed.size()) + " useless rule(s); prune it first");

  auto cycles = find_rule_cycles(grammar);
  if (cycles.empty()) return out;
  out.cycle = cycles.front();
  if (auto w = find_id_witness(grammar)) {
    out.cls = LanguageClass::id;
    out.cycle = w->cycle;
    out.id_witness = std::move(w);
  } else {
    out.cls = LanguageClass::fid;
  }
  return out;
}

std::string format_marked_rule(const Grammar& grammar, const MarkedRule& m) {
  const Rule& r = grammar.rule(m.rule);
  auto side = [&](Side s, const std::vector<Symbol>& syms) {
    if (syms.empty()) return std::string("_");
    std::string out;
    for (std::size_t k = 0; k < syms.size(); ++k) {
      if (k) out += ' ';
      Port p{m.rule, s, k, syms[k]};
      if (m.entry == p) out += "[en]";
      if (m.exit == p) out += "[ex]";
      out += syms[k];
    }
    return out;
  };
  return side(Side::head, r.head) + " -> " + r.sigma + " -> " + side(Side::tail, r.tail);
}

std::string format_cycle(const Grammar& grammar, const RuleCycleWitness& c) {
  std::string out = std::string("cycle ") + (c.directed ? "directed" : "undirected") + "\n";
  for (const auto& m : c.rules) out += "  " + format_marked_rule(grammar, m) + "\n";
  return out;
}

std::string format_id_witness(const Grammar& grammar, const IdWitness& w) {
  std::string out = format_cycle(grammar, w.cycle);
  out += "unmarked " + w.unmarked.to_string() + " in cycle rule " + std::to_string(w.instance + 1) + "\n";
  out += "marked " + w.marked.to_string() + "\n";
  out += "path\n";
  for (const auto& m : w.path.rules) out += "  " + format_marked_rule(grammar, m) + "\n";
  return out;
}

}  // namespace metadag
