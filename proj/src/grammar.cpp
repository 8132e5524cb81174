#include "metadag/grammar.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "metadag/dag_io.hpp"
#include "metadag/error.hpp"

namespace metadag {

namespace {

std::string join_side(const std::vector<Symbol>& side) {
  if (side.empty()) return "_";
  std::string out;
  for (const auto& s : side) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

std::vector<Symbol> read_side(const std::vector<std::string>& tokens, const char* which) {
  if (tokens.empty()) throw ParseError(0, std::string("empty ") + which + " (write `_` for the empty string)");
  if (tokens.size() == 1 && tokens[0] == "_") return {};
  for (const auto& t : tokens) {
    if (t == "_") throw ParseError(0, std::string("`_` must stand alone in the ") + which);
  }
  return tokens;
}

void check_symbol_name(const Symbol& s) {
  if (s.empty() || s == "_" || s.find("->") != std::string::npos || s.find('#') != std::string::npos)
    throw Error("invalid symbol name `" + s + "`");
}

}  // namespace

std::string Rule::to_string() const { return join_side(head) + " -> " + sigma + " -> " + join_side(tail); }

Rule parse_rule(std::string_view text) {
  auto tokens = split_tokens(text);
  std::vector<std::size_t> arrows;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i] == "->") arrows.push_back(i);
  if (arrows.size() != 2) throw ParseError(0, "rule must have the form `<head> -> <sigma> -> <tail>`");
  if (arrows[1] != arrows[0] + 2) throw ParseError(0, "rule needs exactly one terminal between the arrows");
  Rule r;
  r.head = read_side({tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(arrows[0])}, "head");
  r.sigma = tokens[arrows[0] + 1];
  r.tail = read_side({tokens.begin() + static_cast<std::ptrdiff_t>(arrows[1]) + 1, tokens.end()}, "tail");
  if (r.sigma == "_") throw ParseError(0, "the terminal of a rule cannot be `_`");
  return r;
}

Grammar::Grammar(std::set<Symbol> terminals, std::set<Symbol> nonterminals, std::vector<Rule> rules)
    : terminals_(std::move(terminals)), nonterminals_(std::move(nonterminals)), rules_(std::move(rules)) {
  for (const auto& s : terminals_) check_symbol_name(s);
  for (const auto& s : nonterminals_) {
    check_symbol_name(s);
    if (terminals_.contains(s)) throw Error("symbol `" + s + "` is both terminal and nonterminal");
  }
  std::set<Rule> seen;
  for (const auto& r : rules_) {
    if (!terminals_.contains(r.sigma)) throw Error("rule `" + r.to_string() + "`: `" + r.sigma + "` is not a terminal");
    for (const auto* side : {&r.head, &r.tail}) {
      for (const auto& s : *side) {
        if (!nonterminals_.contains(s))
          throw Error("rule `" + r.to_string() + "`: `" + s + "` is not a nonterminal");
      }
    }
    if (!seen.insert(r).second) throw Error("duplicate rule `" + r.to_string() + "`");
  }
}

std::optional<std::size_t> Grammar::index_of(const Rule& r) const {
  auto it = std::find(rules_.begin(), rules_.end(), r);
  if (it == rules_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - rules_.begin());
}

std::vector<std::pair<std::size_t, std::size_t>> Grammar::clashes() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    for (std::size_t j = i + 1; j < rules_.size(); ++j) {
      const Rule &a = rules_[i], &b = rules_[j];
      if (a.head == b.head && a.sigma == b.sigma && a.tail != b.tail) out.emplace_back(i, j);
    }
  }
  return out;
}

std::size_t Grammar::max_head() const {
  std::size_t m = 0;
  for (const auto& r : rules_) m = std::max(m, r.head.size());
  return m;
}

Grammar Grammar::restricted(const std::set<std::size_t>& keep) const {
  std::vector<Rule> kept;
  for (std::size_t i = 0; i < rules_.size(); ++i)
    if (keep.contains(i)) kept.push_back(rules_[i]);
  return Grammar(terminals_, nonterminals_, std::move(kept));
}

Grammar parse_grammar(std::string_view text) {
  std::optional<std::set<Symbol>> terminals, nonterminals;
  std::vector<std::pair<std::size_t, Rule>> rules;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto starts = [](const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line.erase(0, first);
    try {
      if (starts(line, "terminals:")) {
        if (terminals) throw ParseError(0, "duplicate `terminals:` line");
        auto toks = split_tokens(std::string_view(line).substr(10));
        terminals.emplace(toks.begin(), toks.end());
        if (terminals->size() != toks.size()) throw ParseError(0, "repeated terminal");
      } else if (starts(line, "nonterminals:")) {
        if (nonterminals) throw ParseError(0, "duplicate `nonterminals:` line");
        auto toks = split_tokens(std::string_view(line).substr(13));
        nonterminals.emplace(toks.begin(), toks.end());
        if (nonterminals->size() != toks.size()) throw ParseError(0, "repeated nonterminal");
      } else if (starts(line, "rule:")) {
        rules.emplace_back(lineno, parse_rule(std::string_view(line).substr(5)));
      } else {
        throw ParseError(0, "expected `terminals:`, `nonterminals:` or `rule:`");
      }
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.what());
    }
  }

  std::set<Symbol> sigma = terminals.value_or(std::set<Symbol>{});
  std::set<Symbol> nts = nonterminals.value_or(std::set<Symbol>{});
  std::vector<Rule> plain;
  for (const auto& [ln, r] : rules) {
    try {
      Grammar(sigma, nts, {r});
    } catch (const Error& e) {
      throw ParseError(ln, e.what());
    }
    plain.push_back(r);
  }
  try {
    return Grammar(std::move(sigma), std::move(nts), std::move(plain));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(0, e.what());
  }
}

std::string print_grammar(const Grammar& g) {
  std::string out = "terminals:";
  for (const auto& s : g.terminals()) out += " " + s;
  out += "\nnonterminals:";
  for (const auto& s : g.nonterminals()) out += " " + s;
  out += "\n";
  for (const auto& r : g.rules()) out += "rule: " + r.to_string() + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Derivations

Dag apply_rule(const Dag& g, const Rule& r, const std::vector<VertexId>& chosen,
               const std::set<Symbol>& nonterminals, VertexId* created) {
  if (chosen.size() != r.head.size())
    throw Error("apply_rule: " + std::to_string(chosen.size()) + " vertices chosen for a head of length " +
                std::to_string(r.head.size()));
  std::set<VertexId> distinct(chosen.begin(), chosen.end());
  if (distinct.size() != chosen.size()) throw Error("apply_rule: chosen vertices are not distinct");
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    if (!g.has_vertex(chosen[i])) throw Error("apply_rule: unknown vertex");
    const auto& v = g.vertex(chosen[i]);
    if (!nonterminals.contains(v.label)) throw Error("apply_rule: vertex " + v.name + " is not temporary");
    if (v.label != r.head[i])
      throw Error("apply_rule: vertex " + v.name + " has label " + v.label + ", head expects " + r.head[i]);
    if (v.in.size() != 1 || !v.out.empty()) throw Error("apply_rule: vertex " + v.name + " is not temporary");
  }

  Dag out = g;
  VertexId v = out.add_vertex(r.sigma);
  std::vector<EdgeId> in_edges;
  for (VertexId c : chosen) {
    EdgeId e = g.vertex(c).in.front();
    out.set_target(e, v);
    in_edges.push_back(e);
    out.set_in_order(c, {});
    out.remove_vertex(c);
  }
  out.set_in_order(v, std::move(in_edges));
  for (const auto& t : r.tail) {
    VertexId w = out.add_vertex(t);
    out.add_edge(v, w, t);
  }
  if (created) *created = v;
  return out;
}

Derivation derive(const Grammar& grammar, const std::vector<DerivationStep>& script) {
  Derivation d;
  d.trace.push_back(meta(d.result, grammar.nonterminals()));
  for (std::size_t i = 0; i < script.size(); ++i) {
    const auto& step = script[i];
    if (step.rule >= grammar.size()) throw Error("derive: step " + std::to_string(i + 1) + " names an unknown rule");
    try {
      d.result = apply_rule(d.result, grammar.rule(step.rule), step.chosen, grammar.nonterminals());
    } catch (const Error& e) {
      throw Error("derive: step " + std::to_string(i + 1) + ": " + e.what());
    }
    d.steps.push_back(step);
    d.trace.push_back(meta(d.result, grammar.nonterminals()));
  }
  return d;
}

Dag derivation_dag(const Grammar& grammar, const Derivation& d) {
  for (const auto& [id, v] : d.result.vertices()) {
    if (grammar.is_nonterminal(v.label)) throw Error("derivation_dag: derivation is not complete");
  }
  return d.result;
}

namespace {

void require_complete(const Grammar& grammar, const Dag& g) {
  if (auto problems = validate_dag(g); !problems.empty()) throw Error("invalid DAG: " + problems.front());
  for (const auto& [id, v] : g.vertices()) {
    if (!grammar.is_terminal(v.label)) throw Error("vertex " + v.name + " has label `" + v.label + "` outside the terminals");
  }
}

}  // namespace

std::vector<Dag> derivation_labelings(const Grammar& grammar, const Dag& g, std::size_t limit) {
  require_complete(grammar, g);
  std::vector<Dag> found;
  if (limit == 0) return found;
  auto order = *topological_order(g);

  std::map<std::pair<Symbol, std::vector<Symbol>>, std::vector<const Rule*>> by_head;
  for (const auto& r : grammar.rules()) by_head[{r.sigma, r.head}].push_back(&r);

  Dag work = strip_edge_labels(g);
  std::function<void(std::size_t)> search = [&](std::size_t i) {
    if (found.size() >= limit) return;
    if (i == order.size()) {
      found.push_back(work);
      return;
    }
    const auto& v = work.vertex(order[i]);
    std::vector<Symbol> alpha;
    for (EdgeId e : v.in) alpha.push_back(*work.edge(e).label);
    auto it = by_head.find({v.label, alpha});
    if (it == by_head.end()) return;
    std::vector<EdgeId> outs = v.out;
    for (const Rule* r : it->second) {
      if (r->tail.size() != outs.size()) continue;
      for (std::size_t j = 0; j < outs.size(); ++j) work.set_edge_label(outs[j], r->tail[j]);
      search(i + 1);
      if (found.size() >= limit) return;
    }
    for (EdgeId e : outs) work.set_edge_label(e, std::nullopt);
  };
  search(0);
  return found;
}

std::vector<DerivationStep> script_for_labeling(const Grammar& grammar, const Dag& labeled) {
  require_complete(grammar, labeled);
  std::map<EdgeId, VertexId> temp_of;
  std::vector<DerivationStep> steps;
  Dag cur;
  const auto order = topological_order(labeled).value();
  for (VertexId id : order) {
    const auto& v = labeled.vertex(id);
    Rule r;
    r.sigma = v.label;
    for (EdgeId e : v.in) {
      const auto& label = labeled.edge(e).label;
      if (!label) throw Error("script_for_labeling: unlabeled edge " + labeled.edge(e).name);
      r.head.push_back(*label);
    }
    for (EdgeId e : v.out) {
      const auto& label = labeled.edge(e).label;
      if (!label) throw Error("script_for_labeling: unlabeled edge " + labeled.edge(e).name);
      r.tail.push_back(*label);
    }
    auto index = grammar.index_of(r);
    if (!index) throw Error("script_for_labeling: no rule `" + r.to_string() + "` for vertex " + v.name);

    DerivationStep step{*index, {}};
    for (EdgeId e : v.in) step.chosen.push_back(temp_of.at(e));
    VertexId made;
    cur = apply_rule(cur, r, step.chosen, grammar.nonterminals(), &made);
    const auto& new_out = cur.vertex(made).out;
    for (std::size_t j = 0; j < v.out.size(); ++j) temp_of[v.out[j]] = cur.edge(new_out[j]).tar;
    steps.push_back(std::move(step));
  }
  return steps;
}

bool has_unique_derivation_dag(const Grammar& grammar, const Dag& g) {
  if (g.empty() || !is_connected(g)) throw Error("has_unique_derivation_dag: DAG is not in L(G)");
  auto labelings = derivation_labelings(grammar, g, 2);
  if (labelings.empty()) throw Error("has_unique_derivation_dag: DAG is not in L(G)");
  return labelings.size() == 1;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

std::vector<VertexId> temporaries(const Dag& g, const std::set<Symbol>& nonterminals) {
  std::vector<VertexId> out;
  for (const auto& [id, v] : g.vertices())
    if (nonterminals.contains(v.label)) out.push_back(id);
  return out;
}

// Every ordered choice of distinct temporaries whose labels spell `head`.
void choices(const Dag& g, const std::vector<VertexId>& temps, const std::vector<Symbol>& head,
             std::vector<VertexId>& current, std::vector<std::vector<VertexId>>& out) {
  if (current.size() == head.size()) {
    out.push_back(current);
    return;
  }
  const Symbol& want = head[current.size()];
  for (VertexId t : temps) {
    if (g.vertex(t).label != want) continue;
    if (std::find(current.begin(), current.end(), t) != current.end()) continue;
    current.push_back(t);
    choices(g, temps, head, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<LanguageMember> enumerate_language(const Grammar& grammar, std::size_t max_vertices,
                                               bool connected_only) {
  if (max_vertices > kEnumerationCap)
    throw Error("enumerate_language: bound " + std::to_string(max_vertices) + " exceeds the cap of " +
                std::to_string(kEnumerationCap) + " vertices");
  const auto& nts = grammar.nonterminals();
  const std::size_t max_head = grammar.max_head();

  auto dead = [&](const Dag& g, std::size_t placed) {
    std::size_t temps = temporaries(g, nts).size();
    std::size_t remaining = max_vertices - placed;
    if (temps > remaining * max_head) return true;
    if (connected_only) {
      auto comps = connected_components(g);
      if (comps.size() > 1) {
        for (const auto& c : comps) {
          bool open = std::any_of(c.begin(), c.end(), [&](VertexId v) { return nts.contains(g.vertex(v).label); });
          if (!open) return true;
        }
      }
    }
    return false;
  };

  std::map<std::string, LanguageMember> members;
  std::map<std::string, Dag> level{{canonical_form(Dag{}), Dag{}}};
  for (std::size_t placed = 1; placed <= max_vertices && !level.empty(); ++placed) {
    std::map<std::string, Dag> next;
    for (const auto& [key, g] : level) {
      auto temps = temporaries(g, nts);
      for (const auto& r : grammar.rules()) {
        std::vector<std::vector<VertexId>> picks;
        std::vector<VertexId> current;
        choices(g, temps, r.head, current, picks);
        for (const auto& pick : picks) {
          Dag h = apply_rule(g, r, pick, nts);
          if (dead(h, placed)) continue;
          next.emplace(canonical_form(h), std::move(h));
        }
      }
    }
    for (auto it = next.begin(); it != next.end();) {
      const Dag& g = it->second;
      bool complete = temporaries(g, nts).empty();
      if (complete) {
        Dag labeled = g.compacted();
        Dag plain = strip_edge_labels(labeled);
        std::string k = canonical_form(plain);
        members.emplace(k, LanguageMember{std::move(plain), std::move(labeled), k});
      }
      // a complete connected DAG cannot grow into another connected one
      if (complete && connected_only)
        it = next.erase(it);
      else
        ++it;
    }
    level = std::move(next);
  }

  std::vector<LanguageMember> out;
  for (auto& [k, m] : members) out.push_back(std::move(m));
  std::stable_sort(out.begin(), out.end(), [](const LanguageMember& a, const LanguageMember& b) {
    return a.dag.vertex_count() < b.dag.vertex_count();
  });
  return out;
}

// ---------------------------------------------------------------------------
// Pruning

PruneResult prune_useless(const Grammar& grammar, std::size_t bound) {
  std::set<std::size_t> keep;
  for (std::size_t i = 0; i < grammar.size(); ++i) keep.insert(i);

  auto subset = [](const std::vector<Symbol>& side, const std::set<Symbol>& s) {
    return std::all_of(side.begin(), side.end(), [&](const Symbol& x) { return s.contains(x); });
  };

  // producible: reachable as a temporary from the empty DAG;
  // consumable: can be rewritten into a complete sub-DAG
  for (bool changed = true; changed;) {
    std::set<Symbol> producible, consumable;
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t i : keep) {
        const Rule& r = grammar.rule(i);
        if (subset(r.head, producible)) {
          for (const auto& t : r.tail) grew |= producible.insert(t).second;
        }
        if (subset(r.tail, consumable)) {
          for (const auto& h : r.head) grew |= consumable.insert(h).second;
        }
      }
    }
    changed = false;
    for (auto it = keep.begin(); it != keep.end();) {
      const Rule& r = grammar.rule(*it);
      if (subset(r.head, producible) && subset(r.tail, consumable)) {
        ++it;
      } else {
        it = keep.erase(it);
        changed = true;
      }
    }
  }

  // connectivity refinement: the rule must label some member up to the bound
  Grammar candidate = grammar.restricted(keep);
  std::set<Rule> used;
  for (const auto& m : enumerate_language(candidate, bound, true)) {
    for (const auto& labeled : derivation_labelings(candidate, m.dag)) {
      for (const auto& [id, v] : labeled.vertices()) {
        Rule r;
        r.sigma = v.label;
        for (EdgeId e : v.in) r.head.push_back(*labeled.edge(e).label);
        for (EdgeId e : v.out) r.tail.push_back(*labeled.edge(e).label);
        used.insert(std::move(r));
      }
    }
  }

  PruneResult result;
  std::set<std::size_t> final_keep;
  for (std::size_t i = 0; i < grammar.size(); ++i) {
    if (used.contains(grammar.rule(i)))
      final_keep.insert(i);
    else
      result.removed.push_back(grammar.rule(i));
  }
  result.grammar = grammar.restricted(final_keep);
  return result;
}

bool is_pruned(const Grammar& grammar, std::size_t bound) { return prune_useless(grammar, bound).removed.empty(); }

}  // namespace metadag
