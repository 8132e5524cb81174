#include "metadag/dfa.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "metadag/dag_io.hpp"
#include "metadag/error.hpp"

namespace metadag {

Dfa::Dfa(std::vector<Rule> alphabet) : alphabet_(std::move(alphabet)) {
  std::set<Rule> seen;
  for (const auto& r : alphabet_) {
    if (!seen.insert(r).second) throw Error("duplicate alphabet rule `" + r.to_string() + "`");
  }
}

std::optional<std::size_t> Dfa::symbol_of(const Rule& r) const {
  auto it = std::find(alphabet_.begin(), alphabet_.end(), r);
  if (it == alphabet_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - alphabet_.begin());
}

std::size_t Dfa::add_state(std::string name, std::optional<MetaState> meta) {
  if (name.empty() || name.find('|') != std::string::npos || name.find('#') != std::string::npos ||
      name.find('\n') != std::string::npos)
    throw Error("invalid state name `" + name + "`");
  if (find_state(name)) throw Error("duplicate state `" + name + "`");
  states_.push_back({std::move(name), std::move(meta)});
  return states_.size() - 1;
}

std::optional<std::size_t> Dfa::find_state(std::string_view name) const {
  for (std::size_t i = 0; i < states_.size(); ++i)
    if (states_[i].name == name) return i;
  return std::nullopt;
}

void Dfa::set_start(std::size_t s) {
  if (s >= states_.size()) throw Error("unknown state");
  start_ = s;
}

std::size_t Dfa::start() const {
  if (!start_) throw Error("automaton has no start state");
  return *start_;
}

void Dfa::set_accepting(std::size_t s, bool accepting) {
  if (s >= states_.size()) throw Error("unknown state");
  if (accepting)
    accepting_.insert(s);
  else
    accepting_.erase(s);
}

void Dfa::set_transition(std::size_t from, std::size_t symbol, std::size_t to) {
  if (from >= states_.size() || to >= states_.size()) throw Error("unknown state");
  if (symbol >= alphabet_.size()) throw Error("unknown alphabet symbol");
  delta_[{from, symbol}] = to;
}

std::optional<std::size_t> Dfa::next(std::size_t from, std::size_t symbol) const {
  auto it = delta_.find({from, symbol});
  if (it == delta_.end()) return std::nullopt;
  return it->second;
}

Dfa build_dfa(const Grammar& grammar, const std::set<MetaState>& q_set) {
  if (!q_set.contains(MetaState{})) throw Error("build_dfa: the meta-state set must contain the empty multiset");
  Dfa dfa(grammar.rules());
  std::map<MetaState, std::size_t> id;
  for (const auto& q : q_set) id[q] = dfa.add_state(q.to_string(), q);
  dfa.set_start(id.at(MetaState{}));
  dfa.set_accepting(id.at(MetaState{}));
  for (const auto& q : q_set) {
    for (std::size_t r = 0; r < grammar.size(); ++r) {
      MetaState alpha = grammar.rule(r).head_state();
      if (!mleq(alpha, q)) continue;
      MetaState to = msum(mdiff(q, alpha), grammar.rule(r).tail_state());
      if (auto it = id.find(to); it != id.end()) dfa.set_transition(id.at(q), r, it->second);
    }
  }
  return dfa;
}

bool accepts_rule_word(const Dfa& dfa, const std::vector<std::size_t>& word) {
  std::size_t s = dfa.start();
  for (std::size_t sym : word) {
    auto n = dfa.next(s, sym);
    if (!n) return false;
    s = *n;
  }
  return dfa.is_accepting(s);
}

Dfa product(const Dfa& a, const Dfa& b, ProductMode mode) {
  if (a.alphabet() != b.alphabet()) throw Error("product: automata have different alphabets");
  using Pair = std::pair<std::optional<std::size_t>, std::optional<std::size_t>>;
  auto name = [](const Dfa& d, const std::optional<std::size_t>& s) { return s ? d.states()[*s].name : "sink"; };
  auto accepting = [](const Dfa& d, const std::optional<std::size_t>& s) { return s && d.is_accepting(*s); };

  Dfa out(a.alphabet());
  std::map<Pair, std::size_t> id;
  std::deque<Pair> queue;
  auto intern = [&](const Pair& p) {
    auto it = id.find(p);
    if (it != id.end()) return it->second;
    std::size_t s = out.add_state("(" + name(a, p.first) + ", " + name(b, p.second) + ")");
    bool acc = mode == ProductMode::intersect ? accepting(a, p.first) && accepting(b, p.second)
                                              : accepting(a, p.first) || accepting(b, p.second);
    out.set_accepting(s, acc);
    id.emplace(p, s);
    queue.push_back(p);
    return s;
  };

  out.set_start(intern({a.start(), b.start()}));
  while (!queue.empty()) {
    Pair p = queue.front();
    queue.pop_front();
    std::size_t from = id.at(p);
    for (std::size_t sym = 0; sym < a.alphabet().size(); ++sym) {
      std::optional<std::size_t> na = p.first ? a.next(*p.first, sym) : std::nullopt;
      std::optional<std::size_t> nb = p.second ? b.next(*p.second, sym) : std::nullopt;
      if (mode == ProductMode::intersect && (!na || !nb)) continue;
      if (!na && !nb) continue;
      out.set_transition(from, sym, intern({na, nb}));
    }
  }
  return out;
}

Dfa trim(const Dfa& dfa) {
  const std::size_t n = dfa.size();
  std::vector<bool> reach(n, false), coreach(n, false);
  std::deque<std::size_t> queue{dfa.start()};
  reach[dfa.start()] = true;
  while (!queue.empty()) {
    std::size_t s = queue.front();
    queue.pop_front();
    for (std::size_t sym = 0; sym < dfa.alphabet().size(); ++sym) {
      if (auto t = dfa.next(s, sym); t && !reach[*t]) {
        reach[*t] = true;
        queue.push_back(*t);
      }
    }
  }
  for (std::size_t s : dfa.accepting()) coreach[s] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [key, to] : dfa.transitions()) {
      if (coreach[to] && !coreach[key.first]) {
        coreach[key.first] = true;
        changed = true;
      }
    }
  }

  Dfa out(dfa.alphabet());
  std::map<std::size_t, std::size_t> keep;
  for (std::size_t s = 0; s < n; ++s) {
    if (s == dfa.start() || (reach[s] && coreach[s])) keep[s] = out.add_state(dfa.states()[s].name, dfa.states()[s].meta);
  }
  out.set_start(keep.at(dfa.start()));
  for (const auto& [s, t] : keep)
    if (dfa.is_accepting(s)) out.set_accepting(t);
  for (const auto& [key, to] : dfa.transitions()) {
    auto f = keep.find(key.first), g = keep.find(to);
    if (f != keep.end() && g != keep.end() && reach[key.first] && coreach[to])
      out.set_transition(f->second, key.second, g->second);
  }
  return out;
}

Dfa minimize(const Dfa& dfa) {
  const std::size_t n = dfa.size();
  const std::size_t k = dfa.alphabet().size();
  const std::size_t sink = n;  // extra state totalizing the automaton
  auto step = [&](std::size_t s, std::size_t sym) -> std::size_t {
    if (s == sink) return sink;
    auto t = dfa.next(s, sym);
    return t ? *t : sink;
  };

  std::vector<std::size_t> block(n + 1);
  for (std::size_t s = 0; s <= n; ++s) block[s] = (s < n && dfa.is_accepting(s)) ? 1 : 0;
  for (std::size_t count = 0;;) {
    std::map<std::vector<std::size_t>, std::size_t> signatures;
    std::vector<std::size_t> refined(n + 1);
    for (std::size_t s = 0; s <= n; ++s) {
      std::vector<std::size_t> sig{block[s]};
      for (std::size_t sym = 0; sym < k; ++sym) sig.push_back(block[step(s, sym)]);
      refined[s] = signatures.emplace(sig, signatures.size()).first->second;
    }
    block = std::move(refined);
    if (signatures.size() == count) break;
    count = signatures.size();
  }

  // quotient over the blocks reachable from the start, named by their first member
  Dfa quotient(dfa.alphabet());
  std::map<std::size_t, std::size_t> id;
  std::map<std::size_t, std::size_t> members;
  for (std::size_t s = 0; s < n; ++s) ++members[block[s]];
  std::deque<std::size_t> queue;
  auto intern = [&](std::size_t s) {
    auto it = id.find(block[s]);
    if (it != id.end()) return it->second;
    const auto& st = dfa.states()[s];
    std::size_t q = quotient.add_state(st.name, members[block[s]] == 1 ? st.meta : std::nullopt);
    if (dfa.is_accepting(s)) quotient.set_accepting(q);
    id.emplace(block[s], q);
    queue.push_back(s);
    return q;
  };
  quotient.set_start(intern(dfa.start()));
  while (!queue.empty()) {
    std::size_t s = queue.front();
    queue.pop_front();
    std::size_t from = id.at(block[s]);
    for (std::size_t sym = 0; sym < k; ++sym) {
      std::size_t t = step(s, sym);
      if (t == sink || block[t] == block[sink]) continue;
      quotient.set_transition(from, sym, intern(t));
    }
  }
  return trim(quotient);
}

Grammar grammar_of(const Dfa& dfa) {
  std::set<Symbol> terminals, nonterminals;
  for (const auto& r : dfa.alphabet()) {
    terminals.insert(r.sigma);
    nonterminals.insert(r.head.begin(), r.head.end());
    nonterminals.insert(r.tail.begin(), r.tail.end());
  }
  return Grammar(terminals, nonterminals, dfa.alphabet());
}

std::string print_dfa(const Dfa& dfa) {
  std::ostringstream out;
  for (const auto& r : dfa.alphabet()) out << "alphabet: " << r.to_string() << '\n';
  for (std::size_t s = 0; s < dfa.size(); ++s) {
    const auto& st = dfa.states()[s];
    std::vector<std::string> flags;
    if (s == dfa.start()) flags.push_back("start");
    if (dfa.is_accepting(s)) flags.push_back("accept");
    if (st.meta && st.meta->to_string() == st.name) flags.push_back("meta");
    out << "state " << st.name;
    if (!flags.empty()) {
      out << " |";
      for (const auto& f : flags) out << ' ' << f;
    }
    out << '\n';
  }
  for (const auto& [key, to] : dfa.transitions()) {
    out << "trans " << dfa.states()[key.first].name << " | " << dfa.alphabet()[key.second].to_string() << " | "
        << dfa.states()[to].name << '\n';
  }
  return out.str();
}

namespace {

std::string trim_ws(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_bars(std::string_view s) {
  std::vector<std::string> parts;
  std::size_t from = 0;
  while (true) {
    auto bar = s.find('|', from);
    parts.push_back(trim_ws(s.substr(from, bar == std::string_view::npos ? std::string_view::npos : bar - from)));
    if (bar == std::string_view::npos) break;
    from = bar + 1;
  }
  return parts;
}

}  // namespace

bool looks_like_dfa(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string t = trim_ws(line);
    if (t.empty()) continue;
    return t.rfind("alphabet:", 0) == 0 || t.rfind("state ", 0) == 0;
  }
  return false;
}

Dfa parse_dfa(std::string_view text) {
  std::vector<Rule> alphabet;
  struct StateLine {
    std::size_t line;
    std::string name;
    std::vector<std::string> flags;
  };
  struct TransLine {
    std::size_t line;
    std::string from, rule, to;
  };
  std::vector<StateLine> states;
  std::vector<TransLine> trans;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::string line = trim_ws(raw);
    if (line.empty()) continue;
    try {
      if (line.rfind("alphabet:", 0) == 0) {
        if (!states.empty() || !trans.empty()) throw ParseError(0, "alphabet lines must come first");
        alphabet.push_back(parse_rule(std::string_view(line).substr(9)));
      } else if (line.rfind("state ", 0) == 0) {
        auto parts = split_bars(std::string_view(line).substr(6));
        if (parts.size() > 2 || parts[0].empty()) throw ParseError(0, "expected `state <name> [| <flags>]`");
        std::vector<std::string> flags;
        if (parts.size() == 2) flags = split_tokens(parts[1]);
        for (const auto& f : flags) {
          if (f != "start" && f != "accept" && f != "meta") throw ParseError(0, "unknown state flag `" + f + "`");
        }
        states.push_back({lineno, parts[0], flags});
      } else if (line.rfind("trans ", 0) == 0) {
        auto parts = split_bars(std::string_view(line).substr(6));
        if (parts.size() != 3) throw ParseError(0, "expected `trans <state> | <rule> | <state>`");
        trans.push_back({lineno, parts[0], parts[1], parts[2]});
      } else {
        throw ParseError(0, "expected `alphabet:`, `state` or `trans`");
      }
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.what());
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
  }

  Dfa dfa(alphabet);
  bool have_start = false;
  for (const auto& s : states) {
    try {
      std::optional<MetaState> meta;
      if (std::find(s.flags.begin(), s.flags.end(), "meta") != s.flags.end()) {
        meta = MetaState::parse(s.name);
        if (meta->to_string() != s.name) throw ParseError(0, "state name is not a canonical meta-state");
      }
      std::size_t id = dfa.add_state(s.name, meta);
      for (const auto& f : s.flags) {
        if (f == "start") {
          if (have_start) throw ParseError(0, "second start state");
          dfa.set_start(id);
          have_start = true;
        } else if (f == "accept") {
          dfa.set_accepting(id);
        }
      }
    } catch (const Error& e) {
      throw ParseError(s.line, e.what());
    }
  }
  if (!have_start) throw ParseError(0, "no start state");
  for (const auto& t : trans) {
    auto from = dfa.find_state(t.from), to = dfa.find_state(t.to);
    if (!from) throw ParseError(t.line, "unknown state `" + t.from + "`");
    if (!to) throw ParseError(t.line, "unknown state `" + t.to + "`");
    std::optional<std::size_t> sym;
    try {
      sym = dfa.symbol_of(parse_rule(t.rule));
    } catch (const ParseError& e) {
      throw ParseError(t.line, e.what());
    }
    if (!sym) throw ParseError(t.line, "rule `" + t.rule + "` is not in the alphabet");
    if (dfa.next(*from, *sym)) throw ParseError(t.line, "second transition on the same rule");
    dfa.set_transition(*from, *sym, *to);
  }
  return dfa;
}

}  // namespace metadag
