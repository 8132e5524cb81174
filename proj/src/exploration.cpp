#include "metadag/exploration.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "metadag/dfa.hpp"
#include "metadag/error.hpp"
#include "metadag/membership.hpp"

namespace metadag {

namespace {

// Abstract prefix DAG: the temporaries of each connected component. A
// component without temporaries is complete; it is only allowed as the sole
// component, which marks a finished derivation.
using Components = std::vector<MetaState>;

MetaState total(const Components& c) {
  MetaState m;
  for (const auto& x : c) m = msum(m, x);
  return m;
}

bool finished(const Components& c) { return c.size() == 1 && c.front().empty(); }

// Every sub-multiset of `from` that fits inside `limit`.
std::vector<MetaState> sub_multisets(const MetaState& from, const MetaState& limit) {
  std::vector<MetaState> out{MetaState{}};
  for (const auto& [s, n] : from.counts()) {
    std::uint32_t most = std::min(n, limit.count(s));
    std::vector<MetaState> grown;
    for (const auto& m : out) {
      for (std::uint32_t k = 0; k <= most; ++k) {
        MetaState x = m;
        x.add(s, k);
        grown.push_back(std::move(x));
      }
    }
    out = std::move(grown);
  }
  return out;
}

// Every way to take the head symbols out of the components: one taken
// sub-multiset per component, summing to the head.
void distribute(const Components& comps, std::size_t i, const MetaState& remaining, std::vector<MetaState>& taken,
                std::set<std::vector<MetaState>>& out) {
  if (i == comps.size()) {
    if (remaining.empty()) out.insert(taken);
    return;
  }
  for (const auto& sub : sub_multisets(comps[i], remaining)) {
    taken[i] = sub;
    distribute(comps, i + 1, mdiff(remaining, sub), taken, out);
  }
  taken[i] = MetaState{};
}

std::vector<Components> successors(const Grammar& grammar, const Components& state, std::size_t size_cap,
                                   Policy policy) {
  std::set<Components> out;
  if (finished(state)) return {};
  MetaState all = total(state);
  bool allow_roots = true;
  if (policy == Policy::lazy_root) {
    allow_roots = std::none_of(grammar.rules().begin(), grammar.rules().end(),
                               [&](const Rule& r) { return !r.is_root() && mleq(r.head_state(), all); });
  }
  for (const Rule& r : grammar.rules()) {
    MetaState alpha = r.head_state(), beta = r.tail_state();
    if (r.is_root()) {
      if (!allow_roots) continue;
      Components next = state;
      next.push_back(beta);
      std::sort(next.begin(), next.end());
      out.insert(next);
      continue;
    }
    if (!mleq(alpha, all)) continue;
    std::vector<MetaState> taken(state.size());
    std::set<std::vector<MetaState>> ways;
    distribute(state, 0, alpha, taken, ways);
    for (const auto& way : ways) {
      Components next;
      MetaState merged;
      for (std::size_t i = 0; i < state.size(); ++i) {
        if (way[i].empty())
          next.push_back(state[i]);
        else
          merged = msum(merged, mdiff(state[i], way[i]));
      }
      next.push_back(msum(merged, beta));
      std::sort(next.begin(), next.end());
      out.insert(next);
    }
  }

  std::vector<Components> result;
  for (const auto& c : out) {
    bool stranded = c.size() > 1 && std::any_of(c.begin(), c.end(), [](const MetaState& m) { return m.empty(); });
    if (stranded || total(c).size() > size_cap) continue;
    result.push_back(c);
  }
  return result;
}

std::set<MetaState> explore(const Grammar& grammar, std::size_t size_cap, std::size_t step_cap, Policy policy,
                            std::size_t state_limit) {
  // the whole size-capped space is finite: every component holds a temporary
  std::map<Components, std::size_t> depth{{Components{}, 0}};
  std::map<Components, std::vector<Components>> edges;
  std::deque<Components> queue{Components{}};
  while (!queue.empty()) {
    Components c = queue.front();
    queue.pop_front();
    auto next = successors(grammar, c, size_cap, policy);
    for (const auto& n : next) {
      if (depth.emplace(n, depth.at(c) + 1).second) {
        if (depth.size() > state_limit) throw Error("reachable: more than " + std::to_string(state_limit) + " states");
        queue.push_back(n);
      }
    }
    edges[c] = std::move(next);
  }

  std::map<Components, std::vector<Components>> back;
  for (const auto& [from, tos] : edges)
    for (const auto& to : tos) back[to].push_back(from);
  std::set<Components> good;
  std::deque<Components> work;
  for (const auto& [c, d] : depth) {
    if (finished(c)) {
      good.insert(c);
      work.push_back(c);
    }
  }
  while (!work.empty()) {
    Components c = work.front();
    work.pop_front();
    for (const auto& p : back[c]) {
      if (good.insert(p).second) work.push_back(p);
    }
  }

  std::set<MetaState> states{MetaState{}};
  for (const auto& c : good) {
    if (depth.at(c) <= step_cap) states.insert(total(c));
  }
  return states;
}

}  // namespace

MetaStateSet reachable(const Grammar& grammar, std::size_t size_cap, std::size_t step_cap, Policy policy,
                       std::size_t state_limit) {
  MetaStateSet out;
  out.size_cap = size_cap;
  out.step_cap = step_cap;
  out.states = explore(grammar, size_cap, step_cap, policy, state_limit);
  out.saturated = explore(grammar, size_cap, step_cap + 1, policy, state_limit) == out.states;
  return out;
}

QminEstimate estimate_qmin(const Grammar& grammar, std::size_t oracle_vertex_bound, std::size_t k_max) {
  Classification c = classify(grammar);
  if (c.cls == LanguageClass::id) {
    throw Error("estimate_qmin: the language has infinitely many meta-states (ID)\n" +
                format_id_witness(grammar, *c.id_witness));
  }
  auto members = enumerate_language(grammar, oracle_vertex_bound, true);
  for (std::size_t k = 1; k <= k_max; ++k) {
    Dfa dfa = trim(build_dfa(grammar, all_meta_states(grammar.nonterminals(), k)));
    bool all = std::all_of(members.begin(), members.end(),
                           [&](const LanguageMember& m) { return read_dag(dfa, m.dag).accepted; });
    if (!all) continue;
    QminEstimate est;
    est.k = k;
    est.states.size_cap = k;
    for (const auto& s : dfa.states()) est.states.states.insert(*s.meta);
    std::ostringstream report;
    report << "class " << to_string(c.cls) << (c.empty_language ? " (empty)" : "") << "\n"
           << "size cap K = " << k << ", " << est.states.states.size() << " meta-states\n"
           << "validated against " << members.size() << " members with at most " << oracle_vertex_bound
           << " vertices; not proven minimal, and minimal sets need not be unique\n";
    est.report = report.str();
    return est;
  }
  throw Error("estimate_qmin: no size cap up to " + std::to_string(k_max) + " reads every member");
}

}  // namespace metadag
