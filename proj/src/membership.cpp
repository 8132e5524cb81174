#include "metadag/membership.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "metadag/error.hpp"

namespace metadag {

namespace {

void check_readable(const Dag& g, const std::set<Symbol>& terminals) {
  if (auto problems = validate_dag(g); !problems.empty()) throw Error("invalid DAG: " + problems.front());
  if (!is_connected(g)) throw Error("DAG is not connected");
  for (const auto& [id, e] : g.edges()) {
    if (e.label) throw Error("DAG has edge labels; membership expects an unlabeled DAG");
  }
  for (const auto& [id, v] : g.vertices()) {
    if (!terminals.contains(v.label)) throw Error("vertex " + v.name + " has label `" + v.label + "` outside the terminals");
  }
}

class Reader {
 public:
  Reader(const Dfa& dfa, const Dag& g, const ReadOptions& options) : dfa_(dfa), g_(g), options_(options) {
    for (const auto& [id, v] : g.vertices()) {
      index_[id] = order_.size();
      order_.push_back(id);
    }
    for (std::size_t r = 0; r < dfa.alphabet().size(); ++r) {
      by_sigma_[dfa.alphabet()[r].sigma].push_back(r);
    }
    deterministic_ = !options.unordered_heads && grammar_of(dfa).deterministic();
    read_.assign(order_.size(), false);
  }

  ReadResult run() {
    ReadResult result;
    if (order_.empty()) return result;
    result.accepted = search(dfa_.start(), 0);
    if (result.accepted) result.trace = trace_;
    return result;
  }

 private:
  std::string read_key() const {
    std::string k(read_.size(), '0');
    for (std::size_t i = 0; i < read_.size(); ++i)
      if (read_[i]) k[i] = '1';
    return k;
  }

  std::string labeling_key() const {
    std::string k;
    for (const auto& [e, s] : labels_) k += std::to_string(e.value) + "=" + s + ";";
    return k;
  }

  bool readable(VertexId v) const {
    if (read_[index_.at(v)]) return false;
    const auto& in = g_.vertex(v).in;
    return std::all_of(in.begin(), in.end(), [&](EdgeId e) { return labels_.contains(e); });
  }

  // Readable vertices: non-roots by id, then roots, preferring a root from
  // which a partly labeled vertex can be reached.
  std::vector<VertexId> candidates() const {
    std::vector<VertexId> inner, preferred, other;
    std::set<VertexId> partial;
    for (VertexId v : order_) {
      if (read_[index_.at(v)]) continue;
      const auto& in = g_.vertex(v).in;
      auto labeled = std::count_if(in.begin(), in.end(), [&](EdgeId e) { return labels_.contains(e); });
      if (labeled > 0 && static_cast<std::size_t>(labeled) < in.size()) partial.insert(v);
    }
    for (VertexId v : order_) {
      if (!readable(v)) continue;
      if (!g_.vertex(v).in.empty()) {
        inner.push_back(v);
      } else if (std::any_of(partial.begin(), partial.end(), [&](VertexId w) { return reaches(g_, v, w); })) {
        preferred.push_back(v);
      } else {
        other.push_back(v);
      }
    }
    inner.insert(inner.end(), preferred.begin(), preferred.end());
    inner.insert(inner.end(), other.begin(), other.end());
    return inner;
  }

  bool head_matches(const Rule& r, const std::vector<Symbol>& in_labels) const {
    if (r.head.size() != in_labels.size()) return false;
    if (!options_.unordered_heads) return r.head == in_labels;
    auto a = r.head, b = in_labels;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  }

  bool search(std::size_t state, std::size_t count) {
    if (count == order_.size()) return dfa_.is_accepting(state);

    std::string rk = read_key();
    std::string key = rk + "|" + std::to_string(state);
    if (!deterministic_) key += "|" + labeling_key();
    if (deterministic_) {
      // with a deterministic alphabet the labeling is a function of the read set
      auto [it, fresh] = labeling_of_.emplace(rk, labeling_key());
      if (!fresh && it->second != labeling_key())
        throw Error("internal: labeling differs for the same read set under a deterministic grammar");
    }
    if (failed_.contains(key)) return false;

    for (VertexId v : candidates()) {
      const auto& vx = g_.vertex(v);
      auto sig = by_sigma_.find(vx.label);
      if (sig == by_sigma_.end()) continue;
      std::vector<Symbol> in_labels;
      for (EdgeId e : vx.in) in_labels.push_back(labels_.at(e));
      for (std::size_t r : sig->second) {
        const Rule& rule = dfa_.alphabet()[r];
        if (rule.tail.size() != vx.out.size() || !head_matches(rule, in_labels)) continue;
        auto next = dfa_.next(state, r);
        if (!next) continue;

        read_[index_.at(v)] = true;
        for (EdgeId e : vx.in) labels_.erase(e);
        for (std::size_t j = 0; j < vx.out.size(); ++j) labels_[vx.out[j]] = rule.tail[j];
        trace_.push_back({v, r, *next});
        if (search(*next, count + 1)) return true;
        trace_.pop_back();
        for (EdgeId e : vx.out) labels_.erase(e);
        for (std::size_t j = 0; j < vx.in.size(); ++j) labels_[vx.in[j]] = in_labels[j];
        read_[index_.at(v)] = false;
      }
    }
    failed_.insert(key);
    return false;
  }

  const Dfa& dfa_;
  const Dag& g_;
  ReadOptions options_;
  bool deterministic_ = false;
  std::vector<VertexId> order_;
  std::map<VertexId, std::size_t> index_;
  std::map<Symbol, std::vector<std::size_t>> by_sigma_;
  std::vector<bool> read_;
  std::map<EdgeId, Symbol> labels_;  // frontier labeling
  std::vector<ReadStep> trace_;
  std::unordered_set<std::string> failed_;
  std::unordered_map<std::string, std::string> labeling_of_;
};

}  // namespace

ReadResult read_dag(const Dfa& dfa, const Dag& g, const ReadOptions& options) {
  if (g.empty()) return {};
  check_readable(g, grammar_of(dfa).terminals());
  return Reader(dfa, g, options).run();
}

std::string format_trace(const Dfa& dfa, const Dag& g, const ReadResult& result) {
  std::ostringstream out;
  for (const auto& step : result.trace) {
    out << "read " << g.vertex(step.vertex).name << " via " << dfa.alphabet()[step.rule].to_string()
        << " ; meta = " << dfa.states()[step.state].name << '\n';
  }
  out << (result.accepted ? "ACCEPT" : "REJECT") << '\n';
  return out.str();
}

bool member_fd(const Grammar& grammar, const std::set<MetaState>& q_set, const Dag& g, const ReadOptions& options) {
  if (!g.empty()) check_readable(g, grammar.terminals());
  return read_dag(build_dfa(grammar, q_set), g, options).accepted;
}

std::optional<Derivation> oracle_derivation(const Grammar& grammar, const Dag& g) {
  if (g.empty() || !is_connected(g)) return std::nullopt;
  auto labelings = derivation_labelings(grammar, g, 1);
  if (labelings.empty()) return std::nullopt;
  Derivation d = derive(grammar, script_for_labeling(grammar, labelings.front()));
  if (canonical_form(strip_edge_labels(d.result)) != canonical_form(strip_edge_labels(g)))
    throw Error("internal: replayed derivation does not reproduce the DAG");
  return d;
}

bool member_oracle(const Grammar& grammar, const Dag& g, OracleMode mode, std::size_t vertex_cap) {
  if (g.vertex_count() > vertex_cap)
    throw Error("member_oracle: " + std::to_string(g.vertex_count()) + " vertices exceed the cap of " +
                std::to_string(vertex_cap));
  if (g.empty()) return false;
  for (const auto& [id, v] : g.vertices()) {
    if (!grammar.is_terminal(v.label)) throw Error("vertex " + v.name + " has label `" + v.label + "` outside the terminals");
  }
  if (mode == OracleMode::connected) return oracle_derivation(grammar, g).has_value();
  for (const auto& component : connected_components(g)) {
    if (!oracle_derivation(grammar, induced_subdag(g, component))) return false;
  }
  return true;
}

}  // namespace metadag
