#include "metadag/meta_state.hpp"

#include <algorithm>
#include <sstream>

#include "metadag/dag_io.hpp"
#include "metadag/error.hpp"

namespace metadag {

MetaState::MetaState(const std::vector<Symbol>& symbols) {
  for (const auto& s : symbols) add(s);
}

void MetaState::add(const Symbol& s, std::uint32_t n) {
  if (n == 0) return;
  counts_[s] += n;
  size_ += n;
}

std::uint32_t MetaState::count(const Symbol& s) const {
  auto it = counts_.find(s);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<Symbol> MetaState::symbols() const {
  std::vector<Symbol> out;
  for (const auto& [s, n] : counts_) out.insert(out.end(), n, s);
  return out;
}

std::string MetaState::to_string() const {
  if (empty()) return "_";
  std::string out;
  for (const auto& s : symbols()) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

MetaState MetaState::parse(std::string_view text) {
  auto tokens = split_tokens(text);
  if (tokens.size() == 1 && tokens[0] == "_") return {};
  if (tokens.empty()) throw ParseError(0, "empty meta-state (write `_` for the empty multiset)");
  for (const auto& t : tokens) {
    if (t == "_") throw ParseError(0, "`_` cannot be combined with other symbols");
  }
  return MetaState(tokens);
}

std::strong_ordering MetaState::operator<=>(const MetaState& other) const {
  if (auto c = size_ <=> other.size_; c != 0) return c;
  auto a = symbols(), b = other.symbols();
  return a <=> b;
}

MetaState msum(const MetaState& a, const MetaState& b) {
  MetaState out = a;
  for (const auto& [s, n] : b.counts()) out.add(s, n);
  return out;
}

MetaState mdiff(const MetaState& a, const MetaState& b) {
  if (!mleq(b, a)) throw Error("mdiff: " + b.to_string() + " is not included in " + a.to_string());
  MetaState out;
  for (const auto& [s, n] : a.counts()) out.add(s, n - b.count(s));
  return out;
}

bool mleq(const MetaState& a, const MetaState& b) {
  return std::all_of(a.counts().begin(), a.counts().end(),
                     [&](const auto& kv) { return kv.second <= b.count(kv.first); });
}

MetaState meta(const Dag& g, const std::set<Symbol>& nonterminals) {
  MetaState out;
  for (const auto& [id, v] : g.vertices())
    if (nonterminals.contains(v.label)) out.add(v.label);
  return out;
}

std::set<MetaState> all_meta_states(const std::set<Symbol>& symbols, std::size_t max_size) {
  std::set<MetaState> out{MetaState{}};
  std::vector<MetaState> layer{MetaState{}};
  for (std::size_t k = 0; k < max_size; ++k) {
    std::vector<MetaState> next;
    for (const auto& m : layer) {
      for (const auto& s : symbols) {
        MetaState bigger = m;
        bigger.add(s);
        if (out.insert(bigger).second) next.push_back(bigger);
      }
    }
    layer = std::move(next);
  }
  return out;
}

std::size_t MetaStateSet::max_size() const {
  std::size_t best = 0;
  for (const auto& m : states) best = std::max(best, m.size());
  return best;
}

std::set<MetaState> parse_qset(std::string_view text) {
  std::set<MetaState> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (split_tokens(line).empty()) continue;
    try {
      out.insert(MetaState::parse(line));
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return out;
}

std::string print_qset(const std::set<MetaState>& states) {
  std::string out;
  for (const auto& m : states) out += m.to_string() + "\n";
  return out;
}

}  // namespace metadag
