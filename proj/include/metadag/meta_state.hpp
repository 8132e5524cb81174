#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "metadag/dag.hpp"

namespace metadag {

/// Finite multiset of nonterminals. Text form is the sorted symbol list
/// (`p q q`); the empty multiset is written `_`.
class MetaState {
 public:
  MetaState() = default;
  explicit MetaState(const std::vector<Symbol>& symbols);

  void add(const Symbol& s, std::uint32_t n = 1);
  std::uint32_t count(const Symbol& s) const;
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const std::map<Symbol, std::uint32_t>& counts() const { return counts_; }

  /// Sorted symbol list with repetitions.
  std::vector<Symbol> symbols() const;
  std::string to_string() const;
  static MetaState parse(std::string_view text);

  bool operator==(const MetaState& other) const { return counts_ == other.counts_; }
  /// Smaller multisets first, then lexicographic on the sorted symbol list.
  std::strong_ordering operator<=>(const MetaState& other) const;

 private:
  std::map<Symbol, std::uint32_t> counts_;
  std::size_t size_ = 0;
};

MetaState msum(const MetaState& a, const MetaState& b);
/// a minus b; throws `Error` unless b is included in a.
MetaState mdiff(const MetaState& a, const MetaState& b);
/// Multiset inclusion a ⊑ b.
bool mleq(const MetaState& a, const MetaState& b);

/// Multiset of the vertex labels of g that are nonterminals.
MetaState meta(const Dag& g, const std::set<Symbol>& nonterminals);

/// All multisets over `symbols` of size at most `max_size`.
std::set<MetaState> all_meta_states(const std::set<Symbol>& symbols, std::size_t max_size);

struct MetaStateSet {
  std::set<MetaState> states;
  bool saturated = false;
  std::size_t size_cap = 0;
  std::size_t step_cap = 0;

  std::size_t max_size() const;
};

/// One meta-state per line; blank lines and `#` comments are skipped.
std::set<MetaState> parse_qset(std::string_view text);
std::string print_qset(const std::set<MetaState>& states);

}  // namespace metadag
