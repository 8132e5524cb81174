#include <doctest.h>

#include <algorithm>

#include "metadag/error.hpp"
#include "metadag/rule_analysis.hpp"
#include "support.hpp"

using namespace metadag;

namespace {

using Key = std::tuple<std::size_t, Port, Port>;

std::vector<Port> ports_of(const Grammar& g, std::size_t r) {
  std::vector<Port> out;
  const Rule& rule = g.rule(r);
  for (std::size_t i = 0; i < rule.head.size(); ++i) out.push_back({r, Side::head, i, rule.head[i]});
  for (std::size_t i = 0; i < rule.tail.size(); ++i) out.push_back({r, Side::tail, i, rule.tail[i]});
  return out;
}

// smallest rotation of the cycle or of its reversal
std::vector<Key> normalize(std::vector<Key> seq) {
  std::vector<Key> best;
  for (int flip = 0; flip < 2; ++flip) {
    for (std::size_t r = 0; r < seq.size(); ++r) {
      std::rotate(seq.begin(), seq.begin() + 1, seq.end());
      if (best.empty() || seq < best) best = seq;
    }
    std::reverse(seq.begin(), seq.end());
    for (auto& [rule, en, ex] : seq) std::swap(en, ex);
  }
  return best;
}

std::vector<Key> keys_of(const RuleCycleWitness& c) {
  std::vector<Key> out;
  for (const auto& m : c.rules) out.emplace_back(m.rule, *m.entry, *m.exit);
  return out;
}

// every simple rule cycle with at most `max_len` marked rules
std::set<std::vector<Key>> brute_force_cycles(const Grammar& g, std::size_t max_len) {
  std::vector<Key> marked;
  for (std::size_t r = 0; r < g.size(); ++r) {
    for (const Port& a : ports_of(g, r))
      for (const Port& b : ports_of(g, r))
        if (!(a == b)) marked.emplace_back(r, a, b);
  }
  std::set<std::vector<Key>> out;
  std::vector<Key> seq;
  std::function<void()> grow = [&] {
    if (!seq.empty()) {
      const Port& exit = std::get<2>(seq.back());
      const Port& entry = std::get<1>(seq.front());
      if (exit.nonterminal == entry.nonterminal && exit.side != entry.side) out.insert(normalize(seq));
    }
    if (seq.size() == max_len) return;
    for (const Key& k : marked) {
      bool fresh = true;
      for (const Key& s : seq) {
        for (const Port* p : {&std::get<1>(s), &std::get<2>(s)})
          fresh = fresh && !(*p == std::get<1>(k)) && !(*p == std::get<2>(k));
      }
      if (!fresh) continue;
      if (!seq.empty()) {
        const Port& exit = std::get<2>(seq.back());
        const Port& entry = std::get<1>(k);
        if (exit.nonterminal != entry.nonterminal || exit.side == entry.side) continue;
      }
      seq.push_back(k);
      grow();
      seq.pop_back();
    }
  };
  grow();
  return out;
}

std::set<Port> marked_ports(const RuleCycleWitness& c) {
  std::set<Port> out;
  for (const auto& m : c.rules) {
    out.insert(*m.entry);
    out.insert(*m.exit);
  }
  return out;
}

}  // namespace

TEST_CASE("port graph of the trees") {
  Grammar g = support::corpus_grammar("tree");
  PortGraph pg = build_port_graph(g);
  CHECK(pg.ports.size() == 6);
  CHECK(pg.agreements.size() == 4 * 2);  // every tail q with every head q
  for (auto [t, h] : pg.agreements) {
    CHECK(pg.ports[t].side == Side::tail);
    CHECK(pg.ports[h].side == Side::head);
  }
  CHECK(Port{1, Side::head, 0, "q"}.to_string() == "r1.H0(q)");

  Grammar fork = support::corpus_grammar("fork");
  std::size_t expected = 0;
  for (const auto& r : fork.rules()) expected += r.head.size() + r.tail.size();
  CHECK(build_port_graph(fork).ports.size() == expected);

  Grammar disjoint({"a", "b"}, {"p", "q"}, {parse_rule("_ -> a -> p"), parse_rule("q -> b -> _")});
  CHECK(build_port_graph(disjoint).agreements.empty());
}

TEST_CASE("rule cycles of the corpus grammars") {
  Grammar tree_g = support::corpus_grammar("tree");
  auto cycles = find_rule_cycles(tree_g);
  bool self_loop = false;
  for (const auto& c : cycles) {
    CHECK(verify_rule_cycle(tree_g, c));
    if (c.rules.size() == 1 && c.rules[0].rule == 1 && c.directed) self_loop = true;
  }
  CHECK(self_loop);

  Grammar star = support::corpus_grammar("star");
  std::set<Port> want{{0, Side::tail, 0, "r"}, {0, Side::tail, 1, "r"}, {1, Side::head, 0, "r"}, {1, Side::head, 1, "r"}};
  bool crown = false;
  for (const auto& c : find_rule_cycles(star, 2)) {
    CHECK(verify_rule_cycle(star, c));
    if (c.rules.size() == 2 && !c.directed && marked_ports(c) == want) crown = true;
  }
  CHECK(crown);

  Grammar lone({"a"}, {}, {parse_rule("_ -> a -> _")});
  CHECK(find_rule_cycles(lone).empty());
}

TEST_CASE("find_rule_cycles matches exhaustive marked-rule search") {
  for (const char* name : {"tree", "bow", "star", "chain", "pair", "fork", "dual_tree", "choice"}) {
    CAPTURE(name);
    Grammar g = support::corpus_grammar(name);
    for (std::size_t len : {1, 2, 3}) {
      std::set<std::vector<Key>> got;
      for (const auto& c : find_rule_cycles(g, len)) {
        REQUIRE(verify_rule_cycle(g, c));
        CHECK(c.rules.size() <= len);
        CHECK(got.insert(normalize(keys_of(c))).second);  // reported once
      }
      CHECK(got == brute_force_cycles(g, len));
    }
  }
}

TEST_CASE("witness verifiers reject broken witnesses") {
  Grammar tree_g = support::corpus_grammar("tree");
  RuleCycleWitness c = find_rule_cycles(tree_g).front();
  RuleCycleWitness bad = c;
  bad.directed = !bad.directed;
  CHECK_FALSE(verify_rule_cycle(tree_g, bad));
  bad = c;
  bad.rules[0].exit = bad.rules[0].entry;
  CHECK_FALSE(verify_rule_cycle(tree_g, bad));
  bad = c;
  bad.rules[0].entry.reset();
  CHECK_FALSE(verify_rule_cycle(tree_g, bad));

  RulePathWitness one{{{1, std::nullopt, Port{1, Side::tail, 0, "q"}}}};
  CHECK_FALSE(verify_rule_path(tree_g, one));
  RulePathWitness two{{{1, std::nullopt, Port{1, Side::tail, 0, "q"}}, {2, Port{2, Side::head, 0, "q"}, std::nullopt}}};
  CHECK(verify_rule_path(tree_g, two));
  two.rules[1].entry = Port{2, Side::head, 1, "q"};
  CHECK_FALSE(verify_rule_path(tree_g, two));
}

TEST_CASE("is_infinite") {
  CHECK(is_infinite(support::corpus_grammar("tree")));
  CHECK(is_infinite(support::corpus_grammar("bow")));
  CHECK(is_infinite(support::corpus_grammar("star")));
  CHECK_FALSE(is_infinite(support::corpus_grammar("pair")));
  CHECK_FALSE(is_infinite(support::corpus_grammar("fork")));
  Grammar useless = support::corpus_grammar("tree");
  auto rules = useless.rules();
  rules.push_back(parse_rule("q q -> X -> s"));
  CHECK_THROWS_AS(is_infinite(Grammar({"R", "M", "L", "X"}, {"q", "s"}, rules)), Error);
}

TEST_CASE("label_unbounded") {
  Grammar star = support::corpus_grammar("star");
  auto w = label_unbounded(star, "L");
  CHECK(w.unbounded);
  CHECK(w.condition == 'b');
  REQUIRE(w.cycle);
  REQUIRE(w.path);
  REQUIRE(w.unmarked);
  CHECK(verify_rule_cycle(star, *w.cycle));
  CHECK(verify_rule_path(star, *w.path));
  CHECK(w.unmarked->nonterminal == "c");
  CHECK(star.rule(w.path->rules.back().rule).sigma == "L");

  auto q = label_unbounded(support::corpus_grammar("tree"), "q");
  CHECK(q.unbounded);
  CHECK(q.condition == 'a');

  CHECK_FALSE(label_unbounded(support::corpus_grammar("pair"), "b").unbounded);
  CHECK_THROWS(label_unbounded(star, "nope"));
}

TEST_CASE("classification of the corpus") {
  auto pruned = [](const char* name) { return prune_useless(support::corpus_grammar(name)).grammar; };

  Grammar tree_g = pruned("tree");
  Classification t = classify(tree_g);
  CHECK(t.cls == LanguageClass::id);
  REQUIRE(t.id_witness);
  std::string why;
  CHECK_MESSAGE(verify_id_witness(tree_g, *t.id_witness, &why), why);
  CHECK(format_id_witness(tree_g, *t.id_witness).find("unmarked") != std::string::npos);

  Grammar bow = pruned("bow");
  Classification b = classify(bow);
  CHECK(b.cls == LanguageClass::id);
  REQUIRE(b.id_witness);
  CHECK(verify_id_witness(bow, *b.id_witness));

  Classification c = classify(pruned("chain"));
  CHECK(c.cls == LanguageClass::fid);
  CHECK_FALSE(c.id_witness);
  CHECK(c.cycle);

  CHECK(classify(pruned("star")).cls == LanguageClass::fid);
  CHECK(classify(pruned("pair")).cls == LanguageClass::finite);
  CHECK(classify(pruned("dual_tree")).cls == LanguageClass::id);

  Classification empty = classify(pruned("rootless"));
  CHECK(empty.cls == LanguageClass::finite);
  CHECK(empty.empty_language);

  CHECK_THROWS_AS(classify(support::corpus_grammar("choice")), Error);
  CHECK(to_string(LanguageClass::fid) == "FID");
}

TEST_CASE("ID witnesses survive tampering checks") {
  Grammar tree_g = support::corpus_grammar("tree");
  IdWitness w = *find_id_witness(tree_g);
  IdWitness bad = w;
  bad.instance = bad.cycle.rules.size();
  CHECK_FALSE(verify_id_witness(tree_g, bad));
  bad = w;
  bad.unmarked = *bad.cycle.rules[bad.instance].entry;
  CHECK_FALSE(verify_id_witness(tree_g, bad));
  bad = w;
  bad.path.rules.pop_back();
  CHECK_FALSE(verify_id_witness(tree_g, bad));

  CHECK_FALSE(find_id_witness(support::corpus_grammar("chain")));
  CHECK_FALSE(find_id_witness(support::corpus_grammar("star")));
}
