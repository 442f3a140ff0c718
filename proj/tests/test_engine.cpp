#include <functional>
#include <random>
#include <set>

#include "doctest.h"
#include "examples.hpp"
#include "zero_counter.hpp"
#include "lamfin/export.hpp"
#include "lamfin/oracle.hpp"

using namespace lamfin;
using testing::ft;

namespace {

TermGraph graph_of(const std::string& corpus_file) { return TermGraph::unfold(*testing::load_corpus(corpus_file).term); }

// Exact finiteness for order-0 regular trees: the language is infinite iff
// some cycle through a non-br node survives after dropping unproductive
// nodes and the edges into them.
bool order0_infinite(const TermGraph& g) {
  std::size_t n = g.size();
  std::vector<char> prod(n, 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (prod[v]) continue;
      const GraphNode& nd = g.node(SubtermRef{v});
      bool p;
      if (nd.name == kBr) p = prod[nd.kids[0].id] || prod[nd.kids[1].id];
      else p = std::all_of(nd.kids.begin(), nd.kids.end(), [&](SubtermRef k) { return prod[k.id] != 0; });
      if (p) prod[v] = changed = 1;
    }
  }
  if (!prod[0]) return false;
  auto succ = [&](std::uint32_t v) {
    std::vector<std::uint32_t> out;
    for (SubtermRef k : g.node(SubtermRef{v}).kids)
      if (prod[k.id]) out.push_back(k.id);
    return out;
  };
  std::vector<char> reach(n, 0);
  std::vector<std::uint32_t> stack{0};
  reach[0] = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto w : succ(v))
      if (!reach[w]) reach[w] = 1, stack.push_back(w);
  }
  // A reachable non-br node that can reach itself.
  for (std::uint32_t v = 0; v < n; ++v) {
    if (!reach[v] || g.node(SubtermRef{v}).name == kBr) continue;
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> st = succ(v);
    while (!st.empty()) {
      auto w = st.back();
      st.pop_back();
      if (w == v) return true;
      if (seen[w]) continue;
      seen[w] = 1;
      for (auto x : succ(w)) st.push_back(x);
    }
  }
  return false;
}

std::string random_order0_scheme(std::mt19937& rng) {
  unsigned k = 1 + rng() % 3;
  std::function<std::string(int)> expr = [&](int depth) -> std::string {
    unsigned pick = rng() % (depth == 0 ? 2 : 6);
    switch (pick) {
      case 0: return "e";
      case 1: return "S" + std::to_string(rng() % k);
      case 2: return "(a " + expr(depth - 1) + ")";
      case 3: return "(b " + expr(depth - 1) + " " + expr(depth - 1) + ")";
      default: return "(br " + expr(depth - 1) + " " + expr(depth - 1) + ")";
    }
  };
  std::string s = "symbol a 1\nsymbol b 2\nsymbol e 0\n";
  for (unsigned i = 0; i < k; ++i) s += "nonterminal S" + std::to_string(i) + " : o\n";
  for (unsigned i = 0; i < k; ++i) s += "S" + std::to_string(i) + " = " + expr(3) + "\n";
  return s;
}

}  // namespace

TEST_CASE("find_derivation on the single abstraction") {
  Alphabet s = testing::abe();
  TermGraph g = TermGraph::unfold(*parse_term("\\x:o. a x", s));
  auto m = find_derivation(g, g.root(), testing::tau_m(), 1);
  REQUIRE(m);
  CHECK(m->conclusion.counter == 1);
  CHECK(validate(g, *m).ok);
  auto f = find_derivation(g, g.root(), testing::tau_f(), 0);
  REQUIRE(f);
  CHECK(f->conclusion.counter == 0);
  CHECK(validate(g, *f).ok);
  CHECK(find_derivation(g, g.root(), testing::tau_m(), 2) == nullptr);
}

TEST_CASE("the identity cannot provide an order-1 flag") {
  Alphabet s = testing::abe();
  TermGraph g = TermGraph::unfold(*parse_term("\\x:o. x", s));
  CHECK(find_derivation(g, g.root(), testing::tau_f(), 0) == nullptr);
  auto weak = find_derivation(g, g.root(), ft("(2,{},{},{(1,{},{0},o)}->o)"), 0);
  REQUIRE(weak);
  CHECK(validate(g, *weak).ok);
  CHECK_THROWS_AS(find_derivation(g, g.root(), testing::rho2(), 0), std::invalid_argument);
}

TEST_CASE("P1 has derivations with every counter") {
  TermGraph g = graph_of("p1.hors");
  for (std::uint64_t c = 1; c <= 8; ++c) {
    CAPTURE(c);
    auto d = find_derivation(g, g.root(), testing::rho2(), c);
    REQUIRE(d);
    CHECK(d->conclusion.counter >= c);
    CHECK(d->conclusion.type == testing::rho2());
    CHECK(validate(g, *d).ok);
  }
}

TEST_CASE("P3 derivations stay at counter one") {
  TermGraph g = graph_of("p3.hors");
  auto d = find_derivation(g, g.root(), testing::rho2(), 1);
  REQUIRE(d);
  CHECK(validate(g, *d).ok);
  CHECK(find_derivation(g, g.root(), testing::rho2(), 2) == nullptr);
}

TEST_CASE("budget exhaustion is distinct from not found") {
  TermGraph g = graph_of("p1.hors");
  CHECK_THROWS_AS(find_derivation(g, g.root(), testing::rho2(), 1, EngineOptions{10, 1}), BudgetExhausted);
  CHECK_THROWS_AS(decide_finiteness(g, EngineOptions{10, 1}), BudgetExhausted);
}

TEST_CASE("verdicts on the worked terms") {
  CHECK(decide_finiteness(graph_of("p1.hors")).kind == Verdict::Kind::Infinite);
  CHECK(decide_finiteness(graph_of("p2.hors")).kind == Verdict::Kind::Infinite);
  CHECK(decide_finiteness(graph_of("p3.hors")).kind == Verdict::Kind::Finite);
  CHECK(decide_finiteness(graph_of("p4.hors")).kind == Verdict::Kind::Finite);
}

TEST_CASE("verdicts on the corpus") {
  for (const auto& e : testing::manifest()) {
    CAPTURE(e.file);
    TermGraph g = graph_of(e.file);
    Verdict v = decide_finiteness(g);
    CHECK(to_string(v.kind) == e.expected);
    CHECK(v.order == g.complexity());
    CHECK(v.witness.has_value() == (v.kind == Verdict::Kind::Infinite));
  }
}

TEST_CASE("witnesses are valid and pump to larger counters") {
  for (const auto& e : testing::manifest()) {
    if (e.expected != "INFINITE") continue;
    CAPTURE(e.file);
    TermGraph g = graph_of(e.file);
    Verdict v = decide_finiteness(g);
    REQUIRE(v.witness);
    const PumpWitness& w = *v.witness;
    CHECK(validate(g, *w.derivation).ok);
    CHECK(w.derivation->conclusion.type == rho_hat(v.order));
    CHECK(w.derivation->conclusion.env.empty());
    const Judgment& a = at_path(*w.derivation, w.ancestor).conclusion;
    const Judgment& d = at_path(*w.derivation, w.descendant).conclusion;
    CHECK(a.subject == d.subject);
    CHECK(a.env == d.env);
    CHECK(a.type == d.type);
    CHECK(a.counter > d.counter);
    std::uint64_t last = w.derivation->conclusion.counter;
    for (unsigned k = 1; k <= 4; ++k) {
      auto p = pump(g, w, k);
      CHECK(validate(g, *p).ok);
      CHECK(p->conclusion.counter > last);
      last = p->conclusion.counter;
    }
  }
}

TEST_CASE("finite verdicts carry a bound the oracle respects") {
  for (const auto& e : testing::manifest()) {
    if (e.expected != "FINITE") continue;
    CAPTURE(e.file);
    auto f = testing::load_corpus(e.file);
    TermGraph g = TermGraph::unfold(*f.term);
    Verdict v = decide_finiteness(g);
    REQUIRE(v.kind == Verdict::Kind::Finite);
    if (!v.root_derivable) {
      CHECK(language_upto(f.term, 20, Fuel{}).trees.empty());
      continue;
    }
    REQUIRE(v.max_counter);
    REQUIRE(v.size_bound);
    for (const auto& t : language_upto(f.term, 40, Fuel{}).trees) CHECK(t.size() <= *v.size_bound);
  }
}

TEST_CASE("counters vanish below the top order on saturations and materialized derivations") {
  for (const auto& e : testing::manifest()) {
    CAPTURE(e.file);
    TermGraph g = graph_of(e.file);
    unsigned m = g.complexity();
    Saturation sat(g, m);
    CHECK(sat.zero_counter_violations().empty());
    for (std::uint32_t i = 0; i < sat.size(); ++i) {
      auto d = sat.min_derivation(i);
      CHECK(validate(g, *d).ok);
      CHECK(testing::zero_counter_bad_nodes(g, *d) == 0);
      if (sat.can_grow(i)) {
        auto p = sat.positive_derivation(i);
        CHECK(validate(g, *p).ok);
        CHECK(p->conclusion.counter > 0);
        CHECK(testing::zero_counter_bad_nodes(g, *p) == 0);
      }
    }
  }
}

TEST_CASE("counters are additive under replacement of equal skeletons") {
  for (const auto& e : testing::manifest()) {
    CAPTURE(e.file);
    TermGraph g = graph_of(e.file);
    Saturation sat(g, g.complexity());
    auto root = sat.find(Skeleton{TypeEnv(), g.root(), rho_hat(g.complexity())});
    if (!root) continue;
    DerivationPtr base = sat.min_derivation(*root);
    std::function<void(const Derivation&, DerivationPath&)> walk = [&](const Derivation& d, DerivationPath& path) {
      const Judgment& j = d.conclusion;
      auto id = sat.find(Skeleton{j.env, j.subject, j.type});
      REQUIRE(id);
      if (sat.can_grow(*id)) {
        auto bigger = sat.positive_derivation(*id);
        if (bigger->conclusion.counter > j.counter) {
          auto r = replace_at(g, base, path, bigger);
          CHECK(validate(g, *r).ok);
          CHECK(r->conclusion.counter == base->conclusion.counter + (bigger->conclusion.counter - j.counter));
        }
      }
      for (std::size_t i = 0; i < d.premisses.size(); ++i) {
        path.push_back(i);
        walk(*d.premisses[i], path);
        path.pop_back();
      }
    };
    DerivationPath path;
    walk(*base, path);
  }
}

TEST_CASE("verdicts do not depend on the thread count") {
  for (const char* file : {"p1.hors", "p2.hors", "p4.hors", "numerals.hors"}) {
    CAPTURE(file);
    TermGraph g = graph_of(file);
    std::string one = verdict_to_json(g, decide_finiteness(g, EngineOptions{20'000'000, 1})).dump();
    for (unsigned t : {2u, 4u, 8u}) CHECK(verdict_to_json(g, decide_finiteness(g, EngineOptions{20'000'000, t})).dump() == one);
  }
}

TEST_CASE("order-0 verdicts agree with the exact language on random schemes") {
  std::mt19937 rng(1234);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::string text = random_order0_scheme(rng);
    CAPTURE(text);
    TermFile f = load_program(text);
    TermGraph g = TermGraph::unfold(*f.term);
    if (g.complexity() != 0) continue;
    ++checked;
    bool infinite = order0_infinite(g);
    Verdict v = decide_finiteness(g);
    CHECK(infinite == (v.kind == Verdict::Kind::Infinite));
    if (v.witness) {
      CHECK(validate(g, *v.witness->derivation).ok);
      CHECK(pump(g, *v.witness, 1)->conclusion.counter > v.witness->derivation->conclusion.counter);
    }
    if (v.kind == Verdict::Kind::Finite && v.root_derivable) {
      // At order 0 the counter is the tree size, so nothing lies beyond it.
      REQUIRE(*v.max_counter <= 40);
      Language l = language_upto(f.term, *v.max_counter + 3, Fuel{256, 100'000});
      CHECK(l.complete);
      std::size_t largest = 0;
      for (const auto& t : l.trees) largest = std::max(largest, t.size());
      CHECK(largest == *v.max_counter);
    }
    if (!v.root_derivable) {
      Language l = language_upto(f.term, 12, Fuel{256, 100'000});
      CHECK(l.trees.empty());
      CHECK(l.complete);
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("tower") {
  CHECK(tower(0, 5) == std::optional<std::uint64_t>(5));
  CHECK(tower(1, 3) == std::optional<std::uint64_t>(8));
  CHECK(tower(2, 2) == std::optional<std::uint64_t>(16));
  CHECK(tower(3, 3) == std::nullopt);
}
