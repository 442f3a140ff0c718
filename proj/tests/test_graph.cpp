#include <set>

#include "doctest.h"
#include "lamfin/term_graph.hpp"
#include "support.hpp"

using namespace lamfin;

namespace {

// Independent closure oracle: walks the unfolding of the finite term itself,
// unrolling Y M as the body of M with Y M substituted, and keys every
// subterm by its unfolding truncated at a fixed depth.  Variables are keyed
// by their binder's truncated unfolding.
struct ClosureOracle {
  int key_depth;

  static TermPtr zeta(const TermPtr& y) {
    Sort alpha = y->sort.result();
    Sort fn = Sort::arrow(alpha, alpha);
    return mk_lam("x", fn, mk_app(mk_var("x", 0, fn), mk_app(y, mk_var("x", 0, fn))));
  }

  static TermPtr head_unfold(TermPtr t) {
    for (;;) {
      if (t->kind == TermKind::Y) return zeta(t);
      if (t->kind == TermKind::App && t->kids[0]->kind == TermKind::Y && t->kids[1]->kind == TermKind::Lam) {
        const TermPtr& body = t->kids[1]->kids[0];
        if (body->kind == TermKind::Var && body->index == 0) return t;  // Y (\s. s)
        t = subst0(body, t);
        continue;
      }
      return t;
    }
  }

  std::string key(TermPtr t, const std::vector<std::string>& ctx, int d) const {
    if (d == 0) return "_";
    t = head_unfold(t);
    switch (t->kind) {
      case TermKind::Const: {
        std::string s = "(" + t->name;
        for (const auto& k : t->kids) s += " " + key(k, ctx, d - 1);
        return s + ")";
      }
      case TermKind::Var: return "[" + ctx[ctx.size() - 1 - t->index] + "]";
      case TermKind::App: return "(@ " + key(t->kids[0], ctx, d - 1) + " " + key(t->kids[1], ctx, d - 1) + ")";
      case TermKind::Lam: {
        std::vector<std::string> inner = ctx;
        inner.push_back(d > 1 ? key(t, ctx, d - 1) : "_");
        return "(\\ " + key(t->kids[0], inner, d - 1) + ")";
      }
      case TermKind::Y: break;
    }
    return "?";
  }

  void walk(TermPtr t, std::vector<std::string>& ctx, int depth, std::set<std::string>& out) const {
    t = head_unfold(t);
    out.insert(key(t, ctx, key_depth));
    if (depth == 0) return;
    if (t->kind == TermKind::Lam) {
      ctx.push_back(key(t, ctx, key_depth - 1));
      walk(t->kids[0], ctx, depth - 1, out);
      ctx.pop_back();
      return;
    }
    for (const auto& k : t->kids) walk(k, ctx, depth - 1, out);
  }

  std::size_t count(const TermPtr& t, int walk_depth) const {
    std::set<std::string> out;
    std::vector<std::string> ctx;
    walk(t, ctx, walk_depth, out);
    return out.size();
  }
};

}  // namespace

TEST_CASE("closure of a constant") {
  Alphabet s = testing::abe();
  CHECK(subterm_closure(*parse_term("e", s)).size() == 1);
  CHECK(subterm_closure(*parse_term("a e", s)).size() == 2);
}

TEST_CASE("closure of a bare fixpoint combinator") {
  Alphabet s = testing::abe();
  auto y = parse_term("Y[o -> o]", s);
  TermGraph g = TermGraph::unfold(*y);
  CHECK(g.size() == 4);
  CHECK(ClosureOracle{8}.count(y, 10) == 4);
  std::set<std::string> printed;
  for (std::uint32_t i = 0; i < g.size(); ++i) printed.insert(g.print(SubtermRef{i}));
  CHECK(printed == std::set<std::string>{"\\x. x (Z x)", "x (Z x)", "Z x", "x"});
}

TEST_CASE("closure of P1") {
  auto p1 = testing::load_corpus("p1.hors");
  TermGraph g = TermGraph::unfold(*p1.term);
  for (const char* s : {"R (\\x. a x)", "\\f. br (f e) (R (\\x. f (f x)))", "\\x. f (f x)", "f (f x)", "f x", "f e",
                        "br (f e) (R (\\x. f (f x)))", "\\x. a x", "a x", "x", "e", "R (\\x. f (f x))", "f"})
    CHECK_MESSAGE(g.find(s).has_value(), s);
  CHECK(g.size() == 14);
}

TEST_CASE("closure sizes agree with the unfolding oracle on the corpus") {
  for (const auto& e : testing::manifest()) {
    CAPTURE(e.file);
    auto f = testing::load_corpus(e.file);
    TermGraph g = TermGraph::unfold(*f.term);
    CHECK(ClosureOracle{9}.count(f.term, 14) == g.size());
  }
}

TEST_CASE("closure is closed under taking subterms") {
  for (const auto& e : testing::manifest()) {
    CAPTURE(e.file);
    TermGraph g = TermGraph::unfold(*testing::load_corpus(e.file).term);
    auto all = g.closure();
    std::set<std::uint32_t> ids;
    for (SubtermRef r : all) ids.insert(r.id);
    CHECK(ids.size() == g.size());
    for (SubtermRef r : all)
      for (SubtermRef k : g.closure(r)) CHECK(ids.count(k.id) == 1);
  }
}

TEST_CASE("root is node zero and the numbering is deterministic") {
  auto f = testing::load_corpus("p2.hors");
  TermGraph a = TermGraph::unfold(*f.term);
  TermGraph b = TermGraph::unfold(*f.term);
  CHECK(a.root().id == 0);
  REQUIRE(a.size() == b.size());
  for (std::uint32_t i = 0; i < a.size(); ++i) CHECK(a.print(SubtermRef{i}) == b.print(SubtermRef{i}));
}
